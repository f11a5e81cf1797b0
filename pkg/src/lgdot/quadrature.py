"""Adaptive Simpson quadrature for scalar- or array-valued integrands."""

from __future__ import annotations

from typing import Callable

import numpy as np

from lgdot.errors import InputError


def adaptive_simpson(
    f: Callable[[float], np.ndarray],
    a: float,
    b: float,
    *,
    rtol: float = 1e-8,
    atol: float = 0.0,
    min_panels: int = 1,
    max_depth: int = 40,
):
    """Integrate ``f`` over ``[a, b]``.

    The interval is first cut into ``min_panels`` equal panels, each refined
    until the Richardson estimate ``|S_halves - S_whole| / 15`` meets its share
    of ``max(atol, rtol * |I|)``.  For array-valued ``f`` the max-abs norm is
    used, with ``|I|`` taken from the coarse whole-interval estimate.
    """
    if not (np.isfinite(a) and np.isfinite(b)) or b < a:
        raise InputError(f"invalid interval [{a}, {b}]")
    if min_panels < 1:
        raise InputError("min_panels must be >= 1")
    if b == a:
        return 0.0 * np.asarray(f(a))

    edges = np.linspace(a, b, min_panels + 1)
    panels = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        flo, fmid, fhi = f(lo), f(mid), f(hi)
        panels.append((lo, hi, flo, fmid, fhi, (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)))

    scale = float(np.max(np.abs(sum(p[5] for p in panels))))
    tol = max(atol, rtol * scale)
    if tol == 0.0:
        tol = np.finfo(float).tiny

    total = 0.0
    per_panel = tol / len(panels)
    for lo, hi, flo, fmid, fhi, whole in panels:
        total = total + _refine(f, lo, hi, flo, fmid, fhi, whole, per_panel, max_depth)
    return total


def _refine(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth <= 0 or float(np.max(np.abs(delta))) <= 15.0 * tol:
        return left + right + delta / 15.0
    return _refine(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) + _refine(
        f, m, b, fm, frm, fb, right, tol / 2, depth - 1
    )
