"""Correlators, Leggett-Garg combinations, violation search and parameter sweeps.

Under stationarity the two-shot combinations are

    K+ = K(2t) + 2 K(t) >= -1,    K- = K(2t) - 2 K(t) >= -1

for any macrorealistic description; quantum mechanics reaches -3/2.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from lgdot import cascade
from lgdot.cascade import DotParameters, PairState
from lgdot.constants import HBAR, TOL
from lgdot.errors import DegenerateError, InputError, LGDotError
from lgdot.quadrature import adaptive_simpson

SWEEP_AXES = ("s_fss", "g_noise", "temperature", "gate_width")

_PLUS = np.array([1.0, 1.0]) / math.sqrt(2)
_MINUS = np.array([1.0, -1.0]) / math.sqrt(2)


@dataclass(frozen=True)
class LGPoint:
    t: float
    k_t: float
    k_2t: float
    k_plus: float
    k_minus: float

    @classmethod
    def from_correlators(cls, t: float, k_t: float, k_2t: float) -> "LGPoint":
        return cls(t=t, k_t=k_t, k_2t=k_2t, k_plus=k_2t + 2 * k_t, k_minus=k_2t - 2 * k_t)


@dataclass(frozen=True)
class SweepResult:
    axis_name: str
    axis_values: tuple[float, ...]
    curves: tuple[tuple[LGPoint, ...], ...]
    min_kminus: tuple[float, ...]
    first_violation_t: tuple[Optional[float], ...]

    @property
    def t_grid(self) -> tuple[float, ...]:
        return tuple(pt.t for pt in self.curves[0])


def joint_probabilities(ps: PairState) -> tuple[float, float]:
    """P(++), P(+-) conditioned on the first photon being found in |+>.

    Computed from the full projectors, without using the zero pattern.
    """
    if not ps.normalized:
        raise InputError("joint_probabilities needs a normalised PairState")
    pp = np.kron(_PLUS, _PLUS)
    pm = np.kron(_PLUS, _MINUS)
    w_pp = float(np.real(pp @ ps.rho @ pp))
    w_pm = float(np.real(pm @ ps.rho @ pm))
    den = w_pp + w_pm
    if den < TOL.degenerate:
        raise DegenerateError(f"probability of first photon in |+> is {den:.3e}")
    return w_pp / den, w_pm / den


def correlator(ps: PairState) -> float:
    """K = (rho14 + rho41) / Tr rho."""
    rho = ps.rho
    tr = np.trace(rho).real
    if tr < TOL.degenerate:
        raise DegenerateError(f"pair matrix trace {tr:.3e} is too small to normalise")
    num = rho[0, 3] + rho[3, 0]
    if abs(num.imag) > TOL.algebraic * max(1.0, tr):
        raise DegenerateError(f"coherence sum has imaginary part {num.imag:.3e}")
    return float(num.real / tr)


def _gate_panels(p: DotParameters) -> int:
    if p.s_fss == 0:
        return 1
    period = 2 * math.pi * HBAR / p.s_fss
    return max(1, math.ceil(16 * p.gate_width / period))


def gated_correlator(p: DotParameters, t: float) -> float:
    """Coincidence-weighted correlator over the gate ``[t, t + gate_width]``.

    Pair matrices are accumulated with the emission weight
    ``exp(-gamma_x (tau - t))`` before taking the correlator, so numerator and
    denominator are integrated together.  A zero-width gate is the
    instantaneous correlator.
    """
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise InputError(f"t must be finite and >= 0, got {t!r}")
    if p.gate_width == 0:
        return correlator(cascade.pair_density_total(p, t))
    eta = cascade.spectral_overlap(p)

    # integrate over the gate fraction u = (tau - t) / width, which averages
    # rather than integrates and stays well scaled for very narrow gates
    def integrand(u):
        weight = math.exp(-p.gamma_x * p.gate_width * u)
        return weight * cascade.mixture(p, cascade.conditional_pair(p, t + p.gate_width * u), eta)

    accumulated = adaptive_simpson(integrand, 0.0, 1.0, rtol=TOL.quadrature_rtol, min_panels=_gate_panels(p))
    return correlator(PairState(0.5 * (accumulated + accumulated.conj().T)))


def lg_point(p: DotParameters, t: float) -> LGPoint:
    """Evaluate K(t), K(2t) by two independent evolutions from the same initial state."""
    k_t = gated_correlator(p, t)
    k_2t = gated_correlator(p, 2 * t)
    return LGPoint.from_correlators(float(t), k_t, k_2t)


def _branch_value(pt: LGPoint, which: str) -> float:
    return pt.k_minus if which == "minus" else pt.k_plus


def _violates(value: float) -> bool:
    return value < -1.0 - TOL.violation_margin


def _bisect_crossing(p: DotParameters, which: str, lo: float, hi: float, tol: float) -> float:
    # invariant: no violation at lo, violation at hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _violates(_branch_value(lg_point(p, mid), which)):
            hi = mid
        else:
            lo = mid
    return hi


def find_first_violation(
    p: DotParameters, which: str, t_max: float, dt: float
) -> Optional[float]:
    """First time the chosen branch drops below -1, refined to ``dt * 1e-3``; None if never."""
    if which not in ("plus", "minus"):
        raise InputError(f"which must be 'plus' or 'minus', got {which!r}")
    if not dt > 0 or not t_max > 0:
        raise InputError("dt and t_max must be positive")
    n = int(math.floor(t_max / dt + 1e-9))
    grid = [k * dt for k in range(n + 1)]
    if grid[-1] < t_max:
        grid.append(t_max)
    prev = None
    for t in grid:
        if _violates(_branch_value(lg_point(p, t), which)):
            if prev is None:
                return t
            return _bisect_crossing(p, which, prev, t, dt * 1e-3)
        prev = t
    return None


def _first_violation_on_curve(p, curve: Sequence[LGPoint], which: str = "minus"):
    for i, pt in enumerate(curve):
        if _violates(_branch_value(pt, which)):
            if i == 0:
                return pt.t
            lo = curve[i - 1].t
            return _bisect_crossing(p, which, lo, pt.t, (pt.t - lo) * 1e-3)
    return None


def _curve(args):
    p, t_grid = args
    return tuple(lg_point(p, t) for t in t_grid)


def sweep(
    p_base: DotParameters,
    axis: str,
    values: Sequence[float],
    t_grid: Sequence[float],
    *,
    workers: int = 1,
) -> SweepResult:
    """Evaluate K+/- on ``t_grid`` for each value of one parameter.

    With ``workers > 1`` curves are computed in separate processes; the result
    is assembled in input order either way.
    """
    if axis not in SWEEP_AXES:
        raise InputError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    values = tuple(float(v) for v in values)
    t_grid = tuple(float(t) for t in t_grid)
    if not values or not t_grid:
        raise InputError("sweep needs at least one axis value and one time")
    params = [dataclasses.replace(p_base, **{axis: v}) for v in values]
    jobs = [(p, t_grid) for p in params]
    try:
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                curves = tuple(pool.map(_curve, jobs))
        else:
            curves = tuple(_curve(job) for job in jobs)
    except LGDotError as exc:
        raise type(exc)(f"sweep over {axis} failed: {exc}") from exc
    min_km = tuple(min(pt.k_minus for pt in c) for c in curves)
    first = tuple(_first_violation_on_curve(p, c) for p, c in zip(params, curves))
    return SweepResult(
        axis_name=axis,
        axis_values=values,
        curves=curves,
        min_kminus=min_km,
        first_violation_t=first,
    )
