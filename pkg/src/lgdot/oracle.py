"""Independent reference results used to certify the main pipeline.

Nothing here calls into :mod:`lgdot.cascade` or :mod:`lgdot.lganalysis`, and
the stepwise integrator evaluates the master equation with its own code
rather than through :func:`lgdot.densmat.build_liouvillian`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from lgdot.constants import HBAR
from lgdot.densmat import LindbladChannel, as_matrix
from lgdot.errors import InputError


@dataclass(frozen=True)
class AnalyticParams:
    """Closed-form regime: no population exchange between the exciton states.

    ``gamma_total`` is the decay rate of the *normalised* correlator.  Radiative
    decay removes both exciton states at the same rate and cancels in the ratio,
    so for the cascade model this is ``gamma_dephase0`` plus half the summed
    phonon flip rates.
    """

    s_fss: float
    gamma_total: float
    eta: float = 1.0
    g: float = 0.0

    def __post_init__(self):
        if self.gamma_total < 0:
            raise InputError(f"gamma_total must be >= 0, got {self.gamma_total}")
        if not 0.0 <= self.eta <= 1.0:
            raise InputError(f"eta must lie in [0, 1], got {self.eta}")
        if self.g < 0:
            raise InputError(f"g must be >= 0, got {self.g}")


def analytic_correlator(a: AnalyticParams, t: float) -> float:
    if t < 0:
        raise InputError(f"t must be >= 0, got {t}")
    return a.eta / (1.0 + a.g) * math.exp(-a.gamma_total * t) * math.cos(a.s_fss * t / HBAR)


def analytic_gated_correlator(a: AnalyticParams, t: float, width: float, gamma_x: float) -> float:
    """Closed form of the coincidence-weighted average over ``[t, t + width]``.

    Coincidences arrive with density ``exp(-gamma_x * tau)``, so the gate
    average is ``int e^{-(gx+G)tau} cos(s tau) / int e^{-gx tau}`` times eta/(1+g).
    """
    if width == 0:
        return analytic_correlator(a, t)
    s = a.s_fss / HBAR
    lam = complex(gamma_x + a.gamma_total, -s)

    def _int_exp(rate: complex) -> complex:
        # int_t^{t+w} exp(-rate tau) d tau, shifted by exp(gamma_x t) to stay finite
        shift = math.exp(gamma_x * t)
        if abs(rate) * width < 1e-8:
            return np.exp(-rate * t) * shift * width * (1 - rate * width / 2)
        return np.exp(-rate * t) * shift * (-np.expm1(-rate * width)) / rate

    num = _int_exp(lam).real
    den = _int_exp(complex(gamma_x, 0.0)).real
    return a.eta / (1.0 + a.g) * num / den


def _max_rate(channels: Sequence[LindbladChannel]) -> float:
    rates = [ch.rate * np.linalg.norm(ch.collapse, 2) ** 2 for ch in channels]
    return max(rates, default=0.0)


def _shortest_period(h0: np.ndarray) -> float:
    w = np.linalg.eigvalsh(0.5 * (h0 + h0.conj().T))
    spread = float(w[-1] - w[0])
    return math.inf if spread == 0 else 2 * math.pi / spread


def max_rk4_step(h0, channels: Sequence[LindbladChannel]) -> float:
    """Largest step accepted by :func:`rk4_reference` for this problem."""
    h0 = as_matrix(h0, name="h0")
    rate = _max_rate(channels)
    limit = _shortest_period(h0) / 100
    if rate > 0:
        limit = min(limit, 0.01 / rate)
    return limit


def rk4_reference(
    rho0,
    h0,
    channels: Sequence[LindbladChannel],
    t: float,
    steps: int,
) -> np.ndarray:
    """Classic fixed-step RK4 integration of the master equation.

    Global error is O(h^4).  ``steps`` must be at least 1000 and the step
    ``t / steps`` must not exceed ``min(0.01 / max_rate, period / 100)``, where
    ``max_rate`` is the largest ``rate * ||C||^2`` and ``period`` the shortest
    Bohr period of ``h0``.
    """
    rho = np.array(as_matrix(rho0, name="rho0"))
    h0 = as_matrix(h0, name="h0")
    n = h0.shape[0]
    if rho.shape != (n, n):
        raise InputError(f"rho0 has shape {rho.shape}, h0 is {n}x{n}")
    if t < 0:
        raise InputError(f"t must be >= 0, got {t}")
    if t == 0:
        return rho
    if steps < 1000:
        raise InputError(f"steps must be >= 1000, got {steps}")
    h = t / steps
    if h > max_rk4_step(h0, channels) * (1 + 1e-12):
        raise InputError(
            f"step {h:.4g} ps exceeds the accuracy limit {max_rk4_step(h0, channels):.4g} ps"
        )

    if channels:
        cs = np.stack([np.sqrt(ch.rate) * ch.collapse for ch in channels])
        csd = np.conj(np.transpose(cs, (0, 2, 1)))
        # the anticommutator part folds into an effective non-Hermitian Hamiltonian
        heff = h0 - 0.5j * np.einsum("kij,kjl->il", csd, cs)
    else:
        cs = csd = None
        heff = h0
    heff_d = heff.conj().T

    def rhs(r: np.ndarray) -> np.ndarray:
        out = -1j * (heff @ r - r @ heff_d)
        if cs is not None:
            out += np.einsum("kij,jl,klm->im", cs, r, csd)
        return out

    for _ in range(steps):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * h * k1)
        k3 = rhs(rho + 0.5 * h * k2)
        k4 = rhs(rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return rho


def analytic_lg_minimum(branch: str = "minus") -> tuple[float, float]:
    """Minimum of the ideal two-shot combination ``cos 2theta -/+ 2 cos theta``.

    With ``x = cos theta`` the minus branch is ``2x^2 - 2x - 1``, minimised at
    ``x = 1/2``; the plus branch ``2x^2 + 2x - 1`` at ``x = -1/2``.  Both reach -3/2.
    """
    if branch == "minus":
        x = 0.5
        value = 2 * x * x - 2 * x - 1
    elif branch == "plus":
        x = -0.5
        value = 2 * x * x + 2 * x - 1
    else:
        raise InputError(f"branch must be 'plus' or 'minus', got {branch!r}")
    return math.acos(x), value
