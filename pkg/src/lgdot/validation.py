"""Self-certification suite run by ``lgdot validate``.

Each check compares the production path with an independent reference
(closed forms, the RK4 integrator, brute-force scans) at fixed tolerances.
"""

from __future__ import annotations

import dataclasses
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from lgdot import densmat, oracle
from lgdot.cascade import DotParameters, PairState
from lgdot.constants import HBAR
from lgdot.densmat import LindbladChannel
from lgdot.lganalysis import correlator, joint_probabilities, lg_point

SEED = 20100601

IDEAL = DotParameters(
    s_fss=3.0, gamma_x=0.0, gamma_dephase0=0.0, gamma_phonon=0.0, g_noise=0.0, gate_width=0.0, eta_override=1.0
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def random_density_matrix(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_x_state(rng: np.random.Generator) -> PairState:
    """Random normalised pair matrix with the cascade's zero pattern."""
    d = rng.uniform(0.0, 1.0, size=4) + 1e-3
    d /= d.sum()
    c = rng.uniform(0, 1) * math.sqrt(d[0] * d[3]) * np.exp(1j * rng.uniform(0, 2 * math.pi))
    rho = np.diag(d).astype(complex)
    rho[0, 3], rho[3, 0] = c, np.conj(c)
    return PairState(rho, normalized=True)


def random_lindblad_problem(rng: np.random.Generator, n: int = 4, max_rate: float = 1e-3):
    """Random Hamiltonian (spread <= 3 ueV) and 1-4 random channels of rate <= max_rate."""
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = 0.5 * (a + a.conj().T)
    w = np.linalg.eigvalsh(h)
    h = h / (w[-1] - w[0]) * rng.uniform(0.5, 3.0) / HBAR
    channels = []
    for _ in range(rng.integers(1, 5)):
        c = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        c /= np.linalg.norm(c, 2)
        channels.append(LindbladChannel(c, rng.uniform(0, max_rate)))
    return h, channels


def rk4_steps_for(h0, channels, t: float, refine: float = 4.0) -> int:
    """Step count meeting the RK4 precondition with ``refine`` times margin."""
    h = oracle.max_rk4_step(h0, channels) / refine
    return max(1000, math.ceil(t / h))


def check_ideal_minimum() -> CheckResult:
    period = 2 * math.pi * HBAR / IDEAL.s_fss
    coarse = np.arange(0.0, period / 2, 1.0)
    km = [lg_point(IDEAL, t).k_minus for t in coarse]
    t_c = coarse[int(np.argmin(km))]
    step = 0.01
    fine = np.arange(t_c - 1.0, t_c + 1.0 + step / 2, step)
    km = [lg_point(IDEAL, t).k_minus for t in fine]
    k = int(np.argmin(km))
    t_star = math.pi * HBAR / (3 * IDEAL.s_fss)
    ok = bool(abs(km[k] + 1.5) <= 1e-6 and abs(fine[k] - t_star) <= step)
    return CheckResult(
        "ideal quantum minimum -1.5", ok, f"min K- = {km[k]:.9f} at t = {fine[k]:.3f} ps (exact {t_star:.3f})"
    )


def random_dot(rng: np.random.Generator, **overrides) -> DotParameters:
    kw = dict(
        s_fss=rng.uniform(0.3, 8.0),
        gamma_x=rng.uniform(0.0, 0.02),
        gamma_dephase0=rng.uniform(0.0, 1e-3),
        gamma_phonon=rng.uniform(0.0, 1e-6),
        temperature=rng.uniform(2.0, 80.0),
        g_noise=rng.uniform(0.0, 1.0),
        gate_width=rng.choice([0.0, rng.uniform(0.0, 100.0)]),
    )
    kw.update(overrides)
    return DotParameters(**kw)


def check_classical_bound(rng) -> CheckResult:
    worst = math.inf
    for _ in range(20):
        p = random_dot(rng, eta_override=0.0)
        for t in np.linspace(0.0, 5000.0, 51):
            pt = lg_point(p, t)
            worst = min(worst, pt.k_plus, pt.k_minus)
    return CheckResult("classical bound without coherence", worst >= -1 - 1e-12, f"min K+- = {worst:.3e}")


def check_route_equality(rng) -> CheckResult:
    worst = 0.0
    for _ in range(500):
        ps = random_x_state(rng)
        pp, pm = joint_probabilities(ps)
        worst = max(worst, abs((pp - pm) - correlator(ps)))
    return CheckResult("P++ - P+- equals coherence route", worst <= 1e-12, f"max diff = {worst:.2e}")


def check_propagator(rng, propagate_fn: Callable = densmat.propagate, cases: int = 50) -> CheckResult:
    worst = 0.0
    for _ in range(cases):
        h0, channels = random_lindblad_problem(rng)
        rho0 = random_density_matrix(rng, 4)
        t = rng.uniform(0.0, 5000.0)
        gen = densmat.build_liouvillian(h0, channels)
        ref = oracle.rk4_reference(rho0, h0, channels, t, rk4_steps_for(h0, channels, t))
        worst = max(worst, float(np.max(np.abs(propagate_fn(rho0, gen, t) - ref))))
    ratio = rk4_order_ratio(propagate_fn)
    ok = bool(worst < 1e-8 and abs(ratio - 16) <= 0.2 * 16)
    return CheckResult(
        "expm propagation vs RK4 reference", ok, f"max diff = {worst:.2e}, step-halving ratio = {ratio:.2f}"
    )


def rk4_order_ratio(propagate_fn: Callable = densmat.propagate) -> float:
    """Error ratio of RK4 at step h and h/2 on a fixed fast-rotating problem."""
    rng = np.random.default_rng(7)
    h0, channels = random_lindblad_problem(rng, max_rate=2e-3)
    h0 = h0 * 8.0
    rho0 = random_density_matrix(rng, 4)
    t = 3000.0
    exact = propagate_fn(rho0, densmat.build_liouvillian(h0, channels), t)
    n = rk4_steps_for(h0, channels, t, refine=1.0)
    e1 = np.max(np.abs(oracle.rk4_reference(rho0, h0, channels, t, n) - exact))
    e2 = np.max(np.abs(oracle.rk4_reference(rho0, h0, channels, t, 2 * n) - exact))
    return float(e1 / e2)


def check_analytic_agreement(rng) -> CheckResult:
    worst = 0.0
    for _ in range(50):
        p = random_dot(rng, gamma_phonon=0.0, gate_width=0.0, eta_override=rng.uniform(0, 1))
        t = rng.uniform(0.0, 5000.0)
        a = oracle.AnalyticParams(p.s_fss, p.gamma_dephase0, p.eta_override, p.g_noise)
        worst = max(worst, abs(lg_point(p, t).k_t - oracle.analytic_correlator(a, t)))
    return CheckResult("flip-free pipeline vs closed form", worst <= 1e-9, f"max diff = {worst:.2e}")


def _min_kminus_ideal(eta: float) -> float:
    p = dataclasses.replace(IDEAL, eta_override=eta)
    period = 2 * math.pi * HBAR / p.s_fss
    grid = np.linspace(0.0, period / 2, 361)
    return min(lg_point(p, t).k_minus for t in grid)


def violation_threshold(tol: float = 1e-3) -> float:
    lo, hi = 0.0, 1.0  # no violation at lo, violation at hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _min_kminus_ideal(mid) < -1.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def check_mixture_scaling(rng) -> CheckResult:
    worst = 0.0
    base = DotParameters(eta_override=1.0, g_noise=0.0)
    for _ in range(20):
        eta, g, t = rng.uniform(0, 1), rng.uniform(0, 2), rng.uniform(0, 5000)
        p = DotParameters(eta_override=eta, g_noise=g)
        ideal = lg_point(base, t).k_t
        worst = max(worst, abs(lg_point(p, t).k_t - eta / (1 + g) * ideal))
    thr = violation_threshold()
    ok = bool(worst <= 1e-10 and abs(thr - 2 / 3) <= 1e-3)
    return CheckResult("mixture scaling eta/(1+g)", ok, f"max diff = {worst:.2e}, threshold eta = {thr:.4f}")


def run_validation(propagate_fn: Callable = densmat.propagate) -> list[CheckResult]:
    rng = np.random.default_rng(SEED)
    results = []
    with densmat.watch_validity() as mon:
        for check in (
            check_ideal_minimum,
            lambda: check_classical_bound(rng),
            lambda: check_route_equality(rng),
            lambda: check_propagator(rng, propagate_fn),
            lambda: check_analytic_agreement(rng),
            lambda: check_mixture_scaling(rng),
        ):
            start = time.perf_counter()
            try:
                res = check()
            except Exception as exc:  # a crashing check is a failed check
                res = CheckResult(getattr(check, "__name__", "check"), False, f"raised {exc!r}")
            res.seconds = time.perf_counter() - start
            results.append(res)
    results.append(
        CheckResult(
            "density-matrix validity",
            mon.ok(),
            f"{mon.states} states; trace err {mon.trace_error:.1e}, herm {mon.hermiticity:.1e}, "
            f"min eig {mon.min_eigenvalue:.1e}, zero pattern {mon.sparsity:.1e}",
        )
    )
    return results
