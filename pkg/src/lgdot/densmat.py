"""Dense complex-matrix algebra and Lindblad propagation.

Density matrices and operators are plain ``numpy`` complex128 arrays; the
helpers here validate them and never mutate their inputs.  The Liouvillian
acts on the column-stacked density matrix, ``vec(rho) = rho.reshape(-1, order="F")``,
so that ``vec(A rho B) = (B^T kron A) vec(rho)``.

Propagation uses :func:`scipy.linalg.expm` (scaling and squaring with a
Pade approximant).  The stepwise integrator in :mod:`lgdot.oracle` is kept
as an independent check of this path.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
import scipy.linalg

from lgdot.constants import TOL
from lgdot.errors import InputError, InvariantError

ComplexMatrix = np.ndarray


def as_matrix(data, *, square: bool = True, name: str = "matrix") -> ComplexMatrix:
    """Return ``data`` as a read-only complex128 2-D array, rejecting NaN/Inf."""
    m = np.array(data, dtype=np.complex128)
    if m.ndim != 2:
        raise InputError(f"{name} must be 2-D, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise InputError(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError(f"{name} contains non-finite entries")
    m.flags.writeable = False
    return m


def vec(rho: ComplexMatrix) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> ComplexMatrix:
    return np.asarray(v).reshape((dim, dim), order="F")


@dataclass(frozen=True, eq=False)
class LindbladChannel:
    """One dissipator ``rate * (C rho C^+ - 1/2 {C^+ C, rho})``."""

    collapse: ComplexMatrix
    rate: float
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "collapse", as_matrix(self.collapse, name="collapse"))
        rate = float(self.rate)
        if not np.isfinite(rate) or rate < 0:
            raise InputError(f"channel rate must be finite and >= 0, got {self.rate!r}")
        object.__setattr__(self, "rate", rate)

    @property
    def dim(self) -> int:
        return self.collapse.shape[0]


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """Generator of the master equation as an ``n^2 x n^2`` matrix."""

    dim: int
    matrix: ComplexMatrix = field(repr=False)

    def apply(self, rho: ComplexMatrix) -> ComplexMatrix:
        return unvec(self.matrix @ vec(rho), self.dim)


def _check_dims(h0: ComplexMatrix, channels: Sequence[LindbladChannel], rho=None):
    n = h0.shape[0]
    if rho is not None and rho.shape != (n, n):
        raise InputError(f"rho has shape {rho.shape}, Hamiltonian is {n}x{n}")
    for k, ch in enumerate(channels):
        if ch.rate < 0:
            raise InputError(f"channel {k} has negative rate {ch.rate}")
        if ch.collapse.shape != (n, n):
            raise InputError(
                f"channel {k} collapse has shape {ch.collapse.shape}, system is {n}x{n}"
            )


def lindblad_rhs(
    rho: ComplexMatrix, h0: ComplexMatrix, channels: Sequence[LindbladChannel]
) -> ComplexMatrix:
    """Evaluate ``-i[h0, rho] + sum_k rate_k D[C_k](rho)``.

    ``h0`` is in angular-frequency units (energy / hbar, 1/ps).
    """
    rho = as_matrix(rho, name="rho")
    h0 = as_matrix(h0, name="h0")
    _check_dims(h0, channels, rho)
    out = -1j * (h0 @ rho - rho @ h0)
    for ch in channels:
        c = ch.collapse
        cd = c.conj().T
        cdc = cd @ c
        out = out + ch.rate * (c @ rho @ cd - 0.5 * (cdc @ rho + rho @ cdc))
    return out


def build_liouvillian(h0: ComplexMatrix, channels: Sequence[LindbladChannel]) -> Liouvillian:
    h0 = as_matrix(h0, name="h0")
    _check_dims(h0, channels)
    n = h0.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    gen = -1j * (np.kron(eye, h0) - np.kron(h0.T, eye))
    for ch in channels:
        c = ch.collapse
        cdc = c.conj().T @ c
        gen = gen + ch.rate * (
            np.kron(c.conj(), c) - 0.5 * (np.kron(eye, cdc) + np.kron(cdc.T, eye))
        )
    gen.flags.writeable = False
    return Liouvillian(dim=n, matrix=gen)


def evolution_map(gen: Liouvillian, t: float) -> np.ndarray:
    """Superoperator ``exp(gen * t)`` acting on column-stacked matrices.

    Unlike :func:`propagate` this places no requirement on what it is later
    applied to, so off-diagonal operator blocks can be evolved with it.
    """
    t = float(t)
    if not np.isfinite(t) or t < 0:
        raise InputError(f"evolution time must be finite and >= 0, got {t!r}")
    if t == 0.0:
        return np.eye(gen.dim * gen.dim, dtype=np.complex128)
    return scipy.linalg.expm(gen.matrix * t)


def trace(m: ComplexMatrix) -> complex:
    return complex(np.trace(m))


def hermiticity_defect(m: ComplexMatrix) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def min_eigenvalue(m: ComplexMatrix) -> float:
    """Smallest eigenvalue of the Hermitian part (LAPACK ``heevd``, accurate to ~1e-15 * norm)."""
    m = np.asarray(m)
    return float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])


def check_density_matrix(rho: ComplexMatrix, *, tol: float = TOL.validity, name: str = "rho"):
    """Raise :class:`InputError` unless ``rho`` is Hermitian, unit-trace and PSD."""
    if hermiticity_defect(rho) > tol:
        raise InputError(f"{name} is not Hermitian (defect {hermiticity_defect(rho):.3e})")
    tr = trace(rho)
    if abs(tr - 1.0) > tol:
        raise InputError(f"{name} trace is {tr}, expected 1")
    lam = min_eigenvalue(rho)
    if lam < -tol:
        raise InputError(f"{name} is not positive semidefinite (min eigenvalue {lam:.3e})")


def propagate(rho0: ComplexMatrix, gen: Liouvillian, t: float) -> ComplexMatrix:
    """Evolve a density matrix for time ``t`` (ps) under ``gen``."""
    rho0 = as_matrix(rho0, name="rho0")
    if rho0.shape != (gen.dim, gen.dim):
        raise InputError(f"rho0 has shape {rho0.shape}, generator acts on dim {gen.dim}")
    t = float(t)
    if not np.isfinite(t) or t < 0:
        raise InputError(f"propagation time must be finite and >= 0, got {t!r}")
    check_density_matrix(rho0, name="rho0")
    if t == 0.0:
        return rho0
    rho = unvec(evolution_map(gen, t) @ vec(rho0), gen.dim)
    observe(rho, normalized=True)
    if (
        hermiticity_defect(rho) > TOL.hermiticity
        or abs(trace(rho) - 1.0) > TOL.trace_post
        or min_eigenvalue(rho) < -TOL.validity
    ):
        raise InvariantError("propagated state left the set of density matrices")
    return rho


@dataclass
class ValidityMonitor:
    """Worst-case validity figures over every state observed while active."""

    states: int = 0
    trace_error: float = 0.0
    hermiticity: float = 0.0
    min_eigenvalue: float = 0.0
    sparsity: float = 0.0

    def record(self, m: ComplexMatrix, *, normalized: bool, sparsity: float | None = None):
        self.states += 1
        if normalized:
            self.trace_error = max(self.trace_error, abs(trace(m) - 1.0))
        self.hermiticity = max(self.hermiticity, hermiticity_defect(m))
        self.min_eigenvalue = min(self.min_eigenvalue, min_eigenvalue(m))
        if sparsity is not None:
            self.sparsity = max(self.sparsity, sparsity)

    def ok(self) -> bool:
        return (
            self.trace_error < TOL.validity
            and self.hermiticity < TOL.hermiticity
            and self.min_eigenvalue >= -TOL.validity
            and self.sparsity < TOL.algebraic
        )


_monitors: list[ValidityMonitor] = []


def observe(m: ComplexMatrix, *, normalized: bool, sparsity: float | None = None) -> None:
    for mon in _monitors:
        mon.record(m, normalized=normalized, sparsity=sparsity)


@contextlib.contextmanager
def watch_validity() -> Iterator[ValidityMonitor]:
    """Collect validity statistics of every state produced inside the block.

    Not thread-safe; meant for tests and the ``validate`` command.
    """
    mon = ValidityMonitor()
    _monitors.append(mon)
    try:
        yield mon
    finally:
        _monitors.remove(mon)
