"""Quantum-dot cascade physics: levels, dissipation and photon-pair states.

Level labels follow the cascade: ``|0>`` ground, ``|1>`` and ``|2>`` the two
bright exciton states split by ``s_fss`` (``|2>`` on top), ``|3>`` the
biexciton.  The biexciton photon is detected at ``t = 0``, which leaves the
dot in ``(|H>|2> + |V>|1>)/sqrt(2)``; the second photon's polarisation then
records which exciton decayed (``|2> -> H``, ``|1> -> V``).

Pair matrices use the ordered basis ``{H1H2, H1V2, V1H2, V1V2}``.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from lgdot import densmat
from lgdot.constants import HBAR, K_B, TOL
from lgdot.densmat import ComplexMatrix, LindbladChannel
from lgdot.errors import DegenerateError, DegenerateSplittingWarning, InputError, InvariantError

# Exciton-space index order used for the three-level dynamics.
GROUND, X1, X2 = 0, 1, 2

# Entries of a pair matrix that must vanish (0-based, upper triangle).
ZERO_PATTERN = ((0, 1), (0, 2), (1, 2), (1, 3), (2, 3))


@dataclass(frozen=True)
class DotParameters:
    """Full physical configuration for one simulation.

    Rate defaults are not measured values.  They are picked so that the
    fine-structure oscillation stays coherent for many periods and the
    violation-to-classical transitions appear inside the default sweep grids.
    """

    s_fss: float = 3.0  # ueV
    level_energies: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)  # ueV
    gamma_x: float = 8e-3  # 1/ps, 125 ps exciton lifetime
    gamma_dephase0: float = 1e-5  # 1/ps
    gamma_phonon: float = 2e-8  # 1/ps, multiplied by the Bose factor
    temperature: float = 5.0  # K
    g_noise: float = 0.0
    gate_width: float = 50.0  # ps
    eta_override: Optional[float] = None

    def __post_init__(self):
        energies = tuple(float(e) for e in self.level_energies)
        if len(energies) != 4:
            raise InputError(f"level_energies needs 4 values, got {len(energies)}")
        object.__setattr__(self, "level_energies", energies)
        for name in ("s_fss", "gamma_x", "gamma_dephase0", "gamma_phonon", "g_noise", "gate_width"):
            _require(name, getattr(self, name), ">= 0", lambda v: v >= 0)
        _require("temperature", self.temperature, "> 0", lambda v: v > 0)
        if not all(math.isfinite(e) for e in energies):
            raise InputError("level_energies must be finite")
        if self.eta_override is not None:
            _require("eta_override", self.eta_override, "in [0, 1]", lambda v: 0 <= v <= 1)

    def dynamics_key(self) -> tuple:
        """The fields that determine the exciton dynamics (not g, gate or eta)."""
        return (
            self.s_fss,
            self.level_energies,
            self.gamma_x,
            self.gamma_dephase0,
            self.gamma_phonon,
            self.temperature,
        )


def _require(name, value, rule, ok):
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise InputError(f"{name} must be a real number, got {value!r}")
    if not math.isfinite(value) or not ok(value):
        raise InputError(f"{name} = {value!r} out of range (must be {rule})")


def sparsity_defect(rho: ComplexMatrix) -> float:
    return max(max(abs(rho[i, j]), abs(rho[j, i])) for i, j in ZERO_PATTERN)


@dataclass(frozen=True, eq=False)
class PairState:
    """Two-photon polarisation matrix, checked against the X-shaped zero pattern."""

    rho: ComplexMatrix = field(repr=False)
    normalized: bool = False

    def __post_init__(self):
        rho = densmat.as_matrix(self.rho, name="pair matrix")
        if rho.shape != (4, 4):
            raise InputError(f"pair matrix must be 4x4, got {rho.shape}")
        object.__setattr__(self, "rho", rho)
        zeros = sparsity_defect(rho)
        densmat.observe(rho, normalized=self.normalized, sparsity=zeros)
        if zeros >= TOL.algebraic:
            raise InvariantError(f"pair matrix breaks the zero pattern ({zeros:.3e})")
        if densmat.hermiticity_defect(rho) > TOL.hermiticity:
            raise InvariantError("pair matrix is not Hermitian")
        if self.normalized and abs(densmat.trace(rho) - 1.0) > TOL.trace_post:
            raise InvariantError(f"normalised pair matrix has trace {densmat.trace(rho)}")
        if densmat.min_eigenvalue(rho) < -TOL.validity:
            raise InvariantError("pair matrix is not positive semidefinite")

    @property
    def coherence(self) -> complex:
        return complex(self.rho[0, 3])

    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.rho))


def entangled_initial() -> ComplexMatrix:
    """|psi><psi| for psi = (|H>|2> + |V>|1>)/sqrt 2 in basis {H2, H1, V2, V1}."""
    psi = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2)
    return densmat.as_matrix(np.outer(psi, psi.conj()))


def phonon_occupation(s_fss: float, temperature: float) -> float:
    """Bose-Einstein occupation of the phonon mode resonant with the splitting."""
    if s_fss <= 0:
        raise InputError("phonon occupation diverges for s_fss <= 0")
    if temperature <= 0:
        raise InputError(f"temperature must be > 0, got {temperature}")
    x = s_fss / (K_B * temperature)
    if x == 0:
        raise DegenerateError(f"s_fss = {s_fss!r} underflows against k_B T; occupation is unbounded")
    if x > 700:
        return 0.0
    return 1.0 / math.expm1(x)


def _ket_bra(i: int, j: int, n: int = 3) -> np.ndarray:
    m = np.zeros((n, n), dtype=np.complex128)
    m[i, j] = 1.0
    return m


def exciton_hamiltonian(p: DotParameters) -> ComplexMatrix:
    """H0 on {|0>, |1>, |2>} in 1/ps.

    The exciton pair sits at the mean of ``level_energies[1:3]`` and is split
    by exactly ``s_fss``; the biexciton level is carried but not simulated.
    """
    center = 0.5 * (p.level_energies[1] + p.level_energies[2])
    e = [p.level_energies[0], center - 0.5 * p.s_fss, center + 0.5 * p.s_fss]
    return densmat.as_matrix(np.diag(e) / HBAR)


def build_exciton_channels(p: DotParameters) -> list[LindbladChannel]:
    """Dissipation channels on {|0>, |1>, |2>}; channels with zero rate are left out."""
    channels = []
    if p.gamma_x > 0:
        channels.append(LindbladChannel(_ket_bra(GROUND, X2), p.gamma_x, "radiative_2"))
        channels.append(LindbladChannel(_ket_bra(GROUND, X1), p.gamma_x, "radiative_1"))
    if p.gamma_phonon > 0:
        if p.s_fss == 0:
            warnings.warn(
                "s_fss = 0: phonon occupation diverges, flip channels omitted",
                DegenerateSplittingWarning,
                stacklevel=2,
            )
        else:
            n = phonon_occupation(p.s_fss, p.temperature)
            channels.append(LindbladChannel(_ket_bra(X1, X2), p.gamma_phonon * (n + 1), "flip_down"))
            if n > 0:
                channels.append(LindbladChannel(_ket_bra(X2, X1), p.gamma_phonon * n, "flip_up"))
    if p.gamma_dephase0 > 0:
        sz = (_ket_bra(X2, X2) - _ket_bra(X1, X1)) / math.sqrt(2)
        channels.append(LindbladChannel(sz, p.gamma_dephase0, "dephasing"))
    return channels


# Exciton subspace in pair order: index 0 = |2> (H2), index 1 = |1> (V2).
_SUBSPACE = (X2, X1)


@functools.lru_cache(maxsize=256)
def _subspace_generator(key: tuple) -> densmat.Liouvillian:
    p = DotParameters(*key)
    channels = build_exciton_channels(p)
    idx = np.ix_(_SUBSPACE, _SUBSPACE)
    internal = [
        LindbladChannel(ch.collapse[idx], ch.rate, ch.label)
        for ch in channels
        if not ch.label.startswith("radiative")
    ]
    return densmat.build_liouvillian(exciton_hamiltonian(p)[idx], internal)


def exciton_generator(p: DotParameters) -> densmat.Liouvillian:
    """Liouvillian of the non-radiative dynamics inside {|2>, |1>}.

    Both excitons decay radiatively at the same rate, so the radiative channels
    only multiply the exciton block by ``exp(-gamma_x tau)``.  That factor is
    applied analytically by the callers, which keeps the block well scaled at
    long delays.
    """
    return _subspace_generator(p.dynamics_key())


@functools.lru_cache(maxsize=8192)
def _conditional_pair(key: tuple, tau: float) -> np.ndarray:
    gen = _subspace_generator(key)
    emap = densmat.evolution_map(gen, tau)
    # blocks[a, b] = |e_a><e_b| with e_H = |2> (index 0), e_V = |1> (index 1)
    pair = np.zeros((4, 4), dtype=np.complex128)
    for a in range(2):
        for b in range(2):
            block = densmat.unvec(emap @ densmat.vec(_ket_bra(a, b, 2)), 2)
            pair[2 * a : 2 * a + 2, 2 * b : 2 * b + 2] = 0.5 * block
    pair.flags.writeable = False
    return pair


def conditional_pair(p: DotParameters, tau: float) -> ComplexMatrix:
    """Pair matrix given that the exciton has not yet decayed: trace 1 for every tau."""
    tau = _check_tau(tau)
    return _conditional_pair(p.dynamics_key(), tau)


def _check_tau(tau) -> float:
    tau = float(tau)
    if not math.isfinite(tau) or tau < 0:
        raise InputError(f"tau must be finite and >= 0, got {tau!r}")
    return tau


def survival(p: DotParameters, tau: float) -> float:
    return math.exp(-p.gamma_x * tau)


def pair_density_pol(p: DotParameters, tau: float) -> PairState:
    """Unnormalised coherent pair matrix; its trace is the exciton survival probability."""
    tau = _check_tau(tau)
    return PairState(survival(p, tau) * conditional_pair(p, tau))


def _strip_coherence(m: np.ndarray) -> np.ndarray:
    out = np.array(m)
    out[0, 3] = out[3, 0] = 0.0
    return out


def pair_density_noc(p: DotParameters, tau: float) -> PairState:
    """Like :func:`pair_density_pol` with the H1H2/V1V2 coherence removed."""
    tau = _check_tau(tau)
    return PairState(survival(p, tau) * _strip_coherence(conditional_pair(p, tau)))


def spectral_overlap(p: DotParameters) -> float:
    """Overlap eta of two Lorentzian lines split by S with the coherence linewidth."""
    if p.eta_override is not None:
        return float(p.eta_override)
    if p.s_fss == 0:
        return 1.0
    width = p.gamma_x + p.gamma_dephase0
    if p.gamma_phonon > 0:
        width += p.gamma_phonon * (2 * phonon_occupation(p.s_fss, p.temperature) + 1)
    split = p.s_fss / HBAR
    return width**2 / (width**2 + split**2)


def mixture(p: DotParameters, pol: np.ndarray, eta: Optional[float] = None) -> np.ndarray:
    """``eta*pol + (1-eta)*noc + g*Tr(pol)*I/4`` for an already-evolved ``pol`` matrix."""
    if eta is None:
        eta = spectral_overlap(p)
    noise = p.g_noise * np.trace(pol).real / 4.0 * np.eye(4)
    return eta * pol + (1.0 - eta) * _strip_coherence(pol) + noise


def pair_density_total(p: DotParameters, tau: float) -> PairState:
    """Normalised mixture of coherent, which-path-marked and white-noise pairs.

    The noise carries weight ``g/(1+g)`` of the result at every delay.
    """
    mixed = mixture(p, conditional_pair(p, tau))
    return PairState(mixed / np.trace(mixed).real, normalized=True)
