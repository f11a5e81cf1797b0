"""Physical constants and numerical tolerances shared by every module.

Units throughout: time in ps, energies in ueV, rates in 1/ps.
"""

from dataclasses import dataclass

HBAR = 658.2119569  # ueV ps
K_B = 86.17333  # ueV / K


@dataclass(frozen=True)
class Tolerances:
    validity: float = 1e-9  # trace and positivity of density matrices
    trace_post: float = 1e-10  # trace drift allowed after propagation
    hermiticity: float = 1e-10
    algebraic: float = 1e-12  # exact identities, zero patterns
    quadrature_rtol: float = 1e-8
    degenerate: float = 1e-15  # smallest usable normalisation
    violation_margin: float = 1e-12  # K must fall below -1 - margin to count


TOL = Tolerances()
