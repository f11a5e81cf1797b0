"""Leggett-Garg inequality simulator for the biexciton cascade of a quantum dot."""

__version__ = "0.1.0"

from lgdot.cascade import DotParameters, PairState
from lgdot.densmat import LindbladChannel, Liouvillian
from lgdot.lganalysis import LGPoint, SweepResult, lg_point, sweep

__all__ = [
    "DotParameters",
    "LGPoint",
    "LindbladChannel",
    "Liouvillian",
    "PairState",
    "SweepResult",
    "__version__",
    "lg_point",
    "sweep",
]
