"""Classical and finite-dimensional quantum probability with conditioning,
disintegration, and randomized verification of the inference laws."""

from . import classical, correspond, linalg, quantum, verify
from .classical import Dist, FuzzyPred, Space, StochChannel
from .errors import (
    DimensionError,
    NotPositiveError,
    SingularMarginalError,
    SupportError,
    ZeroValidityError,
)
from .quantum import Effect, QChannel, QState
from .verify import TrialReport, run_suite

__version__ = "0.1.0"

__all__ = [
    "classical",
    "correspond",
    "linalg",
    "quantum",
    "verify",
    "Space",
    "Dist",
    "FuzzyPred",
    "StochChannel",
    "QState",
    "Effect",
    "QChannel",
    "TrialReport",
    "run_suite",
    "DimensionError",
    "NotPositiveError",
    "SingularMarginalError",
    "SupportError",
    "ZeroValidityError",
    "__version__",
]
