"""Numerical toolkit for pairs of orthogonal projections.

Infima and Friedrichs angles, the six-subspace Halmos decomposition, the
unitary intertwining ``(P, Q)`` with ``(I - Q, I - P)``, norms of words in
``P - P∧Q`` and ``Q - P∧Q`` under representations, and grid models of
counterexamples in the module ``C([0, 1]; M2)``.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    InvariantViolation,
    NoConvergence,
    NotAProjection,
    TwoProjError,
    ValidationError,
)
from .halmos import HalmosDecomposition, decompose, reconstruct  # noqa: E402
from .linalg import Subspace, Tolerance  # noqa: E402
from .pairs import ProjectionPair, friedrichs_angle, infimum_direct, infimum_iterative  # noqa: E402
from .unitary import build_unitary  # noqa: E402

__all__ = [
    "HalmosDecomposition",
    "InvariantViolation",
    "NoConvergence",
    "NotAProjection",
    "ProjectionPair",
    "Subspace",
    "Tolerance",
    "TwoProjError",
    "ValidationError",
    "build_unitary",
    "decompose",
    "friedrichs_angle",
    "infimum_direct",
    "infimum_iterative",
    "reconstruct",
]
