"""Direct-sum decompositions of modules over semirings lacking zero sums.

Finite semirings and their free modules are enumerated exactly; submodule
lattices, complement relations, decomposition socles, idempotent splittings
and Green's quotients are computed by exhaustive search and checked against
an independent brute-force oracle.
"""

from .errors import (BudgetExceeded, InvariantViolation, MultiplicityError, PreconditionError,
                     SemimodError, StructuralError, UnsupportedOperation)
from .module import FreeModule, Submodule, Vector, free_module, span
from .semiring import NEG_INF, Semiring

__all__ = [
    "BudgetExceeded", "FreeModule", "InvariantViolation", "MultiplicityError", "NEG_INF",
    "PreconditionError", "Semiring", "SemimodError", "StructuralError", "Submodule",
    "UnsupportedOperation", "Vector", "free_module", "span",
]
