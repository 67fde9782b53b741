from app.models.scalar import Scalar, ZERO, ONE, I
from app.models.diffpoly import DiffPoly, GeneratorKind, Jet
from app.models.psido import Orientation, PsiDO
from app.models.hierarchy import CommutatorDecomposition, FlowValue, LOperator, ReductionResult
from app.models.verification import CheckReport, CheckStatus, Suite, SuiteResult

__all__ = [
    "Scalar",
    "ZERO",
    "ONE",
    "I",
    "DiffPoly",
    "GeneratorKind",
    "Jet",
    "Orientation",
    "PsiDO",
    "CommutatorDecomposition",
    "FlowValue",
    "LOperator",
    "ReductionResult",
    "CheckReport",
    "CheckStatus",
    "Suite",
    "SuiteResult"
]
