from app.schemas.algebra import (
    ScalarSchema,
    MonomialTermSchema,
    DiffPolySchema,
    OperatorTermSchema,
    PsiDOSchema,
    RelationTableSchema,
    FlowValueSchema,
    CheckReportSchema,
    VerificationSummary,
    RelationsResponse,
    OperatorResponse,
    FlowResponse
)

__all__ = [
    "ScalarSchema",
    "MonomialTermSchema",
    "DiffPolySchema",
    "OperatorTermSchema",
    "PsiDOSchema",
    "RelationTableSchema",
    "FlowValueSchema",
    "CheckReportSchema",
    "VerificationSummary",
    "RelationsResponse",
    "OperatorResponse",
    "FlowResponse"
]
