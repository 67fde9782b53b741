from app.services.differential import EMPTY_TABLE, RelationTable, derive
from app.services.lax import build_L, build_relation_table, get_relation_table, symmetric_extract
from app.services.hierarchy import Hierarchy, flow_derivation, get_hierarchy
from app.services.verification import run_suite

__all__ = [
    "EMPTY_TABLE",
    "RelationTable",
    "derive",
    "build_L",
    "build_relation_table",
    "get_relation_table",
    "symmetric_extract",
    "Hierarchy",
    "flow_derivation",
    "get_hierarchy",
    "run_suite"
]
