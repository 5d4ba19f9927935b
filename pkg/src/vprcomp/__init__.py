"""Complementarity analysis for visual place recognition techniques.

Works from per-query correct/incorrect outcome records: paired quadrant
tables, complementarity scores and their cross-dataset bounds, and the
maximum performance any fusion of a technique set could reach.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .contingency import ContingencyTable, McNemarResult, all_contingencies, build_contingency, mcnemar, transpose
from .errors import VprCompError
from .metrics import (
    BoundsSummary,
    ComplementarityScore,
    MapeEstimate,
    ScoreSet,
    bounds,
    complementarity,
    mape_identity_check,
    mape_k,
    mape_pair,
    score_set,
)
from .outcomes import (
    DatasetCollection,
    OutcomeMatrix,
    QueryOutcome,
    TechniqueRun,
    Violation,
    ingest_outcomes,
    load_collection,
    technique_performance,
    validate_collection,
)
from .report import MapeTable, PartnerRanking, emit_report, mape_table, rank_partners
from .synth import SynthSpec, generate, generate_collection

__all__ = [
    "BACKEND",
    "BoundsSummary",
    "ComplementarityScore",
    "ContingencyTable",
    "DatasetCollection",
    "MapeEstimate",
    "MapeTable",
    "McNemarResult",
    "OutcomeMatrix",
    "PartnerRanking",
    "QueryOutcome",
    "ScoreSet",
    "SynthSpec",
    "TechniqueRun",
    "Violation",
    "VprCompError",
    "all_contingencies",
    "bounds",
    "build_contingency",
    "complementarity",
    "emit_report",
    "generate",
    "generate_collection",
    "ingest_outcomes",
    "load_collection",
    "mape_identity_check",
    "mape_k",
    "mape_pair",
    "mape_table",
    "mcnemar",
    "rank_partners",
    "score_set",
    "technique_performance",
    "transpose",
    "validate_collection",
]
