"""conegdp: convex generalized disjunctive programs over cones.

Modeling (GdpModel), big-M / hull reformulations in scalar and conic form,
an embedded conic interior-point branch-and-bound, seeded instance
generators, and text/CBF/benchmark IO.
"""

import os

# The embedded solver factors many small dense systems; multithreaded BLAS
# adds contention instead of speed at these sizes and can perturb
# reduction orders. Applied only if numpy is not configured yet.
for _v in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_v, "1")

from .model import (
    BooleanVar,
    BoolRow,
    CnfClause,
    CnfFormula,
    ConicConstraint,
    ContinuousVar,
    Disjunct,
    Disjunction,
    GdpModel,
    LinExpr,
    LinRow,
    MicpModel,
    ModelError,
    ScalarConstraint,
    ScalarMinlp,
    Summary,
    ValidationReport,
    model_summary,
    validate_gdp,
)

__all__ = [
    "BooleanVar",
    "BoolRow",
    "CnfClause",
    "CnfFormula",
    "ConicConstraint",
    "ContinuousVar",
    "Disjunct",
    "Disjunction",
    "GdpModel",
    "LinExpr",
    "LinRow",
    "MicpModel",
    "ModelError",
    "ScalarConstraint",
    "ScalarMinlp",
    "Summary",
    "ValidationReport",
    "model_summary",
    "validate_gdp",
]

__version__ = "0.1.0"
