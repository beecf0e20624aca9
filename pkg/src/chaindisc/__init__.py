"""Generic chaining, discrepancy and shattering at desk scale."""

from .chaining import (
    AdmissibleSequence,
    Schedule,
    build_admissible,
    covering_number,
    dudley_integral,
    entropy_number,
    gamma2,
    packing_number,
    schedule_entropy,
    schedule_gamma,
)
from .coloring import (
    DiscResult,
    PartialColoringFailure,
    PartialColorResult,
    disc_exact,
    disc_heuristic,
    hdisc_exact,
    matousek_color,
    partial_color,
    spencer_color,
)
from .core import Coloring, IndexSet, Metric, PointSet, PreconditionError, SizeError
from .entropy_oracle import phi, signed_sum_law, w_entropy
from .shatter import ShatterWitness, hdisc_vc_lower, is_shattered, vc_dim

__version__ = "0.1.0"

__all__ = [
    "AdmissibleSequence", "Coloring", "DiscResult", "IndexSet", "Metric", "PartialColorResult",
    "PartialColoringFailure", "PointSet", "PreconditionError", "Schedule", "ShatterWitness", "SizeError",
    "build_admissible", "covering_number", "disc_exact", "disc_heuristic", "dudley_integral",
    "entropy_number", "gamma2", "hdisc_exact", "hdisc_vc_lower", "is_shattered", "matousek_color",
    "packing_number", "partial_color", "phi", "schedule_entropy", "schedule_gamma", "signed_sum_law",
    "spencer_color", "vc_dim", "w_entropy",
]
