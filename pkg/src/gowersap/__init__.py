"""Gowers norms of multiplicative functions along arithmetic progressions."""

__version__ = "0.1.0"

from .arithfn import (ArithTable, SpfTable, build_table, sieve_liouville, sieve_mobius,  # noqa: E402
                      sieve_spf, table_from_multspec, unit_table)
from .gowers import ComplexSeq, GowersResult, gowers_norm, gowers_norm_in_progression  # noqa: E402
from .phases import PolyPhase, best_denominator, composed_phase, equidist_defect  # noqa: E402
from .progressions import (FSpec, ProgressionSpec, bv_discrepancy, correlation_sum,  # noqa: E402
                           exceptional_scan, sup_correlation, tabulate_F)

__all__ = [
    "__version__", "ArithTable", "SpfTable", "build_table", "sieve_liouville", "sieve_mobius",
    "sieve_spf", "table_from_multspec", "unit_table", "ComplexSeq", "GowersResult", "gowers_norm",
    "gowers_norm_in_progression", "PolyPhase", "best_denominator", "composed_phase",
    "equidist_defect", "FSpec", "ProgressionSpec", "bv_discrepancy", "correlation_sum",
    "exceptional_scan", "sup_correlation", "tabulate_F",
]
