"""decisionfuse: FDR-controlled fusion of study-level decision sequences."""

from .aggregate import AGG, AGG_STAR, AggregatedEvidence, CoverageProfile, aggregate_evidence, coverage
from .baselines import fisher_pool, hm_pool, naive_vote
from .calibrate import PValueStudy, PValueTable, p2e_calibrator, p2e_pipeline
from .core import Diagnostic, FusionProblem, StudyTriplet, TruthVector, validate_problem
from .evidence import EvidenceVector, build_evidence
from .mtp import RejectionSet, bh, ebh, fdp_etp
from .statdist import (
    EquicorrSpec,
    RngStream,
    chisq_sf,
    equicorr_sqrt_coeffs,
    rng_stream,
    sample_kronecker_normal,
    std_normal_cdf,
    two_sided_p,
)

__version__ = "0.1.0"

__all__ = [
    "AGG",
    "AGG_STAR",
    "AggregatedEvidence",
    "CoverageProfile",
    "Diagnostic",
    "EquicorrSpec",
    "EvidenceVector",
    "FusionProblem",
    "PValueStudy",
    "PValueTable",
    "RejectionSet",
    "RngStream",
    "StudyTriplet",
    "TruthVector",
    "aggregate_evidence",
    "bh",
    "build_evidence",
    "chisq_sf",
    "coverage",
    "ebh",
    "equicorr_sqrt_coeffs",
    "fdp_etp",
    "fisher_pool",
    "hm_pool",
    "naive_vote",
    "p2e_calibrator",
    "p2e_pipeline",
    "rng_stream",
    "sample_kronecker_normal",
    "std_normal_cdf",
    "two_sided_p",
    "validate_problem",
]
