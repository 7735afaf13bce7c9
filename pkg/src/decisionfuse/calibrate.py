"""p-value to e-value calibration and the full calibrator pipeline.

The calibrator maps a p-value to

    inf                      if p = 0
    2 / (p * (log p)^2)      if 0 < p <= exp(-2)
    0                        if p > exp(-2)

which integrates to exactly 1 over uniform p (antiderivative 2/(-log p)),
so calibrated values are e-values. The pipeline calibrates every study's
p-values, aggregates like decision-based evidence, and thresholds with
e-BH.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .aggregate import AGG, CoverageProfile, aggregate_evidence
from .mtp import RejectionSet, ebh

P_KNEE = math.exp(-2.0)


@dataclass(frozen=True)
class PValueStudy:
    """One study's p-values over its tested hypothesis set."""

    study_id: str
    alpha: float
    ids: np.ndarray
    pvalues: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "ids", np.asarray(self.ids, dtype=np.int64))
        object.__setattr__(self, "pvalues", np.asarray(self.pvalues, dtype=np.float64))


@dataclass(frozen=True)
class PValueTable:
    """p-values for every (study, tested hypothesis) pair."""

    studies: tuple[PValueStudy, ...]

    def __post_init__(self):
        object.__setattr__(self, "studies", tuple(self.studies))


@dataclass(frozen=True)
class _CalibratedVector:
    # Duck-typed peer of EvidenceVector for aggregate_evidence.
    study_id: str
    ids: np.ndarray
    values: np.ndarray


def p2e_calibrator(p):
    """Calibrate p-value(s) to e-value(s); accepts scalars or arrays."""
    arr = np.asarray(p, dtype=np.float64)
    if np.isnan(arr).any() or (arr < 0).any() or (arr > 1).any():
        raise ValueError("p-values must lie in [0, 1]")
    out = np.zeros_like(arr)
    mid = (arr > 0) & (arr <= P_KNEE)
    pm = arr[mid]
    out[mid] = 2.0 / (pm * np.log(pm) ** 2)
    out[arr == 0] = np.inf
    if np.isscalar(p) or arr.ndim == 0:
        return float(out)
    return out


def calibrated_vectors(pvals: PValueTable) -> list[_CalibratedVector]:
    return [
        _CalibratedVector(s.study_id, s.ids, p2e_calibrator(s.pvalues))
        for s in pvals.studies
    ]


def p2e_pipeline(
    pvals: PValueTable,
    cov: CoverageProfile,
    mode: str = AGG,
    alpha: float = 0.1,
) -> RejectionSet:
    """Calibrate, aggregate (by n or n_i), and apply e-BH at ``alpha``."""
    agg = aggregate_evidence(calibrated_vectors(pvals), cov, mode)
    return ebh(agg.values, alpha)
