"""Evidence aggregation across studies.

Two modes:

* ``AGG`` divides each hypothesis's evidence sum by n, the maximum number
  of times any hypothesis is tested. Always a valid generalized-e-value
  construction; this is the default everywhere.
* ``AGG_STAR`` divides by n_i, the hypothesis's own coverage count. Valid
  only when the truth indicators are exchangeable and study data follow a
  common two-group model, which the software cannot verify from decision
  sequences; callers opt in explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import StudyTriplet
from .evidence import EvidenceVector

AGG = "agg"
AGG_STAR = "agg-star"
MODES = (AGG, AGG_STAR)


@dataclass(frozen=True)
class CoverageProfile:
    """Per-hypothesis test counts n_i and their maximum n."""

    counts: np.ndarray
    n: int

    @property
    def m(self) -> int:
        return int(self.counts.size)


@dataclass(frozen=True)
class AggregatedEvidence:
    mode: str
    values: np.ndarray
    coverage: CoverageProfile


def coverage(studies: Sequence[StudyTriplet], m: int) -> CoverageProfile:
    """Count how many studies test each hypothesis."""
    counts = np.zeros(m, dtype=np.int64)
    for study in studies:
        np.add.at(counts, study.hypotheses, 1)
    counts.setflags(write=False)
    n = int(counts.max()) if m > 0 else 0
    return CoverageProfile(counts=counts, n=n)


def aggregate_evidence(
    evidence: Iterable[EvidenceVector],
    cov: CoverageProfile,
    mode: str = AGG,
) -> AggregatedEvidence:
    """Fuse per-study evidence vectors into one value per hypothesis.

    Accepts any vectors exposing aligned ``ids``/``values`` arrays, so the
    calibrator pipeline reuses this for p-value-derived evidence.
    """
    if mode not in MODES:
        raise ValueError(f"unknown aggregation mode {mode!r}")
    m = cov.m
    totals = np.zeros(m, dtype=np.float64)
    for vec in evidence:
        ids = np.asarray(vec.ids)
        if ids.size and (ids.min() < 0 or ids.max() >= m):
            raise ValueError(
                f"evidence vector {vec.study_id!r} references ids outside universe of size {m}"
            )
        np.add.at(totals, ids, np.asarray(vec.values, dtype=np.float64))

    if mode == AGG:
        values = totals / max(cov.n, 1)
    else:
        values = totals / np.maximum(cov.counts, 1)
    values.setflags(write=False)
    return AggregatedEvidence(mode=mode, values=values, coverage=cov)
