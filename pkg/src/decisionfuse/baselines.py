"""Benchmark pooling methods: majority vote, Fisher, harmonic mean.

The vote carries no error-rate guarantee. Fisher and harmonic-mean
pooling combine study p-values into one p-value per hypothesis and then
run BH; the harmonic mean is the raw mean without asymptotic calibration
constants, which makes it anti-conservative by design.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .aggregate import CoverageProfile
from .calibrate import PValueTable
from .core import StudyTriplet
from .mtp import RejectionSet, bh
from .statdist import chisq_sf


def naive_vote(studies: Sequence[StudyTriplet], m: int) -> RejectionSet:
    """Reject hypothesis i when at least half of the studies testing it do.

    With full coverage this is the usual "at least d/2 studies" rule; with
    partial coverage the quorum is ceil(n_i/2). Untested hypotheses are
    never rejected. alpha=1 and k_alpha=|rejected| are sentinels: the vote
    has no level.
    """
    votes = np.zeros(m, dtype=np.int64)
    counts = np.zeros(m, dtype=np.int64)
    for study in studies:
        np.add.at(votes, study.hypotheses, study.decisions)
        np.add.at(counts, study.hypotheses, 1)
    quorum = (counts + 1) // 2
    rejected = np.nonzero((counts >= 1) & (votes >= quorum))[0].astype(np.int64)
    return RejectionSet(alpha=1.0, k_alpha=int(rejected.size),
                        rejected=rejected, threshold_value=None)


def _pool_arrays(pvals: PValueTable, m: int):
    neg2logs = np.zeros(m, dtype=np.float64)
    recips = np.zeros(m, dtype=np.float64)
    for s in pvals.studies:
        with np.errstate(divide="ignore"):
            np.add.at(neg2logs, s.ids, -2.0 * np.log(s.pvalues))
            np.add.at(recips, s.ids, 1.0 / s.pvalues)
    return neg2logs, recips


def fisher_pool(pvals: PValueTable, cov: CoverageProfile, alpha: float) -> RejectionSet:
    """Fisher's method per hypothesis, then BH on the pooled p-values.

    T_i = -2 * sum_j log p_ij is chi-square with 2*n_i dof under the null;
    a p-value of exactly 0 drives T_i to infinity and the pooled p to 0.
    Untested hypotheses get pooled p = 1.
    """
    m = cov.m
    stats, _ = _pool_arrays(pvals, m)
    pooled = np.ones(m, dtype=np.float64)
    tested = cov.counts >= 1
    pooled[tested] = chisq_sf(stats[tested], 2 * cov.counts[tested])
    return bh(pooled, alpha)


def hm_pool(pvals: PValueTable, cov: CoverageProfile, alpha: float) -> RejectionSet:
    """Raw harmonic-mean pooling per hypothesis, then BH."""
    m = cov.m
    _, recips = _pool_arrays(pvals, m)
    pooled = np.ones(m, dtype=np.float64)
    tested = cov.counts >= 1
    with np.errstate(invalid="ignore"):
        hm = cov.counts[tested] / recips[tested]
    pooled[tested] = np.clip(np.nan_to_num(hm, nan=0.0), 0.0, 1.0)
    return bh(pooled, alpha)
