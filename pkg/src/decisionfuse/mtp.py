"""Thresholding procedures: e-BH on e-values, classical BH on p-values.

Both are step-up rules. e-BH compares descending e-values against
m/(i*alpha) and controls FDR under arbitrary dependence whenever its
inputs are generalized e-values; BH compares ascending p-values against
i*alpha/m. Sorting ties are broken by ascending original index so outputs
are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import TruthVector


@dataclass(frozen=True)
class RejectionSet:
    """Outcome of a thresholding procedure.

    ``threshold_value`` is the cutoff actually applied (m/(alpha*k) for
    e-BH, the k-th smallest p-value for BH) and None when nothing is
    rejected, keeping file output finite.
    """

    alpha: float
    k_alpha: int
    rejected: np.ndarray
    threshold_value: float | None

    @property
    def size(self) -> int:
        return int(self.rejected.size)


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def ebh(e_values, alpha: float) -> RejectionSet:
    """The e-BH procedure on a dense length-m e-value vector.

    +infinity entries are allowed (a calibrated p-value of 0) and sort
    above every finite value, forcing k_alpha >= 1.
    """
    _check_alpha(alpha)
    e = np.asarray(e_values, dtype=np.float64)
    m = e.size
    if m == 0:
        raise ValueError("e_values must be non-empty")
    if np.isnan(e).any() or (e < 0).any():
        raise ValueError("e-values must be non-negative (inf allowed)")

    # Descending values, ascending index on ties.
    order = np.lexsort((np.arange(m), -e))
    ordered = e[order]
    ranks = np.arange(1, m + 1)
    feasible = np.nonzero(ordered >= m / (ranks * alpha))[0]
    if feasible.size == 0:
        return RejectionSet(alpha=alpha, k_alpha=0,
                            rejected=np.empty(0, dtype=np.int64),
                            threshold_value=None)
    k = int(feasible[-1]) + 1
    cutoff = m / (alpha * k)
    rejected = np.nonzero(e >= cutoff)[0].astype(np.int64)
    return RejectionSet(alpha=alpha, k_alpha=k, rejected=rejected,
                        threshold_value=cutoff)


def bh(p_values, alpha: float) -> RejectionSet:
    """The Benjamini-Hochberg step-up procedure on a p-value vector."""
    _check_alpha(alpha)
    p = np.asarray(p_values, dtype=np.float64)
    m = p.size
    if m == 0:
        raise ValueError("p_values must be non-empty")
    if np.isnan(p).any() or (p < 0).any() or (p > 1).any():
        raise ValueError("p-values must lie in [0, 1]")

    order = np.lexsort((np.arange(m), p))
    ordered = p[order]
    ranks = np.arange(1, m + 1)
    feasible = np.nonzero(ordered <= ranks * alpha / m)[0]
    if feasible.size == 0:
        return RejectionSet(alpha=alpha, k_alpha=0,
                            rejected=np.empty(0, dtype=np.int64),
                            threshold_value=None)
    k = int(feasible[-1]) + 1
    cutoff = float(ordered[k - 1])
    rejected = np.nonzero(p <= cutoff)[0].astype(np.int64)
    return RejectionSet(alpha=alpha, k_alpha=k, rejected=rejected,
                        threshold_value=cutoff)


def fdp_etp(rejected: RejectionSet, truth: TruthVector) -> tuple[float, int]:
    """False discovery proportion and true-positive count of one rejection set."""
    theta = truth.theta
    r = rejected.rejected
    tp = int(theta[r].sum()) if r.size else 0
    fdp = (r.size - tp) / max(r.size, 1)
    return float(fdp), tp
