"""Evidence construction: turn one study's decision bits into evidence indices.

A study testing m_j hypotheses at FDR level alpha_j carries total evidence
weight w_j = m_j / alpha_j, spread evenly over its rejections:

    e_ij = w_j * delta_ij / max(||delta_j||_0, 1)

Large values accrue to studies that tested many hypotheses, were
conservative (small alpha_j), or rejected few. With zero rejections every
index is 0 (the "or 1" guards the division).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import StudyTriplet


@dataclass(frozen=True)
class EvidenceVector:
    """Per-hypothesis evidence indices for one study.

    ``ids``/``values`` are aligned arrays over the study's tested set, in
    the study's hypothesis order. Only rejected hypotheses carry nonzero
    values and all nonzero values within one study are equal.
    """

    study_id: str
    weight_wj: float
    rejection_count: int
    ids: np.ndarray
    values: np.ndarray

    @property
    def entries(self) -> list[tuple[int, float]]:
        return [(int(i), float(v)) for i, v in zip(self.ids, self.values)]


def build_evidence(study: StudyTriplet) -> EvidenceVector:
    """Compute the evidence vector of one validated study triplet."""
    weight = study.m_j / study.alpha
    k = study.rejection_count
    values = weight * study.decisions.astype(np.float64) / max(k, 1)
    values.setflags(write=False)
    return EvidenceVector(
        study_id=study.study_id,
        weight_wj=weight,
        rejection_count=k,
        ids=study.hypotheses,
        values=values,
    )
