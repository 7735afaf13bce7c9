"""Shared domain types: study triplets, truth vectors, fusion problems.

Hypothesis ids are dense non-negative integers, 0-based internally.
File formats and reports use 1-based ids (or string names); the mapping
lives in the I/O layer, never here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding. Diagnostics are data, not exceptions."""

    level: str
    study_id: str | None
    field: str
    message: str

    @property
    def is_error(self) -> bool:
        return self.level == ERROR


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype).copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class StudyTriplet:
    """One study's published output: decisions, FDR level, tested set.

    ``hypotheses`` is the ordered list of tested hypothesis ids and
    ``decisions`` the matching 0/1 bits (1 = rejected).
    """

    study_id: str
    alpha: float
    hypotheses: np.ndarray
    decisions: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "hypotheses", _frozen_array(self.hypotheses, np.int64))
        object.__setattr__(self, "decisions", _frozen_array(self.decisions, np.int64))

    @property
    def m_j(self) -> int:
        return int(self.hypotheses.size)

    @property
    def rejection_count(self) -> int:
        return int(self.decisions.sum())


@dataclass(frozen=True)
class TruthVector:
    """Per-hypothesis truth bits (1 = non-null); simulation only."""

    theta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta", _frozen_array(self.theta, np.int64))

    @property
    def m(self) -> int:
        return int(self.theta.size)


@dataclass(frozen=True)
class FusionProblem:
    """The full fusion input: universe size, studies, overall FDR level."""

    m: int
    studies: tuple[StudyTriplet, ...] = field(default_factory=tuple)
    alpha: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "studies", tuple(self.studies))


def validate_problem(problem: FusionProblem) -> list[Diagnostic]:
    """Check every core invariant; return diagnostics, empty iff all hold.

    Coverage gaps (some hypothesis tested by no study) are warnings:
    untested hypotheses get aggregated evidence 0 downstream and are never
    rejected. Everything else listed here is an error.
    """
    out: list[Diagnostic] = []

    if problem.m < 1:
        out.append(Diagnostic(ERROR, None, "m", f"universe size must be >= 1, got {problem.m}"))
    if not (0.0 < problem.alpha < 1.0):
        out.append(Diagnostic(ERROR, None, "alpha",
                              f"overall alpha out of range (0, 1): {problem.alpha}"))

    seen_ids: set[str] = set()
    for study in problem.studies:
        sid = study.study_id
        if sid in seen_ids:
            out.append(Diagnostic(ERROR, sid, "study_id",
                                  f"duplicate study id {sid!r}: merging would double-count evidence"))
        seen_ids.add(sid)

        if not (0.0 < study.alpha < 1.0):
            out.append(Diagnostic(ERROR, sid, "alpha",
                                  f"alpha out of range (0, 1): {study.alpha}"))
        if study.m_j == 0:
            out.append(Diagnostic(ERROR, sid, "hypotheses",
                                  "empty study: no hypotheses tested"))
            continue
        if study.decisions.size != study.hypotheses.size:
            out.append(Diagnostic(ERROR, sid, "decisions",
                                  f"{study.decisions.size} decisions for "
                                  f"{study.hypotheses.size} hypotheses"))
        uniq = np.unique(study.hypotheses)
        if uniq.size != study.hypotheses.size:
            out.append(Diagnostic(ERROR, sid, "hypotheses",
                                  "duplicate hypothesis ids within one study"))
        if study.hypotheses.size and (study.hypotheses.min() < 0
                                      or study.hypotheses.max() >= problem.m):
            out.append(Diagnostic(ERROR, sid, "hypotheses",
                                  f"hypothesis id outside universe [0, {problem.m})"))
        if study.decisions.size and not np.isin(study.decisions, (0, 1)).all():
            out.append(Diagnostic(ERROR, sid, "decisions",
                                  "decision bits must be 0 or 1"))

    if problem.m >= 1:
        covered = np.zeros(problem.m, dtype=bool)
        for study in problem.studies:
            ids = study.hypotheses
            inside = ids[(ids >= 0) & (ids < problem.m)]
            covered[inside] = True
        for i in np.nonzero(~covered)[0]:
            out.append(Diagnostic(WARNING, None, "coverage",
                                  f"hypothesis {int(i)} untested"))

    return out
