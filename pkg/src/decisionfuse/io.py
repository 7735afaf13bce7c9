"""File formats: study triplet files, p-value files, result tables.

Study and p-value files are JSON, one object per study. Hypothesis ids in
files are 1-based integers or string names (one convention per problem,
never mixed). Delimited outputs are comma-separated with LF line endings
and shortest-round-trip decimal rendering, so fixed inputs give
byte-identical output. All writes go to a temp file in the target
directory followed by an atomic rename: on failure the destination is
either absent or its previous content, never truncated.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .calibrate import PValueStudy, PValueTable
from .core import FusionProblem, StudyTriplet

FORMAT_VERSION = 1


class ParseError(ValueError):
    """Malformed input file; maps to CLI exit code 2."""


def _fmt(value) -> str:
    """Shortest-round-trip decimal for floats; plain str for the rest."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


# ---------------------------------------------------------------------------
# Study triplet / p-value files


def _require(record: dict, key: str, path: str):
    if key not in record:
        raise ParseError(f"{path}: missing field {key!r}")
    return record[key]


def _load_json(path: str):
    with open(path, "r") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON ({exc})") from exc


def read_study_record(path: str) -> dict:
    """Read one triplet file; returns the raw record with labels unresolved."""
    record = _load_json(path)
    if not isinstance(record, dict):
        raise ParseError(f"{path}: expected a JSON object")
    study_id = _require(record, "study_id", path)
    alpha = _require(record, "alpha", path)
    hypotheses = _require(record, "hypotheses", path)
    decisions = _require(record, "decisions", path)
    if not isinstance(study_id, str):
        raise ParseError(f"{path}: study_id must be a string")
    if not isinstance(alpha, (int, float)):
        raise ParseError(f"{path}: alpha must be a number")
    if not isinstance(hypotheses, list) or not isinstance(decisions, list):
        raise ParseError(f"{path}: hypotheses and decisions must be arrays")
    if len(hypotheses) != len(decisions):
        raise ParseError(f"{path}: hypotheses and decisions differ in length")
    if any(d not in (0, 1) for d in decisions):
        raise ParseError(f"{path}: decisions must be 0/1")
    return {"study_id": study_id, "alpha": float(alpha),
            "hypotheses": hypotheses, "decisions": decisions}


def read_pvalue_records(path: str) -> list[dict]:
    """Read a p-value file: a JSON array of study records with pvalues."""
    payload = _load_json(path)
    if isinstance(payload, dict):
        payload = [payload]
    if not isinstance(payload, list):
        raise ParseError(f"{path}: expected a JSON array of study records")
    records = []
    for record in payload:
        if not isinstance(record, dict):
            raise ParseError(f"{path}: each record must be a JSON object")
        study_id = _require(record, "study_id", path)
        alpha = _require(record, "alpha", path)
        hypotheses = _require(record, "hypotheses", path)
        pvalues = _require(record, "pvalues", path)
        if len(hypotheses) != len(pvalues):
            raise ParseError(f"{path}: hypotheses and pvalues differ in length")
        if any(not isinstance(p, (int, float)) or not 0 <= p <= 1 for p in pvalues):
            raise ParseError(f"{path}: pvalues must lie in [0, 1]")
        records.append({"study_id": study_id, "alpha": float(alpha),
                        "hypotheses": hypotheses, "pvalues": [float(p) for p in pvalues]})
    return records


@dataclass(frozen=True)
class LabelMap:
    """Maps file-level hypothesis labels to dense 0-based ids and back."""

    labels: tuple[str, ...]
    named: bool

    @property
    def m(self) -> int:
        return len(self.labels)

    def label_of(self, idx: int) -> str:
        return self.labels[idx]


def build_label_map(records: list[dict], m_arg) -> LabelMap:
    """Resolve hypothesis labels across records.

    With integer labels (1-based), m is ``m_arg`` or, when "auto", the
    maximum referenced id. With string names, m is the count of distinct
    names (sorted for determinism) and ``m_arg`` must be "auto".
    """
    kinds = {type(h) for record in records for h in record["hypotheses"]}
    if kinds <= {int}:
        max_id = max((h for record in records for h in record["hypotheses"]), default=0)
        if any(h < 1 for record in records for h in record["hypotheses"]):
            raise ParseError("integer hypothesis ids must be >= 1")
        if m_arg in (None, "auto"):
            m = max_id
        else:
            m = int(m_arg)
            if max_id > m:
                raise ParseError(f"hypothesis id {max_id} exceeds --m {m}")
        return LabelMap(tuple(str(i) for i in range(1, m + 1)), named=False)
    if kinds <= {str}:
        if m_arg not in (None, "auto"):
            raise ParseError("--m must be auto when hypotheses are named")
        names = sorted({h for record in records for h in record["hypotheses"]})
        return LabelMap(tuple(names), named=True)
    raise ParseError("hypothesis labels mix integers and names")


def _resolve_ids(labels, label_map: LabelMap) -> np.ndarray:
    if label_map.named:
        index = {name: i for i, name in enumerate(label_map.labels)}
        return np.array([index[h] for h in labels], dtype=np.int64)
    return np.array(labels, dtype=np.int64) - 1


def build_problem(records: list[dict], m_arg, alpha: float) -> tuple[FusionProblem, LabelMap]:
    label_map = build_label_map(records, m_arg)
    studies = [
        StudyTriplet(r["study_id"], r["alpha"],
                     _resolve_ids(r["hypotheses"], label_map),
                     np.array(r["decisions"], dtype=np.int64))
        for r in records
    ]
    return FusionProblem(m=label_map.m, studies=tuple(studies), alpha=alpha), label_map


def build_pvalue_table(records: list[dict], m_arg) -> tuple[PValueTable, LabelMap]:
    label_map = build_label_map(records, m_arg)
    studies = [
        PValueStudy(r["study_id"], r["alpha"],
                    _resolve_ids(r["hypotheses"], label_map),
                    np.array(r["pvalues"], dtype=np.float64))
        for r in records
    ]
    return PValueTable(tuple(studies)), label_map


def serialize_study(study: StudyTriplet, label_map: LabelMap) -> str:
    """Canonical triplet-file text for a study; stable field order."""
    if label_map.named:
        labels: list = [label_map.label_of(int(i)) for i in study.hypotheses]
    else:
        labels = [int(i) + 1 for i in study.hypotheses]
    record = {
        "study_id": study.study_id,
        "alpha": study.alpha,
        "hypotheses": labels,
        "decisions": [int(b) for b in study.decisions],
    }
    return json.dumps(record, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Result tables


def write_result_table(
    path: str,
    label_map: LabelMap,
    counts: np.ndarray,
    values: np.ndarray,
    rejection,
    mode: str,
    alpha: float,
    value_column: str = "e_agg",
) -> None:
    """Write the ranked per-hypothesis table plus its metadata companion.

    Rank 1 is the largest evidence, ties broken by ascending hypothesis
    id; rejected rows form a prefix of the ranking. Metadata goes to
    ``<path>.meta.json``.
    """
    m = values.size
    order = np.lexsort((np.arange(m), -values))
    rejected = np.zeros(m, dtype=np.int64)
    rejected[rejection.rejected] = 1

    lines = [f"hypothesis_id,n_i,{value_column},rank,rejected"]
    for rank, idx in enumerate(order, start=1):
        lines.append(",".join([
            label_map.label_of(int(idx)),
            str(int(counts[idx])),
            _fmt(float(values[idx])),
            str(rank),
            str(int(rejected[idx])),
        ]))
    atomic_write_text(path, "\n".join(lines) + "\n")

    meta = {
        "format_version": FORMAT_VERSION,
        "mode": mode,
        "alpha": alpha,
        "k_alpha": rejection.k_alpha,
        "threshold": rejection.threshold_value,
    }
    atomic_write_text(path + ".meta.json", json.dumps(meta, indent=2) + "\n")


def read_result_table(path: str) -> list[dict]:
    with open(path, "r") as fh:
        lines = fh.read().splitlines()
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        row = dict(zip(header, cells))
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# Simulation tables


def write_long_table(path: str, rows: list[tuple]) -> None:
    """Long-format per-repetition table: grid_value,method,rep,fdp,etp."""
    lines = ["grid_value,method,rep,fdp,etp"]
    for grid_value, method, rep, fdp, etp in rows:
        lines.append(",".join([_fmt(grid_value), method, str(rep),
                               _fmt(float(fdp)), str(int(etp))]))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_summary_table(path: str, rows: list[tuple]) -> None:
    """Per-grid-point method summary, directly plot-ready."""
    lines = ["grid_value,method,mean_fdp,mean_etp,se_fdp,se_etp"]
    for grid_value, method, mean_fdp, mean_etp, se_fdp, se_etp in rows:
        lines.append(",".join([_fmt(grid_value), method,
                               _fmt(float(mean_fdp)), _fmt(float(mean_etp)),
                               _fmt(float(se_fdp)), _fmt(float(se_etp))]))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_summary_table(path: str) -> list[dict]:
    with open(path, "r") as fh:
        lines = fh.read().splitlines()
    header = lines[0].split(",")
    out = []
    for line in lines[1:]:
        cells = line.split(",")
        row = dict(zip(header, cells))
        for key in ("grid_value", "mean_fdp", "mean_etp", "se_fdp", "se_etp"):
            row[key] = float(row[key])
        out.append(row)
    return out
