import json
import os

import numpy as np
import pytest

from decisionfuse import io
from decisionfuse.cli import main

# (m_j, alpha_j, rejections, published max evidence)
PUBLISHED_TABLE = [
    (8799, 0.05, 2094, 84.04),
    (8798, 0.01, 921, 955.27),
    (8799, 0.05, 1624, 108.36),
    (13579, 0.05, 3328, 81.60),
    (19738, 0.01, 282, 6999.29),
    (9703, 0.01, 1234, 786.30),
    (12688, 0.01, 0, 0.0),
    (12689, 0.05, 4716, 53.81),
]


def write_study(path, study_id, alpha, hypotheses, decisions):
    with open(path, "w") as fh:
        json.dump({"study_id": study_id, "alpha": alpha,
                   "hypotheses": hypotheses, "decisions": decisions}, fh)


def synth_published_inputs(tmp_path, m=23367):
    """Synthesize triplet files with the published sizes over a shared universe."""
    rng = np.random.default_rng(99)
    paths = []
    for j, (m_j, alpha_j, rejections, _) in enumerate(PUBLISHED_TABLE):
        ids = np.sort(rng.choice(m, size=m_j, replace=False)) + 1
        decisions = [1] * rejections + [0] * (m_j - rejections)
        path = tmp_path / f"study{j + 1}.json"
        write_study(path, f"study-{j + 1}", alpha_j, ids.tolist(), decisions)
        paths.append(str(path))
    return paths


class TestTripletFiles:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "s.json"
        write_study(path, "s1", 0.05, [1, 2, 5], [1, 0, 1])
        record = io.read_study_record(str(path))
        problem, label_map = io.build_problem([record], "auto", 0.1)
        study = problem.studies[0]
        assert study.hypotheses.tolist() == [0, 1, 4]
        text = io.serialize_study(study, label_map)
        reparsed = json.loads(text)
        assert reparsed == record
        # serialize -> parse -> serialize is a fixed point
        path2 = tmp_path / "s2.json"
        path2.write_text(text)
        assert io.serialize_study(
            io.build_problem([io.read_study_record(str(path2))], "auto", 0.1)[0].studies[0],
            label_map,
        ) == text

    def test_named_hypotheses(self, tmp_path):
        path = tmp_path / "s.json"
        write_study(path, "s1", 0.05, ["geneB", "geneA"], [1, 0])
        record = io.read_study_record(str(path))
        problem, label_map = io.build_problem([record], "auto", 0.1)
        assert label_map.m == 2
        assert label_map.labels == ("geneA", "geneB")
        assert problem.studies[0].hypotheses.tolist() == [1, 0]

    def test_mixed_labels_rejected(self, tmp_path):
        path = tmp_path / "s.json"
        write_study(path, "s1", 0.05, ["a", 2], [1, 0])
        with pytest.raises(io.ParseError, match="mix"):
            io.build_problem([io.read_study_record(str(path))], "auto", 0.1)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{nope")
        with pytest.raises(io.ParseError):
            io.read_study_record(str(path))

    def test_length_mismatch(self, tmp_path):
        path = tmp_path / "s.json"
        write_study(path, "s1", 0.05, [1, 2], [1])
        with pytest.raises(io.ParseError, match="length"):
            io.read_study_record(str(path))


class TestResultTable:
    def test_rank_order_and_prefix(self, tmp_path):
        from decisionfuse.mtp import ebh

        values = np.array([0.0, 40.0, 40.0, 10.0])
        counts = np.array([1, 1, 1, 1])
        rejection = ebh(values, 0.5)
        label_map = io.LabelMap(tuple(str(i) for i in range(1, 5)), named=False)
        out = tmp_path / "result.csv"
        io.write_result_table(str(out), label_map, counts, values, rejection,
                              "agg", 0.5)
        rows = io.read_result_table(str(out))
        assert [r["hypothesis_id"] for r in rows] == ["2", "3", "4", "1"]
        assert [r["rank"] for r in rows] == ["1", "2", "3", "4"]
        flags = [int(r["rejected"]) for r in rows]
        assert flags == sorted(flags, reverse=True)  # rejected rows are a prefix
        meta = json.loads((tmp_path / "result.csv.meta.json").read_text())
        assert meta["format_version"] == io.FORMAT_VERSION
        assert meta["k_alpha"] == rejection.k_alpha

    def test_atomic_on_failure(self, tmp_path, monkeypatch):
        out = tmp_path / "result.csv"
        out.write_text("previous contents\n")

        with pytest.raises(OSError):
            io.atomic_write_text(str(tmp_path / "missing-dir" / "x.csv"), "data")
        assert out.read_text() == "previous contents\n"
        # no temp droppings left behind
        assert [p for p in os.listdir(tmp_path) if p.startswith(".tmp-")] == []


class TestFuseCommand:
    def test_published_max_evidence(self, tmp_path):
        inputs = synth_published_inputs(tmp_path)
        out = tmp_path / "fused.csv"
        code = main(["fuse", "--inputs", *inputs, "--m", "23367",
                     "--alpha", "0.1", "--mode", "agg", "--output", str(out)])
        assert code == 0
        # reconstruct per-study max evidence from the spec'd formula inputs
        from decisionfuse.evidence import build_evidence

        records = [io.read_study_record(p) for p in inputs]
        problem, _ = io.build_problem(records, 23367, 0.1)
        for study, (_, _, _, expected) in zip(problem.studies, PUBLISHED_TABLE):
            vec = build_evidence(study)
            assert float(vec.values.max()) == pytest.approx(expected, abs=0.01)

    def test_all_zero_decisions(self, tmp_path):
        path = tmp_path / "s.json"
        write_study(path, "s1", 0.05, [1, 2, 3], [0, 0, 0])
        out = tmp_path / "out.csv"
        assert main(["fuse", "--inputs", str(path), "--alpha", "0.1",
                     "--output", str(out)]) == 0
        rows = io.read_result_table(str(out))
        assert all(r["rejected"] == "0" for r in rows)
        assert all(float(r["e_agg"]) == 0.0 for r in rows)

    def test_disjoint_studies_alpha_doubling(self, tmp_path):
        # two disjoint equal studies: the union of both studies' rejections
        # is recovered at twice the per-study level
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        write_study(a, "a", 0.05, [1, 2, 3, 4], [1, 1, 0, 0])
        write_study(b, "b", 0.05, [5, 6, 7, 8], [1, 1, 0, 0])
        out = tmp_path / "out.csv"
        assert main(["fuse", "--inputs", str(a), str(b), "--alpha", "0.1",
                     "--output", str(out)]) == 0
        rows = io.read_result_table(str(out))
        rejected = {r["hypothesis_id"] for r in rows if r["rejected"] == "1"}
        assert rejected == {"1", "2", "5", "6"}

    def test_validation_error_exit_code(self, tmp_path, capsys):
        path = tmp_path / "s.json"
        write_study(path, "s1", 1.5, [1, 2], [1, 0])
        out = tmp_path / "out.csv"
        assert main(["fuse", "--inputs", str(path), "--alpha", "0.1",
                     "--output", str(out)]) == 2
        assert "alpha" in capsys.readouterr().err
        assert not out.exists()

    def test_missing_input_is_io_error(self, tmp_path):
        assert main(["fuse", "--inputs", str(tmp_path / "nope.json"),
                     "--alpha", "0.1", "--output", str(tmp_path / "o.csv")]) == 1


class TestCalibrateCommand:
    def write_pvalues(self, path, records):
        with open(path, "w") as fh:
            json.dump(records, fh)

    def test_all_ones_reject_nothing(self, tmp_path):
        path = tmp_path / "p.json"
        self.write_pvalues(path, [{"study_id": "s", "alpha": 0.05,
                                   "hypotheses": [1, 2, 3], "pvalues": [1, 1, 1]}])
        out = tmp_path / "out.csv"
        assert main(["calibrate", "--pvalues", str(path), "--alpha", "0.1",
                     "--output", str(out)]) == 0
        rows = io.read_result_table(str(out))
        assert all(r["rejected"] == "0" for r in rows)
        assert rows[0]["e_p2e"] is not None

    def test_zero_pvalue_ranked_first(self, tmp_path):
        path = tmp_path / "p.json"
        self.write_pvalues(path, [{"study_id": "s", "alpha": 0.05,
                                   "hypotheses": [1, 2, 3],
                                   "pvalues": [0.9, 0.0, 0.8]}])
        out = tmp_path / "out.csv"
        assert main(["calibrate", "--pvalues", str(path), "--alpha", "0.001",
                     "--output", str(out)]) == 0
        rows = io.read_result_table(str(out))
        assert rows[0]["hypothesis_id"] == "2"
        assert rows[0]["rejected"] == "1"

    def test_hand_evaluated_single_pvalue(self, tmp_path):
        # 2/(0.001 * log(0.001)^2) ~ 41.914 >= 1/0.05 -> rejected
        path = tmp_path / "p.json"
        self.write_pvalues(path, [{"study_id": "s", "alpha": 0.05,
                                   "hypotheses": [1], "pvalues": [0.001]}])
        out = tmp_path / "out.csv"
        assert main(["calibrate", "--pvalues", str(path), "--alpha", "0.05",
                     "--output", str(out)]) == 0
        rows = io.read_result_table(str(out))
        assert rows[0]["rejected"] == "1"
        assert float(rows[0]["e_p2e"]) == pytest.approx(41.9137, abs=0.01)


class TestBhCommand:
    def test_rejects_small_pvalues(self, tmp_path, capsys):
        path = tmp_path / "p.json"
        path.write_text("[0.01, 0.02, 0.9, 0.9]")
        assert main(["bh", "--pvalues", str(path), "--alpha", "0.1"]) == 0
        assert capsys.readouterr().out.split() == ["1", "2"]

    def test_all_ones(self, tmp_path, capsys):
        path = tmp_path / "p.json"
        path.write_text("[1, 1, 1]")
        assert main(["bh", "--pvalues", str(path), "--alpha", "0.1"]) == 0
        assert capsys.readouterr().out == ""

    def test_single_pvalue(self, tmp_path, capsys):
        path = tmp_path / "p.json"
        path.write_text("[0.04]")
        assert main(["bh", "--pvalues", str(path), "--alpha", "0.05"]) == 0
        assert capsys.readouterr().out.split() == ["1"]

    def test_parse_error(self, tmp_path):
        path = tmp_path / "p.json"
        path.write_text("{}")
        assert main(["bh", "--pvalues", str(path), "--alpha", "0.05"]) == 2


class TestSimulateCommand:
    def test_deterministic_outputs(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        args = ["simulate", "--scenario", "1", "--grid", "d=5",
                "--reps", "5", "--seed", "7"]
        assert main(args + ["--output", str(out1)]) == 0
        assert main(args + ["--output", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        assert (tmp_path / "a.csv.summary.csv").read_bytes() == \
            (tmp_path / "b.csv.summary.csv").read_bytes()

    def test_long_and_summary_format(self, tmp_path):
        out = tmp_path / "sim.csv"
        assert main(["simulate", "--scenario", "2", "--grid", "rho=0,0.5",
                     "--reps", "3", "--seed", "1", "--methods", "irt,naive",
                     "--output", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "grid_value,method,rep,fdp,etp"
        assert len(lines) == 1 + 2 * 2 * 3  # grid x methods x reps
        summary = io.read_summary_table(str(out) + ".summary.csv")
        assert {row["method"] for row in summary} == {"irt", "naive"}
        assert {row["grid_value"] for row in summary} == {0.0, 0.5}

    def test_wrong_grid_key(self, tmp_path, capsys):
        assert main(["simulate", "--scenario", "1", "--grid", "rho=0.5",
                     "--reps", "2", "--output", str(tmp_path / "x.csv")]) == 2
        assert "sweeps" in capsys.readouterr().err


class TestReportCommand:
    def test_renders_figures(self, tmp_path):
        out = tmp_path / "sim.csv"
        assert main(["simulate", "--scenario", "1", "--grid", "d=5,10",
                     "--reps", "3", "--seed", "2", "--methods", "irt,naive",
                     "--output", str(out)]) == 0
        figdir = tmp_path / "figs"
        assert main(["report", "--summary", str(out) + ".summary.csv",
                     "--output-dir", str(figdir), "--grid-label", "d"]) == 0
        assert (figdir / "fdp.png").stat().st_size > 0
        assert (figdir / "etp.png").stat().st_size > 0
