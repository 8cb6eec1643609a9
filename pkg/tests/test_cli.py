import json

import numpy as np
import pytest

from twoproj.cli import main
from twoproj.docs import dumps, matrix_to_doc, pair_to_doc
from twoproj.pairs import pair_with_angles


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def structured(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "structured")
    return code, json.loads(out), out


@pytest.fixture
def pair_file(tmp_path):
    def write(p, q, name="pair.json"):
        path = tmp_path / name
        path.write_text(json.dumps({"p": matrix_to_doc(p), "q": matrix_to_doc(q)}))
        return str(path)

    return write


def test_analyze_seeded(capsys):
    code, doc, _ = structured(capsys, "analyze", "--seed", "42", "--dim", "6")
    assert code == 0 and doc["passed"]
    assert doc["config"]["seed"] == 42
    assert max(doc["residuals"].values()) <= 1e-10


def test_analyze_equal_projections(capsys, pair_file):
    p = np.diag([1.0, 0.0, 1.0])
    code, doc, _ = structured(capsys, "analyze", "--input", pair_file(p, p))
    assert code == 0
    assert doc["results"]["friedrichs_angle"] == 0.0
    assert doc["results"]["corner_dims"]["h1"] == 2


def test_analyze_rejects_non_projection(capsys, pair_file):
    code, _, err = run(capsys, "analyze", "--input", pair_file(np.eye(2), np.array([[1.0, 1.0], [0.0, 0.0]])))
    assert code == 2 and "error" in err


def test_missing_and_malformed_input(capsys, tmp_path):
    assert run(capsys, "analyze", "--input", str(tmp_path / "nope.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("[")
    assert run(capsys, "analyze", "--input", str(bad))[0] == 2


def test_usage_errors_exit_two(capsys):
    for argv in (["analyze", "--seed", "-1"], ["sweep", "--grids", "10,x"], ["frobnicate"], ["analyze", "--dim", "0"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2
    capsys.readouterr()


def test_structured_output_is_byte_stable(capsys):
    a = structured(capsys, "unitary", "--seed", "7", "--dim", "5")[2]
    b = structured(capsys, "unitary", "--seed", "7", "--dim", "5")[2]
    assert a == b
    assert json.loads(a)["results"]["u"]["rows"] == 5


def test_human_output(capsys):
    code, out, _ = run(capsys, "halmos", "--seed", "3")
    assert code == 0
    assert "generic_spectrum" in out and "passed: True" in out


def test_out_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    assert main(["analyze", "--format", "structured", "--out", str(target)]) == 0
    assert json.loads(target.read_text())["passed"]
    assert capsys.readouterr().out == ""


def test_words_command(capsys, tmp_path):
    pair = pair_with_angles((0, 0, 0, 0), [np.pi / 4])
    path = tmp_path / "half.json"
    path.write_text(dumps(pair_to_doc(pair)))
    comb = tmp_path / "comb.json"
    comb.write_text(json.dumps({"lambda0": 0, "terms": [{"re": 1, "family": "D", "k": 0},
                                                        {"re": -1, "family": "D", "k": 1}]}))
    code, doc, _ = structured(capsys, "words", "--input", str(path), "--word", "A1", "--word", "A1",
                              "--combination", str(comb))
    assert code == 0
    assert doc["results"]["product"] == "A2"
    assert doc["results"]["words"]["A1"] == pytest.approx(np.sqrt(0.5))
    assert doc["results"]["combination_norm"] == pytest.approx(0.5)
    assert run(capsys, "words", "--word", "E1")[0] == 2


@pytest.mark.parametrize("name", ["no-common-unitary", "pqp-nonconvergence", "invariant-submodule"])
def test_scenarios(capsys, name):
    code, doc, _ = structured(capsys, "scenario", "--scenario", name, "--grid", "201")
    assert code == 0 and doc["certificate"]["passed"]


def test_scenario_reports_solution_dims(capsys):
    code, doc, _ = structured(capsys, "scenario", "--scenario", "no-common-unitary")
    assert code == 0
    assert len(doc["results"]["solution_dims"]) == 1001
    assert doc["results"]["solution_dims_boundary_diagonal"] == {"t=0": 0, "t=1": 0}


def test_randomized_scenarios(capsys):
    for name in ("semiharmonious-not-harmonious", "range-2ipq-fails"):
        code, doc, _ = structured(capsys, "scenario", "--scenario", name, "--grid", "201", "--trials", "50")
        assert code == 0, doc["certificate"]


def test_matched_transfer_scenario(capsys):
    assert run(capsys, "scenario", "--scenario", "matched-transfer", "--seed", "5", "--dim", "8")[0] == 0


def test_unknown_scenario(capsys):
    assert run(capsys, "scenario", "--scenario", "bogus-name")[0] == 2


def test_sweep_pairs(capsys):
    code, doc, _ = structured(capsys, "sweep", "--count", "20", "--seed", "11")
    assert code == 0
    assert doc["results"]["violations"] == 0
    assert sum(r["count"] for r in doc["results"]["angle_histogram"]) == 20


def test_sweep_empty(capsys):
    code, doc, _ = structured(capsys, "sweep", "--count", "0")
    assert code == 0 and doc["results"]["instances"] == 0


def test_sweep_grid_refinement(capsys):
    code, doc, _ = structured(capsys, "sweep", "--kind", "grid-refinement")
    assert code == 0
    ratios = doc["results"]["ratios"]
    assert len(ratios) == 2 and all(12 <= r <= 20 for r in ratios)
    assert doc["results"]["sup_norm_refinement"]["monotone"]


def test_bad_grid_size(capsys):
    assert run(capsys, "scenario", "--scenario", "pqp-nonconvergence", "--grid", "2")[0] == 2
