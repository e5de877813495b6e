import json
import xml.etree.ElementTree as ET

import pytest

from hpqcert.cli import EXIT_INPUT, EXIT_MISMATCH, EXIT_OK, main

SVG = "{http://www.w3.org/2000/svg}"

BOOST = """
[matrices]
gram = [[1, 0, 0], [0, 1, 0], [0, 0, -1]]
[matrices.generators]
a = [["5/3", 0, "4/3"], [0, 1, 0], ["4/3", 0, "5/3"]]
b = [[1, 0, 0], [0, "5/3", "4/3"], [0, "4/3", "5/3"]]
"""

PENTAGON = """
[coxeter]
generators = ["s1", "s2", "s3", "s4", "s5"]
default = "infty:21/20"
edges = [["s1", "s2", "commute"], ["s2", "s3", "commute"], ["s3", "s4", "commute"],
         ["s4", "s5", "commute"], ["s5", "s1", "commute"]]
"""


def write(tmp_path, text, name="in.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def load(path):
    return json.loads(open(path).read())


def test_example_run_writes_report(tmp_path):
    out = tmp_path / "r.json"
    code = main(["--example", "schottky-21", "--depth", "4", "--expect", "negative", "--report", str(out)])
    assert code == EXIT_OK
    rep = load(out)
    assert rep["schema_version"] == 1
    assert list(rep)[:2] == ["schema_version", "generated_at"]
    assert rep["verdict"]["value"] == "Negative"
    assert rep["identification"]["p"] == 2 and rep["identification"]["q"] == 1
    assert rep["anosov_gap"]["heuristic"] is True
    assert rep["expect"] == {"wanted": "Negative", "matched": True}


def test_expect_mismatch_exit_code(tmp_path):
    out = tmp_path / "r.json"
    code = main(["--example", "mixed-po22", "--depth", "3", "--expect", "negative", "--report", str(out)])
    assert code == EXIT_MISMATCH
    rep = load(out)
    assert rep["verdict"]["value"] == "Mixed"
    assert rep["verdict"]["negative_witness"] and rep["verdict"]["positive_witness"]


def test_report_to_stdout(capsys):
    assert main(["--example", "schottky-21", "--depth", "2"]) == EXIT_OK
    rep = json.loads(capsys.readouterr().out)
    assert rep["config"]["depth"] == 2


def test_matrices_input_with_rationals(tmp_path):
    out = tmp_path / "r.json"
    code = main(["--input", write(tmp_path, BOOST), "--depth", "4", "--report", str(out)])
    assert code == EXIT_OK
    rep = load(out)
    assert rep["source"]["kind"] == "matrices"
    assert rep["verdict"]["value"] == "Negative"


def test_coxeter_input(tmp_path):
    out = tmp_path / "r.json"
    code = main(["--input", write(tmp_path, PENTAGON), "--depth", "4", "--expect", "negative",
                 "--report", str(out)])
    assert code == EXIT_OK
    rep = load(out)
    assert rep["identification"]["hypotheses"] == {"infinite": True, "irreducible": True,
                                                   "condition1": True, "condition2": True}
    assert len(rep["coxeter"]["edge_products"]) == 5


@pytest.mark.parametrize("text", [
    "this is [ not toml",
    "[other]\nx = 1\n",
    "[coxeter]\ngenerators = []\n",
    '[coxeter]\ngenerators = ["a", "b"]\nedges = [["a", "b", "braid"]]\n',
    '[coxeter]\ngenerators = ["a", "b"]\nedges = [["a", "c", "commute"]]\n',
    '[coxeter]\ngenerators = ["a", "b"]\ndefault = "infty:1/2"\n',
    '[matrices]\ngram = [[1, 0], [0, -1]]\n[matrices.generators]\na = [[2, 0], [0, 1]]\n',
    '[matrices]\ngram = [[1, 0], [0, -1]]\n[matrices.generators]\na = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]\n',
    '[matrices]\ngram = [[1, 0], [0, "x"]]\n[matrices.generators]\na = [[1, 0], [0, 1]]\n',
])
def test_malformed_input_exits_1(tmp_path, text, capsys):
    assert main(["--input", write(tmp_path, text)]) == EXIT_INPUT
    assert "input error" in capsys.readouterr().err


def test_missing_file_exits_1(tmp_path):
    assert main(["--input", str(tmp_path / "absent.toml")]) == EXIT_INPUT


def test_bad_tolerance_exits_1():
    assert main(["--example", "schottky-21", "--tol", "bogus=1"]) == EXIT_INPUT
    assert main(["--example", "schottky-21", "--tol", "sign=-1"]) == EXIT_INPUT


def test_hypothesis_abort(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["--example", "square", "--report", str(out)]) == EXIT_INPUT
    rep = load(out)
    assert set(rep["aborted"]["failed"]) == {"irreducible", "condition1"}
    assert rep["verdict"]["value"] is None
    assert "condition1" in capsys.readouterr().err


def test_plot_structure(tmp_path):
    svg = tmp_path / "p.svg"
    out = tmp_path / "r.json"
    assert main(["--example", "mixed-po22", "--depth", "3", "--plot", str(svg), "--report", str(out)]) == EXIT_OK
    root = ET.parse(svg).getroot()
    assert root.tag == SVG + "svg"
    classes = [el.get("class", "") for el in root.iter()]
    assert any(c == "limit mixed" for c in classes)
    assert "witness witness-negative" in classes and "witness witness-positive" in classes
    assert "quadric" in classes or "quadric-dot" in classes
    assert load(out)["plot"]["written"] is True


def test_plot_of_disk(tmp_path):
    svg = tmp_path / "p.svg"
    assert main(["--example", "schottky-21", "--depth", "3", "--plot", str(svg), "--report",
                 str(tmp_path / "r.json")]) == EXIT_OK
    root = ET.parse(svg).getroot()
    polys = [el for el in root.iter(SVG + "polygon") if el.get("class") == "quadric"]
    assert len(polys) == 1
    assert sum(1 for el in root.iter(SVG + "circle") if el.get("class") == "limit negative") > 10


def test_plot_skipped_for_five_dimensions(tmp_path):
    svg = tmp_path / "p.svg"
    out = tmp_path / "r.json"
    assert main(["--example", "pentagon", "--depth", "3", "--plot", str(svg), "--report", str(out)]) == EXIT_OK
    rep = load(out)
    assert not svg.exists()
    assert rep["plot"]["written"] is False
    assert any("plot skipped" in n for n in rep["notes"])
