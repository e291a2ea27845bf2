import json

import jsonschema
import numpy as np
import pytest

from weylscope import cli

SPHERE_EXPR = {
    "name": "stereo-s3",
    "g": [["4/(1+x1^2+x2^2+x3^2)^2", "0", "0"],
          ["0", "4/(1+x1^2+x2^2+x3^2)^2", "0"],
          ["0", "0", "4/(1+x1^2+x2^2+x3^2)^2"]],
    "box": [[-1, 1], [-1, 1], [-1, 1]],
    "points": {"list": [[0.1, 0.2, -0.3]], "grid": {"count": 3}},
}


def write(tmp_path, doc, name="spec.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(p)


def run(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


# --------------------------------------------------------------------------
# specification parsing


def test_expression_spec():
    spec = cli.parse_metric_spec(json.dumps(SPHERE_EXPR))
    assert spec.dim == 3 and spec.metric.strategy == "fd"
    assert spec.describe()["g"][0][0] == SPHERE_EXPR["g"][0][0]
    g = spec.metric(np.zeros(3))
    assert np.allclose(g, 4 * np.eye(3))


def test_catalog_spec_with_params():
    spec = cli.parse_metric_spec(json.dumps({"catalog": "s4", "params": {"radius": 2.0}}))
    assert spec.dim == 4 and spec.catalog_key == "s4"


@pytest.mark.parametrize(
    "doc, fragment",
    [
        ('{"g": [["1", 0]', "malformed JSON"),
        ("[1, 2]", "JSON object"),
        ({"catalog": "s4", "g": [["1"]]}, "exactly one"),
        ({"catalog": "nope"}, "unknown catalog"),
        ({"catalog": "s2xs2", "dim": 5}, "dimension"),
        ({"catalog": "s4", "params": {"bogus": 1}}, "bad parameters"),
        ({"g": [["1", "0"], ["0"]]}, "square"),
        ({"g": [["1", "0"], ["0", "1"]]}, "dimension must lie"),
        ({"g": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]], "dim": 4}, "dim is 4"),
        ({"g": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "x4"]]}, "uses x4"),
        ({"g": [["1", "x1", "0"], ["x2", "1", "0"], ["0", "0", "1"]]}, "not symmetric"),
        ({"g": [["1", "0", "0"], ["0", "1+*x1", "0"], ["0", "0", "1"]]}, "g[2][2]"),
        ({"g": [["1"]], "color": "red"}, "unknown keys"),
        ({"catalog": "s4", "points": {"list": [[0, 0]]}}, "4 coordinates"),
        ({"catalog": "s4", "points": {"grid": {}}}, "grid"),
    ],
)
def test_spec_errors(doc, fragment):
    with pytest.raises(cli.SpecError) as info:
        cli.parse_metric_spec(doc if isinstance(doc, str) else json.dumps(doc))
    assert fragment in str(info.value)


def test_malformed_json_reports_position():
    with pytest.raises(cli.SpecError) as info:
        cli.parse_metric_spec('{\n  "catalog": s4\n}')
    assert info.value.line == 2 and info.value.column is not None


def test_grid_points_are_distinct_and_inside():
    box = np.array([[-1.0, 1.0], [0.0, 2.0], [-1.0, 1.0], [-1.0, 1.0]])
    pts = cli.grid_points(box, 4, {"count": 6})
    assert pts.shape == (6, 4) and len({tuple(p) for p in pts}) == 6
    assert np.all(pts >= box[:, 0] + 0.25 * 2 - 1e-12) and np.all(pts <= box[:, 1] - 0.5 + 1e-12)
    tensor = cli.grid_points(box, 4, {"per_axis": 2})
    assert tensor.shape == (16, 4)


def test_select_points():
    spec = cli.parse_metric_spec(json.dumps(SPHERE_EXPR))
    assert cli.select_points(spec, None).shape == (1, 3)
    assert cli.select_points(spec, "grid").shape == (3, 3)
    assert cli.select_points(spec, "grid:4").shape == (4, 3)
    assert np.allclose(cli.select_points(spec, "[0.1, 0, 0]"), [[0.1, 0, 0]])
    for bad in ("grid:x", "nonsense", "[1, 2]"):
        with pytest.raises(cli.SpecError):
            cli.select_points(spec, bad)


# --------------------------------------------------------------------------
# commands and exit codes


def test_analyze_expression_metric(tmp_path, capsys):
    code, out, _ = run(capsys, ["analyze", "--spec", write(tmp_path, SPHERE_EXPR)])
    assert code == 0
    report = json.loads(out)
    jsonschema.validate(report, cli.load_schema())
    (p,) = report["points"]
    assert p["classification"] == "conformally flat"
    assert p["cotton_norm"] <= 1e-4 and p["status"] == "weyl_zero_cotton_zero"


def test_analyze_is_deterministic(tmp_path, capsys):
    outs = []
    for k in range(2):
        path = str(tmp_path / f"r{k}.json")
        code, _, _ = run(capsys, ["analyze", "--catalog", "s2xs2-conformal", "--points", "grid:2",
                                  "--seed", "7", "--out", path])
        assert code == 0
        outs.append(cli.strip_timing(json.loads(open(path).read())))
    assert outs[0] == outs[1]
    assert outs[0]["seed"] == 7
    assert all(p["classification"] == "conformal C-space" for p in outs[0]["points"])


def test_seed_environment_override(monkeypatch, capsys):
    monkeypatch.setenv("WEYLSCOPE_SEED", "99")
    code, out, _ = run(capsys, ["verify-algebra", "--count", "5", "--seed", "1"])
    assert code == 0 and json.loads(out)["seed"] == 99
    monkeypatch.setenv("WEYLSCOPE_SEED", "abc")
    code, _, err = run(capsys, ["verify-algebra", "--count", "5"])
    assert code == 2 and "WEYLSCOPE_SEED" in err


def test_verify_algebra_report(tmp_path, capsys):
    path = str(tmp_path / "va.json")
    code, _, _ = run(capsys, ["verify-algebra", "--count", "10", "--seed", "3", "--dim", "4",
                              "--dim", "5", "--out", path])
    assert code == 0
    report = json.loads(open(path).read())
    jsonschema.validate(report, cli.load_schema())
    assert report["dims"] == [4, 5] and report["passed"]
    assert {s["name"] for s in report["suites"]} >= {"lemma_suite", "equivalence_lattice", "structure_4d", "four_id"}
    code, out, _ = run(capsys, ["report", path, "--format", "csv"])
    assert code == 0 and out.splitlines()[0] == "name,passed,count,max_residual,tolerance"


def test_spectrum_command(capsys):
    code, out, _ = run(capsys, ["spectrum", "--catalog", "s2xs2", "--points", "[[0.1,0.2,0.3,0.4]]"])
    assert code == 0
    (p,) = json.loads(out)["points"]
    assert sorted(p["lambda_plus"]) == pytest.approx(sorted(p["lambda_minus"]), abs=1e-8)
    code, _, err = run(capsys, ["spectrum", "--spec", "/dev/null/missing"])
    assert code == 2


def test_spectrum_rejects_other_dimensions(capsys):
    code, _, err = run(capsys, ["spectrum", "--catalog", "s4", "--points", "[[0,0,0]]"])
    assert code == 2


def test_csv_output(capsys):
    code, out, _ = run(capsys, ["analyze", "--catalog", "flat", "--format", "csv",
                                "--points", "[[0,0,0,0],[0.1,0,0,0]]"])
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 3 and "classification" in lines[0]


@pytest.mark.parametrize(
    "argv, fragment",
    [
        (["analyze"], "--spec is required"),
        (["analyze", "--catalog", "s4", "--points", "[[5,0,0,0]]"], "input error"),
        (["verify-algebra", "--count", "0"], "--count"),
        (["verify-algebra", "--dim", "3"], "--dim"),
    ],
)
def test_input_errors_exit_2(argv, fragment, capsys):
    code, _, err = run(capsys, argv)
    assert code == 2 and fragment in err


def test_bad_expression_exit_2(tmp_path, capsys):
    doc = {"g": [["1+*x1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]}
    code, _, err = run(capsys, ["analyze", "--spec", write(tmp_path, doc)])
    assert code == 2 and "column 3" in err


def test_report_rejects_invalid(tmp_path, capsys):
    path = write(tmp_path, {"schema_version": "2.0"}, "bad.json")
    code, _, err = run(capsys, ["report", path])
    assert code == 2 and "schema" in err
    code, _, err = run(capsys, ["report", write(tmp_path, "{oops", "broken.json")])
    assert code == 2


def test_failing_report_exit_1(tmp_path, capsys, monkeypatch):
    def broken(*args, **kwargs):
        return {"schema_version": "1.0", "tool": "weylscope", "version": "0", "command": "verify-algebra",
                "seed": 0, "points": [], "suites": [], "failures": ["x"], "passed": False}

    monkeypatch.setattr(cli, "cmd_verify_algebra", broken)
    code, _, err = run(capsys, ["verify-algebra", "--count", "1"])
    assert code == 1 and "FAIL x" in err
