"""Command line front-end: ``weylscope analyze|spectrum|verify-algebra|report``.

Exit codes: 0 when every check passes, 1 on tolerance failures, 2 on input
errors.  Reports are JSON (schema in ``schemas/report.schema.json``) or CSV;
everything except the ``timing`` block is reproducible from the inputs.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import jax.numpy as jnp
import jsonschema
import numpy as np

from . import __version__
from . import cspace as cs
from . import curvature_field as cf
from . import expr
from . import four_dim as fd
from . import suites
from . import tensor_core as tc

SCHEMA_VERSION = "1.0"
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class SpecError(ValueError):
    """Invalid metric specification; ``line``/``column`` locate JSON syntax errors."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line, self.column = line, column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)


@dataclass
class MetricSpec:
    name: str
    dim: int
    metric: cf.ChartMetric
    catalog_key: Optional[str] = None
    params: dict = field(default_factory=dict)
    expressions: Optional[list[list[str]]] = None
    box: Optional[np.ndarray] = None
    points: dict = field(default_factory=dict)   # {"list": [...], "grid": {...}}

    def describe(self) -> dict:
        out = {"name": self.name, "dim": self.dim, "strategy": self.metric.strategy}
        if self.catalog_key:
            out["catalog"] = self.catalog_key
            out["params"] = self.params
        else:
            out["g"] = self.expressions
        out["box"] = None if self.box is None else self.box.tolist()
        return out


# --------------------------------------------------------------------------
# specs


def parse_metric_spec(text: str) -> MetricSpec:
    """Parse a metric definition document (see README for the format)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"malformed JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise SpecError("specification must be a JSON object")
    unknown = set(doc) - {"name", "dim", "catalog", "params", "g", "box", "points"}
    if unknown:
        raise SpecError(f"unknown keys {sorted(unknown)}")
    if ("catalog" in doc) == ("g" in doc):
        raise SpecError("give exactly one of 'catalog' or 'g'")
    dim = doc.get("dim")
    if dim is not None and (not isinstance(dim, int) or isinstance(dim, bool)):
        raise SpecError("'dim' must be an integer")
    box = None
    if "box" in doc:
        try:
            box = np.asarray(doc["box"], dtype=float)
        except (TypeError, ValueError):
            raise SpecError("'box' must be a list of [low, high] pairs") from None
    if "catalog" in doc:
        key, params = doc["catalog"], doc.get("params", {})
        if not isinstance(params, dict):
            raise SpecError("'params' must be an object")
        try:
            metric = cf.catalog_metric(key, dim, **params)
        except KeyError:
            raise SpecError(f"unknown catalog metric {key!r}") from None
        except TypeError as exc:
            raise SpecError(f"bad parameters for {key!r}: {exc}") from None
        if dim is not None and metric.dim != dim:
            raise SpecError(f"catalog metric {key!r} has dimension {metric.dim}, not {dim}")
        exprs = None
    else:
        key, params = None, {}
        exprs, metric = _expression_metric(doc["g"], dim)
    try:
        if box is not None:
            metric = cf.ChartMetric(metric.dim, metric.components, box, metric.strategy,
                                    metric.fd_step, metric.richardson, metric.name,
                                    metric.log_factor, metric.base)
    except ValueError as exc:
        raise SpecError(str(exc)) from None
    metric.name = doc.get("name", metric.name or "custom")
    if exprs is not None:
        _check_symmetric(metric, exprs)
    points = _parse_points(doc.get("points", {}), metric.dim)
    return MetricSpec(metric.name, metric.dim, metric, key, params, exprs, metric.box, points)


def _expression_metric(rows, dim):
    if (not isinstance(rows, list) or not rows
            or not all(isinstance(r, list) and len(r) == len(rows) for r in rows)):
        raise SpecError("'g' must be a square list of lists of expressions")
    n = len(rows)
    if dim is not None and dim != n:
        raise SpecError(f"'g' is {n}x{n} but dim is {dim}")
    parsed = []
    for i, row in enumerate(rows):
        prow = []
        for j, text in enumerate(row):
            if isinstance(text, (int, float)) and not isinstance(text, bool):
                text = repr(text)
            try:
                e = expr.parse(text)
            except expr.ExprError as exc:
                raise SpecError(f"g[{i + 1}][{j + 1}]: {exc}") from None
            if e.max_var > n:
                raise SpecError(f"g[{i + 1}][{j + 1}] uses x{e.max_var} but dim is {n}")
            prow.append(e)
        parsed.append(prow)

    def comps(y):
        return jnp.stack([jnp.stack([jnp.asarray(e.evaluate(y, jnp), dtype=jnp.float64)
                                     + 0.0 * y[0] for e in row]) for row in parsed])

    try:
        metric = cf.ChartMetric(n, comps, strategy="fd", name="custom")
    except ValueError as exc:
        raise SpecError(str(exc)) from None
    return [[e.text for e in row] for row in parsed], metric


def _check_symmetric(metric, exprs):
    n = metric.dim
    center = (np.zeros(n) if metric.box is None else metric.box.mean(axis=1))
    probes = [center, center + 0.1 * np.sin(np.arange(1, n + 1))]
    for y in probes:
        g = np.asarray(metric.components(jnp.asarray(y)))
        for i in range(n):
            for j in range(i + 1, n):
                if abs(g[i, j] - g[j, i]) > 1e-12 * (1 + abs(g[i, j])):
                    raise SpecError(f"g is not symmetric: g[{i + 1}][{j + 1}] = {exprs[i][j]!r} "
                                    f"vs g[{j + 1}][{i + 1}] = {exprs[j][i]!r}")


def _parse_points(spec, n):
    if isinstance(spec, list):
        spec = {"list": spec}
    if not isinstance(spec, dict):
        raise SpecError("'points' must be a list or an object")
    out = {}
    if "list" in spec:
        try:
            pts = np.asarray(spec["list"], dtype=float)
        except (TypeError, ValueError):
            raise SpecError("point list must contain numeric coordinates") from None
        if pts.ndim != 2 or pts.shape[1] != n:
            raise SpecError(f"each point needs {n} coordinates")
        out["list"] = pts
    if "grid" in spec:
        g = spec["grid"]
        if not isinstance(g, dict) or not ({"count", "per_axis"} & set(g)):
            raise SpecError("'grid' needs 'count' (diagonal) or 'per_axis' (tensor grid)")
        out["grid"] = g
    return out


def grid_points(box, n, grid: dict) -> np.ndarray:
    """Deterministic points in the middle half of the box."""
    if box is None:
        box = np.array([[-1.0, 1.0]] * n)
    center = box.mean(axis=1)
    half = 0.25 * (box[:, 1] - box[:, 0])
    lo, hi = center - half, center + half
    if "per_axis" in grid:
        k = int(grid["per_axis"])
        axes = [np.linspace(a, b, k) if k > 1 else np.array([c]) for a, b, c in zip(lo, hi, center)]
        return np.array(np.meshgrid(*axes, indexing="ij")).reshape(n, -1).T
    k = int(grid["count"])
    # diagonal with a per-axis phase so points stay off symmetry planes
    t = (np.arange(k) + 0.5) / k
    phase = np.linspace(0.0, 0.5, n)
    frac = (t[:, None] + phase[None, :]) % 1.0
    return lo + frac * (hi - lo)


def select_points(spec: MetricSpec, choice: str | None) -> np.ndarray:
    n = spec.dim
    if choice is None:
        if "list" in spec.points:
            return spec.points["list"]
        if "grid" in spec.points:
            return grid_points(spec.box, n, spec.points["grid"])
        return (np.zeros((1, n)) if spec.box is None else spec.box.mean(axis=1)[None])
    if choice == "list":
        if "list" not in spec.points:
            raise SpecError("--points list: the specification has no point list")
        return spec.points["list"]
    if choice == "grid":
        return grid_points(spec.box, n, spec.points.get("grid", {"count": 5}))
    if choice.startswith("grid:"):
        try:
            return grid_points(spec.box, n, {"count": int(choice[5:])})
        except ValueError:
            raise SpecError(f"bad grid size in {choice!r}") from None
    try:
        pts = np.asarray(json.loads(choice), dtype=float)
    except (json.JSONDecodeError, TypeError, ValueError):
        raise SpecError(f"--points must be grid, grid:N, list or a JSON list, got {choice!r}") from None
    pts = np.atleast_2d(pts)
    if pts.shape[1] != n:
        raise SpecError(f"each point needs {n} coordinates")
    return pts


def load_spec(path: str | None, catalog: str | None = None) -> MetricSpec:
    if catalog:
        return parse_metric_spec(json.dumps({"catalog": catalog}))
    if path is None:
        raise SpecError("--spec is required")
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}") from None
    return parse_metric_spec(text)


# --------------------------------------------------------------------------
# reports


def _num(v):
    if v is None:
        return None
    if isinstance(v, (tuple, list)):
        return [_num(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v) if np.isfinite(v) else None
    return v


def new_report(command: str, seed: int | None, spec: MetricSpec | None = None) -> dict:
    return {"schema_version": SCHEMA_VERSION, "tool": "weylscope", "version": __version__,
            "command": command, "seed": seed,
            "spec": None if spec is None else spec.describe(),
            "conventions": {"cotton_weyl_contract": cs.INDEX_CONTRACT},
            "points": [], "suites": [], "failures": [], "passed": True}


def finish(report: dict, started: float) -> dict:
    report["passed"] = not report["failures"]
    report["timing"] = {"seconds": round(time.perf_counter() - started, 6)}
    return report


def strip_timing(report: dict) -> dict:
    out = dict(report)
    out.pop("timing", None)
    for s in out.get("suites", []):
        s.pop("seconds", None)
    return out


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def to_csv(report: dict) -> str:
    buf = io.StringIO()
    if report["points"]:
        keys = sorted({k for p in report["points"] for k in p})
        writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        for p in report["points"]:
            writer.writerow({k: json.dumps(p.get(k)) if isinstance(p.get(k), (list, dict))
                             else p.get(k) for k in keys})
    else:
        keys = ["name", "passed", "count", "max_residual", "tolerance"]
        writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for s in report["suites"]:
            writer.writerow(s)
    return buf.getvalue()


def load_schema() -> dict:
    return json.loads(resources.files("weylscope").joinpath("schemas/report.schema.json").read_text())


# --------------------------------------------------------------------------
# commands


def cmd_analyze(spec: MetricSpec, points: np.ndarray, seed: int | None = None,
                tol: float | None = None) -> dict:
    started = time.perf_counter()
    report = new_report("analyze", seed, spec)
    fd_tol = cf.TOL_FD_HIGH
    solve_tol = tol if tol is not None else (
        cs.SOLVE_TOL if spec.metric.strategy == "analytic" else 1e-5)
    for x in points:
        d = cs.classify_point(spec.metric, x, tol=solve_tol)
        rec = {k: _num(v) for k, v in d.as_dict().items()}
        report["points"].append(rec)
        label = f"x={list(map(float, x))}"
        if d.cotton_identity_residual > fd_tol * (1 + d.cotton_norm):
            report["failures"].append(f"{label}: cotton identity {d.cotton_identity_residual:.3e}")
        if d.anomaly:
            report["failures"].append(f"{label}: closedness probe {d.dzeta_norm:.3e}")
        if d.dim == 4 and d.weyl_norm > cs.WEYL_TOL and d.obstruction_norm is not None:
            # |obstruction| = |W|^2 * solver residual, so the thresholds match exactly
            bound = solve_tol * (1 + d.cotton_norm) * d.weyl_norm ** 2
            agree = (d.status == "solved") == (d.obstruction_norm <= bound * (1 + 1e-9))
            if not agree:
                report["failures"].append(f"{label}: obstruction and solver disagree")
    return finish(report, started)


def cmd_spectrum(spec: MetricSpec, points: np.ndarray, seed: int | None = None,
                 tol: float | None = None) -> dict:
    if spec.dim != 4:
        raise SpecError("spectrum needs a four-dimensional metric")
    tol = tol or 1e-8
    started = time.perf_counter()
    report = new_report("spectrum", seed, spec)
    for x in points:
        b = cf.curvature_bundle(spec.metric, x, level=2)
        sp = fd.spectrum(b.W)
        plus, minus = fd.split_weyl(b.W)
        defects = sp.defects(b.W)
        worst = max(defects.values())
        report["points"].append({
            "point": _num(list(b.point)), "lambda_plus": _num(list(sp.lambda_plus)),
            "lambda_minus": _num(list(sp.lambda_minus)), "weyl_norm": tc.norm(b.W),
            "weyl_plus_norm": tc.norm(plus), "weyl_minus_norm": tc.norm(minus),
            "kernel_dims": list(fd.kernel_dims_pm(b.W)), "max_defect": worst})
        if worst > tol * (1 + tc.norm(b.W)):
            report["failures"].append(f"x={b.point.tolist()}: spectrum defect {worst:.3e}")
    return finish(report, started)


def cmd_verify_algebra(seed: int, count: int, dims=(4,)) -> dict:
    started = time.perf_counter()
    report = new_report("verify-algebra", seed)
    report["dims"] = list(dims)
    report["count"] = count
    for res in suites.run_algebra_suites(seed, count, dims):
        report["suites"].append(res.as_dict(timing=True))
        report["failures"].extend(f"{res.name}: {f}" for f in res.failures[:20])
    return finish(report, started)


def cmd_report(path: str) -> dict:
    """Validate a stored report against the schema and return it."""
    try:
        with open(path, encoding="utf-8") as fh:
            report = json.load(fh)
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SpecError(f"malformed report: {exc.msg}", exc.lineno, exc.colno) from None
    try:
        jsonschema.validate(report, load_schema())
    except jsonschema.ValidationError as exc:
        raise SpecError(f"report does not match schema: {exc.message}") from None
    return report


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="weylscope", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"weylscope {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, spec=True):
        if spec:
            sp.add_argument("--spec", help="metric specification JSON file")
            sp.add_argument("--catalog", help="builtin catalog key instead of --spec")
            sp.add_argument("--points", help="grid, grid:N, list, or a JSON list of points")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    common(sub.add_parser("analyze", help="pointwise curvature and C-space diagnostics"))
    common(sub.add_parser("spectrum", help="Weyl spectra of a 4D metric"))
    va = sub.add_parser("verify-algebra", help="seeded algebraic property suites")
    common(va, spec=False)
    va.add_argument("--count", type=int, default=100)
    va.add_argument("--dim", type=int, action="append", help="dimension (repeatable)")
    rp = sub.add_parser("report", help="validate and re-emit a stored report")
    rp.add_argument("path")
    rp.add_argument("--out")
    rp.add_argument("--format", choices=("json", "csv"), default="json")
    return p


def _seed(args) -> int:
    env = os.environ.get("WEYLSCOPE_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise SpecError(f"WEYLSCOPE_SEED must be an integer, got {env!r}") from None
    return getattr(args, "seed", 0)


def _emit(report: dict, args) -> None:
    text = to_csv(report) if args.format == "csv" else to_json(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "report":
            report = cmd_report(args.path)
        elif args.command == "verify-algebra":
            if args.count < 1:
                raise SpecError("--count must be positive")
            dims = tuple(args.dim or [4])
            for n in dims:
                if not 4 <= n <= tc.MAX_DIM:
                    raise SpecError(f"--dim must lie in [4, {tc.MAX_DIM}]")
            report = cmd_verify_algebra(_seed(args), args.count, dims)
        else:
            spec = load_spec(args.spec, args.catalog)
            points = select_points(spec, args.points)
            run = cmd_analyze if args.command == "analyze" else cmd_spectrum
            report = run(spec, points, _seed(args), args.tol)
        _emit(report, args)
    except (SpecError, expr.ExprError) as exc:
        print(f"weylscope: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:   # point outside the box, indefinite metric, ...
        print(f"weylscope: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"weylscope: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if not report.get("passed", True):
        for f in report.get("failures", []):
            print(f"FAIL {f}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
