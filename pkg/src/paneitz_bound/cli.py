"""Command-line front end.

Exit codes: 0 success, 1 inequality violated, 2 usage error, 3 numerical
failure (enumeration certificate or centering convergence).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import conformal
from .bounds import ProbeWarning, verify_theorem
from .models import FlatTorus, GeodesicSphere, ProductSphere
from .paneitz import coefficients
from .spectrum import DEFAULT_MODE_BUDGET, CertificateError, model_spectrum, second_eigenvalue

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3
COMMANDS = ("coeffs", "spectrum", "verify", "sweep", "center", "conformal-check")
FORMATS = ("json", "csv", "text")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    model: dict = field(default_factory=dict)
    format: str = "json"
    seed: int = 0
    thread_count: int | None = None
    count: int = 2
    distinct: bool = False
    mode_budget: int = DEFAULT_MODE_BUDGET
    extrapolated: bool = False
    grids: dict = field(default_factory=dict)
    samples: int = 0
    tol: float = 1e-10
    max_iter: int = 200
    points_file: str | None = None
    cloud_size: int = 1000
    cloud_dim: int = 10
    p_norm: float = 0.3
    grid: list | None = None
    export_u: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}; choose from {', '.join(COMMANDS)}")
        if self.format not in FORMATS:
            raise UsageError(f"unknown format {self.format!r}")
        if self.count < 1:
            raise UsageError("count must be positive")
        if self.thread_count is not None and self.thread_count < 1:
            raise UsageError("thread count must be positive")

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


# ---------------------------------------------------------------------------
# model descriptors and grids


def build_model(desc: dict):
    """Validate a model descriptor and construct the model."""
    desc = dict(desc)
    kind = desc.pop("kind", None)
    try:
        if kind == "sphere":
            n = int(desc["n"])
            return GeodesicSphere(n, int(desc.get("p", 1)), int(desc.get("c", 0)), float(desc.get("r", 1.0)))
        if kind == "product":
            a = int(desc["a"])
            b = int(desc["b"]) if "b" in desc and desc["b"] is not None else int(desc["n"]) - a
            if "r1" in desc and desc["r1"] is not None:
                return ProductSphere.from_r1(a, b, float(desc["r1"]))
            return ProductSphere.minimal(a, b)
        if kind == "torus":
            radii = desc.get("radii")
            if radii:
                return FlatTorus.normalized(radii)
            return FlatTorus.equal(int(desc["n"]))
    except KeyError as exc:
        raise UsageError(f"model {kind!r} needs parameter {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid {kind} model: {exc}") from None
    raise UsageError(f"unknown model kind {kind!r}; choose sphere, product or torus")


def parse_float_grid(spec: str) -> list[float]:
    """'start:end:count' -> count evenly spaced values, endpoints included."""
    try:
        start, end, count = spec.split(":")
        start, end, count = float(start), float(end), int(count)
    except ValueError:
        raise UsageError(f"grid {spec!r} is not start:end:count") from None
    if count < 2 or not end > start:
        raise UsageError(f"grid {spec!r} is empty (need count >= 2 and end > start)")
    return [float(x) for x in np.linspace(start, end, count)]


def parse_int_grid(spec: str) -> list[int]:
    """'start:end' inclusive, or 'start:end:count' with integer spacing."""
    parts = spec.split(":")
    try:
        if len(parts) == 2:
            start, end = int(parts[0]), int(parts[1])
            values = list(range(start, end + 1))
        elif len(parts) == 3:
            values = sorted({int(round(x)) for x in parse_float_grid(spec)})
        else:
            raise ValueError
    except ValueError:
        raise UsageError(f"integer grid {spec!r} is not start:end") from None
    if len(values) < 2:
        raise UsageError(f"integer grid {spec!r} is empty (need at least 2 values)")
    return values


def thread_count(cfg: RunConfig) -> int:
    if cfg.thread_count is not None:
        return cfg.thread_count
    env = os.environ.get("PANEITZ_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"PANEITZ_THREADS={env!r} is not an integer") from None
        if value < 1:
            raise UsageError("PANEITZ_THREADS must be positive")
        return value
    return 1


# ---------------------------------------------------------------------------
# output


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    if x is None:
        return ""
    if isinstance(x, (list, tuple)):
        return ";".join(fmt(v) for v in x)
    return str(x)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def dump_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def dump_text(obj: dict) -> str:
    width = max(len(k) for k in obj)
    return "".join(f"{k:<{width}}  {fmt(v) if not isinstance(v, dict) else json.dumps(v)}\n" for k, v in obj.items())


def emit(cfg: RunConfig, obj: dict, rows=None, columns=None) -> str:
    if cfg.format == "json":
        return dump_json(obj)
    if cfg.format == "csv":
        if rows is None:
            flat = {k: v for k, v in obj.items() if not isinstance(v, (dict, list))}
            rows, columns = [flat], list(flat)
        return dump_csv(rows, columns)
    return dump_text({k: v for k, v in obj.items() if not isinstance(v, list)})


# ---------------------------------------------------------------------------
# commands


def cmd_coeffs(cfg: RunConfig):
    n = cfg.model.get("n")
    if n is None:
        raise UsageError("coeffs needs --n")
    try:
        co = coefficients(int(n), extrapolated=cfg.extrapolated)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    obj = {"schema": "coeffs.v1", **co.as_dict()}
    return emit(cfg, obj), EXIT_OK


def cmd_spectrum(cfg: RunConfig):
    model = build_model(cfg.model)
    slices, cert, _, q = model_spectrum(model, cfg.count, cfg.mode_budget, extrapolated=model.n < 5)
    obj = {
        "schema": "spectrum.v1",
        "model": model.describe(),
        "q": q.q,
        "slices": [s.as_dict() for s in slices],
        "certificate": cert.as_dict(),
        "lambda2": second_eigenvalue(slices, distinct=cfg.distinct) if sum(s.multiplicity for s in slices) >= 2 else None,
    }
    rows = [{"value": s.value, "multiplicity": s.multiplicity} for s in slices]
    if cfg.format == "text":
        text = "".join(f"{s.value!r}  x{s.multiplicity}\n" for s in slices)
        return text, EXIT_OK
    return emit(cfg, obj, rows, ["value", "multiplicity"]), EXIT_OK


def report_dict(model, report) -> dict:
    return {"schema": "bound_report.v1", "model": model.describe(), **report.as_dict(), "verdict": report.verdict}


def cmd_verify(cfg: RunConfig):
    model = build_model(cfg.model)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ProbeWarning)
        report = verify_theorem(model, cfg.mode_budget, distinct=cfg.distinct)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return emit(cfg, report_dict(model, report)), EXIT_VIOLATION if report.violated else EXIT_OK


SWEEP_RESULT_COLUMNS = ["lambda1", "lambda2", "rhs_theorem", "rhs_corollary", "slack", "equality", "verdict", "status"]
SWEEP_PARAM_COLUMNS = {
    "sphere": ["model", "n", "p", "c", "r"],
    "product": ["model", "n", "a", "b", "r1", "r2"],
    "torus": ["model", "n", "radii"],
}


def sweep_descriptors(cfg: RunConfig) -> list[dict]:
    base = dict(cfg.model)
    kind = base.get("kind")
    grids = cfg.grids
    if kind == "sphere":
        ns = parse_int_grid(grids["n"]) if "n" in grids else [base.get("n")]
        rs = parse_float_grid(grids["r"]) if "r" in grids else [base.get("r", 1.0)]
        cs = [int(c) for c in grids["c"].split(",")] if "c" in grids else [base.get("c", 0)]
        return [{**base, "n": n, "c": c, "r": r} for n in ns for c in cs for r in rs]
    if kind == "product":
        ns = parse_int_grid(grids["n"]) if "n" in grids else [base.get("n")]
        r1s = parse_float_grid(grids["r1"]) if "r1" in grids else [base.get("r1")]
        a_values = parse_int_grid(grids["a"]) if "a" in grids else [base.get("a")]
        out = []
        for n in ns:
            for a in a_values:
                if a is None or n is None:
                    raise UsageError("product sweeps need --n and --a")
                for r1 in r1s:
                    out.append({"kind": "product", "n": n, "a": a, "b": n - a, "r1": r1})
        return out
    if kind == "torus":
        ns = parse_int_grid(grids["n"]) if "n" in grids else [base.get("n")]
        if cfg.samples < 1:
            raise UsageError("torus sweeps need --samples >= 1")
        rng = np.random.default_rng(cfg.seed)
        out = []
        for n in ns:
            for _ in range(cfg.samples):
                out.append({"kind": "torus", "n": n, "radii": rng.uniform(0.2, 1.0, int(n)).tolist()})
        return out
    raise UsageError(f"unknown model kind {kind!r}")


def sweep_row(desc: dict, mode_budget: int) -> dict:
    row = {}
    try:
        model = build_model(desc)
    except UsageError as exc:
        params = {k: v for k, v in desc.items() if k != "kind"}
        return {"model": desc.get("kind"), **params, "status": f"invalid: {exc}", "verdict": "error"}
    row.update(model.describe())
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ProbeWarning)
            rep = verify_theorem(model, mode_budget)
    except CertificateError as exc:
        row.update(status=f"certificate: {exc}", verdict="error")
        return row
    row.update(
        lambda1=rep.lambda1,
        lambda2=rep.lambda2,
        rhs_theorem=rep.rhs_theorem,
        rhs_corollary=rep.rhs_corollary,
        slack=rep.slack_theorem,
        equality=rep.equality,
        verdict=rep.verdict,
        status="ok",
    )
    return row


def cmd_sweep(cfg: RunConfig):
    descriptors = sweep_descriptors(cfg)
    kind = cfg.model.get("kind")
    with ThreadPoolExecutor(max_workers=thread_count(cfg)) as pool:
        rows = list(pool.map(lambda d: sweep_row(d, cfg.mode_budget), descriptors))
    columns = SWEEP_PARAM_COLUMNS[kind] + SWEEP_RESULT_COLUMNS
    if any(r.get("verdict") == "violation" for r in rows):
        code = EXIT_VIOLATION
    elif any(r.get("status") != "ok" for r in rows):
        code = EXIT_NUMERICAL
    else:
        code = EXIT_OK
    if cfg.format == "json":
        return dump_json({"schema": "sweep.v1", "columns": columns, "rows": rows}), code
    if cfg.format == "text":
        return dump_csv(rows, columns).replace(",", "\t"), code
    return dump_csv(rows, columns), code


def load_point_cloud(path: str):
    try:
        with open(path) as fh:
            data = json.load(fh)
        points = np.array([item["point"] for item in data], dtype=float)
        weights = np.array([item["weight"] for item in data], dtype=float)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"cannot read point cloud {path!r}: {exc}") from None
    return points, weights


def cmd_center(cfg: RunConfig):
    if cfg.points_file:
        points, weights = load_point_cloud(cfg.points_file)
    else:
        rng = np.random.default_rng(cfg.seed)
        points = rng.normal(size=(cfg.cloud_size, cfg.cloud_dim))
        points /= np.linalg.norm(points, axis=1)[:, None]
        weights = rng.uniform(0.1, 2.0, cfg.cloud_size)
    try:
        result = conformal.center_measure(points, weights, tol=cfg.tol, max_iter=cfg.max_iter)
        code = EXIT_OK
    except conformal.CenteringError as exc:
        result, code = exc.result, EXIT_NUMERICAL
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    obj = {"schema": "centering.v1", "points": int(points.shape[0]), "dim": int(points.shape[1]), **result.as_dict()}
    return emit(cfg, obj), code


def cmd_conformal_check(cfg: RunConfig):
    model = build_model({"kind": "torus", **cfg.model}) if cfg.model.get("kind") in (None, "torus") else None
    if model is None:
        raise UsageError("conformal-check runs on flat tori only")
    if model.n < 7:
        raise UsageError("conformal-check needs n >= 7")
    if not 0 <= cfg.p_norm < 1:
        raise UsageError("--p-norm must lie in [0, 1)")
    grid = tuple(cfg.grid) if cfg.grid else (24,) + (8,) * (model.n - 1)
    if len(grid) != model.n:
        raise UsageError(f"--grid needs {model.n} sizes")
    p = conformal.axis_parameter(model, cfg.p_norm)
    try:
        X = conformal.torus_immersion(model, grid, p)
        defect, u = conformal.conformality_defect(X)
        del X
        ibp = conformal.ibp_identity_check(u)
        lemma = conformal._lemma24_from_u(model, u, p)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return "", EXIT_NUMERICAL
    if cfg.export_u:
        u.to_csv(cfg.export_u)
    obj = {
        "schema": "conformal_check.v1",
        "model": model.describe(),
        "grid": list(grid),
        "p_norm": cfg.p_norm,
        "conformality_defect": defect,
        "ibp_residual": ibp,
        **{k: v for k, v in lemma.as_dict().items() if k not in ("n", "p_norm")},
    }
    return emit(cfg, obj), EXIT_OK if lemma.ok else EXIT_VIOLATION


HANDLERS = {
    "coeffs": cmd_coeffs,
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "center": cmd_center,
    "conformal-check": cmd_conformal_check,
}


def run(cfg: RunConfig) -> tuple[str, int]:
    """Execute a configuration; returns (serialized output, exit status)."""
    try:
        return HANDLERS[cfg.command](cfg)
    except CertificateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return "", EXIT_NUMERICAL
    except UsageError:
        raise
    except ValueError as exc:
        # invalid parameter combinations surface as ValueError from the core
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=FORMATS, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None, dest="thread_count")
    p.add_argument("--mode-budget", type=int, default=None)
    p.add_argument("--config", default=None, help="JSON RunConfig file; flags override its values")


def _add_model(p: argparse.ArgumentParser, require_kind=False):
    p.add_argument("--model", choices=("sphere", "product", "torus"), required=require_kind)
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=int, help="codimension of a geodesic sphere")
    p.add_argument("--c", type=int, choices=(-1, 0, 1))
    p.add_argument("--r", type=float)
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--r1", type=float)
    p.add_argument("--radii", type=str, help="comma-separated circle radii, rescaled to sum r_i^2 = 1")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paneitz-bound", description="Paneitz second-eigenvalue bound verifier")
    parser.add_argument("--config", dest="root_config", default=None, help="JSON RunConfig file")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("coeffs", help="Paneitz coefficients a_n, b_n, c_n, d_n")
    _add_common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--extrapolated", action="store_true", help="allow n = 3, 4")

    p = sub.add_parser("spectrum", help="certified low Paneitz spectrum of a model")
    _add_common(p)
    _add_model(p)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--distinct", action="store_true", default=None)

    p = sub.add_parser("verify", help="both sides of the bound for one model")
    _add_common(p)
    _add_model(p)
    p.add_argument("--distinct", action="store_true", default=None)

    p = sub.add_parser("sweep", help="bound check over a parameter grid (CSV rows)")
    _add_common(p)
    _add_model(p)
    p.add_argument("--n-grid")
    p.add_argument("--r-grid")
    p.add_argument("--r1-grid")
    p.add_argument("--a-grid")
    p.add_argument("--c-grid", help="comma-separated ambient curvatures")
    p.add_argument("--samples", type=int, default=None, help="random tori per n")

    p = sub.add_parser("center", help="Moebius centering of a weighted point cloud")
    _add_common(p)
    p.add_argument("--points", dest="points_file")
    p.add_argument("--size", type=int, dest="cloud_size")
    p.add_argument("--dim", type=int, dest="cloud_dim")
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", type=int)

    p = sub.add_parser("conformal-check", help="grid checks of the conformal identities on a flat torus")
    _add_common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--radii", type=str)
    p.add_argument("--p-norm", type=float)
    p.add_argument("--grid", type=str, help="comma-separated grid sizes per circle")
    p.add_argument("--export-u", type=str)
    return parser


MODEL_KEYS = ("n", "p", "c", "r", "a", "b", "r1", "radii")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    path = getattr(ns, "config", None) or getattr(ns, "root_config", None)
    data = {}
    if path:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path!r}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
    if ns.command:
        if data.get("command", ns.command) != ns.command:
            raise UsageError(f"config command {data['command']!r} conflicts with {ns.command!r}")
        data["command"] = ns.command
    if "command" not in data:
        raise UsageError("no command given")

    model = dict(data.get("model", {}))
    if getattr(ns, "model", None):
        model["kind"] = ns.model
    for key in MODEL_KEYS:
        value = getattr(ns, key, None)
        if value is not None:
            if key == "radii":
                try:
                    value = [float(x) for x in value.split(",")]
                except ValueError:
                    raise UsageError("--radii must be comma-separated numbers") from None
            model[key] = value
    data["model"] = model

    grids = dict(data.get("grids", {}))
    for key in ("n", "r", "r1", "a", "c"):
        value = getattr(ns, f"{key}_grid", None)
        if value is not None:
            grids[key] = value
    data["grids"] = grids

    for key in ("format", "seed", "thread_count", "mode_budget", "count", "distinct", "samples", "tol",
                "max_iter", "points_file", "cloud_size", "cloud_dim", "p_norm", "export_u"):
        value = getattr(ns, key, None)
        if value is not None:
            data[key] = value
    if getattr(ns, "extrapolated", False):
        data["extrapolated"] = True
    grid = getattr(ns, "grid", None)
    if grid is not None:
        try:
            data["grid"] = [int(x) for x in grid.split(",")]
        except ValueError:
            raise UsageError("--grid must be comma-separated integers") from None
    return RunConfig.from_json(data)


def main(argv=None) -> int:
    parser = make_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = config_from_args(ns)
        out, code = run(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TypeError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
