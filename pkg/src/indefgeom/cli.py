"""Command-line front end.

Exit codes: 0 success, 1 predicate or verification failure, 2 input or
schema error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import numpy as np

from . import acceptance, exprlang, manifests, zoo
from . import diffeo as dm
from . import structure as st
from .curvature import (
    bochner_at,
    bundle_at,
    kaehler_defects_at,
    sectional_curvature,
)
from .errors import GeometryError, InputError, ManifestError, NumericalError
from .geometry import (
    ChartManifold,
    PlaneClass,
    aux_norm,
    classify_plane,
    is_holomorphic_plane,
    orthonormal_frame,
)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3

PREDICATES = ("einstein", "conf-flat", "const-curv", "const-hol", "quasi-const", "kn-star", "kaehler")
PREDICATE_TOL = {"kaehler": 1e-8}


class Outcome:
    """What a subcommand produced: a result payload and whether it passed."""

    def __init__(self, result: dict, passed: bool = True, table: Optional[list] = None):
        self.result = result
        self.passed = passed
        self.table = table


# ---------------------------------------------------------------------------
# Argument helpers
# ---------------------------------------------------------------------------


def parse_point(text: str, what: str = "point") -> list[float]:
    try:
        values = [float(v) for v in text.replace(" ", "").split(",") if v != ""]
    except ValueError:
        raise InputError(f"{what}: expected comma-separated decimals, got {text!r}") from None
    if not values or not all(math.isfinite(v) for v in values):
        raise InputError(f"{what}: expected finite comma-separated decimals, got {text!r}")
    return values


def _check_dim(p: Sequence[float], n: int, what: str = "point") -> np.ndarray:
    if len(p) != n:
        raise InputError(f"{what}: expected {n} coordinates, got {len(p)}")
    return np.asarray(p, dtype=float)


def read_points(path: str, n: int) -> list[np.ndarray]:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"--points: cannot read {path} ({exc.strerror})") from None
    pts = []
    for k, line in enumerate(lines, 1):
        line = line.strip()
        if line and not line.startswith("#"):
            pts.append(_check_dim(parse_point(line, f"--points line {k}"), n, f"--points line {k}"))
    if not pts:
        raise InputError(f"--points: no points in {path}")
    return pts


def gather_points(args, n: int, default_random: int = 0) -> list[np.ndarray]:
    pts = [_check_dim(parse_point(p), n) for p in (args.point or [])]
    if args.points:
        pts.extend(read_points(args.points, n))
    count = args.random
    if count is None:
        count = 0 if pts else default_random
    if count < 0:
        raise InputError("--random: must be a non-negative count")
    if count:
        rng = np.random.default_rng(args.seed)
        pts.extend(rng.uniform(-args.box, args.box, size=(count, n)))
    if not pts:
        raise InputError("no evaluation points: give -p, --points or --random")
    return pts


def _pmap(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _floats(v) -> list[float]:
    return [float(x) for x in np.asarray(v).ravel()]


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_report(args) -> Outcome:
    m = manifests.load_manifold(args.manifold)
    p = _check_dim(parse_point(args.point_single), m.dim)
    b = bundle_at(m, p)
    frame = orthonormal_frame(b.g)
    eig = np.linalg.eigvals(b.g_inv @ b.S)
    eig = sorted(eig, key=lambda z: (round(z.real, 12), round(z.imag, 12)))
    result: dict[str, Any] = {
        "manifold": m.name,
        "point": _floats(p),
        "dim": m.dim,
        "index": frame.index,
        "scalar_curvature": b.tau,
        "ricci_eigenvalues_real": [float(z.real) for z in eig],
        "ricci_eigenvalues_imag": [float(z.imag) for z in eig],
        "max_abs_riemann": aux_norm(b.R),
        "max_abs_ricci": aux_norm(b.S),
        "max_abs_nabla_riemann": aux_norm(b.nabla_R),
        "einstein_defect": st.einstein_defect(b),
        "symmetry_defect": max(b.symmetry_defects().values()),
        "second_bianchi_defect": b.second_bianchi_defect(),
    }
    if m.dim >= 4:
        result["conformally_flat_defect"] = st.conformally_flat_defect(b)
        result["constant_curvature"], result["constant_curvature_residual"] = st.constant_curvature_fit(b)
    if m.complex_structure is not None:
        J = m.J
        kd = kaehler_defects_at(b, J)
        result["kaehler_defects"] = kd
        if m.dim >= 4 and max(kd.values()) <= 1e-8 * (1.0 + aux_norm(b.g)):
            result["bochner_defect"] = aux_norm(bochner_at(b, J)) / (1.0 + aux_norm(b.R))
            result["constant_hol"], result["constant_hol_residual"] = st.constant_hol_curvature_fit(b, J)
    return Outcome(result)


def cmd_plane(args) -> Outcome:
    m = manifests.load_manifold(args.manifold)
    n = m.dim
    p = _check_dim(parse_point(args.point_single), n)
    x = _check_dim(parse_point(args.x, "--x"), n, "--x")
    y = _check_dim(parse_point(args.y, "--y"), n, "--y")
    b = bundle_at(m, p)
    cls = classify_plane(b.g, x, y)
    result: dict[str, Any] = {"point": _floats(p), "class": cls.value, "rank": cls.rank}
    result["sectional_curvature"] = sectional_curvature(b, x, y) if cls is PlaneClass.NONDEGENERATE else None
    if m.complex_structure is not None:
        result["holomorphic"] = is_holomorphic_plane(m.J, x, y)
    return Outcome(result)


def _predicate_row(which: str, m: ChartManifold, p: np.ndarray, tol: float, v) -> dict:
    b = bundle_at(m, p)
    row: dict[str, Any] = {"point": _floats(p)}
    if which == "einstein":
        row["defect"] = st.einstein_defect(b)
        row["pass"] = row["defect"] <= tol
    elif which == "conf-flat":
        row["defect"] = st.conformally_flat_defect(b)
        row["pass"] = row["defect"] <= tol
    elif which == "const-curv":
        row["c"], row["defect"] = st.constant_curvature_fit(b)
        row["pass"] = row["defect"] <= tol
    elif which == "const-hol":
        row["c"], row["defect"] = st.constant_hol_curvature_fit(b, m.J if m.complex_structure else None)
        row["pass"] = row["defect"] <= tol
    elif which == "quasi-const":
        fit = st.quasi_constant_fit(b, tol)
        row.update(fit.as_dict())
        row["defect"] = fit.residual if fit.status is st.QuasiConstantStatus.OK else fit.conformal_defect
        row["pass"] = fit.status is st.QuasiConstantStatus.OK and fit.residual <= tol
    elif which == "kn-star":
        fit = st.kn_star_classify(m, p, v, tol)
        row.update(fit.as_dict())
        row["defect"] = fit.residual
        row["pass"] = fit.kn_class in (st.KnStarClass.RECURRENT, st.KnStarClass.SYMMETRIC_WALKER)
    else:  # kaehler
        if m.complex_structure is None:
            raise InputError("complex_structure: the kaehler predicate needs a complex structure")
        d = kaehler_defects_at(b, m.J)
        row.update(d)
        row["defect"] = max(d.values())
        row["pass"] = row["defect"] <= tol
    return row


def cmd_predicate(args) -> Outcome:
    m = manifests.load_manifold(args.manifold)
    pts = gather_points(args, m.dim)
    tol = args.tol if args.tol is not None else PREDICATE_TOL.get(args.which, st.DEFAULT_TOL)
    v = exprlang.parse_expr(args.v, m.coords) if args.v else None
    rows = _pmap(lambda p: _predicate_row(args.which, m, p, tol, v), pts, args.threads)
    passed = all(r["pass"] for r in rows)
    result = {
        "manifold": m.name,
        "predicate": args.which,
        "tolerance": tol,
        "verdict": "pass" if passed else "fail",
        "max_defect": max(_nan_as_inf(r["defect"]) for r in rows),
        "points": rows,
    }
    cols = ["point", "defect", "pass"] + [k for k in ("c", "status", "class", "H", "N") if k in rows[0]]
    return Outcome(result, passed, [{k: r.get(k) for k in cols} for r in rows])


def _nan_as_inf(x: float) -> float:
    return math.inf if x is None or math.isnan(x) else x


def cmd_preserve(args) -> Outcome:
    f = manifests.load_diffeo(args.map)
    pts = gather_points(args, f.source.dim, default_random=4)
    if args.samples <= 0:
        raise InputError("--samples: must be positive")
    rng = np.random.default_rng(args.seed)
    rep = dm.preservation_defect(f, args.mode.replace("-", "_"), rng, args.samples, pts)
    result = {"map": f.name, **rep.as_dict(), "points": [_floats(p) for p in pts]}
    return Outcome(result)


def cmd_limit(args) -> Outcome:
    f = manifests.load_diffeo(args.map)
    p = _check_dim(parse_point(args.point_single), f.source.dim)
    rng = np.random.default_rng(args.seed)
    rep = dm.limit_ratio(f, args.mode.replace("-", "_"), p, rng)
    result = {"map": f.name, **rep.as_dict()}
    table = [{"t": t, "ratio": r, "richardson": e} for t, r, e in zip(rep.t, rep.ratios, [None] + rep.extrapolants)]
    return Outcome(result, True, table)


def cmd_theorem1(args) -> Outcome:
    m = manifests.load_manifold(args.manifold)
    p = _check_dim(parse_point(args.point_single), m.dim)
    sigma = exprlang.parse_expr(args.sigma, m.coords)
    rep = dm.theorem1_identities_defect(m, sigma, p)
    result = {"manifold": m.name, "point": _floats(p), "sigma_expr": exprlang.render(sigma), **rep.as_dict()}
    return Outcome(result)


def _parse_params(items: Optional[Sequence[str]]) -> dict:
    params = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"--param: expected key=value, got {item!r}")
        try:
            params[key] = json.loads(value)
        except json.JSONDecodeError:
            params[key] = value
    return params


def cmd_zoo(args) -> Outcome:
    if args.zoo_cmd == "list":
        models = zoo.list_models()
        table = [{"id": d["id"], "kind": d["kind"], "description": d["description"]} for d in models]
        return Outcome({"models": models}, True, table)
    obj = zoo.instantiate_model(args.id, **_parse_params(args.param))
    doc = manifests.to_doc(obj)
    text = json.dumps(doc, indent=2) + "\n"
    if args.output:
        try:
            Path(args.output).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise InputError(f"-o: cannot write {args.output} ({exc.strerror})") from None
        return Outcome({"id": args.id, "written": args.output})
    return Outcome({"id": args.id, "manifest": doc})


def cmd_verify(args) -> Outcome:
    names = list(acceptance.SUITES) if args.suite == "all" else [args.suite]
    for name in names:
        if name not in acceptance.SUITES:
            raise InputError(f"--suite: unknown suite {name!r} (choose from all, {', '.join(acceptance.SUITES)})")
    results = _pmap(lambda nm: acceptance.SUITES[nm](args.seed), names, args.threads)
    passed = all(r.passed for r in results)
    result = {
        "seed": args.seed,
        "passed": passed,
        "suites_run": len(results),
        "suites_passed": sum(r.passed for r in results),
        "suites": [r.as_dict() for r in results],
    }
    table = [{"suite": r.name, "result": "PASS" if r.passed else "FAIL", "description": r.description} for r in results]
    return Outcome(result, passed, table)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a single JSON object")
    common.add_argument("--threads", type=int, default=1, help="cap on worker threads (default 1)")

    pts = argparse.ArgumentParser(add_help=False)
    pts.add_argument("-p", "--point", action="append", help="evaluation point 'v1,...,vn' (repeatable)")
    pts.add_argument("--points", help="file with one point per line")
    pts.add_argument("--random", type=int, default=None, help="number of uniform random points")
    pts.add_argument("--box", type=float, default=0.5, help="random points are drawn from [-box, box]^n")
    pts.add_argument("--seed", type=int, default=0)

    parser = argparse.ArgumentParser(prog="indefgeom", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("report", parents=[common], help="curvature summary at a point")
    p.add_argument("-m", "--manifold", required=True)
    p.add_argument("-p", "--point", dest="point_single", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("plane", parents=[common], help="classify a plane and give its sectional curvature")
    p.add_argument("-m", "--manifold", required=True)
    p.add_argument("-p", "--point", dest="point_single", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.set_defaults(func=cmd_plane)

    p = sub.add_parser("predicate", parents=[common, pts], help="structural predicate at several points")
    p.add_argument("-m", "--manifold", required=True)
    p.add_argument("--which", required=True, choices=PREDICATES)
    p.add_argument("--tol", type=float, default=None,
                   help="relative tolerance (default 1e-6; 1e-8 for kaehler)")
    p.add_argument("--v", help="recurrence function for kn-star (overrides the manifest)")
    p.set_defaults(func=cmd_predicate)

    p = sub.add_parser("preserve", parents=[common, pts], help="curvature preservation defect of a map")
    p.add_argument("-f", "--map", required=True)
    p.add_argument("--mode", required=True, choices=("sectional", "ricci-unit"))
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_preserve)

    p = sub.add_parser("limit", parents=[common], help="ratio limit along an isotropic approach")
    p.add_argument("-f", "--map", required=True)
    p.add_argument("--mode", required=True, choices=("plane-weak", "plane-strong", "ricci", "holo"))
    p.add_argument("-p", "--point", dest="point_single", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("theorem1", parents=[common], help="conformal Ricci/curvature identity defects")
    p.add_argument("-m", "--manifold", required=True)
    p.add_argument("--sigma", required=True)
    p.add_argument("-p", "--point", dest="point_single", required=True)
    p.set_defaults(func=cmd_theorem1)

    p = sub.add_parser("zoo", help="list or emit built-in models")
    zsub = p.add_subparsers(dest="zoo_cmd", required=True)
    zsub.add_parser("list", parents=[common])
    e = zsub.add_parser("emit", parents=[common])
    e.add_argument("id")
    e.add_argument("-o", "--output")
    e.add_argument("--param", action="append", help="builder parameter key=value (JSON value)")
    p.set_defaults(func=cmd_zoo)

    p = sub.add_parser("verify", parents=[common], help="run the acceptance suites")
    p.add_argument("--suite", default="all")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def _fmt_cell(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return f"{v:.10g}"
    if isinstance(v, (list, tuple)):
        return "(" + ", ".join(_fmt_cell(x) for x in v) + ")"
    if isinstance(v, dict):
        return ", ".join(f"{k}={_fmt_cell(x)}" for k, x in v.items())
    return "-" if v is None else str(v)


def render_table(rows: list[dict]) -> str:
    cols = list(rows[0])
    cells = [[_fmt_cell(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[k]) for row in cells)) for k, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines)


def render_mapping(d: dict) -> str:
    scalars = {k: v for k, v in d.items() if not (isinstance(v, list) and v and isinstance(v[0], dict))}
    width = max((len(k) for k in scalars), default=0)
    return "\n".join(f"{k.ljust(width)}  {_fmt_cell(v)}" for k, v in scalars.items())


def emit(command: str, status: str, result: Optional[dict], error: Optional[dict], as_json: bool,
         table: Optional[list], out) -> None:
    if as_json:
        doc = {"schema_version": SCHEMA_VERSION, "command": command, "status": status, "result": _jsonable(result)}
        if error is not None:
            doc["error"] = error
        out.write(json.dumps(doc, indent=2, allow_nan=False) + "\n")
        return
    if error is not None:
        sys.stderr.write(f"error: {error['message']}\n")
        return
    text = render_mapping(result)
    if table:
        text = (text + "\n\n" if text else "") + render_table(table)
    if status == "fail":
        text += "\n\nFAIL"
    out.write(text + "\n")


def run_cli(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command + (f" {args.zoo_cmd}" if args.command == "zoo" else "")
    as_json = getattr(args, "json", False)
    try:
        if args.threads < 1:
            raise InputError("--threads: must be at least 1")
        with np.errstate(all="ignore"):
            outcome = args.func(args)
    except InputError as exc:
        err = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ManifestError):
            err["field"] = exc.field
        emit(command, "input_error", None, err, as_json, None, out)
        return EXIT_INPUT
    except (NumericalError, GeometryError, ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
        emit(command, "numerical_error", None, {"type": type(exc).__name__, "message": str(exc)}, as_json, None, out)
        return EXIT_NUMERICAL
    status = "ok" if outcome.passed else "fail"
    if args.command == "zoo" and args.zoo_cmd == "emit" and not args.output and not as_json:
        out.write(json.dumps(outcome.result["manifest"], indent=2) + "\n")
        return EXIT_OK
    emit(command, status, outcome.result, None, as_json, outcome.table, out)
    return EXIT_OK if outcome.passed else EXIT_FAIL


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
