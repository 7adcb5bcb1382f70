"""Command-line front end: ``polarity-kit <command> ...``.

Exit codes: 0 success, 1 a check failed, 2 bad input (parse errors, unknown
names, dimension mismatches).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from importlib import resources

from . import __version__
from .approx import best_convex_minorant, best_homogeneous_convex_minorant, linear_minorant_sup_oracle
from .bipolar_lattice import iso_phi, lattice_isomorphism_check
from .descriptors import (
    DescriptorError,
    body_to_json,
    format_value,
    load_json,
    loads,
    parse_body,
    parse_function,
    parse_grid,
    parse_scenario,
)
from .funcrep import FuncRep, Grid, Sampled, sample
from .geometry import NotBipolarError, polar_set, set_join, set_meet
from .subdiff import lower_polar_subdiff, middle_polar_subdiff, upper_polar_subdiff
from .suites import run_scenario
from .transforms import (
    NegativeValueError,
    UnsupportedFunction,
    bipolar_transform,
    fenchel_conjugate_exact,
    fenchel_conjugate_grid,
    polar_exact,
    polar_general_inf_grid,
    polar_nonneg_sup,
)

log = logging.getLogger("polarity_kit")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _setup_logging():
    level = os.environ.get("POLARITY_KIT_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------


def bundled_scenarios() -> list[str]:
    root = resources.files("polarity_kit") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_scenario(ref: str, exact: bool = True):
    """A path to a scenario file, or the name of a bundled scenario."""
    if os.path.exists(ref):
        return parse_scenario(load_json(ref), exact, label=os.path.basename(ref))
    root = resources.files("polarity_kit") / "scenarios"
    res = root / f"{ref}.json"
    if res.is_file():
        return parse_scenario(loads(res.read_text(encoding="utf-8"), ref), exact, label=ref)
    names = ", ".join(bundled_scenarios())
    raise InputError(f"no scenario file or bundled scenario named {ref!r} (bundled: {names})")


def _load(path, kind, exact):
    d = load_json(path)
    label = os.path.basename(path)
    parser = {"body": parse_body, "grid": parse_grid, "function": parse_function}[kind]
    return parser(d, label, exact)


def _point(text, dim, exact):
    from ._linalg import to_fraction
    try:
        parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
        x = tuple(to_fraction(p.strip()) for p in parts)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"cannot read the point {text!r}; write it as 1/2,0") from None
    if len(x) != dim:
        raise InputError(f"point {text!r} has {len(x)} coordinates, the function has {dim}")
    return x if exact else tuple(float(c) for c in x)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _emit(obj, fmt, out, rows_fn=None):
    if fmt == "json" or rows_fn is None:
        out.write(json.dumps(obj, indent=2) + "\n")
        return
    w = csv.writer(out, lineterminator="\n")
    for row in rows_fn(obj):
        w.writerow(row)


def _samples_json(s: Sampled, label):
    return {"function": label, "grid": s.grid.to_json(),
            "nodes": [[format_value(c) for c in x] for x in s.grid.nodes],
            "values": [format_value(v) for v in s.values]}


def _samples_rows(obj):
    dim = len(obj["nodes"][0]) if obj["nodes"] else 0
    yield [f"x{i + 1}" for i in range(dim)] + ["value"]
    for x, v in zip(obj["nodes"], obj["values"]):
        yield list(x) + [v]


def _check_dims(f: FuncRep, grid: Grid, what="grid"):
    if f.dim != grid.dim:
        raise InputError(f"dimension mismatch: function has dim {f.dim}, {what} has dim {grid.dim}")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_polar(args, out):
    exact = args.exact
    if args.body:
        body = _load(args.body, "body", exact)
        P = polar_set(body)
        obj = {"polar": body_to_json(P)}
        _emit(obj, args.format, out, _body_rows)
        return EXIT_OK
    if not args.func or not args.dual_grid:
        raise InputError("polar needs --body, or --func with --dual-grid")
    f = _load(args.func, "function", exact)
    dual = _load(args.dual_grid, "grid", exact)
    _check_dims(f, dual, "dual grid")
    if args.primal_grid:
        primal = _load(args.primal_grid, "grid", exact)
        _check_dims(f, primal, "primal grid")
        s = sample(f, primal)
        try:
            fo = polar_nonneg_sup(s, dual)
        except NegativeValueError:
            fo = polar_general_inf_grid(s, dual)
    else:
        try:
            fo = sample(polar_exact(f).func, dual)
        except UnsupportedFunction:
            log.info("no exact polar for %r; sampling on the dual grid", f)
            s = sample(f, dual)
            try:
                fo = polar_nonneg_sup(s, dual)
            except NegativeValueError:
                fo = polar_general_inf_grid(s, dual)
    _emit(_samples_json(fo, "polar"), args.format, out, _samples_rows)
    return EXIT_OK


def _body_rows(obj):
    b = obj["polar"]
    yield ["kind"] + [f"c{i + 1}" for i in range(b["dim"])] + ["rhs"]
    for p in b["points"]:
        yield ["point"] + list(p) + [""]
    for r in b["rays"]:
        yield ["ray"] + list(r) + [""]
    for h in b["halfspaces"]:
        yield ["halfspace"] + list(h)


def cmd_conjugate(args, out):
    exact = args.exact
    f = _load(args.func, "function", exact)
    dual = _load(args.dual_grid, "grid", exact)
    _check_dims(f, dual, "dual grid")
    if args.primal_grid:
        primal = _load(args.primal_grid, "grid", exact)
        _check_dims(f, primal, "primal grid")
        fs = fenchel_conjugate_grid(sample(f, primal), dual)
    else:
        try:
            fs = sample(fenchel_conjugate_exact(f), dual)
        except UnsupportedFunction:
            raise InputError("no exact conjugate for this function; pass --primal-grid") from None
    _emit(_samples_json(fs, "conjugate"), args.format, out, _samples_rows)
    return EXIT_OK


def cmd_verify(args, out):
    sc = load_scenario(args.scenario, args.exact)
    rep = run_scenario(sc, seed=args.seed, tolerance=args.tolerance, exact=args.exact)
    text = rep.dumps(scenario=sc.id, seed=args.seed if args.seed is not None else sc.seed)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["equation", "instance", "max_discrepancy", "tolerance", "pass"])
        for c in rep.sorted_checks():
            j = c.to_json()
            w.writerow([j["equation"], j["instance"], j["max_discrepancy"], j["tolerance"], j["pass"]])
    elif not args.output:
        out.write(text)
    if rep.passed:
        return EXIT_OK
    for c in rep.sorted_checks():
        if not c.passed:
            j = c.to_json()
            print(f"FAIL {c.equation} [{c.instance}] discrepancy {j['max_discrepancy']} "
                  f"> tolerance {j['tolerance']}" + (f" ({c.detail})" if c.detail else ""),
                  file=sys.stderr)
    return EXIT_FAIL


def cmd_lattice(args, out):
    P = _load(args.P, "body", args.exact)
    Q = _load(args.Q, "body", args.exact)
    meet, join = set_meet(P, Q), set_join(P, Q)
    rep = lattice_isomorphism_check(P, Q, instance="P,Q")
    obj = {"meet": body_to_json(meet), "join": body_to_json(join),
           "phi_meet": body_to_json(iso_phi(meet.canonical()).D),
           "checks": rep.to_json()["checks"], "pass": rep.passed}
    out.write(json.dumps(obj, indent=2) + "\n")
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_subdiff(args, out):
    exact = args.exact
    f = _load(args.func, "function", exact)
    primal = _load(args.primal_grid, "grid", exact)
    dual = _load(args.dual_grid, "grid", exact) if args.dual_grid else primal
    _check_dims(f, primal, "primal grid")
    _check_dims(f, dual, "dual grid")
    x = _point(args.x, f.dim, primal.exact)
    s = sample(f, primal)
    if primal.index(x) is None:
        raise InputError(f"{args.x} is not a node of the primal grid")
    try:
        fo = polar_nonneg_sup(s, dual)
    except NegativeValueError:
        raise InputError("polar subdifferentials need f >= 0") from None
    kinds = ["lower", "upper", "middle"] if args.kind == "all" else [args.kind]
    fns = {"lower": lower_polar_subdiff, "upper": upper_polar_subdiff,
           "middle": middle_polar_subdiff}
    obj = {"x": [format_value(c) for c in x]}
    for k in kinds:
        r = fns[k](s, x, dual, fo=fo)
        obj[k] = [[format_value(c) for c in y] for y in dual.nodes if y in r.members]
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["kind"] + [f"y{i + 1}" for i in range(dual.dim)])
        for k in kinds:
            for y in obj[k]:
                w.writerow([k] + y)
    else:
        out.write(json.dumps(obj, indent=2) + "\n")
    return EXIT_OK


def cmd_approx(args, out):
    exact = args.exact
    f = _load(args.func, "function", exact)
    grid = _load(args.grid, "grid", exact)
    _check_dims(f, grid)
    dual = _load(args.dual_grid, "grid", exact) if args.dual_grid else None
    extra = {}
    if args.kind == "convex":
        r = sample(best_convex_minorant(f, grid, dual), grid)
    elif args.kind == "homogeneous":
        r = sample(best_homogeneous_convex_minorant(f, grid, dual), grid)
    else:
        res = linear_minorant_sup_oracle(f, dual or grid, primal=grid)
        r, extra = res.values, {"truncated": res.truncated}
    obj = _samples_json(r, args.kind)
    obj.update(extra)
    _emit(obj, args.format, out, _samples_rows)
    return EXIT_OK


def parse_slice(spec: str | None, dim: int):
    """``"*,0"`` or ``"x1=*,x2=1/2"``: ``*`` marks a free axis, a number fixes it."""
    from ._linalg import to_fraction
    if not spec:
        fixed = [None] * dim
    else:
        parts = [p.strip() for p in spec.split(",")]
        if len(parts) != dim:
            raise InputError(f"slice {spec!r} has {len(parts)} entries, the grid has dim {dim}")
        fixed = []
        for i, p in enumerate(parts):
            if "=" in p:
                name, p = (t.strip() for t in p.split("=", 1))
                if name != f"x{i + 1}":
                    raise InputError(f"slice entry {i + 1} names {name!r}, expected x{i + 1}")
            if p == "*":
                fixed.append(None)
            else:
                try:
                    fixed.append(to_fraction(p))
                except (ValueError, ZeroDivisionError):
                    raise InputError(f"slice entry {p!r} is neither * nor a number") from None
    free = [i for i, v in enumerate(fixed) if v is None]
    if len(free) > 2:
        raise InputError(f"a slice has at most 2 free axes, got {len(free)}")
    return fixed, free


def cmd_plot_data(args, out):
    exact = args.exact
    f = _load(args.func, "function", exact)
    grid = _load(args.grid, "grid", exact)
    _check_dims(f, grid)
    fixed, free = parse_slice(args.slice, grid.dim)
    s = sample(f, grid)
    overlays = [o for o in (args.overlay or "").split(",") if o]
    for o in overlays:
        if o not in ("polar", "bipolar"):
            raise InputError(f"unknown overlay {o!r}; expected polar or bipolar")
    cols = {}
    if overlays:
        try:
            fo = polar_nonneg_sup(s, grid)
        except NegativeValueError:
            fo = polar_general_inf_grid(s, grid)
        if "polar" in overlays:
            cols["f_polar"] = fo.values
        if "bipolar" in overlays:
            try:
                cols["f_bipolar"] = sample(bipolar_transform(f).func, grid).values
            except (UnsupportedFunction, NegativeValueError, TypeError):
                cols["f_bipolar"] = polar_nonneg_sup(fo, grid).values
    w = csv.writer(out, lineterminator="\n")
    w.writerow([f"x{i + 1}" for i in free] + ["f"] + list(cols))
    for k, x in enumerate(grid.nodes):
        if any(v is not None and x[i] != v for i, v in enumerate(fixed)):
            continue
        w.writerow([format_value(x[i]) for i in free] + [format_value(s.values[k])]
                   + [format_value(c[k]) for c in cols.values()])
    return EXIT_OK


def cmd_scenarios(args, out):
    for name in bundled_scenarios():
        out.write(name + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=None,
                        help="seed for random instances (default: the scenario's, else 0)")
    common.add_argument("--tolerance", type=float, default=None,
                        help="override the default tolerance of sampled checks")
    ex = common.add_mutually_exclusive_group()
    ex.add_argument("--exact", dest="exact", action="store_true", default=True,
                    help="rational arithmetic (default)")
    ex.add_argument("--float", dest="exact", action="store_false", help="floating point")

    p = argparse.ArgumentParser(prog="polarity-kit",
                                description="Polar transforms, bipolar sets and functions, "
                                            "and verification reports.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("polar", parents=[common], help="polar set of a body or polar of a function")
    c.add_argument("--body")
    c.add_argument("--func")
    c.add_argument("--dual-grid")
    c.add_argument("--primal-grid")
    c.set_defaults(fn=cmd_polar)

    c = sub.add_parser("conjugate", parents=[common], help="Fenchel conjugate samples")
    c.add_argument("--func", required=True)
    c.add_argument("--dual-grid", required=True)
    c.add_argument("--primal-grid")
    c.set_defaults(fn=cmd_conjugate)

    c = sub.add_parser("verify", parents=[common], help="run a scenario and write its report")
    c.add_argument("scenario", help="scenario file or bundled scenario name")
    c.add_argument("--output", "-o")
    c.set_defaults(fn=cmd_verify)

    c = sub.add_parser("lattice", parents=[common], help="meet, join and lattice checks for two bodies")
    c.add_argument("P")
    c.add_argument("Q")
    c.set_defaults(fn=cmd_lattice)

    c = sub.add_parser("subdiff", parents=[common], help="polar subdifferentials at a node")
    c.add_argument("--func", required=True)
    c.add_argument("--primal-grid", required=True)
    c.add_argument("--dual-grid")
    c.add_argument("--x", required=True, help="point, e.g. 1/2,0")
    c.add_argument("--kind", choices=("lower", "upper", "middle", "all"), default="all")
    c.set_defaults(fn=cmd_subdiff)

    c = sub.add_parser("approx", parents=[common], help="best convex / homogeneous minorants")
    c.add_argument("--func", required=True)
    c.add_argument("--grid", required=True)
    c.add_argument("--dual-grid")
    c.add_argument("--kind", choices=("convex", "homogeneous", "oracle"), default="convex")
    c.set_defaults(fn=cmd_approx)

    c = sub.add_parser("plot-data", parents=[common], help="CSV of a 1D or 2D slice")
    c.add_argument("--func", required=True)
    c.add_argument("--grid", required=True)
    c.add_argument("--slice", help="per-axis * (free) or a value, e.g. '*,0'")
    c.add_argument("--overlay", help="comma list of polar, bipolar")
    c.set_defaults(fn=cmd_plot_data)

    c = sub.add_parser("scenarios", parents=[common], help="list bundled scenarios")
    c.set_defaults(fn=cmd_scenarios)
    return p


def main(argv=None, out=None) -> int:
    _setup_logging()
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    buf = io.StringIO()
    try:
        code = args.fn(args, buf)
    except (DescriptorError, InputError, NotBipolarError, UnsupportedFunction, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out.write(buf.getvalue())
    return code


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
