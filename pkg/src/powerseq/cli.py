"""Command-line entry point: every subcommand prints one JSON document on stdout.

Exit codes: 0 success (all assertions passed), 1 assertion failure or resource
limit, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .circle import OrthogonalElement, TorusPoint
from .convergence import in_C_B, in_C_B_orth, in_C_B_torus, in_D_F
from .cover import GridInstance, HorizonExhausted, select_covers, verify_cover
from .descriptors import DescriptorError, parse_descriptor, parse_filter, parse_point, parse_rational, parse_set
from .experiments import REGISTRY, UsageError, run_experiment
from .filters import FilterSpec, check_fip, filter_member
from .measure import c_set_approx
from .omega import (
    ResourceLimitError,
    density,
    divisibility_profile,
    enumerate_set,
    is_hadamard,
    is_thin,
    partition_even_odd_positions,
)
from .solenoid import build, embed_rational, make_schedule

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n")


def _write_csv(directory: str, name: str, header: list[str], rows: list[list]) -> Path:
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    target = path / f"{name}.csv"
    with target.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return target


def _default_seed() -> int:
    raw = os.environ.get("POWERSEQ_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"POWERSEQ_SEED must be an integer, got {raw!r}")


def _window(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(":")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like START:END, got {text!r}")


def _safe_all(fn, *args):
    try:
        return fn(*args).to_dict()
    except ValueError as exc:
        return {"error": str(exc)}


def cmd_classify(args) -> int:
    s = parse_set(args.set)
    doc = {
        "set": str(s),
        "prefix": [str(n) for n in enumerate_set(s, args.count)],
        "finite": s.finiteness(),
        "thin": _safe_all(is_thin, s),
        "hadamard": _safe_all(is_hadamard, s),
        "density": density(s, args.horizon).to_dict(),
        "profiles": {str(m): divisibility_profile(s, m).to_dict() for m in args.modulus},
    }
    even, odd = partition_even_odd_positions(s)
    doc["partition"] = {"even_positions": [str(n) for n in enumerate_set(even, args.count)],
                        "odd_positions": [str(n) for n in enumerate_set(odd, args.count)]}
    _emit(doc)
    return EXIT_OK


def cmd_density(args) -> int:
    s = parse_set(args.set)
    _emit({"set": str(s), "density": density(s, args.horizon).to_dict()})
    return EXIT_OK


def cmd_filter_member(args) -> int:
    f, w = parse_filter(args.filter), parse_set(args.set)
    doc = {"filter": str(f), "set": str(w),
           "membership": filter_member(f, w, preimage_horizon=args.preimage_horizon).to_dict()}
    if args.fip is not None:
        doc["fip"] = check_fip(f, args.fip).to_dict()
    _emit(doc)
    return EXIT_OK


def cmd_converge(args) -> int:
    target = parse_descriptor(args.target)
    if args.group == "O2":
        g = OrthogonalElement(parse_point(args.point), args.reflection)
        if isinstance(target, FilterSpec):
            raise UsageError("filters are supported on the circle only")
        verdict = in_C_B_orth(g, target)
    elif args.group == "Tk":
        x = TorusPoint(parse_point(p) for p in args.point.split(","))
        if isinstance(target, FilterSpec):
            raise UsageError("filters are supported on the circle only")
        verdict = in_C_B_torus(x, target)
    else:
        x = parse_point(args.point)
        if isinstance(target, FilterSpec):
            verdict = in_D_F(x, target, args.search_budget, proxy=args.proxy)
        else:
            verdict = in_C_B(x, target, proxy=args.proxy, window=args.window, tol=parse_rational(args.tol))
    _emit({"point": args.point, "group": args.group, "target": str(target), "verdict": verdict.to_dict()})
    return EXIT_OK


def cmd_measure(args) -> int:
    s = parse_set(args.set)
    rep = c_set_approx(s, parse_rational(args.eps), args.m, samples=args.samples, seed=args.seed,
                       budget=args.budget)
    if args.plot_data:
        _write_csv(args.plot_data, "measure", ["m", "constraint", "exact_measure"],
                   [[i + 1, n, float(v)] for i, (n, v) in enumerate(zip(rep.constraints, rep.exact_sequence))])
    _emit(rep.to_dict())
    return EXIT_FAIL if rep.mc and rep.mc["flagged"] else EXIT_OK


def _mask(spec: str):
    if spec == "even":
        return lambda j: j % 2 == 0
    if spec == "odd":
        return lambda j: j % 2 == 1
    if spec and set(spec) <= {"0", "1"}:
        return lambda j: spec[j % len(spec)] == "1"
    raise UsageError(f"mask must be even, odd or a 0/1 pattern, got {spec!r}")


def cmd_solenoid(args) -> int:
    a_spec = parse_set(args.set)
    sched = make_schedule(a_spec, args.stages)
    top = max(sched.gamma)
    v = embed_rational(parse_rational(args.v), top)
    w = embed_rational(parse_rational(args.w), top)
    z, cert = build(sched, _mask(args.mask), v, w)
    if args.plot_data:
        rows = [[f["j"], f["alpha"], f["in_B"], float(Fraction(f["distance"])), float(Fraction(f["bound"]))]
                for f in cert.final]
        _write_csv(args.plot_data, "solenoid-final", ["j", "alpha", "in_B", "distance", "bound"], rows)
    _emit({"element": z.to_list(), "certificate": cert.to_dict()})
    return EXIT_OK if cert.ok else EXIT_FAIL


def cmd_cover(args) -> int:
    if args.table:
        if not args.grid:
            raise UsageError("--table needs --grid with the angles the table columns refer to")
        grid = [parse_point(p) for p in args.grid.split(",")]
        inst = GridInstance.from_json_file(args.table, grid)
    else:
        inst = GridInstance.torsion(args.max_order)
    res = select_covers(inst, args.horizon, args.k_max)
    ver = verify_cover(res)
    _emit({"cover": res.to_dict(), "verification": ver})
    return EXIT_OK if ver["ok"] else EXIT_FAIL


def cmd_experiment(args) -> int:
    if args.list:
        _emit([{"name": e.name, "anchor": e.anchor,
                "defaults": {k: str(v) if isinstance(v, Fraction) else v for k, v in e.defaults.items()}}
               for e in sorted(REGISTRY.values(), key=lambda e: e.name)])
        return EXIT_OK
    if not args.name:
        raise UsageError("experiment name required (or --list)")
    params = {}
    for item in args.param:
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        params[k.strip()] = v.strip()
    rep = run_experiment(args.name, params, args.seed, workers=args.threads)
    if args.plot_data:
        for key, (header, rows) in rep.plot_data.items():
            _write_csv(args.plot_data, f"{args.name}-{key}", header, rows)
    sys.stdout.write(rep.to_json())
    return EXIT_OK if rep.passed else EXIT_FAIL


_GLOBAL_DEFAULTS = {"threads": 1, "plot_data": None, "timing": False}


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker cap for parallel sections (results do not depend on it)")
    common.add_argument("--plot-data", metavar="DIR", default=argparse.SUPPRESS, help="write CSV sidecar files into DIR")
    common.add_argument("--timing", action="store_true", default=argparse.SUPPRESS, help="print elapsed seconds to stderr")
    p = argparse.ArgumentParser(prog="powerseq", description=__doc__.splitlines()[0], parents=[common])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=lambda **kw: argparse.ArgumentParser(parents=[common], **kw))

    c = sub.add_parser("classify-set", help="enumerate a set and report thinness, Hadamard, density, profiles")
    c.add_argument("set")
    c.add_argument("--count", type=int, default=10)
    c.add_argument("--horizon", type=int, default=10**5)
    c.add_argument("--modulus", type=int, action="append", default=[], help="divisibility profile modulus (repeatable)")
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("density", help="asymptotic density: exact when closed form, else windowed estimate")
    c.add_argument("set")
    c.add_argument("--horizon", type=int, default=10**5)
    c.set_defaults(func=cmd_density)

    c = sub.add_parser("filter-member", help="is a set a member of a filter")
    c.add_argument("filter")
    c.add_argument("set")
    c.add_argument("--fip", type=int, metavar="DEPTH", help="also check the finite intersection property")
    c.add_argument("--preimage-horizon", type=int, default=200)
    c.set_defaults(func=cmd_filter_member)

    c = sub.add_parser("converge", help="does x^n converge to 1 along a set or filter")
    c.add_argument("point", help="angle p/q (comma-separated for --group Tk)")
    c.add_argument("target", help="set or filter descriptor")
    c.add_argument("--group", choices=["T", "Tk", "O2"], default="T")
    c.add_argument("--reflection", action="store_true", help="O2 only: use the reflection with this angle")
    c.add_argument("--proxy", action="store_true", help="treat the angle as a stand-in for an irrational one")
    c.add_argument("--window", type=_window, default=(32, 64), help="index window START:END for empirical checks")
    c.add_argument("--tol", default="1/100")
    c.add_argument("--search-budget", type=int, default=64)
    c.set_defaults(func=cmd_converge)

    c = sub.add_parser("measure", help="exact measure of finite approximations to the convergence set")
    c.add_argument("set")
    c.add_argument("--eps", default="1/10")
    c.add_argument("--m", type=int, default=5)
    c.add_argument("--samples", type=int, default=0, help="Monte Carlo cross-check sample count (0 = off)")
    c.add_argument("--seed", type=int)
    c.add_argument("--budget", type=int, default=10**6, help="interval-count budget")
    c.set_defaults(func=cmd_measure)

    c = sub.add_parser("solenoid-build", help="build a solenoid element with certified limits along B and C")
    c.add_argument("--set", default="tail(factorial,1)")
    c.add_argument("--stages", type=int, default=6)
    c.add_argument("--v", default="1/2", help="target along B, embedded as t/α!")
    c.add_argument("--w", default="0", help="target along C, embedded as t/α!")
    c.add_argument("--mask", default="even", help="even, odd, or a repeating 0/1 pattern marking B")
    c.set_defaults(func=cmd_solenoid)

    c = sub.add_parser("cover", help="select finite cover stages on a grid and verify them")
    c.add_argument("--max-order", type=int, default=6)
    c.add_argument("--k-max", type=int, default=3)
    c.add_argument("--horizon", type=int, default=10**4)
    c.add_argument("--table", help="JSON map n -> angles aligned with --grid (optional key g for the limit)")
    c.add_argument("--grid", help="comma-separated grid angles for --table")
    c.set_defaults(func=cmd_cover)

    c = sub.add_parser("experiment", help="run a named experiment")
    c.add_argument("name", nargs="?")
    c.add_argument("--list", action="store_true")
    c.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    c.add_argument("--seed", type=int)
    c.set_defaults(func=cmd_experiment)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # applied here: set_defaults would mutate the actions shared with every subparser
    for key, value in _GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    start = time.perf_counter()
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        code = args.func(args)
    except (DescriptorError, UsageError, argparse.ArgumentTypeError) as exc:
        print(f"powerseq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceLimitError, HorizonExhausted) as exc:
        print(f"powerseq: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"powerseq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.timing:
        print(f"elapsed {time.perf_counter() - start:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
