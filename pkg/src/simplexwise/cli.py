"""Command-line frontend.

Exit codes: 0 ok, 1 parse failure, 2 invalid parameters, 3 shape mismatch,
4 metric or Lipschitz violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import corpus, serialize
from .assignment import ShapeMismatchError
from .core import CloudError, MetricViolationError, validate_metric
from .invariants import DegenerateMomentError, amd, pdd, sdd, sdm
from .metrics import compare, lipschitz_check
from .mmspace import wsd, wsd_dist_emd, wsd_dist_lac

EXIT_OK, EXIT_PARSE, EXIT_PARAMS, EXIT_SHAPE, EXIT_VIOLATION = 0, 1, 2, 3, 4


class ParamError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_PARAMS)


def _fail(code: int, msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _load(path: str, args) -> object:
    try:
        return serialize.load_cloud(path, csv_kind=getattr(args, "csv_kind", "coords"),
                                    validate=getattr(args, "validate_triangle", False))
    except MetricViolationError:
        raise
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _raw_matrix(path: str, args) -> np.ndarray:
    """Distances of the input without enforcing any axiom, so validate can report them all."""
    p = Path(path)
    try:
        if p.suffix.lower() == ".csv":
            if args.csv_kind == "matrix":
                return np.loadtxt(p, delimiter=",", ndmin=2)
        else:
            data = json.loads(p.read_text())
            if isinstance(data, dict) and data.get("kind") == "matrix":
                return np.asarray(data["matrix"], dtype=float)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    return np.asarray(_load(path, args).distances)


def _need_h(args) -> int:
    if args.h is None:
        raise ParamError("field 'h' is required for this invariant")
    return args.h


def cmd_compute(args) -> int:
    cloud = _load(args.input, args)
    inv = args.invariant
    if inv == "sdd":
        out = serialize.sdd_to_dict(sdd(cloud, _need_h(args)))
    elif inv == "wsd":
        out = serialize.wsd_to_dict(wsd(cloud, _need_h(args)))
    elif inv == "pdd":
        out = pdd(cloud).as_array()
    elif inv == "amd":
        if args.kmax is not None and not 1 <= args.kmax < cloud.m:
            raise ParamError(f"field 'kmax' must lie in 1..{cloud.m - 1}, got {args.kmax}")
        out = amd(cloud, args.kmax)
    else:
        if args.l < 1:
            raise ParamError(f"field 'l' must be >= 1, got {args.l}")
        out = sdm(cloud, _need_h(args), args.l)
    _emit(serialize.dumps(out), args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    a, b = _load(args.a, args), _load(args.b, args)
    if a.m != b.m:
        return _fail(EXIT_SHAPE, f"clouds differ in size: m={a.m} vs m={b.m}")
    if args.invariant == "sdd":
        report = compare(a, b, args.h, args.metric)
    else:
        if not args.gamma > 0:
            raise ParamError(f"field 'gamma' must be > 0, got {args.gamma}")
        fn = wsd_dist_emd if args.metric == "emd" else wsd_dist_lac
        t0 = time.perf_counter()
        value = fn(wsd(a, args.h), wsd(b, args.h), args.gamma)
        report = {"metric": args.metric, "h": args.h, "value": value, "lower_bound_sdm": None,
                  "elapsed_ms": (time.perf_counter() - t0) * 1e3, "gamma": args.gamma}
    _emit(serialize.dumps(report), args.out)
    return EXIT_OK


def _parse_signs(text: str | None):
    if text is None:
        return None
    if len(text) != 3 or set(text) - {"+", "-"}:
        raise ParamError(f"field 'signs' must be three characters from '+-', got {text!r}")
    return tuple(1 if c == "+" else -1 for c in text)


def corpus_filename(name: str, label: str) -> str:
    return f"{name}_{label.replace('-', 'minus').replace('+', 'plus')}.json"


def cmd_corpus(args) -> int:
    try:
        clouds = corpus.build(args.name, args.param, _parse_signs(args.signs))
    except CloudError as exc:
        raise ParamError(str(exc)) from exc
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    for label, cloud in clouds.items():
        path = out / corpus_filename(args.name, label)
        serialize.save_cloud(cloud, path)
        print(path)
    return EXIT_OK


def cmd_perturb_test(args) -> int:
    cloud = _load(args.input, args)
    if cloud.kind != "coordinates":
        raise ParamError("field 'input' must hold a coordinate cloud for perturbation")
    if not args.eps > 0:
        raise ParamError(f"field 'eps' must be > 0, got {args.eps}")
    if args.trials < 1:
        raise ParamError(f"field 'trials' must be >= 1, got {args.trials}")
    rep = lipschitz_check(cloud, args.eps, args.trials, args.h, seed=args.seed)
    doc = {"eps": rep.eps, "h": rep.h, "seed": args.seed, "violations": len(rep.failed),
           "trials": [{"index": t.index, "emd": t.emd, "lac": t.lac, "bound": t.bound,
                       "lower_bound_sdm": t.lower, "violations": t.violations}
                      for t in rep.trials]}
    _emit(serialize.dumps(doc), args.out)
    if rep.failed:
        idx = ", ".join(str(t.index) for t in rep.failed)
        return _fail(EXIT_VIOLATION, f"{len(rep.failed)} trial(s) violate the bounds: {idx}")
    return EXIT_OK


def cmd_validate(args) -> int:
    d = _raw_matrix(args.input, args)
    try:
        problems = validate_metric(d)
    except CloudError as exc:
        raise InputError(str(exc)) from exc
    for v in problems:
        print(f"{v.axiom} {v.indices} magnitude {v.magnitude:.17g}")
    if problems:
        return _fail(EXIT_VIOLATION, f"{len(problems)} metric axiom violation(s)")
    print(f"ok: {len(d)} points satisfy all metric axioms")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="simplexwise", description="Isometry invariants of finite point clouds.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def io_flags(sp, single=True):
        if single:
            sp.add_argument("-i", "--input", required=True)
        sp.add_argument("--csv-kind", choices=["coords", "matrix"], default="coords",
                        help="how to read .csv input")
        sp.add_argument("--validate-triangle", action="store_true",
                        help="check the triangle inequality on matrix input")
        sp.add_argument("--out", help="output file (default stdout)")

    c = sub.add_parser("compute", help="compute an invariant of one cloud")
    io_flags(c)
    c.add_argument("--invariant", required=True, choices=["sdd", "pdd", "amd", "sdm", "wsd"])
    c.add_argument("--h", type=int)
    c.add_argument("--l", type=int, default=1)
    c.add_argument("--kmax", type=int)
    c.set_defaults(func=cmd_compute)

    c = sub.add_parser("compare", help="distance between the invariants of two clouds")
    io_flags(c, single=False)
    c.add_argument("--a", required=True)
    c.add_argument("--b", required=True)
    c.add_argument("--h", type=int, required=True)
    c.add_argument("--metric", choices=["emd", "lac"], default="emd")
    c.add_argument("--invariant", choices=["sdd", "wsd"], default="sdd")
    c.add_argument("--gamma", type=float, default=1.0, help="weight scale in the WDD metric")
    c.set_defaults(func=cmd_compare)

    c = sub.add_parser("corpus", help="write a reference cloud family")
    c.add_argument("--name", required=True, choices=list(corpus.NAMES))
    c.add_argument("--param", type=float, nargs=3, metavar=("L1", "L2", "L3"))
    c.add_argument("--signs", help="T6 y-signs, e.g. '+-+'")
    c.add_argument("--out", help="output directory (default .)")
    c.set_defaults(func=cmd_corpus)

    c = sub.add_parser("perturb-test", help="check the 2-eps bound on random perturbations")
    io_flags(c)
    c.add_argument("--eps", type=float, required=True)
    c.add_argument("--trials", type=int, default=100)
    c.add_argument("--h", type=int, required=True)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_perturb_test)

    c = sub.add_parser("validate", help="check the metric axioms of a cloud")
    io_flags(c)
    c.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        return _fail(EXIT_PARSE, str(exc))
    except ShapeMismatchError as exc:
        return _fail(EXIT_SHAPE, str(exc))
    except MetricViolationError as exc:
        return _fail(EXIT_VIOLATION, str(exc))
    except (ParamError, DegenerateMomentError, CloudError) as exc:
        return _fail(EXIT_PARAMS, str(exc))


if __name__ == "__main__":
    sys.exit(main())
