"""``chaoscope`` command line."""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from decimal import Decimal, InvalidOperation

import numpy as np

from . import __version__
from .classify import (ClassifierConfig, ConfigError, DuplicatePoints, classify_pair,
                       classify_point, config_hash, _workers)
from .criteria import (ConstructionFailure, CriterionInputError, absolutely_cesaro_bounded,
                       check_DC_criterion, check_LY_criterion, check_mean_LY_criterion,
                       construct_irregular_manifold, dc_criterion_inputs,
                       equicontinuity_dichotomy, search_irregular)
from .expr import ExpressionError
from .operators import UnsupportedOracle, is_torus, parse_operator
from .orbit import pair_trace, trace
from .spaces import (IncompatibleSpaces, LazyVector, SpecError, parse_metric, parse_vector,
                     parse_vector_list)
from .verdict import jsonable


SWEEP_LY_LENGTH = 256


class UsageError(Exception):
    pass


USAGE_ERRORS = (UsageError, SpecError, ExpressionError, IncompatibleSpaces, CriterionInputError,
                ConfigError, DuplicatePoints, UnsupportedOracle, json.JSONDecodeError)
NUMERIC_ERRORS = (ArithmeticError, FloatingPointError, np.linalg.LinAlgError)


# ----------------------------------------------------------------- inputs --

def _load(text):
    """A spec given as a file path, inline JSON or shorthand string."""
    if text is None:
        return None
    if os.path.isfile(text):
        with open(text) as fh:
            raw = fh.read().strip()
        try:
            return json.loads(raw)
        except json.JSONDecodeError:
            return raw
    t = text.strip()
    if t.startswith("{") or t.startswith("["):
        return json.loads(t)
    return t


def _operator(args):
    if not getattr(args, "op", None):
        raise UsageError("operator spec required")
    return parse_operator(_load(args.op))


def _space(T):
    sp = T.space
    return None if isinstance(sp, tuple) else sp


def _vector(text, T, name):
    spec = _load(text)
    if spec is None:
        raise UsageError(f"--{name} is required")
    return parse_vector(spec, _space(T))


def _metric(args, T):
    if is_torus(T):
        return parse_metric(args.metric or "torus")
    return parse_metric(args.metric, _space(T))


def _config(args):
    kw = {"N": args.horizon, "seed": args.seed}
    for key, attr in (("N0", "window_start"), ("eps_small", "eps"), ("delta_sep", "delta"),
                      ("eta", "eta"), ("m", "m")):
        v = getattr(args, attr, None)
        if v is not None:
            kw[key] = v
    return ClassifierConfig(**kw)


def _manifest(args, T, cfg, vectors=None, extra=None):
    man = {"command": args.command, "operator": T.to_json(),
           "vectors": {k: v.to_json() for k, v in (vectors or {}).items()},
           "config": cfg.to_json(), "seed": cfg.seed, "tool_version": __version__}
    if extra:
        man.update(extra)
    man["config_hash"] = config_hash(man)
    return man


def _emit(args, report):
    text = json.dumps(jsonable(report), sort_keys=True, indent=2) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------- commands --

def cmd_classify(args):
    T = _operator(args)
    cfg = _config(args)
    m = _metric(args, T)
    x = _vector(args.x, T, "x")
    vecs = {"x": x}
    if args.y is not None:
        y = _vector(args.y, T, "y")
        vecs["y"] = y
        pv = classify_pair(T, x, y, m, cfg)
    else:
        pv = classify_point(T, x, m, cfg)
    if args.trace_csv:
        tr = pair_trace(T, x, vecs["y"], m, cfg.N) if "y" in vecs else trace(T, x, m, cfg.N)
        tr.write_csv(args.trace_csv)
    _emit(args, {"manifest": _manifest(args, T, cfg, vecs, {"metric": m.to_json()}),
                 "result": pv.to_json()})


def cmd_classify_pair(args):
    if args.y is None:
        raise UsageError("--y is required for classify-pair")
    cmd_classify(args)


def _frange(start, stop, step):
    try:
        a, b, h = Decimal(str(start)), Decimal(str(stop)), Decimal(str(step))
    except InvalidOperation as exc:
        raise UsageError("range values must be numbers") from exc
    if h == 0:
        raise UsageError("sweep step must be nonzero")
    count = int((b - a) / h) + 1 if (b - a) * h >= 0 else 0
    if count <= 0:
        raise UsageError("empty parameter range")
    return [float(a + i * h) for i in range(count)]


def _sweep_row(template, name, value, cfg):
    spec = template.replace("$" + name, repr(value))
    T = parse_operator(_load(spec))
    dich = equicontinuity_dichotomy(T, None, cfg)
    row = {name: value, "dichotomy": dich.side, "sensitive": dich.sensitive}
    if not is_torus(T):
        ces = absolutely_cesaro_bounded(T, None, cfg)
        row["cesaro_bounded"] = ces.bounded
        K = min(cfg.N, SWEEP_LY_LENGTH)
        X0 = [LazyVector.basis(j, T.space) for j in range(1, K + 2)]
        a = [LazyVector.basis(n + 1, T.space) for n in range(1, K + 1)]
        row["ly_criterion"] = check_LY_criterion(T, X0, a, cfg).status.value
    return row


def cmd_sweep(args):
    if not args.op:
        raise UsageError("operator spec required")
    values = _frange(args.start, args.stop, args.step)
    cfg = _config(args)
    name = args.param
    if "$" + name not in args.op:
        raise UsageError(f"operator template must contain ${name}")
    with ThreadPoolExecutor(max_workers=_workers()) as ex:
        rows = list(ex.map(lambda v: _sweep_row(args.op, name, v, cfg), values))
    cols = list(rows[0])
    lines = [",".join(cols)]
    for r in rows:
        lines.append(",".join(_cell(r.get(c, "")) for c in cols))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def cmd_criterion(args):
    T = _operator(args)
    cfg = _config(args)
    sp = _space(T)
    vecs = {}
    if args.which == "ly":
        X0 = parse_vector_list(args.x0 or "e1:e20", sp)
        a = parse_vector_list(args.seq, sp) if args.seq else [
            LazyVector.basis(n + 1, sp) for n in range(1, len(X0))]
        res = check_LY_criterion(T, X0, a, cfg)
    elif args.which == "mean-ly":
        X0 = parse_vector_list(args.x0 or "e1:e20", sp)
        cap = args.cap
        y = parse_vector_list(args.seq, sp) if args.seq else [
            LazyVector.basis(k + 1, sp) for k in range(1, cap + 1)]
        Ns = [int(t) for t in args.lengths.split(",")] if args.lengths else list(range(1, len(y) + 1))
        res = check_mean_LY_criterion(T, X0, y, Ns, cfg, cap=cap)
    else:
        xs, ys, Ns = dc_criterion_inputs(cfg, K=args.cap)
        if args.x0:
            xs = parse_vector_list(args.x0, sp)
        if args.seq:
            ys = parse_vector_list(args.seq, sp)
            Ns = [int(t) for t in args.lengths.split(",")] if args.lengths else Ns
        res = check_DC_criterion(T, xs, ys, Ns, cfg)
    _emit(args, {"manifest": _manifest(args, T, cfg, vecs, {"criterion": args.which}),
                 "result": res.to_json()})


def cmd_search(args):
    T = _operator(args)
    cfg = _config(args)
    m = _metric(args, T)
    res = search_irregular(T, args.strategy, m, cfg)
    _emit(args, {"manifest": _manifest(args, T, cfg, extra={"strategy": args.strategy,
                                                            "metric": m.to_json()}),
                 "result": res.to_json()})


def cmd_construct(args):
    T = _operator(args)
    cfg = _config(args)
    m = _metric(args, T)
    targets = parse_vector_list(args.targets, _space(T)) if args.targets else []
    vecs = {f"target{i + 1}": t for i, t in enumerate(targets)}
    try:
        rep = construct_irregular_manifold(T, targets, m, cfg, samples=args.samples)
        result = {"status": "success" if rep.certified else "uncertified", **rep.to_json()}
    except ConstructionFailure as exc:
        result = {"status": "failure", "message": str(exc), "diagnostics": exc.diagnostics,
                  "basis": []}
    _emit(args, {"manifest": _manifest(args, T, cfg, vecs, {"samples": args.samples}),
                 "result": result})


def cmd_export_trace(args):
    T = _operator(args)
    m = _metric(args, T)
    x = _vector(args.x, T, "x")
    if args.y is not None:
        tr = pair_trace(T, x, _vector(args.y, T, "y"), m, args.horizon)
    else:
        tr = trace(T, x, m, args.horizon)
    if args.out:
        tr.write_csv(args.out)
    else:
        sys.stdout.write(tr.to_csv())


# ----------------------------------------------------------------- parser --

def _common(p, horizon=1 << 14):
    p.add_argument("--op", help="operator spec: JSON file, inline JSON or shorthand (2B, doubling)")
    p.add_argument("--metric", default=None, help="l2, l1, linf, lp:P, bounded, frechet[:J], "
                                                   "seminorm:M, torus")
    p.add_argument("--horizon", type=int, default=horizon)
    p.add_argument("--window-start", type=int, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output file (default stdout)")


def build_parser():
    ap = argparse.ArgumentParser(prog="chaoscope", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    for name, fn in (("classify", cmd_classify), ("classify-pair", cmd_classify_pair)):
        p = sub.add_parser(name, help="classify a point or pair")
        _common(p)
        p.add_argument("--x")
        p.add_argument("--y")
        p.add_argument("--trace-csv", default=None)
        p.set_defaults(func=fn)

    p = sub.add_parser("sweep", help="parameter sweep over an operator template")
    _common(p, horizon=1024)
    p.add_argument("--param", default="lambda")
    p.add_argument("--start", required=True)
    p.add_argument("--stop", required=True)
    p.add_argument("--step", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("criterion", help="check a chaos criterion")
    p.add_argument("which", choices=["ly", "mean-ly", "dc"])
    _common(p, horizon=4096)
    p.add_argument("--x0", default=None, help="seed vectors, e.g. e1:e20")
    p.add_argument("--seq", default=None, help="a_n / y_k vectors")
    p.add_argument("--lengths", default=None, help="N_k list, comma separated")
    p.add_argument("--cap", type=int, default=10)
    p.set_defaults(func=cmd_criterion)

    p = sub.add_parser("search-irregular", help="search for an irregular vector")
    _common(p)
    p.add_argument("--strategy", choices=["block", "random", "basis"], default="block")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("construct", help="construct an irregular manifold")
    _common(p)
    p.add_argument("--targets", default="")
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("export-trace", help="write an orbit trace as CSV")
    _common(p, horizon=1024)
    p.add_argument("--x")
    p.add_argument("--y")
    p.set_defaults(func=cmd_export_trace)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args.func(args)
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NUMERIC_ERRORS as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
