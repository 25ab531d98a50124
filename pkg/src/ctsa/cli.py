"""Command-line interface: ``ctsa <subcommand> ...``.

Exit codes: 0 on success, 1 on usage or expression syntax errors, 2 on data
and guarantee errors.  Errors go to stderr as ``error: <code>: <message>``.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import store as store_mod
from .compress import compress, parse_seg_spec
from .core import Domain
from .errors import CtsaError, EvaluationError, ParseError
from .families import get_family

USAGE_EXIT = 1
DATA_EXIT = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _family(token):
    try:
        return get_family(token)
    except KeyError as exc:
        raise argparse.ArgumentTypeError(str(exc.args[0])) from None


def _seg(text):
    try:
        return parse_seg_spec(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _beta(text):
    v = float(text)
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError(f"beta must be in (0, 1], got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ctsa", description="Compressed time-series analytics with error guarantees.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="<command>")
    sub.required = True

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--store", required=True, help="store directory")
        sp.add_argument("--json", action="store_true", help="emit one JSON object")
        return sp

    sp = add("ingest", "load raw series from a series_id,t,value CSV")
    sp.add_argument("csv")

    sp = add("compress", "compress raw series into segments")
    sp.add_argument("series_id", nargs="?")
    sp.add_argument("--all", action="store_true", help="compress every raw series")
    sp.add_argument("--family", type=_family, required=True, help="p0, p1, p2 or g")
    sp.add_argument("--seg", type=_seg, required=True, help="fixed:<len> or sliding:<tau>")

    sp = add("query", "evaluate an expression on the compressed series")
    sp.add_argument("expr")
    sp.add_argument("--oracle", action="store_true", help="also evaluate on raw data")

    sp = add("stats", "evaluate a named statistic")
    sp.add_argument("kind", choices=["mu", "sigma", "corr", "ccorr", "acorr"])
    sp.add_argument("series", nargs="+")
    sp.add_argument("--lag", type=int, help="lag for ccorr/acorr")
    sp.add_argument("--oracle", action="store_true")

    sp = add("info", "list stored series")

    sp = add("compare-sampling", "compare stored numbers with a sampling baseline")
    sp.add_argument("expr")
    sp.add_argument("--beta", type=_beta, default=0.05)
    return p


# ---------------------------------------------------------------------------
# output


def _fmt(v, as_json):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        if as_json:
            return format(v, ".17g") if math.isfinite(v) else json.dumps(None)
        return f"{v:.6f}"
    return json.dumps(v) if as_json else str(v)


def _emit(pairs, as_json, out):
    if as_json:
        body = ", ".join(f"{json.dumps(k)}: {_fmt(v, True)}" for k, v in pairs)
        out.write("{" + body + "}\n")
    else:
        for k, v in pairs:
            out.write(f"{k}={_fmt(v, False)}\n")


# ---------------------------------------------------------------------------
# commands


def _cmd_ingest(args, out):
    cat = store_mod.load_or_empty(args.store)
    series = store_mod.ingest_csv(args.csv)
    dropped = []
    for t in series:
        if t.name in cat.compressed:
            del cat.compressed[t.name]
            dropped.append(t.name)
        cat.add_raw(t.name, t)
    store_mod.save(cat, args.store)
    pairs = [("ingested", len(series)), ("points", sum(len(t) for t in series))]
    if dropped:
        pairs.append(("recompress", ",".join(dropped)))
    _emit(pairs, args.json, out)


def _cmd_compress(args, out):
    if args.all == (args.series_id is not None):
        raise _UsageError("compress: give either a series id or --all")
    cat = store_mod.load_or_empty(args.store)
    ids = sorted(cat.raw) if args.all else [args.series_id]
    if not ids:
        raise EvaluationError("store holds no raw series to compress")
    rows = []
    for sid in ids:
        c = compress(cat.get_raw(sid), args.family, args.seg, sid)
        cat.add_compressed(c)
        rows.append(c)
    store_mod.save(cat, args.store)
    for c in rows:
        _emit(
            [
                ("series", c.series_id),
                ("family", c.family.id),
                ("segments", len(c)),
                ("stored", c.stored_numbers()),
                ("ratio", c.compression_ratio()),
            ],
            args.json,
            out,
        )


def _answer(node, cat, oracle, as_json, out):
    from .engine import eval_approx, eval_exact

    res = eval_approx(node, cat)
    pairs = [("value", res.value), ("guarantee", res.guarantee)]
    if oracle:
        exact = eval_exact(node, cat)
        pairs += [("exact", exact), ("true_error", abs(exact - res.value))]
    _emit(pairs, as_json, out)


def _cmd_query(args, out):
    from .engine import parse

    node = parse(args.expr)
    _answer(node, store_mod.load(args.store), args.oracle, args.json, out)


_STAT_ARITY = {"mu": ("Mu", 1), "sigma": ("Sigma", 1), "corr": ("Corr", 2), "ccorr": ("CCorr", 2), "acorr": ("ACorr", 1)}


def _cmd_stats(args, out):
    from .engine import ast as A
    from .engine.parser import expand_stat

    kind, arity = _STAT_ARITY[args.kind]
    if len(args.series) != arity:
        raise _UsageError(f"stats {args.kind}: expected {arity} series, got {len(args.series)}")
    lagged = kind in ("CCorr", "ACorr")
    if lagged and args.lag is None:
        raise _UsageError(f"stats {args.kind}: --lag is required")
    if not lagged and args.lag is not None:
        raise _UsageError(f"stats {args.kind}: --lag does not apply")
    refs = [A.Ref(s) for s in args.series]
    node = A.Stat(kind, tuple(refs), args.lag, expand_stat(kind, refs, args.lag))
    _answer(node, store_mod.load(args.store), args.oracle, args.json, out)


def _cmd_info(args, out):
    cat = store_mod.load(args.store)
    rows = []
    for sid in cat.series_ids():
        c = cat.compressed.get(sid)
        raw = cat.raw.get(sid)
        pairs = [("series", sid)]
        if c is not None:
            pairs += [
                ("family", c.family.id),
                ("segments", len(c)),
                ("domain", f"{c.domain.a}..{c.domain.b}"),
                ("stored", c.stored_numbers()),
                ("ratio", c.compression_ratio()),
            ]
        else:
            pairs += [("family", "none"), ("domain", f"{raw.a}..{raw.b}")]
        pairs.append(("raw", raw is not None))
        rows.append(pairs)
    if args.json:
        out.write(
            "{\"series\": ["
            + ", ".join("{" + ", ".join(f"{json.dumps(k)}: {_fmt(v, True)}" for k, v in r) + "}" for r in rows)
            + "]}\n"
        )
    else:
        for r in rows:
            out.write(" ".join(f"{k}={_fmt(v, False)}" for k, v in r) + "\n")


def _cmd_compare_sampling(args, out):
    from .engine import ast as A
    from .engine import eval_approx, parse
    from .engine.evaluate import _sum_domain, tse_domain
    from .sampling import required_sample_size

    node = parse(args.expr)
    if isinstance(node, A.Stat) or not isinstance(node, A.Sum):
        raise _UsageError("compare-sampling: expression must be a single Sum(...)")
    cat = store_mod.load(args.store)
    res = eval_approx(node, cat)
    names = sorted(A.refs(node))
    stored = sum(cat.get_compressed(n).stored_numbers() for n in names)
    d = _sum_domain(node, lambda n: cat.get_compressed(n).domain)
    lo, hi = _value_bounds(node.arg, cat, d)
    if res.guarantee <= 0:
        raise EvaluationError("the compressed answer is exact; no sampling target to match")
    m = required_sample_size(d.length, res.guarantee, args.beta, (lo, hi))
    _emit(
        [
            ("value", res.value),
            ("guarantee", res.guarantee),
            ("stored_numbers", stored),
            ("population", d.length),
            ("beta", args.beta),
            ("d_min", lo),
            ("d_max", hi),
            ("sample_size", int(m)),
            ("exhausted", m.exhausted),
        ],
        args.json,
        out,
    )


def _value_bounds(node, cat, d: Domain):
    """Range of the series expression on ``d``: exact from raw data when
    every series has it, otherwise pointwise intervals ``f +- fes``."""
    from .engine import ast as A

    def interval(n, dom):
        if isinstance(n, A.Ref):
            raw = cat.raw.get(n.name)
            if raw is not None:
                v = raw.values[dom.a - raw.a : dom.b - raw.a + 1]
                return v, v
            c = cat.get_compressed(n.name)
            f = np.concatenate([s.fn.values() for s in c.segments])
            e = np.concatenate([np.full(s.domain.length, s.em.fes) for s in c.segments])
            sl = slice(dom.a - c.domain.a, dom.b - c.domain.a + 1)
            return f[sl] - e[sl], f[sl] + e[sl]
        if isinstance(n, A.Const):
            v = np.full(dom.length, n.value)
            return v, v
        if isinstance(n, A.Shift):
            return interval(n.arg, dom.shift(-n.k))
        l1, h1 = interval(n.left, dom)
        l2, h2 = interval(n.right, dom)
        if n.op == "+":
            return l1 + l2, h1 + h2
        if n.op == "-":
            return l1 - h2, h1 - l2
        c = np.stack([l1 * l2, l1 * h2, h1 * l2, h1 * h2])
        return c.min(axis=0), c.max(axis=0)

    lo, hi = interval(node, d)
    return float(lo.min()), float(hi.max())


_COMMANDS = {
    "ingest": _cmd_ingest,
    "compress": _cmd_compress,
    "query": _cmd_query,
    "stats": _cmd_stats,
    "info": _cmd_info,
    "compare-sampling": _cmd_compare_sampling,
}


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        err.write(f"error: usage: {exc}\n")
        return USAGE_EXIT
    except SystemExit as exc:  # --help
        return 0 if not exc.code else USAGE_EXIT
    try:
        _COMMANDS[args.command](args, out)
    except _UsageError as exc:
        err.write(f"error: usage: {exc}\n")
        return USAGE_EXIT
    except ParseError as exc:
        err.write(f"error: {exc.code}: {exc}\n")
        return USAGE_EXIT
    except CtsaError as exc:
        err.write(f"error: {exc.code}: {exc}\n")
        return DATA_EXIT
    except (OSError, ValueError) as exc:
        err.write(f"error: {'io' if isinstance(exc, OSError) else 'value'}: {exc}\n")
        return DATA_EXIT
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
