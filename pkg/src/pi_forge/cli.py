"""``pi-forge`` command line.

Primary output (JSON or CSV) goes to ``--out`` or stdout; human-readable
summaries go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .data import exact_dataset, sample
from .errors import InvalidInputError, PiForgeError
from .jpd import DEFAULT_TOL
from .k2_analysis import DEFAULT_M_CAP, exhaustive_min_r
from .learners import DEFAULT_MDL_CASES, k2_learn, kutato_learn, lam_bacchus_learn, pc_skeleton
from .pi_models import PiSpec, classify, construct_full_pi, find_embedded_pi
from .repro import run_all
from .serialization import (
    dataset_to_csv,
    dataset_to_json,
    graph_to_dot,
    graph_to_json,
    load_dataset,
    load_model,
    model_to_json,
    removals_to_jsonl,
    trace_to_jsonl,
)

THREADS_ENV = "PI_FORGE_THREADS"


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        raise InvalidInputError(f"{THREADS_ENV} must be an integer") from None


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _parse_ordering(text: str | None, names) -> list[int] | None:
    if not text:
        return None
    items = [s.strip() for s in text.split(",") if s.strip()]
    if all(s in names for s in items):
        return [names.index(s) for s in items]
    try:
        return [int(s) for s in items]
    except ValueError:
        raise InvalidInputError(f"ordering must list variable names or indices, got {text!r}") from None


def cmd_generate(args) -> int:
    spec = PiSpec(args.eta, args.q)
    table = construct_full_pi(spec)
    _emit(model_to_json(table), args.out)
    if args.out not in (None, "-"):
        meta = {"generator": "theorem1", "eta": spec.eta, "q": spec.q}
        Path(str(args.out) + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    _note(f"full PI model over {spec.eta} binary variables, q={spec.q}")
    return 0


def cmd_sample(args) -> int:
    table = load_model(args.model)
    data = exact_dataset(table, args.m) if args.exact else sample(table, args.m, args.seed)
    _emit(dataset_to_json(data) if args.format == "json" else dataset_to_csv(data), args.out)
    _note(f"{data.m} cases over {', '.join(data.names)}")
    return 0


def cmd_verify(args) -> int:
    table = load_model(args.model)
    result = classify(table, args.tol)
    report = {"model": args.model, **result.to_dict(list(table.names))}
    _note(f"{args.model}: {result.verdict.value} (S1 {'holds' if result.s1_holds else 'fails'}, "
          f"S2 {'holds' if result.s2_holds else 'fails'})")
    if result.independent_pairs:
        _note("  marginally independent pairs: " + ", ".join(
            f"({table.names[i]},{table.names[j]})" for i, j in result.independent_pairs))
    if args.embedded:
        max_subset = args.max_subset if args.max_subset is not None else min(5, table.n)
        found = find_embedded_pi(table, max_subset, args.tol)
        report["embedded"] = [
            {"subset": [table.names[i] for i in subset], **cls.to_dict()} for subset, cls in found
        ]
        for subset, cls in found:
            _note(f"  embedded {{{','.join(table.names[i] for i in subset)}}}: {cls.verdict.value}")
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return 0


def _learn_source(args):
    if args.data:
        data = load_dataset(args.data)
        return data, data
    table = load_model(args.model)
    if args.m is None:
        return table, None
    if args.dataset_mode == "exact":
        data = exact_dataset(table, args.m)
    else:
        data = sample(table, args.m, args.seed)
    return table, data


def cmd_learn(args) -> int:
    if not args.model and not args.data:
        raise InvalidInputError("learn needs --model or --data")
    table_or_data, data = _learn_source(args)
    names = list(table_or_data.names)
    ordering = _parse_ordering(args.ordering, names)
    extra: dict = {"algorithm": args.algo}
    if args.algo == "kutato":
        graph, trace = kutato_learn(data if data is not None else table_or_data, ordering, k=args.k)
        trace_text = trace_to_jsonl(trace)
        extra["score"] = trace.final_score.to_dict()
    elif args.algo == "k2":
        if data is None:
            raise InvalidInputError("k2 needs count data: pass --data, or --model with --m")
        graph, trace = k2_learn(data, ordering, max_parents=args.max_parents, k=args.k)
        trace_text = trace_to_jsonl(trace)
        extra["score"] = trace.final_score.to_dict()
    elif args.algo == "pc":
        graph, removals = pc_skeleton(data if data is not None else table_or_data, args.tol, args.max_order)
        trace_text = removals_to_jsonl(removals)
        extra["removals"] = [r.to_dict() for r in removals]
    else:
        src = data if data is not None else table_or_data
        graph, trace = lam_bacchus_learn(src, args.budget, m=None if data is not None else args.mdl_cases,
                                         max_links=args.max_links)
        trace_text = trace_to_jsonl(trace)
        extra["score"] = trace.final_score.to_dict()
        extra["link_list"] = [[names[i], names[j], mi] for (i, j), mi in trace.link_list]
    _emit(graph_to_json(graph, names, extra), args.out)
    if args.dot:
        Path(args.dot).write_text(graph_to_dot(graph, names))
    if args.trace:
        Path(args.trace).write_text(trace_text)
    edges = graph.arcs() if hasattr(graph, "arcs") else graph.sorted_links()
    _note(f"{args.algo}: {len(edges)} edge(s)" + ("" if not edges else ": " + ", ".join(
        f"{names[a]}{'->' if hasattr(graph, 'arcs') else '-'}{names[b]}" for a, b in edges)))
    return 0


def _parse_range(text: str) -> range:
    try:
        lo, hi = (int(x) for x in text.split(".."))
    except ValueError:
        raise InvalidInputError(f"--m-range must look like A..B, got {text!r}") from None
    if lo > hi:
        raise InvalidInputError(f"empty range {text!r}")
    return range(lo, hi + 1)


def _analysis_row(m_and_cap):
    m, cap = m_and_cap
    return exhaustive_min_r(m, cap).to_row()


def cmd_k2_analysis(args) -> int:
    ms = _parse_range(args.m_range)
    jobs = [(m, args.cap) for m in ms]
    for m, cap in jobs:
        if not 4 <= m <= cap:
            raise InvalidInputError(f"m={m} outside [4, {cap}]")
    threads = _threads()
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_analysis_row, jobs))
    else:
        rows = [_analysis_row(j) for j in jobs]
    header = ["m", "min_r", "argmin", "min_r_prime", "cells_examined"]
    lines = [",".join(header)]
    lines += [",".join(f'"{row[h]}"' if h == "argmin" and row[h] else str(row[h]) for h in header) for row in rows]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_repro(args) -> int:
    results = run_all()
    failed = [c for c in results if not c.passed]
    for c in results:
        _note(f"[{'PASS' if c.passed else 'FAIL'}] {c.id}: {c.claim}")
    report = {
        "version": __version__,
        "passed": not failed,
        "total": len(results),
        "failures": len(failed),
        "checks": [c.to_dict() for c in results],
    }
    _emit(json.dumps(report, indent=2, default=str) + "\n", args.out)
    _note(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="pi-forge", description=__doc__.splitlines()[0], formatter_class=fmt)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a full PI model as model JSON", formatter_class=fmt)
    p.add_argument("--eta", type=int, required=True, help="number of binary variables (>= 3)")
    p.add_argument("--q", type=float, default=1.0, help="group parameter in [0, 1], not 0.5")
    p.add_argument("--out", default="-", help="output path ('-' for stdout); metadata goes to OUT.meta.json")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sample", help="draw a dataset from a model", formatter_class=fmt)
    p.add_argument("--model", required=True, help="fixture:<name> or model JSON path")
    p.add_argument("--m", type=int, required=True, help="number of cases")
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument("--exact", action="store_true", help="exact-frequency counts m*P(c) instead of sampling")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("learn", help="learn a structure from a model or dataset", formatter_class=fmt)
    p.add_argument("--algo", choices=("kutato", "k2", "pc", "lam-bacchus"), required=True, help="learner")
    p.add_argument("--model", default=None, help="fixture:<name> or model JSON path")
    p.add_argument("--data", default=None, help="dataset CSV or JSON path (overrides --model)")
    p.add_argument("--ordering", default=None, help="comma-separated variable names or indices")
    p.add_argument("--k", type=int, default=1, help="lookahead width (arcs per step)")
    p.add_argument("--max-parents", type=int, default=None, help="K2 parent limit (default n-1)")
    p.add_argument("--m", type=int, default=None, help="build a dataset of this many cases from --model")
    p.add_argument("--dataset-mode", choices=("exact", "sample"), default="exact", help="how --m cases are built")
    p.add_argument("--seed", type=int, default=0, help="seed for --dataset-mode sample")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="PC independence tolerance")
    p.add_argument("--max-order", type=int, default=None, help="largest PC conditioning set (default n-2)")
    p.add_argument("--budget", type=int, default=1, help="Lam-Bacchus candidates per link-count class")
    p.add_argument("--max-links", type=int, default=None, help="Lam-Bacchus largest link-count class explored")
    p.add_argument("--mdl-cases", type=int, default=DEFAULT_MDL_CASES, help="case count for MDL on exact tables")
    p.add_argument("--out", default="-", help="graph JSON path ('-' for stdout)")
    p.add_argument("--dot", default=None, help="also write the graph as DOT")
    p.add_argument("--trace", default=None, help="write the search trace as JSON lines")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("verify", help="classify a model as full/partial/non PI", formatter_class=fmt)
    p.add_argument("model", help="fixture:<name> or model JSON path")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="independence tolerance")
    p.add_argument("--embedded", action="store_true", help="also search variable subsets for embedded PI submodels")
    p.add_argument("--max-subset", type=int, default=None, help="largest subset searched (default min(5, n))")
    p.add_argument("--out", default="-", help="report JSON path ('-' for stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("k2-analysis", help="exhaustive K2 ratio minima as CSV", formatter_class=fmt)
    p.add_argument("--m-range", default="4..20", help="inclusive range A..B of case counts")
    p.add_argument("--cap", type=int, default=DEFAULT_M_CAP, help="largest m allowed")
    p.add_argument("--out", default="-", help="CSV path ('-' for stdout)")
    p.set_defaults(func=cmd_k2_analysis)

    p = sub.add_parser("repro", help="run every reproduction check", formatter_class=fmt)
    p.add_argument("--out", default="-", help="JSON report path ('-' for stdout)")
    p.set_defaults(func=cmd_repro)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PiForgeError, OSError) as exc:
        print(f"pi-forge {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
