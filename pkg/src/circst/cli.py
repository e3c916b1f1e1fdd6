"""Command-line front end.

Exit codes: 0 the checked property holds (or the artifact was produced),
1 the property is certified false (counterexample on stdout), 2 inconclusive
within budget, 64 usage error. Machine output is JSON on stdout unless
``--format dot`` is requested.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .graph import CirculantSpec, Graph, build_circulant
from .orient import (
    NOT_SEMI_TRANSITIVE,
    SEMI_TRANSITIVE,
    Orientation,
    decide_semi_transitive,
    find_shortcut,
    find_w5_obstruction,
    is_acyclic,
    natural_orientation,
    obstruction_scan,
)
from .survey import FAMILIES, SweepSpec, run_sweep, verify_report
from .words import (
    FOUND,
    REFUTED,
    construct_word_3reg,
    construct_word_consecutive,
    first_failure,
    format_compact,
    format_word,
    is_k_uniform,
    parse_compact,
    parse_word,
    refute_k_uniform,
    representation_number,
    search_representant,
)

EXIT_OK, EXIT_FALSE, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _emit(args: argparse.Namespace, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    else:
        print(text.rstrip("\n"))


def _dump(args: argparse.Namespace, obj: dict) -> None:
    _emit(args, json.dumps(obj, sort_keys=True))


def _graph_inputs(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--spec", help="circulant spec such as 'C(13;1,5)'")
    src.add_argument("--graph", help="graph JSON file {\"order\": n, \"edges\": [[i, j], ...]}")


def _load_graph(args: argparse.Namespace) -> tuple[Graph, str]:
    if args.spec:
        spec = CirculantSpec.parse(args.spec)
        return build_circulant(spec), str(spec)
    return Graph.from_json(Path(args.graph).read_text(encoding="utf-8")), args.graph


def _spec(args: argparse.Namespace) -> CirculantSpec:
    return CirculantSpec.parse(args.spec)


def _verdict_exit(verdict: str) -> int:
    return {SEMI_TRANSITIVE: EXIT_OK, NOT_SEMI_TRANSITIVE: EXIT_FALSE}.get(verdict, EXIT_INCONCLUSIVE)


def cmd_gen(args: argparse.Namespace) -> int:
    spec = _spec(args)
    g = build_circulant(spec)
    if args.format == "dot":
        _emit(args, g.to_dot())
    else:
        _dump(args, {"spec": str(spec), **json.loads(g.to_json())})
    return EXIT_OK


def cmd_orient_natural(args: argparse.Namespace) -> int:
    g, _ = _load_graph(args)
    o = natural_orientation(g)
    if args.format == "dot":
        _emit(args, o.to_dot())
    else:
        _dump(args, o.to_dict())
    return EXIT_OK


def cmd_check_st(args: argparse.Namespace) -> int:
    if args.orientation:
        o = Orientation.from_dict(json.loads(Path(args.orientation).read_text(encoding="utf-8")))
    else:
        o = natural_orientation(build_circulant(_spec(args)))
    if not is_acyclic(o):
        _dump(args, {"verdict": NOT_SEMI_TRANSITIVE, "reason": "cyclic"})
        return EXIT_FALSE
    sc = find_shortcut(o)
    if sc is None:
        _dump(args, {"verdict": SEMI_TRANSITIVE})
        return EXIT_OK
    _dump(args, {"verdict": NOT_SEMI_TRANSITIVE, "shortcut": sc.to_dict()})
    return EXIT_FALSE


def cmd_decide_st(args: argparse.Namespace) -> int:
    g, name = _load_graph(args)
    v = decide_semi_transitive(g, args.budget)
    _dump(args, {"graph": name, **v.to_dict()})
    return _verdict_exit(v.verdict)


def cmd_find_w5(args: argparse.Namespace) -> int:
    spec = _spec(args)
    w = find_w5_obstruction(spec)
    if w is None:
        _dump(args, {"spec": str(spec), "w5": None})
        return EXIT_FALSE
    _dump(args, {"spec": str(spec), "w5": w.to_dict()})
    return EXIT_OK


def cmd_scan_obstruction(args: argparse.Namespace) -> int:
    g, name = _load_graph(args)
    ob = obstruction_scan(g, args.max_order, args.budget)
    if ob is None:
        _dump(args, {"graph": name, "obstruction": None, "max_order": args.max_order})
        return EXIT_INCONCLUSIVE
    _dump(args, {"graph": name, "verdict": NOT_SEMI_TRANSITIVE, "obstruction": ob.to_dict()})
    return EXIT_FALSE


def _word_out(args: argparse.Namespace, spec: CirculantSpec, w: tuple[int, ...]) -> int:
    fail = first_failure(w, build_circulant(spec))
    out = {
        "spec": str(spec),
        "word": format_word(w),
        "uniform": is_k_uniform(w),
        "represents": fail is None,
    }
    if spec.n <= 36:
        out["compact"] = format_compact(w)
    if fail is not None:
        out["failing_pair"] = list(fail)
    _dump(args, out)
    return EXIT_OK if fail is None else EXIT_FALSE


def cmd_word_consecutive(args: argparse.Namespace) -> int:
    spec = _spec(args)
    return _word_out(args, spec, construct_word_consecutive(spec))


def cmd_word_3reg(args: argparse.Namespace) -> int:
    spec = _spec(args)
    return _word_out(args, spec, construct_word_3reg(spec))


def cmd_verify_word(args: argparse.Namespace) -> int:
    g, name = _load_graph(args)
    w = parse_word(args.word) if args.word is not None else parse_compact(args.compact)
    fail = first_failure(w, g)
    out = {"graph": name, "word": format_word(w), "uniform": is_k_uniform(w), "represents": fail is None}
    if fail is not None:
        out["failing_pair"] = list(fail)
    _dump(args, out)
    return EXIT_OK if fail is None else EXIT_FALSE


def cmd_search_word(args: argparse.Namespace) -> int:
    g, name = _load_graph(args)
    res = search_representant(g, args.k, args.budget)
    status = FOUND if res.found else (REFUTED if res.exhausted else "inconclusive")
    _dump(
        args,
        {
            "graph": name,
            "k": args.k,
            "status": status,
            "word": None if res.word is None else format_word(res.word),
            "nodes_explored": res.nodes,
        },
    )
    return {FOUND: EXIT_OK, REFUTED: EXIT_FALSE}.get(status, EXIT_INCONCLUSIVE)


def cmd_refute_uniform(args: argparse.Namespace) -> int:
    g, name = _load_graph(args)
    cert = refute_k_uniform(g, args.k, args.budget)
    _dump(args, {"graph": name, **cert.to_dict()})
    return {FOUND: EXIT_OK, REFUTED: EXIT_FALSE}.get(cert.status, EXIT_INCONCLUSIVE)


def cmd_repnum(args: argparse.Namespace) -> int:
    g, name = _load_graph(args)
    b = representation_number(g, args.k_max, args.budget, graph_id=name)
    _dump(args, b.to_dict())
    if b.upper is not None and b.lower_certified:
        return EXIT_OK
    if b.upper is None and b.lower_certified:
        return EXIT_FALSE  # certified: no representant up to k_max
    return EXIT_INCONCLUSIVE


def cmd_sweep(args: argparse.Namespace) -> int:
    if not args.out:
        raise UsageError("sweep needs --out <path>")
    s = SweepSpec(args.family, args.n_min, args.n_max, args.budget, tuple(args.d))
    report = run_sweep(s, args.out, threads=args.threads)
    print(json.dumps({"report": str(report.path), **report.summary}, sort_keys=True))
    return EXIT_OK if report.all_pass else EXIT_FALSE


def cmd_verify_report(args: argparse.Namespace) -> int:
    check = verify_report(args.path)
    print(json.dumps({"report": args.path, "ok": check.ok, "problems": check.problems}, sort_keys=True))
    return EXIT_OK if check.ok else EXIT_FALSE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="circst", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, func, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        p.add_argument("--out", help="write output to this path instead of stdout")
        p.add_argument("--threads", type=int, default=1, help="worker processes (sweeps only)")
        return p

    p = add("gen", cmd_gen, "build a circulant graph")
    p.add_argument("--spec", required=True)
    p.add_argument("--format", choices=("json", "dot"), default="json")

    p = add("orient-natural", cmd_orient_natural, "orient every edge from smaller to larger label")
    _graph_inputs(p)
    p.add_argument("--format", choices=("json", "dot"), default="json")

    p = add("check-st", cmd_check_st, "check an orientation for semi-transitivity")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--orientation", help="orientation JSON {\"order\": n, \"arcs\": [[u, v], ...]}")
    src.add_argument("--spec", help="use the natural orientation of this circulant")

    p = add("decide-st", cmd_decide_st, "decide semi-transitivity by search")
    _graph_inputs(p)
    p.add_argument("--budget", type=int, default=None, help="node-expansion limit")

    p = add("find-w5", cmd_find_w5, "check the W5 witness set in C(n; t..2t)")
    p.add_argument("--spec", required=True)

    p = add("scan-obstruction", cmd_scan_obstruction, "scan induced subgraphs for a non-semi-transitive one")
    _graph_inputs(p)
    p.add_argument("--max-order", type=int, default=7)
    p.add_argument("--budget", type=int, default=None)

    p = add("word-consecutive", cmd_word_consecutive, "2-uniform word for C(n; 1..k)")
    p.add_argument("--spec", required=True)

    p = add("word-3reg", cmd_word_3reg, "3-uniform word for C(2n; a, n)")
    p.add_argument("--spec", required=True)

    p = add("verify-word", cmd_verify_word, "check that a word represents a graph")
    _graph_inputs(p)
    wsrc = p.add_mutually_exclusive_group(required=True)
    wsrc.add_argument("--word", help="space-separated decimal letters")
    wsrc.add_argument("--compact", help="base-36 letters, one character each")

    p = add("search-word", cmd_search_word, "search for a k-uniform representant")
    _graph_inputs(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--budget", type=int, default=None)

    p = add("refute-uniform", cmd_refute_uniform, "certify that no k-uniform representant exists")
    _graph_inputs(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--budget", type=int, default=10**9)

    p = add("repnum", cmd_repnum, "bracket the representation number")
    _graph_inputs(p)
    p.add_argument("--k-max", type=int, default=3)
    p.add_argument("--budget", type=int, default=None)

    p = add("sweep", cmd_sweep, "run a theorem-verification sweep")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--budget", type=int, default=1_000_000)
    p.add_argument("--d", type=int, nargs="+", default=[1, 3], help="multipliers for product-iso")

    p = add("verify-report", cmd_verify_report, "re-check every witness in a sweep report")
    p.add_argument("path")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"circst {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
