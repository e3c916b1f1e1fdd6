"""Parameter sweeps over circulant families with resumable JSON-lines reports.

A report file holds a header line, one record per instance and a trailing
summary line. Every line is canonical JSON (sorted keys, no whitespace) and
carries no timing, so re-running a sweep reproduces the file byte for byte.
Wall-clock timings go to a ``.timings.jsonl`` sidecar.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterator

from . import __version__
from .graph import CirculantSpec, build_circulant, check_mapping, induced_subgraph, is_bipartite
from .graph import p2_product, valid_connection_sets, verify_p2_product_iso, wheel
from .orient import (
    NOT_SEMI_TRANSITIVE,
    ShortcutWitness,
    W5Witness,
    bipartite_transitive_orientation,
    check_w5_witness,
    decide_semi_transitive,
    exhaustive_semi_transitive,
    find_shortcut,
    find_w5_obstruction,
    is_semi_transitive,
    is_transitive,
    natural_orientation,
    orientation_from_colouring,
    w5_witness_set,
)
from .words import construct_word_3reg, construct_word_consecutive, first_failure, format_word
from .words import is_k_uniform, parse_word

SCHEMA = 1

FAMILIES = (
    "a1-quarter",
    "consecutive-to-half",
    "t-to-2t",
    "consecutive-1-to-k",
    "three-regular",
    "bipartite-odd",
    "product-iso",
)


@dataclass(frozen=True)
class SweepSpec:
    family: str
    n_min: int
    n_max: int
    budget: int = 1_000_000
    d_values: tuple[int, ...] = (1, 3)

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if self.n_min < 2 or self.n_max < self.n_min:
            raise ValueError(f"empty or invalid n range [{self.n_min}, {self.n_max}]")
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        object.__setattr__(self, "d_values", tuple(self.d_values))
        if not self.d_values or any(d <= 0 for d in self.d_values):
            raise ValueError("d values must be positive")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["d_values"] = list(self.d_values)
        return out


@dataclass(frozen=True)
class Instance:
    family: str
    spec: str
    d: int = 0

    @property
    def key(self) -> str:
        return f"{self.family}:{self.spec}" + (f":d={self.d}" if self.d else "")


@dataclass
class SweepReport:
    path: Path
    records: list[dict]
    summary: dict

    @property
    def all_pass(self) -> bool:
        return self.summary["fail"] == 0


def instances(s: SweepSpec) -> Iterator[Instance]:
    f = s.family
    for n in range(s.n_min, s.n_max + 1):
        if f == "a1-quarter":
            for R in valid_connection_sets(n, -(-(n + 1) // 4)):
                yield Instance(f, str(CirculantSpec(n, R)))
        elif f == "consecutive-to-half":
            for t in range(1, n // 2 + 1):
                yield Instance(f, str(CirculantSpec(n, tuple(range(t, n // 2 + 1)))))
        elif f == "t-to-2t":
            for t in range(3, n):
                if 5 * t >= n + 1 and 4 * t <= n - 1:
                    yield Instance(f, str(CirculantSpec(n, tuple(range(t, 2 * t + 1)))))
        elif f == "consecutive-1-to-k":
            for k in range(1, n):
                if 2 * k < n + 1:
                    yield Instance(f, str(CirculantSpec(n, tuple(range(1, k + 1)))))
        elif f == "three-regular":
            if n % 2 == 0 and n >= 4:
                half = n // 2
                for a in range(1, half):
                    if math.gcd(a, n) == 1:
                        yield Instance(f, str(CirculantSpec(n, (a, half))))
        elif f == "bipartite-odd":
            if n % 2 == 0:
                for R in valid_connection_sets(n):
                    if all(a % 2 for a in R):
                        yield Instance(f, str(CirculantSpec(n, R)))
        elif f == "product-iso":
            if n % 2 == 1 and n >= 3:
                for R in valid_connection_sets(n):
                    for d in s.d_values:
                        if math.gcd(2 * n, d) == 1:
                            yield Instance(f, str(CirculantSpec(n, R)), d)


@lru_cache(maxsize=None)
def _w5_orientations_checked() -> int:
    w5 = wheel(5)
    if exhaustive_semi_transitive(w5) is not None:
        raise AssertionError("W5 has a semi-transitive orientation")
    return 1 << len(w5.edges)


def run_instance(inst: Instance, budget: int) -> dict:
    spec = CirculantSpec.parse(inst.spec)
    rec: dict = {"schema": SCHEMA, "key": inst.key, "family": inst.family, "spec": inst.spec}
    f = inst.family
    nodes = 0
    if f in ("a1-quarter", "consecutive-to-half"):
        rec["check"] = "natural-orientation-semi-transitive"
        sc = find_shortcut(natural_orientation(build_circulant(spec)))
        ok = sc is None
        rec["witness"] = {"orientation": "natural"} if ok else {"shortcut": sc.to_dict()}
    elif f == "bipartite-odd":
        rec["check"] = "bipartite-orientation-transitive"
        g = build_circulant(spec)
        o = bipartite_transitive_orientation(g)
        ok = is_transitive(o) and is_semi_transitive(o)
        rec["witness"] = {"orientation": "bipartite", "colouring": is_bipartite(g)}
    elif f == "t-to-2t":
        rec["check"] = "w5-obstruction"
        w = find_w5_obstruction(spec)
        ok = w is not None
        if ok:
            verdict = decide_semi_transitive(wheel(5), budget)
            nodes = verdict.budget_spent
            ok = verdict.verdict == NOT_SEMI_TRANSITIVE
            rec["witness"] = {**w.to_dict(), "w5_orientations_checked": _w5_orientations_checked()}
        else:
            vs = w5_witness_set(spec.n, spec.R[0])
            h = induced_subgraph(build_circulant(spec), vs)
            rec["witness"] = {"vertices": list(vs), "induced_edges": [list(e) for e in h.sorted_edges()]}
    elif f in ("consecutive-1-to-k", "three-regular"):
        rec["check"] = "word-represents"
        if f == "consecutive-1-to-k":
            w, k = construct_word_consecutive(spec), 2
        else:
            w, k = construct_word_3reg(spec), 3
        fail = first_failure(w, build_circulant(spec))
        ok = fail is None and is_k_uniform(w) == k
        rec["witness"] = {"word": format_word(w), "uniform": k}
        if fail is not None:
            rec["witness"]["failing_pair"] = list(fail)
    elif f == "product-iso":
        rec["check"] = "product-isomorphism"
        half = (spec.n - 1) // 2
        iso = verify_p2_product_iso(half, spec.R, inst.d)
        ok = iso.isomorphic
        rec["witness"] = iso.to_dict()
    else:
        raise ValueError(f"unknown family {f!r}")
    rec["verdict"] = "PASS" if ok else "FAIL"
    rec["nodes"] = nodes
    return rec


def _dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _header(s: SweepSpec) -> dict:
    return {"schema": SCHEMA, "sweep": s.to_dict(), "toolkit_version": __version__}


def _run_pair(args: tuple[Instance, int]) -> tuple[dict, float]:
    t0 = time.perf_counter()
    rec = run_instance(*args)
    return rec, time.perf_counter() - t0


def run_sweep(s: SweepSpec, out: str | Path, threads: int = 1) -> SweepReport:
    """Run every instance of the family, appending records to ``out``.

    An existing report for the same sweep is resumed: completed keys are kept
    and skipped, a stale summary line is dropped and rewritten at the end.
    """
    out = Path(out)
    header = _header(s)
    done: dict[str, dict] = {}
    if out.exists() and out.stat().st_size:
        lines = out.read_text(encoding="utf-8").splitlines()
        first = json.loads(lines[0])
        if first != header:
            raise ValueError(f"{out} holds a different sweep; refusing to resume")
        for line in lines[1:]:
            obj = json.loads(line)
            if "summary" in obj:
                break
            done[obj["key"]] = obj
        body = [lines[0]] + [_dumps(r) for r in done.values()]
        out.write_text("\n".join(body) + "\n", encoding="utf-8")
    else:
        out.write_text(_dumps(header) + "\n", encoding="utf-8")

    todo = [inst for inst in instances(s) if inst.key not in done]
    sidecar = out.with_name(out.name + ".timings.jsonl")
    with out.open("a", encoding="utf-8") as fh, sidecar.open("a", encoding="utf-8") as th:
        if threads > 1:
            pool = ProcessPoolExecutor(max_workers=threads)
            results = pool.map(_run_pair, [(i, s.budget) for i in todo], chunksize=8)
        else:
            pool = None
            results = map(_run_pair, [(i, s.budget) for i in todo])
        try:
            for rec, seconds in results:
                done[rec["key"]] = rec
                fh.write(_dumps(rec) + "\n")
                fh.flush()
                th.write(_dumps({"key": rec["key"], "seconds": round(seconds, 6)}) + "\n")
        finally:
            if pool is not None:
                pool.shutdown()

        order = [inst.key for inst in instances(s)]
        records = [done[k] for k in order if k in done]
        passed = sum(r["verdict"] == "PASS" for r in records)
        summary = {
            "family": s.family,
            "total": len(records),
            "pass": passed,
            "fail": len(records) - passed,
            "toolkit_version": __version__,
            "deterministic": True,
        }
        fh.write(_dumps({"schema": SCHEMA, "summary": summary}) + "\n")
    return SweepReport(out, records, summary)


@dataclass
class ReportCheck:
    ok: bool
    problems: list[str]

    def __bool__(self) -> bool:
        return self.ok


def _check_record(rec: dict) -> str | None:
    """Re-validate one record's witness; return a problem description or None."""
    spec = CirculantSpec.parse(rec["spec"])
    g = build_circulant(spec)
    wit = rec["witness"]
    f = rec["family"]
    passed = rec["verdict"] == "PASS"
    if f in ("a1-quarter", "consecutive-to-half"):
        o = natural_orientation(g)
        if passed:
            return None if wit == {"orientation": "natural"} and is_semi_transitive(o) else "natural orientation is not semi-transitive"
        sc = ShortcutWitness.from_dict(wit["shortcut"])
        return None if sc.validate(o) else "shortcut counterexample does not validate"
    if f == "bipartite-odd":
        o = orientation_from_colouring(g, wit["colouring"])
        good = is_transitive(o) and is_semi_transitive(o)
        return None if good == passed else "bipartite orientation verdict does not reproduce"
    if f == "t-to-2t":
        if passed:
            w = W5Witness(tuple(wit["vertices"]), tuple(wit["mapping"]))
            return None if check_w5_witness(spec, w) else "W5 isomorphism does not validate"
        h = induced_subgraph(g, wit["vertices"])
        same = [list(e) for e in h.sorted_edges()] == wit["induced_edges"]
        return None if same and find_w5_obstruction(spec) is None else "W5 failure record does not reproduce"
    if f in ("consecutive-1-to-k", "three-regular"):
        w = parse_word(wit["word"])
        try:
            fail = first_failure(w, g)
        except ValueError as exc:
            return f"word alphabet invalid: {exc}"
        good = fail is None and is_k_uniform(w) == wit["uniform"]
        if passed:
            return None if good else f"word does not represent the graph (pair {fail})"
        return None if not good and list(fail or []) == wit.get("failing_pair") else "failing pair does not reproduce"
    if f == "product-iso":
        target = build_circulant(CirculantSpec.parse(wit["target"]))
        product = p2_product(g)
        if passed:
            return None if check_mapping(target, product, wit["mapping"]) else "isomorphism mapping does not validate"
        return None if wit["mapping"] is None else "failed record carries a mapping"
    return f"unknown family {f!r}"


def verify_report(path: str | Path) -> ReportCheck:
    """Re-check every witness in a report without re-running any search."""
    problems = []
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"{path} is empty")
    header = json.loads(lines[0])
    if header.get("schema") != SCHEMA or "sweep" not in header:
        raise ValueError(f"{path} does not start with a schema {SCHEMA} sweep header")
    summary = None
    count = passed = 0
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{lineno}: malformed JSON ({exc})") from None
        if "summary" in rec:
            summary = rec["summary"]
            continue
        if rec.get("schema") != SCHEMA:
            raise ValueError(f"{path}:{lineno}: unsupported schema {rec.get('schema')!r}")
        count += 1
        passed += rec["verdict"] == "PASS"
        try:
            problem = _check_record(rec)
        except (KeyError, TypeError, ValueError) as exc:
            problem = f"malformed witness ({exc})"
        if problem:
            problems.append(f"line {lineno} [{rec.get('key')}]: {problem}")
    if summary is None:
        problems.append("missing summary line")
    elif (summary["total"], summary["pass"]) != (count, passed):
        problems.append("summary counts do not match records")
    return ReportCheck(not problems, problems)
