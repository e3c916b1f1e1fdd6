"""Alternation in words, word transformations and uniform-representant search."""

from __future__ import annotations

import itertools
import math
import string
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graph import CirculantSpec, Graph, bits

Word = tuple[int, ...]

_B36 = string.digits + string.ascii_lowercase


def format_word(w: Sequence[int]) -> str:
    return " ".join(map(str, w))


def parse_word(text: str) -> Word:
    return tuple(int(tok) for tok in text.split())


def format_compact(w: Sequence[int]) -> str:
    if any(not 0 <= x < 36 for x in w):
        raise ValueError("compact form needs letters in 0..35")
    return "".join(_B36[x] for x in w)


def parse_compact(text: str) -> Word:
    try:
        return tuple(_B36.index(c) for c in text.strip().lower())
    except ValueError:
        raise ValueError(f"not a compact word: {text!r}") from None


def restrict(w: Sequence[int], letters: Iterable[int]) -> Word:
    keep = set(letters)
    return tuple(x for x in w if x in keep)


def letters_present(w: Sequence[int]) -> set[int]:
    return set(w)


def alternates(w: Sequence[int], x: int, y: int) -> bool:
    if x == y:
        raise ValueError("alternation needs two distinct letters")
    r = restrict(w, (x, y))
    if x not in r or y not in r:
        raise ValueError(f"letters {x}, {y} must both occur in the word")
    return all(a != b for a, b in zip(r, r[1:]))


def _positions(w: Sequence[int], order: int) -> list[list[int]]:
    pos: list[list[int]] = [[] for _ in range(order)]
    for p, x in enumerate(w):
        pos[x].append(p)
    return pos


def _alternate_positions(px: list[int], py: list[int]) -> bool:
    if abs(len(px) - len(py)) > 1:
        return False
    merged = sorted([(p, 0) for p in px] + [(p, 1) for p in py])
    return all(a[1] != b[1] for a, b in zip(merged, merged[1:]))


def first_failure(w: Sequence[int], g: Graph) -> tuple[int, int] | None:
    """First vertex pair whose alternation in ``w`` disagrees with adjacency in ``g``."""
    if set(w) != set(range(g.order)):
        raise ValueError(f"word alphabet {sorted(set(w))} does not match vertices 0..{g.order - 1}")
    pos = _positions(w, g.order)
    for x, y in itertools.combinations(range(g.order), 2):
        if _alternate_positions(pos[x], pos[y]) != g.adjacent(x, y):
            return (x, y)
    return None


def represents(w: Sequence[int], g: Graph) -> bool:
    return first_failure(w, g) is None


def initial_permutation(w: Sequence[int]) -> Word:
    seen: set[int] = set()
    out = []
    for x in w:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return tuple(out)


def final_permutation(w: Sequence[int]) -> Word:
    return initial_permutation(w[::-1])[::-1]


def reverse(w: Sequence[int]) -> Word:
    return tuple(w[::-1])


def rotate(w: Sequence[int], cut: int) -> Word:
    """``uv -> vu`` with ``u = w[:cut]``."""
    w = tuple(w)
    return w[cut:] + w[:cut]


def is_k_uniform(w: Sequence[int]) -> int | None:
    counts = {}
    for x in w:
        counts[x] = counts.get(x, 0) + 1
    values = set(counts.values())
    return values.pop() if len(values) == 1 else None


def extend_by_initial_perm(w: Sequence[int]) -> Word:
    return initial_permutation(w) + tuple(w)


def occurrence_neighbor_filter(w: Sequence[int], x: int) -> list[set[int]]:
    """For each gap between consecutive copies of ``x``, the letters occurring exactly once in it.

    In a representant, every neighbour of ``x`` lies in each of these sets.
    """
    pos = [p for p, c in enumerate(w) if c == x]
    if len(pos) < 2:
        raise ValueError(f"letter {x} occurs fewer than two times")
    gaps = []
    for a, b in zip(pos, pos[1:]):
        counts: dict[int, int] = {}
        for c in w[a + 1 : b]:
            counts[c] = counts.get(c, 0) + 1
        gaps.append({c for c, k in counts.items() if k == 1})
    return gaps


def construct_word_consecutive(spec: CirculantSpec) -> Word:
    """2-uniform representant of ``C(n; 1..k)``: the image of ``0 1 .. n-1`` under ``i -> i (i-k)``.

    When ``2k == n`` the graph is complete and the morphism puts ``0`` and
    ``k`` in the pattern ``0 k k 0``, so the permutation is doubled instead.
    """
    n, k = spec.n, spec.R[-1]
    if spec.R != tuple(range(1, k + 1)):
        raise ValueError(f"{spec} is not of the form C(n; 1, 2, ..., k)")
    if 2 * k == n:
        return tuple(range(n)) * 2
    return tuple(itertools.chain.from_iterable((i, (i - k) % n) for i in range(n)))


def construct_word_3reg(spec: CirculantSpec) -> Word:
    """3-uniform representant of ``C(2n; a, n)`` with ``gcd(a, 2n) = 1``.

    Applies ``i -> i (i-a) (i+n)`` to ``0, a, 2a, ..., (2n-1)a`` (mod 2n).
    """
    N = spec.n
    if len(spec.R) != 2 or N % 2 or spec.R[1] != N // 2:
        raise ValueError(f"{spec} is not of the form C(2n; a, n)")
    a, half = spec.R
    if math.gcd(a, N) != 1:
        raise ValueError(f"gcd(a, 2n) = gcd({a}, {N}) must be 1")
    u = [(j * a) % N for j in range(N)]
    return tuple(itertools.chain.from_iterable((i, (i - a) % N, (i + half) % N) for i in u))


PRUNING_RULES = (
    "first-letter-fixed",
    "adjacent-pair-broken",
    "completed-letter-lookahead",
)


@dataclass
class SearchResult:
    k: int
    word: Word | None
    exhausted: bool
    nodes: int
    rules: tuple[str, ...] = PRUNING_RULES

    @property
    def found(self) -> bool:
        return self.word is not None


class _Exhausted(Exception):
    pass


class _WordSearch:
    """Position-by-position construction of a k-uniform word.

    Tracks, per letter, the set of letters seen since its last copy. Placing a
    letter again breaks alternation with every letter not in that set; broken
    adjacent pairs are pruned at once. This is the gap filter on neighbours:
    each neighbour must sit exactly once in every gap. When a letter places its
    last copy, every other letter's fate with it is fixed (the remaining copies
    follow it consecutively in the restriction), so non-adjacent pairs that can
    no longer break and adjacent pairs that must break are pruned there.
    """

    def __init__(self, g: Graph, k: int, budget: int | None):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.g = g
        self.n = g.order
        self.k = k
        self.budget = budget
        self.nodes = 0
        self.length = self.n * k
        self.word = [0] * self.length
        self.count = [0] * self.n
        self.since = [0] * self.n
        self.all_bits = (1 << self.n) - 1
        self.broken = [0] * self.n

    def _newly_broken(self, x: int) -> int | None:
        """Pairs broken by placing ``x`` next, or None if the placement is pruned."""
        g, k = self.g, self.k
        newly = 0
        if self.count[x]:
            newly = self.all_bits & ~self.since[x] & ~(1 << x) & ~self.broken[x]
            if newly & g.adj[x]:
                return None
        if self.count[x] + 1 == k:
            broken = self.broken[x] | newly
            for y in range(self.n):
                if y == x:
                    continue
                will_break = bool(broken >> y & 1) or k - self.count[y] >= 2
                if will_break == g.adjacent(x, y):
                    return None
        return newly

    def _search(self, pos: int) -> bool:
        if pos == self.length:
            return True
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise _Exhausted
        candidates = [0] if pos == 0 else [x for x in range(self.n) if self.count[x] < self.k]
        for x in candidates:
            newly = self._newly_broken(x)
            if newly is None:
                continue
            saved_since = self.since[:]
            self.broken[x] |= newly
            for y in bits(newly):
                self.broken[y] |= 1 << x
            self.count[x] += 1
            self.word[pos] = x
            for y in range(self.n):
                self.since[y] |= 1 << x
            self.since[x] = 0
            if self._search(pos + 1):
                return True
            self.count[x] -= 1
            self.since = saved_since
            self.broken[x] &= ~newly
            for y in bits(newly):
                self.broken[y] &= ~(1 << x)
        return False

    def run(self) -> SearchResult:
        if self.n == 0:
            return SearchResult(self.k, (), True, 0)
        try:
            ok = self._search(0)
        except _Exhausted:
            return SearchResult(self.k, None, False, self.budget or 0)
        if not ok:
            return SearchResult(self.k, None, True, self.nodes)
        w = tuple(self.word)
        if not represents(w, self.g) or is_k_uniform(w) != self.k:
            raise AssertionError("word search returned a word that fails re-verification")
        return SearchResult(self.k, w, True, self.nodes)


def search_representant(g: Graph, k: int, budget: int | None = None) -> SearchResult:
    """Search for a k-uniform word representing ``g``.

    The word is forced to start with letter 0, which loses nothing: any
    uniform representant can be rotated to start at a copy of 0. ``budget``
    caps node expansions; when it runs out the result is not exhausted and a
    missing word is inconclusive.
    """
    return _WordSearch(g, k, budget).run()


REFUTED = "refuted"
FOUND = "found"
INCONCLUSIVE = "inconclusive"

# alphabets beyond this size are still attempted for k=2, but only up to the node limit
K2_GUARANTEED_ALPHABET = 7
DEFAULT_NODE_LIMIT = 10**9


@dataclass
class UniformCertificate:
    k: int
    status: str
    nodes_explored: int
    word: Word | None = None
    rules: tuple[str, ...] = PRUNING_RULES

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "status": self.status,
            "nodes_explored": self.nodes_explored,
            "witness": None if self.word is None else format_word(self.word),
            "pruning_rules": list(self.rules),
        }


def refute_k_uniform(g: Graph, k: int, node_limit: int | None = DEFAULT_NODE_LIMIT) -> UniformCertificate:
    """Try to certify that no k-uniform word represents ``g``.

    Returns status ``refuted`` only when the whole search space was covered;
    ``found`` carries a representant; ``inconclusive`` means the node limit ran out.
    """
    res = search_representant(g, k, node_limit)
    if res.found:
        return UniformCertificate(k, FOUND, res.nodes, res.word)
    if res.exhausted:
        return UniformCertificate(k, REFUTED, res.nodes)
    return UniformCertificate(k, INCONCLUSIVE, res.nodes)


@dataclass
class RepnBracket:
    graph_id: str
    lower: int
    lower_certified: bool
    upper: int | None
    witness: Word | None
    nodes_explored: int
    attempts: list[UniformCertificate] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "graph": self.graph_id,
            "lower": self.lower,
            "lower_certified": self.lower_certified,
            "upper": self.upper,
            "witness": None if self.witness is None else format_word(self.witness),
            "nodes_explored": self.nodes_explored,
            "attempts": [a.to_dict() for a in self.attempts],
        }


def representation_number(g: Graph, k_max: int, budget: int | None = None, graph_id: str = "") -> RepnBracket:
    """Bracket the representation number by ascending uniform searches.

    A refutation at k also refutes every smaller k (prepending the initial
    permutation lifts a (k-1)-uniform representant to a k-uniform one), so
    ``lower`` is one more than the largest refuted k and is always backed by a
    certificate. ``lower_certified`` is False when some attempt ran out of
    budget, i.e. the true value may lie above ``lower``.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    attempts = []
    lower = 1
    upper = witness = None
    for k in range(1, k_max + 1):
        cert = refute_k_uniform(g, k, budget)
        attempts.append(cert)
        if cert.status == REFUTED:
            lower = k + 1
        elif cert.status == FOUND:
            upper, witness = k, cert.word
            break
    certified = all(a.status != INCONCLUSIVE for a in attempts)
    return RepnBracket(
        graph_id, lower, certified, upper, witness, sum(a.nodes_explored for a in attempts), attempts
    )
