"""Circulant and auxiliary graphs, plus the structural predicates built on them.

Vertices are always the dense labels ``0..order-1``. Adjacency is kept as a
list of integer bitmasks so the search code in :mod:`circst.orient` and
:mod:`circst.words` can work on sets with plain integer arithmetic.
"""

from __future__ import annotations

import itertools
import json
import math
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Iterable, Sequence

ISO_ORDER_LIMIT = 12

_SPEC_RE = re.compile(r"^C\((\d+);(\d+(?:,\d+)*)\)$")


@dataclass(frozen=True)
class CirculantSpec:
    """The pair ``(n, R)`` describing ``C(n; R)``."""

    n: int
    R: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "R", tuple(self.R))
        if self.n < 2:
            raise ValueError(f"circulant order must be >= 2, got {self.n}")
        if not self.R:
            raise ValueError("connection set must be nonempty")
        if any(b <= a for a, b in zip(self.R, self.R[1:])):
            raise ValueError(f"connection set must be strictly increasing: {self.R}")
        if self.R[0] <= 0:
            raise ValueError(f"connection values must be positive: {self.R}")
        # a_k < (n+1)/2, written without fractions
        if 2 * self.R[-1] >= self.n + 1:
            raise ValueError(f"largest connection value {self.R[-1]} must be < (n+1)/2 for n={self.n}")

    @classmethod
    def parse(cls, text: str) -> "CirculantSpec":
        m = _SPEC_RE.match(text.strip())
        if m is None:
            raise ValueError(f"not a circulant spec: {text!r} (expected e.g. 'C(13;1,5)')")
        return cls(int(m.group(1)), tuple(int(a) for a in m.group(2).split(",")))

    def __str__(self) -> str:
        return f"C({self.n};{','.join(map(str, self.R))})"

    @property
    def degree(self) -> int:
        # a value equal to n/2 joins each vertex to a single antipode
        return sum(1 if 2 * a == self.n else 2 for a in self.R)


@dataclass(frozen=True)
class Graph:
    order: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        norm = set()
        for e in self.edges:
            i, j = e
            if i == j:
                raise ValueError(f"self-loop at {i}")
            if i > j:
                i, j = j, i
            if i < 0 or j >= self.order:
                raise ValueError(f"edge {e} out of range for order {self.order}")
            norm.add((i, j))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, order: int, edges: Iterable[Sequence[int]]) -> "Graph":
        return cls(order, frozenset((int(i), int(j)) for i, j in edges))

    @cached_property
    def adj(self) -> tuple[int, ...]:
        masks = [0] * self.order
        for i, j in self.edges:
            masks[i] |= 1 << j
            masks[j] |= 1 << i
        return tuple(masks)

    def adjacent(self, i: int, j: int) -> bool:
        return bool(self.adj[i] >> j & 1)

    def neighbors(self, v: int) -> list[int]:
        return bits(self.adj[v])

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def degrees(self) -> list[int]:
        return [m.bit_count() for m in self.adj]

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def to_json(self) -> str:
        return json.dumps({"order": self.order, "edges": [list(e) for e in self.sorted_edges()]})

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        data = json.loads(text)
        return cls.from_edges(data["order"], data["edges"])

    def to_dot(self, name: str = "G") -> str:
        lines = [f"graph {name} {{"]
        lines += [f"  {v};" for v in range(self.order) if not self.adj[v]]
        lines += [f"  {i} -- {j};" for i, j in self.sorted_edges()]
        lines.append("}")
        return "\n".join(lines) + "\n"


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask``, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def build_circulant(spec: CirculantSpec) -> Graph:
    n = spec.n
    edges = set()
    for i in range(n):
        for a in spec.R:
            j = (i + a) % n
            edges.add((min(i, j), max(i, j)))
    return Graph(n, frozenset(edges))


def is_connected_spec(spec: CirculantSpec) -> bool:
    return reduce(math.gcd, spec.R, spec.n) == 1


def components(g: Graph) -> list[list[int]]:
    seen = 0
    comps = []
    for s in range(g.order):
        if seen >> s & 1:
            continue
        comp, queue = [], deque([s])
        seen |= 1 << s
        while queue:
            v = queue.popleft()
            comp.append(v)
            for u in bits(g.adj[v] & ~seen):
                seen |= 1 << u
                queue.append(u)
        comps.append(sorted(comp))
    return comps


def is_connected(g: Graph) -> bool:
    return g.order <= 1 or len(components(g)) == 1


def is_bipartite(g: Graph) -> list[int] | None:
    """Return a proper 0/1 colouring, or None if the graph has an odd cycle.

    Each component's smallest vertex gets colour 0.
    """
    colour = [-1] * g.order
    for s in range(g.order):
        if colour[s] >= 0:
            continue
        colour[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for u in bits(g.adj[v]):
                if colour[u] < 0:
                    colour[u] = 1 - colour[v]
                    queue.append(u)
                elif colour[u] == colour[v]:
                    return None
    return colour


def induced_subgraph(g: Graph, vs: Sequence[int]) -> Graph:
    """Subgraph induced on ``vs``, relabelled ``0..len(vs)-1`` in list order."""
    if len(set(vs)) != len(vs):
        raise ValueError(f"duplicate vertices in {list(vs)}")
    for v in vs:
        if not 0 <= v < g.order:
            raise ValueError(f"vertex {v} out of range for order {g.order}")
    edges = [
        (a, b)
        for a, b in itertools.combinations(range(len(vs)), 2)
        if g.adjacent(vs[a], vs[b])
    ]
    return Graph.from_edges(len(vs), edges)


def _is_edge_preserving(g1: Graph, g2: Graph, mapping: Sequence[int]) -> bool:
    if sorted(mapping) != list(range(g2.order)):
        return False
    return all(
        g1.adjacent(i, j) == g2.adjacent(mapping[i], mapping[j])
        for i, j in itertools.combinations(range(g1.order), 2)
    )


def is_isomorphic_small(g1: Graph, g2: Graph) -> tuple[int, ...] | None:
    """Find a bijection ``mapping[v1] = v2`` preserving adjacency and non-adjacency.

    Backtracking over candidates of equal degree, extending a partial map only
    when it stays consistent with every already-mapped vertex. Complete for
    orders up to ``ISO_ORDER_LIMIT``.
    """
    if max(g1.order, g2.order) > ISO_ORDER_LIMIT:
        raise ValueError(f"isomorphism search is limited to order <= {ISO_ORDER_LIMIT}")
    if g1.order != g2.order or len(g1.edges) != len(g2.edges):
        return None
    if sorted(g1.degrees()) != sorted(g2.degrees()):
        return None
    n = g1.order
    deg1, deg2 = g1.degrees(), g2.degrees()
    # high-degree, then most-constrained vertices first
    order = sorted(range(n), key=lambda v: (-deg1[v], v))
    mapping = [-1] * n
    used = 0

    def extend(pos: int) -> bool:
        nonlocal used
        if pos == n:
            return True
        v = order[pos]
        for c in range(n):
            if used >> c & 1 or deg2[c] != deg1[v]:
                continue
            if any(g1.adjacent(v, order[p]) != g2.adjacent(c, mapping[order[p]]) for p in range(pos)):
                continue
            mapping[v] = c
            used |= 1 << c
            if extend(pos + 1):
                return True
            used &= ~(1 << c)
            mapping[v] = -1
        return False

    if not extend(0):
        return None
    result = tuple(mapping)
    if not _is_edge_preserving(g1, g2, result):
        raise AssertionError("isomorphism search returned a non-isomorphism")
    return result


def complete(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs at least 3 vertices")
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def path(n: int) -> Graph:
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def wheel(m: int) -> Graph:
    """Rim cycle on ``0..m-1`` plus hub ``m`` adjacent to all of it."""
    if m < 3:
        raise ValueError("wheel rim needs at least 3 vertices")
    rim = [(i, (i + 1) % m) for i in range(m)]
    return Graph.from_edges(m + 1, rim + [(i, m) for i in range(m)])


def prism(n: int) -> Graph:
    """P2 x C_n: layer ``l`` vertex ``j`` is ``l*n + j``."""
    if n < 3:
        raise ValueError("prism needs n >= 3")
    edges = []
    for j in range(n):
        edges += [(j, (j + 1) % n), (n + j, n + (j + 1) % n), (j, n + j)]
    return Graph.from_edges(2 * n, edges)


def mobius(n: int) -> Graph:
    if n < 3:
        raise ValueError("Mobius ladder needs n >= 3")
    return build_circulant(CirculantSpec(2 * n, (1, n)))


def p2_product(h: Graph) -> Graph:
    """Cartesian product P2 x h; copy ``l`` of vertex ``j`` is ``l*order + j``."""
    m = h.order
    edges = []
    for i, j in h.edges:
        edges += [(i, j), (m + i, m + j)]
    edges += [(j, m + j) for j in range(m)]
    return Graph.from_edges(2 * m, edges)


def fold(x: int, n: int) -> int:
    """Representative of ``{x, -x} mod n`` in ``0..n//2``."""
    x %= n
    return min(x, n - x)


@dataclass(frozen=True)
class ProductIsoRecord:
    m: int
    R: tuple[int, ...]
    d: int
    target: CirculantSpec
    method: str  # "residue-map" | "search" | "failed"
    mapping: tuple[int, ...] | None

    @property
    def isomorphic(self) -> bool:
        return self.mapping is not None

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "R": list(self.R),
            "d": self.d,
            "target": str(self.target),
            "method": self.method,
            "mapping": None if self.mapping is None else list(self.mapping),
        }


def product_iso_target(n: int, R: Sequence[int], d: int) -> CirculantSpec:
    """``C(2m; 2dR u {m})`` with ``m = 2n+1``, folded into a valid connection set."""
    m = 2 * n + 1
    vals = {fold(2 * d * a, 2 * m) for a in R} | {m}
    if 0 in vals or len(vals) != len(R) + 1:
        raise ValueError(f"2dR with d={d} does not reduce to a valid connection set mod {2 * m}")
    return CirculantSpec(2 * m, tuple(sorted(vals)))


def verify_p2_product_iso(n: int, R: Sequence[int], d: int = 1) -> ProductIsoRecord:
    """Check P2 x C(2n+1; R) against C(2(2n+1); 2dR u {2n+1}).

    Tries the residue map ``k -> (k mod 2, k * (2d)^-1 mod m)`` first (m odd, so
    Z_2m splits as Z_2 x Z_m); falls back to backtracking search when the
    order is small enough.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    m = 2 * n + 1
    if math.gcd(2 * m, d) != 1:
        raise ValueError(f"gcd(2(2n+1), d) must be 1, got gcd({2 * m}, {d}) = {math.gcd(2 * m, d)}")
    base = CirculantSpec(m, tuple(sorted(R)))
    product = p2_product(build_circulant(base))
    target_spec = product_iso_target(n, base.R, d)
    target = build_circulant(target_spec)

    inv = pow(2 * d, -1, m)
    # mapping[target vertex] = product vertex
    candidate = tuple((k % 2) * m + (k * inv) % m for k in range(2 * m))
    if _is_edge_preserving(target, product, candidate):
        return ProductIsoRecord(m, base.R, d, target_spec, "residue-map", candidate)
    if 2 * m <= ISO_ORDER_LIMIT:
        found = is_isomorphic_small(target, product)
        if found is not None:
            return ProductIsoRecord(m, base.R, d, target_spec, "search", found)
    return ProductIsoRecord(m, base.R, d, target_spec, "failed", None)


def check_mapping(g1: Graph, g2: Graph, mapping: Sequence[int]) -> bool:
    """True iff ``mapping`` is an isomorphism from g1 onto g2."""
    return g1.order == g2.order and len(mapping) == g1.order and _is_edge_preserving(g1, g2, mapping)


def valid_connection_sets(n: int, min_value: int = 1) -> Iterable[tuple[int, ...]]:
    """All valid connection sets for order ``n`` with smallest allowed value ``min_value``."""
    pool = list(range(max(1, min_value), n // 2 + 1))
    for r in range(1, len(pool) + 1):
        yield from itertools.combinations(pool, r)


def graph_catalog(order: int) -> list[Graph]:
    """One representative per isomorphism class of graphs on ``order`` vertices.

    Enumerates every edge subset and reduces it to the minimum edge bitmask
    over all vertex permutations; the permutation action is vectorised with
    numpy so order 6 (32768 subsets x 720 permutations) stays fast.
    """
    import numpy as np

    if order > 7:
        raise ValueError("catalog enumeration is limited to order <= 7")
    pairs = list(itertools.combinations(range(order), 2))
    index = {p: e for e, p in enumerate(pairs)}
    masks = np.arange(1 << len(pairs), dtype=np.int64)
    canon = masks.copy()
    edge_bits = [(masks >> e) & 1 for e in range(len(pairs))]
    for perm in itertools.permutations(range(order)):
        image = np.zeros_like(masks)
        for e, (i, j) in enumerate(pairs):
            a, b = perm[i], perm[j]
            image |= edge_bits[e] << index[(min(a, b), max(a, b))]
        np.minimum(canon, image, out=canon)
    reps = np.unique(canon)
    return [
        Graph.from_edges(order, [pairs[e] for e in range(len(pairs)) if int(r) >> e & 1])
        for r in reps
    ]
