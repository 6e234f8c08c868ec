"""Core combinatorial types: graphs, uniform hypergraphs, loose paths,
good trees, matchings, and the lexicographic k-subset index.

Vertices are always 0-indexed integers 0..n-1.  Edges are stored as sorted
tuples with duplicates removed, and edge lists are kept sorted so that
every structure has one canonical form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    IndexOutOfRange,
    InvalidArity,
    InvalidSubset,
    InvalidTree,
    InvalidUniformity,
)

# ---------------------------------------------------------------------------
# k-subset ranking (lexicographic / combinadic)
# ---------------------------------------------------------------------------


def _check_subset(n: int, k: int, subset: Sequence[int]) -> tuple[int, ...]:
    s = tuple(sorted(subset))
    if len(s) != k or len(set(s)) != k:
        raise InvalidSubset(f"need {k} distinct vertices, got {subset!r}")
    if s and (s[0] < 0 or s[-1] >= n):
        raise InvalidSubset(f"subset {subset!r} out of range for n={n}")
    return s


def rank_k_subset(n: int, k: int, subset: Sequence[int]) -> int:
    """Position of `subset` in the lexicographic order of all k-subsets.

    Runs in O(k) arithmetic operations: the count of subsets preceding the
    given one telescopes into a difference of two binomials per coordinate.
    """
    s = _check_subset(n, k, subset)
    rank = 0
    prev = -1
    for i, v in enumerate(s):
        t = k - i  # subsets still to place, including this coordinate
        rank += comb(n - prev - 1, t) - comb(n - v, t)
        prev = v
    return rank


def unrank_k_subset(n: int, k: int, rank: int) -> tuple[int, ...]:
    """Inverse of rank_k_subset."""
    total = comb(n, k)
    if not 0 <= rank < max(total, 1):
        raise IndexOutOfRange(f"rank {rank} outside [0, {total})")
    out = []
    v = 0
    remaining = rank
    for i in range(k):
        t = k - i - 1
        while True:
            block = comb(n - v - 1, t)
            if remaining < block:
                break
            remaining -= block
            v += 1
        out.append(v)
        v += 1
    return tuple(out)


@dataclass(frozen=True)
class KSubsetIndex:
    """Dense index of all k-subsets of range(n) in lexicographic order.

    Carries a binomial lookup table so that whole batches of subsets can be
    ranked with numpy in one call; the scalar and vectorized paths agree
    with rank_k_subset exactly.
    """

    n: int
    k: int
    _binom: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.k < 0 or self.n < 0:
            raise InvalidSubset(f"need n, k >= 0, got n={self.n} k={self.k}")
        table = np.zeros((self.n + 2, self.k + 2), dtype=np.int64)
        for a in range(self.n + 2):
            for b in range(min(a, self.k + 1) + 1):
                table[a, b] = comb(a, b)
        object.__setattr__(self, "_binom", table)

    @property
    def size(self) -> int:
        return comb(self.n, self.k)

    def rank(self, subset: Sequence[int]) -> int:
        return rank_k_subset(self.n, self.k, subset)

    def unrank(self, rank: int) -> tuple[int, ...]:
        return unrank_k_subset(self.n, self.k, rank)

    def rank_rows(self, rows: np.ndarray) -> np.ndarray:
        """Rank each row of an (m, k) array of sorted k-subsets."""
        m = rows.shape[0]
        if m == 0:
            return np.zeros(0, dtype=np.int64)
        ranks = np.zeros(m, dtype=np.int64)
        prev = np.full(m, -1, dtype=np.int64)
        for i in range(self.k):
            t = self.k - i
            v = rows[:, i].astype(np.int64)
            ranks += self._binom[self.n - prev - 1, t] - self._binom[self.n - v, t]
            prev = v
        return ranks


# ---------------------------------------------------------------------------
# Structures
# ---------------------------------------------------------------------------


def _canonical_edges(n: int, r: int, edges: Iterable[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    seen = set()
    for e in edges:
        t = tuple(sorted(e))
        if len(t) != r or len(set(t)) != r:
            raise InvalidArity(f"edge {e!r} is not a set of {r} vertices")
        if t[0] < 0 or t[-1] >= n:
            raise InvalidSubset(f"edge {e!r} out of range for n={n}")
        seen.add(t)
    return tuple(sorted(seen))


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __init__(self, n: int, edges: Iterable[Sequence[int]]):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", _canonical_edges(n, 2, edges))

    @property
    def r(self) -> int:
        return 2

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def edge_set(self) -> set[tuple[int, int]]:
        return set(self.edges)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "r": 2, "edges": [list(e) for e in self.edges]})

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        obj = json.loads(text)
        if obj.get("r", 2) != 2:
            raise InvalidUniformity(f"expected r=2, got r={obj.get('r')}")
        return cls(obj["n"], [tuple(e) for e in obj["edges"]])


@dataclass(frozen=True)
class Hypergraph:
    """r-uniform hypergraph on vertices 0..n-1."""

    n: int
    r: int
    edges: tuple[tuple[int, ...], ...]

    def __init__(self, n: int, r: int, edges: Iterable[Sequence[int]]):
        if r < 2 or r > max(n, 2):
            raise InvalidUniformity(f"uniformity r={r} invalid for n={n}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "edges", _canonical_edges(n, r, edges))

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "r": self.r, "edges": [list(e) for e in self.edges]})

    @classmethod
    def from_json(cls, text: str) -> "Hypergraph":
        obj = json.loads(text)
        return cls(obj["n"], obj["r"], [tuple(e) for e in obj["edges"]])


def underlying_graph(structure: Graph | Hypergraph) -> Graph:
    """Graph whose edges are all vertex pairs co-occurring in some edge.

    Agents may swap along exactly these pairs, so this graph defines swap
    legality for hypergraph processes.
    """
    pairs: set[tuple[int, int]] = set()
    for e in structure.edges:
        for i in range(len(e)):
            for j in range(i + 1, len(e)):
                pairs.add((e[i], e[j]))
    return Graph(structure.n, sorted(pairs))


# ---------------------------------------------------------------------------
# Loose paths
# ---------------------------------------------------------------------------


def loose_path_edges(ordering: Sequence[int], r: int) -> list[tuple[int, ...]]:
    """Edges of the loose path with the given vertex ordering.

    Edge i (0-based) covers ordering[i*(r-1) : i*(r-1)+r], so consecutive
    edges overlap in exactly one vertex.
    """
    ell = len(ordering)
    if ell == 0:
        raise InvalidArity("empty ordering")
    if ell > 1 and (ell - 1) % (r - 1) != 0:
        raise InvalidArity(f"length {ell} is not 1 mod {r - 1}")
    k = (ell - 1) // (r - 1)
    return [tuple(ordering[i * (r - 1): i * (r - 1) + r]) for i in range(k)]


@dataclass(frozen=True)
class LoosePath:
    """Loose path: ordering of distinct vertices with overlap-one edges.

    A single-vertex ordering is allowed as the degenerate empty path.
    """

    ordering: tuple[int, ...]
    r: int

    def __init__(self, ordering: Sequence[int], r: int):
        ordering = tuple(ordering)
        if len(set(ordering)) != len(ordering):
            raise InvalidSubset("ordering has repeated vertices")
        loose_path_edges(ordering, r)  # validates length arithmetic
        object.__setattr__(self, "ordering", ordering)
        object.__setattr__(self, "r", r)

    def __len__(self) -> int:
        return len(self.ordering)

    @property
    def edges(self) -> list[tuple[int, ...]]:
        return loose_path_edges(self.ordering, self.r)

    def to_json(self) -> str:
        return json.dumps({"ordering": list(self.ordering)})

    @classmethod
    def from_json(cls, text: str, r: int) -> "LoosePath":
        return cls(json.loads(text)["ordering"], r)


# ---------------------------------------------------------------------------
# Good trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GoodTree:
    """Spine path plus pendant structure used by the tree strategy.

    spine: the path vertices v_0..v_{kappa-1}.
    heavy: partial map, spine position i -> pendant vertex u_i.
    light: map, pendant vertex -> anchor, where the anchor is a spine
           vertex or a heavy vertex.

    The implied edge set (spine edges, spine-heavy rungs, light hooks) is
    always a tree: each non-spine vertex contributes exactly one edge to a
    connected core.
    """

    spine: tuple[int, ...]
    heavy: dict[int, int]
    light: dict[int, int]

    def __init__(self, spine: Sequence[int], heavy: dict[int, int], light: dict[int, int]):
        spine = tuple(spine)
        if not spine or len(set(spine)) != len(spine):
            raise InvalidTree("spine must be a nonempty sequence of distinct vertices")
        spine_set = set(spine)
        heavy = dict(heavy)
        for i, u in heavy.items():
            if not 0 <= i < len(spine):
                raise InvalidTree(f"heavy position {i} outside spine")
            if u in spine_set:
                raise InvalidTree(f"heavy vertex {u} lies on the spine")
        heavy_vals = list(heavy.values())
        if len(set(heavy_vals)) != len(heavy_vals):
            raise InvalidTree("heavy vertices must be distinct")
        heavy_set = set(heavy_vals)
        light = dict(light)
        anchors_ok = spine_set | heavy_set
        for w, a in light.items():
            if w in spine_set or w in heavy_set:
                raise InvalidTree(f"light vertex {w} already used")
            if a not in anchors_ok:
                raise InvalidTree(f"anchor {a} of light vertex {w} is not spine or heavy")
        if len(light) != len(set(light)):
            raise InvalidTree("light vertices must be distinct")
        object.__setattr__(self, "spine", spine)
        object.__setattr__(self, "heavy", heavy)
        object.__setattr__(self, "light", light)

    @property
    def vertices(self) -> set[int]:
        return set(self.spine) | set(self.heavy.values()) | set(self.light)

    def implied_edges(self) -> list[tuple[int, int]]:
        out = [tuple(sorted((self.spine[i], self.spine[i + 1]))) for i in range(len(self.spine) - 1)]
        out += [tuple(sorted((self.spine[i], u))) for i, u in self.heavy.items()]
        out += [tuple(sorted((w, a))) for w, a in self.light.items()]
        return sorted(out)

    def as_graph(self, n: int | None = None) -> Graph:
        verts = self.vertices
        size = max(verts) + 1 if n is None else n
        return Graph(size, self.implied_edges())

    def to_json(self) -> str:
        return json.dumps({
            "spine": list(self.spine),
            "heavy": {str(i): u for i, u in sorted(self.heavy.items())},
            "light": {str(w): a for w, a in sorted(self.light.items())},
        })

    @classmethod
    def from_json(cls, text: str) -> "GoodTree":
        obj = json.loads(text)
        return cls(
            obj["spine"],
            {int(i): u for i, u in obj["heavy"].items()},
            {int(w): a for w, a in obj["light"].items()},
        )


# ---------------------------------------------------------------------------
# Matchings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Matching:
    """One round of swaps: vertex pairs, pairwise disjoint."""

    swaps: tuple[tuple[int, int], ...]

    def __init__(self, swaps: Iterable[Sequence[int]]):
        norm = tuple(tuple(sorted(p)) for p in swaps)
        from .errors import NotAMatching

        used: set[int] = set()
        for u, v in norm:
            if u == v:
                raise NotAMatching(f"degenerate pair ({u}, {v})")
            if u in used or v in used:
                raise NotAMatching(f"vertex reused in round: ({u}, {v})")
            used.add(u)
            used.add(v)
        object.__setattr__(self, "swaps", tuple(sorted(norm)))

    def __len__(self) -> int:
        return len(self.swaps)


def trace_to_json(matchings: Iterable) -> str:
    """Serialize a list of rounds; each round is a list of [u, v] pairs."""
    rounds = []
    for m in matchings:
        swaps = m.swaps if isinstance(m, Matching) else m
        rounds.append([[int(u), int(v)] for u, v in swaps])
    return json.dumps(rounds)


def trace_from_json(text: str) -> list[list[tuple[int, int]]]:
    return [[(int(u), int(v)) for u, v in rnd] for rnd in json.loads(text)]
