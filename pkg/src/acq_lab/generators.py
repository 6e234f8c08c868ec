"""Seeded random structures: binomial graphs/hypergraphs and the
uniform edge process with its connectivity hitting time.

All randomness comes from the pinned SplitMix64 streams in rng.py.  For a
binomial structure the contract is: subsets are visited in lexicographic
order, subset number i (0-based) consumes stream output i+1, and the subset
is included iff (out >> 11) / 2**53 < p.  The vectorized implementation
below reproduces that definition exactly.
"""

from __future__ import annotations

import json
from math import comb, isqrt

import numpy as np

from .errors import IndexOutOfRange, InvalidProbability, InvalidUniformity
from .model import Graph, Hypergraph
from .rng import SplitMix64, float_stream

_CHUNK = 1 << 20


def _included_ranks(count: int, p: float, seed: int) -> np.ndarray:
    """Ranks of the subsets whose uniform variate falls below p."""
    hits = []
    for start in range(0, count, _CHUNK):
        m = min(_CHUNK, count - start)
        mask = float_stream(seed, m, start=start) < p
        hits.append(np.nonzero(mask)[0].astype(np.int64) + start)
    if not hits:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(hits)


def _unrank_rows(n: int, r: int, ranks: np.ndarray) -> np.ndarray:
    """Vectorized lexicographic unrank: (m, r) matrix of sorted subsets."""
    m = len(ranks)
    out = np.zeros((m, r), dtype=np.int64)
    remaining = ranks.astype(np.int64).copy()
    base = np.zeros(m, dtype=np.int64)  # smallest value the coordinate may take
    for i in range(r):
        t = r - i - 1
        # cumulative count of subsets whose coordinate i equals base+j
        # is sum_{w<j} C(n-1-(base+w), t); scan per distinct base via loop
        # over candidate values, vectorized with a running subtraction.
        value = base.copy()
        while True:
            block = _comb_vec(n - value - 1, t)
            step = remaining >= block
            if not step.any():
                break
            remaining = np.where(step, remaining - block, remaining)
            value = np.where(step, value + 1, value)
        out[:, i] = value
        base = value + 1
    return out


_COMB_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _comb_vec(values: np.ndarray, t: int) -> np.ndarray:
    if t == 0:
        return np.ones_like(values)
    vmax = int(values.max(initial=0))
    key = (vmax, t)
    table = _COMB_CACHE.get(key)
    if table is None or len(table) <= vmax:
        table = np.array([comb(v, t) if v >= 0 else 0 for v in range(vmax + 1)], dtype=np.int64)
        _COMB_CACHE[key] = table
    clipped = np.clip(values, 0, vmax)
    return np.where(values >= 0, table[clipped], 0)


def gen_hrnp(n: int, r: int, p: float, seed: int) -> Hypergraph:
    """Binomial r-uniform hypergraph: each r-subset kept with probability p."""
    if not 0.0 <= p <= 1.0:
        raise InvalidProbability(f"p={p} outside [0, 1]")
    if not 2 <= r <= n:
        raise InvalidUniformity(f"need 2 <= r <= n, got r={r}, n={n}")
    count = comb(n, r)
    ranks = _included_ranks(count, p, seed)
    rows = _unrank_rows(n, r, ranks)
    return Hypergraph(n, r, [tuple(int(v) for v in row) for row in rows])


def gen_gnp(n: int, p: float, seed: int) -> Graph:
    """Binomial graph; identical edge set to gen_hrnp(n, 2, p, seed)."""
    if not 0.0 <= p <= 1.0:
        raise InvalidProbability(f"p={p} outside [0, 1]")
    if n < 1:
        raise InvalidUniformity(f"need n >= 1, got n={n}")
    if n == 1:
        return Graph(1, [])
    count = comb(n, 2)
    ranks = _included_ranks(count, p, seed)
    rows = _unrank_rows(n, 2, ranks)
    return Graph(n, [tuple(int(v) for v in row) for row in rows])


# ---------------------------------------------------------------------------
# Uniform edge process
# ---------------------------------------------------------------------------


def _unrank_pair(n: int, t: int) -> tuple[int, int]:
    """Lexicographic rank -> pair, closed form for r=2."""
    total = n * (n - 1) // 2
    rem = total - t
    # smallest m with C(m,2) >= rem
    m = (1 + isqrt(8 * rem - 7)) // 2
    while m * (m - 1) // 2 < rem:
        m += 1
    while (m - 1) * (m - 2) // 2 >= rem:
        m -= 1
    a = n - m
    offset = t - (total - m * (m - 1) // 2)
    return a, a + 1 + offset


class EdgeSequence:
    """Uniformly random permutation of all C(n, 2) vertex pairs.

    The permutation is Fisher-Yates over pair ranks with the seeded
    generator, materialized lazily: prefix(m) only runs the first m shuffle
    steps, so hitting-time scans at large n never touch the full pair list.
    """

    def __init__(self, n: int, seed: int | None = None, order: list[tuple[int, int]] | None = None):
        if n < 2:
            raise InvalidUniformity(f"need n >= 2, got n={n}")
        self.n = n
        self.seed = seed
        self.size = n * (n - 1) // 2
        self._prefix: list[tuple[int, int]] = []
        self._displaced: dict[int, int] = {}
        self._rng = SplitMix64(seed) if seed is not None else None
        if order is not None:
            order = [tuple(sorted(e)) for e in order]
            if sorted(order) != [_unrank_pair(n, t) for t in range(self.size)]:
                raise IndexOutOfRange("order is not a permutation of all pairs")
            self._prefix = order

    def __len__(self) -> int:
        return self.size

    def prefix(self, m: int) -> list[tuple[int, int]]:
        """First m pairs of the permutation."""
        if not 0 <= m <= self.size:
            raise IndexOutOfRange(f"m={m} outside [0, {self.size}]")
        while len(self._prefix) < m:
            i = len(self._prefix)
            j = i + self._rng.randbelow(self.size - i)
            vj = self._displaced.get(j, j)
            vi = self._displaced.get(i, i)
            self._displaced[j] = vi
            self._prefix.append(_unrank_pair(self.n, vj))
        return self._prefix[:m]

    @property
    def order(self) -> list[tuple[int, int]]:
        return self.prefix(self.size)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "order": [list(e) for e in self.order]})

    @classmethod
    def from_json(cls, text: str) -> "EdgeSequence":
        obj = json.loads(text)
        return cls(obj["n"], order=[tuple(e) for e in obj["order"]])


def gen_process(n: int, seed: int) -> EdgeSequence:
    """The random edge process: one new uniform edge per step."""
    return EdgeSequence(n, seed=seed)


class _DisjointSet:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n
        self.components = n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        self.components -= 1
        return True


def connectivity_time(seq: EdgeSequence) -> int:
    """Minimal m such that the first m edges connect all n vertices."""
    dsu = _DisjointSet(seq.n)
    m = 0
    while dsu.components > 1:
        m += 1
        u, v = seq.prefix(m)[m - 1]
        dsu.union(u, v)
    return m


def snapshot(seq: EdgeSequence, m: int) -> Graph:
    """Graph on the first m edges of the process."""
    return Graph(seq.n, seq.prefix(m))
