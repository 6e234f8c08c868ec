"""Ground-truth process executor.

Applies matchings of the underlying graph to the agent placement, enforces
swap legality, and maintains the k-subset acquaintance ledger.  A k-subset
of agents is recorded the moment its members co-occupy one edge at a round
boundary; mid-swap transient positions never count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .errors import IllegalSwap, InvalidArity, NotAMatching
from .model import Graph, Hypergraph, KSubsetIndex, Matching, underlying_graph

LEDGER_CAP = 1 << 27


@dataclass
class SimState:
    structure: Graph | Hypergraph
    k: int
    pos: np.ndarray  # agent -> vertex
    inv: np.ndarray  # vertex -> agent
    ledger: np.ndarray  # bool, C(n, k) bits over agent k-subsets
    round: int
    index: KSubsetIndex
    visited: np.ndarray | None = None  # (n, n) bool, visited[agent, vertex]
    _edges_arr: np.ndarray = field(repr=False, default=None)
    _inc_ptr: np.ndarray = field(repr=False, default=None)
    _inc_eid: np.ndarray = field(repr=False, default=None)
    _pair_keys: np.ndarray = field(repr=False, default=None)
    _col_combos: tuple = field(repr=False, default=())

    @property
    def n(self) -> int:
        return self.structure.n

    def ledger_count(self) -> int:
        return int(self.ledger.sum())


def init(structure: Graph | Hypergraph, k: int, track_visits: bool = False) -> SimState:
    """Agents i placed on vertices i; ledger seeded from every edge."""
    n, r = structure.n, structure.r
    if not 2 <= k <= r:
        raise InvalidArity(f"need 2 <= k <= r={r}, got k={k}")
    size = comb(n, k)
    if size > LEDGER_CAP:
        raise InvalidArity(f"ledger of C({n},{k})={size} bits exceeds cap 2^27")

    edges_arr = np.array(structure.edges, dtype=np.int64).reshape(len(structure.edges), r)
    # CSR incidence: vertex -> edge ids
    counts = np.zeros(n + 1, dtype=np.int64)
    for e in structure.edges:
        for v in e:
            counts[v + 1] += 1
    inc_ptr = np.cumsum(counts)
    inc_eid = np.zeros(inc_ptr[-1], dtype=np.int64)
    cursor = inc_ptr[:-1].copy()
    for eid, e in enumerate(structure.edges):
        for v in e:
            inc_eid[cursor[v]] = eid
            cursor[v] += 1

    under = structure if isinstance(structure, Graph) else underlying_graph(structure)
    pair_keys = np.array(sorted(u * n + v for u, v in under.edges), dtype=np.int64)

    state = SimState(
        structure=structure,
        k=k,
        pos=np.arange(n, dtype=np.int64),
        inv=np.arange(n, dtype=np.int64),
        ledger=np.zeros(size, dtype=bool),
        round=0,
        index=KSubsetIndex(n, k),
        visited=np.eye(n, dtype=bool) if track_visits else None,
        _edges_arr=edges_arr,
        _inc_ptr=inc_ptr,
        _inc_eid=inc_eid,
        _pair_keys=pair_keys,
        _col_combos=tuple(combinations(range(r), k)),
    )
    if len(edges_arr):
        _absorb_edges(state, np.arange(len(edges_arr), dtype=np.int64))
    return state


def _absorb_edges(state: SimState, eids: np.ndarray) -> None:
    """Mark every k-subset of agents co-occupying the given edges."""
    if not len(eids):
        return
    occ = state.inv[state._edges_arr[eids]]  # (t, r) agents per edge
    for cols in state._col_combos:
        sub = np.sort(occ[:, cols], axis=1)
        state.ledger[state.index.rank_rows(sub)] = True


def apply_matching(state: SimState, m: Matching) -> SimState:
    """One synchronous round: swap matched occupants, then rescan changed edges.

    Mutates state in place and returns it.
    """
    if not isinstance(m, Matching):
        m = Matching(m)  # raises NotAMatching on overlap/degenerate pairs
    if m.swaps:
        arr = np.array(m.swaps, dtype=np.int64)
        n = state.n
        keys = arr[:, 0] * n + arr[:, 1]
        slot = np.searchsorted(state._pair_keys, keys)
        bad = (slot >= len(state._pair_keys)) | (state._pair_keys[np.minimum(slot, len(state._pair_keys) - 1)] != keys)
        if bad.any():
            u, v = arr[int(np.nonzero(bad)[0][0])]
            raise IllegalSwap(f"({u}, {v}) is not an edge of the underlying graph")
        us, vs = arr[:, 0], arr[:, 1]
        au, av = state.inv[us].copy(), state.inv[vs].copy()
        state.inv[us], state.inv[vs] = av, au
        state.pos[au], state.pos[av] = vs, us
        if state.visited is not None:
            state.visited[au, vs] = True
            state.visited[av, us] = True
        touched = np.concatenate([us, vs])
        starts = state._inc_ptr[touched]
        lens = state._inc_ptr[touched + 1] - starts
        total = int(lens.sum())
        if total:
            # flat CSR gather without a per-vertex Python loop
            offsets = np.repeat(np.cumsum(lens) - lens, lens)
            flat = np.arange(total, dtype=np.int64) - offsets + np.repeat(starts, lens)
            eids = np.unique(state._inc_eid[flat])
            _absorb_edges(state, eids)
    state.round += 1
    return state


def is_complete(state: SimState) -> bool:
    return bool(state.ledger.all())


def run_trace(structure: Graph | Hypergraph, k: int, matchings: list, track_visits: bool = False) -> dict:
    """Replay a trace; report completion round and per-round ledger counts."""
    state = init(structure, k, track_visits=track_visits)
    counts = [state.ledger_count()]
    completion = 0 if is_complete(state) else None
    for i, m in enumerate(matchings):
        try:
            apply_matching(state, m)
        except (IllegalSwap, NotAMatching) as exc:
            raise type(exc)(f"round {i + 1}: {exc}") from None
        counts.append(state.ledger_count())
        if completion is None and is_complete(state):
            completion = state.round
    return {
        "completed": completion is not None,
        "completion_round": completion,
        "ledger_counts": counts,
        "state": state,
    }
