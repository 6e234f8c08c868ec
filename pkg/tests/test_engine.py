"""Process executor. Examples are hand-checkable by drawing the agents on
the vertices; the property test replays random legal traces against a
naive dict-of-sets re-simulation."""

from __future__ import annotations

import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from acq_lab.engine import LEDGER_CAP, SimState, apply_matching, init, is_complete, run_trace
from acq_lab.errors import IllegalSwap, InvalidArity, NotAMatching
from acq_lab.model import Graph, Hypergraph, Matching, underlying_graph

PROPERTY_SETTINGS = settings(
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)

P3 = Graph(3, [(0, 1), (1, 2)])
C4 = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
K4 = Graph(4, list(itertools.combinations(range(4), 2)))


def _acquainted_pairs(state: SimState) -> set:
    idx = state.index
    return {idx.unrank(r) for r in np.flatnonzero(state.ledger)}


# -------------------------------------------------------------------- init

def test_init_complete_graph_already_done():
    state = init(K4, 2)
    assert is_complete(state)
    assert state.round == 0


def test_init_path_records_edge_pairs_only():
    state = init(P3, 2)
    assert _acquainted_pairs(state) == {(0, 1), (1, 2)}
    assert not is_complete(state)


def test_init_single_triple_among_four():
    h = Hypergraph(4, 3, [(0, 1, 2)])
    state = init(h, 3)
    assert state.ledger_count() == 1
    assert _acquainted_pairs(state) == {(0, 1, 2)}
    assert comb(4, 3) == 4


def test_init_k_below_r_counts_subedges():
    h = Hypergraph(5, 3, [(0, 1, 2)])
    state = init(h, 2)
    assert _acquainted_pairs(state) == {(0, 1), (0, 2), (1, 2)}


def test_init_places_agent_i_on_vertex_i():
    state = init(P3, 2)
    assert list(state.pos) == [0, 1, 2]
    assert list(state.inv) == [0, 1, 2]


def test_init_rejects_bad_k():
    with pytest.raises(InvalidArity):
        init(P3, 1)
    with pytest.raises(InvalidArity):
        init(P3, 3)  # r = 2


def test_init_rejects_oversized_ledger():
    # C(4000, 3) > 2^27
    with pytest.raises(InvalidArity):
        init(Hypergraph(4000, 3, [(0, 1, 2)]), 3)
    assert comb(4000, 3) > LEDGER_CAP


def test_init_tracks_visits_on_request():
    state = init(P3, 2, track_visits=True)
    assert state.visited is not None
    assert [int(state.visited[i, i]) for i in range(3)] == [1, 1, 1]
    assert int(state.visited.sum()) == 3


# ---------------------------------------------------------- apply_matching

def test_swap_completes_the_path():
    state = init(P3, 2)
    apply_matching(state, Matching([(0, 1)]))
    # agent 0 now sits on vertex 1 next to vertex 2
    assert is_complete(state)
    assert state.round == 1


def test_empty_matching_advances_round_only():
    state = init(P3, 2)
    before = state.ledger.copy()
    apply_matching(state, Matching([]))
    assert state.round == 1
    assert np.array_equal(state.ledger, before)


def test_cycle_swap_completes():
    state = init(C4, 2)
    # pairs (0,2) and (1,3) are the only strangers; one swap fixes both
    apply_matching(state, Matching([(1, 2)]))
    assert is_complete(state)


def test_swap_moves_both_agents():
    state = init(C4, 2)
    apply_matching(state, Matching([(0, 1), (2, 3)]))
    assert list(state.pos) == [1, 0, 3, 2]
    assert list(state.inv) == [1, 0, 3, 2]


def test_apply_rejects_non_edge():
    state = init(C4, 2)
    with pytest.raises(IllegalSwap):
        apply_matching(state, Matching([(0, 2)]))


def test_apply_returns_same_state_object():
    state = init(P3, 2)
    assert apply_matching(state, Matching([])) is state


def test_matching_construction_rejects_overlap():
    with pytest.raises(NotAMatching):
        Matching([(0, 1), (1, 2)])


def test_hypergraph_swaps_use_underlying_graph():
    h = Hypergraph(4, 3, [(0, 1, 2)])
    state = init(h, 3)
    apply_matching(state, Matching([(0, 1)]))  # pair inside the triple
    with pytest.raises(IllegalSwap):
        apply_matching(state, Matching([(0, 3)]))


def test_visited_grows_with_moves():
    state = init(P3, 2, track_visits=True)
    apply_matching(state, Matching([(0, 1)]))
    assert bool(state.visited[0, 1]) and bool(state.visited[1, 0])
    assert int(state.visited.sum()) == 5


def test_ledger_is_monotone_under_swaps():
    state = init(C4, 2)
    prev = int(state.ledger.sum())
    for swap in [(0, 1), (2, 3), (1, 2), (0, 3)]:
        apply_matching(state, Matching([swap]))
        cur = int(state.ledger.sum())
        assert cur >= prev
        prev = cur


# ---------------------------------------------------------------- run_trace

def test_run_trace_complete_at_round_zero():
    out = run_trace(K4, 2, [])
    assert out["completed"] is True
    assert out["completion_round"] == 0
    assert out["ledger_counts"] == [6]


def test_run_trace_one_swap_path():
    out = run_trace(P3, 2, [Matching([(0, 1)])])
    assert out["completed"] is True
    assert out["completion_round"] == 1
    assert out["ledger_counts"] == [2, 3]


def test_run_trace_incomplete():
    out = run_trace(P3, 2, [Matching([])])
    assert out["completed"] is False
    assert out["completion_round"] is None


def test_run_trace_labels_failing_round():
    with pytest.raises(IllegalSwap, match="round 2"):
        run_trace(C4, 2, [Matching([(0, 1)]), Matching([(0, 2)])])


def test_run_trace_accepts_raw_pair_lists():
    out = run_trace(P3, 2, [[(0, 1)]])
    assert out["completed"] is True


# ------------------------------------------------------------ re-simulation

def _naive_replay(structure, k, matchings):
    # independent executor: dict positions, set-of-frozensets ledger
    g = underlying_graph(structure)
    edge_set = g.edge_set()
    pos = {a: a for a in range(structure.n)}
    inv = {v: a for a, v in pos.items()}
    ledger = set()

    def absorb():
        for e in structure.edges:
            occupants = [inv[v] for v in e]
            for sub in itertools.combinations(sorted(occupants), k):
                ledger.add(sub)

    absorb()
    for m in matchings:
        swaps = m.swaps if isinstance(m, Matching) else m
        for u, v in swaps:
            assert tuple(sorted((u, v))) in edge_set
            a, b = inv[u], inv[v]
            pos[a], pos[b] = v, u
            inv[u], inv[v] = b, a
        absorb()
    return ledger


@st.composite
def _structure_and_trace(draw):
    n = draw(st.integers(min_value=3, max_value=8))
    r = draw(st.integers(min_value=2, max_value=min(3, n)))
    pool = list(itertools.combinations(range(n), r))
    edges = draw(st.lists(st.sampled_from(pool), min_size=1, max_size=8, unique=True))
    structure = Graph(n, edges) if r == 2 else Hypergraph(n, r, edges)
    k = draw(st.integers(min_value=2, max_value=r))
    g_edges = list(underlying_graph(structure).edges)
    rounds = draw(st.integers(min_value=0, max_value=6))
    trace = []
    for _ in range(rounds):
        picks = draw(st.lists(st.sampled_from(g_edges), max_size=3, unique=True))
        used: set = set()
        swaps = []
        for u, v in picks:
            if u not in used and v not in used:
                swaps.append((u, v))
                used.update((u, v))
        trace.append(Matching(swaps))
    return structure, k, trace


@PROPERTY_SETTINGS
@given(_structure_and_trace())
def test_engine_matches_naive_replay(case):
    structure, k, trace = case
    out = run_trace(structure, k, trace)
    expected = _naive_replay(structure, k, trace)
    state = out["state"]
    got = {state.index.unrank(r) for r in np.flatnonzero(state.ledger)}
    assert got == expected
