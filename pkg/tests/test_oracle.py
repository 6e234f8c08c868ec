"""Exact small-scale answers. The breadth-first oracle is itself cross
checked by a second, independently written iterative-deepening search over
the same state space, so a bug has to appear twice to slip through."""

from __future__ import annotations

import itertools
from math import comb

import pytest

from acq_lab.errors import SearchBudgetExceeded, Unacquaintable
from acq_lab.model import Graph, Hypergraph, Matching, underlying_graph
from acq_lab.oracle import SearchLimits, enumerate_matchings, exact_ac, lower_bound

P3 = Graph(3, [(0, 1), (1, 2)])
C4 = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
STAR4 = Graph(4, [(0, 1), (0, 2), (0, 3)])


def _complete_graph(n: int) -> Graph:
    return Graph(n, list(itertools.combinations(range(n), 2)))


# ------------------------------------------------------------- lower bound

def test_lower_bound_complete_graphs_zero():
    for n in range(2, 6):
        assert lower_bound(n, comb(n, 2), 2, 2) == 0


def test_lower_bound_star():
    # C(4,2)=6 subsets, 3 per round: ceil(6/3 - 1) = 1
    assert lower_bound(4, 3, 2, 2) == 1


def test_lower_bound_hypergraph_example():
    # C(5,2)=10 pairs, 2 triples cover 2*3=6 per round: ceil(10/6 - 1) = 1
    assert lower_bound(5, 2, 3, 2) == 1


def test_lower_bound_no_edges():
    with pytest.raises(Unacquaintable):
        lower_bound(4, 0, 2, 2)


def test_lower_bound_never_negative():
    assert lower_bound(3, 50, 2, 2) == 0


# ---------------------------------------------------------------- matchings

def test_enumerate_matchings_counts():
    assert len(enumerate_matchings(Graph(2, [(0, 1)]))) == 2
    assert len(enumerate_matchings(P3)) == 3
    assert len(enumerate_matchings(C4)) == 7


def test_enumerate_matchings_unique_and_legal():
    g = _complete_graph(4)
    out = enumerate_matchings(g)
    keys = {m.swaps for m in out}
    assert len(keys) == len(out) == 10  # empty + 6 singles + 3 perfect
    es = g.edge_set()
    for m in out:
        assert all(s in es for s in m.swaps)


# ----------------------------------------------------------------- exact ac

def test_exact_ac_table():
    for n in range(2, 6):
        assert exact_ac(_complete_graph(n), 2) == 0
    assert exact_ac(P3, 2) == 1
    assert exact_ac(C4, 2) == 1
    assert exact_ac(STAR4, 2) == 2


def test_exact_ac_dominates_lower_bound():
    for g in (P3, C4, STAR4):
        assert exact_ac(g, 2) >= lower_bound(g.n, len(g.edges), 2, 2)


def test_exact_ac_hypergraph():
    h = Hypergraph(4, 3, [(0, 1, 2), (1, 2, 3)])
    assert exact_ac(h, 3) >= 1
    assert exact_ac(h, 2) >= 0


def test_exact_ac_budget():
    with pytest.raises(SearchBudgetExceeded):
        exact_ac(Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)]), 2, SearchLimits(max_states=1))
    with pytest.raises(SearchBudgetExceeded):
        exact_ac(_complete_graph(7), 2)  # n above the default ceiling


# ------------------------------------------- independent second checker

def _iddfs_ac(structure, k: int, cap: int = 8) -> int:
    """Iterative-deepening re-derivation of the minimal round count.

    Written without looking at the oracle: its own ledger encoding
    (frozensets), its own move list, depth-first with memo on
    (placement, ledger, remaining depth).
    """
    n = structure.n
    g = underlying_graph(structure)
    moves = [m.swaps for m in enumerate_matchings(g)]
    goal = {frozenset(s) for s in itertools.combinations(range(n), k)}

    def absorb(inv: tuple, ledger: frozenset) -> frozenset:
        add = set()
        for e in structure.edges:
            occupants = [inv[v] for v in e]
            for sub in itertools.combinations(occupants, k):
                add.add(frozenset(sub))
        return ledger | add

    start_inv = tuple(range(n))
    start_ledger = absorb(start_inv, frozenset())

    def dfs(inv: tuple, ledger: frozenset, depth: int, seen: dict) -> bool:
        if len(ledger) == len(goal):
            return True
        if depth == 0:
            return False
        key = (inv, ledger)
        if seen.get(key, -1) >= depth:
            return False
        seen[key] = depth
        for swaps in moves:
            nxt = list(inv)
            for u, v in swaps:
                nxt[u], nxt[v] = nxt[v], nxt[u]
            t = tuple(nxt)
            if dfs(t, absorb(t, ledger), depth - 1, seen):
                return True
        return False

    for depth in range(cap + 1):
        if dfs(start_inv, start_ledger, depth, {}):
            return depth
    raise AssertionError(f"no schedule within {cap} rounds")


def _connected_graphs_n_le_4():
    found = {}
    for n in range(2, 5):
        pairs = list(itertools.combinations(range(n), 2))
        for bits in range(1, 1 << len(pairs)):
            edges = [pairs[i] for i in range(len(pairs)) if bits >> i & 1]
            adj = {v: set() for v in range(n)}
            for u, v in edges:
                adj[u].add(v)
                adj[v].add(u)
            seen = {0}
            stack = [0]
            while stack:
                u = stack.pop()
                for w in adj[u] - seen:
                    seen.add(w)
                    stack.append(w)
            if len(seen) != n:
                continue
            canon = min(
                tuple(sorted(tuple(sorted((p[u], p[v]))) for u, v in edges))
                for p in itertools.permutations(range(n))
            )
            found[(n, canon)] = Graph(n, edges)
    return list(found.values())


def test_second_checker_agrees_on_all_tiny_connected_graphs():
    classes = _connected_graphs_n_le_4()
    assert len(classes) == 9  # 1 (n=2) + 2 (n=3) + 6 (n=4)
    for g in classes:
        assert _iddfs_ac(g, 2) == exact_ac(g, 2)


def test_second_checker_agrees_on_tiny_hypergraphs():
    cases = [
        (Hypergraph(4, 3, [(0, 1, 2), (1, 2, 3)]), 3),
        (Hypergraph(4, 3, [(0, 1, 2), (1, 2, 3)]), 2),
        (Hypergraph(4, 3, [(0, 1, 2), (0, 1, 3), (0, 2, 3)]), 3),
        (Hypergraph(4, 4, [(0, 1, 2, 3)]), 2),
    ]
    for h, k in cases:
        assert _iddfs_ac(h, k) == exact_ac(h, k)
