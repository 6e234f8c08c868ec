"""Path discovery: the density constant for long-path thresholds, the
depth-first loose path search, spanning-tree construction around a spine,
and the restart-based loose Hamilton path search."""

from __future__ import annotations

import math

import pytest

from acq_lab.errors import InvalidDelta, InvalidSpine, StructuralAssumptionViolated
from acq_lab.generators import gen_gnp, gen_hrnp
from acq_lab.model import Graph, Hypergraph, LoosePath, loose_path_edges
from acq_lab.pathfinder import (
    attach_leftover,
    build_good_spanning_tree,
    dfs_loose_path,
    find_loose_hamilton_path,
    long_path_density_constant,
)
from acq_lab.rng import child_seed


def _complete_hypergraph(n: int, r: int) -> Hypergraph:
    import itertools

    return Hypergraph(n, r, list(itertools.combinations(range(n), r)))


def _is_loose_path_of(structure, path: LoosePath) -> bool:
    edges = {tuple(sorted(e)) for e in structure.edges}
    return all(tuple(sorted(e)) in edges for e in path.edges)


# ------------------------------------------------------- density constant

def test_density_constant_frozen_values():
    assert long_path_density_constant(2, 0.5) == pytest.approx(32 * math.log(4), rel=1e-12)
    assert long_path_density_constant(2, 0.5) == pytest.approx(44.361, abs=5e-3)
    assert long_path_density_constant(3, 0.5) == pytest.approx(709.78, abs=5e-2)


def test_density_constant_monotone_in_delta():
    prev = 0.0
    for delta in (0.1, 0.3, 0.5, 0.7, 0.9):
        cur = long_path_density_constant(3, delta)
        assert cur > prev
        prev = cur


def test_density_constant_rejects_bad_delta():
    for delta in (0.0, 1.0, -0.2, 1.7):
        with pytest.raises(InvalidDelta):
            long_path_density_constant(2, delta)


# ----------------------------------------------------------- dfs search

def test_dfs_on_complete_graph_is_hamilton():
    g = Graph(7, [(i, j) for i in range(7) for j in range(i + 1, 7)])
    path = dfs_loose_path(g)
    assert len(path.ordering) == 7
    assert _is_loose_path_of(g, path)


def test_dfs_on_complete_triple_system_spans():
    h = _complete_hypergraph(9, 3)
    path = dfs_loose_path(h)
    assert len(path.ordering) == 9
    assert _is_loose_path_of(h, path)


def test_dfs_no_edges_single_vertex():
    path = dfs_loose_path(Hypergraph(5, 3, []))
    assert len(path.ordering) == 1


def test_dfs_start_pins_first_vertex():
    g = gen_gnp(40, 0.2, seed=12)
    path = dfs_loose_path(g, start=17)
    assert path.ordering[0] == 17
    # default start agrees with start=0
    assert dfs_loose_path(g).ordering == dfs_loose_path(g, start=0).ordering


def test_dfs_deterministic_per_seed():
    h = gen_hrnp(40, 3, 0.01, seed=5)
    a = dfs_loose_path(h, seed=77)
    b = dfs_loose_path(h, seed=77)
    assert a.ordering == b.ordering
    assert _is_loose_path_of(h, a)


def test_dfs_debug_checks_never_fire_over_a_sweep():
    # the debug flag turns on the internal retired-set accounting; any
    # violation raises inside the call
    for seed in range(30):
        h = gen_hrnp(50, 3, 0.008, seed=seed)
        path = dfs_loose_path(h, seed=seed, debug=True)
        assert _is_loose_path_of(h, path)
    for seed in range(30):
        g = gen_gnp(60, 0.05, seed=seed)
        path = dfs_loose_path(g, seed=seed, debug=True)
        assert _is_loose_path_of(g, path)


def test_dfs_finds_long_paths_at_threshold_density():
    # at c(r, delta) ln n / n^{r-1} the search should usually cover at
    # least (1 - delta) n vertices; check a clear majority of seeds
    n, delta = 300, 0.5
    p = long_path_density_constant(2, delta) * math.log(n) / n
    hits = 0
    for seed in range(20):
        g = gen_gnp(n, min(p, 1.0), seed=seed)
        if len(dfs_loose_path(g, seed=seed).ordering) >= (1 - delta) * n:
            hits += 1
    assert hits >= 18


# -------------------------------------------------------- spanning trees

def test_tree_from_path_graph_has_no_extras():
    g = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
    spine = LoosePath([0, 1, 2, 3, 4], 2)
    tree, leftover = build_good_spanning_tree(g, spine)
    assert tree.heavy == {} and tree.light == {} and leftover == []


def test_tree_from_star_hand_trace():
    # star with center 0; spine covers one leaf and the center, the next
    # leaf becomes heavy at the center's position, the last is deferred
    g = Graph(4, [(0, 1), (0, 2), (0, 3)])
    spine = LoosePath([1, 0], 2)
    tree, leftover = build_good_spanning_tree(g, spine)
    assert tree.heavy == {1: 2}
    assert tree.light == {}
    assert leftover == [3]
    fixed = attach_leftover(tree, leftover, g)
    assert fixed.light == {3: 0}


def test_tree_rejects_non_spine_input():
    g = Graph(4, [(0, 1), (1, 2)])
    with pytest.raises(InvalidSpine):
        build_good_spanning_tree(g, LoosePath([0, 2], 2))  # (0,2) not an edge
    with pytest.raises(InvalidSpine):
        build_good_spanning_tree(g, LoosePath([0, 1, 2], 3))


def test_tree_rejects_bad_probe_order():
    g = Graph(4, [(0, 1), (1, 2), (2, 3)])
    spine = LoosePath([0, 1, 2], 2)
    with pytest.raises(InvalidSpine):
        build_good_spanning_tree(g, spine, probe_order=[0, 1, 2])
    with pytest.raises(InvalidSpine):
        build_good_spanning_tree(g, spine, edge_oracle_order=[0, 0, 1])


def test_tree_covers_all_vertices_or_reports_leftover():
    for seed in range(20):
        g = gen_gnp(120, 0.08, seed=seed)
        path = dfs_loose_path(g, seed=seed)
        tree, leftover = build_good_spanning_tree(g, path)
        assert tree.vertices | set(leftover) | _isolated(g) >= set(range(g.n)) - _off_component(g, path)
        # every light vertex really is adjacent to its anchor
        es = g.edge_set()
        for v, a in tree.light.items():
            assert tuple(sorted((v, a))) in es
        for pos, v in tree.heavy.items():
            assert tuple(sorted((v, path.ordering[pos]))) in es


def _isolated(g: Graph) -> set:
    deg = [0] * g.n
    for u, v in g.edges:
        deg[u] += 1
        deg[v] += 1
    return {v for v in range(g.n) if deg[v] == 0}


def _off_component(g: Graph, path: LoosePath) -> set:
    # vertices not reachable from the spine can never attach
    from collections import deque

    adj = g.adjacency()
    seen = set(path.ordering)
    queue = deque(seen)
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return set(range(g.n)) - seen


def test_tree_leftover_small_near_connectivity_threshold():
    # just above the connectivity threshold almost every vertex attaches
    n = 500
    p = 1.2 * math.log(n) / n
    good = 0
    for seed in range(100):
        g = gen_gnp(n, p, seed=seed)
        path = dfs_loose_path(g, seed=seed)
        try:
            _, leftover = build_good_spanning_tree(g, path)
        except InvalidSpine:
            continue
        if len(leftover) <= 25:
            good += 1
    assert good >= 90


def test_attach_leftover_failure_is_reported():
    g = Graph(4, [(0, 1), (2, 3)])
    tree = build_good_spanning_tree(g, LoosePath([0, 1], 2))[0]
    with pytest.raises(StructuralAssumptionViolated):
        attach_leftover(tree, [3], g)


# -------------------------------------------------- loose hamilton paths

def test_hamilton_path_in_complete_triple_system():
    h = _complete_hypergraph(5, 3)
    path = find_loose_hamilton_path(h, seed=0)
    assert path is not None
    assert len(path.ordering) == 5
    assert len(path.edges) == 2
    assert _is_loose_path_of(h, path)


def test_hamilton_path_none_without_edges():
    assert find_loose_hamilton_path(Hypergraph(7, 3, []), seed=0) is None


def test_hamilton_path_respects_budget():
    h = gen_hrnp(31, 3, 0.01, seed=1)
    assert find_loose_hamilton_path(h, seed=1, budget=1) is None


def test_hamilton_path_found_at_working_density():
    # well above the appearance threshold the search lands most seeds
    n = 61
    p = 20 * math.log(n) / n**2
    found = 0
    for seed in range(20):
        h = gen_hrnp(n, 3, p, seed=child_seed(900, seed))
        path = find_loose_hamilton_path(h, seed=seed, budget=1_000_000)
        if path is not None:
            assert len(path.ordering) == n
            assert _is_loose_path_of(h, path)
            found += 1
    assert found >= 16
