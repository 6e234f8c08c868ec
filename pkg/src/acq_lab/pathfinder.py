"""Structure discovery inside sampled instances.

Three searches live here: a backtracking DFS that grows a long loose path,
a three-phase greedy builder that turns a path of a graph into a good
spanning tree (spine + heavy + light), and a randomized desk-scale hunt for
a loose Hamilton path.
"""

from __future__ import annotations

from math import factorial, log

from .errors import InvalidDelta, InvalidSpine, StructuralAssumptionViolated
from .model import Graph, GoodTree, Hypergraph, LoosePath
from .rng import SplitMix64


def long_path_density_constant(r: int, delta: float) -> float:
    """Density coefficient c so that edge probability c/n^(r-1) makes the
    DFS below reach delta*n vertices with overwhelming probability.

    Monotone increasing in delta; blows up as delta -> 1.  No attempt to
    make it tight.
    """
    if not 0.0 < delta < 1.0:
        raise InvalidDelta(f"delta={delta} outside (0, 1)")
    if r < 2:
        raise InvalidDelta(f"need r >= 2, got r={r}")
    gap = (1.0 - delta) / (2.0 * (r - 1))
    tail = ((1.0 - delta) / 2.0) ** (r - 1)
    return 2.0 * factorial(r - 1) * log(4.0) / (gap * tail)


def _incidence(structure: Graph | Hypergraph) -> list[list[tuple]]:
    inc: list[list[tuple]] = [[] for _ in range(structure.n)]
    for e in structure.edges:
        for v in e:
            inc[v].append(e)
    return inc


def dfs_loose_path(structure: Graph | Hypergraph, seed: int | None = None, debug: bool = False,
                   start: int | None = None) -> LoosePath:
    """Grow a loose path depth-first; return the longest ordering ever held.

    Extension step: an edge containing the current endpoint whose other r-1
    vertices are all unexplored, minimal in (optionally seed-relabeled) lex
    order.  Dead endpoint: endpoint retires permanently; the r-2 interior
    vertices of its edge retire alongside it.  A dead singleton restarts
    from the lowest-index unexplored vertex.  `start` pins the first root;
    useful when the path must pass through a specific corner of the graph.
    """
    n, r = structure.n, structure.r
    inc = _incidence(structure)
    sigma = list(range(n))
    if seed is not None:
        SplitMix64(seed).shuffle(sigma)

    unexplored = set(range(n))
    dead: set[int] = set()
    retired: set[int] = set()
    first = 0 if start is None else start
    path = [first]
    unexplored.discard(first)
    best = list(path)

    def check_partition():
        on_path = set(path)
        assert len(on_path) == len(path)
        parts = (on_path, unexplored, dead, retired)
        assert sum(len(p) for p in parts) == n
        assert set().union(*parts) == set(range(n))
        assert len(retired) <= (r - 2) * len(dead)

    while True:
        tip = path[-1]
        choice = None
        choice_key = None
        if len(unexplored) >= r - 1:
            for e in inc[tip]:
                rest = [v for v in e if v != tip]
                if len(rest) == r - 1 and all(v in unexplored for v in rest):
                    key = tuple(sorted(sigma[v] for v in rest))
                    if choice_key is None or key < choice_key:
                        choice_key = key
                        choice = rest
        if choice is not None:
            choice.sort(key=lambda v: sigma[v])
            path.extend(choice)
            unexplored.difference_update(choice)
            if len(path) > len(best):
                best = list(path)
        elif len(path) > 1:
            dead.add(path[-1])
            retired.update(path[-r + 1:-1] if r > 2 else [])
            del path[-(r - 1):]
        else:
            dead.add(path[0])
            if not unexplored:
                break
            start = min(unexplored)
            unexplored.discard(start)
            path = [start]
        if debug:
            check_partition()
        if len(unexplored) < r - 1 and len(path) <= len(best):
            break
    return LoosePath(best, r)


def build_good_spanning_tree(
    g: Graph,
    spine: LoosePath,
    edge_oracle_order: list[int] | None = None,
    probe_order: list[int] | None = None,
) -> tuple[GoodTree, list[int]]:
    """Greedy three-phase attachment around a spine path of g.

    Phase one, vertices off the spine in ascending id (or in probe_order):
    first adjacent unmatched spine position claims the vertex as heavy
    there; otherwise the first adjacent heavy vertex takes it as light;
    otherwise deferred.  Phase two retries deferred vertices against the
    full heavy set.  Phase three returns whatever is still unattached.
    Probing a vertex early helps it claim a spine slot before the slot is
    spent on a vertex with other options.
    """
    if spine.r != 2:
        raise InvalidSpine(f"spine must be 2-uniform, got r={spine.r}")
    edge_set = g.edge_set()
    sp = list(spine.ordering)
    for a, b in zip(sp, sp[1:]):
        if tuple(sorted((a, b))) not in edge_set:
            raise InvalidSpine(f"spine step ({a}, {b}) is not an edge")
    if len(set(sp)) != len(sp) or any(not 0 <= v < g.n for v in sp):
        raise InvalidSpine("spine vertices must be distinct and in range")

    kappa = len(sp)
    scan = list(edge_oracle_order) if edge_oracle_order is not None else list(range(kappa))
    if sorted(scan) != list(range(kappa)):
        raise InvalidSpine("edge_oracle_order must permute the spine positions")

    unmatched = set(range(kappa))
    heavy: dict[int, int] = {}
    heavy_order: list[int] = []
    light: dict[int, int] = {}
    deferred: list[int] = []
    on_spine = set(sp)

    def probe(v: int) -> bool:
        for pos in scan:
            if pos in unmatched and tuple(sorted((v, sp[pos]))) in edge_set:
                heavy[pos] = v
                heavy_order.append(v)
                unmatched.discard(pos)
                return True
        for h in heavy_order:
            if tuple(sorted((v, h))) in edge_set:
                light[v] = h
                return True
        return False

    order = list(range(g.n)) if probe_order is None else list(probe_order)
    if probe_order is not None and sorted(order) != list(range(g.n)):
        raise InvalidSpine("probe_order must permute the vertices")
    for v in order:
        if v in on_spine:
            continue
        if not probe(v):
            deferred.append(v)

    leftover: list[int] = []
    for v in deferred:
        for h in heavy_order:
            if tuple(sorted((v, h))) in edge_set:
                light[v] = h
                break
        else:
            leftover.append(v)

    return GoodTree(tuple(sp), heavy, light), leftover


def attach_leftover(tree: GoodTree, leftover: list[int], g: Graph) -> GoodTree:
    """Force each unattached vertex in as light at any adjacent spine or
    heavy vertex; fails when a vertex has no such neighbor."""
    edge_set = g.edge_set()
    anchors = list(tree.spine) + [tree.heavy[p] for p in sorted(tree.heavy)]
    light = dict(tree.light)
    for v in leftover:
        for a in anchors:
            if tuple(sorted((v, a))) in edge_set:
                light[v] = a
                break
        else:
            raise StructuralAssumptionViolated(f"vertex {v} has no spine or heavy neighbor")
    return GoodTree(tree.spine, dict(tree.heavy), light)


def find_loose_hamilton_path(
    structure: Hypergraph | Graph,
    budget: int = 1_000_000,
    seed: int | None = None,
) -> LoosePath | None:
    """Randomized backtracking search for a loose path covering N vertices,
    N the largest value <= n with r-1 dividing N-1.  Returns None when the
    expansion budget (total path extensions) runs out first.

    Candidates are ordered fewest-onward-moves-first; each restart gets a
    small backtracking allowance so a doomed region is abandoned quickly.
    """
    n, r = structure.n, structure.r
    target = n - (n - 1) % (r - 1)
    if target == 1:
        return LoosePath([0], r) if n else None
    inc = _incidence(structure)
    rng = SplitMix64(seed if seed is not None else 0)
    spent = 0
    per_try = max(4 * n, 64)

    while spent < budget:
        spent += 1  # restarts consume budget too, else edgeless inputs spin
        start = rng.randbelow(n)
        path = [start]
        used = {start}
        stack = [_extensions(inc, start, used, rng)]
        steps = 0
        while stack and spent < budget and steps < per_try:
            if len(path) == target:
                return LoosePath(path, r)
            cands = stack[-1]
            if cands:
                ext = cands.pop()
                path.extend(ext)
                used.update(ext)
                spent += 1
                steps += 1
                stack.append(_extensions(inc, path[-1], used, rng))
            else:
                stack.pop()
                steps += 1
                if stack:
                    drop = path[-(r - 1):]
                    del path[-(r - 1):]
                    used.difference_update(drop)
        if len(path) == target:
            return LoosePath(path, r)
    return None


def _free_degree(inc, tip: int, used: set) -> int:
    count = 0
    for e in inc[tip]:
        ok = True
        for v in e:
            if v != tip and v in used:
                ok = False
                break
        if ok:
            count += 1
    return count


def _extensions(inc, tip: int, used: set, rng: SplitMix64) -> list[tuple]:
    """Viable (r-1)-tuples to append at tip.  list.pop() consumes from the
    end, so sort most-constrained-last: the endpoint with the fewest onward
    moves is tried first (random tie-breaking)."""
    out = []
    seen = set()
    for e in inc[tip]:
        rest = tuple(v for v in e if v != tip)
        if len(rest) == len(e) - 1 and rest not in seen and all(v not in used for v in rest):
            seen.add(rest)
            out.append(rest)
    if len(out) > 1:
        scored = []
        for rest in out:
            used.update(rest)
            onward = _free_degree(inc, rest[-1], used)
            used.difference_update(rest)
            scored.append((onward, rng.next_u64(), rest))
        scored.sort(reverse=True)
        out = [rest for _, _, rest in scored]
    return out
