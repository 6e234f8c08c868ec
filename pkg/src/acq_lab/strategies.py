"""Constructive schedules: tree routing, good-tree traversal, uniform
set-partition factorization, loose-path team choreography, and the sparse
and dense hypergraph strategies built from them.

Every function here is a pure constructor of matchings given (input, seed);
the engine replays the result and is the sole judge of legality and
completeness.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

from .errors import (
    InvalidArity,
    InvalidTarget,
    InvalidTree,
    NotATree,
    NotDivisible,
    PathUnavailable,
    SizeMismatch,
    StructuralAssumptionViolated,
)
from .model import Graph, GoodTree, Hypergraph, LoosePath, Matching
from .pathfinder import dfs_loose_path, find_loose_hamilton_path
from .rng import SplitMix64, child_seed

ROUTE_RATE = 6  # relaxed multiplicative routing constant
ROUTE_SLACK = 4  # relaxed additive routing constant


@dataclass
class StrategyTrace:
    matchings: list[Matching]
    claimed_complete: bool
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.matchings)


# ---------------------------------------------------------------------------
# Tree routing
# ---------------------------------------------------------------------------


def _tree_structure(tree: Graph) -> tuple[list[list[int]], list[int], list[int]]:
    """Adjacency, parent and depth arrays rooted at 0; rejects non-trees."""
    n = tree.n
    if len(tree.edges) != n - 1:
        raise NotATree(f"{len(tree.edges)} edges on {n} vertices")
    adj = tree.adjacency()
    parent = [-1] * n
    depth = [-1] * n
    depth[0] = 0
    queue = deque([0])
    seen = 1
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if depth[v] < 0:
                depth[v] = depth[u] + 1
                parent[v] = u
                queue.append(v)
                seen += 1
    if seen != n:
        raise NotATree("graph is disconnected")
    return adj, parent, depth


def _tree_path(parent: list[int], depth: list[int], u: int, v: int) -> list[int]:
    """Vertex sequence from u to v (inclusive)."""
    up, down = [], []
    while depth[u] > depth[v]:
        up.append(u)
        u = parent[u]
    while depth[v] > depth[u]:
        down.append(v)
        v = parent[v]
    while u != v:
        up.append(u)
        u = parent[u]
        down.append(v)
        v = parent[v]
    return up + [u] + down[::-1]


def route_on_tree(tree: Graph, sources, targets) -> list[Matching]:
    """Move the agents occupying `sources` onto `targets`, set-wise.

    Concurrent walkers: each assigned agent follows its tree path one edge
    per round when unblocked.  Head-on walker pairs swap through each other;
    a parked walker displaced by a passer-by steps back afterwards.  Round
    count is bounded by ROUTE_RATE * (max distance + 2(|S|-1)) + ROUTE_SLACK,
    asserted by the test ensemble rather than proved here.
    """
    S, T = list(sources), list(targets)
    if len(S) != len(set(S)) or len(T) != len(set(T)):
        raise SizeMismatch("duplicate vertices in sources or targets")
    if len(S) != len(T):
        raise SizeMismatch(f"|S|={len(S)} != |T|={len(T)}")
    adj, parent, depth = _tree_structure(tree)
    if set(S) == set(T):
        return []

    # set-wise assignment: fix agents already on targets, then match the
    # rest bottom-up so paths never cross more than needed
    t_set = set(T)
    fixed = [s for s in S if s in t_set]
    free_agents = sorted(set(S) - t_set)
    open_targets = sorted(t_set - set(S))
    assignment: dict[int, int] = {s: s for s in fixed}
    # post-order greedy pairing: surplus agents and deficit targets meet at
    # their lowest common region of the tree
    order = sorted(range(tree.n), key=lambda v: -depth[v])
    pend_a: dict[int, list[int]] = {v: [] for v in range(tree.n)}
    pend_t: dict[int, list[int]] = {v: [] for v in range(tree.n)}
    for a in free_agents:
        pend_a[a].append(a)
    for t in open_targets:
        pend_t[t].append(t)
    for v in order:
        agents, tgts = pend_a[v], pend_t[v]
        while agents and tgts:
            assignment[agents.pop()] = tgts.pop()
        if parent[v] >= 0:
            pend_a[parent[v]].extend(agents)
            pend_t[parent[v]].extend(tgts)
            agents.clear()
            tgts.clear()
    assert all(not pend_a[v] and not pend_t[v] for v in range(tree.n))

    # walker state: position and remaining route (deque of upcoming vertices)
    routes: dict[int, deque] = {}
    position: dict[int, int] = {}
    for s, t in assignment.items():
        position[s] = s
        routes[s] = deque(_tree_path(parent, depth, s, t)[1:])
    occupant_walker: dict[int, int] = {position[w]: w for w in routes}
    priority = sorted(routes, key=lambda w: (-depth[assignment[w]], w))

    rounds: list[Matching] = []
    max_dist = max((len(r) for r in routes.values()), default=0)
    cap = 4 * (ROUTE_RATE * (max_dist + 2 * (len(S) - 1)) + ROUTE_SLACK) + 8
    while any(routes[w] for w in priority):
        used: set[int] = set()
        swaps: list[tuple[int, int]] = []
        for w in priority:
            if not routes[w]:
                continue
            here = position[w]
            nxt = routes[w][0]
            if here in used or nxt in used:
                continue
            other = occupant_walker.get(nxt)
            if other is not None and routes[other]:
                if routes[other][0] == here:
                    # head-on: one swap advances both walkers
                    swaps.append((here, nxt))
                    used.update((here, nxt))
                    routes[w].popleft()
                    routes[other].popleft()
                    position[w], position[other] = nxt, here
                    occupant_walker[nxt], occupant_walker[here] = w, other
                continue
            swaps.append((here, nxt))
            used.update((here, nxt))
            routes[w].popleft()
            position[w] = nxt
            if other is not None:
                # displaced a parked walker: it must step back afterwards
                routes[other].append(nxt)
                position[other] = here
                occupant_walker[here] = other
            else:
                occupant_walker.pop(here, None)
            occupant_walker[nxt] = w
        assert swaps, "router stalled with active walkers"
        rounds.append(Matching(swaps))
        if len(rounds) > cap:
            raise AssertionError(f"router exceeded safety cap {cap}")
    return rounds


# ---------------------------------------------------------------------------
# Uniform set-partition factorization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Factorization:
    N: int
    s: int
    factors: tuple

    def to_json(self) -> str:
        return json.dumps(
            {"N": self.N, "s": self.s, "factors": [[list(p) for p in f] for f in self.factors]}
        )

    @classmethod
    def from_json(cls, text: str) -> "Factorization":
        obj = json.loads(text)
        factors = tuple(tuple(tuple(p) for p in f) for f in obj["factors"])
        return cls(obj["N"], obj["s"], factors)


def baranyai(N: int, s: int) -> Factorization:
    """Partition all s-subsets of [0,N) into C(N-1, s-1) perfect factors.

    s=1, s=2 and s=N have direct constructions; the general case runs the
    element-by-element integral-flow induction.
    """
    if s < 1 or N % s != 0:
        raise NotDivisible(f"s={s} must divide N={N}")
    if s == N:
        factors = [[tuple(range(N))]]
    elif s == 1:
        factors = [[(v,) for v in range(N)]]
    elif s == 2:
        factors = _round_robin(N)
    else:
        factors = _flow_factorize(N, s)
    canon = tuple(tuple(sorted(tuple(sorted(p)) for p in f)) for f in factors)
    return Factorization(N, s, canon)


def _round_robin(N: int) -> list[list[tuple]]:
    """Circle method: N-1 rounds pairing 2N/2 players, player N-1 fixed."""
    factors = []
    m = N - 1
    for i in range(m):
        pairs = [(i, N - 1)]
        for j in range(1, N // 2):
            a = (i + j) % m
            b = (i - j) % m
            pairs.append((a, b))
        factors.append(pairs)
    return factors


def _flow_factorize(N: int, s: int) -> list[list[tuple]]:
    ell = comb(N - 1, s - 1)
    parts_per = N // s
    # per factor: list of current nonempty partial parts (tuples)
    state: list[list[tuple]] = [[] for _ in range(ell)]
    for x in range(N):
        t = N - x - 1  # elements remaining after placing x
        # flow nodes: 0 = source, 1..ell = factors, then one node per
        # distinct part value (tuple; () stands for opening a new part),
        # last = sink
        values: dict[tuple, int] = {}
        arcs: dict[int, dict[int, int]] = {0: {}}

        def node_for(val: tuple) -> int:
            if val not in values:
                values[val] = 1 + ell + len(values)
            return values[val]

        for f in range(ell):
            fn = 1 + f
            arcs[0][fn] = 1
            arcs.setdefault(fn, {})
            for p in state[f]:
                if len(p) < s:
                    arcs[fn][node_for(p)] = 1
            if len(state[f]) < parts_per:
                arcs[fn][node_for(())] = 1
        sink = 1 + ell + len(values)
        for val, vn in values.items():
            need = comb(t, s - len(val) - 1)
            arcs.setdefault(vn, {})[sink] = need
        value, residual = _max_flow(arcs, 0, sink, sink + 1)
        assert value == ell, f"flow short at element {x}: {value} < {ell}"
        node_val = {vn: val for val, vn in values.items()}
        for f in range(ell):
            fn = 1 + f
            chosen = [vn for vn in arcs[fn] if residual[fn][vn] == 0]
            assert len(chosen) == 1, f"factor {f} sent {len(chosen)} units"
            val = node_val[chosen[0]]
            if val == ():
                state[f].append((x,))
            else:
                state[f][state[f].index(val)] = val + (x,)
    for f in range(ell):
        assert all(len(p) == s for p in state[f]) and len(state[f]) == parts_per
    return [list(f) for f in state]


def _max_flow(arcs: dict[int, dict[int, int]], src: int, snk: int, n_nodes: int) -> tuple[int, list[dict]]:
    """Plain BFS augmenting-path max flow; returns (value, residual caps)."""
    cap: list[dict[int, int]] = [dict() for _ in range(n_nodes)]
    for u, nbrs in arcs.items():
        for v, c in nbrs.items():
            cap[u][v] = cap[u].get(v, 0) + c
            cap[v].setdefault(u, 0)
    value = 0
    while True:
        prev = [-1] * n_nodes
        prev[src] = src
        queue = deque([src])
        while queue and prev[snk] < 0:
            u = queue.popleft()
            for v, c in cap[u].items():
                if c > 0 and prev[v] < 0:
                    prev[v] = u
                    queue.append(v)
        if prev[snk] < 0:
            return value, cap
        bottleneck = None
        v = snk
        while v != src:
            u = prev[v]
            b = cap[u][v]
            bottleneck = b if bottleneck is None else min(bottleneck, b)
            v = u
        v = snk
        while v != src:
            u = prev[v]
            cap[u][v] -= bottleneck
            cap[v][u] += bottleneck
            v = u
        value += bottleneck


# ---------------------------------------------------------------------------
# Loose-path permutation routing
# ---------------------------------------------------------------------------


def route_on_loose_path(path: LoosePath, target: dict[int, int]) -> list[Matching]:
    """Sort occupants to `target` (vertex -> vertex bijection on the path)
    by recursive halving with parallel odd-even partition rounds.

    Consecutive path positions always share a hyperedge, so every emitted
    pair is a legal swap.
    """
    verts = list(path.ordering)
    n = len(verts)
    pos_of = {v: i for i, v in enumerate(verts)}
    if set(target) != set(verts) or set(target.values()) != set(verts):
        raise InvalidTarget("target must be a bijection on the path's vertices")
    # goal[i] = target position of the occupant currently at position i
    goal = [pos_of[target[verts[i]]] for i in range(n)]

    rounds: list[Matching] = []
    segments = [(0, n)]
    while any(b - a > 1 for a, b in segments):
        splits = []
        for a, b in segments:
            mid = a + (b - a + 1) // 2 if b - a > 1 else b
            splits.append((a, b, mid))
        # parity rounds until every segment is partitioned around its mid
        parity = 0
        while True:
            done = all(
                all(goal[i] < mid for i in range(a, mid)) for a, b, mid in splits if b - a > 1
            )
            if done:
                break
            swaps = []
            for a, b, mid in splits:
                if b - a <= 1:
                    continue
                for i in range(a + parity, b - 1, 2):
                    left_stays = goal[i] < mid
                    right_stays = goal[i + 1] < mid
                    if not left_stays and right_stays:
                        swaps.append((verts[i], verts[i + 1]))
                        goal[i], goal[i + 1] = goal[i + 1], goal[i]
            if swaps:
                rounds.append(Matching(swaps))
            parity ^= 1
        next_segments = []
        for a, b, mid in splits:
            if b - a > 1:
                next_segments.extend([(a, mid), (mid, b)])
            else:
                next_segments.append((a, b))
        segments = next_segments
    return rounds


class _VertexSim:
    """Occupancy bookkeeping while a schedule is being built.

    Agents are labeled by their starting vertex, so emitted matchings stay
    meaningful for any actual occupancy at replay time.
    """

    def __init__(self, n: int):
        self.vertex_of = list(range(n))
        self.agent_at = list(range(n))
        self.rounds: list[Matching] = []

    def emit(self, m: Matching | list[tuple[int, int]]) -> None:
        if not isinstance(m, Matching):
            m = Matching(m)
        for u, v in m.swaps:
            a, b = self.agent_at[u], self.agent_at[v]
            self.agent_at[u], self.agent_at[v] = b, a
            self.vertex_of[a], self.vertex_of[b] = v, u
        self.rounds.append(m)


def good_tree_strategy(tree: GoodTree) -> StrategyTrace:
    """Pairwise-acquaint all agents on a good tree.

    Agents take turns in teams of up to kappa = len(spine). A team is routed
    onto a spine prefix and then carried through 2*kappa conveyor phases.
    Each phase swaps alternating spine edges, then detours every occupant of
    a heavy-attachment position out to its pendant vertex and back, so the
    touring agents cross every spine resident and stand next to every pendant
    at a round boundary. Correctness is positional: it does not depend on
    which agents the routing displaced where.
    """
    verts = tree.vertices
    n = len(verts)
    if verts != set(range(n)):
        raise InvalidTree("good tree must cover vertices 0..n-1 exactly")
    g = tree.as_graph(n)
    spine = tree.spine
    kappa = len(spine)
    odd_swaps = [(spine[i], spine[i + 1]) for i in range(0, kappa - 1, 2)]
    even_swaps = [(spine[i], spine[i + 1]) for i in range(1, kappa - 1, 2)]
    detour = [(spine[i], u) for i, u in sorted(tree.heavy.items())]

    sim = _VertexSim(n)
    route_rounds = 0
    teams = [list(range(j, min(j + kappa, n))) for j in range(0, n, kappa)]
    for team in teams:
        src = [sim.vertex_of[a] for a in team]
        dst = [spine[i] for i in range(len(team))]
        ms = route_on_tree(g, src, dst)
        route_rounds += len(ms)
        for m in ms:
            sim.emit(m)
        for phase in range(2 * kappa):
            parity = odd_swaps if phase % 2 == 0 else even_swaps
            if parity:
                sim.emit(list(parity))
            if detour:
                sim.emit(list(detour))
                sim.emit(list(detour))
    meta = {
        "teams": len(teams),
        "spine_length": kappa,
        "route_rounds": route_rounds,
        "rounds_per_agent": len(sim.rounds) / n,
    }
    return StrategyTrace(sim.rounds, True, meta)


class _PathSim:
    """Slot-level occupancy bookkeeping on one loose path.

    Residents are labeled by starting slot; `seen` collects each resident's
    visited slots across every emitted round boundary.
    """

    def __init__(self, path: LoosePath):
        self.path = path
        nv = len(path.ordering)
        self.nv = nv
        self.occ = list(range(nv))
        self.slot = list(range(nv))
        self.seen = [1 << i for i in range(nv)]
        self.rounds: list[Matching] = []

    def emit_slots(self, slot_pairs: list[tuple[int, int]]) -> None:
        order = self.path.ordering
        swaps = []
        for i, j in slot_pairs:
            a, b = self.occ[i], self.occ[j]
            self.occ[i], self.occ[j] = b, a
            self.slot[a], self.slot[b] = j, i
            self.seen[a] |= 1 << j
            self.seen[b] |= 1 << i
            swaps.append((order[i], order[j]))
        self.rounds.append(Matching(swaps))

    def all_seen(self) -> bool:
        full = (1 << self.nv) - 1
        return all(s == full for s in self.seen)


def _aligned(w: int, k: int, r: int) -> bool:
    # k consecutive slots starting at w sit inside one edge of the path iff
    # the window does not straddle an edge boundary
    return w % (r - 1) <= r - k


def _lane_cross(seg, s, a, b, k, r):
    """Pass every left-block member rightward through the right block.

    seg is the occupant list of slots [s, s+a+b) and is mutated to the
    post-crossing layout (right block first, member order preserved).
    Returns (rounds, met): one swap per round, and the set of left members
    whose k-slot passage window sat inside a single edge -- those met the
    whole right block at a boundary, which only counts when the right block
    is a full team of k-1.
    """
    rounds = []
    met = set()
    track = b == k - 1
    for t in range(a):
        w = a - 1 - t
        passer = seg[w]
        if track and _aligned(s + w, k, r):
            met.add(passer)
        for j in range(b):
            seg[w + j], seg[w + j + 1] = seg[w + j + 1], seg[w + j]
            rounds.append((s + w + j, s + w + j + 1))
    return rounds, met


def _lane_dock(seg, s, a, b, k, r, met):
    """Meet every unmet passed member with the (full) right team in-lane.

    Entry layout: team at local [0, b), passed members at [b, a+b). The team
    is shifted right to an edge-embedded window by re-passing members
    leftward (preferring already-met ones), each remaining unmet member is
    walked into the window slot, and the shift is undone. Layout is restored
    set-wise. Requires a > t where t is the shift distance; the caller
    defers to _global_dock otherwise.
    """
    rounds = []

    def swap(i, j):
        seg[i], seg[j] = seg[j], seg[i]
        rounds.append((s + i, s + j))

    t_r = next(t for t in range(k - 1) if _aligned(s + t, k, r))
    guard = 0
    while any(m not in met for m in seg[b:]):
        guard += 1
        assert guard <= k, "in-lane docking failed to converge"
        beta = 0
        for _ in range(t_r):
            zstart = beta + b
            pick = next((q for q in range(zstart, a + b) if seg[q] in met), zstart)
            member = seg[pick]
            for q in range(pick, zstart, -1):
                swap(q - 1, q)
            ok = _aligned(s + beta, k, r)
            for q in range(zstart, beta, -1):
                swap(q - 1, q)
            if ok:
                met.add(member)
            beta += 1
        zstart = beta + b
        met.add(seg[zstart])  # boundary after the last emitted round
        while True:
            um = [q for q in range(zstart, a + b) if seg[q] not in met]
            if not um:
                break
            member = seg[um[0]]
            for q in range(um[0], zstart, -1):
                swap(q - 1, q)
            met.add(member)
        while beta > 0:
            member = seg[beta - 1]
            ok = _aligned(s + beta - 1, k, r)
            for q in range(beta - 1, beta - 1 + b):
                swap(q, q + 1)
            if ok:
                met.add(member)
            beta -= 1
    return rounds


def _global_dock(sim: _PathSim, x: int, team: tuple[int, ...], k: int, r: int) -> None:
    """Meet one deferred member with its team using slots beyond the lane.

    Used when the passer block was too small to shift the team in-lane.
    The member is walked next to the team, the whole k-group is shifted to
    the nearest edge-embedded window, and both shifts are undone, so every
    bystander returns to its slot.
    """
    nv = sim.nv

    def swap(i, j):
        sim.emit_slots([(i, j)])

    bs = min(sim.slot[m] for m in team)
    q = sim.slot[x]
    assert q > bs + k - 2, "deferred member expected right of its team"
    while q > bs + k - 1:
        swap(q - 1, q)
        q -= 1
    w_star = None
    for d in range(nv):
        for cand in (bs - d, bs + d):
            if 0 <= cand <= nv - k and _aligned(cand, k, r):
                w_star = cand
                break
        if w_star is not None:
            break
    g = bs
    while g < w_star:
        for p in range(g + k - 1, g - 1, -1):
            swap(p, p + 1)
        g += 1
    while g > w_star:
        for p in range(g - 1, g + k - 1):
            swap(p, p + 1)
        g -= 1
    # group sits in an edge at this boundary; undo the shift
    while g < bs:
        for p in range(g + k - 1, g - 1, -1):
            swap(p, p + 1)
        g += 1
    while g > bs:
        for p in range(g - 1, g + k - 1):
            swap(p, p + 1)
        g -= 1


def loose_path_strategy(path: LoosePath, k: int, seed: int | None = None) -> StrategyTrace:
    """k-acquaint the residents of a loose path.

    Residents are grouped into teams of k-1 by each factor of the uniform
    set-partition factorization; each factor's teams are laid out in a
    seeded order, then adjacent team blocks cross brick-wall style until
    every ordered pair of blocks has crossed, so every (k-1)-team has met
    every other resident inside one edge. Cyclic sweeps are appended if any
    resident has not yet visited every slot.
    """
    r = path.r
    if not 2 <= k <= r:
        raise InvalidArity(f"k={k} must satisfy 2 <= k <= r={r}")
    nv = len(path.ordering)
    sim = _PathSim(path)
    if nv < k:
        return StrategyTrace([], True, {"factors": 0, "phases": 0, "sweeps": 0})
    base = 0 if seed is None else seed
    size = k - 1
    cap_n = nv if nv % size == 0 else nv + size - nv % size
    fact = baranyai(cap_n, size)
    slot_of = {v: i for i, v in enumerate(path.ordering)}
    total_phases = 0

    def apply_vertex_rounds(ms):
        for m in ms:
            sim.emit_slots([(slot_of[u], slot_of[v]) for u, v in m.swaps])

    for fi, factor in enumerate(fact.factors):
        teams = [tuple(m for m in part if m < nv) for part in factor]
        teams = [t for t in teams if t]
        rng = SplitMix64(child_seed(base, fi))
        rng.shuffle(teams)
        target_slot = {}
        off = 0
        for t in teams:
            for idx, m in enumerate(t):
                target_slot[m] = off + idx
            off += len(t)
        vt = {}
        for m in range(nv):
            vt[path.ordering[sim.slot[m]]] = path.ordering[target_slot[m]]
        apply_vertex_rounds(route_on_loose_path(path, vt))

        blocks = [list(t) for t in teams]
        ids = list(range(len(blocks)))
        full = [len(t) == size for t in blocks]
        L = len(blocks)
        needed = {(i, j) for i in range(L) for j in range(L) if i != j and full[j]}
        crossed: set[tuple[int, int]] = set()
        phase = 0
        cap = 4 * L + 8
        while phase < 2 * L or needed - crossed:
            assert phase < cap, "brick wall failed to cover all team pairs"
            bases = [0]
            for bk in blocks:
                bases.append(bases[-1] + len(bk))
            lane_rounds = []
            deferred = []
            for li in range(phase % 2, L - 1, 2):
                A, B = blocks[li], blocks[li + 1]
                s_abs = bases[li]
                seg = sim.occ[s_abs:s_abs + len(A) + len(B)]
                rr, met = _lane_cross(seg, s_abs, len(A), len(B), k, r)
                if full[li + 1] and k > 2 and any(m not in met for m in A):
                    t_r = next(t for t in range(k - 1) if _aligned(s_abs + t, k, r))
                    if t_r < len(A):
                        rr += _lane_dock(seg, s_abs, len(A), len(B), k, r, met)
                    else:
                        deferred.extend((m, tuple(B)) for m in A if m not in met)
                crossed.add((ids[li], ids[li + 1]))
                blocks[li], blocks[li + 1] = seg[:len(B)], seg[len(B):]
                ids[li], ids[li + 1] = ids[li + 1], ids[li]
                full[li], full[li + 1] = full[li + 1], full[li]
                lane_rounds.append(rr)
            for t in range(max(map(len, lane_rounds), default=0)):
                sim.emit_slots([rr[t] for rr in lane_rounds if t < len(rr)])
            for m, team in deferred:
                _global_dock(sim, m, team, k, r)
            bases = [0]
            for bk in blocks:
                bases.append(bases[-1] + len(bk))
            for bi, bk in enumerate(blocks):  # refresh member order after docking
                blocks[bi] = sim.occ[bases[bi]:bases[bi + 1]]
            if k > 2:
                maxsz = max(len(bk) for bk in blocks)
                for t in range(maxsz - 1):
                    pairs = []
                    for bi, bk in enumerate(blocks):
                        jj = len(bk) - 2 - t
                        if jj >= 0:
                            pairs.append((bases[bi] + jj, bases[bi] + jj + 1))
                            bk[jj], bk[jj + 1] = bk[jj + 1], bk[jj]
                    sim.emit_slots(pairs)
            phase += 1
        total_phases += phase

    sweeps = 0
    while not sim.all_seen():
        assert sweeps < nv, "cyclic sweeps failed to complete slot visits"
        vt = {path.ordering[i]: path.ordering[(i + 1) % nv] for i in range(nv)}
        apply_vertex_rounds(route_on_loose_path(path, vt))
        sweeps += 1

    meta = {
        "factors": len(fact.factors),
        "phases": total_phases,
        "sweeps": sweeps,
        "rounds_per_slot": len(sim.rounds) / nv,
    }
    return StrategyTrace(sim.rounds, True, meta)


def _attachments(structure, on_path: set[int]) -> dict[int, int]:
    """For each vertex off the path, a path vertex sharing an edge with it."""
    attach: dict[int, int] = {}
    for e in structure.edges:
        hooks = sorted(v for v in e if v in on_path)
        if not hooks:
            continue
        for v in e:
            if v not in on_path and v not in attach:
                attach[v] = hooks[0]
    missing = [v for v in range(structure.n) if v not in on_path and v not in attach]
    if missing:
        raise StructuralAssumptionViolated(
            f"vertices {missing[:5]} share no edge with the path")
    return attach


def _rotation_stage(sim: _VertexSim, structure, path: LoosePath, k: int,
                    base: int, tag: int) -> dict:
    """Group rotation: k+1 turns, each hosting everyone outside one group.

    Per turn, off-path agents to be hosted trade places with on-path agents
    of the resting group (walk a resting agent along the path to the
    attachment vertex, then swap across the attaching edge), after which the
    team choreography runs on the whole path. Any k agents miss at least one
    group, so some turn hosts them all together.
    """
    n = structure.n
    nv = len(path.ordering)
    on_path = set(path.ordering)
    groups = [[a for a in range(n) if a % (k + 1) == i] for i in range(k + 1)]
    assert len(groups) > k, "a k-subset cannot hit every group"
    if nv < n - min(len(gp) for gp in groups):
        raise StructuralAssumptionViolated(
            f"path hosts {nv} of {n} vertices, too few for the group rotation")
    attach = _attachments(structure, on_path)
    slot_of = {v: i for i, v in enumerate(path.ordering)}
    exchange_rounds = 0
    team_rounds = 0
    for i, group in enumerate(groups):
        spare = nv - (n - len(group))
        fillers = set(sorted(group)[:spare])
        resting = [a for a in group if a not in fillers]
        resting_set = set(resting)
        before = len(sim.rounds)
        for v in sorted(attach):
            a = sim.agent_at[v]
            if a in resting_set:
                continue
            w = attach[v]
            ws = slot_of[w]
            pool = [slot_of[sim.vertex_of[b]] for b in resting
                    if sim.vertex_of[b] in on_path]
            q = min(pool, key=lambda s: (abs(s - ws), s))
            step = -1 if q > ws else 1
            while q != ws:
                sim.emit([(path.ordering[q], path.ordering[q + step])])
                q += step
            sim.emit([(w, v)])
        exchange_rounds += len(sim.rounds) - before
        before = len(sim.rounds)
        for m in loose_path_strategy(path, k, child_seed(base, tag + i)).matchings:
            sim.emit(m)
        team_rounds += len(sim.rounds) - before
    return {"turns": len(groups), "exchange_rounds": exchange_rounds,
            "team_rounds": team_rounds}


def sparse_hypergraph_strategy(structure, k: int, seed: int | None = None,
                               attempts: int = 120) -> StrategyTrace:
    """k-acquaint agents on a sparse hypergraph via one long loose path.

    Finds a loose path by seeded depth-first searches (keeping the longest
    until it can host everyone outside one group), checks every off-path
    vertex can be swapped in through an attaching edge, and runs the k+1
    group rotation with the path as the meeting ground.
    """
    r = structure.r
    if not 2 <= k <= r:
        raise InvalidArity(f"k={k} must satisfy 2 <= k <= r={r}")
    base = 0 if seed is None else seed
    need = structure.n - structure.n // (k + 1)
    path = None
    best = None
    for attempt in range(attempts):
        cand = dfs_loose_path(structure, seed=child_seed(base, 1 + attempt))
        if best is None or len(cand.ordering) > len(best.ordering):
            best = cand
        if len(cand.ordering) < need:
            continue
        try:
            _attachments(structure, set(cand.ordering))
        except StructuralAssumptionViolated:
            continue
        path = cand
        break
    if path is None:
        path = best
    nv = len(path.ordering)
    sim = _VertexSim(structure.n)
    if nv == structure.n:
        for m in loose_path_strategy(path, k, child_seed(base, 2)).matchings:
            sim.emit(m)
        meta = {"path_len": nv, "turns": 1, "exchange_rounds": 0,
                "team_rounds": len(sim.rounds)}
        return StrategyTrace(sim.rounds, True, meta)
    meta = _rotation_stage(sim, structure, path, k, base, 100)
    meta["path_len"] = nv
    return StrategyTrace(sim.rounds, True, meta)


def dense_hypergraph_strategy(structure, k: int, omega: float, cut_constant: float = 4.0,
                              seed: int | None = None) -> StrategyTrace:
    """k-acquaint agents on a dense hypergraph by cutting a spanning path.

    Finds a near-spanning loose path, cuts it into (omega/cut_constant)
    ^(1/(k-1)) sub-paths by dropping separator edges, and runs the team
    choreography on all sub-paths simultaneously; the agents on dropped
    separators and off the path stay passive for that stage. A k+1 group
    rotation on the whole path then covers passive agents and tuples that
    span sub-paths.
    """
    r = structure.r
    if not 2 <= k <= r:
        raise InvalidArity(f"k={k} must satisfy 2 <= k <= r={r}")
    base = 0 if seed is None else seed
    path = find_loose_hamilton_path(structure, seed=child_seed(base, 3))
    if path is None:
        raise PathUnavailable("no near-spanning loose path found within budget")
    nv = len(path.ordering)
    m_edges = len(path.edges)
    units = max(1, round((omega / cut_constant) ** (1.0 / (k - 1))))
    units = min(units, (m_edges + 1) // 2)
    lens = [(m_edges - units + 1) // units] * units
    for j in range((m_edges - units + 1) % units):
        lens[j] += 1
    subs = []
    start = 0
    for ln in lens:
        lo, hi = start * (r - 1), (start + ln) * (r - 1) + 1
        subs.append(LoosePath(path.ordering[lo:hi], r))
        start += ln + 1  # skip the dropped separator edge
    passive = (units - 1) * (r - 2) + structure.n - nv

    sim = _VertexSim(structure.n)
    traces = [loose_path_strategy(sp, k, child_seed(base, 10 + j)).matchings
              for j, sp in enumerate(subs)]
    for t in range(max(map(len, traces), default=0)):
        pairs = [p for tr in traces if t < len(tr) for p in tr[t].swaps]
        sim.emit(pairs)
    unit_rounds = len(sim.rounds)

    meta = {"path_len": nv, "units": units, "passive": passive,
            "unit_rounds": unit_rounds}
    if units == 1 and nv == structure.n:
        meta.update({"turns": 0, "exchange_rounds": 0, "team_rounds": 0})
        return StrategyTrace(sim.rounds, True, meta)
    meta.update(_rotation_stage(sim, structure, path, k, base, 200))
    return StrategyTrace(sim.rounds, True, meta)
