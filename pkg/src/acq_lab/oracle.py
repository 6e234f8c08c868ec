"""Ground truth at tiny scale.

Closed-form lower bound, exhaustive matching enumeration, and exact minimal
round counts by breadth-first search over (placement, ledger) states.  The
search is deliberately plain: no symmetry reduction, every matching (empty
included) is a move.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from math import ceil, comb

from .errors import SearchBudgetExceeded, Unacquaintable
from .model import Graph, Hypergraph, Matching, underlying_graph


def lower_bound(n: int, edge_count: int, r: int, k: int) -> int:
    """Counting bound: each round adds at most edge_count * C(r, k) subsets."""
    total = comb(n, k)
    if edge_count == 0:
        if total > 0:
            raise Unacquaintable("no edges: nothing can ever become acquainted")
        return 0
    per_round = edge_count * comb(r, k)
    return max(0, ceil(total / per_round - 1))


def enumerate_matchings(g: Graph) -> list[Matching]:
    """Every matching of g (empty included), each exactly once, lex order."""
    edges = list(g.edges)
    out: list[Matching] = []

    def extend(start: int, chosen: list, used: set):
        out.append(Matching(chosen))
        for i in range(start, len(edges)):
            u, v = edges[i]
            if u not in used and v not in used:
                chosen.append(edges[i])
                used.update((u, v))
                extend(i + 1, chosen, used)
                chosen.pop()
                used.difference_update((u, v))

    extend(0, [], set())
    return out


@dataclass(frozen=True)
class SearchLimits:
    max_states: int = 2_000_000
    max_n: int = 6
    max_k: int = 3


def exact_ac(structure: Graph | Hypergraph, k: int, limits: SearchLimits = SearchLimits()) -> int:
    """Minimal number of rounds to fill the ledger, by BFS.

    State = (occupant tuple over vertices, ledger bitmask).  Moves are all
    matchings of the underlying graph.  Raises SearchBudgetExceeded when the
    explored-state cap trips, Unacquaintable when the reachable space is
    exhausted without completion.
    """
    n, r = structure.n, structure.r
    if n > limits.max_n or k > limits.max_k:
        raise SearchBudgetExceeded(f"n={n}, k={k} beyond limits ({limits.max_n}, {limits.max_k})")

    bit_of = {c: i for i, c in enumerate(combinations(range(n), k))}
    full = (1 << comb(n, k)) - 1
    # per edge, the k-subsets of its vertex slots
    edge_combos = [list(combinations(e, k)) for e in structure.edges if len(e) >= k]

    def absorb(occ: tuple, ledger: int) -> int:
        for slots in edge_combos:
            for c in slots:
                ledger |= 1 << bit_of[tuple(sorted(occ[v] for v in c))]
        return ledger

    start_occ = tuple(range(n))
    start = (start_occ, absorb(start_occ, 0))
    if start[1] == full:
        return 0

    under = structure if isinstance(structure, Graph) else underlying_graph(structure)
    moves = [m.swaps for m in enumerate_matchings(under) if m.swaps]

    seen = {start}
    frontier = deque([start])
    depth = 0
    while frontier:
        depth += 1
        next_frontier: deque = deque()
        for occ, ledger in frontier:
            for swaps in moves:
                lst = list(occ)
                for u, v in swaps:
                    lst[u], lst[v] = lst[v], lst[u]
                occ2 = tuple(lst)
                led2 = absorb(occ2, ledger)
                if led2 == full:
                    return depth
                state = (occ2, led2)
                if state not in seen:
                    seen.add(state)
                    if len(seen) > limits.max_states:
                        raise SearchBudgetExceeded(f"state cap {limits.max_states} exceeded")
                    next_frontier.append(state)
        frontier = next_frontier
    raise Unacquaintable("search space exhausted without a complete ledger")
