"""Simulation lab for acquaintance processes on graphs and uniform hypergraphs.

Agents sit one per vertex; each round an adversary-free scheduler picks a
matching of the underlying graph and swaps the matched occupants; every k
agents who co-occupy an edge at a round boundary become acquainted.  The
package provides the bookkeeping engine, seeded instance generators,
path/tree scaffolding, round-schedule strategies, and an exact brute-force
oracle at toy scale.
"""

from .engine import apply_matching, init, is_complete, run_trace
from .generators import EdgeSequence, connectivity_time, gen_gnp, gen_hrnp, gen_process, snapshot
from .model import Graph, GoodTree, Hypergraph, KSubsetIndex, LoosePath, Matching
from .oracle import SearchLimits, exact_ac, lower_bound
from .pathfinder import (
    attach_leftover,
    build_good_spanning_tree,
    dfs_loose_path,
    find_loose_hamilton_path,
    long_path_density_constant,
)
from .strategies import (
    Factorization,
    StrategyTrace,
    baranyai,
    dense_hypergraph_strategy,
    good_tree_strategy,
    loose_path_strategy,
    route_on_loose_path,
    route_on_tree,
    sparse_hypergraph_strategy,
)

__version__ = "0.1.0"
