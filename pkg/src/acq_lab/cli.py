"""Command-line front door: generate instances, run strategies and the
exact oracle, execute benchmark ensembles, emit CSV/JSON.

Ensemble rows execute on a thread pool (ACQ_LAB_THREADS caps the width) and
are sorted by (n, seed) before writing, so concurrency never changes the
file.  Exit codes: 0 success, 1 invariant or structural failure, 2
configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations, permutations
from math import comb
from pathlib import Path

import numpy as np

from .engine import apply_matching, init, run_trace
from .errors import (
    AcqLabError,
    IllegalSwap,
    InvalidArity,
    InvalidDelta,
    InvalidProbability,
    InvalidUniformity,
    SearchBudgetExceeded,
    StructuralAssumptionViolated,
)
from .generators import (
    EdgeSequence,
    connectivity_time,
    gen_gnp,
    gen_hrnp,
    gen_process,
    snapshot,
)
from .model import Graph, GoodTree, Hypergraph, LoosePath, Matching, underlying_graph
from .oracle import exact_ac, lower_bound
from .pathfinder import (
    attach_leftover,
    build_good_spanning_tree,
    dfs_loose_path,
    long_path_density_constant,
)
from .rng import SplitMix64, child_seed
from .strategies import (
    StrategyTrace,
    baranyai,
    dense_hypergraph_strategy,
    good_tree_strategy,
    loose_path_strategy,
    sparse_hypergraph_strategy,
)

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2
EXIT_IO = 3

CSV_COLUMNS = [
    "model", "n", "p_or_omega", "r", "k", "seed", "M",
    "path_len", "leftover", "rounds", "lower_bound", "runtime_ms", "error",
]

FACTOR_FIXTURES = {
    (4, 2): 3, (6, 2): 5, (8, 2): 7, (6, 3): 10, (9, 3): 28, (8, 4): 35,
}

ORACLE_TABLE = {
    "path-3": (Graph(3, [(0, 1), (1, 2)]), 1),
    "cycle-4": (Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)]), 1),
    "star-4": (Graph(4, [(0, 1), (0, 2), (0, 3)]), 2),
    "complete-4": (Graph(4, list(combinations(range(4), 2))), 0),
}


class _ConfigError(Exception):
    """Bad flags or malformed input; maps to exit code 2."""


def _parse_ints(text: str, flag: str) -> list[int]:
    """Comma-separated integers with inclusive a..b ranges: "1,4..6" -> [1,4,5,6]."""
    values: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                lo, hi = part.split("..")
                values.extend(range(int(lo), int(hi) + 1))
            else:
                values.append(int(part))
        except ValueError:
            raise _ConfigError(f"{flag}: cannot parse {part!r}") from None
    if not values:
        raise _ConfigError(f"{flag}: empty list")
    return values


def _workers(jobs: int) -> int:
    cap = os.environ.get("ACQ_LAB_THREADS", "")
    width = os.cpu_count() or 1
    if cap:
        try:
            width = max(1, int(cap))
        except ValueError:
            raise _ConfigError(f"ACQ_LAB_THREADS={cap!r} is not an integer") from None
    return max(1, min(width, jobs))


def _resolve_p(args, n: int, r: int) -> float:
    """Edge probability from --p, --omega (threshold multiple), or --delta."""
    if args.p is not None:
        return args.p
    if getattr(args, "omega", None) is not None:
        p = args.omega * math.factorial(r - 1) * math.log(n) / n ** (r - 1)
        return min(p, 1.0)
    if getattr(args, "delta", None) is not None:
        return min(long_path_density_constant(r, args.delta) / n ** (r - 1), 1.0)
    raise _ConfigError("need --p, --omega, or --delta to fix the edge probability")


def _param_label(args, p: float) -> str:
    if args.p is None and getattr(args, "omega", None) is not None:
        return f"{args.omega:g}"
    return f"{p:.6g}"


def _unattachable(tree: GoodTree, leftover: list[int], g: Graph) -> list[int]:
    anchors = set(tree.spine) | set(tree.heavy.values())
    adj = g.adjacency()
    return [v for v in leftover if not any(u in anchors for u in adj[v])]


def good_tree_pipeline(g: Graph, seed: int, attempts: int = 24) -> tuple[StrategyTrace, int, int]:
    """Spine by DFS, greedy good-tree attachment, forced light fallback for
    whatever is left, then the conveyor schedule.

    A stranded vertex (every neighbor light or off-tree) is rescued either
    by a spine through its chain or by its hub turning heavy, so failed
    attempts enqueue a DFS rooted at each stranded vertex and promote the
    hubs to the front of the probe order on every later attempt.

    Returns (trace, spine candidate length, count of force-attached vertices).
    """
    adj = g.adjacency()
    roots: deque[int] = deque()
    targeted: set[int] = set()
    hubs: set[int] = set()
    last_exc: AcqLabError | None = None
    for a in range(attempts):
        root = roots.popleft() if roots else None
        path = dfs_loose_path(g, seed=child_seed(seed, 11 + a), start=root)
        order = None
        if hubs:
            order = sorted(hubs) + [v for v in range(g.n) if v not in hubs]
        tree, leftover = build_good_spanning_tree(g, path, probe_order=order)
        try:
            if leftover:
                tree = attach_leftover(tree, leftover, g)
        except StructuralAssumptionViolated as exc:
            last_exc = exc
            for v in _unattachable(tree, leftover, g):
                hubs.update(adj[v])
                if v not in targeted:
                    targeted.add(v)
                    roots.append(v)
            continue
        return good_tree_strategy(tree), len(path.ordering), len(leftover)
    raise last_exc


def _load_structure(path: Path, r_hint: int | None):
    """Sniff a JSON file: structure {"n","r","edges"}, edge sequence
    {"n","order"}, bare path {"ordering"}, or tree {"spine","heavy","light"}."""
    text = path.read_text()
    obj = json.loads(text)
    if isinstance(obj, dict):
        if "edges" in obj:
            if obj.get("r", 2) == 2:
                return Graph.from_json(text)
            return Hypergraph.from_json(text)
        if "order" in obj:
            return EdgeSequence.from_json(text)
        if "ordering" in obj:
            return LoosePath.from_json(text, r_hint or 2)
        if "spine" in obj:
            return GoodTree.from_json(text)
    raise _ConfigError(f"{path}: unrecognized structure layout")


def _path_structure(path: LoosePath) -> Graph | Hypergraph:
    n = max(path.ordering) + 1
    if path.r == 2:
        return Graph(n, path.edges)
    return Hypergraph(n, path.r, path.edges)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_gen(args) -> int:
    ns = _parse_ints(args.n, "--n")
    seeds = _parse_ints(args.seeds, "--seeds")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for n in ns:
        for seed in seeds:
            extra = ""
            if args.model == "gnp":
                obj = gen_gnp(n, _resolve_p(args, n, 2), seed)
            elif args.model == "gnm-process":
                seq = gen_process(n, seed)
                extra = f"  M={connectivity_time(seq)}"
                obj = seq
            else:
                r = args.r or 3
                obj = gen_hrnp(n, r, _resolve_p(args, n, r), seed)
            fp = out / f"{args.model}-n{n}-s{seed}.json"
            fp.write_text(obj.to_json() + "\n")
            print(f"wrote {fp}{extra}")
    return EXIT_OK


def cmd_run(args) -> int:
    loaded = _load_structure(Path(args.structure), args.r)
    k = args.k
    report: dict = {}
    tree = None
    if isinstance(loaded, EdgeSequence):
        m_conn = connectivity_time(loaded)
        structure = snapshot(loaded, m_conn)
        report["M"] = m_conn
    elif isinstance(loaded, GoodTree):
        tree = loaded
        structure = tree.as_graph()
    elif isinstance(loaded, LoosePath):
        structure = _path_structure(loaded)
        report["path_len"] = len(loaded.ordering)
    else:
        structure = loaded

    if args.strategy == "good-tree":
        if structure.r != 2:
            raise _ConfigError("good-tree strategy needs a 2-uniform structure")
        if tree is not None:
            trace = good_tree_strategy(tree)
        else:
            trace, plen, forced = good_tree_pipeline(structure, args.seed)
            report["path_len"] = plen
            report["leftover"] = forced
    elif args.strategy == "loose-path":
        if not isinstance(loaded, LoosePath):
            raise _ConfigError('loose-path strategy needs a path file ({"ordering": ...})')
        trace = loose_path_strategy(loaded, k, seed=args.seed)
    elif args.strategy == "sparse":
        trace = sparse_hypergraph_strategy(structure, k, seed=args.seed)
        report["path_len"] = trace.meta["path_len"]
        report["leftover"] = structure.n - trace.meta["path_len"]
    else:
        if args.omega is None:
            raise _ConfigError("dense strategy needs --omega")
        trace = dense_hypergraph_strategy(
            structure, k, args.omega, cut_constant=args.c_cut, seed=args.seed)
        report["path_len"] = trace.meta["path_len"]
        report["leftover"] = trace.meta["passive"]

    res = run_trace(structure, k, trace.matchings)
    lb = lower_bound(structure.n, len(structure.edges), structure.r, k)
    report.update({
        "rounds": len(trace.matchings),
        "complete": res["completed"],
        "completion_round": res["completion_round"],
        "lower_bound": lb,
        "constants": {"rounds_per_n": round(len(trace.matchings) / structure.n, 3)},
    })
    if args.strategy == "dense":
        report["constants"]["c_cut"] = args.c_cut
    _emit(json.dumps(report, indent=2), args.out)
    if trace.claimed_complete and not res["completed"]:
        print("invariant failure: trace claimed completion, replay disagrees", file=sys.stderr)
        return EXIT_INVARIANT
    if res["completed"] and report["rounds"] < lb:
        print("invariant failure: completed in fewer rounds than the lower bound", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_oracle(args) -> int:
    loaded = _load_structure(Path(args.structure), args.r)
    if isinstance(loaded, EdgeSequence):
        structure = snapshot(loaded, connectivity_time(loaded))
    elif isinstance(loaded, GoodTree):
        structure = loaded.as_graph()
    elif isinstance(loaded, LoosePath):
        structure = _path_structure(loaded)
    else:
        structure = loaded
    try:
        ac = exact_ac(structure, args.k)
    except (SearchBudgetExceeded, InvalidArity) as exc:
        raise _ConfigError(str(exc)) from None
    lb = lower_bound(structure.n, len(structure.edges), structure.r, args.k)
    report = {"n": structure.n, "r": structure.r, "k": args.k,
              "ac": ac, "lower_bound": lb}
    _emit(json.dumps(report, indent=2), args.out)
    if lb > ac:
        print("invariant failure: lower bound exceeds the exact value", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_factorize(args) -> int:
    ns = _parse_ints(args.n, "--n")
    if len(ns) != 1:
        raise _ConfigError("--n must be a single value for factorize")
    fact = baranyai(ns[0], args.k)
    _emit(fact.to_json(), args.out)
    print(f"factors={len(fact.factors)}", file=sys.stderr)
    return EXIT_OK


def _bench_row(model: str, n: int, seed: int, strat: str, args) -> dict:
    row = dict.fromkeys(CSV_COLUMNS, "")
    row.update({"model": model, "n": n, "r": 2, "k": args.k, "seed": seed})
    t0 = time.perf_counter()
    try:
        if model == "gnm-process":
            seq = gen_process(n, seed)
            m_conn = connectivity_time(seq)
            structure = snapshot(seq, m_conn)
            row["M"] = m_conn
            trace, row["path_len"], row["leftover"] = good_tree_pipeline(structure, seed)
        elif model == "gnp":
            p = _resolve_p(args, n, 2)
            row["p_or_omega"] = _param_label(args, p)
            structure = gen_gnp(n, p, seed)
            trace, row["path_len"], row["leftover"] = good_tree_pipeline(structure, seed)
        else:
            r = args.r or 3
            row["r"] = r
            p = _resolve_p(args, n, r)
            row["p_or_omega"] = _param_label(args, p)
            structure = gen_hrnp(n, r, p, seed)
            if strat == "sparse":
                trace = sparse_hypergraph_strategy(structure, args.k, seed=seed)
                row["path_len"] = trace.meta["path_len"]
                row["leftover"] = n - trace.meta["path_len"]
            else:
                trace = dense_hypergraph_strategy(
                    structure, args.k, args.omega, cut_constant=args.c_cut, seed=seed)
                row["path_len"] = trace.meta["path_len"]
                row["leftover"] = trace.meta["passive"]
        res = run_trace(structure, args.k, trace.matchings)
        row["rounds"] = len(trace.matchings)
        row["lower_bound"] = lower_bound(n, len(structure.edges), structure.r, args.k)
        if not res["completed"]:
            row["error"] = "incomplete: replay did not acquaint everyone"
    except AcqLabError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    row["runtime_ms"] = int((time.perf_counter() - t0) * 1000)
    return row


def cmd_bench(args) -> int:
    ns = _parse_ints(args.n, "--n")
    seeds = _parse_ints(args.seeds, "--seeds")
    model = args.model
    strat = args.strategy or {"gnp": "good-tree", "gnm-process": "good-tree",
                              "hrnp": "sparse"}[model]
    if model in ("gnp", "gnm-process"):
        if strat != "good-tree":
            raise _ConfigError(f"model {model} runs the good-tree strategy, not {strat}")
        if args.k != 2:
            raise _ConfigError("2-uniform models need k=2")
    else:
        if strat not in ("sparse", "dense"):
            raise _ConfigError(f"model hrnp runs sparse or dense, not {strat}")
        if strat == "dense" and args.omega is None:
            raise _ConfigError("dense strategy needs --omega")

    jobs = [(n, seed) for n in ns for seed in seeds]
    with ThreadPoolExecutor(max_workers=_workers(len(jobs))) as pool:
        rows = list(pool.map(lambda js: _bench_row(model, js[0], js[1], strat, args), jobs))
    rows.sort(key=lambda row: (row["n"], row["seed"]))

    def write(fh) -> None:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)

    if args.out:
        with open(args.out, "w", newline="") as fh:
            write(fh)
    else:
        write(sys.stdout)

    bad = [row for row in rows
           if not row["error"] and row["rounds"] < row["lower_bound"]]
    if bad:
        print(f"invariant failure: {len(bad)} rows complete below the lower bound",
              file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def _connected(n: int, edges: list[tuple[int, int]]) -> bool:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    queue = deque([0])
    while queue:
        for w in adj[queue.popleft()]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == n


def connected_graphs_upto_iso(max_n: int) -> list[Graph]:
    """One representative per isomorphism class of connected graphs on
    1..max_n vertices, by brute force over edge subsets."""
    out: list[Graph] = []
    for n in range(1, max_n + 1):
        pairs = list(combinations(range(n), 2))
        perms = list(permutations(range(n)))
        seen: set[tuple] = set()
        for mask in range(1 << len(pairs)):
            edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
            if not _connected(n, edges):
                continue
            canon = min(
                tuple(sorted(tuple(sorted((pm[u], pm[v]))) for u, v in edges))
                for pm in perms
            )
            if canon not in seen:
                seen.add(canon)
                out.append(Graph(n, edges))
    return out


def _check_oracle_table() -> str:
    for name, (g, want) in ORACLE_TABLE.items():
        got = exact_ac(g, 2)
        if got != want:
            raise AssertionError(f"{name}: exact value {got}, expected {want}")
    return f"{len(ORACLE_TABLE)} fixtures reproduced"


def _check_oracle_dominance() -> str:
    graphs = connected_graphs_upto_iso(5)
    for g in graphs:
        lb = lower_bound(g.n, len(g.edges), 2, 2)
        ac = exact_ac(g, 2)
        if lb > ac:
            raise AssertionError(f"n={g.n} edges={g.edges}: bound {lb} > exact {ac}")
    return f"bound <= exact on {len(graphs)} connected classes"


def _check_factorizations() -> str:
    for (big_n, s), want in FACTOR_FIXTURES.items():
        fact = baranyai(big_n, s)
        if len(fact.factors) != want:
            raise AssertionError(f"({big_n},{s}): {len(fact.factors)} factors, expected {want}")
        seen: set[tuple] = set()
        for factor in fact.factors:
            flat = [v for part in factor for v in part]
            if sorted(flat) != list(range(big_n)):
                raise AssertionError(f"({big_n},{s}): factor is not a partition of the ground set")
            for part in factor:
                if len(part) != s or part in seen:
                    raise AssertionError(f"({big_n},{s}): block {part} repeated or wrong size")
                seen.add(part)
        if len(seen) != comb(big_n, s):
            raise AssertionError(f"({big_n},{s}): {len(seen)} blocks, expected {comb(big_n, s)}")
    return f"{len(FACTOR_FIXTURES)} parameter sets partition correctly"


def _random_matching(rng: SplitMix64, edges: list[tuple[int, int]]) -> Matching:
    order = list(edges)
    rng.shuffle(order)
    used: set[int] = set()
    picked = []
    for u, v in order:
        if u in used or v in used or rng.randbelow(2):
            continue
        used.add(u)
        used.add(v)
        picked.append((u, v))
    return Matching(picked)


def _check_ledger_fuzz(target: int = 20_000, seed: int = 20260815) -> str:
    rng = SplitMix64(seed)
    applied = 0
    structures = 0
    while applied < target:
        if rng.randbelow(2):
            n = 4 + rng.randbelow(9)
            structure = gen_gnp(n, 0.3 + 0.6 * rng.randbelow(1000) / 1000,
                                rng.randbelow(1 << 30))
        else:
            n = 6 + rng.randbelow(9)
            structure = gen_hrnp(n, 3, 3.0 / comb(n - 1, 2), rng.randbelow(1 << 30))
        under = structure if structure.r == 2 else underlying_graph(structure)
        if not under.edges:
            continue
        structures += 1
        state = init(structure, 2)
        prev = state.ledger_count()
        ident = np.arange(structure.n)
        for _ in range(50):
            if applied >= target:
                break
            apply_matching(state, _random_matching(rng, list(under.edges)))
            applied += 1
            cur = state.ledger_count()
            if cur < prev:
                raise AssertionError("ledger count decreased")
            prev = cur
            if not np.array_equal(np.sort(state.pos), ident):
                raise AssertionError("agent positions are no longer a bijection")
            if not np.array_equal(state.inv[state.pos], ident):
                raise AssertionError("pos and inv disagree")
        es = under.edge_set()
        gap = next(((u, v) for u in range(structure.n)
                    for v in range(u + 1, structure.n) if (u, v) not in es), None)
        if gap is not None:
            try:
                apply_matching(state, Matching([gap]))
            except IllegalSwap:
                pass
            else:
                raise AssertionError(f"non-edge swap {gap} was accepted")
    return f"{applied} matchings over {structures} structures stayed consistent"


def cmd_verify(args) -> int:
    checks = [
        ("oracle-table", _check_oracle_table),
        ("oracle-dominance", _check_oracle_dominance),
        ("factorization", _check_factorizations),
        ("ledger-fuzz", _check_ledger_fuzz),
    ]
    failed = 0
    for name, fn in checks:
        try:
            detail = fn()
        except Exception as exc:
            print(f"FAIL {name}: {exc}")
            failed += 1
            continue
        print(f"  ok {name}: {detail}")
    if failed:
        print(f"{failed} of {len(checks)} checks failed")
        return EXIT_INVARIANT
    print(f"all {len(checks)} checks passed")
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="acq-lab",
        description="Acquaintance-process lab: instances, strategies, oracle, benchmarks.")
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write structure JSON files, one per (n, seed)")
    gen.add_argument("--model", required=True, choices=["gnp", "gnm-process", "hrnp"])
    gen.add_argument("--n", required=True, help="vertex counts: comma list, a..b ranges")
    gen.add_argument("--seeds", required=True, help="seeds: comma list, a..b ranges")
    gen.add_argument("--p", type=float, help="edge probability")
    gen.add_argument("--omega", type=float,
                     help="edge probability as this multiple of the connectivity threshold")
    gen.add_argument("--delta", type=float,
                     help="edge probability from the long-path density constant at this fraction")
    gen.add_argument("--r", type=int, help="edge size for hrnp (default 3)")
    gen.add_argument("--out", default=".", help="output directory")
    gen.set_defaults(func=cmd_gen)

    run = sub.add_parser("run", help="build one strategy trace, replay it, report JSON")
    run.add_argument("structure", help="structure/edge-sequence/path/tree JSON file")
    run.add_argument("--strategy", required=True,
                     choices=["good-tree", "loose-path", "sparse", "dense"])
    run.add_argument("--k", type=int, default=2)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--r", type=int, help="edge size when reading a bare path file")
    run.add_argument("--omega", type=float, help="density multiple (dense strategy)")
    run.add_argument("--c-cut", dest="c_cut", type=float, default=4.0,
                     help="dense cut constant")
    run.add_argument("--out", help="report file (default stdout)")
    run.set_defaults(func=cmd_run)

    orc = sub.add_parser("oracle", help="exact minimal rounds by exhaustive search")
    orc.add_argument("structure")
    orc.add_argument("--k", type=int, default=2)
    orc.add_argument("--r", type=int, help="edge size when reading a bare path file")
    orc.add_argument("--out")
    orc.set_defaults(func=cmd_oracle)

    ben = sub.add_parser("bench", help="ensemble run, CSV per (n, seed)")
    ben.add_argument("--model", required=True, choices=["gnp", "gnm-process", "hrnp"])
    ben.add_argument("--n", required=True)
    ben.add_argument("--seeds", required=True)
    ben.add_argument("--strategy", choices=["good-tree", "sparse", "dense"])
    ben.add_argument("--k", type=int, default=2)
    ben.add_argument("--r", type=int)
    ben.add_argument("--p", type=float)
    ben.add_argument("--omega", type=float)
    ben.add_argument("--delta", type=float)
    ben.add_argument("--c-cut", dest="c_cut", type=float, default=4.0)
    ben.add_argument("--out", help="CSV file (default stdout)")
    ben.set_defaults(func=cmd_bench)

    fac = sub.add_parser("factorize", help="partition all --k subsets of --n points into factors")
    fac.add_argument("--n", required=True)
    fac.add_argument("--k", type=int, required=True, help="block size")
    fac.add_argument("--out")
    fac.set_defaults(func=cmd_factorize)

    ver = sub.add_parser("verify", help="run the invariant suite")
    ver.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except _ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except json.JSONDecodeError as exc:
        print(f"config error: not valid JSON: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvalidProbability, InvalidUniformity, InvalidArity, InvalidDelta) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AcqLabError as exc:
        print(f"failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
