"""Directed Steiner trees: enumeration, min-cost oracles, fractional packing.

A Steiner tree for a message is a minimal edge set containing a directed
path from the message's (unique) generator to every receiver demanding it.
The packing routine is a multiplicative-weights loop: it repeatedly buys an
(approximately) cheapest tree under evolving edge lengths and finally scales
the accumulated integer uses down to exact feasibility, so the reported
value is a rational that provably lower-bounds the packing LP optimum.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .caps import Caps, CapExceededError, load_caps
from .netmodel import Network


class SteinerError(ValueError):
    pass


@dataclass(frozen=True)
class SteinerTree:
    message_id: str
    edges: frozenset

    def sorted_edges(self) -> tuple:
        return tuple(sorted(self.edges))

    def contains(self, edge_id: str) -> bool:
        return edge_id in self.edges


def _single_source(net: Network, message_id: str) -> str:
    msg = net.message_by_id[message_id]
    if len(msg.sources) != 1:
        raise SteinerError(
            f"message {message_id!r} has {len(msg.sources)} generators; "
            "apply the super-source reduction first"
        )
    return msg.sources[0]


def _feasible(net: Network, source: str, receivers, edge_subset) -> bool:
    """True iff edge_subset supports a path from source to every receiver."""
    allowed = edge_subset if isinstance(edge_subset, (set, frozenset)) else set(edge_subset)
    seen = {source}
    stack = [source]
    targets = set(receivers)
    targets.discard(source)
    while stack and targets:
        n = stack.pop()
        for eid in net.out_edges[n]:
            if eid not in allowed:
                continue
            h = net.edge_by_id[eid].head
            if h not in seen:
                seen.add(h)
                targets.discard(h)
                stack.append(h)
    return not targets


def _is_minimal(net: Network, source: str, receivers, edges: frozenset) -> bool:
    return all(not _feasible(net, source, receivers, edges - {e}) for e in edges)


def _prune_to_minimal(net: Network, source: str, receivers, edges: set) -> frozenset:
    """Drop removable edges (highest id first, deterministic) until minimal."""
    current = set(edges)
    for eid in sorted(current, reverse=True):
        if _feasible(net, source, receivers, current - {eid}):
            current.discard(eid)
    return frozenset(current)


def _all_paths(net: Network, source: str, target: str) -> list:
    """All simple directed paths source -> target, as edge-id tuples."""
    paths = []

    def walk(node, used_edges):
        if node == target:
            paths.append(tuple(used_edges))
            return
        for eid in net.out_edges[node]:
            head = net.edge_by_id[eid].head
            walk(head, used_edges + [eid])

    walk(source, [])
    return paths


def enumerate_trees(net: Network, message_id: str, caps: Caps | None = None) -> tuple:
    """All Steiner trees for a message, deduplicated, in lexicographic order.

    Built as minimal members of unions of one source-to-receiver path per
    receiver; in an acyclic graph every Steiner tree arises that way.
    """
    caps = caps or load_caps()
    if len(net.edges) > caps.steiner_edges:
        raise CapExceededError(
            f"{len(net.edges)} edges exceed the Steiner enumeration cap {caps.steiner_edges}"
        )
    source = _single_source(net, message_id)
    receivers = list(net.message_by_id[message_id].receivers)
    path_sets = []
    for r in receivers:
        paths = _all_paths(net, source, r)
        if not paths:
            raise SteinerError(f"receiver {r} unreachable for message {message_id}")
        path_sets.append(paths)
    candidates = set()
    for combo in product(*path_sets):
        union = frozenset(e for path in combo for e in path)
        candidates.add(union)
    trees = {
        t
        for t in candidates
        if _is_minimal(net, source, receivers, t)
    }
    return tuple(
        SteinerTree(message_id, t) for t in sorted(trees, key=lambda s: tuple(sorted(s)))
    )


# -- minimum-cost oracles -----------------------------------------------


@lru_cache(maxsize=256)
def _minimal_subsets_bruteforce(net: Network, message_id: str) -> tuple:
    """Every minimal feasible edge subset, found by scanning all 2^|edges|."""
    source = _single_source(net, message_id)
    receivers = list(net.message_by_id[message_id].receivers)
    edge_ids = [e.id for e in net.edges]
    minimal = []
    for mask in range(1 << len(edge_ids)):
        subset = frozenset(edge_ids[i] for i in range(len(edge_ids)) if mask >> i & 1)
        if any(m <= subset for m in minimal):
            continue
        if _feasible(net, source, receivers, subset):
            if _is_minimal(net, source, receivers, subset):
                minimal.append(subset)
    return tuple(sorted(minimal, key=lambda s: tuple(sorted(s))))


def min_cost_tree_bruteforce(net: Network, message_id: str, lengths: dict, caps: Caps | None = None):
    """Exact oracle (guarantee 1): cheapest feasible subset, as a minimal tree.

    The exhaustive subset scan runs once per (network, message) and is
    memoized; each call then minimizes total length over the minimal subsets,
    breaking ties toward the lexicographically smallest edge-id set.
    """
    caps = caps or load_caps()
    if len(net.edges) > caps.steiner_edges:
        raise CapExceededError(
            f"{len(net.edges)} edges exceed the brute-force cap {caps.steiner_edges}"
        )
    best = None
    best_key = None
    for subset in _minimal_subsets_bruteforce(net, message_id):
        cost = sum(lengths[e] for e in subset)
        key = (cost, tuple(sorted(subset)))
        if best_key is None or key < best_key:
            best_key = key
            best = subset
    if best is None:
        raise SteinerError(f"no Steiner tree exists for message {message_id}")
    return SteinerTree(message_id, best), best_key[0]


def _dijkstra(net: Network, source: str, lengths: dict):
    """Shortest path tree; ties broken by node order for determinism."""
    index = {n: i for i, n in enumerate(net.nodes)}
    dist = {source: 0}
    prev_edge: dict = {}
    heap = [(0, index[source], source)]
    done = set()
    while heap:
        d, _, node = heapq.heappop(heap)
        if node in done:
            continue
        done.add(node)
        for eid in net.out_edges[node]:
            head = net.edge_by_id[eid].head
            nd = d + lengths[eid]
            if head not in dist or nd < dist[head]:
                dist[head] = nd
                prev_edge[head] = eid
                heapq.heappush(heap, (nd, index[head], head))
    return dist, prev_edge


def min_cost_tree_shortestpaths(net: Network, message_id: str, lengths: dict, caps=None):
    """Approximate oracle: union of per-receiver shortest paths, pruned.

    The guarantee is (number of receivers): each path costs at most the
    optimum, so the pruned union costs at most that multiple of it.
    """
    source = _single_source(net, message_id)
    receivers = list(net.message_by_id[message_id].receivers)
    dist, prev_edge = _dijkstra(net, source, lengths)
    union = set()
    for r in receivers:
        if r not in dist:
            raise SteinerError(f"receiver {r} unreachable for message {message_id}")
        node = r
        while node != source:
            eid = prev_edge[node]
            union.add(eid)
            node = net.edge_by_id[eid].tail
    pruned = _prune_to_minimal(net, source, receivers, union)
    cost = sum(lengths[e] for e in pruned)
    return SteinerTree(message_id, pruned), cost


def shortest_paths_guarantee(net: Network, message_id: str) -> int:
    return max(1, len(net.message_by_id[message_id].receivers))


# -- fractional packing --------------------------------------------------


@dataclass(frozen=True)
class PackResult:
    """Outcome of a packing run.

    value is the exact rational primal value: accumulated tree uses from
    completed work, scaled down by the worst capacity violation, hence
    always a feasible packing.  formula_value is the floating multiplicative-
    weights estimate from the final length state, kept for diagnostics.
    """

    value: Fraction
    uses: dict
    formula_value: float
    iterations: int

    def __float__(self) -> float:
        return float(self.value)


def pack_trees(
    net: Network,
    message_id: str,
    omega: float,
    oracle=None,
    guarantee: int = 1,
    caps: Caps | None = None,
) -> PackResult:
    """Pack Steiner trees for one message within edge capacities.

    Multiplicative-weights loop with step parameter eta = 3*omega/16 and
    seed length delta = (1+eta)*((1+eta)*L)^(-1/eta), L being the edge
    count; each round buys the oracle's tree at its bottleneck capacity and
    inflates the lengths of the used edges, stopping once the oracle's tree
    already costs at least the oracle guarantee.  The returned value v
    brackets the packing optimum: v <= OPT <= (1+omega)*guarantee*v.
    """
    if not 0 < omega < 1:
        raise ValueError(f"omega must lie in (0, 1), got {omega}")
    if guarantee < 1:
        raise ValueError("oracle guarantee must be >= 1")
    caps = caps or load_caps()
    oracle = oracle or min_cost_tree_bruteforce
    _single_source(net, message_id)

    edge_ids = [e.id for e in net.edges]
    capacity = {e.id: e.capacity for e in net.edges}
    big_l = max(1, len(edge_ids))
    eta = 3.0 * omega / 16.0
    delta = (1.0 + eta) * ((1.0 + eta) * big_l) ** (-1.0 / eta)
    lengths = {e: delta for e in edge_ids}

    uses: dict = {}
    total = 0
    iterations = 0
    while True:
        tree, cost = oracle(net, message_id, lengths)
        if cost >= guarantee:
            break
        iterations += 1
        d = min(capacity[e] for e in tree.edges)
        uses[tree.edges] = uses.get(tree.edges, 0) + d
        total += d
        for e in tree.edges:
            lengths[e] *= 1.0 + eta * d / capacity[e]
        if iterations > 64 * big_l * (1 + math.log((1.0 + eta) / delta) / math.log(1.0 + eta)):
            raise RuntimeError("packing loop failed to terminate")  # defensive

    scale = math.log((1.0 + eta) / delta) / math.log(1.0 + eta)
    formula_value = total / scale if total else 0.0

    if not uses:
        return PackResult(Fraction(0), {}, 0.0, iterations)
    load = {e: 0 for e in edge_ids}
    for edges, count in uses.items():
        for e in edges:
            load[e] += count
    rho = max(Fraction(load[e], capacity[e]) for e in edge_ids if load[e])
    rho = max(rho, Fraction(1))
    value = Fraction(total) / rho
    scaled_uses = {edges: Fraction(count) / rho for edges, count in uses.items()}
    return PackResult(value, scaled_uses, formula_value, iterations)
