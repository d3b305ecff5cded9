"""Capacity regions: ray oracles, the minimum-cost code search, reconstruction.

Routing rays intersect the fractional Steiner-tree packing region; coding
rays intersect the region packed from partial scalar-linear solutions.  Both
come in an exact flavor (rational simplex on the packing program) and an
approximate flavor (multiplicative-weights with a doubling rescale).  Region
descriptions are produced either by enumerating parent-polytope vertices and
mapping them down, or, for two messages, by tracing the boundary with ray
calls until three collinear hits pin every face.

Approximate oracles return the exact rational value of the feasible packing
accumulated over their completed phases (scaled by the worst capacity
violation); the floating multiplicative-weights estimate is retained in the
provenance metadata.  That keeps the bracketing guarantee checkable in exact
arithmetic while the internal lengths stay floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from itertools import combinations, product

from .caps import Caps, CapExceededError, load_caps
from .gf import PrimeField, enumerate_span, span_basis, span_contains, unit_vector
from .lp import (
    Certificate,
    LinearProgram,
    ParentPolytope,
    build_lcode_ray_lp,
    build_route_ray_lp,
    parent_vertices,
    simplex_exact,
    solve_covering,
    solve_with_certificate,
)
from .matroidal import GlobalScalarCode
from .netmodel import (
    Network,
    add_super_sources,
    restrict_messages,
    topo_sort,
    unit_capacities,
)
from .steiner import enumerate_trees, min_cost_tree_bruteforce, pack_trees


class RegionError(ValueError):
    pass


def _check_ray(net: Network, q):
    q = tuple(Fraction(x) for x in q)
    if len(q) != len(net.message_ids):
        raise RegionError(f"ray has {len(q)} coordinates, network has {len(net.message_ids)} messages")
    if any(x < 0 for x in q):
        raise RegionError("ray coordinates must be nonnegative")
    if all(x == 0 for x in q):
        raise RegionError("ray must be nonzero")
    return q


@dataclass(frozen=True)
class RayProvenance:
    method: str                 # "exact" | "approx"
    omega: float | None = None
    guarantee: float | None = None
    formula_value: float | None = None


@dataclass(frozen=True)
class RatePoint:
    """Intersection of the ray x = q*t with the region boundary (or a
    certified inner point for approximate oracles)."""

    coords: tuple
    lam: Fraction
    q: tuple
    provenance: RayProvenance
    certificate: Certificate | None = None


# -- routing: exact ray oracle ------------------------------------------


def routing_parent(net: Network, caps: Caps | None = None) -> ParentPolytope:
    """Steiner-tree packing polytope of the multiple-multicast reduction."""
    caps = caps or load_caps()
    reduced = add_super_sources(net)
    trees = {m: enumerate_trees(reduced, m, caps) for m in reduced.message_ids}
    for m, ts in trees.items():
        if not ts:
            raise RegionError(f"message {m} has no Steiner tree; network is degenerate")
    return ParentPolytope.from_trees(reduced, trees)


def oracle_ray_exact_route(
    net: Network, q, caps: Caps | None = None, certify: bool = False
) -> RatePoint:
    """lambda_max * q on the routing region boundary, by exact simplex."""
    q = _check_ray(net, q)
    parent = routing_parent(net, caps)
    lp = build_route_ray_lp(parent, q)
    if certify:
        cert = solve_with_certificate(lp)
        lam = cert.primal.value
    else:
        cert = None
        sol = simplex_exact(lp)
        if sol.status != "optimal":
            raise RegionError(f"ray program is {sol.status}")
        lam = sol.value
    coords = tuple(lam * x for x in q)
    return RatePoint(coords, lam, q, RayProvenance("exact"), cert)


# -- routing: approximate ray oracle ------------------------------------


def oracle_ray_approx_route(
    net: Network,
    q,
    omega: float,
    oracle=None,
    guarantee: int = 1,
    caps: Caps | None = None,
) -> RatePoint:
    """Concurrent tree packing via multiplicative weights with doubling.

    Per-message packing values seed the demand scaling; each phase routes the
    scaled demand of every message in bottleneck-sized steps under evolving
    lengths, and the demand vector doubles whenever a phase budget elapses.
    Stops once total length-weighted capacity reaches 1.  Returns r with
    lam(r) <= lambda_max <= (1+omega)*guarantee*lam(r).
    """
    if not 0 < omega < 1:
        raise RegionError(f"omega must lie in (0, 1), got {omega}")
    q = _check_ray(net, q)
    caps = caps or load_caps()
    oracle = oracle or min_cost_tree_bruteforce
    reduced = add_super_sources(net)
    msgs = list(reduced.message_ids)
    capacity = {e.id: e.capacity for e in reduced.edges}
    num_edges = len(reduced.edges)

    packs = {m: pack_trees(reduced, m, omega, oracle, guarantee, caps) for m in msgs}
    z = min(packs[m].value / qi for m, qi in zip(msgs, q) if qi > 0)
    if z <= 0:
        raise RegionError("a demanded message admits no packing; network is degenerate")
    scaling = Fraction(len(msgs)) / z
    scaled_q = [scaling * qi for qi in q]

    a = guarantee
    eta = omega / (9.0 * a)
    delta = (num_edges / (1.0 - eta * a)) ** (-1.0 / (eta * a))
    phases_per_round = 2 * math.ceil(
        (1.0 / (eta * a)) * math.log(num_edges / (1.0 - eta * a)) / math.log(1.0 + eta)
    )

    trees_of = {m: {t.edges for t in enumerate_trees(reduced, m, caps)} for m in msgs}

    for _round in range(200):
        lengths = {e.id: delta / e.capacity for e in reduced.edges}
        uses: dict = {}
        completed_uses: dict = {}
        t = 0
        done = False
        for _phase in range(phases_per_round):
            for j, m in enumerate(msgs):
                gamma = scaled_q[j]
                while gamma > 0:
                    tree, _cost = oracle(reduced, m, lengths)
                    d = min(gamma, Fraction(min(capacity[e] for e in tree.edges)))
                    key = (m, tree.edges)
                    uses[key] = uses.get(key, Fraction(0)) + d
                    gamma -= d
                    for e in tree.edges:
                        lengths[e] *= 1.0 + eta * float(d) / capacity[e]
                    if sum(lengths[e.id] * e.capacity for e in reduced.edges) >= 1.0:
                        done = True
                        break
                if done:
                    break
            if done:
                break
            t += 1
            completed_uses = dict(uses)
        if done:
            break
        scaling *= 2
        scaled_q = [2 * x for x in scaled_q]
    else:
        raise RuntimeError("doubling loop failed to terminate")  # defensive

    formula = float(scaling) * t / (math.log(1.0 / delta) / math.log(1.0 + eta))
    lam = _feasible_lambda(reduced, q, completed_uses, trees_of, capacity)
    coords = tuple(lam * x for x in q)
    return RatePoint(
        coords, lam, q, RayProvenance("approx", omega, float(guarantee), formula), None
    )


def _feasible_lambda(net, q, uses, groups_of, capacity) -> Fraction:
    """Exact concurrent value of an accumulated (message, edge-set) usage map."""
    if not uses:
        return Fraction(0)
    load: dict = {}
    routed = {m: Fraction(0) for m in net.message_ids}
    for (m, edges), amount in uses.items():
        routed[m] += amount
        for e in edges:
            load[e] = load.get(e, Fraction(0)) + amount
    rho = max(
        (amount / capacity[e] for e, amount in load.items()),
        default=Fraction(0),
    )
    rho = max(rho, Fraction(1))
    lam = None
    for m, qi in zip(net.message_ids, q):
        if qi > 0:
            value = routed[m] / (rho * qi)
            lam = value if lam is None else min(lam, value)
    return lam if lam is not None else Fraction(0)


# -- scalar-linear solvability: minimum-cost search ----------------------


@dataclass
class _State:
    cost: object
    parent: "_State | None"
    new_edges: tuple  # ((edge_id, vector), ...) fixed absorption order
    _materialized: tuple | None = None

    def assignment(self) -> tuple:
        if self._materialized is None:
            chain = []
            node = self
            while node is not None:
                chain.append(node.new_edges)
                node = node.parent
            flat = []
            for group in reversed(chain):
                flat.extend(group)
            self._materialized = tuple(flat)
        return self._materialized

    def vectors_only(self) -> tuple:
        return tuple(v for _, v in self.assignment())


@dataclass
class SLinearResult:
    code: GlobalScalarCode
    cost: object
    active_edges: frozenset


def _greedy_cut_order(net: Network):
    """A topological order whose prefix cuts stay small.

    Any topological order is valid for the prefix dynamic program; greedily
    absorbing the ready node that minimizes the next crossing set (receivers
    in particular, which only shrink it) keeps the live state set small.
    Ties break on node index, so the order is deterministic.
    """
    index = {n: i for i, n in enumerate(net.nodes)}
    indeg = {n: 0 for n in net.nodes}
    for e in net.edges:
        indeg[e.head] += 1
    ready = {n for n in net.nodes if indeg[n] == 0}
    crossing: set = set()
    ordering = []
    cuts = [frozenset()]
    while ready:
        best = min(
            ready,
            key=lambda n: (
                len(crossing) - len(set(net.in_edges[n])) + len(net.out_edges[n]),
                index[n],
            ),
        )
        ready.discard(best)
        ordering.append(best)
        crossing -= set(net.in_edges[best])
        crossing |= set(net.out_edges[best])
        cuts.append(frozenset(crossing))
        for eid in net.out_edges[best]:
            h = net.edge_by_id[eid].head
            indeg[h] -= 1
            if indeg[h] == 0:
                ready.add(h)
    if len(ordering) != len(net.nodes):
        raise RegionError("network contains a cycle")
    return tuple(ordering), tuple(cuts)


def _normalize_vector(field: PrimeField, v: tuple) -> tuple:
    """Scale v so its first nonzero coordinate is 1 (zero stays zero)."""
    for x in v:
        if x:
            if x == 1:
                return v
            inv = field.inv(x)
            return tuple((inv * y) % field.p for y in v)
    return v


def min_cost_slinear_dp(
    net: Network, field: PrimeField, lengths: dict, caps: Caps | None = None
) -> SLinearResult | None:
    """Exact minimum-cost scalar-linear solution, or None when unsolvable.

    Dynamic program over topological prefixes: a state is the assignment of
    global coding vectors to the edges crossing the current prefix cut, kept
    only when reachable through valid span extensions.  Demands are enforced
    the moment their receiver is absorbed.  Inactive edges carry the zero
    vector and cost nothing.  Only the two active levels are stored; the
    winning assignment is rebuilt from parent links.

    States are quotiented by per-edge scaling: every stored vector is
    normalized to leading coefficient 1.  Spans, demand feasibility, and
    activity costs are invariant under nonzero scaling of individual edge
    vectors, so the quotient preserves the verdict and the minimum cost;
    witnesses come back in the scaled-canonical form.  Ties break toward
    the lexicographically smaller (canonical) assignment.
    """
    caps = caps or load_caps()
    ordering, prefix_cuts = _greedy_cut_order(net)
    msgs = list(net.message_ids)
    k = len(msgs)
    basis_of = {m: unit_vector(k, i) for i, m in enumerate(msgs)}
    zero = tuple(0 for _ in range(k))

    states: dict = {(): _State(Fraction(0), None, ())}
    for i, node in enumerate(ordering):
        cut_prev = sorted(prefix_cuts[i])
        cut_next = sorted(prefix_cuts[i + 1])
        in_ids = sorted(net.in_edges[node])
        out_ids = sorted(net.out_edges[node])
        gen = net.generated_by[node]
        demanded = net.demanded_by[node]
        out_positions = {e: t for t, e in enumerate(out_ids)}
        # per cut_next slot: combo index when the edge is new, else its id
        slot_plan = [
            (True, out_positions[e]) if e in out_positions else (False, e)
            for e in cut_next
        ]
        out_lengths = [lengths[e] for e in out_ids]

        span_cache: dict = {}
        next_states: dict = {}
        for key, state in states.items():
            vec_of = dict(zip(cut_prev, key))
            inputs = tuple(basis_of[m] for m in gen) + tuple(vec_of[e] for e in in_ids)
            combos = span_cache.get(inputs)
            if combos is None:
                bas = span_basis(field, inputs)
                ok = all(span_contains(field, bas, basis_of[m]) for m in demanded)
                if not ok:
                    combos = ()
                elif not out_ids:
                    combos = ((Fraction(0), ()),)
                else:
                    options = sorted(
                        {
                            _normalize_vector(field, v)
                            for v in enumerate_span(field, inputs, k)
                        }
                    )
                    combos = tuple(
                        (
                            sum(l for l, v in zip(out_lengths, combo) if v != zero),
                            combo,
                        )
                        for combo in product(options, repeat=len(out_ids))
                    )
                span_cache[inputs] = combos
            if combos == ():
                continue
            kept_values = [
                None if is_new else vec_of[ref] for is_new, ref in slot_plan
            ]
            base_cost = state.cost
            for delta, combo in combos:
                new_cost = base_cost + delta
                next_key = tuple(
                    combo[ref] if is_new else kept
                    for (is_new, ref), kept in zip(slot_plan, kept_values)
                )
                existing = next_states.get(next_key)
                if existing is not None and existing.cost < new_cost:
                    continue
                candidate = _State(new_cost, state, tuple(zip(out_ids, combo)))
                if existing is None or new_cost < existing.cost or (
                    candidate.vectors_only() < existing.vectors_only()
                ):
                    next_states[next_key] = candidate
        states = next_states
        if not states:
            return None
        if len(states) > caps.dp_states:
            raise CapExceededError(
                f"{len(states)} live states exceed the search cap {caps.dp_states}"
            )

    final = states.get(())
    if final is None:
        return None
    phi_edge = dict(final.assignment())
    phi_msg = dict(basis_of)
    active = frozenset(e for e, v in phi_edge.items() if v != zero)
    code = GlobalScalarCode(field, tuple(msgs), phi_msg, phi_edge)
    return SLinearResult(code, final.cost, active)


# -- weight vectors and partial solutions --------------------------------


@dataclass(frozen=True)
class WeightVector:
    weight: tuple
    witness: GlobalScalarCode
    active_edges: frozenset


@dataclass(frozen=True)
class PartialSolution:
    """A minimal active edge set achieving the demands of one weight vector."""

    weight: tuple
    active_edges: frozenset
    witness: GlobalScalarCode


def _restricted_unit_net(net: Network, weight) -> Network:
    keep = [m for m, w in zip(net.message_ids, weight) if w]
    return unit_capacities(restrict_messages(net, keep))


def weight_vectors(net: Network, field: PrimeField, caps: Caps | None = None) -> tuple:
    """Solvable 0/1 message subsets of the unit-capacity network, with witnesses.

    The all-zero vector is excluded; it admits the empty solution and
    contributes nothing to any packing.
    """
    caps = caps or load_caps()
    k = len(net.message_ids)
    if k > caps.messages:
        raise CapExceededError(f"{k} messages exceed the weight-vector cap {caps.messages}")
    unit_lengths = {e.id: Fraction(1) for e in net.edges}
    out = []
    for bits in product((0, 1), repeat=k):
        if not any(bits):
            continue
        sub = _restricted_unit_net(net, bits)
        result = min_cost_slinear_dp(sub, field, unit_lengths, caps)
        if result is not None:
            out.append(WeightVector(bits, result.code, result.active_edges))
    return tuple(out)


def _solvable_within(net: Network, field: PrimeField, edge_subset, caps: Caps):
    """Minimum-active-set solution using only the given edges, or None."""
    keep = set(edge_subset)
    edges = [e for e in net.edges if e.id in keep]
    sub = Network.build(net.nodes, edges, net.messages, net.alphabet_size)
    lengths = {e.id: Fraction(1) for e in edges}
    return min_cost_slinear_dp(sub, field, lengths, caps)


def enumerate_partial_solutions(
    net: Network, field: PrimeField, caps: Caps | None = None
) -> tuple:
    """All distinct minimal active edge sets per solvable weight vector.

    Codes with the same active set collapse to one packing variable, so sets,
    not codes, are the identity.  A set qualifies when its restriction is
    solvable and no single-edge removal stays solvable; solvability is
    monotone in the edge set, which prunes most of the subset lattice.
    """
    caps = caps or load_caps()
    if len(net.edges) > caps.active_set_edges:
        raise CapExceededError(
            f"{len(net.edges)} edges exceed the active-set enumeration cap"
            f" {caps.active_set_edges}"
        )
    unit = unit_capacities(net)
    solutions = []
    for wv in weight_vectors(net, field, caps):
        sub = _restricted_unit_net(unit, wv.weight)
        edge_ids = sorted(e.id for e in sub.edges)
        solvable: dict = {frozenset(): False}
        minimal_sets = []
        for size in range(1, len(edge_ids) + 1):
            for combo in combinations(edge_ids, size):
                s = frozenset(combo)
                shrunk = [s - {e} for e in sorted(s)]
                if any(solvable.get(t, False) for t in shrunk):
                    solvable[s] = True
                    continue
                result = _solvable_within(sub, field, s, caps)
                solvable[s] = result is not None
                if result is not None and result.active_edges == s:
                    minimal_sets.append((s, result.code))
                elif result is not None:
                    # solvable with a strict subset active: not minimal here
                    solvable[s] = True
        for s, code in sorted(minimal_sets, key=lambda item: tuple(sorted(item[0]))):
            solutions.append(PartialSolution(wv.weight, s, code))
    return tuple(solutions)


# -- linear-coding ray oracles -------------------------------------------


def lcoding_parent(net: Network, field: PrimeField, caps: Caps | None = None) -> ParentPolytope:
    solutions = enumerate_partial_solutions(net, field, caps)
    if not solutions:
        raise RegionError("network admits no partial scalar-linear solution")
    return ParentPolytope.from_partial_solutions(net, solutions)


def oracle_ray_exact_lcode(
    net: Network, field: PrimeField, q, caps: Caps | None = None, certify: bool = False
) -> RatePoint:
    q = _check_ray(net, q)
    parent = lcoding_parent(net, field, caps)
    lp = build_lcode_ray_lp(parent, q)
    if certify:
        cert = solve_with_certificate(lp)
        lam = cert.primal.value
    else:
        cert = None
        sol = simplex_exact(lp)
        if sol.status != "optimal":
            raise RegionError(f"ray program is {sol.status}")
        lam = sol.value
    coords = tuple(lam * x for x in q)
    return RatePoint(coords, lam, q, RayProvenance("exact"), cert)


def oracle_ray_approx_lcode(
    net: Network,
    field: PrimeField,
    q,
    omega: float,
    covering_guarantee: float = 1.0,
    steiner_oracle=None,
    steiner_guarantee: int = 1,
    caps: Caps | None = None,
    max_iterations: int = 200_000,
) -> RatePoint:
    """Approximate coding ray: cover demands, blend, rescale, reweight.

    Each step asks the minimum-cost-solution oracle for the cheapest partial
    solution of every weight vector under the current lengths, covers the
    scaled demand vector fractionally (box bounds recomputed from the current
    scaled demands), rescales the blend inside capacities, and inflates the
    lengths of used edges.  Demands double when a phase budget elapses.  The
    cheapest-solution values are read off the precomputed minimal active
    sets, which is exactly what a per-call search would return.
    """
    if not 0 < omega < 1:
        raise RegionError(f"omega must lie in (0, 1), got {omega}")
    q = _check_ray(net, q)
    caps = caps or load_caps()
    msgs = list(net.message_ids)
    k = len(msgs)

    solutions = enumerate_partial_solutions(net, field, caps)
    groups: dict = {}
    for sol in solutions:
        groups.setdefault(sol.weight, []).append(sol)
    weights = sorted(groups)
    for j, m in enumerate(msgs):
        if q[j] > 0 and not any(w[j] for w in weights):
            raise RegionError(f"no solvable weight vector covers message {m}")

    capacity = {e.id: e.capacity for e in net.edges}
    num_edges = len(net.edges)

    reduced = add_super_sources(net)
    packs = {
        m: pack_trees(reduced, m, omega, steiner_oracle or min_cost_tree_bruteforce,
                      steiner_guarantee, caps)
        for m in msgs
    }
    z = min(packs[m].value / qi for m, qi in zip(msgs, q) if qi > 0)
    if z <= 0:
        raise RegionError("a demanded message admits no packing; network is degenerate")
    scaling = Fraction(k) / z
    scaled_q = [scaling * qi for qi in q]

    b = covering_guarantee
    eta = omega / (9.0 * b)
    delta = (num_edges / (1.0 - eta * b)) ** (-1.0 / (eta * b))
    phases_per_round = 2 * math.ceil(
        (1.0 / (eta * b)) * math.log(num_edges / (1.0 - eta * b)) / math.log(1.0 + eta)
    )

    iterations = 0
    complete = True
    for _round in range(200):
        lengths = {e.id: delta / e.capacity for e in net.edges}
        uses: dict = {}
        completed_uses: dict = {}
        t = 0
        done = False
        for _phase in range(phases_per_round):
            # deliver one full scaled demand cover per phase, in chunks of
            # 1/s where s is the worst capacity violation of the blend
            gamma = Fraction(1)
            while gamma > 0:
                iterations += 1
                if iterations > max_iterations:
                    complete = False
                    done = True
                    break
                best = []
                for w in weights:
                    cheapest = min(
                        groups[w],
                        key=lambda s: (sum(lengths[e] for e in s.active_edges),
                                       tuple(sorted(s.active_edges))),
                    )
                    best.append((w, cheapest, sum(lengths[e] for e in cheapest.active_edges)))
                costs = [Fraction(c) for _, _, c in best]
                bounds = [
                    max(
                        (Fraction(math.ceil(scaled_q[j])) for j in range(k) if w[j]),
                        default=Fraction(0),
                    )
                    for w, _, _ in best
                ]
                _value, y = solve_covering(
                    [w for w, _, _ in best], costs, scaled_q, bounds
                )
                blend: dict = {}
                for (w, sol, _c), yi in zip(best, y):
                    if yi:
                        for e in sol.active_edges:
                            blend[e] = blend.get(e, Fraction(0)) + yi
                violations = [
                    blend[e] / capacity[e] for e in blend if blend[e] > capacity[e]
                ]
                s = max(violations) if violations else Fraction(1)
                step = min(gamma, 1 / s)
                for (w, sol, _c), yi in zip(best, y):
                    if yi:
                        uses[(w, sol.active_edges)] = (
                            uses.get((w, sol.active_edges), Fraction(0)) + yi * step
                        )
                gamma -= step
                for e, amount in blend.items():
                    lengths[e] *= 1.0 + eta * float(amount * step) / capacity[e]
                if sum(lengths[e.id] * e.capacity for e in net.edges) > 1.0:
                    done = True
                    break
            if done:
                break
            t += 1
            completed_uses = dict(uses)
        if done:
            break
        scaling *= 2
        scaled_q = [2 * x for x in scaled_q]
    else:
        raise RuntimeError("doubling loop failed to terminate")  # defensive

    formula = float(scaling) * t / (math.log(1.0 / delta) / math.log(1.0 + eta))
    lam = _feasible_lambda_weighted(net, q, completed_uses, capacity)
    coords = tuple(lam * x for x in q)
    return RatePoint(
        coords,
        lam,
        q,
        RayProvenance("approx", omega, float(covering_guarantee), formula),
        None,
    )


def _feasible_lambda_weighted(net, q, uses, capacity) -> Fraction:
    if not uses:
        return Fraction(0)
    load: dict = {}
    delivered = [Fraction(0)] * len(net.message_ids)
    for (w, edges), amount in uses.items():
        for j, wj in enumerate(w):
            if wj:
                delivered[j] += amount
        for e in edges:
            load[e] = load.get(e, Fraction(0)) + amount
    rho = max((amount / capacity[e] for e, amount in load.items()), default=Fraction(0))
    rho = max(rho, Fraction(1))
    lam = None
    for j, qj in enumerate(q):
        if qj > 0:
            value = delivered[j] / (rho * qj)
            lam = value if lam is None else min(lam, value)
    return lam if lam is not None else Fraction(0)


# -- region reconstruction -----------------------------------------------


@dataclass(frozen=True)
class RegionDescription:
    """Vertex description of a capacity region, canonically ordered.

    For two messages the order is: origin first, then boundary vertices from
    the first axis around to the second.  halfplanes, when present, lists
    (a, b) pairs meaning a.x <= b.  complete is False only when an
    approximate trace hit its call guard before closing the polygon.
    """

    kind: str                   # "routing" | "lcoding"
    message_ids: tuple
    vertices: tuple
    halfplanes: tuple | None
    method: str                 # "exact" | "approx"
    algorithm: str              # "vertex-enum" | "boundary-trace"
    field_p: int | None = None
    omega: float | None = None
    guarantee: float | None = None
    complete: bool = True
    oracle_calls: int = 0


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d(points) -> list:
    """Monotone chain over exact rationals; returns CCW hull without repeats."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower = []
    for p in pts:
        while len(lower) > 1 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) > 1 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _canonical_2d(points) -> tuple:
    """Origin first, then hull vertices by increasing angle off the x-axis.

    The angular sort is exact: p precedes r iff cross(p, r) > 0, which is
    total on distinct extreme points in the closed first quadrant.
    """
    import functools

    hull = convex_hull_2d(points)
    origin = (Fraction(0), Fraction(0))
    rest = [p for p in hull if p != origin]

    def cmp(pa, pb):
        c = pa[0] * pb[1] - pa[1] * pb[0]
        if c > 0:
            return -1
        if c < 0:
            return 1
        return 0

    rest.sort(key=functools.cmp_to_key(cmp))
    return tuple([origin] + rest)


def _halfplanes_2d(vertices) -> tuple:
    """Outer inequalities a.x <= b for consecutive vertex pairs (2D only)."""
    if len(vertices) < 2:
        return tuple()
    planes = []
    cycle = list(vertices) + [vertices[0]]
    for p, r in zip(cycle[:-1], cycle[1:]):
        normal = (r[1] - p[1], -(r[0] - p[0]))  # outward for CCW order
        offset = normal[0] * p[0] + normal[1] * p[1]
        # normalize the sign so the origin satisfies the inequality
        if normal[0] * 0 + normal[1] * 0 > offset:
            normal = (-normal[0], -normal[1])
            offset = -offset
        if normal == (Fraction(0), Fraction(0)):
            continue
        planes.append((normal, offset))
    return tuple(planes)


def _extreme_filter(points) -> list:
    """Drop points that are convex combinations of the others (any dimension)."""
    pts = sorted(set(points))
    extreme = []
    for idx, p in enumerate(pts):
        others = [r for j, r in enumerate(pts) if j != idx]
        if not others:
            extreme.append(p)
            continue
        rows = []
        dim = len(p)
        for d in range(dim):
            rows.append((tuple(r[d] for r in others), "==", p[d]))
        rows.append((tuple(Fraction(1) for _ in others), "==", Fraction(1)))
        lp = LinearProgram.build(True, [Fraction(0)] * len(others), rows)
        sol = simplex_exact(lp)
        if sol.status != "optimal":
            extreme.append(p)
    return extreme


def vertex_enum_region(
    parent: ParentPolytope,
    kind: str,
    field_p: int | None = None,
    caps: Caps | None = None,
) -> RegionDescription:
    """Exact region by vertex enumeration of the parent and affine projection.

    Vertices of the packing polytope map down through the per-message group
    sums; the convex hull of the images is the region.  For two messages the
    hull and its half-planes are exact; in higher dimension the deduplicated
    image set is filtered to extreme points and returned without facets.
    """
    verts = parent_vertices(parent, caps)
    k = len(parent.message_ids)
    images = set()
    for v in verts:
        image = tuple(
            sum(var.rate[j] * x for var, x in zip(parent.variables, v))
            for j in range(k)
        )
        images.add(image)
    if k == 2:
        ordered = _canonical_2d(images)
        planes = _halfplanes_2d(convex_hull_2d(images))
        return RegionDescription(
            kind, parent.message_ids, ordered, planes, "exact", "vertex-enum", field_p
        )
    if k == 1:
        top = max(x[0] for x in images)
        pts = ((Fraction(0),), (top,)) if top > 0 else ((Fraction(0),),)
        return RegionDescription(
            kind, parent.message_ids, pts, None, "exact", "vertex-enum", field_p
        )
    extreme = tuple(sorted(_extreme_filter(images)))
    return RegionDescription(
        kind, parent.message_ids, extreme, None, "exact", "vertex-enum", field_p
    )


def boundary_trace_2d(
    ray_oracle,
    message_ids,
    kind: str,
    exact: bool = True,
    snap_tolerance: float = 0.05,
    field_p: int | None = None,
    omega: float | None = None,
    guarantee: float | None = None,
    max_calls: int | None = None,
) -> RegionDescription:
    """Reconstruct a 2D region from ray queries alone.

    Axis rays seed a clockwise list of boundary points framed by two
    sentinels; whenever the lines through two adjacent point pairs cross, the
    ray through the crossing either discovers a new boundary point between
    them (insert and retry) or confirms the face (advance).  Three collinear
    hits per face bound the number of calls linearly in the polygon size.

    With an approximate oracle, points within snap_tolerance are considered
    equal and a call guard (10x the linear bound, re-evaluated as the list
    grows) returns a partial, flagged trace instead of looping.
    """
    if len(message_ids) != 2:
        raise RegionError("boundary trace requires exactly two messages")
    calls = 0

    def ask(direction):
        nonlocal calls
        calls += 1
        point = ray_oracle(direction)
        return (Fraction(point[0]), Fraction(point[1]))

    def same(p, r):
        if exact:
            return p == r
        return (
            abs(float(p[0]) - float(r[0])) <= snap_tolerance
            and abs(float(p[1]) - float(r[1])) <= snap_tolerance
        )

    def guard() -> int:
        if max_calls is not None:
            return max_calls
        # 10x the proven linear bound for the polygon seen so far
        n = max(len(points) + 1, 4)
        return 10 * (3 * (n + n) + 4)

    x_hit = ask((Fraction(1), Fraction(0)))
    y_hit = ask((Fraction(0), Fraction(1)))
    if x_hit == (0, 0) and y_hit == (0, 0):
        origin = (Fraction(0), Fraction(0))
        return RegionDescription(
            kind, tuple(message_ids), (origin,), None,
            "exact" if exact else "approx", "boundary-trace",
            field_p, omega, guarantee, True, calls,
        )
    sentinel_start = (x_hit[0], Fraction(-1))
    sentinel_end = (Fraction(-1), y_hit[1])
    points = [sentinel_start, x_hit, y_hit, sentinel_end]

    complete = True
    cur = 0
    while len(points) - (cur + 1) >= 3:
        pt1, pt2, pt3, pt4 = points[cur : cur + 4]
        p = _line_intersection(pt1, pt2, pt3, pt4)
        if p is None or p[0] < 0 or p[1] < 0 or (p[0] == 0 and p[1] == 0):
            cur += 1
            continue
        if calls >= guard():
            complete = False
            break
        r = ask(p)
        if not same(r, pt2) and not same(r, pt3):
            points.insert(cur + 2, r)
        else:
            cur += 1

    origin = (Fraction(0), Fraction(0))
    body = [p for p in points[1:-1] if p != origin]
    body = _drop_collinear(body, exact, snap_tolerance)
    vertices = tuple([origin] + body)
    planes = _halfplanes_2d(convex_hull_2d(set(vertices))) if exact and complete else None
    return RegionDescription(
        kind,
        tuple(message_ids),
        vertices,
        planes,
        "exact" if exact else "approx",
        "boundary-trace",
        field_p,
        omega,
        guarantee,
        complete,
        calls,
    )


def _drop_collinear(body: list, exact: bool, tol: float) -> list:
    """Remove boundary points lying on the face between their neighbors.

    Confirmed faces leave up to three collinear hits in the trace list; only
    the endpoints are polygon vertices.  Exact mode tests the cross product
    exactly; approximate mode drops points within tol of the chord.
    """
    points = list(body)
    changed = True
    while changed and len(points) > 2:
        changed = False
        for i in range(1, len(points) - 1):
            a, p, b = points[i - 1], points[i], points[i + 1]
            cross = _cross(a, p, b)
            if exact:
                drop = cross == 0
            else:
                chord = math.hypot(float(b[0] - a[0]), float(b[1] - a[1]))
                drop = chord > 0 and abs(float(cross)) / chord <= tol
            if drop:
                del points[i]
                changed = True
                break
    return points


def _line_intersection(a1, a2, b1, b2):
    """Unique intersection point of lines (a1,a2) and (b1,b2), or None."""
    d1 = (a2[0] - a1[0], a2[1] - a1[1])
    d2 = (b2[0] - b1[0], b2[1] - b1[1])
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    if denom == 0:
        return None
    t = ((b1[0] - a1[0]) * d2[1] - (b1[1] - a1[1]) * d2[0]) / denom
    return (a1[0] + t * d1[0], a1[1] + t * d1[1])


# -- top-level drivers ----------------------------------------------------


def compute_region(
    net: Network,
    kind: str,
    field: PrimeField | None = None,
    method: str = "exact",
    omega: float = 0.5,
    algorithm: str | None = None,
    oracle=None,
    guarantee: int = 1,
    caps: Caps | None = None,
) -> RegionDescription:
    """Compute a region description; the CLI's single entry point.

    kind is "routing" or "lcoding" (the latter needs a field).  The default
    algorithm is the 2D boundary trace when there are two messages and
    vertex enumeration otherwise; approximate regions exist only as traces.
    """
    caps = caps or load_caps()
    k = len(net.message_ids)
    if kind == "lcoding" and field is None:
        raise RegionError("linear-coding regions need a field")
    if algorithm is None:
        algorithm = "boundary-trace" if (k == 2) else "vertex-enum"
    if method == "approx" and algorithm != "boundary-trace":
        raise RegionError("approximate regions are only available via the 2D trace")

    if algorithm == "vertex-enum":
        parent = (
            routing_parent(net, caps)
            if kind == "routing"
            else lcoding_parent(net, field, caps)
        )
        return vertex_enum_region(parent, kind, field.p if field else None, caps)

    if k != 2:
        raise RegionError("boundary trace requires exactly two messages")
    if method == "exact":
        if kind == "routing":
            oracle_fn = lambda q: oracle_ray_exact_route(net, q, caps).coords
        else:
            oracle_fn = lambda q: oracle_ray_exact_lcode(net, field, q, caps).coords
        return boundary_trace_2d(
            oracle_fn, net.message_ids, kind, True, field_p=field.p if field else None
        )
    if kind == "routing":
        oracle_fn = lambda q: oracle_ray_approx_route(
            net, q, omega, oracle, guarantee, caps
        ).coords
        g = float(guarantee)
    else:
        oracle_fn = lambda q: oracle_ray_approx_lcode(net, field, q, omega, caps=caps).coords
        g = 1.0
    return boundary_trace_2d(
        oracle_fn,
        net.message_ids,
        kind,
        False,
        field_p=field.p if field else None,
        omega=omega,
        guarantee=g,
    )
