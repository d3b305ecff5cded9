"""Network data model: capacitated directed acyclic multigraphs with messages.

The on-disk format is a single JSON object:

    {
      "nodes": ["n1", "n2", ...],
      "edges": [{"id": "e1", "from": "n1", "to": "n3", "capacity": 1}, ...],
      "messages": [{"id": "a", "sources": ["n1"], "receivers": ["n6"]}, ...],
      "alphabet_size": 2
    }

Capacities are positive integers (floats are rejected), parallel edges are
allowed and always referenced by id, and `alphabet_size` defaults to 2.  The
serializer emits a canonical form: ids sorted with a numeric-aware key, fixed
key order, two-space indent.  parse_network(serialize_network(net)) == net
for every valid network.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import cached_property


class NetworkFormatError(ValueError):
    """Document is structurally malformed (syntax or schema)."""


class NetworkValidationError(ValueError):
    """Document parsed but violates a network invariant."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


@dataclass(frozen=True)
class Violation:
    rule: str
    element: str
    detail: str

    def __str__(self) -> str:
        return f"{self.rule} [{self.element}]: {self.detail}"


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    capacity: int


@dataclass(frozen=True)
class Message:
    id: str
    sources: tuple
    receivers: tuple


_CHUNKS = re.compile(r"(\d+)")


def natural_key(s: str):
    """Sort key that orders embedded integers numerically (n2 < n10)."""
    return tuple(int(part) if part.isdigit() else part for part in _CHUNKS.split(s))


@dataclass(frozen=True)
class Network:
    """Immutable capacitated network; safe for concurrent reads."""

    nodes: tuple
    edges: tuple
    messages: tuple
    alphabet_size: int = 2

    @classmethod
    def build(cls, nodes, edges, messages, alphabet_size=2) -> "Network":
        """Normalize (sort by id) and check structural well-formedness.

        Semantic invariants (acyclicity, capacities, nondegeneracy) are the
        job of validate(); invalid-but-well-formed networks are constructible
        so that validate can describe what is wrong with them.
        """
        nodes = tuple(sorted((str(n) for n in nodes), key=natural_key))
        edges = tuple(sorted(edges, key=lambda e: natural_key(e.id)))
        messages = tuple(
            Message(m.id, tuple(m.sources), tuple(m.receivers))
            for m in sorted(messages, key=lambda m: natural_key(m.id))
        )
        node_set = set(nodes)
        if len(node_set) != len(nodes):
            raise NetworkFormatError("duplicate node id")
        seen = set()
        for e in edges:
            if e.id in seen:
                raise NetworkFormatError(f"duplicate edge id {e.id!r}")
            seen.add(e.id)
            if e.tail not in node_set or e.head not in node_set:
                raise NetworkFormatError(f"edge {e.id!r} references unknown node")
            if isinstance(e.capacity, bool) or not isinstance(e.capacity, int):
                raise NetworkFormatError(f"edge {e.id!r} capacity must be an integer")
        seen = set()
        for m in messages:
            if m.id in seen:
                raise NetworkFormatError(f"duplicate message id {m.id!r}")
            seen.add(m.id)
            for n in list(m.sources) + list(m.receivers):
                if n not in node_set:
                    raise NetworkFormatError(f"message {m.id!r} references unknown node {n!r}")
        if isinstance(alphabet_size, bool) or not isinstance(alphabet_size, int):
            raise NetworkFormatError("alphabet_size must be an integer")
        return cls(nodes, edges, messages, alphabet_size)

    # -- lookups -------------------------------------------------------

    @cached_property
    def edge_by_id(self) -> dict:
        return {e.id: e for e in self.edges}

    @cached_property
    def message_by_id(self) -> dict:
        return {m.id: m for m in self.messages}

    @cached_property
    def message_ids(self) -> tuple:
        return tuple(m.id for m in self.messages)

    @cached_property
    def message_index(self) -> dict:
        """Message id -> coordinate used by rate vectors and coding vectors."""
        return {m.id: i for i, m in enumerate(self.messages)}

    @cached_property
    def in_edges(self) -> dict:
        table = {n: [] for n in self.nodes}
        for e in self.edges:
            table[e.head].append(e.id)
        return {n: tuple(v) for n, v in table.items()}

    @cached_property
    def out_edges(self) -> dict:
        table = {n: [] for n in self.nodes}
        for e in self.edges:
            table[e.tail].append(e.id)
        return {n: tuple(v) for n, v in table.items()}

    @cached_property
    def generated_by(self) -> dict:
        """Node -> message ids generated there, in message order."""
        table = {n: [] for n in self.nodes}
        for m in self.messages:
            for n in m.sources:
                table[n].append(m.id)
        return {n: tuple(v) for n, v in table.items()}

    @cached_property
    def demanded_by(self) -> dict:
        table = {n: [] for n in self.nodes}
        for m in self.messages:
            for n in m.receivers:
                table[n].append(m.id)
        return {n: tuple(v) for n, v in table.items()}

    @cached_property
    def demands(self) -> tuple:
        """All (receiver node, message id) pairs."""
        return tuple((n, m) for m_ in self.messages for n in m_.receivers for m in [m_.id])

    def capacity(self, edge_id: str) -> int:
        return self.edge_by_id[edge_id].capacity

    def total_capacity(self) -> int:
        return sum(e.capacity for e in self.edges)


# -- document I/O ------------------------------------------------------


def _expect(obj, key, kind, locus):
    if key not in obj:
        raise NetworkFormatError(f"{locus}: missing key {key!r}")
    value = obj[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise NetworkFormatError(f"{locus}.{key}: expected {kind.__name__}")
    return value


def parse_network(text: str) -> Network:
    """Parse and validate a network document; raises on any violation."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise NetworkFormatError(
            f"syntax error at line {err.lineno}, column {err.colno}: {err.msg}"
        ) from err
    net = network_from_dict(doc)
    violations = validate(net)
    if violations:
        raise NetworkValidationError(violations)
    return net


def network_from_dict(doc) -> Network:
    if not isinstance(doc, dict):
        raise NetworkFormatError("document: expected one top-level object")
    nodes = _expect(doc, "nodes", list, "document")
    raw_edges = _expect(doc, "edges", list, "document")
    raw_messages = _expect(doc, "messages", list, "document")
    edges = []
    for i, rec in enumerate(raw_edges):
        locus = f"edges[{i}]"
        if not isinstance(rec, dict):
            raise NetworkFormatError(f"{locus}: expected an object")
        edges.append(
            Edge(
                id=_expect(rec, "id", str, locus),
                tail=_expect(rec, "from", str, locus),
                head=_expect(rec, "to", str, locus),
                capacity=_expect(rec, "capacity", int, locus),
            )
        )
    messages = []
    for i, rec in enumerate(raw_messages):
        locus = f"messages[{i}]"
        if not isinstance(rec, dict):
            raise NetworkFormatError(f"{locus}: expected an object")
        messages.append(
            Message(
                id=_expect(rec, "id", str, locus),
                sources=tuple(_expect(rec, "sources", list, locus)),
                receivers=tuple(_expect(rec, "receivers", list, locus)),
            )
        )
    alphabet = doc.get("alphabet_size", 2)
    return Network.build(nodes, edges, messages, alphabet)


def network_to_dict(net: Network) -> dict:
    return {
        "nodes": list(net.nodes),
        "edges": [
            {"id": e.id, "from": e.tail, "to": e.head, "capacity": e.capacity}
            for e in net.edges
        ],
        "messages": [
            {"id": m.id, "sources": list(m.sources), "receivers": list(m.receivers)}
            for m in net.messages
        ],
        "alphabet_size": net.alphabet_size,
    }


def serialize_network(net: Network) -> str:
    return json.dumps(network_to_dict(net), indent=2) + "\n"


# -- validation --------------------------------------------------------


def find_cycle(net: Network):
    """Return node ids of one directed cycle, or None if acyclic."""
    indeg = {n: 0 for n in net.nodes}
    for e in net.edges:
        indeg[e.head] += 1
    ready = [n for n in net.nodes if indeg[n] == 0]
    seen = 0
    while ready:
        n = ready.pop()
        seen += 1
        for eid in net.out_edges[n]:
            h = net.edge_by_id[eid].head
            indeg[h] -= 1
            if indeg[h] == 0:
                ready.append(h)
    if seen == len(net.nodes):
        return None
    return tuple(sorted(n for n in net.nodes if indeg[n] > 0))


def reachable_from(net: Network, starts, allowed_edges=None) -> set:
    allowed = set(allowed_edges) if allowed_edges is not None else None
    seen = set(starts)
    stack = list(starts)
    while stack:
        n = stack.pop()
        for eid in net.out_edges[n]:
            if allowed is not None and eid not in allowed:
                continue
            h = net.edge_by_id[eid].head
            if h not in seen:
                seen.add(h)
                stack.append(h)
    return seen


def validate(net: Network) -> list:
    """All invariant violations; empty iff the network is valid."""
    violations = []
    if net.alphabet_size < 2:
        violations.append(
            Violation("alphabet too small", "alphabet_size", f"{net.alphabet_size} < 2")
        )
    for e in net.edges:
        if e.capacity < 1:
            violations.append(
                Violation("nonpositive capacity", e.id, f"capacity {e.capacity} < 1")
            )
    cycle = find_cycle(net)
    if cycle is not None:
        violations.append(Violation("cycle", ",".join(cycle), "directed cycle through these nodes"))
    for m in net.messages:
        if not m.sources:
            violations.append(Violation("message with no source", m.id, "empty source set"))
        if not m.receivers:
            violations.append(Violation("message with no demand", m.id, "empty receiver set"))
        overlap = set(m.sources) & set(m.receivers)
        for n in sorted(overlap):
            violations.append(
                Violation("degenerate demand", m.id, f"node {n} both generates and demands it")
            )
    if cycle is None:
        for m in net.messages:
            if not m.sources:
                continue
            reach = reachable_from(net, m.sources)
            for r in m.receivers:
                if r in set(m.sources):
                    continue  # already reported as degenerate
                if r not in reach:
                    violations.append(
                        Violation(
                            "unreachable demand",
                            m.id,
                            f"no directed path from any generator to receiver {r}",
                        )
                    )
    return violations


def validation_warnings(net: Network) -> list:
    """Advisory findings that do not invalidate the network (isolated nodes)."""
    warnings = []
    touched = set()
    for e in net.edges:
        touched.add(e.tail)
        touched.add(e.head)
    for m in net.messages:
        touched.update(m.sources)
        touched.update(m.receivers)
    for n in net.nodes:
        if n not in touched:
            warnings.append(Violation("isolated node", n, "no incident edges or messages"))
    return warnings


# -- topological structure --------------------------------------------


@dataclass(frozen=True)
class TopoOrder:
    """Topological node order with the crossing edge set of every prefix.

    prefix_cuts[i] is the set of edge ids with tail among the first i nodes
    and head among the rest; phi is the largest such cut.
    """

    ordering: tuple
    prefix_cuts: tuple
    phi: int


def topo_sort(net: Network) -> TopoOrder:
    index = {n: i for i, n in enumerate(net.nodes)}
    indeg = {n: 0 for n in net.nodes}
    for e in net.edges:
        indeg[e.head] += 1
    import heapq

    ready = [index[n] for n in net.nodes if indeg[n] == 0]
    heapq.heapify(ready)
    ordering = []
    while ready:
        n = net.nodes[heapq.heappop(ready)]
        ordering.append(n)
        for eid in net.out_edges[n]:
            h = net.edge_by_id[eid].head
            indeg[h] -= 1
            if indeg[h] == 0:
                heapq.heappush(ready, index[h])
    if len(ordering) != len(net.nodes):
        raise NetworkValidationError([Violation("cycle", "", "topological sort failed")])
    cuts = [frozenset()]
    crossing = set()
    for n in ordering:
        crossing -= set(net.in_edges[n])
        crossing |= set(net.out_edges[n])
        cuts.append(frozenset(crossing))
    phi = max(len(c) for c in cuts)
    return TopoOrder(tuple(ordering), tuple(cuts), phi)


# -- multiple-multicast reduction --------------------------------------


def _fresh_id(base: str, taken: set) -> str:
    candidate = base
    while candidate in taken:
        candidate += "_"
    taken.add(candidate)
    return candidate


def add_super_sources(net: Network) -> Network:
    """Reduce to a multiple multicast network (one generator per message).

    Each multi-generator message gets a fresh node that generates it, wired
    to every former generator.  The new edges carry capacity
    (total capacity) + 1, which is finite but can never bind in a minimal
    solution, keeping all arithmetic exact.
    """
    if all(len(m.sources) <= 1 for m in net.messages):
        return net
    big = net.total_capacity() + 1
    nodes = list(net.nodes)
    edges = list(net.edges)
    messages = []
    node_ids = set(nodes)
    edge_ids = {e.id for e in edges}
    for m in net.messages:
        if len(m.sources) <= 1:
            messages.append(m)
            continue
        super_node = _fresh_id(f"s_{m.id}", node_ids)
        nodes.append(super_node)
        for gen in m.sources:
            eid = _fresh_id(f"{super_node}__{gen}", edge_ids)
            edges.append(Edge(eid, super_node, gen, big))
        messages.append(Message(m.id, (super_node,), m.receivers))
    return Network.build(nodes, edges, messages, net.alphabet_size)


def restrict_messages(net: Network, keep_ids) -> Network:
    """Same graph, message set restricted to keep_ids."""
    keep = set(keep_ids)
    messages = [m for m in net.messages if m.id in keep]
    return Network.build(net.nodes, net.edges, messages, net.alphabet_size)


def unit_capacities(net: Network) -> Network:
    if all(e.capacity == 1 for e in net.edges):
        return net
    edges = [Edge(e.id, e.tail, e.head, 1) for e in net.edges]
    return Network.build(net.nodes, edges, net.messages, net.alphabet_size)
