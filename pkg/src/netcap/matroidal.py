"""Matroidal networks: scripted construction, mapping checks, scalar codes.

A construction script drives the four-step build of a network from a matroid
(source nodes from a base, relay gadgets from circuits, single-message and
all-message receivers).  From a valid network-matroid mapping a scalar-linear
code is derived by a change of basis on the representation matrix, and codes
are checked both algebraically (span conditions) and by exhaustive symbol
simulation.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .gf import (
    FieldMatrix,
    PrimeField,
    solve_combination,
    span_basis,
    span_contains,
    unit_vector,
    vec_add,
    vec_scale,
)
from .matroid import RepresentableMatroid
from .netmodel import Edge, Message, Network, topo_sort, validate


class ScriptError(ValueError):
    """Construction script is malformed or inconsistent with the matroid."""


class MappingError(ValueError):
    """Network-matroid mapping is missing entries or invalid."""


class CodeError(ValueError):
    """Code derivation or simulation cannot proceed."""


@dataclass(frozen=True)
class ConstructionStep:
    kind: str          # "circuit" | "receiver" | "full_receiver"
    elements: tuple    # circuit/receiver: designated element first

    def __post_init__(self):
        if self.kind not in ("circuit", "receiver", "full_receiver"):
            raise ScriptError(f"unknown step kind {self.kind!r}")


@dataclass(frozen=True)
class ConstructionScript:
    """Explicit user choices for the four construction steps.

    base: the Step 1 base; steps: ordered circuit placements (Step 2, new
    element first), single-message receivers (Step 3, demanded element
    first) and all-message receivers (Step 4).  Elements are ground indices;
    labels, when given, name elements 0..d-1 for scripts and message ids.
    """

    base: tuple
    steps: tuple
    labels: tuple | None = None


def parse_script(text: str, ground_size: int) -> ConstructionScript:
    """Parse the script file format.

    Lines: optional `elements <label>...` naming ground elements in column
    order, one `base <el>...`, then any number of `circuit <new> <placed>...`,
    `receiver <demanded> <in>...` and `full-receiver <el>...`.  `#` starts a
    comment.  Elements are referenced by label or by integer index.
    """
    labels = None
    label_index = {}
    base = None
    steps = []

    def resolve(token: str, line_no: int) -> int:
        if token in label_index:
            return label_index[token]
        try:
            idx = int(token)
        except ValueError:
            raise ScriptError(f"line {line_no}: unknown element {token!r}") from None
        if not 0 <= idx < ground_size:
            raise ScriptError(f"line {line_no}: element index {idx} out of range")
        return idx

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        keyword, args = parts[0].lower(), parts[1:]
        if keyword == "elements":
            if labels is not None:
                raise ScriptError(f"line {line_no}: duplicate elements line")
            if len(args) != ground_size:
                raise ScriptError(
                    f"line {line_no}: expected {ground_size} labels, got {len(args)}"
                )
            if len(set(args)) != len(args):
                raise ScriptError(f"line {line_no}: duplicate element label")
            labels = tuple(args)
            label_index = {lab: i for i, lab in enumerate(labels)}
        elif keyword == "base":
            if base is not None:
                raise ScriptError(f"line {line_no}: duplicate base line")
            base = tuple(resolve(t, line_no) for t in args)
        elif keyword == "circuit":
            steps.append(ConstructionStep("circuit", tuple(resolve(t, line_no) for t in args)))
        elif keyword == "receiver":
            steps.append(ConstructionStep("receiver", tuple(resolve(t, line_no) for t in args)))
        elif keyword == "full-receiver":
            steps.append(
                ConstructionStep("full_receiver", tuple(resolve(t, line_no) for t in args))
            )
        else:
            raise ScriptError(f"line {line_no}: unknown directive {keyword!r}")
    if base is None:
        raise ScriptError("script has no base line")
    return ConstructionScript(base, tuple(steps), labels)


@dataclass
class NetworkMatroidMapping:
    """f maps messages and edges to ground elements; g places elements on nodes."""

    msg_to_elem: dict
    edge_to_elem: dict
    g: dict

    def element_of(self, item: str):
        if item in self.msg_to_elem:
            return self.msg_to_elem[item]
        return self.edge_to_elem[item]


def construct(
    matroid: RepresentableMatroid,
    script: ConstructionScript,
    alphabet_size: int = 2,
):
    """Build a matroidal network per the script; returns (network, mapping).

    Node ids n1, n2, ... follow creation order (sources first, then per
    circuit the join node and the new-element node, then receivers); edge
    ids e1, e2, ... follow creation order.  Message ids reuse the script's
    element labels when present.
    """
    labels = script.labels or tuple(str(i) for i in range(matroid.ground_size))

    if not matroid.is_base(script.base):
        raise ScriptError(f"step 1 set {sorted(script.base)} is not a base")

    nodes: list = []
    edges: list = []
    g: dict = {}
    msg_to_elem: dict = {}
    edge_to_elem: dict = {}
    message_of_elem: dict = {}
    sources: dict = {}
    receivers: dict = {}

    def new_node() -> str:
        nid = f"n{len(nodes) + 1}"
        nodes.append(nid)
        return nid

    def new_edge(tail: str, head: str, elem: int) -> str:
        eid = f"e{len(edges) + 1}"
        edges.append(Edge(eid, tail, head, 1))
        edge_to_elem[eid] = elem
        return eid

    for elem in script.base:
        node = new_node()
        mid = labels[elem]
        g[elem] = node
        msg_to_elem[mid] = elem
        message_of_elem[elem] = mid
        sources.setdefault(mid, []).append(node)
        receivers.setdefault(mid, [])

    message_ids = [labels[e] for e in script.base]

    for step_no, step in enumerate(script.steps, start=1):
        elems = step.elements
        if step.kind == "circuit":
            if not matroid.is_circuit(elems):
                raise ScriptError(f"step {step_no}: {sorted(elems)} is not a circuit")
            x0, rest = elems[0], elems[1:]
            if x0 in g:
                raise ScriptError(f"step {step_no}: element {labels[x0]} already placed")
            missing = [x for x in rest if x not in g]
            if missing:
                raise ScriptError(
                    f"step {step_no}: elements {[labels[x] for x in missing]} not yet placed"
                )
            join = new_node()
            for x in rest:
                new_edge(g[x], join, x)
            carrier = new_node()
            new_edge(join, carrier, x0)
            g[x0] = carrier
        elif step.kind == "receiver":
            if not matroid.is_circuit(elems):
                raise ScriptError(f"step {step_no}: {sorted(elems)} is not a circuit")
            x0, rest = elems[0], elems[1:]
            if x0 not in message_of_elem:
                raise ScriptError(
                    f"step {step_no}: designated element {labels[x0]} carries no message"
                )
            missing = [x for x in rest if x not in g]
            if missing:
                raise ScriptError(
                    f"step {step_no}: elements {[labels[x] for x in missing]} not yet placed"
                )
            node = new_node()
            for x in rest:
                new_edge(g[x], node, x)
            receivers[message_of_elem[x0]].append(node)
        else:  # full_receiver
            if not matroid.is_base(elems):
                raise ScriptError(f"step {step_no}: {sorted(elems)} is not a base")
            missing = [x for x in elems if x not in g]
            if missing:
                raise ScriptError(
                    f"step {step_no}: elements {[labels[x] for x in missing]} not yet placed"
                )
            node = new_node()
            for x in elems:
                new_edge(g[x], node, x)
            for mid in message_ids:
                receivers[mid].append(node)

    messages = [
        Message(mid, tuple(sources[mid]), tuple(receivers[mid])) for mid in message_ids
    ]
    net = Network.build(nodes, edges, messages, alphabet_size)
    problems = validate(net)
    if problems:
        raise ScriptError(
            "constructed network is degenerate (does every message reach a receiver?): "
            + "; ".join(str(p) for p in problems)
        )
    mapping = NetworkMatroidMapping(msg_to_elem, edge_to_elem, dict(g))
    report = verify_mapping(net, matroid, mapping)
    if not report:
        raise ScriptError(f"construction produced an invalid mapping: {report.detail}")
    return net, mapping


# -- mapping verification ----------------------------------------------


@dataclass
class MappingReport:
    ok: bool
    condition: int | None = None
    node: str | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _in_elements(net: Network, mapping: NetworkMatroidMapping, node: str) -> list:
    elems = [mapping.msg_to_elem[m] for m in net.generated_by[node]]
    elems += [mapping.edge_to_elem[e] for e in net.in_edges[node]]
    return elems


def _out_elements(net: Network, mapping: NetworkMatroidMapping, node: str) -> list:
    elems = [mapping.msg_to_elem[m] for m in net.demanded_by[node]]
    elems += [mapping.edge_to_elem[e] for e in net.out_edges[node]]
    return elems


def verify_mapping(
    net: Network, matroid: RepresentableMatroid, mapping: NetworkMatroidMapping
) -> MappingReport:
    """Check the three matroidal-network conditions; reports the first failure."""
    for m in net.message_ids:
        if m not in mapping.msg_to_elem:
            raise MappingError(f"mapping undefined on message {m!r}")
    for e in net.edges:
        if e.id not in mapping.edge_to_elem:
            raise MappingError(f"mapping undefined on edge {e.id!r}")
    images = [mapping.msg_to_elem[m] for m in net.message_ids]
    if len(set(images)) != len(images):
        return MappingReport(False, 1, None, "mapping is not one-to-one on messages")
    if not matroid.is_independent(images):
        return MappingReport(False, 2, None, "message image set is dependent")
    for node in net.nodes:
        in_elems = _in_elements(net, mapping, node)
        out_elems = _out_elements(net, mapping, node)
        r_in = matroid.rank(in_elems)
        r_all = matroid.rank(in_elems + out_elems)
        if r_in != r_all:
            return MappingReport(
                False,
                3,
                node,
                f"rank of in-set {r_in} < rank with out-set {r_all} at node {node}",
            )
    return MappingReport(True)


# -- global scalar codes ------------------------------------------------


@dataclass(frozen=True)
class GlobalScalarCode:
    """Global coding vectors in F^(number of messages), one per message/edge.

    edge_coeffs[e] lists, per the fixed input order of e's tail (generated
    messages before in-edges), the local scalars combining the inputs into
    s(e); decode_coeffs[(node, message)] plays the same role for demands.
    Both are filled by derive_code and recomputed on demand elsewhere.
    """

    field: PrimeField
    message_ids: tuple
    phi_msg: dict
    phi_edge: dict
    edge_coeffs: dict | None = None
    decode_coeffs: dict | None = None


def node_inputs(net: Network, node: str) -> list:
    """Input labels at a node: generated messages first, then in-edges."""
    return list(net.generated_by[node]) + list(net.in_edges[node])


def _input_vectors(net: Network, code: GlobalScalarCode, node: str) -> list:
    vecs = []
    for m in net.generated_by[node]:
        vecs.append(code.phi_msg[m])
    for e in net.in_edges[node]:
        vecs.append(code.phi_edge[e])
    return vecs


def derive_code(
    net: Network, matroid: RepresentableMatroid, mapping: NetworkMatroidMapping
) -> GlobalScalarCode:
    """Scalar-linear code from a valid mapping, by change of basis.

    The message image columns are extended to a column basis (lowest index
    first, deterministic), the representation is rewritten in that basis, and
    every edge receives the rewritten column of its image element.  Basis
    coordinates beyond the real messages act as internal bookkeeping only;
    they are provably zero on every edge vector and are stripped from the
    returned code.
    """
    report = verify_mapping(net, matroid, mapping)
    if not report:
        raise MappingError(f"invalid mapping (condition {report.condition}): {report.detail}")
    field = matroid.field
    if field.p < net.alphabet_size:
        raise CodeError(
            f"field GF({field.p}) is smaller than the alphabet ({net.alphabet_size})"
        )

    matrix = matroid.matrix
    reduced, rank, _ = matrix.rref()
    trimmed = FieldMatrix(field, reduced.rows[:rank])  # drop redundant rows

    msg_cols = [mapping.msg_to_elem[m] for m in net.message_ids]
    basis_cols = list(msg_cols)
    for j in range(trimmed.ncols):
        if len(basis_cols) == rank:
            break
        if j in basis_cols:
            continue
        if trimmed.rank_of_columns(basis_cols + [j]) > len(basis_cols):
            basis_cols.append(j)
    if len(basis_cols) != rank:
        raise CodeError("could not extend message columns to a basis")

    # rref of [B | A] yields [I | B^-1 A]: columns in the new basis.
    basis_rows = [
        tuple(trimmed.rows[i][j] for j in basis_cols) + trimmed.rows[i]
        for i in range(rank)
    ]
    solved, solved_rank, _ = FieldMatrix.from_rows(field, basis_rows).rref()
    if solved_rank != rank:
        raise CodeError("basis columns unexpectedly dependent")
    transformed = [
        tuple(solved.rows[i][rank + j] for i in range(rank))
        for j in range(trimmed.ncols)
    ]

    k = len(net.message_ids)
    phi_msg = {m: unit_vector(k, i) for i, m in enumerate(net.message_ids)}
    phi_edge = {}
    for e in net.edges:
        full = transformed[mapping.edge_to_elem[e.id]]
        if any(full[k:]):
            raise CodeError(
                f"edge {e.id} would carry an auxiliary basis coordinate; mapping is inconsistent"
            )
        phi_edge[e.id] = full[:k]

    code = GlobalScalarCode(field, net.message_ids, phi_msg, phi_edge)
    edge_coeffs, decode_coeffs = compute_coefficients(net, code)
    code = GlobalScalarCode(
        field, net.message_ids, phi_msg, phi_edge, edge_coeffs, decode_coeffs
    )
    check = check_code(net, code)
    if not check:
        raise CodeError(f"derived code failed validation: {check.failures}")
    return code


def compute_coefficients(net: Network, code: GlobalScalarCode):
    """Solve the per-node span systems once; raises CodeError if unsolvable."""
    field = code.field
    edge_coeffs = {}
    decode_coeffs = {}
    for node in net.nodes:
        vecs = _input_vectors(net, code, node)
        for e in net.out_edges[node]:
            coeffs = solve_combination(field, vecs, code.phi_edge[e])
            if coeffs is None:
                raise CodeError(f"edge {e} vector is outside the span at node {node}")
            edge_coeffs[e] = coeffs
        for m in net.demanded_by[node]:
            coeffs = solve_combination(field, vecs, code.phi_msg[m])
            if coeffs is None:
                raise CodeError(f"demand {m} at node {node} is not decodable")
            decode_coeffs[(node, m)] = coeffs
    return edge_coeffs, decode_coeffs


@dataclass
class CodeCheck:
    ok: bool
    failures: list

    def __bool__(self) -> bool:
        return self.ok


def check_code(net: Network, code: GlobalScalarCode, simulate_limit: int = 4096) -> CodeCheck:
    """Validate a scalar code: basis vectors, span conditions, decodability.

    When |F|^(number of messages) is within simulate_limit the verdict is
    cross-validated by simulating every message assignment.
    """
    failures = []
    k = len(net.message_ids)
    if tuple(code.message_ids) != net.message_ids:
        failures.append(("dimension", None, "code message set differs from network"))
        return CodeCheck(False, failures)
    for m in net.message_ids:
        v = code.phi_msg.get(m)
        if v is None or len(v) != k:
            failures.append(("dimension", m, "missing or misshaped message vector"))
            return CodeCheck(False, failures)
    for e in net.edges:
        v = code.phi_edge.get(e.id)
        if v is None or len(v) != k:
            failures.append(("dimension", e.id, "missing or misshaped edge vector"))
            return CodeCheck(False, failures)

    for i, m in enumerate(net.message_ids):
        if code.phi_msg[m] != unit_vector(k, i):
            failures.append((1, m, "message vector is not its standard basis vector"))
    for node in net.nodes:
        basis = span_basis(code.field, _input_vectors(net, code, node))
        for e in net.out_edges[node]:
            if not span_contains(code.field, basis, code.phi_edge[e]):
                failures.append((2, node, f"edge {e} vector outside input span"))
        for m in net.demanded_by[node]:
            if not span_contains(code.field, basis, code.phi_msg[m]):
                failures.append((3, node, f"demand {m} not decodable"))
    if failures:
        return CodeCheck(False, failures)

    if code.field.p ** k <= simulate_limit:
        for assign_vec in product(code.field.elements(), repeat=k):
            assignment = dict(zip(net.message_ids, assign_vec))
            received = simulate(net, code, assignment)
            for (node, m), value in received.items():
                if value != assignment[m]:
                    failures.append(
                        (3, node, f"simulation mismatch for {m}: got {value}, sent {assignment[m]}")
                    )
                    return CodeCheck(False, failures)
    return CodeCheck(True, [])


def simulate(net: Network, code: GlobalScalarCode, assignment: dict) -> dict:
    """Propagate symbols edge by edge and decode every demand.

    Uses the local coefficients, not the global vectors, so a bad code shows
    up as wrong decoded values rather than being masked.
    """
    field = code.field
    if code.edge_coeffs is None or code.decode_coeffs is None:
        edge_coeffs, decode_coeffs = compute_coefficients(net, code)
    else:
        edge_coeffs, decode_coeffs = code.edge_coeffs, code.decode_coeffs
    for m in net.message_ids:
        if m not in assignment:
            raise CodeError(f"assignment missing message {m!r}")
    symbols: dict = {}
    order = topo_sort(net)
    for node in order.ordering:
        inputs = [assignment[m] % field.p for m in net.generated_by[node]]
        inputs += [symbols[e] for e in net.in_edges[node]]
        for e in net.out_edges[node]:
            coeffs = edge_coeffs[e]
            symbols[e] = sum(c * x for c, x in zip(coeffs, inputs)) % field.p
    received = {}
    for node, m in net.demands:
        inputs = [assignment[mm] % field.p for mm in net.generated_by[node]]
        inputs += [symbols[e] for e in net.in_edges[node]]
        coeffs = decode_coeffs[(node, m)]
        received[(node, m)] = sum(c * x for c, x in zip(coeffs, inputs)) % field.p
    return received


# -- (de)serialization for the CLI --------------------------------------


def code_to_dict(code: GlobalScalarCode) -> dict:
    return {
        "field": code.field.p,
        "messages": list(code.message_ids),
        "phi_msg": {m: list(v) for m, v in sorted(code.phi_msg.items())},
        "phi_edge": {e: list(v) for e, v in sorted(code.phi_edge.items())},
    }


def code_from_dict(doc: dict) -> GlobalScalarCode:
    field = PrimeField(int(doc["field"]))
    message_ids = tuple(doc["messages"])
    phi_msg = {m: tuple(int(x) % field.p for x in v) for m, v in doc["phi_msg"].items()}
    phi_edge = {e: tuple(int(x) % field.p for x in v) for e, v in doc["phi_edge"].items()}
    return GlobalScalarCode(field, message_ids, phi_msg, phi_edge)


def mapping_to_dict(mapping: NetworkMatroidMapping) -> dict:
    return {
        "messages": dict(sorted(mapping.msg_to_elem.items())),
        "edges": dict(sorted(mapping.edge_to_elem.items())),
    }


def mapping_from_dict(doc: dict) -> NetworkMatroidMapping:
    return NetworkMatroidMapping(
        {str(k): int(v) for k, v in doc["messages"].items()},
        {str(k): int(v) for k, v in doc["edges"].items()},
        {},
    )
