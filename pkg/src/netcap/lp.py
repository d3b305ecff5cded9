"""Exact rational linear programming and the packing-polytope LP builders.

The solver is a dense two-phase primal simplex over fractions.Fraction with
Bland's rule permanently on, so every answer is an exact rational and no
cycling is possible.  Optimality certificates come from solving the dual
program independently and checking a zero gap, not from reading multipliers
out of the final tableau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .caps import Caps, CapExceededError, load_caps
from .netmodel import Network

Rational = Fraction

LE, GE, EQ = "<=", ">=", "=="


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class LPRow:
    coeffs: tuple
    sense: str
    rhs: Fraction


@dataclass(frozen=True)
class LinearProgram:
    """max/min c.x subject to rows, x >= 0; all data exact rationals."""

    maximize: bool
    objective: tuple
    rows: tuple
    var_names: tuple

    @classmethod
    def build(cls, maximize, objective, rows, var_names=None) -> "LinearProgram":
        objective = tuple(_frac(c) for c in objective)
        n = len(objective)
        norm_rows = []
        for coeffs, sense, rhs in rows:
            coeffs = tuple(_frac(c) for c in coeffs)
            if len(coeffs) != n:
                raise ValueError("row width does not match objective")
            if sense not in (LE, GE, EQ):
                raise ValueError(f"unknown sense {sense!r}")
            norm_rows.append(LPRow(coeffs, sense, _frac(rhs)))
        if var_names is None:
            var_names = tuple(f"x{i + 1}" for i in range(n))
        return cls(maximize, objective, tuple(norm_rows), tuple(var_names))

    @property
    def num_vars(self) -> int:
        return len(self.objective)


@dataclass
class LPSolution:
    status: str  # "optimal" | "unbounded" | "infeasible"
    value: Fraction | None
    point: tuple | None


def _leq_form(lp: LinearProgram):
    """All-<= row list (equalities split, >= negated)."""
    rows = []
    for row in lp.rows:
        if row.sense == LE:
            rows.append((row.coeffs, row.rhs))
        elif row.sense == GE:
            rows.append((tuple(-c for c in row.coeffs), -row.rhs))
        else:
            rows.append((row.coeffs, row.rhs))
            rows.append((tuple(-c for c in row.coeffs), -row.rhs))
    return rows


def simplex_exact(lp: LinearProgram) -> LPSolution:
    """Two-phase simplex with Bland's rule; exact rational arithmetic."""
    rows = _leq_form(lp)
    n = lp.num_vars
    m = len(rows)
    obj = list(lp.objective) if lp.maximize else [-c for c in lp.objective]

    # tableau columns: n structural, m slacks, artificials appended, rhs last
    art_cols = []
    width = n + m
    tableau = []
    basis = []
    for i, (coeffs, rhs) in enumerate(rows):
        row = list(coeffs) + [Fraction(0)] * m
        row[n + i] = Fraction(1)
        if rhs < 0:
            row = [-x for x in row]
            rhs = -rhs
            art_cols.append(width + len(art_cols))
        tableau.append((row, rhs))
    total_width = width + len(art_cols)
    matrix = []
    art_iter = iter(art_cols)
    for i, (row, rhs) in enumerate(tableau):
        full = row + [Fraction(0)] * len(art_cols) + [rhs]
        if rows[i][1] < 0:
            col = next(art_iter)
            full[col] = Fraction(1)
            basis.append(col)
        else:
            basis.append(n + i)
        matrix.append(full)

    def pivot(r, c):
        piv = matrix[r][c]
        matrix[r] = [x / piv for x in matrix[r]]
        for i in range(m):
            if i != r and matrix[i][c]:
                f = matrix[i][c]
                matrix[i] = [a - f * b for a, b in zip(matrix[i], matrix[r])]
        basis[r] = c

    def run_phase(cost):
        # maximize cost.x; Bland: smallest improving column, smallest-ratio
        # row with smallest basis index on ties
        while True:
            z = [Fraction(0)] * (total_width + 1)
            for r, b in enumerate(basis):
                cb = cost[b]
                if cb:
                    for j in range(total_width + 1):
                        if matrix[r][j]:
                            z[j] += cb * matrix[r][j]
            entering = None
            for j in range(total_width):
                if cost[j] - z[j] > 0:
                    entering = j
                    break
            if entering is None:
                return z[total_width]
            leaving = None
            best = None
            for r in range(m):
                a = matrix[r][entering]
                if a > 0:
                    ratio = matrix[r][total_width] / a
                    key = (ratio, basis[r])
                    if best is None or key < best:
                        best = key
                        leaving = r
            if leaving is None:
                return None  # unbounded
            pivot(leaving, entering)

    if art_cols:
        phase1_cost = [Fraction(0)] * (total_width + 1)
        for c in art_cols:
            phase1_cost[c] = Fraction(-1)
        value = run_phase(phase1_cost)
        if value is None or value < 0:
            return LPSolution("infeasible", None, None)
        # drive any artificial still in the basis out (or its row is redundant)
        for r in range(m):
            if basis[r] in art_cols:
                col = next(
                    (j for j in range(width) if matrix[r][j] != 0),
                    None,
                )
                if col is not None:
                    pivot(r, col)

    phase2_cost = (
        obj + [Fraction(0)] * (m + len(art_cols)) + [Fraction(0)]
    )
    for c in art_cols:
        phase2_cost[c] = Fraction(-10 ** 9)  # keep stray artificials out
    value = run_phase(phase2_cost)
    if value is None:
        return LPSolution("unbounded", None, None)
    point = [Fraction(0)] * n
    for r, b in enumerate(basis):
        if b < n:
            point[b] = matrix[r][total_width]
    value = sum(c * x for c, x in zip(lp.objective, point))
    return LPSolution("optimal", value, tuple(point))


def dual_program(lp: LinearProgram) -> LinearProgram:
    """Dual of the all-<= normal form; one nonnegative variable per row."""
    rows = _leq_form(lp)
    n = lp.num_vars
    if lp.maximize:
        # max c.x, Ax <= b  ->  min b.y, A^T y >= c, y >= 0
        objective = [rhs for _, rhs in rows]
        dual_rows = []
        for j in range(n):
            coeffs = tuple(coeffs_i[j] for coeffs_i, _ in rows)
            dual_rows.append((coeffs, GE, lp.objective[j]))
        names = tuple(f"y{i + 1}" for i in range(len(rows)))
        return LinearProgram.build(False, objective, dual_rows, names)
    # min c.x, Ax <= b  ->  max b.y, A^T y <= c, y <= 0; substitute y = -z
    objective = [-rhs for _, rhs in rows]
    dual_rows = []
    for j in range(n):
        coeffs = tuple(-coeffs_i[j] for coeffs_i, _ in rows)
        dual_rows.append((coeffs, LE, lp.objective[j]))
    names = tuple(f"z{i + 1}" for i in range(len(rows)))
    return LinearProgram.build(True, objective, dual_rows, names)


@dataclass
class Certificate:
    primal: LPSolution
    dual: LPSolution

    @property
    def gap(self) -> Fraction:
        return self.primal.value - self.dual.value


def solve_with_certificate(lp: LinearProgram) -> Certificate:
    """Solve primal and dual independently; strong duality must close exactly."""
    primal = simplex_exact(lp)
    if primal.status != "optimal":
        raise ValueError(f"cannot certify a {primal.status} program")
    dual = simplex_exact(dual_program(lp))
    if dual.status != "optimal" or dual.value != primal.value:
        raise AssertionError(
            f"duality gap: primal {primal.value}, dual {dual.status}:{dual.value}"
        )
    return Certificate(primal, dual)


def dump_lp(lp: LinearProgram) -> str:
    """Human-readable rows with exact rationals."""

    def term(c, name):
        return f"{c} {name}"

    lines = []
    sense = "max" if lp.maximize else "min"
    lines.append(
        sense
        + " "
        + " + ".join(term(c, v) for c, v in zip(lp.objective, lp.var_names) if c != 0)
    )
    for row in lp.rows:
        body = " + ".join(
            term(c, v) for c, v in zip(row.coeffs, lp.var_names) if c != 0
        )
        lines.append(f"  {body or '0'} {row.sense} {row.rhs}")
    lines.append("  " + ", ".join(lp.var_names) + " >= 0")
    return "\n".join(lines)


# -- packing parent polytopes -------------------------------------------


@dataclass(frozen=True)
class PackingVariable:
    """One column of a parent polytope: a tree or a partial solution.

    edge_load[e] is the 0/1 indicator of edge use; rate is the vector this
    variable contributes per unit to each message coordinate.
    """

    var_id: str
    edge_load: tuple  # sorted (edge_id, 1) pairs
    rate: tuple

    def load(self) -> dict:
        return dict(self.edge_load)


@dataclass(frozen=True)
class ParentPolytope:
    """Packing polytope: sum of variable loads within every edge capacity."""

    variables: tuple
    edge_ids: tuple
    capacities: tuple
    message_ids: tuple

    @classmethod
    def from_trees(cls, net: Network, trees_by_message: dict) -> "ParentPolytope":
        k = len(net.message_ids)
        variables = []
        for i, m in enumerate(net.message_ids):
            rate = tuple(Fraction(1 if j == i else 0) for j in range(k))
            for tree in trees_by_message[m]:
                load = tuple((e, 1) for e in sorted(tree.edges))
                var_id = f"{m}:" + "+".join(sorted(tree.edges))
                variables.append(PackingVariable(var_id, load, rate))
        edge_ids = tuple(e.id for e in net.edges)
        capacities = tuple(Fraction(e.capacity) for e in net.edges)
        return cls(tuple(variables), edge_ids, capacities, net.message_ids)

    @classmethod
    def from_partial_solutions(cls, net: Network, solutions) -> "ParentPolytope":
        variables = []
        for sol in solutions:
            load = tuple((e, 1) for e in sorted(sol.active_edges))
            bits = "".join(str(b) for b in sol.weight)
            var_id = f"w{bits}:" + "+".join(sorted(sol.active_edges))
            variables.append(
                PackingVariable(var_id, load, tuple(Fraction(b) for b in sol.weight))
            )
        edge_ids = tuple(e.id for e in net.edges)
        capacities = tuple(Fraction(e.capacity) for e in net.edges)
        return cls(tuple(variables), edge_ids, capacities, net.message_ids)

    def capacity_rows(self, extra_cols: int = 0):
        index = {e: i for i, e in enumerate(self.edge_ids)}
        rows = []
        for e, cap in zip(self.edge_ids, self.capacities):
            coeffs = [Fraction(0)] * (len(self.variables) + extra_cols)
            for var_pos, var in enumerate(self.variables):
                for eid, unit in var.edge_load:
                    if eid == e:
                        coeffs[var_pos] = Fraction(unit)
            rows.append((tuple(coeffs), LE, cap))
        del index
        return rows


def _ray_lp(parent: ParentPolytope, q) -> LinearProgram:
    q = [_frac(x) for x in q]
    if len(q) != len(parent.message_ids):
        raise ValueError("ray dimension does not match the message count")
    if any(x < 0 for x in q) or all(x == 0 for x in q):
        raise ValueError("ray must be nonnegative and nonzero")
    nv = len(parent.variables)
    rows = parent.capacity_rows(extra_cols=1)  # last column is lambda
    for j, _ in enumerate(parent.message_ids):
        coeffs = [var.rate[j] for var in parent.variables] + [-q[j]]
        rows.append((tuple(coeffs), GE, Fraction(0)))
    objective = [Fraction(0)] * nv + [Fraction(1)]
    names = tuple(v.var_id for v in parent.variables) + ("lambda",)
    return LinearProgram.build(True, objective, rows, names)


def build_route_ray_lp(parent: ParentPolytope, q) -> LinearProgram:
    """Concurrent tree-packing program: max lambda with group sums >= lambda*q."""
    return _ray_lp(parent, q)


def build_lcode_ray_lp(parent: ParentPolytope, q) -> LinearProgram:
    """Same shape over partial solutions, group sums weighted by their 0/1 rates."""
    return _ray_lp(parent, q)


def solve_covering(weights, costs, q, bounds):
    """Exact optimum of the box-constrained fractional covering program.

    min costs.y  s.t.  sum_i weights[i][j]*y[i] >= q[j] for all j,
    0 <= y[i] <= bounds[i].  Returns (value, y); raises ValueError when the
    demands cannot be covered.
    """
    k = len(weights)
    if k == 0:
        raise ValueError("no covering options")
    q = [_frac(x) for x in q]
    costs = [_frac(c) for c in costs]
    bounds = [_frac(b) for b in bounds]
    if any(c < 0 for c in costs):
        raise ValueError("covering costs must be nonnegative")
    rows = []
    for j in range(len(q)):
        coeffs = tuple(_frac(weights[i][j]) for i in range(k))
        rows.append((coeffs, GE, q[j]))
    for i in range(k):
        coeffs = tuple(Fraction(1 if t == i else 0) for t in range(k))
        rows.append((coeffs, LE, bounds[i]))
    lp = LinearProgram.build(False, costs, rows, tuple(f"y{i + 1}" for i in range(k)))
    # minimize via maximizing the negated objective
    neg = LinearProgram.build(True, [-c for c in costs], rows, lp.var_names)
    sol = simplex_exact(neg)
    if sol.status == "infeasible":
        raise ValueError("covering demands cannot be met")
    if sol.status != "optimal":
        raise ValueError(f"covering program is {sol.status}")
    return -sol.value, sol.point


# -- polytope vertex enumeration ----------------------------------------


def _solve_square(rows, rhs):
    """Solve a square rational system; None if singular."""
    n = len(rhs)
    m = [list(rows[i]) + [rhs[i]] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return None
        m[col], m[pivot] = m[pivot], m[col]
        pv = m[col][col]
        m[col] = [x / pv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return tuple(m[i][n] for i in range(n))


def polytope_vertices(a_rows, b, num_vars: int, caps: Caps | None = None) -> tuple:
    """All vertices (basic feasible solutions) of {A x <= b, x >= 0}.

    Enumerate num_vars-subsets of the constraint rows (capacity rows plus
    nonnegativity rows), solve each square subsystem, keep feasible points.
    """
    from itertools import combinations

    caps = caps or load_caps()
    if num_vars > caps.parent_vars:
        raise CapExceededError(
            f"{num_vars} variables exceed the vertex enumeration cap {caps.parent_vars}"
        )
    all_rows = [tuple(_frac(c) for c in row) for row in a_rows]
    all_rhs = [_frac(x) for x in b]
    for i in range(num_vars):
        all_rows.append(tuple(Fraction(-1 if j == i else 0) for j in range(num_vars)))
        all_rhs.append(Fraction(0))
    total = len(all_rows)
    if math.comb(total, num_vars) > 2_000_000:
        raise CapExceededError("too many constraint subsets to enumerate")
    vertices = set()
    for combo in combinations(range(total), num_vars):
        rows = [all_rows[i] for i in combo]
        rhs = [all_rhs[i] for i in combo]
        point = _solve_square(rows, rhs)
        if point is None:
            continue
        if any(x < 0 for x in point):
            continue
        feasible = True
        for row, bound in zip(all_rows[: len(a_rows)], all_rhs[: len(a_rows)]):
            if sum(c * x for c, x in zip(row, point)) > bound:
                feasible = False
                break
        if feasible:
            vertices.add(point)
    return tuple(sorted(vertices))


def parent_vertices(parent: ParentPolytope, caps: Caps | None = None) -> tuple:
    rows = []
    for coeffs, _, _ in parent.capacity_rows():
        rows.append(coeffs)
    b = list(parent.capacities)
    return polytope_vertices(rows, b, len(parent.variables), caps)
