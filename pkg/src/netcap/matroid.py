"""Representable matroids over prime fields.

The ground set is always the column index set of an explicit representation
matrix; independence is linear independence of the selected columns.  Every
downstream consumer (code derivation in particular) needs the matrix, so no
abstract independence-oracle form is offered.
"""

from __future__ import annotations

from itertools import combinations

from .caps import Caps, CapExceededError, load_caps
from .gf import FieldMatrix, PrimeField


class RepresentableMatroid:
    """Column matroid of a matrix over GF(p)."""

    def __init__(self, matrix: FieldMatrix):
        self.matrix = matrix
        self.ground_size = matrix.ncols
        self.rank_of_ground = matrix.rank()
        self._rank_cache: dict = {}

    @property
    def field(self) -> PrimeField:
        return self.matrix.field

    @property
    def ground(self) -> range:
        return range(self.ground_size)

    def rank(self, subset) -> int:
        key = frozenset(subset)
        if any(x < 0 or x >= self.ground_size for x in key):
            raise IndexError(f"element out of ground set: {sorted(key)}")
        cached = self._rank_cache.get(key)
        if cached is None:
            cached = self.matrix.rank_of_columns(key)
            self._rank_cache[key] = cached
        return cached

    def is_independent(self, subset) -> bool:
        subset = frozenset(subset)
        return self.rank(subset) == len(subset)

    def is_base(self, subset) -> bool:
        subset = frozenset(subset)
        return len(subset) == self.rank_of_ground and self.is_independent(subset)

    def is_circuit(self, subset) -> bool:
        subset = frozenset(subset)
        if not subset or self.is_independent(subset):
            return False
        return all(self.is_independent(subset - {x}) for x in subset)

    def _check_cap(self, caps: Caps | None):
        caps = caps or load_caps()
        if self.ground_size > caps.matroid_ground:
            raise CapExceededError(
                f"ground size {self.ground_size} exceeds enumeration cap {caps.matroid_ground}"
            )

    def bases(self, caps: Caps | None = None) -> tuple:
        """All maximal independent sets, in lexicographic order."""
        self._check_cap(caps)
        r = self.rank_of_ground
        return tuple(
            frozenset(s)
            for s in combinations(self.ground, r)
            if self.is_independent(s)
        )

    def circuits(self, caps: Caps | None = None) -> tuple:
        """All minimal dependent sets, ordered by size then lexicographically.

        A circuit has at most rank+1 elements, so enumeration stops there.
        """
        self._check_cap(caps)
        found = []
        found_sets = []
        for size in range(1, self.rank_of_ground + 2):
            for s in combinations(self.ground, size):
                fs = frozenset(s)
                if any(c <= fs for c in found_sets):
                    continue
                if not self.is_independent(fs):
                    found.append(fs)
                    found_sets.append(fs)
        return tuple(found)

    def __repr__(self) -> str:
        return (
            f"RepresentableMatroid(ground={self.ground_size}, "
            f"rank={self.rank_of_ground}, field={self.field})"
        )


def matroid_from_rows(rows, p: int) -> RepresentableMatroid:
    return RepresentableMatroid(FieldMatrix.from_rows(PrimeField(p), rows))


def uniform_matroid(c: int, d: int, p: int) -> RepresentableMatroid:
    """A representation of U_{c,d} over GF(p).

    For 2 <= c < d the columns are points of the degree-(c-1) moment curve,
    finite points first and the point at infinity last; any c of them are
    independent provided the field supplies d distinct points, which needs
    p >= d - 1.  Below that the matroid is not representable over GF(p).
    """
    if c < 0 or d < 0 or c > d:
        raise ValueError(f"uniform matroid needs 0 <= c <= d, got ({c}, {d})")
    field = PrimeField(p)
    if c == 0:
        rows = [[0] * d]
        return RepresentableMatroid(FieldMatrix.from_rows(field, rows))
    if c == d:
        rows = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
        return RepresentableMatroid(FieldMatrix.from_rows(field, rows))
    if c == 1:
        return RepresentableMatroid(FieldMatrix.from_rows(field, [[1] * d]))
    if p < d - 1:
        raise ValueError(
            f"U_{{{c},{d}}} is not representable over GF({p}); need p >= {d - 1}"
        )
    columns = []
    for i in range(d):
        if i < p:
            columns.append(tuple(pow(i, k, p) for k in range(c)))
        else:
            columns.append(tuple(0 if k < c - 1 else 1 for k in range(c)))
    rows = [[col[k] for col in columns] for k in range(c)]
    return RepresentableMatroid(FieldMatrix.from_rows(field, rows))


def graphic_matroid(graph_edges, p: int) -> RepresentableMatroid:
    """Matroid of an undirected graph via its signed incidence matrix.

    One column per edge with +1 at one endpoint and -1 at the other (both 1
    over GF(2)); a column set is independent exactly when the edge set is a
    forest, over every field.  Self-loops become zero columns.
    """
    field = PrimeField(p)
    edges = [(str(u), str(v)) for u, v in graph_edges]
    vertices = sorted({v for e in edges for v in e})
    vindex = {v: i for i, v in enumerate(vertices)}
    rows = [[0] * len(edges) for _ in vertices]
    for j, (u, v) in enumerate(edges):
        if u == v:
            continue
        rows[vindex[u]][j] = 1
        rows[vindex[v]][j] = (-1) % p
    return RepresentableMatroid(FieldMatrix.from_rows(field, rows))


def fano_matroid() -> RepresentableMatroid:
    """The Fano plane as a GF(2) vector matroid (standard representation).

    Columns are the seven nonzero vectors of GF(2)^3; dependent triples are
    the seven lines of the plane.
    """
    rows = [
        [1, 0, 0, 0, 1, 1, 1],
        [0, 1, 0, 1, 0, 1, 1],
        [0, 0, 1, 1, 1, 0, 1],
    ]
    return matroid_from_rows(rows, 2)
