"""Exact arithmetic over prime fields GF(p) and small dense linear algebra.

Everything operates on plain Python ints reduced mod p; vectors are tuples
and matrices are tuples of row tuples, so all values are exact and hashable.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

MAX_PRIME = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    """GF(p) for a prime p with 2 <= p <= 2**16."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or isinstance(self.p, bool):
            raise ValueError(f"field modulus must be an integer, got {self.p!r}")
        if not 2 <= self.p <= MAX_PRIME:
            raise ValueError(f"field modulus must be in [2, {MAX_PRIME}], got {self.p}")
        if not is_prime(self.p):
            raise ValueError(f"field modulus must be prime, got {self.p}")

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def inv(self, a: int) -> int:
        # Extended Euclid; works uniformly for any prime up to 2**16.
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in GF(p)")
        r0, r1 = self.p, a
        s0, s1 = 0, 1
        while r1:
            k, r0, r1 = r0 // r1, r1, r0 % r1
            s0, s1 = s1, s0 - k * s1
        return s0 % self.p

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def elements(self) -> range:
        return range(self.p)

    def __repr__(self) -> str:
        return f"GF({self.p})"


def field_ops(p: int) -> PrimeField:
    """Arithmetic bundle (add, mul, neg, inv, ...) for GF(p)."""
    return PrimeField(p)


def vec_add(field: PrimeField, u: tuple, v: tuple) -> tuple:
    return tuple((a + b) % field.p for a, b in zip(u, v))


def vec_scale(field: PrimeField, c: int, v: tuple) -> tuple:
    return tuple((c * a) % field.p for a in v)


def unit_vector(length: int, index: int) -> tuple:
    return tuple(1 if i == index else 0 for i in range(length))


@dataclass(frozen=True)
class FieldMatrix:
    """Dense matrix over GF(p); rows stored as a tuple of row tuples."""

    field: PrimeField
    rows: tuple

    @classmethod
    def from_rows(cls, field: PrimeField, rows) -> "FieldMatrix":
        p = field.p
        normalized = tuple(tuple(int(x) % p for x in row) for row in rows)
        widths = {len(r) for r in normalized}
        if len(widths) > 1:
            raise ValueError("ragged matrix rows")
        return cls(field, normalized)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.rows)

    def columns(self, indices) -> "FieldMatrix":
        idx = list(indices)
        return FieldMatrix(self.field, tuple(tuple(row[j] for j in idx) for row in self.rows))

    def rref(self):
        """Reduced row echelon form; returns (matrix, rank, pivot columns)."""
        p = self.field.p
        inv = self.field.inv
        m = [list(row) for row in self.rows]
        nr, nc = len(m), (len(m[0]) if m else 0)
        pivots = []
        r = 0
        for c in range(nc):
            if r >= nr:
                break
            pivot = next((i for i in range(r, nr) if m[i][c]), None)
            if pivot is None:
                continue
            m[r], m[pivot] = m[pivot], m[r]
            scale = inv(m[r][c])
            m[r] = [(scale * x) % p for x in m[r]]
            for i in range(nr):
                if i != r and m[i][c]:
                    f = m[i][c]
                    m[i] = [(a - f * b) % p for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
        reduced = FieldMatrix(self.field, tuple(tuple(row) for row in m))
        return reduced, len(pivots), tuple(pivots)

    def rank(self) -> int:
        return self.rref()[1]

    def rank_of_columns(self, cols) -> int:
        cols = sorted(set(cols))
        if not cols:
            return 0
        return self.columns(cols).rank()

    def columns_independent(self, cols) -> bool:
        cols = set(cols)
        return self.rank_of_columns(cols) == len(cols)

    def __str__(self) -> str:
        return "\n".join(" ".join(str(x) for x in row) for row in self.rows)


def rref(matrix: FieldMatrix):
    return matrix.rref()


def columns_independent(matrix: FieldMatrix, cols) -> bool:
    return matrix.columns_independent(cols)


def span_basis(field: PrimeField, vectors) -> list:
    """Row-reduced basis of the span of the given vectors (zero rows dropped)."""
    vecs = [v for v in vectors if any(v)]
    if not vecs:
        return []
    reduced, rank, _ = FieldMatrix.from_rows(field, vecs).rref()
    return [row for row in reduced.rows[:rank]]


def span_contains(field: PrimeField, basis, target) -> bool:
    """True iff target lies in the span of (already reduced or raw) vectors."""
    if not any(target):
        return True
    if not basis:
        return False
    stacked = FieldMatrix.from_rows(field, list(basis) + [target])
    return stacked.rank() == FieldMatrix.from_rows(field, basis).rank()


def enumerate_span(field: PrimeField, vectors, length: int) -> list:
    """All vectors in the span, sorted; includes the zero vector."""
    basis = span_basis(field, vectors)
    if not basis:
        return [tuple(0 for _ in range(length))]
    out = set()
    for coeffs in product(field.elements(), repeat=len(basis)):
        v = tuple(0 for _ in range(length))
        for c, b in zip(coeffs, basis):
            if c:
                v = vec_add(field, v, vec_scale(field, c, b))
        out.add(v)
    return sorted(out)


def solve_combination(field: PrimeField, vectors, target):
    """Coefficients expressing target as a combination of vectors, or None.

    Solves sum_i c_i * vectors[i] = target by Gauss-Jordan on the transposed
    system; returns the first solution in pivot order (free coefficients 0).
    """
    n = len(vectors)
    if not any(target):
        return tuple(0 for _ in range(n))
    if n == 0:
        return None
    length = len(target)
    aug_rows = []
    for i in range(length):
        aug_rows.append([vectors[j][i] for j in range(n)] + [target[i]])
    reduced, rank, pivots = FieldMatrix.from_rows(field, aug_rows).rref()
    if n in pivots:  # pivot in the augmented column: inconsistent
        return None
    coeffs = [0] * n
    for r, c in enumerate(pivots):
        coeffs[c] = reduced.rows[r][n]
    return tuple(coeffs)
