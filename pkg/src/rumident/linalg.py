"""Dense and incremental exact linear algebra over the rationals.

Everything here works on :class:`fractions.Fraction`; ints are accepted and,
inside :class:`Echelon`, kept as ints while possible.  Elimination never
compares against a tolerance: a pivot is any nonzero entry.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Vector = list[Fraction]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class RationalMatrix:
    """Row-major matrix of Fractions."""

    __slots__ = ("rows", "ncols")

    def __init__(self, rows: Iterable[Sequence], ncols: int | None = None):
        self.rows = [[_frac(x) for x in r] for r in rows]
        if ncols is None:
            if not self.rows:
                raise ValueError("ncols required for an empty matrix")
            ncols = len(self.rows[0])
        if any(len(r) != ncols for r in self.rows):
            raise ValueError("ragged rows")
        self.ncols = ncols

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int) -> RationalMatrix:
        return cls(([c[i] for c in cols] for i in range(nrows)), ncols=len(cols))

    @classmethod
    def identity(cls, n: int) -> RationalMatrix:
        return cls(([int(i == j) for j in range(n)] for i in range(n)), ncols=n)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, RationalMatrix) and self.shape == other.shape and self.rows == other.rows

    def __repr__(self):
        return f"RationalMatrix({self.shape[0]}x{self.shape[1]})"

    def column(self, j: int) -> Vector:
        return [r[j] for r in self.rows]

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.ncols)]

    def select_columns(self, idx: Sequence[int]) -> RationalMatrix:
        return RationalMatrix(([r[j] for j in idx] for r in self.rows), ncols=len(idx))

    def select_rows(self, idx: Sequence[int]) -> RationalMatrix:
        return RationalMatrix((self.rows[i] for i in idx), ncols=self.ncols)

    def transpose(self) -> RationalMatrix:
        return RationalMatrix(self.columns(), ncols=len(self.rows))

    T = property(transpose)

    def __matmul__(self, other):
        if isinstance(other, RationalMatrix):
            if self.ncols != len(other.rows):
                raise ValueError("shape mismatch")
            cols = other.columns()
            return RationalMatrix(([dot(r, c) for c in cols] for r in self.rows), ncols=other.ncols)
        if len(other) != self.ncols:
            raise ValueError("shape mismatch")
        return [dot(r, other) for r in self.rows]

    def __sub__(self, other: RationalMatrix) -> RationalMatrix:
        return RationalMatrix(([a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)), ncols=self.ncols)

    def rref(self) -> tuple[RationalMatrix, list[int]]:
        """Reduced row echelon form and pivot columns."""
        m = [list(r) for r in self.rows]
        pivots: list[int] = []
        r = 0
        nrows = len(m)
        for c in range(self.ncols):
            if r == nrows:
                break
            p = next((i for i in range(r, nrows) if m[i][c]), None)
            if p is None:
                continue
            m[r], m[p] = m[p], m[r]
            inv = 1 / m[r][c]
            row = [x * inv for x in m[r]]
            m[r] = row
            nz = [j for j in range(c, self.ncols) if row[j]]
            for i in range(nrows):
                f = m[i][c]
                if i != r and f:
                    mi = m[i]
                    for j in nz:
                        mi[j] -= f * row[j]
            pivots.append(c)
            r += 1
        return RationalMatrix(m, ncols=self.ncols), pivots

    def rank(self) -> int:
        ech = Echelon(self.ncols)
        return sum(ech.add(r) for r in self.rows)

    def nullspace(self) -> list[Vector]:
        """Basis of ``{v : M v = 0}``; one vector per free column, with a 1 there."""
        R, pivots = self.rref()
        free = [c for c in range(self.ncols) if c not in set(pivots)]
        basis = []
        for f in free:
            v = [Fraction(0)] * self.ncols
            v[f] = Fraction(1)
            for i, p in enumerate(pivots):
                v[p] = -R.rows[i][f]
            basis.append(v)
        return basis

    def solve(self, b: Sequence) -> Vector | None:
        """Some solution of ``M x = b`` (free variables set to 0), or ``None``."""
        aug = RationalMatrix((r + [_frac(bi)] for r, bi in zip(self.rows, b)), ncols=self.ncols + 1)
        R, pivots = aug.rref()
        if pivots and pivots[-1] == self.ncols:
            return None
        x = [Fraction(0)] * self.ncols
        for i, p in enumerate(pivots):
            x[p] = R.rows[i][self.ncols]
        return x

    def inverse(self) -> RationalMatrix:
        n = len(self.rows)
        if n != self.ncols:
            raise ValueError("matrix is not square")
        aug = RationalMatrix((r + [int(i == j) for j in range(n)] for i, r in enumerate(self.rows)), ncols=2 * n)
        R, pivots = aug.rref()
        if pivots[:n] != list(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return RationalMatrix((r[n:] for r in R.rows), ncols=n)


def dot(a: Sequence, b: Sequence) -> Fraction:
    return sum((x * y for x, y in zip(a, b) if x and y), Fraction(0))


class Echelon:
    """Incrementally maintained row-echelon basis of sparse vectors.

    ``add`` reports whether a vector enlarges the span.  Vectors are stored as
    ``{column: value}`` dicts normalised to 1 at their pivot, and each stored
    vector is reduced against the ones before it, so membership tests are a
    single forward sweep.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self.pivots: list[int] = []
        self.vectors: list[dict[int, Fraction]] = []

    def __len__(self):
        return len(self.vectors)

    def copy(self) -> Echelon:
        e = Echelon(self.dim)
        e.pivots = list(self.pivots)
        e.vectors = list(self.vectors)
        return e

    def reduce(self, v) -> dict[int, Fraction]:
        w = _sparse_exact(v)
        for p, b in zip(self.pivots, self.vectors):
            f = w.get(p)
            if f:
                for j, x in b.items():
                    y = w.get(j, 0) - f * x
                    if y:
                        w[j] = y
                    else:
                        w.pop(j, None)
        return w

    def add(self, v) -> bool:
        w = self.reduce(v)
        if not w:
            return False
        p = min(w)
        lead = w[p]
        # integer arithmetic survives while pivots are +-1, which is the common case
        inv = lead if lead in (1, -1) else 1 / _frac(lead)
        self.pivots.append(p)
        self.vectors.append({j: x * inv for j, x in w.items()})
        return True

    def pop(self) -> None:
        self.pivots.pop()
        self.vectors.pop()

    def contains(self, v) -> bool:
        return not self.reduce(v)


def _exact(x):
    return x if isinstance(x, (int, Fraction)) else Fraction(x)


def _sparse_exact(v) -> dict[int, int | Fraction]:
    items = v.items() if isinstance(v, dict) else enumerate(v)
    return {j: _exact(x) for j, x in items if x}


def _sparse(v) -> dict[int, Fraction]:
    if isinstance(v, dict):
        return {j: _frac(x) for j, x in v.items() if x}
    return {j: _frac(x) for j, x in enumerate(v) if x}


def rank(vectors: Iterable, dim: int) -> int:
    ech = Echelon(dim)
    return sum(ech.add(v) for v in vectors)


def independent_subset(vectors: Sequence, dim: int) -> list[int]:
    """Indices of the first-come maximal independent subset."""
    ech = Echelon(dim)
    return [i for i, v in enumerate(vectors) if ech.add(v)]


def same_span(a: Sequence, b: Sequence, dim: int) -> bool:
    """Mutual containment via ranks: rank(a) == rank(b) == rank(a + b)."""
    ra, rb = rank(a, dim), rank(b, dim)
    return ra == rb == rank(list(a) + list(b), dim)


def coefficients(basis: Sequence[Sequence], v: Sequence) -> Vector | None:
    """Exact ``c`` with ``sum c_i basis_i == v``, or ``None`` if ``v`` is outside the span."""
    if not basis:
        return [] if not any(v) else None
    M = RationalMatrix.from_columns(basis, len(v))
    c = M.solve(v)
    if c is None:
        return None
    return c
