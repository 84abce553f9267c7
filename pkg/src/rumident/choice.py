"""Signed measures over orders, choice tables, and Block-Marschak inversion.

Rows of every choice table are the pairs ``(x, A)`` with ``x in A``, menus
sorted by size and then lexicographically, and ``x`` ascending inside a menu.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from . import simplex
from .errors import ChoiceRuleError
from .linalg import Echelon, RationalMatrix
from .prefs import Order, check_size, enumerate_orders, order_index, upper_contour

Menu = frozenset[int]
Row = tuple[int, Menu]
ZERO = Fraction(0)
ONE = Fraction(1)


@lru_cache(maxsize=None)
def menus(n: int) -> tuple[Menu, ...]:
    out = []
    for size in range(1, n + 1):
        out.extend(frozenset(c) for c in itertools.combinations(range(n), size))
    return tuple(out)


@lru_cache(maxsize=None)
def rows(n: int) -> tuple[Row, ...]:
    return tuple((x, A) for A in menus(n) for x in sorted(A))


@lru_cache(maxsize=None)
def row_index(n: int) -> dict[Row, int]:
    return {r: i for i, r in enumerate(rows(n))}


@lru_cache(maxsize=None)
def choice_rows_of_order(n: int) -> tuple[tuple[int, ...], ...]:
    """Per order, the rows ``(x, A)`` at which ``x`` is the best element of ``A``."""
    idx = row_index(n)
    out = []
    for o in enumerate_orders(n):
        pos = {x: i for i, x in enumerate(o)}
        out.append(tuple(idx[(min(A, key=pos.__getitem__), A)] for A in menus(n)))
    return tuple(out)


@lru_cache(maxsize=None)
def contour_rows_of_order(n: int) -> tuple[tuple[int, ...], ...]:
    """Per order, the rows ``(x, A)`` with ``o`` in ``U(x, A)`` (one per ``x``)."""
    idx = row_index(n)
    return tuple(
        tuple(idx[(x, upper_contour(o, x) | {x})] for x in range(n)) for o in enumerate_orders(n)
    )


@dataclass(frozen=True, eq=False)
class SignedMeasure:
    """Dense exact vector over ``enumerate_orders(n)``.

    Equality is by value, so a :class:`Distribution` equals the plain signed
    measure with the same weights.
    """

    n: int
    weights: tuple[Fraction, ...]

    def __eq__(self, other):
        return isinstance(other, SignedMeasure) and self.n == other.n and self.weights == other.weights

    def __hash__(self):
        return hash((self.n, self.weights))

    def __post_init__(self):
        w = tuple(x if isinstance(x, Fraction) else Fraction(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if len(w) != len(enumerate_orders(self.n)):
            raise ValueError(f"need {len(enumerate_orders(self.n))} weights, got {len(w)}")

    @classmethod
    def zero(cls, n: int) -> SignedMeasure:
        check_size(n)
        return SignedMeasure(n, (ZERO,) * len(enumerate_orders(n)))

    @classmethod
    def from_dict(cls, n: int, weights: Mapping[Order, object]):
        check_size(n)
        idx = order_index(n)
        w = [ZERO] * len(idx)
        for o, x in weights.items():
            w[idx[tuple(o)]] += Fraction(x)
        return cls(n, tuple(w))

    @classmethod
    def indicator(cls, n: int, orders: Iterable[Order]):
        return cls.from_dict(n, {o: 1 for o in orders})

    @property
    def orders(self) -> tuple[Order, ...]:
        return enumerate_orders(self.n)

    def __getitem__(self, order: Order) -> Fraction:
        return self.weights[order_index(self.n)[tuple(order)]]

    def to_dict(self) -> dict[Order, Fraction]:
        return {o: w for o, w in zip(self.orders, self.weights) if w}

    def support(self) -> list[Order]:
        return [o for o, w in zip(self.orders, self.weights) if w]

    def total(self) -> Fraction:
        return sum(self.weights, ZERO)

    def is_distribution(self) -> bool:
        return all(w >= 0 for w in self.weights) and self.total() == 1

    def _check(self, other):
        if not isinstance(other, SignedMeasure) or other.n != self.n:
            raise ValueError("measures live on different universes")

    def __add__(self, other: SignedMeasure) -> SignedMeasure:
        self._check(other)
        return SignedMeasure(self.n, tuple(a + b for a, b in zip(self.weights, other.weights)))

    def __sub__(self, other: SignedMeasure) -> SignedMeasure:
        self._check(other)
        return SignedMeasure(self.n, tuple(a - b for a, b in zip(self.weights, other.weights)))

    def __mul__(self, c) -> SignedMeasure:
        c = Fraction(c)
        return SignedMeasure(self.n, tuple(c * a for a in self.weights))

    __rmul__ = __mul__

    def __neg__(self) -> SignedMeasure:
        return self * -1

    def dot(self, other: SignedMeasure) -> Fraction:
        self._check(other)
        return sum((a * b for a, b in zip(self.weights, other.weights) if a and b), ZERO)

    def as_signed(self) -> SignedMeasure:
        return SignedMeasure(self.n, self.weights)


class Distribution(SignedMeasure):
    """A signed measure that is nonnegative with total mass exactly one."""

    def __post_init__(self):
        super().__post_init__()
        if any(w < 0 for w in self.weights):
            raise ValueError("distribution weights must be nonnegative")
        if self.total() != 1:
            raise ValueError(f"distribution mass is {self.total()}, not 1")

    @classmethod
    def uniform(cls, n: int, orders: Iterable[Order]) -> Distribution:
        orders = list(dict.fromkeys(tuple(o) for o in orders))
        return cls.from_dict(n, {o: Fraction(1, len(orders)) for o in orders})

    @classmethod
    def point_mass(cls, order: Order) -> Distribution:
        return cls.from_dict(len(order), {tuple(order): 1})

    @classmethod
    def of(cls, m: SignedMeasure) -> Distribution:
        return cls(m.n, m.weights)


@dataclass(frozen=True, eq=False)
class MenuTable:
    """Exact values indexed by :func:`rows`."""

    n: int
    values: tuple[Fraction, ...]

    def __eq__(self, other):
        return isinstance(other, MenuTable) and self.n == other.n and self.values == other.values

    def __hash__(self):
        return hash((self.n, self.values))

    def __post_init__(self):
        v = tuple(x if isinstance(x, Fraction) else Fraction(x) for x in self.values)
        object.__setattr__(self, "values", v)
        if len(v) != len(rows(self.n)):
            raise ValueError(f"need {len(rows(self.n))} values, got {len(v)}")

    @classmethod
    def from_dict(cls, n: int, table: Mapping[tuple[int, Iterable[int]], object]):
        idx = row_index(n)
        v = [ZERO] * len(idx)
        for (x, A), val in table.items():
            v[idx[(x, frozenset(A))]] = Fraction(val)
        return cls(n, tuple(v))

    def __getitem__(self, key: tuple[int, Iterable[int]]) -> Fraction:
        x, A = key
        return self.values[row_index(self.n)[(x, frozenset(A))]]

    def items(self):
        return zip(rows(self.n), self.values)

    def menu_sums(self) -> dict[Menu, Fraction]:
        sums: dict[Menu, Fraction] = {}
        for (x, A), v in self.items():
            sums[A] = sums.get(A, ZERO) + v
        return sums


class ChoiceTable(MenuTable):
    """A table shaped like a random choice rule (possibly invalid)."""

    def violations(self) -> list[str]:
        out = []
        for (x, A), v in self.items():
            if not 0 <= v <= 1:
                out.append(f"value {v} at ({x}, {sorted(A)}) outside [0, 1]")
        for A, s in self.menu_sums().items():
            if s != 1:
                out.append(f"menu {sorted(A)} sums to {s}")
        return out

    @property
    def valid(self) -> bool:
        return not self.violations()


class RandomChoiceRule(ChoiceTable):
    """A validated choice rule: values in [0, 1], each menu summing to one."""

    def __post_init__(self):
        super().__post_init__()
        problems = self.violations()
        if problems:
            raise ChoiceRuleError("; ".join(problems[:3]), table=ChoiceTable(self.n, self.values))

    @classmethod
    def of(cls, table: MenuTable) -> RandomChoiceRule:
        return cls(table.n, table.values)


class BlockMarschakTable(MenuTable):
    """Alternating sums ``q(x, A)`` of a choice table over supersets of ``A``."""

    def negative_cells(self) -> list[Row]:
        return [r for r, v in self.items() if v < 0]


def phi(m: SignedMeasure) -> ChoiceTable:
    """Choice table of a measure: mass of orders under which ``x`` is best in ``A``.

    Returns a :class:`RandomChoiceRule` when ``m`` is a distribution.
    """
    v = [ZERO] * len(rows(m.n))
    for w, ones in zip(m.weights, choice_rows_of_order(m.n)):
        if w:
            for r in ones:
                v[r] += w
    cls = RandomChoiceRule if m.is_distribution() else ChoiceTable
    return cls(m.n, tuple(v))


@lru_cache(maxsize=None)
def phi_matrix(n: int) -> RationalMatrix:
    """0/1 matrix of :func:`phi`: rows ``(x, A)``, columns orders."""
    check_size(n)
    R, C = len(rows(n)), len(enumerate_orders(n))
    data = [[0] * C for _ in range(R)]
    for j, ones in enumerate(choice_rows_of_order(n)):
        for r in ones:
            data[r][j] = 1
    return RationalMatrix(data, ncols=C)


def phi_columns(n: int, orders: Iterable[Order]) -> list[dict[int, int]]:
    """Sparse columns of the phi matrix for the given orders."""
    ones = choice_rows_of_order(n)
    idx = order_index(n)
    return [dict.fromkeys(ones[idx[o]], 1) for o in orders]


def upper_contour_masses(m: SignedMeasure) -> MenuTable:
    """``m[U(x, A)]`` for every row, where ``A - x`` is exactly the set above ``x``."""
    v = [ZERO] * len(rows(m.n))
    for w, us in zip(m.weights, contour_rows_of_order(m.n)):
        if w:
            for r in us:
                v[r] += w
    return MenuTable(m.n, tuple(v))


def _superset_masks(n: int):
    full = (1 << n) - 1
    idx = row_index(n)
    mask_of = {A: sum(1 << i for i in A) for A in menus(n)}
    by_mask = {mask_of[A]: A for A in menus(n)}
    table = []
    for x, A in rows(n):
        a = mask_of[A]
        free = full & ~a
        sups = []
        sub = free
        while True:
            b = a | sub
            sups.append((idx[(x, by_mask[b])], bin(sub).count("1") & 1))
            if sub == 0:
                break
            sub = (sub - 1) & free
        table.append(tuple(sups))
    return table


@lru_cache(maxsize=None)
def _supersets(n: int):
    return _superset_masks(n)


def moebius_inverse(r: MenuTable) -> BlockMarschakTable:
    """Block-Marschak values ``q(x, A) = sum_{B >= A} (-1)^|B - A| rho(x, B)``."""
    v = r.values
    out = []
    for sups in _supersets(r.n):
        s = ZERO
        for j, odd in sups:
            s = s - v[j] if odd else s + v[j]
        out.append(s)
    return BlockMarschakTable(r.n, tuple(out))


def moebius_forward(q: MenuTable, strict: bool = False) -> ChoiceTable:
    """``rho(x, A) = sum_{B >= A} q(x, B)``.

    The result is returned even when it is not a valid choice rule; check
    ``.valid`` / ``.violations()``, or pass ``strict=True`` to raise
    :class:`ChoiceRuleError` (carrying the raw table) instead.
    """
    v = q.values
    table = ChoiceTable(q.n, tuple(sum((v[j] for j, _ in sups), ZERO) for sups in _supersets(q.n)))
    if strict and not table.valid:
        raise ChoiceRuleError("; ".join(table.violations()[:3]), table=table)
    return table


def complement_row(n: int, x: int, A: Menu) -> Row:
    """The ``U`` row matching Block-Marschak cell ``(x, A)``: ``(x, (X - A) + x)``."""
    return x, (frozenset(range(n)) - A) | {x}


def block_marschak_as_contour(q: MenuTable) -> MenuTable:
    """Reindex ``q`` so that cell ``(x, A)`` holds the required mass of ``U(x, A)``."""
    return MenuTable.from_dict(q.n, {complement_row(q.n, x, A): v for (x, A), v in q.items()})


def behaviorally_equivalent(m1: SignedMeasure, m2: SignedMeasure) -> bool:
    """Equal choice tables; cross-checked against equal upper-contour masses."""
    if m1.n != m2.n:
        raise ValueError("measures live on different universes")
    by_phi = phi(m1).values == phi(m2).values
    by_contours = upper_contour_masses(m1).values == upper_contour_masses(m2).values
    if by_phi != by_contours:
        from .errors import ConsistencyError

        raise ConsistencyError("phi and upper-contour equivalence tests disagree")
    return by_phi


@lru_cache(maxsize=None)
def _contour_system(n: int) -> tuple[tuple[int, ...], list[dict[int, int]]]:
    """Independent rows of the ``U``-mass system (plus the mass row), as sparse rows."""
    cols = contour_rows_of_order(n)
    R = len(rows(n))
    sparse_rows: list[dict[int, int]] = [dict() for _ in range(R)]
    for j, us in enumerate(cols):
        for r in us:
            sparse_rows[r][j] = 1
    mass = dict.fromkeys(range(len(cols)), 1)
    candidates = [mass] + sparse_rows
    ech = Echelon(len(cols))
    keep = tuple(i for i, row in enumerate(candidates) if ech.add(row))
    return keep, candidates


def rationalize(r: MenuTable) -> Distribution | None:
    """A distribution whose choice table is ``r``, or ``None`` if none exists.

    Any negative Block-Marschak value rejects immediately; otherwise an exact
    phase-1 simplex decides feasibility of ``mu >= 0`` with prescribed
    upper-contour masses and unit mass.  When several distributions
    rationalize ``r``, the returned one is simply the vertex the simplex
    reaches.
    """
    n = r.n
    if not isinstance(r, RandomChoiceRule) and not ChoiceTable(n, r.values).valid:
        return None
    q = moebius_inverse(r)
    if q.negative_cells():
        return None
    target = block_marschak_as_contour(q).values
    keep, candidates = _contour_system(n)
    N = len(enumerate_orders(n))
    rhs = [ONE] + list(target)
    A_eq = []
    b_eq = []
    for i in keep:
        dense = [0] * N
        for j in candidates[i]:
            dense[j] = 1
        A_eq.append(dense)
        b_eq.append(rhs[i])
    x = simplex.feasible_point(A_eq, b_eq)
    if x is None:
        return None
    mu = Distribution(n, tuple(x))
    # redundant rows were dropped; confirm the full system
    if upper_contour_masses(mu).values != tuple(target):
        return None
    return mu
