"""Identification of support-restricted models and geometry of equivalence classes.

Two routes decide every rank question.  The *choice* route looks at the
columns of the phi matrix.  The *Ryser* route looks only at the span of the
swap vectors.  For ``n <= 5`` the two are cross-checked on every call (the
swap basis is cheap there); above that only the choice route runs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

from . import simplex
from .choice import Distribution, SignedMeasure, behaviorally_equivalent, phi_columns, rows
from .errors import ConsistencyError, SupportError
from .linalg import Echelon, RationalMatrix
from .prefs import Order, enumerate_orders, order_index, separable_levels
from .ryser import support_intersection_dim

CROSSCHECK_MAX_N = 5
ZERO = Fraction(0)


@dataclass(frozen=True)
class SupportRestriction:
    n: int
    allowed: frozenset[Order]

    def __post_init__(self):
        allowed = frozenset(tuple(o) for o in self.allowed)
        object.__setattr__(self, "allowed", allowed)
        if not allowed:
            raise ValueError("a support restriction needs at least one order")
        idx = order_index(self.n)
        bad = [o for o in allowed if o not in idx]
        if bad:
            raise ValueError(f"{bad[0]!r} is not an order on {self.n} alternatives")

    @classmethod
    def of(cls, orders: Iterable[Order]) -> SupportRestriction:
        orders = [tuple(o) for o in orders]
        if not orders:
            raise ValueError("a support restriction needs at least one order")
        return cls(len(orders[0]), frozenset(orders))

    @classmethod
    def full(cls, n: int) -> SupportRestriction:
        return cls(n, frozenset(enumerate_orders(n)))

    def sorted(self) -> list[Order]:
        return sorted(self.allowed)

    def __len__(self):
        return len(self.allowed)


def _crosscheck(n: int, crosscheck: bool | None) -> bool:
    return n <= CROSSCHECK_MAX_N if crosscheck is None else crosscheck


def columns_independent(n: int, orders: Iterable[Order]) -> bool:
    ech = Echelon(len(rows(n)))
    return all(ech.add(c) for c in phi_columns(n, orders))


def identified_by_ryser(n: int, orders: Iterable[Order]) -> bool:
    """No nonzero Ryser-span vector is supported inside ``orders``."""
    return support_intersection_dim(n, list(orders)) == 0


def is_identified_support(s: SupportRestriction, crosscheck: bool | None = None) -> bool:
    """Whether every distribution on ``s`` is pinned down by its choice probabilities."""
    orders = s.sorted()
    result = columns_independent(s.n, orders)
    if _crosscheck(s.n, crosscheck) and result != identified_by_ryser(s.n, orders):
        raise ConsistencyError("column-rank and Ryser-subspace identification tests disagree")
    return result


def separable_pairs(orders: Iterable[Order]) -> list[tuple[Order, Order, int]]:
    """All separable pairs among ``orders``, with each level at which they separate."""
    orders = sorted(set(orders))
    out = []
    for a, b in itertools.combinations(orders, 2):
        for k in sorted(separable_levels(a, b)):
            out.append((a, b, k))
    return out


def has_separable_pair(s: SupportRestriction) -> bool:
    """Whether some separable pair in ``s`` has its conjugate pair inside ``s`` too.

    This is the test that a single weighted swap can act within the model.
    With ``s`` the full order set every separable pair qualifies; for a plain
    pair test on an arbitrary set use :func:`separable_pairs`.
    """
    allowed = s.allowed
    for a, b, k in separable_pairs(allowed):
        if a[:k] + b[k:] in allowed and b[:k] + a[k:] in allowed:
            return True
    return False


def point_identified_unrestricted(mu: Distribution) -> bool:
    """Whether ``mu`` is the only distribution with its choice probabilities.

    True iff the support of ``mu`` contains no separable pair.
    """
    return not separable_pairs(mu.support())


def _check_support(mu: SignedMeasure, s: SupportRestriction) -> None:
    outside = [o for o in mu.support() if o not in s.allowed]
    if outside:
        raise SupportError(f"{len(outside)} support order(s) outside the restriction, e.g. {outside[0]}")


def restricted_kernel(n: int, orders: list[Order]) -> list[list[Fraction]]:
    """Basis (coordinates over ``orders``) of vectors on ``orders`` with zero choice table."""
    cols = phi_columns(n, orders)
    R = len(rows(n))
    M = RationalMatrix(([c.get(r, 0) for c in cols] for r in range(R)), ncols=len(orders))
    return M.nullspace() if orders else []


@dataclass(frozen=True)
class EquivalenceClassReport:
    representative: Distribution
    class_dim: int
    extreme: bool
    witnesses: tuple[Distribution, ...] | None
    reachable: tuple[Order, ...] = ()

    def to_json(self, fmt) -> dict:
        return {
            "class_dim": self.class_dim,
            "identified": self.class_dim == 0,
            "extreme": self.extreme,
            "witnesses": None if self.witnesses is None else [fmt(w) for w in self.witnesses],
        }


class _ClassGeometry(NamedTuple):
    orders: list[Order]  # coordinates, sorted
    mu: list[Fraction]
    kernel: list[list[Fraction]]  # basis of allowed directions (on `orders`)
    zero_forced: frozenset[int]  # coordinates that vanish on the whole class
    lp_direction: list[Fraction] | None


def _geometry(mu: Distribution, s: SupportRestriction) -> _ClassGeometry:
    """Directions of the class polytope ``{nu in Delta(s): nu - mu has zero choice table}``."""
    orders = s.sorted()
    idx = order_index(mu.n)
    m = [mu.weights[idx[o]] for o in orders]
    W = restricted_kernel(mu.n, orders)
    zeros = [j for j, w in enumerate(m) if not w]
    if not W or not zeros:
        return _ClassGeometry(orders, m, W, frozenset(zeros) if not W else frozenset(), None)
    # Find every zero coordinate that some feasible direction makes positive:
    # one LP per round over c (free), w = W c, w_j >= 0 on the zeros of mu.
    Wm = RationalMatrix.from_columns(W, len(orders))
    pending = set(zeros)
    total_dir = [ZERO] * len(orders)
    found_any = False
    while pending:
        A_ub = [[-x for x in Wm.rows[j]] for j in zeros]
        b_ub = [0] * len(zeros)
        A_eq = [[sum((Wm.rows[j][t] for j in pending), ZERO) for t in range(len(W))]]
        res = simplex.linprog([0] * len(W), A_eq, [1], A_ub, b_ub, free=range(len(W)))
        if res.status != "optimal":
            break
        w = Wm @ res.x
        total_dir = [a + b for a, b in zip(total_dir, w)]
        found_any = True
        pending -= {j for j in pending if w[j] > 0}
    return _ClassGeometry(orders, m, W, frozenset(pending), total_dir if found_any else None)


def _directions(geo: _ClassGeometry) -> list[list[Fraction]]:
    """Basis of the class polytope's direction space."""
    if not geo.zero_forced:
        return [list(v) for v in geo.kernel]
    Wm = RationalMatrix.from_columns(geo.kernel, len(geo.orders))
    forced = RationalMatrix([Wm.rows[j] for j in sorted(geo.zero_forced)], ncols=len(geo.kernel))
    return [Wm @ c for c in forced.nullspace()]


def _max_step(m: list[Fraction], v: list[Fraction]) -> Fraction:
    """Largest ``t >= 0`` with ``m + t v >= 0`` (``v`` has a negative entry)."""
    return min(mi / -vi for mi, vi in zip(m, v) if vi < 0)


def equivalence_class(mu: Distribution, s: SupportRestriction | None = None) -> EquivalenceClassReport:
    """Dimension of the set of distributions on ``s`` equivalent to ``mu``, plus witnesses.

    Witnesses are the far endpoints reached by moving from ``mu`` along each
    direction of the class (and its negative) as far as nonnegativity allows.
    """
    s = s or SupportRestriction.full(mu.n)
    _check_support(mu, s)
    geo = _geometry(mu, s)
    dirs = _directions(geo)
    dim = len(dirs)
    reachable = tuple(o for j, o in enumerate(geo.orders) if j not in geo.zero_forced)
    witnesses = None
    if dim:
        candidates = []
        if geo.lp_direction is not None:
            candidates.append(geo.lp_direction)
        for v in dirs:
            candidates.extend([v, [-x for x in v]])
        found: list[Distribution] = []
        for v in candidates:
            t = _max_step(geo.mu, v)
            if t > 0:
                nu = {o: mi + t * vi for o, mi, vi in zip(geo.orders, geo.mu, v)}
                d = Distribution.from_dict(mu.n, {o: w for o, w in nu.items() if w})
                if d != mu and d not in found:
                    found.append(d)
        if not found:
            raise ConsistencyError("positive class dimension but no feasible witness")
        for d in found:
            if not behaviorally_equivalent(d, mu):
                raise ConsistencyError("witness is not behaviorally equivalent")
        witnesses = tuple(found)
    return EquivalenceClassReport(mu, dim, is_extreme(mu, s), witnesses, reachable)


def is_extreme(mu: Distribution, s: SupportRestriction | None = None, crosscheck: bool | None = None) -> bool:
    """Whether ``mu`` is a vertex of its own equivalence class within ``s``.

    Decided by independence of the phi columns on the support of ``mu``.
    """
    s = s or SupportRestriction.full(mu.n)
    _check_support(mu, s)
    supp = mu.support()
    result = columns_independent(mu.n, supp)
    if _crosscheck(mu.n, crosscheck) and result != identified_by_ryser(mu.n, supp):
        raise ConsistencyError("column-rank and Ryser-subspace extremality tests disagree")
    return result


class Vertices(NamedTuple):
    points: list[Distribution]
    truncated: bool


MAX_VERTEX_SYSTEMS = 200_000


def enumerate_extreme_points(mu: Distribution, s: SupportRestriction | None = None, cap: int = 1000) -> Vertices:
    """All vertices of the class of ``mu`` inside ``s``, in lexicographic weight order.

    The class polytope has dimension ``d``; its vertices are exactly the
    feasible points where ``d`` independent nonnegativity constraints are
    tight, i.e. the points supported on ``reachable - Z`` for ``d``-subsets
    ``Z``.  Each such support is solved exactly and kept when feasible.
    """
    s = s or SupportRestriction.full(mu.n)
    _check_support(mu, s)
    geo = _geometry(mu, s)
    dirs = _directions(geo)
    d = len(dirs)
    if d == 0:
        return Vertices([mu], False)
    free = [j for j in range(len(geo.orders)) if j not in geo.zero_forced]
    systems = math.comb(len(free), d)
    if systems > MAX_VERTEX_SYSTEMS:
        raise ValueError(f"{systems} candidate supports; vertex search is capped at {MAX_VERTEX_SYSTEMS}")
    D = RationalMatrix.from_columns(dirs, len(geo.orders))
    found: dict[tuple, Distribution] = {}
    truncated = False
    for tight in itertools.combinations(free, d):
        sub = RationalMatrix([D.rows[j] for j in tight], ncols=d)
        if sub.rank() < d:
            continue
        c = sub.solve([-geo.mu[j] for j in tight])
        nu = [mi + x for mi, x in zip(geo.mu, D @ c)]
        if any(w < 0 for w in nu):
            continue
        key = tuple(nu)
        if key in found:
            continue
        if len(found) == cap:
            truncated = True
            break
        found[key] = Distribution.from_dict(mu.n, {o: w for o, w in zip(geo.orders, nu) if w})
    points = [found[k] for k in sorted(found, reverse=True)]
    for p in points:
        if not columns_independent(mu.n, p.support()) or not behaviorally_equivalent(p, mu):
            raise ConsistencyError("vertex search produced a non-extreme or inequivalent point")
    return Vertices(points, truncated)
