"""Brute-force reference implementations used as test oracles.

Nothing here imports the package's algorithms: every value is recomputed
from definitions with plain loops over permutations and subsets.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np


def orders(n):
    return list(itertools.permutations(range(n)))


def menus(n):
    out = []
    for size in range(1, n + 1):
        out.extend(frozenset(c) for c in itertools.combinations(range(n), size))
    return out


def best(order, menu):
    return next(x for x in order if x in menu)


def choice_prob(weights, x, menu):
    return sum((w for o, w in weights.items() if best(o, menu) == x), Fraction(0))


def contour_mass(weights, x, menu):
    """Mass of orders whose strict upper contour at ``x`` is ``menu - {x}``."""
    above = set(menu) - {x}
    return sum((w for o, w in weights.items() if set(o[: o.index(x)]) == above), Fraction(0))


def moebius(rho, n, x, menu):
    """``sum over B >= menu of (-1)^|B - menu| rho(x, B)``."""
    rest = [y for y in range(n) if y not in menu]
    total = Fraction(0)
    for r in range(len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            total += (-1) ** r * rho(x, frozenset(menu) | set(extra))
    return total


def separable(o1, o2, k):
    n = len(o1)
    return (
        2 <= k <= n - 2
        and set(o1[:k]) == set(o2[:k])
        and o1[:k] != o2[:k]
        and o1[k:] != o2[k:]
    )


def squares(n):
    """Distinct conjugate squares as ``(frozenset of four orders, k)``."""
    found = set()
    for o1, o2 in itertools.combinations(orders(n), 2):
        for k in range(2, n - 1):
            if separable(o1, o2, k):
                o3, o4 = o1[:k] + o2[k:], o2[:k] + o1[k:]
                found.add((frozenset({o1, o2, o3, o4}), k))
    return found


def phi_dense(n):
    """Dense 0/1 matrix, rows (x, menu) in an arbitrary fixed order."""
    rows = [(x, A) for A in menus(n) for x in sorted(A)]
    return np.array([[1.0 if best(o, A) == x else 0.0 for o in orders(n)] for x, A in rows])


def np_rank(vectors) -> int:
    vectors = [list(map(float, v)) for v in vectors]
    if not vectors:
        return 0
    return int(np.linalg.matrix_rank(np.array(vectors)))
