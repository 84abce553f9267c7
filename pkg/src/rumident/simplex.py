"""Exact two-phase simplex over the rationals with Bland's rule.

The solver takes problems in the form

    minimise c.x  subject to  A_eq x = b_eq,  A_ub x <= b_ub,  x_j >= 0 (j not free)

and returns an optimal vertex as Fractions.  Bland's smallest-index rule
guarantees termination on degenerate problems, which are the norm here
(most choice-probability systems have many redundant rows).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list[Fraction] | None = None
    objective: Fraction | None = None
    pivots: int = 0


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], basis: list[int], ncols: int):
        self.rows = rows  # each row: ncols coefficients followed by the rhs
        self.basis = basis
        self.ncols = ncols
        self.pivots = 0

    def pivot(self, r: int, c: int, obj: list[Fraction]) -> None:
        row = self.rows[r]
        inv = 1 / row[c]
        if inv != 1:
            for j in range(len(row)):
                if row[j]:
                    row[j] *= inv
        nz = [j for j in range(len(row)) if row[j]]
        for i, other in enumerate(self.rows):
            f = other[c]
            if i != r and f:
                for j in nz:
                    other[j] -= f * row[j]
        f = obj[c]
        if f:
            for j in nz:
                obj[j] -= f * row[j]
        self.basis[r] = c
        self.pivots += 1

    def reduced_costs(self, cost: Sequence[Fraction]) -> list[Fraction]:
        """Objective row ``c_j - c_B B^-1 A_j`` with ``-c_B x_B`` in the last slot."""
        obj = [Fraction(x) for x in cost] + [ZERO]
        for r, b in enumerate(self.basis):
            cb = obj[b]
            if cb:
                for j, x in enumerate(self.rows[r]):
                    if x:
                        obj[j] -= cb * x
        return obj

    def optimise(self, obj: list[Fraction], allowed: int) -> str:
        """Minimise over columns ``< allowed``; returns "optimal" or "unbounded"."""
        while True:
            c = next((j for j in range(allowed) if obj[j] < 0), None)
            if c is None:
                return "optimal"
            best = None
            for i, row in enumerate(self.rows):
                a = row[c]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return "unbounded"
            self.pivot(best[1], c, obj)


def linprog(
    c: Sequence,
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    free: Sequence[int] = (),
) -> LPResult:
    """Minimise ``c.x``; see the module docstring for the constraint form."""
    nvar = len(c)
    free = sorted(set(free))
    # columns: original vars, negative parts of free vars, slacks, artificials
    neg_of = {j: nvar + t for t, j in enumerate(free)}
    nstruct = nvar + len(free)
    nslack = len(A_ub)
    nreal = nstruct + nslack

    def expand(row):
        out = [Fraction(x) for x in row]
        out.extend(-out[j] for j in free)
        return out

    rows = []
    for row, b in zip(A_eq, b_eq):
        rows.append((expand(row) + [ZERO] * nslack, Fraction(b)))
    for t, (row, b) in enumerate(zip(A_ub, b_ub)):
        slack = [ZERO] * nslack
        slack[t] = Fraction(1)
        rows.append((expand(row) + slack, Fraction(b)))

    m = len(rows)
    tab_rows = []
    basis = []
    art_cols = []
    for i, (coef, b) in enumerate(rows):
        if b < 0:
            coef = [-x for x in coef]
            b = -b
        art = [ZERO] * m
        # an inequality row with b >= 0 can start on its own slack
        if i >= len(A_eq) and coef[nstruct + i - len(A_eq)] == 1:
            tab_rows.append(coef + art + [b])
            basis.append(nstruct + i - len(A_eq))
        else:
            art[i] = Fraction(1)
            tab_rows.append(coef + art + [b])
            basis.append(nreal + i)
            art_cols.append(nreal + i)
    ncols = nreal + m
    tab = _Tableau(tab_rows, basis, ncols)

    if art_cols:
        phase1 = [ZERO] * ncols
        for j in art_cols:
            phase1[j] = Fraction(1)
        obj = tab.reduced_costs(phase1)
        tab.optimise(obj, ncols)
        if -obj[-1] != 0:
            return LPResult("infeasible", pivots=tab.pivots)
        _drive_out_artificials(tab, nreal)

    cost = [Fraction(x) for x in c] + [-Fraction(c[j]) for j in free] + [ZERO] * (ncols - nstruct)
    obj = tab.reduced_costs(cost)
    status = tab.optimise(obj, nreal)
    if status == "unbounded":
        return LPResult("unbounded", pivots=tab.pivots)
    z = [ZERO] * ncols
    for r, b in enumerate(tab.basis):
        z[b] = tab.rows[r][-1]
    x = z[:nvar]
    for j in free:
        x[j] -= z[neg_of[j]]
    value = sum((Fraction(ci) * xi for ci, xi in zip(c, x)), ZERO)
    return LPResult("optimal", x, value, tab.pivots)


def _drive_out_artificials(tab: _Tableau, nreal: int) -> None:
    """Pivot zero-level artificials out of the basis; drop redundant rows."""
    dummy = [ZERO] * (tab.ncols + 1)
    r = 0
    while r < len(tab.rows):
        if tab.basis[r] >= nreal:
            row = tab.rows[r]
            c = next((j for j in range(nreal) if row[j]), None)
            if c is None:
                del tab.rows[r]
                del tab.basis[r]
                continue
            tab.pivot(r, c, dummy)
        r += 1
    for row in tab.rows:
        for j in range(nreal, tab.ncols):
            row[j] = ZERO


def feasible_point(A_eq: Sequence[Sequence], b_eq: Sequence) -> list[Fraction] | None:
    """A vertex of ``{x >= 0 : A_eq x = b_eq}``, or ``None`` if empty."""
    ncols = len(A_eq[0]) if A_eq else 0
    res = linprog([0] * ncols, A_eq, b_eq)
    return res.x if res.status == "optimal" else None
