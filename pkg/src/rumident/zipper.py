"""Constructive equivalence witnesses: swap sequences between equivalent distributions.

The outer loop walks the target's support in lexicographic order.  For each
order ``o`` it reshapes the (residual) source measure until ``o`` carries at
least the target's mass, then removes that mass from both sides.  Reshaping
happens level by level: at level ``n`` the source mass on orders agreeing
with ``o`` on the first ``n`` places is merged, by cumulative weight, against
the mass of orders that rank ``o[n]`` directly below the same top-``n`` set;
every merged interval becomes one weighted swap of terminal segments.
"""

from __future__ import annotations

from fractions import Fraction

from .choice import Distribution, SignedMeasure, behaviorally_equivalent
from .errors import ConsistencyError, NotEquivalentError, SwapFeasibilityError
from .prefs import Order, make_conjugate_square, order_index
from .ryser import SwapSequence, SwapStep

ZERO = Fraction(0)


def zipper(source: Distribution, target: Distribution) -> SwapSequence:
    """Swap steps taking ``source`` to ``target`` exactly.

    Every intermediate measure is a distribution and every weight is a
    positive rational.  Identity swaps are never emitted.
    """
    if source.n != target.n:
        raise ValueError("distributions live on different universes")
    if not behaviorally_equivalent(source, target):
        raise NotEquivalentError("source and target induce different choice probabilities")
    n = source.n
    resid = {o: w for o, w in source.to_dict().items()}
    goal = {o: w for o, w in target.to_dict().items()}
    steps: list[SwapStep] = []
    prov: list[str] = []

    def transfer(oi: Order, oj: Order, k: int, w: Fraction, why: str):
        s = make_conjugate_square(oi, oj, k)
        new_i, new_j = oi[:k] + oj[k:], oj[:k] + oi[k:]
        for o in (oi, oj):
            left = resid[o] - w
            if left < 0:
                raise ConsistencyError("zipper schedule overdrew a preference")
            if left:
                resid[o] = left
            else:
                del resid[o]
        for o in (new_i, new_j):
            resid[o] = resid.get(o, ZERO) + w
        steps.append(SwapStep(s, w, s.pair_direction((oi, oj))))
        prov.append(why)

    for t_idx, o in enumerate(sorted(goal)):
        need = goal[o]
        for level in range(1, n):
            prefix = o[:level]
            x = o[level]
            top_set = set(prefix)
            agree = sorted(p for p in resid if p[:level] == prefix)
            contour = sorted(p for p in resid if p[level] == x and set(p[:level]) == top_set)
            both = set(agree) & set(contour)
            have = sum((resid[p] for p in both), ZERO)
            short = need - have
            if short <= 0:
                continue
            feeders = [p for p in agree if p not in both]
            partners = [p for p in contour if p not in both]
            why = f"target[{t_idx}] {o}: level {level}"
            _merge(feeders, partners, resid, short, lambda a, b, w: transfer(a, b, level, w, why))
        if resid.get(o, ZERO) < need:
            raise ConsistencyError(f"zipper failed to accumulate mass on {o}")
        resid[o] -= need
        if not resid[o]:
            del resid[o]

    if resid:
        raise ConsistencyError("residual source mass left after zippering")
    seq = SwapSequence(tuple(steps), tuple(prov), {"steps": len(steps), "targets": len(goal)})
    if apply_swaps(source, seq) != target:
        raise ConsistencyError("zipper output does not reproduce the target")
    return seq


def _merge(feeders, partners, resid, amount, emit):
    """Pair cumulative-mass intervals of the two lists, stopping after ``amount``.

    Masses are read once up front; each emitted transfer draws from exactly
    one feeder and one partner interval, so no order is overdrawn.
    """
    fa = [resid[p] for p in feeders]
    pa = [resid[p] for p in partners]
    i = j = 0
    moved = ZERO
    while moved < amount:
        if i == len(fa) or j == len(pa):
            raise ConsistencyError("not enough mass to merge; inputs cannot be equivalent")
        w = min(fa[i], pa[j], amount - moved)
        emit(feeders[i], partners[j], w)
        moved += w
        fa[i] -= w
        pa[j] -= w
        if not fa[i]:
            i += 1
        if not pa[j]:
            j += 1


def apply_swaps(m: SignedMeasure, seq: SwapSequence | list[SwapStep]) -> SignedMeasure:
    """``m`` plus each weighted swap in turn, refusing to leave the simplex.

    Raises :class:`SwapFeasibilityError` naming the first (1-based) step that
    would make a weight negative.
    """
    steps = seq.steps if isinstance(seq, SwapSequence) else tuple(seq)
    idx = order_index(m.n)
    w = list(m.weights)
    for t, step in enumerate(steps, 1):
        for o in step.source_pair:
            w[idx[o]] -= step.weight
            if w[idx[o]] < 0:
                raise SwapFeasibilityError(t, f"weight on {o} would become {w[idx[o]]}")
        for o in step.target_pair:
            w[idx[o]] += step.weight
    out = SignedMeasure(m.n, tuple(w))
    return Distribution.of(out) if out.is_distribution() else out
