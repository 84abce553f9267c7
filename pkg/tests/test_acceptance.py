"""Acceptance gate: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py`` (the lines appear in the
terminal summary) or directly as ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import random
import sys
import time
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import FISHBURN, SIX, parse, random_distribution, random_swap_walk  # noqa: E402

from rumident.choice import (  # noqa: E402
    Distribution,
    MenuTable,
    RandomChoiceRule,
    moebius_inverse,
    phi,
    phi_columns,
    rationalize,
    rows,
)
from rumident.graphs import build_pipeline, check_flow, find_swap_cycles, polytope_graph, segment_graph_squares  # noqa: E402
from rumident.ident import (  # noqa: E402
    SupportRestriction,
    columns_independent,
    enumerate_extreme_points,
    equivalence_class,
    has_separable_pair,
    identified_by_ryser,
    is_identified_support,
)
from rumident.linalg import Echelon, same_span  # noqa: E402
from rumident.parametric import (  # noqa: E402
    box_grid,
    convergence_ratio,
    exact_mixture_rank,
    logit_model,
    mixture_model,
    scan_identification,
    simplex_grid,
)
from rumident.prefs import enumerate_conjugate_squares, enumerate_orders, order_index  # noqa: E402
from rumident.ryser import complement_rows, nullspace_phi, orthocomplement_basis, ryser_basis  # noqa: E402
from rumident.zipper import apply_swaps, zipper  # noqa: E402

RESULTS: list[str] = []


def report(number: int, name: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {name}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


# Distributions gathered by suites 1-7, reused by the flow criterion.


def fishburn_dists():
    o = parse("abcd", *FISHBURN)
    return [Distribution.uniform(4, o[:2]), Distribution.uniform(4, o[2:]), Distribution.uniform(4, o)]


def six_dists():
    o = parse("abcdef", *SIX)
    return [Distribution.uniform(6, o[:3]), Distribution.uniform(6, o[3:]), Distribution.uniform(6, o)]


@lru_cache(maxsize=None)
def extreme_suite() -> tuple[Distribution, ...]:
    rng = random.Random(5)
    out = []
    for i in range(1050):
        n = (3, 4, 5)[i % 3]
        mu = random_distribution(rng, n, size=rng.randint(1, 6))
        if i % 2:
            mu, _ = random_swap_walk(rng, mu, rng.randint(1, 3))
        out.append(mu)
    return tuple(out)


@lru_cache(maxsize=None)
def zipper_suite() -> tuple[tuple[Distribution, Distribution], ...]:
    rng = random.Random(6)
    out = []
    for i in range(1050):
        n = (4, 5, 4, 5, 6)[i % 5]
        mu = random_distribution(rng, n, size=rng.randint(1, 6))
        nu, _ = random_swap_walk(rng, mu, rng.randint(1, 6))
        out.append((mu, nu))
    return tuple(out)


@lru_cache(maxsize=None)
def rationalize_suite() -> tuple[Distribution, ...]:
    rng = random.Random(7)
    sizes = [(3, 300), (4, 400), (5, 400)]
    return tuple(random_distribution(rng, n) for n, count in sizes for _ in range(count))


def bm_negative_rule(rng: random.Random, mu: Distribution) -> RandomChoiceRule:
    """Perturb ``phi(mu)`` on one menu ``X - {z}`` so that some ``q(x, X - {z})`` < 0.

    ``q(x, X - {z}) = rho(x, X - {z}) - rho(x, X)``; setting ``rho(x, X - {z})``
    to half of ``rho(x, X)`` makes it negative while the menu still sums to one.
    """
    n = mu.n
    r = phi(mu)
    table = dict(zip(rows(n), r.values))
    full = frozenset(range(n))
    options = [
        (x, full - {z}) for z in range(n) for x in sorted(full - {z})
        if table[(x, full)] > 0 and table[(x, full - {z})] > table[(x, full)] / 2
    ]
    x, A = rng.choice(options)
    y = rng.choice(sorted(A - {x}))
    delta = table[(x, A)] - table[(x, full)] / 2
    table[(x, A)] -= delta
    table[(y, A)] += delta
    return RandomChoiceRule.of(MenuTable.from_dict(n, table))


def test_c01_fishburn():
    t = time.perf_counter()
    o = parse("abcd", *FISHBURN)
    m12, m34 = Distribution.uniform(4, o[:2]), Distribution.uniform(4, o[2:])
    S = SupportRestriction.of(o)
    rep = equivalence_class(m12, S)
    verts = set(enumerate_extreme_points(m12, S).points)
    seq = zipper(m12, m34)
    canonical = enumerate_conjugate_squares(4)
    ok = (
        phi(m12) == phi(m34)
        and rep.class_dim == 1
        and verts == {m12, m34}
        and len(seq) == 1
        and seq.steps[0].weight == Fraction(1, 2)
        and seq.steps[0].square in canonical
        and set(seq.steps[0].square.top) == set(o[:2])
    )
    dt = time.perf_counter() - t
    report(1, "Fishburn reproduction", ok and dt < 1, f"class_dim={rep.class_dim}, {len(verts)} vertices, {len(seq)} step of weight {seq.steps[0].weight}, {dt:.3f}s")


def test_c02_six_orders():
    t = time.perf_counter()
    o = parse("abcdef", *SIX)
    m123, m456 = Distribution.uniform(6, o[:3]), Distribution.uniform(6, o[3:])
    S = SupportRestriction.of(o)
    sep, idf = has_separable_pair(S), is_identified_support(S)
    back = apply_swaps(m123, zipper(m123, m456))
    dt = time.perf_counter() - t
    ok = phi(m123) == phi(m456) and not sep and not idf and back == m456
    report(2, "six-order reproduction", ok and dt < 1, f"has_separable_pair={sep}, identified={idf}, round trip exact={back == m456}, {dt:.3f}s")


def test_c03_span_equality():
    t = time.perf_counter()
    details = []
    ok = True
    for n in (4, 5):
        N = len(enumerate_orders(n))
        a = [v.weights for v in ryser_basis(n).vectors]
        b = [v.weights for v in nullspace_phi(n)]
        equal = same_span(a, b, N)
        ok &= equal
        details.append(f"n={n} dim {len(a)}/{len(b)} equal={equal}")
    dt = time.perf_counter() - t
    report(3, "Ryser span equals ker phi", ok and dt < 120, ", ".join(details) + f", {dt:.2f}s")


def _dfs_agreement(n: int, max_size: int) -> tuple[int, int]:
    """Visit every support of size <= max_size, extending both echelon forms incrementally."""
    orders = enumerate_orders(n)
    idx = order_index(n)
    cols = phi_columns(n, orders)
    comp = complement_rows(n)
    col_ech = Echelon(len(rows(n)))
    ryser_ech = Echelon(len(orthocomplement_basis(n)))
    counts = [0, 0]

    def visit(start, depth, col_dep, ryser_dep):
        for j in range(start, len(orders)):
            c_added = False if col_dep else col_ech.add(cols[j])
            r_added = False if ryser_dep else ryser_ech.add(comp[idx[orders[j]]])
            cd, rd = col_dep or not c_added, ryser_dep or not r_added
            counts[0] += 1
            counts[1] += cd != rd
            if depth + 1 < max_size:
                visit(j + 1, depth + 1, cd, rd)
            if c_added:
                col_ech.pop()
            if r_added:
                ryser_ech.pop()

    visit(0, 0, False, False)
    return counts[0], counts[1]


def test_c04_support_conditions():
    t = time.perf_counter()
    checked, bad = _dfs_agreement(4, 6)
    rng = random.Random(4)
    orders5 = enumerate_orders(5)
    bad5 = 0
    for _ in range(500):
        S = rng.sample(orders5, rng.randint(1, 20))
        bad5 += columns_independent(5, S) != identified_by_ryser(5, S)
    dt = time.perf_counter() - t
    ok = checked == sum(len(list(itertools.combinations(range(24), k))) for k in range(1, 7)) and bad == 0 and bad5 == 0
    report(4, "column rank vs Ryser intersection", ok,
           f"n=4 exhaustive {checked} supports, {bad} disagreements; n=5 500 random, {bad5} disagreements, {dt:.1f}s")


def test_c05_extreme_points():
    t = time.perf_counter()
    suite = extreme_suite()
    disagreements = not_singleton = extreme = 0
    for mu in suite:
        supp = mu.support()
        by_cols = columns_independent(mu.n, supp)
        disagreements += by_cols != identified_by_ryser(mu.n, supp)
        dim = equivalence_class(mu, SupportRestriction.of(supp)).class_dim
        if by_cols:
            extreme += 1
            not_singleton += dim != 0
        else:
            disagreements += dim == 0
    dt = time.perf_counter() - t
    ok = len(suite) >= 1000 and disagreements == 0 and not_singleton == 0 and 0 < extreme < len(suite)
    report(5, "extreme points", ok,
           f"{len(suite)} distributions ({extreme} extreme), {disagreements} disagreements, {not_singleton} non-singleton classes, {dt:.1f}s")


def test_c06_zipper_round_trip():
    t = time.perf_counter()
    failures = 0
    for mu, nu in zipper_suite():
        cur = mu
        seq = zipper(mu, nu)
        for step in seq:
            cur = apply_swaps(cur, [step])
            if not isinstance(cur, Distribution):
                failures += 1
                break
        failures += apply_swaps(mu, seq) != nu
    dt = time.perf_counter() - t
    n = len(zipper_suite())
    report(6, "zipper round trip", n >= 1000 and failures == 0, f"{n} pairs, {failures} failures, {dt:.1f}s")


def test_c07_rationalizability():
    t = time.perf_counter()
    suite = rationalize_suite()
    misses = sum(1 for mu in suite if (nu := rationalize(phi(mu))) is None or phi(nu) != phi(mu))
    rng = random.Random(8)
    rejected = built = 0
    for mu in suite[:150]:
        r = bm_negative_rule(rng, mu)
        built += 1
        rejected += bool(moebius_inverse(r).negative_cells()) and rationalize(r) is None
    dt = time.perf_counter() - t
    ok = len(suite) >= 1000 and misses == 0 and built >= 100 and rejected == built
    report(7, "rationalizability", ok, f"{len(suite)} rules rationalized with {misses} misses; {rejected}/{built} BM-negative rules rejected, {dt:.1f}s")


def test_c08_parametric():
    t = time.perf_counter()
    parts = []
    ok = True
    for n in (3, 4):
        rep = scan_identification(logit_model(n), box_grid(n - 1, -2, 2, 11), tol=1e-8)
        ok &= rep.all_full_rank and len(rep.reports) == 11 ** (n - 1)
        parts.append(f"logit n={n}: {len(rep.reports)} points, min rank {rep.min_rank}")
    o = parse("abcd", *FISHBURN)
    comps = [Distribution.uniform(4, o[:2]), Distribution.uniform(4, o[2:])]
    mix = scan_identification(mixture_model(comps), simplex_grid(2, 11), tol=1e-8)
    exact = exact_mixture_rank(comps)
    deficient = all(r.rank < 1 for r in mix.reports)
    ok &= deficient and exact == 0 and all(r.rank == exact for r in mix.reports)
    parts.append(f"mixture: {len(mix.reports)} points all deficient={deficient}, exact rank {exact}")
    ratios = [convergence_ratio(logit_model(4), np.array(th)) for th in ([0.0, 0.0, 0.0], [1.0, -0.5, 0.3], [-1.5, 2.0, 0.7])]
    ok &= all(3.5 <= r <= 4.5 for r in ratios)
    parts.append("ratios " + ", ".join(f"{r:.3f}" for r in ratios))
    report(8, "parametric identification", ok, "; ".join(parts) + f", {time.perf_counter() - t:.1f}s")


def test_c09_observation():
    t = time.perf_counter()
    parts = []
    ok = True
    for n in (4, 5):
        p = build_pipeline(n)
        cond = {frozenset(e) for e in p["condensation"].edges()}
        poly = {frozenset(e) for e in polytope_graph(n).edges()}
        squares = set(enumerate_conjugate_squares(n))
        cycles = find_swap_cycles(p["multigraph"])
        four = segment_graph_squares(p["conjugate"])
        good = cond == poly and set(cycles) == squares == set(four) and len(cycles) == len(squares)
        ok &= good
        parts.append(f"n={n}: {len(poly)} edges equal={cond == poly}, {len(cycles)} cycles for {len(squares)} squares")
    dt = time.perf_counter() - t
    report(9, "condensation equals polytope graph", ok and dt < 300, "; ".join(parts) + f", {dt:.2f}s")


def test_c10_flows():
    t = time.perf_counter()
    dists = fishburn_dists() + six_dists() + list(extreme_suite()) + list(rationalize_suite())
    dists += [d for pair in zipper_suite() for d in pair]
    bad = sum(1 for mu in dists if not check_flow(mu)[1])
    report(10, "flow feasibility", bad == 0, f"{len(dists)} distributions, {bad} infeasible, {time.perf_counter() - t:.1f}s")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
