import itertools
import random
from fractions import Fraction

import numpy as np
import oracles
import pytest
from conftest import parse, random_distribution
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from rumident.choice import Distribution, behaviorally_equivalent
from rumident.errors import SupportError
from rumident.ident import (
    SupportRestriction,
    enumerate_extreme_points,
    equivalence_class,
    has_separable_pair,
    is_extreme,
    is_identified_support,
    point_identified_unrestricted,
    separable_pairs,
)
from rumident.prefs import enumerate_orders


def phi_cols(n, S):
    all_orders = oracles.orders(n)
    return oracles.phi_dense(n)[:, [all_orders.index(o) for o in S]]


def class_dim_oracle(mu, S):
    """Dimension of {nu >= 0 on S : phi(nu) = phi(mu)} via one LP per coordinate."""
    n = mu.n
    S = sorted(S)
    A = phi_cols(n, S)
    b = A @ np.array([float(mu.to_dict().get(o, 0)) for o in S])
    live = []
    for j in range(len(S)):
        c = np.zeros(len(S))
        c[j] = -1
        res = linprog(c, A_eq=A, b_eq=b, bounds=[(0, None)] * len(S), method="highs")
        if res.status == 0 and -res.fun > 1e-9:
            live.append(j)
    return len(live) - (int(np.linalg.matrix_rank(A[:, live])) if live else 0)


def vertices_oracle(mu, S):
    """Basic feasible solutions found by trying every independent column subset."""
    n = mu.n
    S = sorted(S)
    A = phi_cols(n, S)
    b = A @ np.array([float(mu.to_dict().get(o, 0)) for o in S])
    found = set()
    for r in range(1, len(S) + 1):
        for T in itertools.combinations(range(len(S)), r):
            sub = A[:, T]
            if np.linalg.matrix_rank(sub) < r:
                continue
            x, *_ = np.linalg.lstsq(sub, b, rcond=None)
            if np.allclose(sub @ x, b, atol=1e-9) and np.all(x > 1e-9):
                found.add(tuple(sorted((S[t], round(float(v), 9)) for t, v in zip(T, x))))
    return found


def as_key(d):
    return tuple(sorted((o, round(float(w), 9)) for o, w in d.to_dict().items()))


class TestSupportRestriction:
    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            SupportRestriction.of([])

    def test_foreign_order_rejected(self):
        with pytest.raises(ValueError):
            SupportRestriction(3, frozenset({(0, 1, 5)}))

    def test_full(self):
        assert len(SupportRestriction.full(4)) == 24


class TestIdentifiedSupport:
    def test_fishburn_not_identified(self, fishburn):
        s = SupportRestriction.of(fishburn["orders"])
        assert not is_identified_support(s)
        assert has_separable_pair(s)

    def test_same_top_pair_identified(self):
        s = SupportRestriction.of(parse("abcd", "abcd", "abdc"))
        assert is_identified_support(s)
        assert not has_separable_pair(s)

    def test_six_orders_not_identified_without_square(self, six):
        s = SupportRestriction.of(six["orders"])
        assert not is_identified_support(s)
        assert not has_separable_pair(s)
        assert separable_pairs(six["orders"])

    def test_full_not_identified(self):
        assert not is_identified_support(SupportRestriction.full(4))
        assert is_identified_support(SupportRestriction.full(3))

    @pytest.mark.parametrize("seed", range(30))
    def test_matches_numpy_rank(self, seed):
        rng = random.Random(seed)
        n = rng.choice([4, 5])
        S = rng.sample(enumerate_orders(n), rng.randint(1, 12))
        want = int(np.linalg.matrix_rank(phi_cols(n, sorted(S)))) == len(S)
        assert is_identified_support(SupportRestriction.of(S)) == want

    @pytest.mark.parametrize("seed", range(10))
    def test_square_implies_not_identified(self, seed):
        rng = random.Random(seed)
        S = set(rng.sample(enumerate_orders(5), rng.randint(1, 10)))
        s = SupportRestriction.of(S)
        if has_separable_pair(s):
            assert not is_identified_support(s)

    def test_crosscheck_flag_off(self, fishburn):
        assert not is_identified_support(SupportRestriction.of(fishburn["orders"]), crosscheck=False)


class TestPointIdentification:
    def test_fishburn_pair(self, fishburn):
        assert not point_identified_unrestricted(fishburn["mu12"])

    def test_six_first_three(self, six):
        assert not point_identified_unrestricted(six["mu123"])

    def test_point_mass(self):
        assert point_identified_unrestricted(Distribution.point_mass((0, 1, 2, 3)))

    @pytest.mark.parametrize("n", [4, 5])
    def test_matches_class_dim(self, n):
        rng = random.Random(n)
        for _ in range(20):
            mu = random_distribution(rng, n, size=rng.randint(1, 4))
            rep = equivalence_class(mu)
            assert point_identified_unrestricted(mu) == (rep.class_dim == 0)


class TestEquivalenceClass:
    def test_fishburn(self, fishburn):
        rep = equivalence_class(fishburn["mu12"])
        assert rep.class_dim == 1 and rep.extreme
        assert rep.witnesses == (fishburn["mu34"],)
        assert rep.to_json(str)["identified"] is False

    def test_fishburn_restricted(self, fishburn):
        s = SupportRestriction.of(fishburn["orders"])
        rep = equivalence_class(fishburn["mu12"], s)
        assert rep.class_dim == 1 and rep.witnesses == (fishburn["mu34"],)

    def test_uniform_on_square_not_extreme(self, fishburn):
        mu = Distribution.uniform(4, fishburn["orders"])
        assert not is_extreme(mu)
        rep = equivalence_class(mu)
        assert set(rep.witnesses) == {fishburn["mu12"], fishburn["mu34"]}

    def test_six(self, six):
        s = SupportRestriction.of(six["orders"])
        mu = Distribution.uniform(6, six["orders"])
        rep = equivalence_class(mu, s)
        assert rep.class_dim == 1
        assert set(rep.witnesses) == {six["mu123"], six["mu456"]}

    def test_identified(self):
        rep = equivalence_class(Distribution.point_mass((0, 1, 2, 3)))
        assert rep.class_dim == 0 and rep.witnesses is None

    def test_outside_support(self, fishburn):
        with pytest.raises(SupportError):
            equivalence_class(fishburn["mu12"], SupportRestriction.of(fishburn["orders"][2:]))
        with pytest.raises(SupportError):
            is_extreme(fishburn["mu12"], SupportRestriction.of(fishburn["orders"][2:]))

    @pytest.mark.parametrize("seed", range(25))
    def test_dim_matches_lp_oracle(self, seed):
        rng = random.Random(seed)
        mu = random_distribution(rng, 4, size=rng.randint(1, 5))
        extra = rng.sample(enumerate_orders(4), rng.randint(0, 6))
        S = set(mu.support()) | set(extra)
        rep = equivalence_class(mu, SupportRestriction.of(S))
        assert rep.class_dim == class_dim_oracle(mu, S)
        assert (rep.class_dim == 0) == (rep.witnesses is None)
        for w in rep.witnesses or ():
            assert behaviorally_equivalent(w, mu) and set(w.support()) <= S

    @settings(max_examples=30)
    @given(st.lists(st.integers(0, 23), min_size=1, max_size=6, unique=True))
    def test_support_identified_iff_every_class_trivial(self, idx):
        orders = enumerate_orders(4)
        S = [orders[i] for i in idx]
        mu = Distribution.uniform(4, S)
        s = SupportRestriction.of(S)
        # the uniform measure is interior, so its class dimension is the kernel dimension
        assert is_identified_support(s) == (equivalence_class(mu, s).class_dim == 0)


class TestVertices:
    def test_fishburn(self, fishburn):
        v = enumerate_extreme_points(fishburn["mu12"])
        assert set(v.points) == {fishburn["mu12"], fishburn["mu34"]} and not v.truncated

    def test_identified_returns_self(self):
        mu = Distribution.point_mass((0, 1, 2, 3))
        assert enumerate_extreme_points(mu).points == [mu]

    def test_cap(self, fishburn):
        v = enumerate_extreme_points(Distribution.uniform(4, fishburn["orders"]), cap=1)
        assert len(v.points) == 1 and v.truncated

    def test_sorted(self, six):
        s = SupportRestriction.of(six["orders"])
        pts = enumerate_extreme_points(Distribution.uniform(6, six["orders"]), s).points
        assert set(pts) == {six["mu123"], six["mu456"]}
        keys = [p.weights for p in pts]
        assert keys == sorted(keys, reverse=True)

    @pytest.mark.parametrize("seed", range(15))
    def test_matches_brute_force(self, seed):
        rng = random.Random(1000 + seed)
        mu = random_distribution(rng, 4, size=rng.randint(2, 5), denom=6)
        S = set(mu.support()) | set(rng.sample(enumerate_orders(4), rng.randint(0, 4)))
        v = enumerate_extreme_points(mu, SupportRestriction.of(S))
        assert {as_key(p) for p in v.points} == vertices_oracle(mu, S)
        assert all(is_extreme(p) for p in v.points)
        assert all(isinstance(w, Fraction) for p in v.points for w in p.weights)
