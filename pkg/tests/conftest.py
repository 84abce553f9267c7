from __future__ import annotations

import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import settings

from rumident.choice import Distribution
from rumident.prefs import Universe, enumerate_conjugate_squares, enumerate_orders
from rumident.ryser import SwapStep

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

FISHBURN = ("abcd", "badc", "abdc", "bacd")
SIX = ("abcdef", "baefcd", "cdbafe", "abefcd", "bacdfe", "cdbaef")


def parse(labels: str, *names: str):
    u = Universe.of(labels)
    return [u.parse_order(x) for x in names]


@pytest.fixture
def fishburn():
    o = parse("abcd", *FISHBURN)
    return {
        "orders": o,
        "mu12": Distribution.uniform(4, o[:2]),
        "mu34": Distribution.uniform(4, o[2:]),
    }


@pytest.fixture
def six():
    o = parse("abcdef", *SIX)
    return {
        "orders": o,
        "mu123": Distribution.uniform(6, o[:3]),
        "mu456": Distribution.uniform(6, o[3:]),
    }


def random_distribution(rng: random.Random, n: int, size: int | None = None, denom: int = 12) -> Distribution:
    orders = enumerate_orders(n)
    size = size or rng.randint(1, min(len(orders), 8))
    support = rng.sample(orders, size)
    raw = [rng.randint(1, denom) for _ in support]
    total = sum(raw)
    return Distribution.from_dict(n, {o: Fraction(r, total) for o, r in zip(support, raw)})


def random_swap_walk(rng: random.Random, mu: Distribution, steps: int) -> tuple[Distribution, list[SwapStep]]:
    """Apply ``steps`` random feasible weighted swaps; returns the endpoint and the steps."""
    squares = enumerate_conjugate_squares(mu.n)
    cur = dict(mu.to_dict())
    applied = []
    for _ in range(steps):
        live = [
            (s, d)
            for s in squares
            for d, pair in (("forward", s.top), ("backward", s.swapped))
            if all(cur.get(o, 0) > 0 for o in pair)
        ]
        if not live:
            break
        s, d = rng.choice(live)
        step = SwapStep(s, Fraction(1), d)
        cap = min(cur[o] for o in step.source_pair)
        w = cap * Fraction(rng.randint(1, 4), 4)
        step = SwapStep(s, w, d)
        for o in step.source_pair:
            cur[o] -= w
        for o in step.target_pair:
            cur[o] = cur.get(o, 0) + w
        applied.append(step)
    return Distribution.from_dict(mu.n, {o: w for o, w in cur.items() if w}), applied


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
