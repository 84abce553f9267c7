"""Alternatives, linear orders, segments and conjugate squares.

Alternatives are integers ``0..n-1``; labels only matter at the I/O boundary.
A linear order is a tuple holding a permutation of the alternatives, best
first.  All enumerations are lexicographic in that tuple, and the position of
an order in :func:`enumerate_orders` is the coordinate used by every dense
vector in the package.
"""

from __future__ import annotations

import itertools
import math
import os
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Literal, Sequence

from .errors import NotSeparableError, SegmentError, UniverseCapError

Order = tuple[int, ...]

HARD_CAP = 8
WARN_AT = 7


class ScaleWarning(UserWarning):
    """Emitted when a computation is requested at an expensive universe size."""


def universe_cap() -> int:
    """Universe-size cap, overridable through ``RUMIDENT_CAP``."""
    raw = os.environ.get("RUMIDENT_CAP")
    if raw is None:
        return HARD_CAP
    cap = int(raw)
    if cap != HARD_CAP:
        warnings.warn(
            f"RUMIDENT_CAP={cap} overrides the default cap {HARD_CAP}: unsupported scale",
            ScaleWarning,
            stacklevel=2,
        )
    return cap


def check_size(n: int) -> None:
    if n < 1:
        raise ValueError("a universe needs at least one alternative")
    cap = universe_cap()
    if n > cap:
        raise UniverseCapError(f"universe of size {n} exceeds the cap of {cap}")
    if n >= WARN_AT:
        warnings.warn(
            f"n={n}: {math.factorial(n)} orders; exact computations will be slow",
            ScaleWarning,
            stacklevel=3,
        )


@dataclass(frozen=True)
class Universe:
    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        object.__setattr__(self, "labels", labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels in {labels!r}")
        check_size(len(labels))

    @classmethod
    def of(cls, spec: str | Sequence[str] | int) -> Universe:
        """Build from ``"abcd"``, ``"a,b,c"``, a list of labels, or a size."""
        if isinstance(spec, int):
            return cls(tuple("abcdefghijklmnopqrstuvwxyz"[:spec]))
        if isinstance(spec, str):
            spec = spec.split(",") if "," in spec else list(spec)
        return cls(tuple(spec))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def single_char(self) -> bool:
        return all(len(x) == 1 for x in self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"unknown alternative {label!r}") from None

    def format_order(self, order: Order) -> str | list[str]:
        names = [self.labels[i] for i in order]
        return "".join(names) if self.single_char else names

    def order_str(self, order: Order) -> str:
        names = [self.labels[i] for i in order]
        return "".join(names) if self.single_char else ",".join(names)

    def parse_order(self, text: str | Sequence[str]) -> Order:
        if isinstance(text, str):
            if self.single_char and "," not in text:
                names = list(text)
            else:
                names = text.split(",")
        else:
            names = list(text)
        order = tuple(self.index(x) for x in names)
        check_order(order, self.n)
        return order

    def format_menu(self, menu: Iterable[int]) -> list[str]:
        return [self.labels[i] for i in sorted(menu)]

    def parse_menu(self, names: Iterable[str]) -> frozenset[int]:
        menu = frozenset(self.index(x) for x in names)
        if not menu:
            raise ValueError("menus must be nonempty")
        return menu

    def to_json(self) -> dict:
        return {"labels": list(self.labels)}

    @classmethod
    def from_json(cls, data: dict) -> Universe:
        return cls(tuple(data["labels"]))


def check_order(order: Sequence[int], n: int) -> None:
    if sorted(order) != list(range(n)):
        raise ValueError(f"{tuple(order)!r} is not a permutation of 0..{n - 1}")


@lru_cache(maxsize=None)
def _orders(n: int) -> tuple[Order, ...]:
    return tuple(itertools.permutations(range(n)))


def enumerate_orders(u: Universe | int) -> tuple[Order, ...]:
    """All ``n!`` orders in lexicographic order."""
    n = u if isinstance(u, int) else u.n
    if isinstance(u, int):
        check_size(n)
    return _orders(n)


@lru_cache(maxsize=None)
def order_index(n: int) -> dict[Order, int]:
    return {o: i for i, o in enumerate(_orders(n))}


@dataclass(frozen=True)
class Segment:
    items: tuple[int, ...]
    kind: Literal["initial", "terminal"]
    k: int


def _check_level(order: Order, k: int, lo: int) -> None:
    if not lo <= k <= len(order):
        raise ValueError(f"level {k} outside [{lo}, {len(order)}]")


def initial_segment(order: Order, k: int) -> Segment:
    """The ``k`` best alternatives, best first."""
    _check_level(order, k, 1)
    return Segment(tuple(order[:k]), "initial", k)


def terminal_segment(order: Order, k: int) -> Segment:
    """The ``n - k`` worst alternatives, in order."""
    _check_level(order, k, 1)
    return Segment(tuple(order[k:]), "terminal", k)


def concatenate(up: Segment, down: Segment) -> Order:
    if up.kind != "initial" or down.kind != "terminal":
        raise SegmentError("need an initial segment followed by a terminal segment")
    if up.k != down.k:
        raise SegmentError(f"levels differ ({up.k} vs {down.k})")
    order = up.items + down.items
    if sorted(order) != list(range(len(order))) or len(set(order)) != len(order):
        raise SegmentError("segments overlap or do not exhaust the universe")
    if len(up.items) != up.k:
        raise SegmentError("initial segment length does not match its level")
    return order


def separable_levels(o1: Order, o2: Order) -> frozenset[int]:
    """Levels ``2 <= k <= n-2`` at which the two orders form a separable pair.

    At such ``k`` the top-``k`` sets coincide while both the top orderings and
    the bottom orderings differ.
    """
    n = len(o1)
    levels = set()
    for k in range(2, n - 1):
        if o1[:k] != o2[:k] and o1[k:] != o2[k:] and set(o1[:k]) == set(o2[:k]):
            levels.add(k)
    return frozenset(levels)


@dataclass(frozen=True)
class ConjugateSquare:
    """Four orders built from two top and two bottom segments at level ``k``.

    Stored canonically: ``top[0]`` is the smallest of the four orders, and
    ``swapped = (top[0][:k] + top[1][k:], top[1][:k] + top[0][k:])``.
    """

    top: tuple[Order, Order]
    swapped: tuple[Order, Order]
    k: int

    @property
    def orders(self) -> tuple[Order, Order, Order, Order]:
        return self.top + self.swapped

    def pair_direction(self, pair: Iterable[Order]) -> str:
        """``forward`` if mass leaves ``pair`` under +R, ``backward`` otherwise."""
        pair = set(pair)
        if pair == set(self.top):
            return "forward"
        if pair == set(self.swapped):
            return "backward"
        raise ValueError("pair is not one of the square's diagonals")


def _swap_tops(o1: Order, o2: Order, k: int) -> tuple[Order, Order]:
    return o1[:k] + o2[k:], o2[:k] + o1[k:]


def make_conjugate_square(o1: Order, o2: Order, k: int) -> ConjugateSquare:
    if k not in separable_levels(o1, o2):
        raise NotSeparableError(f"orders are not a separable pair at level {k}")
    o3, o4 = _swap_tops(o1, o2, k)
    first = min(o1, o2, o3, o4)
    partner = {o1: o2, o2: o1, o3: o4, o4: o3}[first]
    return ConjugateSquare((first, partner), _swap_tops(first, partner, k), k)


@lru_cache(maxsize=None)
def _squares(n: int) -> tuple[ConjugateSquare, ...]:
    out = []
    for k in range(2, n - 1):
        for top_set in itertools.combinations(range(n), k):
            rest = [x for x in range(n) if x not in top_set]
            tops = list(itertools.permutations(top_set))
            bottoms = list(itertools.permutations(rest))
            for t1, t2 in itertools.combinations(tops, 2):
                for b1, b2 in itertools.combinations(bottoms, 2):
                    out.append(make_conjugate_square(t1 + b1, t2 + b2, k))
    out.sort(key=lambda s: (s.k, s.top, s.swapped))
    return tuple(out)


def enumerate_conjugate_squares(u: Universe | int) -> tuple[ConjugateSquare, ...]:
    """Every canonical conjugate square once, sorted by ``(k, top, swapped)``."""
    n = u if isinstance(u, int) else u.n
    if isinstance(u, int):
        check_size(n)
    return _squares(n)


def upper_contour(order: Order, x: int) -> frozenset[int]:
    """Alternatives ranked strictly above ``x``."""
    return frozenset(order[: order.index(x)])


def upper_contour_orders(x: int, menu: Iterable[int], n: int) -> frozenset[Order]:
    """Orders whose strict upper contour set at ``x`` is exactly ``menu - {x}``."""
    menu = frozenset(menu)
    if x not in menu:
        raise ValueError(f"alternative {x} is not in the menu")
    above = menu - {x}
    return frozenset(o for o in _orders(n) if upper_contour(o, x) == above)
