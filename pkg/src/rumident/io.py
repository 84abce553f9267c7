"""JSON formats for universes, measures, choice rules and swap sequences.

Rationals are written as ``"p/q"`` strings (integers as ``"p"``).  Orders
are label strings such as ``"abdc"`` when every label is one character,
and label arrays otherwise.  A file may carry its universe under
``"labels"``; when it does not, the universe is taken from the caller or
inferred from the first order.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .choice import Distribution, MenuTable, RandomChoiceRule, SignedMeasure, menus
from .errors import ChoiceRuleError
from .prefs import ConjugateSquare, Universe, make_conjugate_square
from .ryser import SwapSequence, SwapStep


def rational(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(val) -> Fraction:
    if isinstance(val, float):
        raise ValueError(f"floating-point weight {val!r}; write rationals as \"p/q\" strings")
    return Fraction(val)


def infer_universe(data: dict, u: Universe | None = None) -> Universe:
    if "labels" in data:
        found = Universe.from_json(data)
        if u is not None and found != u:
            raise ValueError(f"file universe {found.labels} differs from {u.labels}")
        return found
    if u is not None:
        return u
    keys = list(data.get("weights", {}))
    if not keys:
        raise ValueError("cannot infer the universe from an empty file; pass --universe")
    first = keys[0]
    return Universe.of(sorted(first.split(",") if "," in first else first))


def measure_to_json(m: SignedMeasure, u: Universe, with_labels: bool = False) -> dict:
    out = {"labels": list(u.labels)} if with_labels else {}
    out["weights"] = {u.order_str(o): rational(w) for o, w in m.to_dict().items()}
    return out


def measure_from_json(data: dict, u: Universe | None = None, signed: bool = False):
    u = infer_universe(data, u)
    weights = {u.parse_order(k): parse_rational(v) for k, v in data["weights"].items()}
    m = SignedMeasure.from_dict(u.n, weights)
    return (m if signed else Distribution.of(m)), u


def rule_to_json(r: MenuTable, u: Universe, with_labels: bool = False) -> dict:
    out = {"labels": list(u.labels)} if with_labels else {}
    out["menus"] = [
        {
            "menu": u.format_menu(sorted(A)),
            "probs": {u.labels[x]: rational(r[(x, A)]) for x in sorted(A)},
        }
        for A in menus(u.n)
    ]
    return out


def rule_from_json(data: dict, u: Universe | None = None) -> tuple[MenuTable, Universe]:
    """A choice table; raises :class:`ChoiceRuleError` when it is not a valid rule."""
    if u is None and "labels" not in data:
        labels = sorted({x for m in data["menus"] for x in m["menu"]})
        u = Universe.of(labels)
    elif "labels" in data:
        u = infer_universe(data, u)
    table = {}
    for entry in data["menus"]:
        A = u.parse_menu(entry["menu"])
        for label, p in entry["probs"].items():
            table[(u.index(label), A)] = parse_rational(p)
    return RandomChoiceRule.of(MenuTable.from_dict(u.n, table)), u


def square_to_json(s: ConjugateSquare, u: Universe) -> dict:
    return {"top": [u.order_str(o) for o in s.top], "k": s.k}


def step_to_json(step: SwapStep, u: Universe) -> dict:
    return {"square": square_to_json(step.square, u), "weight": rational(step.weight), "direction": step.direction}


def steps_to_json(seq: SwapSequence | list[SwapStep], u: Universe) -> list[dict]:
    return [step_to_json(s, u) for s in seq]


def step_from_json(data: dict, u: Universe) -> SwapStep:
    """Parse one step; a ``top`` naming the swapped diagonal flips the direction."""
    pair = tuple(u.parse_order(o) for o in data["square"]["top"])
    s = make_conjugate_square(pair[0], pair[1], int(data["square"]["k"]))
    direction = data.get("direction", "forward")
    if set(pair) == set(s.swapped):
        direction = "backward" if direction == "forward" else "forward"
    return SwapStep(s, parse_rational(data["weight"]), direction)


def steps_from_json(data, u: Universe) -> SwapSequence:
    if isinstance(data, dict):
        data = data["steps"]
    return SwapSequence(tuple(step_from_json(d, u) for d in data))


def read_json(path: str | Path):
    """Load a file, unwrapping a CLI result envelope if present."""
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict) and {"ok", "result"} <= data.keys():
        data = data["result"]
    return data


def write_json(obj, path: str | Path | None = None) -> str:
    text = json.dumps(obj, indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


__all__ = [
    "ChoiceRuleError",
    "infer_universe",
    "measure_from_json",
    "measure_to_json",
    "parse_rational",
    "rational",
    "read_json",
    "rule_from_json",
    "rule_to_json",
    "square_to_json",
    "step_from_json",
    "step_to_json",
    "steps_from_json",
    "steps_to_json",
    "write_json",
]
