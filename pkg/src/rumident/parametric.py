"""Local identification of smooth parametric random utility models.

Everything here is floating point.  The exact projector onto the
orthogonal complement of the Ryser subspace is converted to doubles once per
universe.  Jacobians are taken by central differences of the projected map
``theta -> pi(F(theta))`` and their rank is read off the singular values.

The rank test certifies *local* injectivity only.  Turning that into global
identification needs the image of the model to be simply connected, which is
not checked; mixture models are the exception because their image is convex.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .choice import Distribution
from .errors import ParameterDomainError
from .linalg import RationalMatrix
from .prefs import Universe, enumerate_orders, order_index
from .ryser import project_orthocomplement, projector

DEFAULT_H = 1e-6
DEFAULT_TOL = 1e-8
SUM_TOL = 1e-12

LOCAL_CAVEAT = (
    "full rank certifies local identification only; global identification "
    "additionally needs a simply connected image, which is not checked"
)
MIXTURE_NOTE = "mixture model: convex image, so full rank is equivalent to global identification"


@dataclass(frozen=True)
class ParametricModel:
    n: int
    dim_theta: int
    evaluate_raw: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    domain_check: Callable[[np.ndarray], bool] = field(repr=False)
    kind: str
    components: tuple[Distribution, ...] = ()

    def __post_init__(self):
        if self.dim_theta < 1:
            raise ValueError("a parametric model needs at least one parameter")

    def evaluate(self, theta) -> np.ndarray:
        """Order weights at ``theta`` (lexicographic order), renormalized."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.dim_theta,) or not self.domain_check(theta):
            raise ParameterDomainError(f"theta {theta.tolist()} is outside the parameter space")
        w = np.asarray(self.evaluate_raw(theta), dtype=float)
        if (w < -SUM_TOL).any() or abs(w.sum() - 1) > SUM_TOL:
            raise ParameterDomainError("model produced an invalid distribution")
        w = np.clip(w, 0, None)
        return w / w.sum()


def logit_model(u: Universe | int, base: int | str = 0) -> ParametricModel:
    """i.i.d. extreme-value utilities with the ``base`` alternative's utility fixed at 0.

    ``theta`` lists utilities of the other alternatives in label order.  An
    order ``x1 ... xn`` has probability ``prod_i exp(v_xi) / sum_{j>=i} exp(v_xj)``.
    """
    u = Universe.of(u) if isinstance(u, int) else u
    n = u.n
    if n < 2:
        raise ValueError("logit needs at least two alternatives")
    b = u.index(base) if isinstance(base, str) else base
    if not 0 <= b < n:
        raise ValueError(f"base alternative {base!r} not in the universe")
    free = [x for x in range(n) if x != b]
    perm = np.array(enumerate_orders(n))

    def utilities(theta):
        v = np.zeros(n)
        v[free] = theta
        return v

    def f(theta):
        v = utilities(theta)
        ev = np.exp(v - v.max())[perm]  # rows: orders, cols: positions
        tails = np.cumsum(ev[:, ::-1], axis=1)[:, ::-1]
        return np.prod(ev / tails, axis=1)

    return ParametricModel(n, n - 1, f, lambda t: bool(np.all(np.isfinite(t))), "logit")


def mixture_model(components: Sequence[Distribution]) -> ParametricModel:
    """Convex combinations of fixed distributions.

    ``theta`` holds the weights of components ``1..m-1``; component 0 gets
    the remainder.  Use :func:`mixture_theta` to convert a full barycentric
    vector.
    """
    components = tuple(components)
    if len(components) < 2:
        raise ValueError("a mixture needs at least two components")
    n = components[0].n
    if any(c.n != n for c in components):
        raise ValueError("components live on different universes")
    C = np.array([[float(w) for w in c.weights] for c in components])

    def f(theta):
        lam = np.concatenate([[1 - theta.sum()], theta])
        return lam @ C

    def inside(theta):
        return bool(np.all(theta > 0) and theta.sum() < 1)

    return ParametricModel(n, len(components) - 1, f, inside, "mixture", components)


def mixture_theta(weights: Sequence[float]) -> np.ndarray:
    """Free coordinates of a barycentric weight vector."""
    w = np.asarray(weights, dtype=float)
    if abs(w.sum() - 1) > 1e-12:
        raise ParameterDomainError("barycentric weights must sum to 1")
    return w[1:]


def external_model(records: Iterable[dict], u: Universe) -> ParametricModel:
    """A model known only on a table of parameter points.

    Each record is ``{"theta": [...], "weights": {order: value}}``.  Only the
    listed points (and so only the grid they form) can be evaluated.
    """
    idx = order_index(u.n)
    table: dict[tuple, np.ndarray] = {}
    k = None
    for rec in records:
        theta = tuple(float(t) for t in rec["theta"])
        if k is None:
            k = len(theta)
        elif len(theta) != k:
            raise ValueError("external model records disagree on parameter count")
        w = np.zeros(len(idx))
        for text, val in rec["weights"].items():
            w[idx[u.parse_order(text)]] = float(_number(val))
        table[_key(theta)] = w
    if not table:
        raise ValueError("external model has no records")

    def f(theta):
        return table[_key(theta)]

    return ParametricModel(u.n, k, f, lambda t: _key(t) in table, "external")


def _number(val):
    from fractions import Fraction

    return Fraction(val) if isinstance(val, str) else val


def _key(theta) -> tuple:
    return tuple(round(float(t), 12) for t in theta)


def load_external_model(path, u: Universe) -> ParametricModel:
    with open(path) as fh:
        return external_model((json.loads(line) for line in fh if line.strip()), u)


@lru_cache(maxsize=None)
def float_projector(n: int) -> np.ndarray:
    P = projector(n)
    return np.array([[float(x) for x in row] for row in P.rows])


@lru_cache(maxsize=None)
def complement_frame(n: int) -> np.ndarray:
    """Orthonormal basis (columns) of the orthogonal complement of the Ryser subspace."""
    vals, vecs = np.linalg.eigh(float_projector(n))
    return vecs[:, vals > 0.5]


@dataclass(frozen=True)
class JacobianReport:
    theta: tuple[float, ...]
    jacobian: np.ndarray = field(repr=False)
    singular_values: tuple[float, ...]
    rank: int
    full_rank: bool
    caveat: str = LOCAL_CAVEAT

    def to_json(self) -> dict:
        return {
            "theta": [_float(t) for t in self.theta],
            "jacobian": [[_float(x) for x in row] for row in self.jacobian],
            "singular_values": [_float(s) for s in self.singular_values],
            "rank": self.rank,
            "full_rank": self.full_rank,
            "caveat": self.caveat,
        }


def _float(x: float) -> str:
    return f"{x:.17g}"


def projected_differences(model: ParametricModel, theta, h: float = DEFAULT_H, frame: np.ndarray | None = None):
    """Central-difference columns of ``dF`` and of ``pi dF`` in frame coordinates."""
    theta = np.asarray(theta, dtype=float)
    if h <= 0:
        raise ValueError("step h must be positive")
    frame = complement_frame(model.n) if frame is None else frame
    cols = []
    for i in range(model.dim_theta):
        e = np.zeros(model.dim_theta)
        e[i] = h
        for t in (theta + e, theta - e):
            if not model.domain_check(t):
                raise ParameterDomainError(f"theta +/- h e_{i} leaves the parameter space")
        cols.append((model.evaluate(theta + e) - model.evaluate(theta - e)) / (2 * h))
    dF = np.column_stack(cols)
    return dF, frame.T @ dF


def jacobian_fbar(
    model: ParametricModel,
    theta,
    h: float = DEFAULT_H,
    tol: float = DEFAULT_TOL,
    frame: np.ndarray | None = None,
) -> JacobianReport:
    """Projected Jacobian at ``theta`` reduced to a ``k x k`` matrix.

    Singular values of the projected columns count as nonzero when above
    ``tol`` times the largest singular value of the unprojected ``dF``;
    scaling by the unprojected map keeps an all-noise projection (as for a
    non-identified mixture) from being normalized against itself.
    """
    dF, J = projected_differences(model, theta, h, frame)
    k = model.dim_theta
    U, s, _ = np.linalg.svd(J, full_matrices=False)
    square = U[:, :k].T @ J
    scale = np.linalg.norm(dF, 2)
    rank = int(np.sum(s > tol * scale)) if scale > 0 else 0
    caveat = MIXTURE_NOTE if model.kind == "mixture" else LOCAL_CAVEAT
    sv = tuple(float(x) for x in sorted(s, reverse=True))
    return JacobianReport(tuple(float(t) for t in np.asarray(theta, float)), square, sv, rank, rank == k, caveat)


def exact_mixture_rank(components: Sequence[Distribution]) -> int:
    """Rank of ``{pi(c_i - c_0)}`` computed over the rationals."""
    c0 = components[0]
    vecs = [project_orthocomplement(c - c0).weights for c in components[1:]]
    return RationalMatrix(vecs, ncols=len(c0.weights)).rank() if vecs else 0


@dataclass(frozen=True)
class ScanReport:
    reports: tuple[JacobianReport, ...]
    min_rank: int
    failures: tuple[tuple[float, ...], ...]
    exact_rank: int | None = None

    @property
    def all_full_rank(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "points": len(self.reports),
            "min_rank": self.min_rank,
            "all_full_rank": self.all_full_rank,
            "failures": [[_float(t) for t in f] for f in self.failures],
            "exact_rank": self.exact_rank,
            "reports": [r.to_json() for r in self.reports],
        }


def scan_identification(
    model: ParametricModel,
    grid: Iterable,
    h: float = DEFAULT_H,
    tol: float = DEFAULT_TOL,
) -> ScanReport:
    """Jacobian reports over ``grid``; mixtures are also checked against the exact rank."""
    grid = [np.asarray(t, dtype=float) for t in grid]
    if not grid:
        raise ValueError("empty grid")
    reports = tuple(jacobian_fbar(model, t, h, tol) for t in grid)
    exact = None
    if model.kind == "mixture":
        exact = exact_mixture_rank(model.components)
        bad = [r.theta for r in reports if r.rank != exact]
        if bad:
            from .errors import ConsistencyError

            raise ConsistencyError(f"sampled rank differs from exact mixture rank {exact} at {bad[0]}")
    failures = tuple(r.theta for r in reports if not r.full_rank)
    return ScanReport(reports, min(r.rank for r in reports), failures, exact)


def box_grid(k: int, lo: float = -2.0, hi: float = 2.0, points: int = 11) -> list[np.ndarray]:
    axis = np.linspace(lo, hi, points)
    mesh = np.meshgrid(*([axis] * k), indexing="ij")
    return [np.array(p) for p in zip(*(m.ravel() for m in mesh))]


def simplex_grid(m: int, points: int = 11) -> list[np.ndarray]:
    """Interior points of the ``(m-1)``-simplex on a regular lattice, as free coordinates."""
    out = []
    denom = points + 1
    for comp in _compositions(denom, m):
        if all(c > 0 for c in comp):
            out.append(np.array(comp[1:], dtype=float) / denom)
    return out


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def convergence_ratio(model: ParametricModel, theta, h: float = 0.05) -> float:
    """``|J(h) - J(h/2)| / |J(h/2) - J(h/4)|`` for the unprojected differences.

    Central differences have ``O(h^2)`` error, so the ratio tends to 4.
    """
    Js = [projected_differences(model, theta, h / 2**i)[0] for i in range(3)]
    return float(np.linalg.norm(Js[0] - Js[1]) / np.linalg.norm(Js[1] - Js[2]))


def distinguishes(model: ParametricModel, t1, t2, tol: float = 1e-10) -> bool:
    """Whether the projected images of two parameter points differ."""
    P = float_projector(model.n)
    return bool(np.linalg.norm(P @ (model.evaluate(t1) - model.evaluate(t2))) > tol)


def binary_choice(weights: np.ndarray, n: int, x: int, y: int) -> float:
    """Probability that ``x`` is ranked above ``y``."""
    return float(sum(w for w, o in zip(weights, enumerate_orders(n)) if o.index(x) < o.index(y)))


def random_frame(n: int, rng: np.random.Generator) -> np.ndarray:
    """The complement frame rotated by a random orthogonal matrix."""
    F = complement_frame(n)
    Q, _ = np.linalg.qr(rng.standard_normal((F.shape[1], F.shape[1])))
    return F @ Q


__all__ = [
    "JacobianReport",
    "ParametricModel",
    "ScanReport",
    "binary_choice",
    "box_grid",
    "complement_frame",
    "convergence_ratio",
    "distinguishes",
    "exact_mixture_rank",
    "external_model",
    "float_projector",
    "jacobian_fbar",
    "load_external_model",
    "logit_model",
    "mixture_model",
    "mixture_theta",
    "random_frame",
    "scan_identification",
    "simplex_grid",
]
