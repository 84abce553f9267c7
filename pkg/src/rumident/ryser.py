"""Ryser swaps, the subspace they span, and projection onto its complement."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Literal

from .choice import SignedMeasure, phi, phi_matrix
from .linalg import Echelon, RationalMatrix, coefficients, independent_subset
from .prefs import ConjugateSquare, check_size, enumerate_conjugate_squares, enumerate_orders, order_index

Direction = Literal["forward", "backward"]


@dataclass(frozen=True)
class SwapVector:
    square: ConjugateSquare
    vector: SignedMeasure


def swap_vector(s: ConjugateSquare) -> SwapVector:
    """+1 on the swapped pair, -1 on the top pair."""
    n = len(s.top[0])
    w = {s.swapped[0]: 1, s.swapped[1]: 1, s.top[0]: -1, s.top[1]: -1}
    return SwapVector(s, SignedMeasure.from_dict(n, w))


@dataclass(frozen=True)
class SwapStep:
    """``weight`` times the square's swap vector, negated when ``backward``."""

    square: ConjugateSquare
    weight: Fraction
    direction: Direction = "forward"

    def __post_init__(self):
        object.__setattr__(self, "weight", Fraction(self.weight))
        if self.weight <= 0:
            raise ValueError("swap weights must be positive")
        if self.direction not in ("forward", "backward"):
            raise ValueError(f"unknown direction {self.direction!r}")

    @property
    def signed_weight(self) -> Fraction:
        return self.weight if self.direction == "forward" else -self.weight

    @property
    def source_pair(self):
        return self.square.top if self.direction == "forward" else self.square.swapped

    @property
    def target_pair(self):
        return self.square.swapped if self.direction == "forward" else self.square.top

    def vector(self) -> SignedMeasure:
        return swap_vector(self.square).vector * self.signed_weight


@dataclass(frozen=True)
class SwapSequence:
    steps: tuple[SwapStep, ...] = ()
    provenance: tuple[str, ...] = ()
    meta: dict = field(default_factory=dict, compare=False)

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def total(self, n: int) -> SignedMeasure:
        out = SignedMeasure.zero(n)
        for step in self.steps:
            out = out + step.vector()
        return out


@dataclass(frozen=True)
class RyserBasis:
    n: int
    squares: tuple[ConjugateSquare, ...]
    vectors: tuple[SignedMeasure, ...]

    @property
    def dim(self) -> int:
        return len(self.vectors)


def _sparse(m: SignedMeasure) -> dict[int, Fraction]:
    return {j: w for j, w in enumerate(m.weights) if w}


@lru_cache(maxsize=None)
def ryser_basis(n: int) -> RyserBasis:
    """First-come independent subset of swap vectors in square enumeration order."""
    check_size(n)
    squares = enumerate_conjugate_squares(n)
    vecs = [swap_vector(s).vector for s in squares]
    keep = independent_subset([_sparse(v) for v in vecs], len(enumerate_orders(n)))
    return RyserBasis(n, tuple(squares[i] for i in keep), tuple(vecs[i] for i in keep))


@lru_cache(maxsize=None)
def nullspace_phi(n: int) -> tuple[SignedMeasure, ...]:
    """Rational basis of the kernel of the phi matrix."""
    check_size(n)
    return tuple(SignedMeasure(n, tuple(v)) for v in phi_matrix(n).nullspace())


@lru_cache(maxsize=None)
def orthocomplement_basis(n: int) -> tuple[tuple[Fraction, ...], ...]:
    """Basis of the orthogonal complement of the Ryser subspace.

    Computed from the swap vectors alone (no use of phi), so it can serve as
    an independent route in cross-checks.
    """
    basis = ryser_basis(n)
    N = len(enumerate_orders(n))
    if not basis.vectors:
        return tuple(tuple(Fraction(int(i == j)) for j in range(N)) for i in range(N))
    At = RationalMatrix([v.weights for v in basis.vectors], ncols=N)
    return tuple(tuple(v) for v in At.nullspace())


@lru_cache(maxsize=None)
def complement_rows(n: int) -> tuple[dict[int, Fraction], ...]:
    """Row ``o`` of the complement-basis matrix, sparse.

    A vector supported on ``S`` lies in the Ryser subspace iff it is a
    dependency among these rows over ``S``.
    """
    C = orthocomplement_basis(n)
    N = len(enumerate_orders(n))
    return tuple({t: c[o] for t, c in enumerate(C) if c[o]} for o in range(N))


def in_ryser_space(m: SignedMeasure, method: str = "auto") -> bool:
    """Whether ``m`` is a rational combination of Ryser swaps.

    ``basis`` solves against :func:`ryser_basis`; ``zipper`` builds an explicit
    swap decomposition (no basis needed, so it scales past ``n = 5``).
    """
    if method == "auto":
        method = "basis" if m.n <= 5 else "zipper"
    if method == "basis":
        return ryser_coefficients(m) is not None
    if method == "zipper":
        return ryser_decomposition(m) is not None
    raise ValueError(f"unknown method {method!r}")


def ryser_coefficients(m: SignedMeasure) -> dict[ConjugateSquare, Fraction] | None:
    """Coefficients on the basis squares, or ``None`` when ``m`` is outside the span."""
    basis = ryser_basis(m.n)
    if not basis.vectors:
        return {} if not any(m.weights) else None
    c = coefficients([v.weights for v in basis.vectors], m.weights)
    if c is None:
        return None
    return {s: x for s, x in zip(basis.squares, c) if x}


def ryser_decomposition(m: SignedMeasure) -> SwapSequence | None:
    """Swap steps summing to ``m`` exactly, or ``None`` if ``m`` is not in the span.

    Splits ``m`` into positive and negative parts and zippers one into the
    other; requires ``phi(m) == 0`` and zero total mass.
    """
    from .choice import Distribution
    from .zipper import zipper

    if m.total() != 0 or any(phi(m).values):
        return None
    if not any(m.weights):
        return SwapSequence()
    pos = SignedMeasure(m.n, tuple(max(w, 0) for w in m.weights))
    neg = pos - m
    t = pos.total()
    seq = zipper(Distribution.of(neg * (1 / t)), Distribution.of(pos * (1 / t)))
    steps = tuple(SwapStep(s.square, s.weight * t, s.direction) for s in seq.steps)
    out = SwapSequence(steps, seq.provenance, dict(seq.meta, scale=str(t)))
    if out.total(m.n) != m:
        from .errors import ConsistencyError

        raise ConsistencyError("swap decomposition does not reproduce the measure")
    return out


@lru_cache(maxsize=None)
def projector(n: int) -> RationalMatrix:
    """Exact orthogonal projector onto the complement of the Ryser subspace.

    Uses ``I - A (A^T A)^-1 A^T`` on the swap basis ``A`` or, when the
    complement is the smaller side, ``C (C^T C)^-1 C^T`` on its basis; the two
    are the same matrix.
    """
    N = len(enumerate_orders(n))
    basis = ryser_basis(n)
    if not basis.vectors:
        return RationalMatrix.identity(N)
    if basis.dim <= N - basis.dim:
        A = RationalMatrix.from_columns([v.weights for v in basis.vectors], N)
        gram_inv = (A.T @ A).inverse()
        return RationalMatrix.identity(N) - A @ (gram_inv @ A.T)
    C = RationalMatrix.from_columns(orthocomplement_basis(n), N)
    gram_inv = (C.T @ C).inverse()
    return C @ (gram_inv @ C.T)


def project_orthocomplement(m: SignedMeasure) -> SignedMeasure:
    return SignedMeasure(m.n, tuple(projector(m.n) @ list(m.weights)))


def support_intersection_dim(n: int, support) -> int:
    """``dim`` of the Ryser subspace intersected with vectors supported on ``support``."""
    rows = complement_rows(n)
    idx = order_index(n)
    ech = Echelon(len(orthocomplement_basis(n)))
    independent = sum(ech.add(rows[idx[o]]) for o in support)
    return len(support) - independent
