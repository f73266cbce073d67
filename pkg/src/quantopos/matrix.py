"""Dense complex-matrix core: functional calculus, commutants, *-algebra spans.

Every rank or membership decision goes through a single tolerance knob,
``tau = base * (1 + max Frobenius norm of the inputs)`` with ``base = 1e-9``
unless overridden with :func:`tolerance`.
"""

from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    NonCommutativeResult,
    NonCommutingGenerators,
    NonHermitian,
    QuantoposError,
)

DEFAULT_TOLERANCE = 1e-9

_tol_base: contextvars.ContextVar[float] = contextvars.ContextVar(
    "quantopos_tolerance", default=DEFAULT_TOLERANCE
)


@contextlib.contextmanager
def tolerance(base: float) -> Iterator[None]:
    """Temporarily replace the tolerance base (``1e-9`` by default)."""
    if not base > 0:
        raise ValueError(f"tolerance must be positive, got {base!r}")
    token = _tol_base.set(float(base))
    try:
        yield
    finally:
        _tol_base.reset(token)


def tolerance_base() -> float:
    return _tol_base.get()


def tau(*mats: np.ndarray) -> float:
    """Absolute tolerance scaled by the largest Frobenius norm among ``mats``."""
    scale = max((float(np.linalg.norm(m)) for m in mats), default=0.0)
    return _tol_base.get() * (1.0 + scale)


def as_matrix(m, dim: int | None = None) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise DimensionMismatch(f"expected {dim}x{dim}, got {a.shape[0]}x{a.shape[1]}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def _common_dim(mats: Sequence[np.ndarray], dim: int | None) -> int:
    dims = {m.shape[0] for m in mats}
    if dim is not None:
        dims.add(dim)
    if len(dims) > 1:
        raise DimensionMismatch(f"matrices of differing dimensions {sorted(dims)}")
    if not dims:
        raise DimensionMismatch("dimension cannot be inferred from an empty list")
    return dims.pop()


def is_hermitian(a: np.ndarray) -> bool:
    return float(np.linalg.norm(a - a.conj().T)) <= tau(a)


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a @ b - b @ a))


def commutes(a: np.ndarray, b: np.ndarray) -> bool:
    return commutator_norm(a, b) <= tau(a, b)


def hermitian_exp(a, k: float = 1.0) -> np.ndarray:
    """Return ``exp(i k A)`` for hermitian ``A`` via its eigendecomposition."""
    a = as_matrix(a)
    if not is_hermitian(a):
        raise NonHermitian("matrix is not hermitian within tolerance")
    h = (a + a.conj().T) / 2
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * k * w)) @ v.conj().T


def _orthonormal_span(vecs: np.ndarray, threshold: float) -> np.ndarray:
    """Orthonormal (Euclidean) rows spanning the row space of ``vecs``."""
    if vecs.shape[0] == 0:
        return vecs
    _, s, vh = np.linalg.svd(vecs, full_matrices=False)
    return vh[: int(np.sum(s > threshold))]


@dataclass(frozen=True, eq=False)
class StarAlgebra:
    """A unital *-closed span of ``n x n`` matrices.

    ``basis`` has shape ``(d, n, n)`` and is orthonormal for
    ``<A, B> = tr(A* B) / n``, so membership is a projection.
    """

    dim: int
    basis: np.ndarray
    commutative: bool

    @classmethod
    def from_span(cls, mats: Sequence[np.ndarray], dim: int, threshold: float | None = None) -> "StarAlgebra":
        mats = [as_matrix(m, dim) for m in mats]
        if threshold is None:
            threshold = tau(*mats)
        vecs = np.array([m.reshape(-1) for m in mats]).reshape(len(mats), dim * dim)
        rows = _orthonormal_span(vecs, threshold) * np.sqrt(dim)
        basis = rows.reshape(-1, dim, dim)
        basis.setflags(write=False)
        return cls(dim, basis, _pairwise_commuting(basis))

    @property
    def dimension(self) -> int:
        return int(self.basis.shape[0])

    def __len__(self) -> int:
        return self.dimension

    def coefficients(self, m: np.ndarray) -> np.ndarray:
        flat = self.basis.reshape(self.dimension, -1)
        return flat.conj() @ m.reshape(-1) / self.dim

    def residual(self, m) -> float:
        m = as_matrix(m, self.dim)
        if self.dimension == 0:
            return float(np.linalg.norm(m))
        proj = np.tensordot(self.coefficients(m), self.basis, axes=1)
        return float(np.linalg.norm(m - proj))

    def contains(self, m) -> bool:
        m = as_matrix(m, self.dim)
        return self.residual(m) <= tau(m)

    def issubset(self, other: "StarAlgebra") -> bool:
        if self.dim != other.dim:
            raise DimensionMismatch(f"algebras on C^{self.dim} and C^{other.dim}")
        if self.dimension > other.dimension:
            return False
        return all(other.contains(b) for b in self.basis)

    def span_equal(self, other: "StarAlgebra") -> bool:
        return self.dimension == other.dimension and self.issubset(other)

    def closure_residuals(self) -> dict[str, float]:
        """Worst residuals of the unit, adjoint and product closure tests."""
        out = {"identity": self.residual(np.eye(self.dim)), "adjoint": 0.0, "product": 0.0}
        for a in self.basis:
            out["adjoint"] = max(out["adjoint"], self.residual(a.conj().T))
            for b in self.basis:
                out["product"] = max(out["product"], self.residual(a @ b))
        return out

    def is_valid(self) -> bool:
        t = tau(*self.basis) if self.dimension else tau()
        return all(r <= t for r in self.closure_residuals().values())

    def __repr__(self) -> str:
        kind = "commutative" if self.commutative else "noncommutative"
        return f"StarAlgebra(n={self.dim}, dimension={self.dimension}, {kind})"


def _pairwise_commuting(mats: Iterable[np.ndarray]) -> bool:
    mats = list(mats)
    return all(commutes(a, b) for i, a in enumerate(mats) for b in mats[i + 1 :])


def scalar_algebra(n: int) -> StarAlgebra:
    return StarAlgebra.from_span([np.eye(n)], n)


def full_algebra(n: int) -> StarAlgebra:
    units = []
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1
            units.append(e)
    return StarAlgebra.from_span(units, n)


def _commutator_block(m: np.ndarray) -> np.ndarray:
    # Row-major vec: vec(X M) = (I kron M^T) vec X, vec(M X) = (M kron I) vec X.
    n = m.shape[0]
    eye = np.eye(n)
    return np.kron(eye, m.T) - np.kron(m, eye)


def commutant(mats: Sequence, dim: int | None = None) -> StarAlgebra:
    """Basis of ``{X : XM = MX and XM* = M*X for all M}``."""
    mats = [as_matrix(m) for m in mats]
    n = _common_dim(mats, dim)
    if not mats:
        return full_algebra(n)
    threshold = tau(*mats)
    r = np.zeros((0, n * n), dtype=complex)
    for m in mats:
        block = np.vstack([r, _commutator_block(m), _commutator_block(m.conj().T)])
        r = scipy.linalg.qr(block, mode="r")[0][: n * n]
    _, s, vh = np.linalg.svd(r)
    rank = int(np.sum(s > threshold))
    null = vh[rank:].conj()
    return StarAlgebra.from_span(list(null.reshape(-1, n, n)), n, threshold=0.5)


def double_commutant(mats: Sequence, dim: int | None = None, expect_commutative: bool = False) -> StarAlgebra:
    first = commutant(mats, dim)
    second = commutant(list(first.basis), first.dim)
    if expect_commutative and not second.commutative:
        raise NonCommutativeResult(
            f"double commutant of {len(mats)} generator(s) is not commutative "
            "(the generators do not commute)"
        )
    return second


def algebra_membership(v: StarAlgebra, m) -> bool:
    return v.contains(m)


def generated_star_algebra(gens: Sequence, dim: int | None = None) -> StarAlgebra:
    """Smallest unital *-closed span containing the commuting family ``gens``."""
    gens = [as_matrix(g) for g in gens]
    n = _common_dim(gens, dim)
    family = gens + [g.conj().T for g in gens]
    for i, a in enumerate(family):
        for b in family[i + 1 :]:
            if not commutes(a, b):
                raise NonCommutingGenerators("generators (with adjoints) do not pairwise commute")
    span = StarAlgebra.from_span([np.eye(n)] + family, n)
    while True:
        prods = [a @ b for a in span.basis for b in span.basis]
        grown = StarAlgebra.from_span(list(span.basis) + prods, n)
        if grown.dimension == span.dimension:
            break
        span = grown
    check = double_commutant(gens, n)
    if not span.span_equal(check):
        raise QuantoposError("generated *-algebra differs from the double commutant")
    return span
