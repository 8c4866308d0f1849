"""Planes on real and complex Grassmann manifolds.

A point of ``G_{n,p}`` is an equivalence class of ``n x p`` matrices with
orthonormal columns, two bases being the same point when they differ by a
right orthogonal/unitary factor.  Distances use the projection-Frobenius
(chordal) metric computed from principal angles, and isotropic sampling
draws from the rotation-invariant (Haar) distribution.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainError,
    OrderViolation,
    OrthonormalityError,
)

# Frobenius tolerance on basis^H basis - I.
TOL_ORTHO = 1e-10
# Chordal distance below which two planes count as the same point.
TOL_EQ = 1e-9


class FieldKind(enum.Enum):
    """Scalar field of the ambient space."""

    REAL = "real"
    COMPLEX = "complex"

    @property
    def beta(self) -> int:
        """Field multiplier: 1 for real entries, 2 for complex."""
        return 1 if self is FieldKind.REAL else 2

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(np.float64 if self is FieldKind.REAL else np.complex128)

    @classmethod
    def from_beta(cls, beta: int) -> "FieldKind":
        if beta == 1:
            return cls.REAL
        if beta == 2:
            return cls.COMPLEX
        raise DomainError(f"beta must be 1 (real) or 2 (complex), got {beta!r}")


@dataclass(frozen=True)
class GrassmannSpec:
    """Identifies ``G_{n,p}`` over the given field.

    ``p = n`` is rejected: the manifold degenerates to a single point.
    """

    n: int
    p: int
    field: FieldKind = FieldKind.COMPLEX

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or not isinstance(self.p, int):
            raise DomainError("n and p must be integers")
        if self.n < 2:
            raise DomainError(f"ambient dimension n must be >= 2, got {self.n}")
        if not 1 <= self.p <= self.n - 1:
            raise DomainError(
                f"plane dimension must satisfy 1 <= p <= n - 1, got p={self.p}, n={self.n}"
            )
        if not isinstance(self.field, FieldKind):
            raise DomainError(f"field must be a FieldKind, got {self.field!r}")

    @property
    def beta(self) -> int:
        return self.field.beta

    @property
    def real_dimension(self) -> int:
        """Real dimension of the manifold, beta * p * (n - p)."""
        return self.beta * self.p * (self.n - self.p)


@dataclass(frozen=True, eq=False)
class Plane:
    """A point of ``G_{n,p}``, stored as an orthonormal basis matrix.

    The basis is validated at construction and frozen (read-only array).
    Use :func:`same_plane` for point equality; basis matrices of equal
    planes may differ by a right unitary factor.
    """

    spec: GrassmannSpec
    basis: np.ndarray

    def __post_init__(self) -> None:
        basis = np.asarray(self.basis, dtype=self.spec.field.dtype)
        if basis.shape != (self.spec.n, self.spec.p):
            raise DimensionMismatch(
                f"basis shape {basis.shape} does not match spec ({self.spec.n}, {self.spec.p})"
            )
        gram = basis.conj().T @ basis
        resid = np.linalg.norm(gram - np.eye(self.spec.p))
        if resid > TOL_ORTHO:
            raise OrthonormalityError(
                f"basis columns are not orthonormal (residual {resid:.3e} > {TOL_ORTHO})"
            )
        basis = basis.copy()
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @classmethod
    def from_span(cls, matrix: np.ndarray, field: FieldKind | None = None) -> "Plane":
        """Plane spanned by the columns of a full-column-rank matrix."""
        matrix = np.asarray(matrix)
        if matrix.ndim == 1:
            matrix = matrix[:, None]
        if field is None:
            field = FieldKind.COMPLEX if np.iscomplexobj(matrix) else FieldKind.REAL
        matrix = matrix.astype(field.dtype)
        n, p = matrix.shape
        q, r = np.linalg.qr(matrix)
        if np.min(np.abs(np.diagonal(r))) < 1e-12 * max(1.0, float(np.abs(r).max())):
            raise DomainError("matrix does not have full column rank")
        return cls(GrassmannSpec(n, p, field), q)


@dataclass(frozen=True)
class PrincipalAngles:
    """Sorted cosines of the principal angles between two planes.

    ``cosines`` has length ``min(p, q)``, entries in [0, 1], non-increasing;
    ``sin_sq_sum`` is the squared chordal distance.
    """

    cosines: np.ndarray
    sin_sq_sum: float

    @property
    def angles(self) -> np.ndarray:
        """Principal angles in radians, in [0, pi/2], non-decreasing."""
        return np.arccos(self.cosines)


def canonical_plane(spec: GrassmannSpec) -> Plane:
    """The plane spanned by the first ``p`` coordinate axes."""
    basis = np.zeros((spec.n, spec.p), dtype=spec.field.dtype)
    basis[: spec.p, : spec.p] = np.eye(spec.p)
    return Plane(spec, basis)


def _gaussian_matrix(
    shape: tuple[int, ...], field: FieldKind, rng: np.random.Generator
) -> np.ndarray:
    if field is FieldKind.COMPLEX:
        # Circular complex normal; the overall scale is irrelevant after QR.
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return rng.standard_normal(shape)


def _haar_orthonormalize(g: np.ndarray) -> np.ndarray:
    """QR with diagonal phase correction so the Q factor is Haar-distributed."""
    q, r = np.linalg.qr(g)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    mag = np.abs(d)
    phase = np.where(mag > 0, d / np.where(mag > 0, mag, 1.0), 1.0)
    return q * phase[..., None, :]


def sample_isotropic_bases(
    spec: GrassmannSpec, count: int, rng: np.random.Generator
) -> np.ndarray:
    """Stack of ``count`` independent Haar-distributed bases, shape (count, n, p)."""
    if count < 0:
        raise DomainError(f"count must be non-negative, got {count}")
    g = _gaussian_matrix((count, spec.n, spec.p), spec.field, rng)
    return _haar_orthonormalize(g)


def sample_isotropic(spec: GrassmannSpec, rng: np.random.Generator) -> Plane:
    """One plane drawn from the invariant (Haar) distribution on ``G_{n,p}``."""
    g = _gaussian_matrix((spec.n, spec.p), spec.field, rng)
    return Plane(spec, _haar_orthonormalize(g))


def haar_unitary(n: int, field: FieldKind, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed n x n orthogonal (real) or unitary (complex) matrix."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    g = _gaussian_matrix((n, n), field, rng)
    return _haar_orthonormalize(g)


def _check_pair(P: Plane, Q: Plane) -> None:
    if P.spec.n != Q.spec.n:
        raise DimensionMismatch(
            f"ambient dimensions differ: {P.spec.n} vs {Q.spec.n}"
        )
    if P.spec.field is not Q.spec.field:
        raise DimensionMismatch(
            f"fields differ: {P.spec.field.value} vs {Q.spec.field.value}"
        )
    if P.spec.p > Q.spec.p:
        raise OrderViolation(
            f"dim(P)={P.spec.p} exceeds dim(Q)={Q.spec.p}; pass the smaller plane first"
        )


def principal_angles(P: Plane, Q: Plane) -> PrincipalAngles:
    """Principal angles between planes of possibly different dimension.

    Requires ``dim(P) <= dim(Q)``; cosines are the singular values of
    ``P.basis^H Q.basis`` clamped into [0, 1].
    """
    _check_pair(P, Q)
    cross = P.basis.conj().T @ Q.basis
    s = np.linalg.svd(cross, compute_uv=False)
    cosines = np.clip(s, 0.0, 1.0)
    cosines.setflags(write=False)
    sin_sq_sum = float(np.sum(1.0 - cosines**2))
    return PrincipalAngles(cosines=cosines, sin_sq_sum=sin_sq_sum)


def chordal_distance_sq(P: Plane, Q: Plane) -> float:
    """Squared chordal distance, ``sum_i sin^2(theta_i)`` over min(p, q) angles.

    Computed as the squared norm of the residual of projecting P's basis
    onto Q, which equals ``p - ||P^H Q||_F^2`` but stays accurate near
    zero (no cancellation of order-one terms).
    """
    _check_pair(P, Q)
    cross = Q.basis.conj().T @ P.basis
    resid = P.basis - Q.basis @ cross
    dsq = np.linalg.norm(resid) ** 2
    return min(max(float(dsq), 0.0), float(P.spec.p))


def chordal_distance(P: Plane, Q: Plane) -> float:
    """Chordal distance ``sqrt(p - ||P^H Q||_F^2)``; range [0, sqrt(min(p, q))]."""
    return math.sqrt(chordal_distance_sq(P, Q))


def same_plane(P: Plane, Q: Plane) -> bool:
    """Whether two equal-dimensional planes are the same point (distance < TOL_EQ)."""
    if P.spec.p != Q.spec.p:
        return False
    return chordal_distance(P, Q) < TOL_EQ
