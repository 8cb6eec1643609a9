"""Tolerance-aware dense complex linear algebra.

Operators are plain ``numpy`` complex arrays. Closed subspaces are carried by
:class:`Subspace`, an orthonormal frame whose columns are put into a
deterministic canonical form (pivoted QR of the orthogonal projector followed
by phase normalisation), so two computations of the same subspace give the
same frame.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg as spla

from .errors import AmbientMismatch, NotHermitian, NotSquare, ValidationError

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds.

    Parameters
    ----------
    rank_cut
        Singular values at or below this are treated as zero. ``None`` selects
        the usual ``max(rows, cols) * eps * sigma_max`` convention.
    residual
        Bound used when checking identities such as ``m == m^*``.
    """

    rank_cut: float | None = None
    residual: float = 1e-10

    def __post_init__(self):
        if self.rank_cut is not None and not self.rank_cut > 0:
            raise ValidationError(f"rank_cut must be positive, got {self.rank_cut}")
        if not self.residual > 0:
            raise ValidationError(f"residual must be positive, got {self.residual}")

    def cutoff(self, shape, scale=1.0):
        if self.rank_cut is not None:
            return self.rank_cut
        return max(shape) * EPS * scale

    def sine_cut(self, n):
        """Largest principal-angle sine still counted as a shared direction.

        Equivalent to accepting principal cosines ``>= 1 - cutoff``; working
        with sines keeps small angles resolvable.
        """
        c = min(self.cutoff((n, n), 1.0), 1.0)
        return float(np.sqrt(c * (2.0 - c)))


DEFAULT_TOL = Tolerance()


def as_matrix(m, name="matrix"):
    """Coerce to a finite 2-D complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValidationError(f"{name} must have positive dimensions, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} has non-finite entries")
    return a


def _require_square(m):
    if m.shape[0] != m.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {m.shape}")


def adjoint(m):
    return m.conj().T


def operator_norm(t):
    """Largest singular value."""
    t = np.asarray(t, dtype=complex)
    if t.size == 0:
        return 0.0
    return float(np.linalg.norm(t, 2))


def normalize_phases(cols):
    """Rotate each column so its first non-negligible entry is real positive."""
    cols = np.array(cols, dtype=complex, copy=True)
    for j in range(cols.shape[1]):
        col = cols[:, j]
        big = np.abs(col)
        top = big.max() if big.size else 0.0
        if top == 0.0:
            continue
        i = int(np.argmax(big > np.sqrt(EPS) * top))
        cols[:, j] = col * (np.conj(col[i]) / abs(col[i]))
    return cols


def canonical_frame(frame):
    """Deterministic orthonormal frame for the span of orthonormal ``frame``."""
    frame = np.asarray(frame, dtype=complex)
    n, k = frame.shape
    if k == 0:
        return np.zeros((n, 0), dtype=complex)
    proj = frame @ adjoint(frame)
    q, _, _ = spla.qr(proj, pivoting=True, mode="economic")
    return normalize_phases(q[:, :k])


@dataclass(frozen=True, eq=False)
class Subspace:
    """Closed subspace of C^n given by an orthonormal frame (n x k)."""

    frame: np.ndarray
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        f = np.asarray(self.frame, dtype=complex)
        if f.ndim != 2:
            raise ValidationError(f"frame must be 2-D, got shape {f.shape}")
        if f.shape[1] > f.shape[0]:
            raise ValidationError("frame has more columns than the ambient dimension")
        if f.shape[1]:
            err = np.linalg.norm(adjoint(f) @ f - np.eye(f.shape[1]), 2)
            if err > self.tol.residual:
                raise ValidationError(f"frame is not orthonormal (residual {err:.3e})")
        object.__setattr__(self, "frame", f)

    @classmethod
    def zero(cls, n, tol=DEFAULT_TOL):
        return cls(np.zeros((n, 0), dtype=complex), tol)

    @property
    def ambient_dim(self):
        return self.frame.shape[0]

    @property
    def dim(self):
        return self.frame.shape[1]

    def projector(self):
        return self.frame @ adjoint(self.frame)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def direct_sum(*subspaces):
    """Concatenate frames of mutually orthogonal subspaces."""
    if not subspaces:
        raise ValueError("need at least one subspace")
    n = subspaces[0].ambient_dim
    if any(s.ambient_dim != n for s in subspaces):
        raise AmbientMismatch("subspaces live in different ambient spaces")
    return Subspace(np.hstack([s.frame for s in subspaces]), subspaces[0].tol)


def hermitian_eig(m, tol=DEFAULT_TOL):
    """Eigen-decomposition of a Hermitian matrix, eigenvalues descending.

    Eigenvectors of (numerically) repeated eigenvalues are replaced by the
    canonical frame of their common eigenspace, and every eigenvector has its
    first non-negligible component real positive.
    """
    m = as_matrix(m)
    _require_square(m)
    herr = operator_norm(m - adjoint(m))
    if herr > tol.residual:
        raise NotHermitian(f"matrix is not Hermitian (||m - m*|| = {herr:.3e})")
    w, v = np.linalg.eigh((m + adjoint(m)) / 2)
    w, v = w[::-1].copy(), v[:, ::-1].copy()
    start = 0
    for stop in range(1, len(w) + 1):
        if stop == len(w) or w[start] - w[stop] > tol.residual:
            if stop - start > 1:
                v[:, start:stop] = canonical_frame(v[:, start:stop])
            start = stop
    return w, normalize_phases(v)


def polar_partial_isometry(t, tol=DEFAULT_TOL):
    """Polar decomposition ``t = v @ abs_t``.

    ``abs_t = (t^* t)^{1/2}`` is assembled from the SVD, so small singular
    values are not amplified by a square root. ``v`` is the partial isometry
    with initial space ``closure R(t^*)`` and final space ``closure R(t)``;
    singular values at or below the rank cutoff are dropped from it.
    """
    t = as_matrix(t)
    u, s, vh = np.linalg.svd(t, full_matrices=False)
    cut = tol.cutoff(t.shape, s[0] if s.size else 0.0)
    r = int(np.sum(s > cut))
    v = u[:, :r] @ vh[:r]
    abs_t = adjoint(vh) @ (s[:, None] * vh)
    return v, abs_t


def abs_op(t):
    """``|t| = (t^* t)^{1/2}`` via the SVD."""
    t = as_matrix(t)
    _, s, vh = np.linalg.svd(t, full_matrices=False)
    return adjoint(vh) @ (s[:, None] * vh)


def psd_power(m, alpha):
    """Fractional power of a positive semidefinite matrix (negative noise clipped)."""
    w, v = np.linalg.eigh((m + adjoint(m)) / 2)
    w = np.clip(w, 0.0, None)
    return (v * w**alpha) @ adjoint(v)


def range_basis(t, tol=DEFAULT_TOL):
    """Orthonormal frame of the column space; rank = #singular values > cutoff."""
    t = as_matrix(t)
    u, s, _ = np.linalg.svd(t, full_matrices=False)
    cut = tol.cutoff(t.shape, s[0] if s.size else 0.0)
    r = int(np.sum(s > cut))
    return Subspace(canonical_frame(u[:, :r]), tol)


def null_basis(t, tol=DEFAULT_TOL):
    """Orthonormal frame of the null space (right singular vectors at or below cutoff)."""
    t = as_matrix(t)
    _, s, vh = np.linalg.svd(t, full_matrices=True)
    cut = tol.cutoff(t.shape, s[0] if s.size else 0.0)
    r = int(np.sum(s > cut))
    return Subspace(canonical_frame(adjoint(vh[r:])), tol)


def subspace_intersect(a, b, tol=DEFAULT_TOL):
    """Frame spanning ``a ∩ b``.

    The singular values of ``(I - P_a) B`` are the sines of the principal
    angles seen from ``b``; right singular vectors whose sine is within
    :meth:`Tolerance.sine_cut` give the shared principal vectors.
    """
    n = a.ambient_dim
    if b.ambient_dim != n:
        raise AmbientMismatch(f"ambient dimensions differ: {n} vs {b.ambient_dim}")
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(n, tol)
    residual = b.frame - a.frame @ (adjoint(a.frame) @ b.frame)
    _, s, vh = np.linalg.svd(residual, full_matrices=True)
    sines = np.zeros(b.dim)
    sines[: s.size] = s
    keep = sines <= tol.sine_cut(n)
    if not keep.any():
        return Subspace.zero(n, tol)
    shared = b.frame @ adjoint(vh[keep])
    q, _ = np.linalg.qr(shared)
    return Subspace(canonical_frame(q), tol)


def complement_within(outer, inner, tol=DEFAULT_TOL):
    """``outer ⊖ inner`` for ``inner`` contained in ``outer``."""
    if outer.ambient_dim != inner.ambient_dim:
        raise AmbientMismatch("ambient dimensions differ")
    n = outer.ambient_dim
    if outer.dim == 0:
        return Subspace.zero(n, tol)
    rest = outer.frame - inner.frame @ (adjoint(inner.frame) @ outer.frame)
    u, s, _ = np.linalg.svd(rest, full_matrices=False)
    r = int(np.sum(s > 0.5))
    return Subspace(canonical_frame(u[:, :r]), tol)


class ProjectionCheck(NamedTuple):
    ok: bool
    hermitian_residual: float
    idempotent_residual: float

    def __bool__(self):
        return self.ok


def is_projection(m, tol=DEFAULT_TOL):
    """Check ``m = m^* = m^2`` within ``tol.residual``; residuals are reported."""
    m = as_matrix(m)
    _require_square(m)
    h = operator_norm(m - adjoint(m))
    i = operator_norm(m - m @ m)
    return ProjectionCheck(h <= tol.residual and i <= tol.residual, h, i)


def principal_angles(a, b):
    """Principal angles (radians, ascending) between two subspaces."""
    if a.dim == 0 or b.dim == 0:
        return np.zeros(0)
    s = np.linalg.svd(adjoint(a.frame) @ b.frame, compute_uv=False)
    return np.arccos(np.clip(s, 0.0, 1.0))


def haar_unitary(n, rng):
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
