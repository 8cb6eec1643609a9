"""Validated pairs of orthogonal projections and what they determine.

Every pair of projections on a finite-dimensional space is matched: the
infimum ``P ∧ Q`` (projection onto ``R(P) ∩ R(Q)``) always exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import NoConvergence, NotAProjection, ValidationError
from .linalg import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    as_matrix,
    haar_unitary,
    is_projection,
    operator_norm,
    range_basis,
    subspace_intersect,
)

# Singular values of a projection are 0 or 1.
_PROJECTION_CUT = Tolerance(rank_cut=0.5)


def projection_range(p, tol=DEFAULT_TOL):
    return Subspace(range_basis(p, _PROJECTION_CUT).frame, tol)


@dataclass(frozen=True, eq=False)
class ProjectionPair:
    p: np.ndarray
    q: np.ndarray
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        p = as_matrix(self.p, "p")
        q = as_matrix(self.q, "q")
        if p.shape != q.shape:
            raise ValidationError(f"p and q differ in shape: {p.shape} vs {q.shape}")
        for name, m in (("p", p), ("q", q)):
            if m.shape[0] != m.shape[1]:
                raise ValidationError(f"{name} is not square: {m.shape}")
            check = is_projection(m, self.tol)
            if not check:
                raise NotAProjection(
                    f"{name} is not a projection (hermitian residual "
                    f"{check.hermitian_residual:.3e}, idempotent residual "
                    f"{check.idempotent_residual:.3e})"
                )
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def dim(self):
        return self.p.shape[0]

    @property
    def identity(self):
        return np.eye(self.dim, dtype=complex)

    @property
    def sine_cut(self):
        return self.tol.sine_cut(self.dim)

    def swapped(self):
        return ProjectionPair(self.q, self.p, self.tol)

    def complement(self):
        """The pair ``(I - Q, I - P)``."""
        i = self.identity
        return ProjectionPair(i - self.q, i - self.p, self.tol)

    @cached_property
    def range_p(self):
        return projection_range(self.p, self.tol)

    @cached_property
    def range_q(self):
        return projection_range(self.q, self.tol)

    @cached_property
    def null_p(self):
        return projection_range(self.identity - self.p, self.tol)

    @cached_property
    def null_q(self):
        return projection_range(self.identity - self.q, self.tol)

    @cached_property
    def p_r(self):
        """``P ∧ Q``."""
        return infimum_direct(self)

    @cached_property
    def p_n(self):
        """Projection onto ``N(P) ∩ N(Q)``."""
        return complement_infimum(self)

    def __repr__(self):
        return f"ProjectionPair(dim={self.dim})"


class CornerSubspaces(NamedTuple):
    h1: Subspace  # R(P) ∩ R(Q)
    h2: Subspace  # R(P) ∩ N(Q)
    h3: Subspace  # N(P) ∩ R(Q)
    h4: Subspace  # N(P) ∩ N(Q)

    def dims(self):
        return tuple(h.dim for h in self)


def infimum_direct(pair):
    return subspace_intersect(pair.range_p, pair.range_q, pair.tol).projector()


class IterativeInfimum(NamedTuple):
    matrix: np.ndarray
    iterations: int
    ratio_estimate: float


def infimum_iterative(pair, eps=1e-12, max_iter=10_000):
    """``P ∧ Q`` as the limit of ``(PQP)^n``.

    Stops at the first ``n`` with ``||M_{n+1} - M_n|| <= eps``. The ratio of
    the last two successive differences estimates the contraction factor,
    which is the largest eigenvalue of ``PQP - P ∧ Q``.
    """
    if not eps > 0:
        raise ValidationError("eps must be positive")
    pqp = pair.p @ pair.q @ pair.p
    current = pqp
    prev_step = None
    ratio = 0.0
    for n in range(1, max_iter + 1):
        nxt = current @ pqp
        step = operator_norm(nxt - current)
        if prev_step is not None and prev_step > 0:
            ratio = step / prev_step
        if step <= eps:
            return IterativeInfimum(nxt, n, ratio)
        prev_step = step
        current = nxt
    raise NoConvergence(f"(PQP)^n did not settle within {max_iter} iterations")


def corner_subspaces(pair):
    tol = pair.tol
    return CornerSubspaces(
        subspace_intersect(pair.range_p, pair.range_q, tol),
        subspace_intersect(pair.range_p, pair.null_q, tol),
        subspace_intersect(pair.null_p, pair.range_q, tol),
        subspace_intersect(pair.null_p, pair.null_q, tol),
    )


def friedrichs_angle(pair):
    """Cosine of the Friedrichs angle, ``||(P - P∧Q)(Q - P∧Q)||``."""
    pr = pair.p_r
    return min(operator_norm((pair.p - pr) @ (pair.q - pr)), 1.0)


class AngleSymmetry(NamedTuple):
    lhs: float
    rhs: float
    residual: float


def check_angle_symmetry(pair):
    """Compare the Friedrichs cosine of ``(P, Q)`` with that of ``(I-Q, I-P)``."""
    lhs = friedrichs_angle(pair)
    rhs = friedrichs_angle(pair.complement())
    return AngleSymmetry(lhs, rhs, abs(lhs - rhs))


def complement_infimum(pair):
    return subspace_intersect(pair.null_p, pair.null_q, pair.tol).projector()


def commute(pair):
    return operator_norm(pair.p @ pair.q - pair.q @ pair.p) <= pair.tol.residual


# -- generators -------------------------------------------------------------


def two_by_two_pair(a):
    """The 2-dim generic pair with ``P = diag(1, 0)`` and ``PQP = diag(a, 0)``."""
    c, s = np.sqrt(a), np.sqrt(1.0 - a)
    p = np.diag([1.0, 0.0]).astype(complex)
    q = np.array([[c * c, c * s], [c * s, s * s]], dtype=complex)
    return p, q


def canonical_blocks(corner_dims, angles):
    """Block-diagonal ``(P, Q)`` with the given corner dims and generic angles."""
    d1, d2, d3, d4 = corner_dims
    pdiag = [1.0] * d1 + [1.0] * d2 + [0.0] * d3 + [0.0] * d4
    qdiag = [1.0] * d1 + [0.0] * d2 + [1.0] * d3 + [0.0] * d4
    blocks_p = [np.diag(pdiag)] if pdiag else []
    blocks_q = [np.diag(qdiag)] if qdiag else []
    for theta in angles:
        p2, q2 = two_by_two_pair(np.cos(theta) ** 2)
        blocks_p.append(p2)
        blocks_q.append(q2)
    p = _block_diag(blocks_p)
    q = _block_diag(blocks_q)
    return p, q


def _block_diag(blocks):
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i : i + k, i : i + k] = b
        i += k
    return out


def _hermitize(m):
    return (m + m.conj().T) / 2


def pair_with_angles(corner_dims, angles, rng=None, tol=DEFAULT_TOL):
    """Pair with prescribed corner dimensions and generic principal angles.

    The canonical block form is conjugated by a Haar unitary when ``rng`` is
    given.
    """
    p, q = canonical_blocks(corner_dims, angles)
    if rng is not None:
        w = haar_unitary(p.shape[0], rng)
        p = _hermitize(w @ p @ w.conj().T)
        q = _hermitize(w @ q @ w.conj().T)
    return ProjectionPair(p, q, tol)


def random_pair(dim, rng, min_angle=0.05, tol=DEFAULT_TOL):
    """Seeded random pair with randomly split corners and generic angles.

    Generic principal angles are drawn from ``[min_angle, pi/2 - min_angle]``
    so every instance stays clear of the rank thresholds.
    """
    if dim < 1:
        raise ValidationError("dim must be positive")
    m = int(rng.integers(0, dim // 2 + 1))
    rest = dim - 2 * m
    cuts = np.sort(rng.integers(0, rest + 1, size=3))
    corner_dims = (
        int(cuts[0]),
        int(cuts[1] - cuts[0]),
        int(cuts[2] - cuts[1]),
        int(rest - cuts[2]),
    )
    angles = rng.uniform(min_angle, np.pi / 2 - min_angle, size=m)
    return pair_with_angles(corner_dims, angles, rng, tol)


def haar_pair(dim, rng, tol=DEFAULT_TOL):
    """Pair of projections onto independent random subspaces of random rank."""
    kp, kq = (int(k) for k in rng.integers(0, dim + 1, size=2))
    projs = []
    for k in (kp, kq):
        z = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
        f, _ = np.linalg.qr(z) if k else (np.zeros((dim, 0)), None)
        projs.append(_hermitize(f @ f.conj().T))
    return ProjectionPair(projs[0], projs[1], tol)
