"""Six-subspace Halmos decomposition of a pair of projections.

Up to the unitary that lines up the frames,

    P = I ⊕ I ⊕ 0 ⊕ 0 ⊕ I ⊕ 0,
    Q = I ⊕ 0 ⊕ I ⊕ 0 ⊕ Q0,
    Q0 = [[A,                      A^½(I-A)^½ U0^*],
          [U0 A^½(I-A)^½,          U0 (I-A) U0^*  ]]

on H1 ⊕ ... ⊕ H4 ⊕ (H5 ⊕ H6), where ``A`` is a positive contraction on H5
with neither 0 nor 1 as an eigenvalue and ``U0: H5 -> H6`` is unitary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FrameInconsistency
from .linalg import (
    Subspace,
    adjoint,
    canonical_frame,
    complement_within,
    direct_sum,
    hermitian_eig,
    operator_norm,
    psd_power,
)
from .pairs import CornerSubspaces, ProjectionPair, corner_subspaces


@dataclass(frozen=True, eq=False)
class HalmosDecomposition:
    corners: CornerSubspaces
    h5: Subspace
    h6: Subspace
    a_op: np.ndarray
    u0: np.ndarray

    @property
    def generic_dim(self):
        return self.h5.dim

    @property
    def degenerate(self):
        """True when the generic part H5 ⊕ H6 is trivial."""
        return self.h5.dim == 0

    @property
    def ambient_dim(self):
        return self.h5.ambient_dim

    def dims(self):
        return self.corners.dims() + (self.h5.dim, self.h6.dim)

    def subspaces(self):
        return tuple(self.corners) + (self.h5, self.h6)


def _move(sub, vectors):
    """Append columns to a subspace frame."""
    if vectors.shape[1] == 0:
        return sub
    return Subspace(canonical_frame(np.hstack([sub.frame, vectors])), sub.tol)


def _split_endpoints(frame, compression, delta):
    """Split ``frame`` by eigenvalues of ``compression``: (≈1, ≈0, interior)."""
    if frame.shape[1] == 0:
        empty = frame[:, :0]
        return empty, empty, frame
    w, v = hermitian_eig(compression)
    rotated = frame @ v
    high = w >= 1.0 - delta
    low = w <= delta
    mid = ~(high | low)
    return rotated[:, high], rotated[:, low], rotated[:, mid]


def decompose(pair):
    """Halmos decomposition of ``pair``.

    ``a_op`` is the compression of Q to H5 and ``u0`` the unitary factor of
    the H6 x H5 corner of Q, both in frame coordinates. The H5 frame is
    rephased so that every column of ``u0`` has its first non-negligible
    entry real positive. Generic directions whose compression eigenvalue is
    within ``sine_cut**2`` of 0 or 1 are moved to the corners first.
    """
    tol = pair.tol
    corners = corner_subspaces(pair)
    h1, h2, h3, h4 = corners
    h5 = complement_within(pair.range_p, direct_sum(h1, h2), tol)
    h6 = complement_within(pair.null_p, direct_sum(h3, h4), tol)

    delta = pair.sine_cut**2
    e5, e6 = h5.frame, h6.frame
    to_h1, to_h2, e5 = _split_endpoints(e5, adjoint(e5) @ pair.q @ e5, delta)
    to_h3, to_h4, e6 = _split_endpoints(e6, adjoint(e6) @ pair.q @ e6, delta)
    if any(x.shape[1] for x in (to_h1, to_h2, to_h3, to_h4)):
        h1, h2 = _move(h1, to_h1), _move(h2, to_h2)
        h3, h4 = _move(h3, to_h3), _move(h4, to_h4)
        corners = CornerSubspaces(h1, h2, h3, h4)
    if e5.shape[1] != e6.shape[1]:
        raise FrameInconsistency(
            f"generic part is unbalanced: dim H5 = {e5.shape[1]}, dim H6 = {e6.shape[1]}"
        )
    m = e5.shape[1]
    if m == 0:
        empty = np.zeros((0, 0), dtype=complex)
        return HalmosDecomposition(corners, Subspace(e5, tol), Subspace(e6, tol), empty, empty)

    corner = adjoint(e6) @ pair.q @ e5
    w, _, zh = np.linalg.svd(corner)
    u0 = w @ zh
    phases = np.ones(m, dtype=complex)
    for j in range(m):
        col = u0[:, j]
        i = int(np.argmax(np.abs(col) > 1e-8 * np.abs(col).max()))
        phases[j] = np.conj(col[i]) / abs(col[i])
    e5 = e5 * phases
    u0 = u0 * phases
    a_op = adjoint(e5) @ pair.q @ e5
    a_op = (a_op + adjoint(a_op)) / 2
    return HalmosDecomposition(corners, Subspace(e5, tol), Subspace(e6, tol), a_op, u0)


def generic_block(a_op, u0):
    """``Q0`` on H5 ⊕ H6 in frame coordinates."""
    m = a_op.shape[0]
    eye = np.eye(m)
    sa = psd_power(a_op, 0.5)
    sc = psd_power(eye - a_op, 0.5)
    off = sa @ sc
    return np.block(
        [
            [a_op, off @ adjoint(u0)],
            [u0 @ off, u0 @ (eye - a_op) @ adjoint(u0)],
        ]
    )


def reconstruct(dec, ambient_dim):
    """Assemble ``(P, Q)`` in the ambient space from a decomposition."""
    subs = dec.subspaces()
    if any(s.ambient_dim != ambient_dim for s in subs):
        raise FrameInconsistency("frames do not live in the requested ambient space")
    if sum(s.dim for s in subs) != ambient_dim:
        raise FrameInconsistency(
            f"subspace dimensions {dec.dims()} do not add up to {ambient_dim}"
        )
    if dec.a_op.shape != (dec.h5.dim, dec.h5.dim) or dec.u0.shape != (dec.h6.dim, dec.h5.dim):
        raise FrameInconsistency("generic blocks do not match the H5/H6 frames")
    h1, h2, h3, h4 = dec.corners
    p = h1.projector() + h2.projector() + dec.h5.projector()
    q = h1.projector() + h3.projector()
    if dec.h5.dim:
        g = np.hstack([dec.h5.frame, dec.h6.frame])
        q = q + g @ generic_block(dec.a_op, dec.u0) @ adjoint(g)
    tol = dec.h5.tol
    return ProjectionPair((p + adjoint(p)) / 2, (q + adjoint(q)) / 2, tol)


def generic_spectrum(dec):
    """Eigenvalues of ``A`` in descending order (empty for a trivial generic part)."""
    if dec.degenerate:
        return []
    return [float(x) for x in np.linalg.eigvalsh(dec.a_op)[::-1]]


def decomposition_report(dec, pair=None):
    """Plain-data summary: dims of H1..H6, sp(A) and, given the pair, round-trip residuals."""
    doc = {
        "dims": dict(zip(["h1", "h2", "h3", "h4", "h5", "h6"], dec.dims())),
        "generic_spectrum": generic_spectrum(dec),
        "degenerate_generic_part": dec.degenerate,
    }
    if pair is not None:
        rec = reconstruct(dec, pair.dim)
        doc["residuals"] = {
            "p_roundtrip": operator_norm(pair.p - rec.p),
            "q_roundtrip": operator_norm(pair.q - rec.q),
            "u0_unitarity": operator_norm(adjoint(dec.u0) @ dec.u0 - np.eye(dec.h5.dim))
            if dec.h5.dim
            else 0.0,
        }
    return doc
