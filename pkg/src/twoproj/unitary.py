"""The unitary ``U = V1 + P∧Q - V2 - P_N`` intertwining ``(P, Q)`` with ``(I-Q, I-P)``.

``V1`` and ``V2`` are the partial isometries in the polar decompositions of
``T1 = P(I - Q)`` and ``T2 = (I - P)Q``. The unitary satisfies

    U (Q - P∧Q) U^* = I - P - P_N,
    U (P - P∧Q) U^* = I - Q - P_N.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import FrameInconsistency
from .halmos import HalmosDecomposition
from .linalg import (
    Tolerance,
    abs_op,
    adjoint,
    operator_norm,
    polar_partial_isometry,
    psd_power,
)


@dataclass(frozen=True, eq=False)
class UnitaryCertificate:
    u: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    p_r: np.ndarray
    p_n: np.ndarray
    unitarity_residual: float
    intertwine1_residual: float
    intertwine2_residual: float
    annihilation_residual: float
    tolerance: float

    @property
    def residuals(self):
        return {
            "unitarity": self.unitarity_residual,
            "intertwine1": self.intertwine1_residual,
            "intertwine2": self.intertwine2_residual,
            "annihilation": self.annihilation_residual,
        }

    @property
    def accepted(self):
        return all(r <= self.tolerance for r in self.residuals.values())


def polar_factors(pair):
    """``(V1, V2)`` with the rank cutoff tied to the pair's principal-angle threshold."""
    i = pair.identity
    cut = Tolerance(rank_cut=pair.sine_cut, residual=pair.tol.residual)
    v1, _ = polar_partial_isometry(pair.p @ (i - pair.q), cut)
    v2, _ = polar_partial_isometry((i - pair.p) @ pair.q, cut)
    return v1, v2


def build_unitary(pair, tolerance=None):
    tolerance = pair.tol.residual if tolerance is None else tolerance
    i = pair.identity
    p, q, pr, pn = pair.p, pair.q, pair.p_r, pair.p_n
    v1, v2 = polar_factors(pair)
    u = v1 + pr - v2 - pn
    unitarity = max(operator_norm(u @ adjoint(u) - i), operator_norm(adjoint(u) @ u - i))
    inter1 = operator_norm(u @ (q - pr) @ adjoint(u) - (i - p - pn))
    inter2 = operator_norm(u @ (p - pr) @ adjoint(u) - (i - q - pn))
    zeros = [
        adjoint(v1) @ pr, adjoint(v2) @ pn, adjoint(v1) @ v2, adjoint(v1) @ pn, pr @ v2, pr @ pn,
        v2 @ pr, v1 @ pn, v2 @ adjoint(v1), v2 @ pn, pr @ adjoint(v1),
    ]
    annihilation = max(operator_norm(z) for z in zeros)
    return UnitaryCertificate(
        u, v1, v2, pr, pn, unitarity, inter1, inter2, annihilation, tolerance
    )


def block_form_unitary(dec: HalmosDecomposition):
    """``U`` assembled from the Halmos data: ``diag(I, I, -I, -I) ⊕ Y`` with

    ``Y = [[(I-A)^½, -A^½ U0^*], [-U0 A^½, -U0 (I-A)^½ U0^*]]`` on H5 ⊕ H6.
    """
    subs = dec.subspaces()
    n = dec.ambient_dim
    if sum(s.dim for s in subs) != n:
        raise FrameInconsistency(f"subspace dimensions {dec.dims()} do not add up to {n}")
    h1, h2, h3, h4 = dec.corners
    u = h1.projector() + h2.projector() - h3.projector() - h4.projector()
    if dec.h5.dim:
        u = u + _embed_y(dec)
    return u


def generic_y(a_op, u0):
    eye = np.eye(a_op.shape[0])
    sa = psd_power(a_op, 0.5)
    sc = psd_power(eye - a_op, 0.5)
    return np.block(
        [
            [sc, -sa @ adjoint(u0)],
            [-u0 @ sa, -u0 @ sc @ adjoint(u0)],
        ]
    )


def _embed_y(dec):
    g = np.hstack([dec.h5.frame, dec.h6.frame])
    return g @ generic_y(dec.a_op, dec.u0) @ adjoint(g)


def check_absolute_value_identity(pair):
    """``|| |T1| + |T2| - |T1^*| - |T2^*| ||`` for ``T1 = P(I-Q)``, ``T2 = (I-P)Q``."""
    i = pair.identity
    t1 = pair.p @ (i - pair.q)
    t2 = (i - pair.p) @ pair.q
    lhs = abs_op(t1) + abs_op(t2)
    rhs = abs_op(adjoint(t1)) + abs_op(adjoint(t2))
    return operator_norm(lhs - rhs)


class PowerExchange(NamedTuple):
    exchange: float
    combined: float


def check_power_exchange(pair):
    """Residuals of the partial-isometry power identities.

    ``exchange`` bounds ``(V^*)^2 V = |T| = V^* V^2`` and
    ``V^2 V^* = |T^*| = V (V^*)^2`` for both ``i = 1, 2``; ``combined`` is
    ``|| V1^* V1^2 + V2^* V2^2 - V1^2 V1^* - V2^2 V2^* ||``.
    """
    i = pair.identity
    v1, v2 = polar_factors(pair)
    worst = 0.0
    for v, t in ((v1, pair.p @ (i - pair.q)), (v2, (i - pair.p) @ pair.q)):
        vs = adjoint(v)
        a, a_star = abs_op(t), abs_op(adjoint(t))
        for lhs, rhs in (
            (vs @ vs @ v, a),
            (vs @ v @ v, a),
            (v @ v @ vs, a_star),
            (v @ vs @ vs, a_star),
        ):
            worst = max(worst, operator_norm(lhs - rhs))
    combined = operator_norm(
        adjoint(v1) @ v1 @ v1 + adjoint(v2) @ v2 @ v2 - v1 @ v1 @ adjoint(v1) - v2 @ v2 @ adjoint(v2)
    )
    return PowerExchange(worst, combined)


def conjugation_consequence(pair, cert=None):
    """``| ||(P-P∧Q)(Q-P∧Q)|| - ||(I-Q-P_N)(I-P-P_N)|| |`` and the conjugated operator gap."""
    cert = build_unitary(pair) if cert is None else cert
    i = pair.identity
    pr, pn = cert.p_r, cert.p_n
    left = (pair.p - pr) @ (pair.q - pr)
    right = (i - pair.q - pn) @ (i - pair.p - pn)
    # U (P-P∧Q)(Q-P∧Q) U^* = (I-Q-P_N)(I-P-P_N)
    gap = operator_norm(cert.u @ left @ adjoint(cert.u) - right)
    return abs(operator_norm(left) - operator_norm(right)), gap
