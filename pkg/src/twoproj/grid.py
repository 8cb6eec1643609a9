"""Grid model of the Hilbert C*-module C([0,1]; M2(C)).

An element is sampled on the uniform grid ``t_j = j / (n - 1)``; norms are
sup-norms, i.e. the maximum over samples of the pointwise operator norm.
The scenario functions rebuild the module-level counterexamples and return
:class:`Certificate` objects: structural facts checked exactly on the grid,
plus randomized sweeps as corroboration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AngleTooLarge, ValidationError
from .linalg import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    operator_norm,
    range_basis,
    subspace_intersect,
)
from .pairs import check_angle_symmetry, friedrichs_angle

_PROJECTION_CUT = Tolerance(rank_cut=0.5)


@dataclass(frozen=True)
class GridSpec:
    n_samples: int = 1001

    def __post_init__(self):
        if int(self.n_samples) != self.n_samples or self.n_samples < 3:
            raise ValidationError(f"n_samples must be an integer >= 3, got {self.n_samples}")

    @property
    def points(self):
        return np.linspace(0.0, 1.0, self.n_samples)

    @property
    def spacing(self):
        return 1.0 / (self.n_samples - 1)

    def index_of(self, t):
        """Sample index of ``t`` or ``None`` if ``t`` is not a grid point."""
        j = round(t * (self.n_samples - 1))
        return j if abs(j * self.spacing - t) < 1e-12 else None

    @property
    def midpoint(self):
        return self.index_of(0.5)


def quarter_wave(t):
    """``(cos(pi t / 2), sin(pi t / 2))``, exact at t = 0, 1/2 and 1."""
    t = np.asarray(t, dtype=float)
    return np.sin(np.pi / 2 * (1.0 - t)), np.sin(np.pi / 2 * t)


def pointwise_norms(values):
    """Operator norm of every sample (closed form for 2x2 blocks)."""
    values = np.asarray(values)
    if values.shape[-2:] == (2, 2):
        fro = np.sum(np.abs(values) ** 2, axis=(-2, -1))
        det = np.abs(values[..., 0, 0] * values[..., 1, 1] - values[..., 0, 1] * values[..., 1, 0])
        disc = np.sqrt(np.clip(fro * fro - 4.0 * det * det, 0.0, None))
        return np.sqrt((fro + disc) / 2.0)
    return np.linalg.norm(values, 2, axis=(-2, -1))


@dataclass(frozen=True, eq=False)
class GridMatrixFunction:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 3 or v.shape[0] != self.grid.n_samples or v.shape[1] != v.shape[2]:
            raise ValidationError(
                f"values must have shape ({self.grid.n_samples}, d, d), got {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise ValidationError("grid function has non-finite values")
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, grid, matrix):
        m = np.asarray(matrix, dtype=complex)
        return cls(grid, np.broadcast_to(m, (grid.n_samples,) + m.shape).copy())

    @classmethod
    def zeros(cls, grid, d=2):
        return cls(grid, np.zeros((grid.n_samples, d, d), dtype=complex))

    @classmethod
    def identity(cls, grid, d=2):
        return cls.constant(grid, np.eye(d))

    def at(self, t):
        j = self.grid.index_of(t)
        if j is None:
            raise ValidationError(f"t = {t} is not a grid point")
        return self.values[j]

    def adjoint(self):
        return GridMatrixFunction(self.grid, np.conj(np.swapaxes(self.values, -1, -2)))

    def _other(self, other):
        if isinstance(other, GridMatrixFunction):
            if other.grid != self.grid:
                raise ValidationError("grid functions live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return GridMatrixFunction(self.grid, self.values + self._other(other))

    def __sub__(self, other):
        return GridMatrixFunction(self.grid, self.values - self._other(other))

    def __matmul__(self, other):
        return GridMatrixFunction(self.grid, self.values @ self._other(other))

    def __mul__(self, scalar):
        return GridMatrixFunction(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return GridMatrixFunction(self.grid, -self.values)

    def norms(self):
        return pointwise_norms(self.values)

    def sup_norm(self):
        return float(np.max(self.norms()))


def sup_norm(f):
    return f.sup_norm()


@dataclass(frozen=True, eq=False)
class GridPair:
    """Pointwise projections ``p``, ``q`` on a grid.

    ``boundary_diagonal`` models the subalgebra of functions that are
    diagonal at t = 0 and t = 1. ``infimum`` is the continuum ``P ∧ Q`` of
    the module (``None`` means the zero projection); it is deliberately kept
    apart from the pointwise infimum, which can be larger.
    """

    p: GridMatrixFunction
    q: GridMatrixFunction
    boundary_diagonal: bool = False
    infimum: GridMatrixFunction | None = None
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        if self.p.grid != self.q.grid:
            raise ValidationError("p and q live on different grids")
        for name, f in (("p", self.p), ("q", self.q)):
            v = f.values
            herm = pointwise_norms(v - np.conj(np.swapaxes(v, -1, -2)))
            idem = pointwise_norms(v - v @ v)
            worst = max(herm.max(), idem.max())
            if worst > self.tol.residual:
                raise ValidationError(f"{name} is not pointwise a projection (residual {worst:.3e})")
            if self.boundary_diagonal:
                for j in (0, -1):
                    if abs(v[j, 0, 1]) > self.tol.residual or abs(v[j, 1, 0]) > self.tol.residual:
                        raise ValidationError(f"{name} is not diagonal at the boundary")

    @property
    def grid(self):
        return self.p.grid

    @property
    def continuum_infimum(self):
        if self.infimum is None:
            return GridMatrixFunction.zeros(self.grid, self.p.values.shape[-1])
        return self.infimum

    def complement(self):
        """``(I - Q, I - P)``."""
        one = GridMatrixFunction.identity(self.grid, self.p.values.shape[-1])
        return GridPair(one - self.q, one - self.p, self.boundary_diagonal, None, self.tol)


def make_counterexample_pair(grid, variant="constant_p"):
    """The projections of the counterexamples.

    ``constant_p``: ``P = diag(1, 0)``, ``Q(t) = [[c^2, sc], [sc, s^2]]``.
    ``rotated_p``: ``P(t) = [[c^2, -sc], [-sc, s^2]]`` with the same Q, on
    the boundary-diagonal subalgebra. Here ``c = cos(pi t/2)``,
    ``s = sin(pi t/2)``. Both have trivial continuum infimum.
    """
    c, s = quarter_wave(grid.points)
    q = np.empty((grid.n_samples, 2, 2), dtype=complex)
    q[:, 0, 0], q[:, 0, 1], q[:, 1, 0], q[:, 1, 1] = c * c, s * c, s * c, s * s
    if variant == "constant_p":
        p = np.broadcast_to(np.diag([1.0, 0.0]), q.shape).astype(complex)
        diag = False
    elif variant == "rotated_p":
        p = np.empty_like(q)
        p[:, 0, 0], p[:, 0, 1], p[:, 1, 0], p[:, 1, 1] = c * c, -s * c, -s * c, s * s
        diag = True
    else:
        raise ValidationError(f"unknown variant {variant!r}")
    return GridPair(GridMatrixFunction(grid, p), GridMatrixFunction(grid, q), diag)


def _block_infimum(p, q):
    rp = Subspace(range_basis(p, _PROJECTION_CUT).frame)
    rq = Subspace(range_basis(q, _PROJECTION_CUT).frame)
    return subspace_intersect(rp, rq).projector()


def pointwise_infimum(gp):
    """Sample-by-sample projection onto ``range p(t) ∩ range q(t)``."""
    vals = np.array([_block_infimum(a, b) for a, b in zip(gp.p.values, gp.q.values)])
    return GridMatrixFunction(gp.grid, vals)


def pointwise_range_projector(f):
    """Sample-by-sample projection onto the range of ``f(t)`` (default rank cutoff)."""
    vals = np.array([range_basis(m).projector() for m in f.values])
    return GridMatrixFunction(f.grid, vals)


def random_grid_function(grid, rng, degree=3):
    """Random M2-valued trigonometric polynomial of the given degree."""
    t = grid.points
    k = np.arange(degree + 1)
    basis = np.concatenate([np.cos(np.pi * np.outer(t, k)), np.sin(np.pi * np.outer(t, k[1:]))], axis=1)
    coef = rng.standard_normal((basis.shape[1], 2, 2)) + 1j * rng.standard_normal((basis.shape[1], 2, 2))
    coef /= np.sqrt(basis.shape[1])
    return GridMatrixFunction(grid, np.einsum("tb,bij->tij", basis, coef))


def random_grid_functions(grid, rng, count, degree=3):
    """``count`` random trigonometric polynomials stacked as ``(count, n, 2, 2)``."""
    t = grid.points
    k = np.arange(degree + 1)
    basis = np.concatenate([np.cos(np.pi * np.outer(t, k)), np.sin(np.pi * np.outer(t, k[1:]))], axis=1)
    nb = basis.shape[1]
    coef = rng.standard_normal((count, nb, 2, 2)) + 1j * rng.standard_normal((count, nb, 2, 2))
    coef /= np.sqrt(nb)
    return np.einsum("tb,cbij->ctij", basis, coef)


# -- certificates -----------------------------------------------------------


@dataclass
class Fact:
    name: str
    passed: bool
    value: float | None = None
    detail: str = ""

    def to_doc(self):
        doc = {"name": self.name, "passed": bool(self.passed)}
        if self.value is not None:
            doc["value"] = float(self.value)
        if self.detail:
            doc["detail"] = self.detail
        return doc


@dataclass
class Certificate:
    scenario: str
    facts: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, name, passed, value=None, detail=""):
        self.facts.append(Fact(name, bool(passed), None if value is None else float(value), detail))

    @property
    def passed(self):
        return all(f.passed for f in self.facts)

    def fact(self, name):
        for f in self.facts:
            if f.name == name:
                return f
        raise KeyError(name)

    def to_doc(self):
        return {
            "scenario": self.scenario,
            "passed": self.passed,
            "facts": [f.to_doc() for f in self.facts],
            "data": self.data,
        }


def _interior_vanishes(inf):
    norms = inf.norms()
    return float(norms[1:-1].max()) if norms.size > 2 else 0.0


def _min_sup_over_trials(make_residual, grid, trials, seed, chunk=100):
    """Minimum over random x of sup_t ||residual(x)(t)||, plus the exact bound sample."""
    rng = np.random.default_rng(seed)
    best = math.inf
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        xs = random_grid_functions(grid, rng, m)
        res = make_residual(xs)
        best = min(best, float(pointwise_norms(res).max(axis=1).min()))
        done += m
    return best


def obstruction_semiharmonious(grid=GridSpec(), trials=1000, seed=0):
    """``a(t) = s_t I`` lies in ``M`` but not in ``closure R(T)``, ``T = (P + I - Q) a``."""
    gp = make_counterexample_pair(grid)
    cert = Certificate("semiharmonious-not-harmonious")
    p, q = gp.p.values, gp.q.values
    eye = np.eye(2)
    c, s = quarter_wave(grid.points)
    a = s[:, None, None] * eye
    t_op = (p + eye - q) @ a

    row = t_op[-1, 1, :]
    cert.add("T(1) has zero second row", np.all(row == 0), float(np.abs(row).max()),
             "so (Tx)(1) has zero second row for every x and ||Tx - a|| >= 1")
    cert.add("x = 0 gives sup ||a|| = 1", abs(pointwise_norms(-a).max() - 1.0) <= 1e-15,
             float(pointwise_norms(-a).max()))

    rng = np.random.default_rng(seed)
    xs = random_grid_functions(grid, rng, min(trials, 50))
    txs = t_op[None] @ xs
    cert.add("(Tx)(1) second row exactly zero for sampled x", np.all(txs[:, -1, 1, :] == 0))

    worst = _min_sup_over_trials(lambda xs: t_op[None] @ xs - a[None], grid, trials, seed)
    cert.add("min_x sup ||Tx - a|| >= 1 - 1e-12", worst >= 1 - 1e-12, worst,
             f"{trials} random trigonometric x")

    # a in M: pointwise a(t) lies in range G(t), G = (P+Q)(2I-P-Q); closure witness via
    # regularised preimages x_eps = (G + eps)^{-1} a.
    g = (p + q) @ (2 * eye - p - q)
    proj = pointwise_range_projector(GridMatrixFunction(grid, g)).values
    dist = float(pointwise_norms(a - proj @ a).max())
    cert.add("a(t) in range G(t) at every sample", dist <= 1e-12, dist)
    witness = []
    for eps in (1e-2, 1e-4, 1e-6, 1e-8):
        x_eps = np.linalg.solve(g + eps * eye, a)
        witness.append(float(pointwise_norms(g @ x_eps - a).max()))
    decreasing = all(b < a_ for a_, b in zip(witness, witness[1:]))
    cert.add("sup ||G x_eps - a|| -> 0 (a in closure of range G)", decreasing and witness[-1] < 1e-3,
             witness[-1])
    cert.data["closure_witness"] = {"eps": [1e-2, 1e-4, 1e-6, 1e-8], "sup_residual": witness}

    u = np.empty_like(p)
    u[:, 0, 0], u[:, 0, 1], u[:, 1, 0], u[:, 1, 1] = s, -c, -c, -s
    fac = float(pointwise_norms(p - q - a @ u).max())
    uni = float(pointwise_norms(u @ np.conj(np.swapaxes(u, -1, -2)) - eye).max())
    cert.add("P - Q = a u with u unitary", max(fac, uni) <= 1e-12, max(fac, uni))

    nr = _interior_vanishes(pointwise_infimum(GridPair(gp.complement().q, gp.q)))
    cert.add("N(P) ∩ R(Q) vanishes at interior samples", nr == 0.0, nr)
    cert.data["min_sup_residual"] = worst
    return cert


def obstruction_range_2IPQ(grid=GridSpec(), trials=1000, seed=0):
    """``P`` is not in ``closure R(F)``, ``F = (2I - P - Q)(P + Q)``, because ``F(0) = 0``."""
    gp = make_counterexample_pair(grid)
    cert = Certificate("range-2ipq-fails")
    p, q = gp.p.values, gp.q.values
    eye = np.eye(2)
    _, s = quarter_wave(grid.points)
    f = (2 * eye - p - q) @ (p + q)

    cert.add("F(0) = 0 exactly", np.all(f[0] == 0), float(np.abs(f[0]).max()))
    mid = grid.midpoint
    if mid is not None:
        err = float(np.abs(f[mid] - 0.5 * eye).max())
        cert.add("F(1/2) = diag(1/2, 1/2)", err <= 1e-12, err)
    diag_err = float(pointwise_norms(f - (s * s)[:, None, None] * eye).max())
    cert.add("F(t) = s_t^2 I", diag_err <= 1e-12, diag_err)
    alt = (eye - p) @ q + (eye - q) @ p
    alt_err = float(pointwise_norms(f - alt).max())
    cert.add("F = (I-P)Q + (I-Q)P", alt_err <= 1e-12, alt_err)

    cert.add("x = 0 gives sup ||P|| = 1", pointwise_norms(p).max() == 1.0, float(pointwise_norms(p).max()))
    worst = _min_sup_over_trials(lambda xs: p[None] - f[None] @ xs, grid, trials, seed)
    cert.add("min_x sup ||P - Fx|| >= 1 - 1e-12", worst >= 1 - 1e-12, worst,
             f"{trials} random trigonometric x; (P - Fx)(0) = P(0) exactly")

    r = _interior_vanishes(pointwise_infimum(gp))
    n = _interior_vanishes(pointwise_infimum(gp.complement()))
    cert.add("R(P) ∩ R(Q) vanishes at interior samples", r == 0.0, r)
    cert.add("N(P) ∩ N(Q) vanishes at interior samples", n == 0.0, n)
    cert.data["min_sup_residual"] = worst
    return cert


def _realify(k):
    return np.block([[k.real, -k.imag], [k.imag, k.real]])


def intertwining_system(p, q, boundary_diagonal=False):
    """Real 8-unknown system for ``U P = (I - Q) U`` and ``U Q = (I - P) U``.

    Unknowns are ``(Re U, Im U)`` in row-major order. With
    ``boundary_diagonal`` the off-diagonal entries are pinned to zero.
    """
    eye = np.eye(2)
    # row-major vec: vec(A X B) = (A ⊗ B^T) vec(X)
    k1 = np.kron(eye, p.T) - np.kron(eye - q, eye)
    k2 = np.kron(eye, q.T) - np.kron(eye - p, eye)
    rows = [_realify(k1), _realify(k2)]
    if boundary_diagonal:
        pin = np.zeros((4, 8))
        for r, idx in enumerate((1, 2, 5, 6)):
            pin[r, idx] = 1.0
        rows.append(pin)
    return np.vstack(rows)


def _null_space(system, cut=1e-9):
    _, s, vh = np.linalg.svd(system)
    rank = int(np.sum(s > cut))
    return vh[rank:].T


def _as_complex_u(vec):
    z = vec[:4] + 1j * vec[4:]
    return z.reshape(2, 2)


def no_common_unitary_certificate(grid=GridSpec()):
    """No unitary solves both intertwining equations for the rotated pair."""
    gp = make_counterexample_pair(grid, "rotated_p")
    cert = Certificate("no-common-unitary")
    pts = grid.points
    mid = grid.midpoint
    eye = np.eye(2)

    r = _interior_vanishes(pointwise_infimum(gp))
    n = _interior_vanishes(pointwise_infimum(gp.complement()))
    cert.add("R = {0}: pointwise R(P) ∩ R(Q) vanishes at interior samples", r == 0.0, r)
    cert.add("N = {0}: pointwise N(P) ∩ N(Q) vanishes at interior samples", n == 0.0, n)
    ppq = gp.p.values + gp.q.values
    c, s = quarter_wave(pts)
    diag_err = float(np.abs(ppq[:, 0, 1]).max() + np.abs(ppq[:, 0, 0] - 2 * c * c).max()
                     + np.abs(ppq[:, 1, 1] - 2 * s * s).max())
    cert.add("P(t) + Q(t) = diag(2c^2, 2s^2)", diag_err <= 1e-12, diag_err)

    dims_free, dims_pinned = [], []
    forced_zero, symmetric, derived_same = True, True, True
    worst_forced = 0.0
    for j, (p, q) in enumerate(zip(gp.p.values, gp.q.values)):
        sys_free = intertwining_system(p, q)
        null = _null_space(sys_free)
        dims_free.append(null.shape[1])
        # the derived equations U(Q-P) = (Q-P)U, U(P+Q) = (2I-P-Q)U
        d1 = np.kron(eye, (q - p).T) - np.kron(q - p, eye)
        d2 = np.kron(eye, (p + q).T) - np.kron(2 * eye - p - q, eye)
        derived = np.vstack([_realify(d1), _realify(d2)])
        if _null_space(derived).shape[1] != null.shape[1] or _null_space(np.vstack([derived, sys_free])).shape[1] != null.shape[1]:
            derived_same = False
        interior = 0 < j < grid.n_samples - 1
        for col in null.T if interior else ():
            u = _as_complex_u(col)
            if abs(u[0, 1] - u[1, 0]) > 1e-9 or abs(u[0, 0] - u[1, 1]) > 1e-9:
                symmetric = False
            if j != mid:
                w = max(abs(u[0, 0]), abs(u[1, 1]))
                worst_forced = max(worst_forced, w)
                if w > 1e-9:
                    forced_zero = False
        if j in (0, grid.n_samples - 1):
            dims_pinned.append(_null_space(intertwining_system(p, q, True)).shape[1])

    dims_free = np.array(dims_free)
    cert.add("derived equations have the same solutions as the originals", derived_same)
    # at t = 0, 1 we have P = Q, so the per-sample constraints hold on the interior only
    cert.add("U12 = U21 and U11 = U22 at every interior sample", symmetric)
    cert.add("U11 = U22 = 0 at every interior sample t != 1/2", forced_zero, worst_forced)
    inner = dims_free[1:-1]
    off_mid = np.delete(inner, mid - 1) if mid is not None else inner
    cert.add("real solution dimension 2 at every interior t != 1/2", np.all(off_mid == 2), float(off_mid.max()))
    if mid is not None:
        cert.add("real solution dimension 4 at t = 1/2", dims_free[mid] == 4, float(dims_free[mid]))
    cert.add("boundary diagonality leaves only U = 0 at t = 0 and t = 1",
             dims_pinned == [0, 0], float(max(dims_pinned)))
    cert.data["solution_dims"] = [int(d) for d in dims_free]
    cert.data["solution_dims_boundary_diagonal"] = {"t=0": dims_pinned[0], "t=1": dims_pinned[1]}
    cert.data["implication_chain"] = [
        "P_R = P_N = 0, so the intertwining equations read UP = (I-Q)U and UQ = (I-P)U",
        "equivalently U(Q-P) = (Q-P)U and U(P+Q) = (2I-P-Q)U",
        "pointwise: U12 = U21, U11 = U22 and U11 (c^2 - s^2) = 0",
        "U11 vanishes on (0,1) \\ {1/2}, hence everywhere by continuity; likewise U12 = U21",
        "U(0), U(1) diagonal forces U(0) = U(1) = 0",
        "U(0) = 0 is not unitary: no common unitary solution exists",
    ]
    return cert


def nonconvergence_check(grid=GridSpec(), n_max=50):
    """``(PQP)^n`` keeps norm 1 at t = 0 although the continuum infimum is 0."""
    gp = make_counterexample_pair(grid)
    cert = Certificate("pqp-nonconvergence")
    p, q = gp.p.values, gp.q.values
    c, _ = quarter_wave(grid.points)
    pqp = p @ q @ p
    m = pqp.copy()
    worst_t0, worst_sup, worst_decay = 0.0, 0.0, 0.0
    mid = grid.midpoint
    table = []
    e11 = np.diag([1.0, 0.0])
    for n in range(1, n_max + 1):
        if n > 1:
            m = m @ pqp
        worst_t0 = max(worst_t0, float(np.abs(m[0] - e11).max()))
        sup = float(pointwise_norms(m @ p).max())
        worst_sup = max(worst_sup, abs(sup - 1.0))
        decay = float(np.abs(pointwise_norms(m[1:-1]) - c[1:-1] ** (2 * n)).max())
        worst_decay = max(worst_decay, decay)
        row = {"n": n, "sup_norm": sup}
        if mid is not None:
            row["norm_at_half"] = float(pointwise_norms(m[mid]))
        table.append(row)
    cert.add("(PQP)^n(0) = diag(1, 0) for all n", worst_t0 <= 1e-12, worst_t0)
    cert.add("sup ||(PQP)^n P|| = 1 within 1e-12", worst_sup <= 1e-12, worst_sup)
    cert.add("interior samples decay as c_t^(2n)", worst_decay <= 1e-12, worst_decay)
    cert.add("continuum infimum is 0", gp.continuum_infimum.sup_norm() == 0.0)
    cert.data["table"] = table
    return cert


def invariant_submodule_check(grid=GridSpec()):
    """``M = closure R[(P+Q)(2I-P-Q)]`` is invariant under P and Q and equals ``closure R(P-Q)``."""
    gp = make_counterexample_pair(grid)
    cert = Certificate("invariant-submodule")
    p, q = gp.p.values, gp.q.values
    eye = np.eye(2)
    a = p + q
    herm = lambda x: np.conj(np.swapaxes(x, -1, -2))  # noqa: E731

    worst = 0.0
    for x, y in ((p, q), (q, p)):
        lhs = x @ (2 * eye - a) @ a
        mid = x @ (eye - y) @ x
        rhs = a @ (2 * eye - a) @ x
        worst = max(worst, float(pointwise_norms(lhs - mid).max()), float(pointwise_norms(mid - rhs).max()))
    cert.add("P(2I-A)A = P(I-Q)P = A(2I-A)P and likewise for Q", worst <= 1e-12, worst)

    g = a @ (2 * eye - a)
    d = p - q
    fac = float(pointwise_norms(p + q - p @ q - q @ p - d @ herm(d)).max())
    fac2 = float(pointwise_norms(g - d @ herm(d)).max())
    cert.add("P + Q - PQ - QP = (P-Q)(P-Q)^* = (P+Q)(2I-P-Q)", max(fac, fac2) <= 1e-12, max(fac, fac2))

    proj_g = pointwise_range_projector(GridMatrixFunction(grid, g)).values
    proj_d = pointwise_range_projector(GridMatrixFunction(grid, d)).values
    rng_err = float(pointwise_norms(proj_g - proj_d).max())
    cert.add("range of (P+Q)(2I-P-Q) equals range of P-Q at every sample", rng_err <= 1e-10, rng_err)
    inv = max(float(pointwise_norms((eye - proj_g) @ x @ proj_g).max()) for x in (p, q))
    cert.add("P M ⊆ M and Q M ⊆ M pointwise", inv <= 1e-10, inv)
    ranks = np.rint(np.real(np.trace(proj_g, axis1=1, axis2=2))).astype(int)
    cert.data["pointwise_rank_of_M"] = {"t=0": int(ranks[0]), "interior_min": int(ranks[1:].min())}
    return cert


def matched_triple_transfer(pair, eps=1e-12, max_iter=100_000):
    """``W^n -> P_N`` for ``W = (I-P)(I-Q)(I-P)`` at geometric rate ``angle^2``."""
    angle = friedrichs_angle(pair)
    if angle >= 1 - eps:
        raise AngleTooLarge(f"Friedrichs cosine {angle} is not below 1 - eps")
    cert = Certificate("matched-transfer")
    i = pair.identity
    w = (i - pair.p) @ (i - pair.q) @ (i - pair.p)
    pn = pair.p_n
    m = w.copy()
    residuals = [operator_norm(m - pn)]
    while residuals[-1] > eps and len(residuals) < max_iter:
        m = m @ w
        residuals.append(operator_norm(m - pn))
    n = len(residuals)
    rate_target = angle**2
    if n >= 2 and residuals[0] > 0:
        rate = (residuals[-1] / residuals[0]) ** (1.0 / (n - 1))
    else:
        # one step from ||I - P_N|| = 1
        rate = residuals[0]
    predicted = math.ceil(math.log(eps) / math.log(rate_target)) if 0 < rate_target < 1 else 1
    cert.add("W^n converges to P_N", residuals[-1] <= max(eps, 1e-10), residuals[-1])
    # below eps a single step already converges and there is no rate to observe
    rate_measured = rate_target > eps
    if rate_measured:
        rel = abs(rate - rate_target) / rate_target
        cert.add("measured rate within 5% of angle^2", rel <= 0.05, rel)
        law = max((abs(r - rate_target ** (k + 1)) / rate_target ** (k + 1)
                   for k, r in enumerate(residuals) if rate_target ** (k + 1) > 1e3 * eps), default=0.0)
        cert.add("||W^n - P_N|| = angle^(2n)", law <= 1e-6, law)
    cert.add("iterations within prediction + 2", n <= predicted + 2, float(n))
    sym = check_angle_symmetry(pair)
    cert.add("complement pair has the same Friedrichs cosine", sym.residual <= 1e-10, sym.residual)
    cert.data.update(
        angle=angle, angle_squared=rate_target, measured_rate=rate, rate_measured=rate_measured, iterations=n,
        predicted_iterations=predicted, final_residual=residuals[-1],
    )
    return cert


def refinement_table(func, sizes):
    """Sup-norm of ``func`` on nested grids and the estimated O(spacing^2) gap.

    ``func`` maps an array of sample points to a stack of matrices. The gap
    between a coarse and the finest grid is bounded by ``C * spacing^2`` with
    ``C = max|g''| / 8`` for ``g(t) = ||func(t)||``, estimated from second
    differences on the finest grid.
    """
    sizes = sorted(int(n) for n in sizes)
    for a, b in zip(sizes, sizes[1:]):
        if (b - 1) % (a - 1):
            raise ValidationError(f"grid {a} is not nested in grid {b}")
    rows = []
    for n in sizes:
        g = GridSpec(n)
        rows.append({"n_samples": n, "spacing": g.spacing,
                     "sup_norm": float(pointwise_norms(func(g.points)).max())})
    fine = GridSpec(sizes[-1])
    g = pointwise_norms(func(fine.points))
    curvature = float(np.abs(np.diff(g, 2)).max()) / fine.spacing**2 if g.size > 2 else 0.0
    constant = curvature / 8.0
    top = rows[-1]["sup_norm"]
    monotone = all(a["sup_norm"] <= b["sup_norm"] + 1e-15 for a, b in zip(rows, rows[1:]))
    within = all(top - r["sup_norm"] <= constant * r["spacing"] ** 2 * 1.01 + 1e-15 for r in rows)
    return {"rows": rows, "curvature_constant": constant, "monotone": monotone,
            "within_bound": within}


def cross_term_values(t):
    """``P Q (I - P) Q`` of the constant-P pair at points ``t``.

    Its pointwise norm ``s_t^2 c_t`` peaks off-grid, which makes it a useful
    probe for sup-norm refinement.
    """
    c, s = quarter_wave(t)
    q = np.empty((np.size(t), 2, 2), dtype=complex)
    q[:, 0, 0], q[:, 0, 1], q[:, 1, 0], q[:, 1, 1] = c * c, s * c, s * c, s * s
    p = np.diag([1.0, 0.0])
    return p @ q @ (np.eye(2) - p) @ q
