"""Words in ``p = P - P∧Q`` and ``q = Q - P∧Q`` and their norms.

The four families are alternating products::

    A_k = (pq)^k        B_k = (pq)^k p
    C_k = (qp)^k        D_k = (qp)^k q

with ``A_0 = C_0 = I``. Since ``p`` and ``q`` are idempotent, any product of
words is again a word, obtained by concatenating letters and collapsing
repeats. Operators can be 2-D matrices or stacks ``(n, d, d)`` of grid
samples; all evaluation goes through :func:`evaluate`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import HypothesisNotMet, InvariantViolation, SpecMismatch, ValidationError
from .grid import GridPair, GridSpec, pointwise_infimum, pointwise_norms
from .halmos import decompose
from .linalg import DEFAULT_TOL, adjoint, as_matrix, operator_norm
from .pairs import ProjectionPair, commute, two_by_two_pair


class Family(str, enum.Enum):
    IDENTITY = "I"
    A = "A"
    B = "B"
    C = "C"
    D = "D"


@dataclass(frozen=True)
class Word:
    family: Family
    k: int = 0

    def __post_init__(self):
        try:
            fam = Family(self.family)
        except ValueError:
            raise ValidationError(f"unknown word family {self.family!r}") from None
        if int(self.k) != self.k or self.k < 0:
            raise ValidationError(f"k must be a nonnegative integer, got {self.k}")
        if fam is Family.IDENTITY and self.k != 0:
            raise ValidationError("the identity word has k = 0")
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "k", int(self.k))

    @property
    def letters(self):
        """Alternating letter string, e.g. ``"pqp"`` for ``B_1``."""
        f, k = self.family, self.k
        if f is Family.IDENTITY:
            return ""
        if f in (Family.A, Family.B):
            return "pq" * k + ("p" if f is Family.B else "")
        return "qp" * k + ("q" if f is Family.D else "")

    @property
    def is_identity(self):
        return self.letters == ""

    @classmethod
    def from_letters(cls, letters):
        """Word for an alternating string over ``{p, q}``; ``""`` is the identity."""
        if any(ch not in "pq" for ch in letters):
            raise ValidationError(f"letters must be 'p' or 'q', got {letters!r}")
        if any(a == b for a, b in zip(letters, letters[1:])):
            raise ValidationError(f"letters must alternate, got {letters!r}")
        if not letters:
            return cls(Family.IDENTITY)
        k, odd = divmod(len(letters), 2)
        if letters[0] == "p":
            return cls(Family.B if odd else Family.A, k)
        return cls(Family.D if odd else Family.C, k)

    def adjoint(self):
        return Word.from_letters(self.letters[::-1])

    def __str__(self):
        return "I" if self.family is Family.IDENTITY else f"{self.family.value}{self.k}"


def collapse(letters):
    """Drop repeated neighbours (``pp -> p``)."""
    out = []
    for ch in letters:
        if not out or out[-1] != ch:
            out.append(ch)
    return "".join(out)


def reduce_product(words):
    """The single word equal to the product of ``words``."""
    words = list(words)
    if not words:
        raise ValidationError("reduce_product needs at least one word")
    return Word.from_letters(collapse("".join(w.letters for w in words)))


# -- evaluation -------------------------------------------------------------


class Operands(NamedTuple):
    """``P``, ``Q`` and the infimum used to centre them (matrices or stacks)."""

    p: np.ndarray
    q: np.ndarray
    p_r: np.ndarray

    @classmethod
    def of(cls, pair):
        return cls(pair.p, pair.q, pair.p_r)

    @property
    def eye(self):
        d = self.p.shape[-1]
        return np.broadcast_to(np.eye(d, dtype=complex), self.p.shape).copy()


def _word_value(w, ops):
    pm, qm = ops.p - ops.p_r, ops.q - ops.p_r
    if w.is_identity:
        return ops.eye
    first, second = (pm, qm) if w.family in (Family.A, Family.B) else (qm, pm)
    m = np.linalg.matrix_power(first @ second, w.k) if w.k else ops.eye
    if w.family is Family.B:
        m = m @ pm
    elif w.family is Family.D:
        m = m @ qm
    return m


def evaluate(item, ops):
    """Operator for a :class:`Word`, :class:`WordCombination` or word sequence."""
    if isinstance(item, Word):
        return _word_value(item, ops)
    if isinstance(item, WordCombination):
        base = ops.eye if item.mode == "identity" else ops.eye - ops.p_r
        out = item.lambda0 * base
        for coef, w in item.terms:
            out = out + coef * _word_value(w, ops)
        return out
    words = list(item)
    if not words or not all(isinstance(w, Word) for w in words):
        raise ValidationError("expected a Word, a WordCombination or a nonempty list of Words")
    out = _word_value(words[0], ops)
    for w in words[1:]:
        out = out @ _word_value(w, ops)
    return out


def _norm(m):
    if m.ndim == 2:
        return operator_norm(m)
    return float(pointwise_norms(m).max()) if m.shape[0] else 0.0


def word_matrix(pair, w):
    """``w`` evaluated at ``(P - P∧Q, Q - P∧Q)``."""
    return _word_value(w, Operands.of(pair))


def a_closed_form(pair, k):
    """``(PQ)^k - P∧Q``, which equals ``A_k`` for ``k >= 1``."""
    return np.linalg.matrix_power(pair.p @ pair.q, k) - pair.p_r


def word_norm(pair, w):
    """Norm from the power laws, cross-checked against the matrix norm.

    ``||A_k|| = ||A_1||^(2k-1)`` and ``||B_k|| = ||A_1||^(2k)`` for ``k >= 1``;
    ``C`` and ``D`` follow from ``C_k = A_k^*`` and ``D_k`` having the same
    norm as ``B_k`` (``D_k D_k^* = (qpq)^(2k)`` has the spectrum of ``B_k B_k^*``).
    """
    ops = Operands.of(pair)
    direct = operator_norm(_word_value(w, ops))
    if w.is_identity:
        closed = 1.0
    elif w.k == 0:
        closed = direct  # a single letter: a projection, norm 0 or 1
    else:
        a1 = operator_norm(_word_value(Word(Family.A, 1), ops))
        odd = w.family in (Family.A, Family.C)
        closed = a1 ** (2 * w.k - 1) if odd else a1 ** (2 * w.k)
    if abs(closed - direct) > pair.tol.residual:
        raise InvariantViolation(
            f"power law for {w}: closed form {closed!r} vs matrix norm {direct!r}"
        )
    return closed


# -- combinations -------------------------------------------------------------


MODES = ("identity", "complement")


@dataclass(frozen=True)
class WordCombination:
    """``lambda0 * B + sum(c_i * w_i)`` with ``B = I`` or ``B = I - P∧Q`` per ``mode``."""

    lambda0: complex = 0.0
    terms: tuple = field(default_factory=tuple)
    mode: str = "identity"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {self.mode!r}")
        terms = tuple((complex(c), w) for c, w in self.terms)
        for _, w in terms:
            if not isinstance(w, Word):
                raise ValidationError(f"term word must be a Word, got {type(w).__name__}")
            if w.is_identity:
                raise ValidationError("identity terms belong in lambda0")
        object.__setattr__(self, "lambda0", complex(self.lambda0))
        object.__setattr__(self, "terms", terms)

    @property
    def words(self):
        return [w for _, w in self.terms]

    @property
    def coefficients(self):
        return [c for c, _ in self.terms]


def combination_matrix(pair, c):
    return evaluate(c, Operands.of(pair))


def combination_norm(pair, c):
    """Operator norm of the assembled combination."""
    return operator_norm(combination_matrix(pair, c))


def _scalar_ops(p, q, r):
    """One-dimensional block on which ``P``, ``Q``, ``P∧Q`` act as the scalars 0/1."""
    return Operands(*(np.full((1, 1), x, dtype=complex) for x in (p, q, r)))


def combination_norm_blocks(pair, c, dec=None):
    """Same norm computed block by block from the Halmos decomposition.

    On H1 both centred letters vanish (and so does ``I - P∧Q``), on H2/H3
    one letter is the identity, on H4 both vanish, and the generic part
    splits into the 2x2 models with ``PQP = diag(a, 0)``, ``a`` in ``sp(A)``.
    """
    dec = decompose(pair) if dec is None else dec
    h1, h2, h3, h4 = dec.corners
    best = 0.0
    for sub, scalars in ((h1, (1, 1, 1)), (h2, (1, 0, 0)), (h3, (0, 1, 0)), (h4, (0, 0, 0))):
        if sub.dim:
            best = max(best, abs(evaluate(c, _scalar_ops(*scalars))[0, 0]))
    if not dec.degenerate:
        for a in np.linalg.eigvalsh(dec.a_op):
            p2, q2 = two_by_two_pair(float(np.clip(a, 0.0, 1.0)))
            best = max(best, operator_norm(evaluate(c, Operands(p2, q2, np.zeros((2, 2))))))
    return best


def spectral_polynomial_norm(coefficients, powers, spectrum):
    """``max |sum c_i t^r_i|`` over ``t`` in ``spectrum``."""
    t = np.asarray(list(spectrum), dtype=float)
    if t.size == 0:
        return 0.0
    f = sum(c * t**r for c, r in zip(coefficients, powers))
    return float(np.max(np.abs(f)))


def h6_compression(pair, w, dec=None):
    """``w`` compressed to the H6 block, in H6 frame coordinates."""
    dec = decompose(pair) if dec is None else dec
    e6 = dec.h6.frame
    return adjoint(e6) @ word_matrix(pair, w) @ e6


# -- lower bounds -----------------------------------------------------------


HYPOTHESIS_TOL = 1e-8


class BoundCheck(NamedTuple):
    applicable: bool
    hypothesis_met: bool
    bound: float  # left-hand side
    norm: float  # right-hand side
    slack: float
    passed: bool
    reason: str = ""

    def to_doc(self):
        return self._asdict()


@dataclass
class LowerBoundReport:
    product_norm: float
    commuting: bool
    sum_of_coefficients: complex
    first: BoundCheck
    second: BoundCheck

    @property
    def passed(self):
        return self.first.passed and self.second.passed

    @property
    def status(self):
        applicable = [c for c in (self.first, self.second) if c.applicable]
        if not applicable:
            return "not-applicable"
        if not any(c.hypothesis_met for c in applicable):
            return "hypothesis-not-met"
        return "pass" if self.passed else "violated"

    def require_hypotheses(self):
        if self.status == "hypothesis-not-met":
            raise HypothesisNotMet(f"||prod X_i|| = {self.product_norm} is not 1")
        return self

    def to_doc(self):
        return {
            "product_norm": self.product_norm,
            "commuting": self.commuting,
            "sum_of_coefficients": [self.sum_of_coefficients.real, self.sum_of_coefficients.imag],
            "first_bound": self.first.to_doc(),
            "second_bound": self.second.to_doc(),
            "status": self.status,
            "passed": self.passed,
        }


def _skipped(reason):
    return BoundCheck(False, False, 0.0, 0.0, 0.0, True, reason)


def check_lower_bounds(pair, c):
    """Check both lower bounds for ``c`` on ``pair``.

    First bound: ``|sum lambda_i| <= ||sum lambda_i X_i||`` whenever
    ``||prod X_i|| = 1``; in identity mode ``lambda0 I`` joins the sum as the
    word ``I``. Second bound (complement mode, ``PQ != QP``, no identity
    words): ``|lambda0| <= ||lambda0 (I - P∧Q) + sum lambda_i X_i||``.

    ``||prod X_i|| = 1`` is tested to within ``1e-8``. Both sides are
    compared with a slack covering arithmetic error plus the first-order
    effect of the hypothesis gap.
    """
    tol = pair.tol.residual
    ops = Operands.of(pair)
    words = c.words
    product = operator_norm(evaluate(words, ops)) if words else 1.0
    gap = max(0.0, 1.0 - product)
    met = gap <= HYPOTHESIS_TOL and len(words) > 0
    commuting = commute(pair)
    longest = max((len(w.letters) for w in words), default=0) + 1
    coeffs = list(c.coefficients)

    def slack(lams):
        total = sum(abs(x) for x in lams)
        return tol * (1.0 + total) + 2.0 * gap * total * longest

    # first bound
    if c.mode == "identity" or c.lambda0 == 0:
        lams = coeffs + ([c.lambda0] if c.mode == "identity" and c.lambda0 != 0 else [])
        total = sum(lams) if lams else 0j
        if c.mode == "identity":
            rhs = combination_norm(pair, c)
        else:
            rhs = combination_norm(pair, WordCombination(0, c.terms, "identity"))
        lhs = abs(total)
        s = slack(lams)
        ok = (not met) or lhs <= rhs + s
        first = BoundCheck(True, met, lhs, rhs, s, ok, "" if met else "||prod X_i|| != 1")
    else:
        first = _skipped("first bound concerns sums without the complement term")
        total = c.lambda0 + sum(coeffs)

    # second bound
    if c.mode == "complement" and words:
        ok_hyp = met and not commuting
        reason = "" if ok_hyp else ("PQ = QP" if commuting else "||prod X_i|| != 1")
        lhs = abs(c.lambda0)
        rhs = combination_norm(pair, c)
        s = slack([c.lambda0] + coeffs)
        ok = (not ok_hyp) or lhs <= rhs + s
        second = BoundCheck(True, ok_hyp, lhs, rhs, s, ok, reason)
    else:
        second = _skipped("second bound needs complement mode and at least one word")

    return LowerBoundReport(product, commuting, complex(total), first, second)


# -- representations --------------------------------------------------------


STEP_KINDS = ("identity", "conjugation", "ampliation", "grid-evaluation")


@dataclass(frozen=True, eq=False)
class RepresentationStep:
    kind: str
    unitary: np.ndarray | None = None
    multiplicity: int | None = None
    grid: GridSpec | None = None

    def to_doc(self):
        doc = {"kind": self.kind}
        if self.multiplicity is not None:
            doc["multiplicity"] = self.multiplicity
        if self.grid is not None:
            doc["n_samples"] = self.grid.n_samples
        if self.unitary is not None:
            doc["unitary_dim"] = int(self.unitary.shape[0])
        return doc


@dataclass(frozen=True, eq=False)
class RepresentationSpec:
    """Composable faithful representation (steps applied left to right)."""

    steps: tuple = (RepresentationStep("identity"),)

    @classmethod
    def identity(cls):
        return cls()

    @classmethod
    def conjugation(cls, u, tol=DEFAULT_TOL):
        u = as_matrix(u, "unitary")
        if u.shape[0] != u.shape[1]:
            raise ValidationError(f"conjugating matrix must be square, got {u.shape}")
        err = operator_norm(adjoint(u) @ u - np.eye(u.shape[0]))
        if err > tol.residual:
            raise ValidationError(f"conjugating matrix is not unitary (residual {err:.3e})")
        return cls((RepresentationStep("conjugation", unitary=u),))

    @classmethod
    def ampliation(cls, m):
        if int(m) != m or m < 1:
            raise ValidationError(f"ampliation multiplicity must be a positive integer, got {m}")
        return cls((RepresentationStep("ampliation", multiplicity=int(m)),))

    @classmethod
    def grid_evaluation(cls, grid=GridSpec()):
        return cls((RepresentationStep("grid-evaluation", grid=grid),))

    def then(self, other):
        return RepresentationSpec(self.steps + other.steps)

    @property
    def evaluates_grid(self):
        return any(s.kind == "grid-evaluation" for s in self.steps)

    def to_doc(self):
        return [s.to_doc() for s in self.steps]


@dataclass(frozen=True, eq=False)
class Transported:
    """Image of a pair under a representation.

    ``p_r_pi`` is the infimum computed in the representation space,
    ``pi_p_r`` the image of the source infimum, and
    ``tilde_p_r = p_r_pi - pi_p_r``.
    """

    p: np.ndarray
    q: np.ndarray
    p_r_pi: np.ndarray
    pi_p_r: np.ndarray
    grid_spacing: float | None = None

    @property
    def tilde_p_r(self):
        return self.p_r_pi - self.pi_p_r

    @property
    def operands(self):
        return Operands(self.p, self.q, self.p_r_pi)


def _apply_step(step, x):
    if step.kind == "identity":
        return x
    if step.kind == "conjugation":
        u = step.unitary
        if u.shape[0] != x.shape[0]:
            raise SpecMismatch(f"conjugating matrix is {u.shape[0]}-dim, operand is {x.shape[0]}-dim")
        return u @ x @ adjoint(u)
    if step.kind == "ampliation":
        return np.kron(x, np.eye(step.multiplicity))
    raise SpecMismatch(f"step {step.kind!r} does not act on finite-dimensional operands")


def apply_representation(spec, operand):
    """Transport a :class:`ProjectionPair` or :class:`GridPair` through ``spec``."""
    if isinstance(operand, GridPair):
        kinds = [s.kind for s in spec.steps if s.kind != "identity"]
        if kinds != ["grid-evaluation"]:
            raise SpecMismatch("a grid pair needs exactly one grid-evaluation step and nothing else")
        step = next(s for s in spec.steps if s.kind == "grid-evaluation")
        if step.grid != operand.grid:
            raise SpecMismatch(
                f"grid has {step.grid.n_samples} samples, operand has {operand.grid.n_samples}"
            )
        return Transported(
            operand.p.values,
            operand.q.values,
            pointwise_infimum(operand).values,
            operand.continuum_infimum.values,
            operand.grid.spacing,
        )
    if not isinstance(operand, ProjectionPair):
        raise SpecMismatch(f"cannot represent a {type(operand).__name__}")
    if spec.evaluates_grid:
        raise SpecMismatch("grid evaluation applies to grid pairs only")
    p, q, pr = operand.p, operand.q, operand.p_r
    for step in spec.steps:
        p, q, pr = _apply_step(step, p), _apply_step(step, q), _apply_step(step, pr)
    image = ProjectionPair((p + adjoint(p)) / 2, (q + adjoint(q)) / 2, operand.tol)
    out = Transported(image.p, image.q, image.p_r, pr)
    tilde = out.tilde_p_r
    err = max(operator_norm(tilde - adjoint(tilde)), operator_norm(tilde @ tilde - tilde))
    if err > operand.tol.residual:
        raise InvariantViolation(f"tilde P_R is not a projection (residual {err:.3e})")
    return out


def _source_operands(operand):
    if isinstance(operand, GridPair):
        return Operands(operand.p.values, operand.q.values, operand.continuum_infimum.values)
    return Operands.of(operand)


@dataclass
class TransportReport:
    source_norm: float
    target_norm: float
    residual: float
    bound: float
    grid_spacing: float | None
    tilde_rank: int
    passed: bool

    def to_doc(self):
        return {
            "source_norm": self.source_norm,
            "target_norm": self.target_norm,
            "residual": self.residual,
            "bound": self.bound,
            "grid_spacing": self.grid_spacing,
            "tilde_p_r_rank": self.tilde_rank,
            "passed": self.passed,
        }


def check_norm_transport(spec, operand, item, grid_constant=2.0):
    """Compare ``||T||`` (source, own infimum) with ``||T||`` rebuilt on the image.

    Exact specs must agree to ``tol.residual``. For grid evaluation the
    source infimum is the continuum one while the image uses the pointwise
    infimum, so the two differ by a discretization effect that must stay
    below ``grid_constant * spacing**2``.
    """
    tp = apply_representation(spec, operand)
    src = _norm(evaluate(item, _source_operands(operand)))
    dst = _norm(evaluate(item, tp.operands))
    residual = abs(src - dst)
    tilde = tp.tilde_p_r
    if tilde.ndim == 3:
        rank = int(np.rint(np.real(np.trace(tilde, axis1=1, axis2=2))).sum())
    else:
        rank = int(np.rint(np.real(np.trace(tilde))))
    if tp.grid_spacing is None:
        bound = operand.tol.residual
    else:
        bound = grid_constant * tp.grid_spacing**2
    return TransportReport(src, dst, residual, bound, tp.grid_spacing, rank, residual <= bound)
