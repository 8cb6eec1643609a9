import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twoproj.errors import NoConvergence, NotAProjection, ValidationError
from twoproj.linalg import Tolerance, operator_norm, principal_angles, range_basis
from twoproj.pairs import (
    ProjectionPair,
    check_angle_symmetry,
    commute,
    complement_infimum,
    corner_subspaces,
    friedrichs_angle,
    haar_pair,
    infimum_direct,
    infimum_iterative,
    pair_with_angles,
    random_pair,
)

SQRT_HALF = 0.7071067811865476


def diag_pair(p, q):
    return ProjectionPair(np.diag(p).astype(float), np.diag(q).astype(float))


seeds = st.integers(0, 2**32 - 1)


def test_rejects_non_projection():
    with pytest.raises(NotAProjection):
        ProjectionPair(np.array([[1.0, 1.0], [0.0, 0.0]]), np.eye(2))
    with pytest.raises(ValidationError):
        ProjectionPair(np.eye(2), np.eye(3))


# -- infimum ---------------------------------------------------------------------


def test_infimum_examples(half):
    p = np.diag([1.0, 0.0])
    np.testing.assert_allclose(infimum_direct(ProjectionPair(p, p)), p, atol=1e-15)
    pr = infimum_direct(diag_pair([1, 1, 0], [1, 0, 1]))
    np.testing.assert_allclose(pr, np.diag([1.0, 0, 0]), atol=1e-15)
    assert operator_norm(infimum_direct(half)) == 0.0


def test_infimum_iterative_examples(half):
    p = np.diag([1.0, 0.0])
    res = infimum_iterative(ProjectionPair(p, p))
    assert res.iterations == 1
    np.testing.assert_allclose(res.matrix, p)
    res = infimum_iterative(half, eps=1e-12)
    assert operator_norm(res.matrix) < 1e-11
    assert res.ratio_estimate == pytest.approx(0.5, rel=1e-9)
    res = infimum_iterative(diag_pair([1, 0], [0, 1]))
    assert res.iterations == 1 and not res.matrix.any()


def test_infimum_iterative_errors(half):
    with pytest.raises(ValidationError):
        infimum_iterative(half, eps=0.0)
    with pytest.raises(NoConvergence):
        infimum_iterative(half, eps=1e-12, max_iter=3)


@settings(max_examples=40)
@given(st.integers(1, 16), seeds)
def test_iterative_matches_direct(dim, seed):
    pair = random_pair(dim, np.random.default_rng(seed), min_angle=0.3)
    res = infimum_iterative(pair, eps=1e-12)
    assert operator_norm(res.matrix - pair.p_r) <= max(1e-12, 100 * pair.tol.residual)


@settings(max_examples=40)
@given(st.integers(1, 12), seeds)
def test_infimum_is_below_both(dim, seed):
    pair = haar_pair(dim, np.random.default_rng(seed))
    pr = pair.p_r
    for x in (pair.p, pair.q):
        assert operator_norm(pr @ x - pr) <= 1e-10
        assert operator_norm(x @ pr - pr) <= 1e-10


# -- corners -----------------------------------------------------------------------


def test_corner_examples(half):
    p = np.diag([1.0, 0.0])
    assert corner_subspaces(ProjectionPair(p, p)).dims() == (1, 0, 0, 1)
    assert corner_subspaces(half).dims() == (0, 0, 0, 0)
    assert corner_subspaces(diag_pair([1, 1, 0, 0], [1, 0, 1, 0])).dims() == (1, 1, 1, 1)


def test_corners_are_orthogonal(rng):
    pair = random_pair(10, rng)
    frames = [h.frame for h in corner_subspaces(pair)]
    for i in range(4):
        for j in range(i + 1, 4):
            assert operator_norm(frames[i].conj().T @ frames[j]) <= 1e-10


def test_complement_infimum_examples(half):
    p = np.diag([1.0, 0.0])
    np.testing.assert_allclose(complement_infimum(ProjectionPair(p, p)), np.diag([0.0, 1.0]), atol=1e-15)
    assert operator_norm(complement_infimum(half)) == 0.0
    assert operator_norm(complement_infimum(ProjectionPair(np.eye(2), p))) == 0.0


# -- angle ---------------------------------------------------------------------------


def test_angle_examples(half):
    p = np.diag([1.0, 0.0])
    assert friedrichs_angle(ProjectionPair(p, p)) == 0.0
    assert friedrichs_angle(diag_pair([1, 0], [0, 1])) == 0.0
    assert friedrichs_angle(half) == pytest.approx(SQRT_HALF, abs=1e-15)


def test_angle_symmetry_examples(half):
    p = np.diag([1.0, 0.0])
    assert check_angle_symmetry(ProjectionPair(p, p)) == (0.0, 0.0, 0.0)
    sym = check_angle_symmetry(half)
    assert sym.lhs == pytest.approx(SQRT_HALF, abs=1e-15)
    assert sym.rhs == pytest.approx(SQRT_HALF, abs=1e-15)


@settings(max_examples=60)
@given(st.integers(2, 12), seeds)
def test_angle_symmetry_property(dim, seed):
    rng = np.random.default_rng(seed)
    for pair in (random_pair(dim, rng), haar_pair(dim, rng)):
        assert check_angle_symmetry(pair).residual <= 1e-10


@settings(max_examples=40)
@given(st.integers(2, 12), seeds)
def test_angle_is_largest_principal_cosine_off_h1(dim, seed):
    pair = random_pair(dim, np.random.default_rng(seed))
    off_h1 = pair.identity - corner_subspaces(pair).h1.projector()
    a = range_basis(off_h1 @ pair.p, Tolerance(rank_cut=0.5))
    b = range_basis(off_h1 @ pair.q, Tolerance(rank_cut=0.5))
    cosines = np.cos(principal_angles(a, b))
    expected = max(cosines, default=0.0)
    assert friedrichs_angle(pair) == pytest.approx(expected, abs=1e-10)
    assert friedrichs_angle(pair) < 1.0


def test_commute():
    assert commute(diag_pair([1, 0, 1], [1, 1, 0]))
    assert not commute(pair_with_angles((0, 0, 0, 0), [0.4]))
