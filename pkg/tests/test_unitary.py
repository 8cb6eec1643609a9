import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twoproj.halmos import decompose
from twoproj.linalg import operator_norm, polar_partial_isometry
from twoproj.pairs import ProjectionPair, haar_pair, random_pair
from twoproj.unitary import (
    block_form_unitary,
    build_unitary,
    check_absolute_value_identity,
    check_power_exchange,
    conjugation_consequence,
    generic_y,
)

seeds = st.integers(0, 2**32 - 1)
H = np.sqrt(0.5)


def test_equal_projections():
    p = np.diag([1.0, 0.0])
    cert = build_unitary(ProjectionPair(p, p))
    np.testing.assert_allclose(cert.u, np.diag([1.0, -1.0]), atol=1e-15)
    assert not cert.v1.any() and not cert.v2.any()
    assert cert.accepted and max(cert.residuals.values()) == 0.0


def test_half_pair(half):
    cert = build_unitary(half)
    v1, _ = polar_partial_isometry(np.array([[0.5, -0.5], [0.0, 0.0]]))
    v2, _ = polar_partial_isometry(np.array([[0.0, 0.0], [0.5, 0.5]]))
    np.testing.assert_allclose(cert.u, v1 - v2, atol=1e-15)
    np.testing.assert_allclose(cert.u, [[H, -H], [-H, -H]], atol=1e-15)
    assert max(cert.residuals.values()) <= 1e-12


def test_block_form_half(half):
    dec = decompose(half)
    kappa = dec.u0[0, 0]
    y = generic_y(dec.a_op, dec.u0)
    expected = np.array([[H, -H * np.conj(kappa)], [-kappa * H, -kappa * H * np.conj(kappa)]])
    np.testing.assert_allclose(y, expected, atol=1e-15)
    assert operator_norm(block_form_unitary(dec) - build_unitary(half).u) <= 1e-12


def test_block_form_corners_only():
    pair = ProjectionPair(np.diag([1.0, 1, 0, 0]), np.diag([1.0, 0, 1, 0]))
    np.testing.assert_allclose(block_form_unitary(decompose(pair)), np.diag([1.0, 1, -1, -1]), atol=1e-15)


def test_block_form_two_angle(two_angle):
    u = block_form_unitary(decompose(two_angle))
    assert operator_norm(u - build_unitary(two_angle).u) <= 1e-9


@settings(max_examples=60)
@given(st.integers(1, 12), seeds)
def test_unitary_properties(dim, seed):
    rng = np.random.default_rng(seed)
    for pair in (random_pair(dim, rng), haar_pair(dim, rng)):
        cert = build_unitary(pair)
        assert cert.accepted, cert.residuals
        assert operator_norm(block_form_unitary(decompose(pair)) - cert.u) <= 1e-9
        norm_gap, conj_gap = conjugation_consequence(pair, cert)
        assert norm_gap <= 1e-10 and conj_gap <= 1e-10


def test_random_dim_ten(rng):
    assert build_unitary(random_pair(10, rng)).accepted


def test_certificate_tolerance_is_respected(half):
    cert = build_unitary(half, tolerance=1e-30)
    assert not cert.accepted or max(cert.residuals.values()) <= 1e-30


def test_absolute_value_identity_examples(half):
    p = np.diag([1.0, 0.0])
    assert check_absolute_value_identity(ProjectionPair(p, p)) <= 1e-12
    assert check_absolute_value_identity(half) <= 1e-12


@settings(max_examples=60)
@given(st.integers(2, 12), seeds)
def test_absolute_value_identity_property(dim, seed):
    assert check_absolute_value_identity(random_pair(dim, np.random.default_rng(seed))) <= 1e-10


def test_power_exchange_examples(half):
    p = np.diag([1.0, 0.0])
    assert check_power_exchange(ProjectionPair(p, p)) == (0.0, 0.0)
    ex = check_power_exchange(half)
    assert ex.exchange <= 1e-12 and ex.combined <= 1e-12


@settings(max_examples=40)
@given(st.integers(2, 12), seeds)
def test_power_exchange_property(dim, seed):
    ex = check_power_exchange(random_pair(dim, np.random.default_rng(seed)))
    assert max(ex) <= 1e-10


@pytest.mark.parametrize("dim", [3, 7])
def test_annihilation_relations(dim, rng):
    assert build_unitary(random_pair(dim, rng)).annihilation_residual <= 1e-10
