import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orbiquant.trigpoly import TrigPoly

seeds = st.integers(0, 2**32 - 1)
theta = np.linspace(0, 2 * np.pi, 37)


def _rand(seed, degree=3, size=2):
    return TrigPoly.random(np.random.default_rng(seed), degree, size)


def test_from_terms_scalar_entry_and_matrix():
    p = TrigPoly.from_terms([(1, 2.0), (-2, 1j, (0, 1)), (0, [[1, 2], [3, 4]])], size=2)
    assert p.degree == 2
    assert np.allclose(p.coefficient(1), 2 * np.eye(2))
    assert p.coefficient(-2)[0, 1] == 1j
    assert np.allclose(p.coefficient(0), [[1, 2], [3, 4]])
    assert np.allclose(p.coefficient(7), 0)


def test_evaluation_matches_direct_sum():
    p = TrigPoly.from_terms([(1, 0.5), (-1, 0.5)])
    assert np.allclose(p(theta)[:, 0, 0], np.cos(theta), atol=1e-15)


@settings(max_examples=40)
@given(seeds, seeds)
def test_matmul_is_pointwise_product(s1, s2):
    a, b = _rand(s1), _rand(s2, degree=2)
    assert np.max(np.abs(a.matmul(b)(theta) - a(theta) @ b(theta))) <= 1e-12


@settings(max_examples=40)
@given(seeds)
def test_adjoint_and_conj_are_pointwise(s):
    a = _rand(s)
    vals = a(theta)
    assert np.max(np.abs(a.adjoint()(theta) - np.conj(np.swapaxes(vals, -1, -2)))) <= 1e-13
    assert np.max(np.abs(a.conj()(theta) - np.conj(vals))) <= 1e-13


@settings(max_examples=40)
@given(seeds, st.sampled_from([1, -1]), st.floats(-10, 10))
def test_pullback(s, sign, shift):
    a = _rand(s)
    assert np.max(np.abs(a.pullback(sign, shift)(theta) - a(sign * theta + shift))) <= 1e-12


def test_pullback_rejects_non_isometry():
    with pytest.raises(ValueError):
        _rand(0).pullback(2, 0.0)


def test_derivative_against_finite_difference():
    a = _rand(1)
    h = 1e-6
    fd = (a(theta + h) - a(theta - h)) / (2 * h)
    assert np.max(np.abs(a.derivative()(theta) - fd)) <= 1e-7


def test_padding_and_trimming_keep_values():
    a = _rand(2, degree=2)
    assert np.allclose(a.padded(5)(theta), a(theta))
    assert a.padded(5).trimmed().degree == 2
    with pytest.raises(ValueError):
        a.padded(1)


def test_hermitian_and_real_flags():
    h = TrigPoly.random(np.random.default_rng(3), 2, 3, hermitian=True)
    assert h.is_hermitian()
    assert np.max(np.abs(h(theta) - np.conj(np.swapaxes(h(theta), -1, -2)))) <= 1e-14
    r = TrigPoly.random(np.random.default_rng(3), 2, 1, real=True)
    assert r.is_real_scalar()
    assert np.max(np.abs(r(theta).imag)) <= 1e-14


def test_sup_norm_bound():
    a = _rand(4)
    assert np.max(np.linalg.norm(a(theta), 2, axis=(1, 2))) <= a.sup_norm_bound() + 1e-12


def test_invalid_shape():
    with pytest.raises(ValueError):
        TrigPoly(np.zeros((2, 1, 1)))
