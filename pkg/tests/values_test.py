import cmath
import math

import numpy as np
import pytest

from modular_value.exceptions import ConversionUndefinedError, DegenerateSpectrumError, \
    NotHermitianError, OrthogonalPostSelectionError, ShapeMismatchError
from modular_value.tensor import Ket, Operator, add, matmul, pauli_x, pauli_y, pauli_z, \
    projector, scale
from modular_value.values import CouplingSpec, PrePostEnsemble, \
    calibrate_weak_from_small_g, exp_lagrange, exp_lagrange_hermitian, exp_spectral, \
    known_special_case, modular_from_weak, modular_value, small_g_modular_estimate, \
    special_case_spectrum, two_level_coeffs, two_level_operator, weak_from_modular, \
    weak_value

from .helpers import random_ensemble, random_hermitian, random_ket, spread_eigenvalues

SQRT2 = math.sqrt(2)


@pytest.fixture
def tilted_ensemble():
    psi = Ket((2,), [1 / SQRT2, 1 / SQRT2])
    phi = Ket((2,), [math.sqrt(2 + SQRT2) / 2, -math.sqrt(2 - SQRT2) / 2])
    return PrePostEnsemble.create(psi, phi)


def test_weak_value_of_sigma_z(tilted_ensemble):
    assert weak_value(pauli_z(), tilted_ensemble) == pytest.approx(1 + SQRT2, abs=1e-12)


def test_weak_value_equals_expectation_without_post_selection():
    psi = Ket((2,), [0.6, 0.8j])
    ensemble = PrePostEnsemble.create(psi, psi)
    assert weak_value(pauli_z(), ensemble) == pytest.approx(0.36 - 0.64, abs=1e-12)


def test_orthogonal_post_selection_is_rejected():
    with pytest.raises(OrthogonalPostSelectionError):
        PrePostEnsemble.create(Ket.basis((2,), (0,)), Ket.basis((2,), (1,)))
    with pytest.raises(ShapeMismatchError):
        PrePostEnsemble.create(Ket.basis((2,), (0,)), Ket.basis((2, 2), (0, 0)))


def test_create_normalizes_by_default():
    ensemble = PrePostEnsemble.create(Ket((2,), [2, 0]), Ket((2,), [1, 1]))
    assert ensemble.psi.norm == pytest.approx(1.0)
    assert ensemble.overlap == pytest.approx(1 / SQRT2)


def test_modular_value_at_zero_coupling_is_one():
    rng = np.random.default_rng(1)
    for _ in range(20):
        ensemble = random_ensemble(rng, (2, 2))
        op = random_hermitian(rng, spread_eigenvalues(rng, 4), dims=(2, 2))
        assert modular_value(op, None, 0.0, ensemble) == pytest.approx(1, abs=1e-12)


def test_lagrange_matches_spectral_on_random_operators():
    rng = np.random.default_rng(2)
    for n in (2, 4) * 250:
        eigs = spread_eigenvalues(rng, n, min_gap=1e-3)
        op = random_hermitian(rng, eigs)
        g = rng.uniform(-math.pi, math.pi)
        np.testing.assert_allclose(
            exp_lagrange(op, eigs, g).matrix, exp_spectral(op, g).matrix,
            rtol=0, atol=1e-11)


def test_lagrange_with_closely_spaced_eigenvalues():
    rng = np.random.default_rng(9)
    eigs = [k * 1.001e-3 for k in range(4)]
    for _ in range(20):
        op = random_hermitian(rng, eigs)
        g = rng.uniform(-math.pi, math.pi)
        np.testing.assert_allclose(
            exp_lagrange(op, eigs, g).matrix, exp_spectral(op, g).matrix,
            rtol=0, atol=1e-11)


def test_lagrange_with_computed_eigenvalues():
    rng = np.random.default_rng(3)
    op = random_hermitian(rng, [-1.0, 0.5, 2.0])
    np.testing.assert_allclose(
        exp_lagrange_hermitian(op, 0.8).matrix, exp_spectral(op, 0.8).matrix,
        rtol=0, atol=1e-11)


def test_lagrange_errors():
    op = pauli_z()
    with pytest.raises(DegenerateSpectrumError):
        exp_lagrange(op, [1.0, 1.0], 0.5)
    with pytest.raises(ShapeMismatchError):
        exp_lagrange(op, [1.0, -1.0, 0.0], 0.5)
    with pytest.raises(NotHermitianError):
        exp_spectral(Operator((2,), [[0, 1], [0, 0]]), 0.5)


def test_two_level_operator_is_the_exponential():
    rng = np.random.default_rng(4)
    for _ in range(100):
        lambda1, lambda2 = spread_eigenvalues(rng, 2, min_gap=0.5)
        op = random_hermitian(rng, [lambda1, lambda2])
        g = rng.uniform(-math.pi, math.pi)
        coeffs = two_level_coeffs(lambda1, lambda2, g)
        np.testing.assert_allclose(
            two_level_operator(op, coeffs).matrix, exp_spectral(op, g).matrix,
            rtol=0, atol=1e-12)


def test_conversion_identities_on_random_instances():
    rng = np.random.default_rng(5)
    checked = 0
    while checked < 1000:
        lambda1, lambda2 = spread_eigenvalues(rng, 2, min_gap=1e-3)
        g = rng.uniform(-math.pi, math.pi)
        coeffs = two_level_coeffs(lambda1, lambda2, g)
        if abs(coeffs.a) <= 1e-6:
            continue
        op = random_hermitian(rng, [lambda1, lambda2])
        ensemble = random_ensemble(rng, (2,))
        weak = weak_value(op, ensemble)
        modular = modular_value(op, (lambda1, lambda2), g, ensemble)
        assert abs(modular_from_weak(weak, coeffs) - modular) <= 1e-10
        assert abs(weak_from_modular(modular, coeffs) - weak) <= 1e-10
        checked += 1


@pytest.mark.parametrize('method', ['spectral', 'lagrange', 'closed_form'])
def test_evaluation_methods_agree(method, tilted_ensemble):
    expected = modular_value(pauli_x(), (1, -1), 0.9, tilted_ensemble)
    value = modular_value(pauli_x(), (1, -1), 0.9, tilted_ensemble, method=method)
    assert value == pytest.approx(expected, abs=1e-12)


def test_modular_value_errors(tilted_ensemble):
    with pytest.raises(NotHermitianError):
        modular_value(Operator((2,), np.diag([1, -1])), None, 0.3, tilted_ensemble)
    with pytest.raises(ValueError):
        modular_value(pauli_z(), None, 0.3, tilted_ensemble, method='closed_form')
    with pytest.raises(ValueError):
        modular_value(pauli_z(), None, 0.3, tilted_ensemble, method='pade')
    with pytest.raises(ValueError):
        CouplingSpec(float('nan'))


@pytest.mark.parametrize('observable', [pauli_x, pauli_y, pauli_z])
def test_spin_at_minus_half_pi_is_i_times_weak(observable):
    rng = np.random.default_rng(6)
    op = observable()
    for _ in range(100):
        ensemble = random_ensemble(rng, (2,))
        weak = weak_value(op, ensemble)
        modular = modular_value(op, (1, -1), -math.pi / 2, ensemble)
        assert abs(modular - 1j * weak) <= 1e-12 * max(1, abs(weak))


def test_projector_at_minus_half_pi():
    rng = np.random.default_rng(8)
    op = Operator((2,), np.diag([0, 1]), hermitian=True)
    for _ in range(100):
        ensemble = random_ensemble(rng, (2,))
        weak = weak_value(op, ensemble)
        modular = modular_value(op, (1, 0), -math.pi / 2, ensemble)
        assert abs(modular - (1 - (1 - 1j) * weak)) <= 1e-12 * max(1, abs(weak))


@pytest.mark.parametrize('kind, g', [
    ('spin', -math.pi / 2), ('spin', math.pi / 2),
    ('projector', -math.pi / 2), ('projector', math.pi)
])
def test_special_cases_match_coefficients(kind, g):
    a, b = known_special_case(kind, g)
    coeffs = two_level_coeffs(*special_case_spectrum(kind), g)
    assert coeffs.a == pytest.approx(a, abs=1e-12)
    assert coeffs.b == pytest.approx(b, abs=1e-12)


def test_unknown_special_case():
    with pytest.raises(KeyError):
        known_special_case('spin', 0.3)


@pytest.mark.parametrize('kind', ['spin', 'projector'])
def test_weak_value_unrecoverable_at_full_turn(kind):
    coeffs = two_level_coeffs(*special_case_spectrum(kind), 2 * math.pi)
    with pytest.raises(ConversionUndefinedError):
        weak_from_modular(1.0, coeffs)


def test_small_coupling_calibration(tilted_ensemble):
    g = 1e-5
    modular = modular_value(pauli_z(), (1, -1), g, tilted_ensemble)
    weak = calibrate_weak_from_small_g(modular, g)
    assert weak == pytest.approx(1 + SQRT2, abs=1e-4)
    with pytest.raises(ConversionUndefinedError):
        calibrate_weak_from_small_g(modular, 0)


def test_two_level_coeffs_of_degenerate_pair():
    with pytest.raises(DegenerateSpectrumError):
        two_level_coeffs(0.5, 0.5, 1.0)


def test_two_level_coeffs_at_zero_coupling():
    rng = np.random.default_rng(10)
    for _ in range(20):
        lambda1, lambda2 = spread_eigenvalues(rng, 2, min_gap=1e-3)
        coeffs = two_level_coeffs(lambda1, lambda2, 0.0)
        assert coeffs.a == pytest.approx(0, abs=1e-12)
        assert coeffs.b == pytest.approx(1, abs=1e-12)


def test_spectral_exponential_of_sigma_x_at_half_pi():
    np.testing.assert_allclose(
        exp_spectral(pauli_x(), math.pi / 2).matrix, -1j * pauli_x().matrix,
        rtol=0, atol=1e-12)


def test_lagrange_form_of_a_projector():
    rng = np.random.default_rng(11)
    for _ in range(20):
        op = projector(random_ket(rng, (2,)))
        g = rng.uniform(-math.pi, math.pi)
        expected = np.eye(2) + (cmath.exp(-1j * g) - 1) * op.matrix
        np.testing.assert_allclose(
            exp_lagrange(op, [1.0, 0.0], g).matrix, expected, rtol=0, atol=1e-12)


def test_spectral_exponential_is_unitary():
    rng = np.random.default_rng(12)
    for n in (2, 3, 4) * 30:
        op = random_hermitian(rng, spread_eigenvalues(rng, n))
        u = exp_spectral(op, rng.uniform(-10, 10)).matrix
        np.testing.assert_allclose(u.conj().T @ u, np.eye(n), rtol=0, atol=1e-12)


def test_weak_value_is_linear():
    rng = np.random.default_rng(13)
    for _ in range(100):
        ensemble = random_ensemble(rng, (2, 2))
        first = random_hermitian(rng, spread_eigenvalues(rng, 4), dims=(2, 2))
        second = random_hermitian(rng, spread_eigenvalues(rng, 4), dims=(2, 2))
        alpha, beta = rng.normal(size=2)
        combined = add(scale(first, alpha), scale(second, beta))
        expected = alpha * weak_value(first, ensemble) + \
            beta * weak_value(second, ensemble)
        assert abs(weak_value(combined, ensemble) - expected) <= \
            1e-12 * max(1.0, abs(expected))


@pytest.mark.parametrize('g', [1e-4, 1e-5])
def test_small_coupling_limit_on_random_observables(g):
    rng = np.random.default_rng(14)
    for _ in range(100):
        ensemble = random_ensemble(rng, (2, 2))
        op = random_hermitian(rng, spread_eigenvalues(rng, 4), dims=(2, 2))
        weak = weak_value(op, ensemble)
        second = weak_value(matmul(op, op), ensemble)
        third = weak_value(matmul(op, matmul(op, op)), ensemble)
        modular = modular_value(op, None, g, ensemble)
        remainder = modular - small_g_modular_estimate(weak, g)
        # remainder = -g^2 <A^2>_w / 2 + O(g^3)
        assert abs(remainder) <= g ** 2 * (abs(second) / 2 + g * abs(third)) + 1e-12
        if g >= 1e-4:
            curvature = remainder / g ** 2
            assert abs(curvature + second / 2) <= \
                g * abs(third) + 1e-4 * max(1.0, abs(second))


def test_tolerance_overrides_reach_every_method(tilted_ensemble):
    for method in ('lagrange', 'closed_form'):
        with pytest.raises(DegenerateSpectrumError):
            modular_value(pauli_z(), (1, -1), 0.3, tilted_ensemble, method=method,
                          eps_degen=3.0)
    close = Operator((2,), np.diag([1.0, 1.0 + 1e-9]), hermitian=True)
    with pytest.raises(DegenerateSpectrumError):
        modular_value(close, (1.0, 1.0 + 1e-9), 0.3, tilted_ensemble,
                      method='closed_form')
    value = modular_value(close, (1.0, 1.0 + 1e-9), 0.3, tilted_ensemble,
                          method='closed_form', eps_degen=1e-12)
    assert value == pytest.approx(cmath.exp(-0.3j), abs=1e-5)

    nearly = Operator((2,), np.diag([1.0, -1.0 + 1e-7]), hermitian=True)
    with pytest.raises(ValueError):
        modular_value(nearly, (1, -1), 0.3, tilted_ensemble, method='closed_form')
    value = modular_value(nearly, (1, -1), 0.3, tilted_ensemble, method='closed_form',
                          eigen_tol=1e-6)
    expected = modular_value(pauli_z(), (1, -1), 0.3, tilted_ensemble)
    assert value == pytest.approx(expected, abs=1e-5)
