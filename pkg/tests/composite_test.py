import math

import numpy as np
import pytest

from modular_value.composite import ObservableSum, ProductRuleReport, \
    ProductSumReport, check_product_implies_sum, modular_of_sum, \
    product_rule_report, spin_pair_expansion, sum_rule_report, weak_joint
from modular_value.exceptions import DegenerateSpectrumError, ShapeMismatchError, \
    SiteError
from modular_value.tensor import Operator, SiteObservable, add, embed, pauli_x, \
    pauli_y, pauli_z, tensor_kets
from modular_value.values import PrePostEnsemble, modular_value, weak_value

from .helpers import random_ensemble, random_hermitian, random_ket, spread_eigenvalues


def _random_site(rng, site, dim=2):
    eigs = spread_eigenvalues(rng, dim, min_gap=0.5)
    local = random_hermitian(rng, eigs)
    return SiteObservable(site, local, tuple(eigs) if dim == 2 else None)


@pytest.mark.parametrize('method', ['closed_form', 'direct'])
def test_modular_of_sum_methods_agree(method):
    rng = np.random.default_rng(11)
    for _ in range(100):
        ensemble = random_ensemble(rng, (2, 2, 2))
        terms = (_random_site(rng, 0), _random_site(rng, 2))
        s = ObservableSum(terms, ensemble.shape)
        g = rng.uniform(-math.pi, math.pi)
        expected = modular_of_sum(s, g, ensemble)
        assert abs(modular_of_sum(s, g, ensemble, method=method) - expected) <= 1e-11


def test_single_term_sum_is_the_modular_value():
    rng = np.random.default_rng(12)
    ensemble = random_ensemble(rng, (2, 3))
    term = _random_site(rng, 1, dim=3)
    s = ObservableSum((term,), ensemble.shape)
    expected = modular_value(embed(term, ensemble.shape), None, 0.4, ensemble)
    assert modular_of_sum(s, 0.4, ensemble) == pytest.approx(expected, abs=1e-12)


def test_four_term_expansion_on_random_instances():
    rng = np.random.default_rng(13)
    for _ in range(500):
        ensemble = random_ensemble(rng, (2, 2))
        a, b = _random_site(rng, 0), _random_site(rng, 1)
        g = rng.uniform(-math.pi, math.pi)
        report = check_product_implies_sum(a, b, g, ensemble)
        assert report.expansion_residual <= 1e-11
        assert report.holds


def test_product_states_factorize():
    rng = np.random.default_rng(14)
    for _ in range(50):
        psi = tensor_kets([random_ket(rng, (2,)), random_ket(rng, (2,))])
        phi = tensor_kets([random_ket(rng, (2,)), random_ket(rng, (2,))])
        if abs(np.vdot(phi.amplitudes, psi.amplitudes)) < 0.05:
            continue
        ensemble = PrePostEnsemble.create(psi, phi)
        a, b = _random_site(rng, 0), _random_site(rng, 1)
        report = check_product_implies_sum(a, b, 0.7, ensemble)
        assert report.premise_holds
        assert not report.vacuous
        assert report.factorization_residual <= 1e-10
        assert report.holds


def test_spin_pair_expansion_matches_direct_evaluation():
    rng = np.random.default_rng(15)
    for _ in range(50):
        ensemble = random_ensemble(rng, (2, 2))
        s1 = SiteObservable(0, pauli_x(), (1, -1))
        s2 = SiteObservable(1, pauli_y(), (1, -1))
        g = rng.uniform(-math.pi, math.pi)
        w1 = weak_value(embed(s1, ensemble.shape), ensemble)
        w2 = weak_value(embed(s2, ensemble.shape), ensemble)
        w12 = weak_joint(s1, s2, ensemble)
        expected = modular_of_sum(ObservableSum((s1, s2), ensemble.shape), g, ensemble)
        assert abs(spin_pair_expansion(w1, w2, w12, g) - expected) <= 1e-11


def test_sum_rule_report_terms():
    rng = np.random.default_rng(16)
    ensemble = random_ensemble(rng, (2, 2))
    s = ObservableSum(
        (SiteObservable(0, pauli_z(), (1, -1), label='z0'),
         SiteObservable(1, pauli_x(), (1, -1), label='x1')), ensemble.shape)
    report = sum_rule_report(s, 0.3, ensemble)
    assert [term.label for term in report.per_term] == ['z0', 'x1']
    assert report.gap == pytest.approx(report.mod_of_sum - report.sum_of_mods)
    assert report.to_dict()['type'] == 'SumRuleReport'


def test_sum_rule_fails_at_zero_coupling():
    # every modular value is 1, so a sum of two gives 1 against 2
    rng = np.random.default_rng(17)
    ensemble = random_ensemble(rng, (2, 2))
    s = ObservableSum(
        (SiteObservable(0, pauli_z(), (1, -1)), SiteObservable(1, pauli_z(), (1, -1))),
        ensemble.shape)
    report = sum_rule_report(s, 0.0, ensemble)
    assert report.gap == pytest.approx(-1, abs=1e-12)
    assert not report.sum_rule_holds()


def test_terms_must_act_on_distinct_sites():
    rng = np.random.default_rng(18)
    ensemble = random_ensemble(rng, (2, 2))
    same = (SiteObservable(0, pauli_z(), (1, -1)), SiteObservable(0, pauli_x(), (1, -1)))
    with pytest.raises(SiteError):
        ObservableSum(same, ensemble.shape)
    with pytest.raises(SiteError):
        product_rule_report(*same, ensemble)
    with pytest.raises(SiteError):
        ObservableSum((SiteObservable(2, pauli_z()),), ensemble.shape)
    with pytest.raises(ValueError):
        ObservableSum((), ensemble.shape)


def test_sum_shape_must_match_ensemble():
    rng = np.random.default_rng(19)
    ensemble = random_ensemble(rng, (2, 2))
    other = random_ensemble(rng, (2, 2, 2))
    s = ObservableSum((SiteObservable(0, pauli_z(), (1, -1)),), other.shape)
    with pytest.raises(ShapeMismatchError):
        modular_of_sum(s, 0.2, ensemble)


def test_product_to_sum_needs_eigenvalues():
    rng = np.random.default_rng(20)
    ensemble = random_ensemble(rng, (2, 2))
    with pytest.raises(ValueError):
        check_product_implies_sum(
            SiteObservable(0, pauli_z()), SiteObservable(1, pauli_z(), (1, -1)), 0.2,
            ensemble)


def test_sum_rule_side_condition():
    product_rule = ProductRuleReport(0j, 0j, 0j, 0j, 0j)
    restored = ProductSumReport(4, 4, 2, 2, product_rule, 1e-9, 0.5)
    assert restored.sum_rule_side_condition()
    broken = ProductSumReport(1, 1, 1, 1, product_rule, 1e-9, 0.5)
    assert not broken.sum_rule_side_condition()


def test_closed_form_sum_needs_two_level_terms():
    rng = np.random.default_rng(21)
    ensemble = random_ensemble(rng, (2, 2))
    s = ObservableSum(
        (SiteObservable(0, Operator((2,), np.diag([1, 0]), hermitian=True)),),
        ensemble.shape)
    with pytest.raises(ValueError):
        modular_of_sum(s, 0.2, ensemble, method='closed_form')


def test_weak_values_obey_the_sum_rule():
    rng = np.random.default_rng(21)
    for _ in range(100):
        ensemble = random_ensemble(rng, (2, 3))
        a, b = _random_site(rng, 0), _random_site(rng, 1, dim=3)
        embedded_a, embedded_b = embed(a, ensemble.shape), embed(b, ensemble.shape)
        expected = weak_value(embedded_a, ensemble) + weak_value(embedded_b, ensemble)
        combined = weak_value(add(embedded_a, embedded_b), ensemble)
        assert abs(combined - expected) <= 1e-12 * max(1.0, abs(expected))


def test_modular_sum_rule_fails_generically():
    rng = np.random.default_rng(22)
    failures = 0
    for _ in range(1000):
        ensemble = random_ensemble(rng, (2, 2))
        s = ObservableSum((_random_site(rng, 0), _random_site(rng, 1)), ensemble.shape)
        report = sum_rule_report(s, rng.uniform(0, math.pi), ensemble)
        failures += abs(report.gap) > 1e-6
    assert failures >= 990


def test_tolerance_overrides_reach_the_closed_forms():
    ensemble = random_ensemble(np.random.default_rng(23), (2, 2))
    a = SiteObservable(0, pauli_z(), (1, -1))
    b = SiteObservable(1, pauli_x(), (1, -1))
    s = ObservableSum((a, b), ensemble.shape)
    with pytest.raises(DegenerateSpectrumError):
        modular_of_sum(s, 0.5, ensemble, method='closed_form', eps_degen=3.0)
    with pytest.raises(DegenerateSpectrumError):
        check_product_implies_sum(a, b, 0.5, ensemble, eps_degen=3.0)
    loose = modular_of_sum(s, 0.5, ensemble, method='closed_form', eigen_tol=1e-6)
    assert loose == pytest.approx(modular_of_sum(s, 0.5, ensemble), abs=1e-11)
