"""Preset pre/post-selected scenarios with structured reports.

Basis conventions: spin-z order (up, down); Hardy factors (positron, electron)
with basis (O, NO); Cheshire factors (polarization, path) with bases (H, V) and
(L, R). Every reported number is computed through the public operations of
``values``, ``composite`` and ``meter``.
"""
import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Tuple

import numpy as np

from .composite import ObservableSum, check_product_implies_sum, product_rule_report, \
    sum_rule_report
from .meter import MeterPrep, TwoQubitMeterPrep, build_crz_circuit, \
    run_meter_unitary, run_single_meter, run_two_qubit_meter
from .tensor import Ket, Operator, SiteObservable, pauli_x, pauli_y, pauli_z, \
    stokes, tensor_kets
from .values import PrePostEnsemble, complex_to_dict, modular_value, \
    small_g_modular_estimate, two_level_coeffs, weak_value

_logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2)

# two-level projectors in a (first, second) basis
_PI_FIRST = Operator((2,), np.diag([1, 0]), hermitian=True)
_PI_SECOND = Operator((2,), np.diag([0, 1]), hermitian=True)
_SPIN = (1.0, -1.0)
_PROJECTOR = (1.0, 0.0)


@dataclass(frozen=True, eq=False)
class ScenarioReport:
    """Labeled weak and modular values of one scenario at one coupling.

    Args:
        name: Scenario identifier.
        ensemble: The pre/post-selected ensemble.
        g: Coupling constant.
        weak_values: Label to weak value.
        modular_values: Label to modular value from the direct formulas.
        meter_values: Label to modular value read out of a simulated meter.
        closed_forms: Label to the closed-form value the scenario is known for.
        identities: Label to the residual of a consistency identity.
        rule_gaps: Sum-rule, product-rule and product-to-sum reports.
        parameters: Extra run parameters such as gamma_bar or theta.
        notes: Provenance and convention notes.
    """
    name: str
    ensemble: PrePostEnsemble
    g: float
    weak_values: Dict[str, complex]
    modular_values: Dict[str, complex]
    meter_values: Dict[str, complex] = field(default_factory=dict)
    closed_forms: Dict[str, complex] = field(default_factory=dict)
    identities: Dict[str, complex] = field(default_factory=dict)
    rule_gaps: Dict = field(default_factory=dict)
    parameters: Dict[str, float] = field(default_factory=dict)
    notes: Tuple[str, ...] = ()

    def to_dict(self) -> Dict:
        def values(mapping):
            return {label: complex_to_dict(value) for label, value in mapping.items()}

        return {
            'type': 'ScenarioReport',
            'name': self.name,
            'g': self.g,
            'parameters': dict(self.parameters),
            'ensemble': self.ensemble.to_dict(),
            'weak_values': values(self.weak_values),
            'modular_values': values(self.modular_values),
            'meter_values': values(self.meter_values),
            'closed_forms': values(self.closed_forms),
            'identities': values(self.identities),
            'rule_gaps': {key: report.to_dict() for key, report in self.rule_gaps.items()},
            'notes': list(self.notes)
        }


def spin_up_x() -> Ket:
    return Ket((2,), [1 / SQRT2, 1 / SQRT2], normalized=True)


def spin_up_y() -> Ket:
    return Ket((2,), [1 / SQRT2, 1j / SQRT2], normalized=True)


def epr_ensemble() -> PrePostEnsemble:
    """Singlet pre-selection, |up_y>_1 |up_x>_2 post-selection."""
    singlet = Ket((2, 2), [0, 1 / SQRT2, -1 / SQRT2, 0], normalized=True)
    return PrePostEnsemble.create(singlet, tensor_kets([spin_up_y(), spin_up_x()]))


def hardy_source_state() -> Ket:
    """Positron-electron state right after the first beam splitters."""
    return Ket((2, 2), [0.5, 0.5, 0.5, 0.5], normalized=True)


def hardy_ensemble() -> PrePostEnsemble:
    """Source state with the annihilated |O>+|O>- component removed, renormalized."""
    amplitudes = np.array(hardy_source_state().amplitudes)
    amplitudes[0] = 0
    psi = Ket((2, 2), amplitudes).normalize()
    dark = Ket((2,), [1 / SQRT2, -1 / SQRT2], normalized=True)
    return PrePostEnsemble.create(psi, tensor_kets([dark, dark]))


def cheshire_ensemble() -> PrePostEnsemble:
    psi = Ket((2, 2), [1j / SQRT2, 1 / SQRT2, 0, 0], normalized=True)
    phi = Ket((2, 2), [-1j / SQRT2, 0, 0, -1j / SQRT2], normalized=True)
    return PrePostEnsemble.create(psi, phi)


def crz_ensemble() -> PrePostEnsemble:
    psi = Ket((2,), [1 / SQRT2, 1 / SQRT2], normalized=True)
    phi = Ket((2,), [math.sqrt(2 + SQRT2) / 2, -math.sqrt(2 - SQRT2) / 2])
    return PrePostEnsemble.create(psi, phi)


def _pair_values(
    ensemble: PrePostEnsemble, a: SiteObservable, b: SiteObservable, g: float
) -> Tuple[Dict, Dict, Dict]:
    shape = ensemble.shape
    joint = f'{a.name}*{b.name}'
    both = f'{a.name}+{b.name}'
    sum_rule = sum_rule_report(ObservableSum((a, b), shape), g, ensemble)
    product_rule = product_rule_report(a, b, ensemble)
    chain = check_product_implies_sum(a, b, g, ensemble)
    weak = {
        a.name: product_rule.weak_a, b.name: product_rule.weak_b,
        joint: product_rule.joint_weak
    }
    modular = {term.label: term.modular for term in sum_rule.per_term}
    modular[both] = sum_rule.mod_of_sum
    gaps = {
        'sum_rule': sum_rule, 'product_rule': product_rule, 'product_sum': chain
    }
    return weak, modular, gaps


def scenario_epr(g: float) -> ScenarioReport:
    ensemble = epr_ensemble()
    sx1 = SiteObservable(0, pauli_x(), _SPIN, label='sx1')
    sy2 = SiteObservable(1, pauli_y(), _SPIN, label='sy2')
    weak, modular, gaps = _pair_values(ensemble, sx1, sy2, g)
    closed = {
        'sx1': complex(math.cos(g), math.sin(g)),
        'sy2': complex(math.cos(g), math.sin(g)),
        'sx1+sy2': complex(1, math.sin(2 * g))
    }
    _logger.info('EPR scenario at g=%s: sum-rule gap %s.', g, gaps['sum_rule'].gap)
    return ScenarioReport(
        'epr', ensemble, g, weak, modular, closed_forms=closed, rule_gaps=gaps,
        notes=(
            'Factors (particle 1, particle 2) in the spin-z basis (up, down).',
            '|up_y> = (|up> + i|down>)/sqrt(2); |up_x> = (|up> + |down>)/sqrt(2).'
        ))


def scenario_hardy(g: float) -> ScenarioReport:
    ensemble = hardy_ensemble()
    pi_pos = SiteObservable(0, _PI_FIRST, _PROJECTOR, label='Pi_O+')
    pi_ele = SiteObservable(1, _PI_FIRST, _PROJECTOR, label='Pi_O-')
    weak, modular, gaps = _pair_values(ensemble, pi_pos, pi_ele, g)
    phase = cmath.exp(-1j * g)
    closed = {'Pi_O+': phase, 'Pi_O-': phase, 'Pi_O++Pi_O-': 2 * phase - 1}
    _logger.info('Hardy scenario at g=%s: sum-rule gap %s.', g, gaps['sum_rule'].gap)
    return ScenarioReport(
        'hardy', ensemble, g, weak, modular, closed_forms=closed, rule_gaps=gaps,
        notes=(
            'Factors (positron, electron) with basis (O, NO).',
            'Pre-selection is the source state without |O>+|O>-, renormalized.'
        ))


def scenario_cheshire(g: float, gamma_bar: float = 0.1) -> ScenarioReport:
    """Cheshire-cat ensemble read by formulas and by the two-photon meter.

    The meter is run twice, once with the left and once with the right path
    projector on photon 2m.
    """
    ensemble = cheshire_ensemble()
    s = SiteObservable(0, stokes(), _SPIN, label='S')
    pi_l = SiteObservable(1, _PI_FIRST, _PROJECTOR, label='Pi_L')
    pi_r = SiteObservable(1, _PI_SECOND, _PROJECTOR, label='Pi_R')
    weak, modular, gaps = _pair_values(ensemble, s, pi_l, g)
    weak_r, modular_r, gaps_r = _pair_values(ensemble, s, pi_r, g)
    weak.update(weak_r)
    modular.update(modular_r)
    gaps.update({f'{key}_R': report for key, report in gaps_r.items()})

    prep = TwoQubitMeterPrep.from_gamma_bar(gamma_bar)
    meter = {}
    for path in (pi_l, pi_r):
        outcome = run_two_qubit_meter(s, path, g, ensemble, prep)
        meter.update(outcome.by_observable())

    s_coeffs = two_level_coeffs(*_SPIN, g)
    p_coeffs = two_level_coeffs(*_PROJECTOR, g)
    closed = {
        'S': s_coeffs.modular(weak['S']),
        'Pi_L': p_coeffs.modular(weak['Pi_L']),
        'Pi_R': p_coeffs.modular(weak['Pi_R'])
    }
    identities = {
        'Pi_L+Pi_R-1': weak['Pi_L'] + weak['Pi_R'] - 1,
        'S*Pi_L+S*Pi_R-S': weak['S*Pi_L'] + weak['S*Pi_R'] - weak['S']
    }
    _logger.info('Cheshire scenario at g=%s: meter values %s.', g, meter)
    return ScenarioReport(
        'cheshire', ensemble, g, weak, modular, meter_values=meter,
        closed_forms=closed, identities=identities, rule_gaps=gaps,
        parameters={'gamma_bar': gamma_bar},
        notes=(
            'Factors (polarization, path) with bases (H, V) and (L, R); '
            'S = |H><H| - |V><V|.',
            'Direct evaluation gives <S*Pi_L>_w = 1 and <S*Pi_R>_w = 0, the transpose '
            'of the usual Cheshire-cat assignment; the computed values are reported '
            'without relabeling the paths.',
            'Meter photon 1m reads S and photon 2m reads the path projector; labels '
            'are written 1m first, so VH carries S, HV the path and VV the sum.'
        ))


def scenario_crz(theta: float, gamma_bar: float = 0.1) -> ScenarioReport:
    """sigma_z read through the controlled-Rz gate at g = theta / 2."""
    ensemble = crz_ensemble()
    g = theta / 2
    sz = pauli_z()
    weak = weak_value(sz, ensemble)
    modular = modular_value(sz, _SPIN, g, ensemble)
    prep = MeterPrep.from_gamma_bar(gamma_bar)
    circuit = run_meter_unitary(
        build_crz_circuit(theta), ensemble, prep.ket(), prep.gamma, prep.gamma_bar)
    coupled = run_single_meter(sz, g, ensemble, prep)
    closed = {
        'abs_sz': complex(math.sqrt(
            math.cos(g) ** 2 + (1 + SQRT2) ** 2 * math.sin(g) ** 2)),
        'small_g_line': small_g_modular_estimate(weak, g)
    }
    _logger.info('C-Rz scenario at theta=%s: |(sz)_mod| = %s.', theta, abs(modular))
    return ScenarioReport(
        'crz', ensemble, g, {'sz': weak}, {'sz': modular},
        meter_values={'circuit': circuit.extracted['1'], 'sz': coupled.extracted['1']},
        closed_forms=closed,
        parameters={'theta': theta, 'gamma_bar': gamma_bar},
        notes=(
            'U = I x |0><0| + Rz(theta) x |1><1| on (system, meter) with g = theta/2.',
            'The phase of (sz)_mod depends on the sign convention of the coupling; '
            'its modulus does not.'
        ))


SCENARIOS: Dict[str, Callable[..., ScenarioReport]] = {
    'epr': scenario_epr,
    'hardy': scenario_hardy,
    'cheshire': scenario_cheshire,
    'crz': scenario_crz
}


def run_scenario(name: str, g: float, gamma_bar: float = 0.1) -> ScenarioReport:
    """Run a named scenario at coupling g; the C-Rz gate angle is 2 g."""
    try:
        builder = SCENARIOS[name]
    except KeyError:
        raise KeyError(
            f'Unknown scenario {name!r}. Choose from {", ".join(sorted(SCENARIOS))}.')
    if name == 'crz':
        return builder(2 * g, gamma_bar)
    if name == 'cheshire':
        return builder(g, gamma_bar)
    return builder(g)
