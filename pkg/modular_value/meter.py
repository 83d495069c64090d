"""Meter-qubit protocols that read modular values out of an ancilla.

Meter factors are appended after the system factors. The system is projected
exactly onto the post-selected state; only the meter readout is sampled.
"""
import csv
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from .exceptions import BasisError, ConversionUndefinedError, NotHermitianError, \
    ShapeMismatchError, SiteError
from .tensor import Ket, Operator, SiteObservable, add, apply, embed, \
    partial_inner, pauli_z, tensor_kets, tensor_ops
from .values import PrePostEnsemble, as_coupling, complex_to_dict, exp_spectral, \
    weak_value

_logger = logging.getLogger(__name__)

_PROJECTOR_ONE = Operator((2,), np.diag([0, 1]), hermitian=True)
_IDENTITY = Operator.identity((2,))
_HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
_S_DAGGER = np.diag([1, -1j])
_BASIS_ROTATIONS = {
    'Z': np.eye(2, dtype=np.complex128),
    'X': _HADAMARD,
    'Y': _HADAMARD @ _S_DAGGER
}


@dataclass(frozen=True)
class MeterPrep:
    """Single meter qubit prepared as gamma |0> + gamma_bar |1>."""
    gamma: float
    gamma_bar: float

    def __post_init__(self):
        if self.gamma_bar <= 0:
            raise ValueError(f'gamma_bar must be positive. Got {self.gamma_bar}.')
        if abs(self.gamma ** 2 + self.gamma_bar ** 2 - 1) > 1e-12:
            raise ValueError('gamma^2 + gamma_bar^2 must equal 1.')

    @classmethod
    def from_gamma_bar(cls, gamma_bar: float) -> 'MeterPrep':
        return cls(math.sqrt(1 - gamma_bar ** 2), gamma_bar)

    def ket(self) -> Ket:
        return Ket((2,), [self.gamma, self.gamma_bar], normalized=True)


@dataclass(frozen=True)
class TwoQubitMeterPrep:
    """Entangled meter gamma |HH> + gamma_bar (|HV> + |VH> + |VV>) on photons 1m, 2m."""
    gamma: float
    gamma_bar: float

    def __post_init__(self):
        if self.gamma_bar <= 0:
            raise ValueError(f'gamma_bar must be positive. Got {self.gamma_bar}.')
        if abs(self.gamma ** 2 + 3 * self.gamma_bar ** 2 - 1) > 1e-12:
            raise ValueError('gamma^2 + 3 gamma_bar^2 must equal 1.')

    @classmethod
    def from_gamma_bar(cls, gamma_bar: float) -> 'TwoQubitMeterPrep':
        return cls(math.sqrt(1 - 3 * gamma_bar ** 2), gamma_bar)

    def ket(self) -> Ket:
        g, gb = self.gamma, self.gamma_bar
        return Ket((2, 2), [g, gb, gb, gb], normalized=True)


@dataclass(frozen=True, eq=False)
class MeterOutcome:
    """Unnormalized meter state after post-selection and the values read from it.

    Args:
        unnormalized_meter_ket: <phi| U (|psi> x |xi>) on the meter factors.
        post_selection_amplitude: The <phi|psi> prefactor, read from the
            reference component.
        extracted: Meter basis label to modular value, each read as the amplitude
            ratio against the reference component scaled by gamma / gamma_bar.
        labels: Meter basis labels in amplitude order.
        assignments: Meter basis label to the observable it carries.
        gamma: Reference-component preparation amplitude.
        gamma_bar: Interacting-component preparation amplitude.
        global_norm: Norm of the joint state before post-selection.
    """
    unnormalized_meter_ket: Ket
    post_selection_amplitude: complex
    extracted: Dict[str, complex]
    labels: Tuple[str, ...]
    assignments: Dict[str, str]
    gamma: float
    gamma_bar: float
    global_norm: float

    def amplitude(self, label: str) -> complex:
        return complex(self.unnormalized_meter_ket.amplitudes[self.labels.index(label)])

    def by_observable(self) -> Dict[str, complex]:
        return {self.assignments[label]: value for label, value in self.extracted.items()}

    def to_dict(self) -> Dict:
        return {
            'type': 'MeterOutcome',
            'labels': list(self.labels),
            'meter_amplitudes': {
                label: complex_to_dict(self.amplitude(label)) for label in self.labels
            },
            'post_selection_amplitude': complex_to_dict(self.post_selection_amplitude),
            'extracted': {
                label: complex_to_dict(value) for label, value in self.extracted.items()
            },
            'assignments': dict(self.assignments),
            'gamma': self.gamma,
            'gamma_bar': self.gamma_bar
        }


@dataclass(frozen=True)
class ShotRecord:
    """Histogram of a seeded finite-shot meter readout in one product-Pauli basis."""
    shots: int
    basis: str
    counts: Dict[str, int]
    seed: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValueError('Counts do not add up to the number of shots.')

    def expectation(self, qubit: int = 0) -> float:
        """Estimated Pauli expectation of one meter qubit; outcome 0 is +1."""
        plus = sum(n for label, n in self.counts.items() if label[qubit] == '0')
        return (2 * plus - self.shots) / self.shots

    def to_dict(self) -> Dict:
        return {
            'shots': self.shots, 'basis': self.basis, 'seed': self.seed,
            'counts': dict(self.counts)
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'ShotRecord':
        return cls(int(data['shots']), data['basis'],
                   {k: int(v) for k, v in data['counts'].items()}, int(data['seed']))


@dataclass(frozen=True)
class ModularEstimate:
    """Modular value reconstructed from meter Pauli expectations."""
    value: complex
    stderr_re: float
    stderr_im: float
    bloch: Tuple[float, float, float]

    def within(self, exact: complex, sigmas: float = 5.0) -> bool:
        return abs(self.value.real - exact.real) <= sigmas * self.stderr_re and \
            abs(self.value.imag - exact.imag) <= sigmas * self.stderr_im

    def to_dict(self) -> Dict:
        return {
            'value': complex_to_dict(self.value),
            'stderr': {'re': self.stderr_re, 'im': self.stderr_im},
            'bloch': list(self.bloch)
        }


@dataclass(frozen=True)
class SweepRow:
    g: float
    modular: complex
    weak: complex

    @property
    def abs_modular(self) -> float:
        return abs(self.modular)

    def as_csv_row(self) -> List[str]:
        return [repr(value) for value in (
            self.g, self.modular.real, self.modular.imag, self.abs_modular,
            self.weak.real, self.weak.imag
        )]


SWEEP_HEADER = ('g', 're_mod', 'im_mod', 'abs_mod', 're_weak', 'im_weak')


def _meter_labels(n_qubits: int, alphabet: str) -> Tuple[str, ...]:
    return tuple(
        ''.join(alphabet[int(bit)] for bit in format(k, f'0{n_qubits}b'))
        for k in range(2 ** n_qubits)
    )


def run_meter_unitary(
    unitary: Operator, ensemble: PrePostEnsemble, meter_ket: Ket, gamma: float,
    gamma_bar: float, alphabet: str = '01', assignments: Optional[Dict] = None
) -> MeterOutcome:
    """Apply a system-meter unitary, post-select the system and read the meter.

    The reference component is the all-zero meter label; every other component is
    read as amplitude * gamma / (reference amplitude * gamma_bar).
    """
    joint = tensor_kets([ensemble.psi, meter_ket])
    unitary.shape.check_same(joint.shape, 'meter unitary and system-meter state')
    final = apply(unitary, joint)
    meter = partial_inner(ensemble.phi, final)
    labels = _meter_labels(meter.shape.n_factors, alphabet)
    reference = complex(meter.amplitudes[0])
    extracted = {
        label: complex(meter.amplitudes[k]) * gamma / (reference * gamma_bar)
        for k, label in enumerate(labels) if k
    }
    _logger.debug('Meter readout %s with global norm %s.', extracted, final.norm)
    return MeterOutcome(
        meter, reference / gamma, extracted, labels,
        assignments or {label: label for label in labels[1:]},
        gamma, gamma_bar, final.norm
    )


def run_single_meter(
    op: Operator, c, ensemble: PrePostEnsemble, prep: MeterPrep
) -> MeterOutcome:
    """Couple a meter qubit through exp(-i g A x |1><1|) and read (A)_mod."""
    if not op.hermitian:
        raise NotHermitianError('The measured observable must be Hermitian.')
    op.shape.check_same(ensemble.shape, 'observable and ensemble')
    unitary = exp_spectral(tensor_ops([op, _PROJECTOR_ONE]), as_coupling(c))
    return run_meter_unitary(
        unitary, ensemble, prep.ket(), prep.gamma, prep.gamma_bar,
        assignments={'1': 'A'}
    )


def run_two_qubit_meter(
    s_obs: SiteObservable, p_obs: SiteObservable, c, ensemble: PrePostEnsemble,
    prep: TwoQubitMeterPrep
) -> MeterOutcome:
    """Entangled two-photon meter; photon 1m reads ``s_obs``, photon 2m reads ``p_obs``.

    H = g (S x |V><V|_1m + P x |V><V|_2m). Meter labels are written 1m first, so
    |VH> carries (S)_mod, |HV> carries (P)_mod and |VV> carries (S + P)_mod.
    """
    shape = ensemble.shape
    if shape.n_factors < 2:
        raise ShapeMismatchError('The two-qubit meter needs at least two system factors.')
    if s_obs.site == p_obs.site:
        raise SiteError(f'Both observables act on system site {s_obs.site}.')
    s_term = tensor_ops([embed(s_obs, shape), _PROJECTOR_ONE, _IDENTITY])
    p_term = tensor_ops([embed(p_obs, shape), _IDENTITY, _PROJECTOR_ONE])
    unitary = exp_spectral(add(s_term, p_term), as_coupling(c))
    assignments = {
        'VH': s_obs.name, 'HV': p_obs.name, 'VV': f'{s_obs.name}+{p_obs.name}'
    }
    return run_meter_unitary(
        unitary, ensemble, prep.ket(), prep.gamma, prep.gamma_bar,
        alphabet='HV', assignments=assignments
    )


def _generator(seed: int) -> np.random.Generator:
    # Philox is counter-based; the 64-bit seed is its key
    return np.random.Generator(np.random.Philox(key=int(seed)))


def sample_meter(outcome: MeterOutcome, basis: str, shots: int, seed: int) -> ShotRecord:
    """Sample a product-Pauli readout of the normalized meter state.

    Args:
        outcome: Meter outcome to sample from.
        basis: One of X, Y, Z per meter qubit, e.g. ``Z`` or ``XZ``.
        shots: Number of i.i.d. shots.
        seed: 64-bit seed; the histogram is a function of (outcome, basis, shots, seed).
    """
    if shots < 1:
        raise ValueError(f'shots must be at least 1. Got {shots}.')
    meter = outcome.unnormalized_meter_ket.normalize()
    n_qubits = meter.shape.n_factors
    if len(basis) != n_qubits or any(b not in _BASIS_ROTATIONS for b in basis):
        raise BasisError(
            f'Unknown basis {basis!r} for a {n_qubits}-qubit meter; use X, Y or Z '
            'per qubit.')
    rotation = _BASIS_ROTATIONS[basis[0]]
    for letter in basis[1:]:
        rotation = np.kron(rotation, _BASIS_ROTATIONS[letter])
    probabilities = np.abs(rotation @ meter.amplitudes) ** 2
    probabilities = probabilities / probabilities.sum()
    counts = _generator(seed).multinomial(shots, probabilities)
    labels = _meter_labels(n_qubits, '01')
    _logger.debug('Sampled %d shots in basis %s with seed %d.', shots, basis, seed)
    return ShotRecord(
        int(shots), basis, {label: int(n) for label, n in zip(labels, counts)}, int(seed))


def exact_bloch(outcome: MeterOutcome) -> Tuple[float, float, float]:
    """Pauli expectations of a single-qubit meter state (the infinite-shot limit)."""
    meter = outcome.unnormalized_meter_ket.normalize()
    if meter.shape.dims != (2,):
        raise ShapeMismatchError('Bloch components need a single-qubit meter.')
    alpha, beta = meter.amplitudes
    cross = np.conj(alpha) * beta
    return 2 * cross.real, 2 * cross.imag, abs(alpha) ** 2 - abs(beta) ** 2


def estimate_modular_from_expectations(
    x: float, y: float, z: float, prep: MeterPrep,
    variances: Tuple[float, float, float] = (0.0, 0.0, 0.0)
) -> ModularEstimate:
    """Invert the meter Bloch components into (A)_mod.

    The meter state alpha |0> + beta |1> gives beta / alpha = (x + i y) / (1 + z),
    and (A)_mod = (beta / alpha) gamma / gamma_bar.
    """
    denominator = 1 + z
    if denominator <= 1e-12:
        raise ConversionUndefinedError(
            'The meter has no |0> population; the amplitude ratio is undefined.')
    ratio = prep.gamma / prep.gamma_bar
    var_x, var_y, var_z = variances
    stderr_re = ratio * math.sqrt(
        var_x / denominator ** 2 + x ** 2 * var_z / denominator ** 4)
    stderr_im = ratio * math.sqrt(
        var_y / denominator ** 2 + y ** 2 * var_z / denominator ** 4)
    value = complex(x, y) / denominator * ratio
    return ModularEstimate(value, stderr_re, stderr_im, (x, y, z))


def estimate_modular_from_shots(
    records: Sequence[ShotRecord], prep: MeterPrep
) -> ModularEstimate:
    """Reconstruct (A)_mod from X, Y and Z readouts of a single meter qubit."""
    by_basis = {record.basis: record for record in records}
    missing = [b for b in 'XYZ' if b not in by_basis]
    if missing:
        raise BasisError(f'Missing meter readout in basis {", ".join(missing)}.')
    expectations, variances = [], []
    for letter in 'XYZ':
        record = by_basis[letter]
        value = record.expectation()
        expectations.append(value)
        variances.append((1 - value ** 2) / record.shots)
    if by_basis['Z'].counts.get('0', 0) == 0:
        raise ConversionUndefinedError(
            'No shot landed on |0>; the amplitude ratio is undefined.')
    x, y, z = expectations
    return estimate_modular_from_expectations(x, y, z, prep, tuple(variances))


def build_crz_circuit(theta: float) -> Operator:
    """Controlled-Rz on system x meter: I x |0><0| + Rz(theta) x |1><1|."""
    if not math.isfinite(theta):
        raise ValueError(f'theta must be finite. Got {theta}.')
    rz = Operator((2,), np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)]))
    zero = Operator((2,), np.diag([1, 0]))
    return add(tensor_ops([_IDENTITY, zero]), tensor_ops([rz, _PROJECTOR_ONE]))


def modular_sweep(
    op: Operator, ensemble: PrePostEnsemble, prep: MeterPrep, couplings: Sequence[float]
) -> List[SweepRow]:
    """Meter-extracted modular value over a coupling grid, in grid order."""
    weak = weak_value(op, ensemble)
    rows = []
    for g in couplings:
        outcome = run_single_meter(op, g, ensemble, prep)
        rows.append(SweepRow(float(g), outcome.extracted['1'], weak))
    _logger.debug('Swept %d couplings.', len(rows))
    return rows


def crz_sweep(
    ensemble: PrePostEnsemble, prep: MeterPrep, thetas: Sequence[float]
) -> List[SweepRow]:
    """Sweep of the C-Rz readout of sigma_z; each row reports g = theta / 2."""
    if ensemble.shape.dims != (2,):
        raise ShapeMismatchError('The C-Rz sweep needs a single-qubit system.')
    return modular_sweep(pauli_z(), ensemble, prep, [theta / 2 for theta in thetas])


def write_sweep_csv(rows: Sequence[SweepRow], stream: TextIO):
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(SWEEP_HEADER)
    for row in rows:
        writer.writerow(row.as_csv_row())
