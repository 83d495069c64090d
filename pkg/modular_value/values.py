"""Weak values, modular values and the conversions between them.

The coupling convention is fixed as U = exp(-i g A). Special cases that other
work states with the opposite sign are reached by passing a negative g.
"""
import cmath
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT_TOLERANCES
from .exceptions import ConversionUndefinedError, DegenerateSpectrumError, \
    NotHermitianError, OrthogonalPostSelectionError, ShapeMismatchError
from .tensor import Ket, Operator, apply, inner

_logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PrePostEnsemble:
    """Pre-selected ket psi and post-selected ket phi with their cached overlap.

    Use ``PrePostEnsemble.create`` to build one; it normalizes the kets by default
    and rejects (numerically) orthogonal post-selections.
    """
    psi: Ket
    phi: Ket
    overlap: complex

    @classmethod
    def create(
        cls, psi: Ket, phi: Ket, normalize: bool = True,
        eps_overlap: Optional[float] = None
    ) -> 'PrePostEnsemble':
        eps_overlap = DEFAULT_TOLERANCES.eps_overlap if eps_overlap is None \
            else eps_overlap
        psi.shape.check_same(phi.shape, 'pre- and post-selected states')
        if normalize:
            psi, phi = psi.normalize(), phi.normalize()
        overlap = inner(phi, psi)
        if abs(overlap) <= eps_overlap:
            raise OrthogonalPostSelectionError(
                f'|<phi|psi>| = {abs(overlap):.3e} is not above {eps_overlap:.1e}.')
        _logger.debug('Ensemble on dims %s with overlap %s.', psi.shape.dims, overlap)
        return cls(psi, phi, overlap)

    @property
    def shape(self):
        return self.psi.shape

    def sandwich(self, op: Operator) -> complex:
        """<phi|op|psi>."""
        return inner(self.phi, apply(op, self.psi))

    def to_dict(self) -> Dict:
        return {
            'psi': self.psi.to_dict(),
            'phi': self.phi.to_dict(),
            'overlap': complex_to_dict(self.overlap)
        }


@dataclass(frozen=True)
class CouplingSpec:
    """Coupling constant g, in radians of generated phase per unit eigenvalue."""
    g: float

    def __post_init__(self):
        if not np.isfinite(self.g):
            raise ValueError(f'The coupling constant must be finite. Got {self.g}.')
        object.__setattr__(self, 'g', float(self.g))


@dataclass(frozen=True)
class TwoLevelCoeffs:
    """a and b with exp(-i g A) = a A + b I for a two-level observable A."""
    a: complex
    b: complex
    lambda1: float
    lambda2: float
    g: float

    def modular(self, weak: complex) -> complex:
        return self.a * weak + self.b

    def to_dict(self) -> Dict:
        return {
            'a': complex_to_dict(self.a), 'b': complex_to_dict(self.b),
            'lambda1': self.lambda1, 'lambda2': self.lambda2, 'g': self.g
        }


def complex_to_dict(value: complex) -> Dict[str, float]:
    value = complex(value)
    return {'re': value.real, 'im': value.imag}


def complex_from_dict(data: Dict[str, float]) -> complex:
    return complex(data['re'], data['im'])


def as_coupling(c) -> CouplingSpec:
    return c if isinstance(c, CouplingSpec) else CouplingSpec(c)


def _require_hermitian(op: Operator):
    if not op.hermitian:
        raise NotHermitianError(
            'Operator must carry the Hermitian flag. Use Operator.as_hermitian().')


def _check_gaps(eigs: Sequence[float], eps_degen: float):
    for k, first in enumerate(eigs):
        for second in eigs[k + 1:]:
            if abs(first - second) <= eps_degen:
                raise DegenerateSpectrumError(
                    f'Eigenvalues {first!r} and {second!r} are closer than '
                    f'{eps_degen:.1e}.')


def weak_value(op: Operator, ensemble: PrePostEnsemble) -> complex:
    """<phi|A|psi> / <phi|psi>."""
    op.shape.check_same(ensemble.shape, 'observable and ensemble')
    return ensemble.sandwich(op) / ensemble.overlap


def exp_spectral(op: Operator, c) -> Operator:
    """exp(-i g A) from the eigendecomposition of a Hermitian A."""
    _require_hermitian(op)
    g = as_coupling(c).g
    eigenvalues, vectors = np.linalg.eigh(op.matrix)
    phases = np.exp(-1j * g * eigenvalues)
    return Operator(op.shape, (vectors * phases) @ vectors.conj().T)


def exp_lagrange(
    op: Operator, eigs: Sequence[float], c, eps_degen: Optional[float] = None
) -> Operator:
    """exp(-i g A) as the Lagrange interpolation polynomial through the eigenvalues.

    exp(-i g A) = sum_k exp(-i g l_k) prod_{m != k} (A - l_m I) / (l_k - l_m)

    Args:
        op: Operator with ``len(eigs)`` distinct eigenvalues.
        eigs: The n distinct eigenvalues of ``op``, where n is the matrix side.
        c: Coupling constant (CouplingSpec or float).
        eps_degen: Degeneracy tolerance override.
    """
    eps_degen = DEFAULT_TOLERANCES.eps_degen if eps_degen is None else eps_degen
    g = as_coupling(c).g
    eigs = [float(v) for v in eigs]
    if len(eigs) != op.side:
        raise ShapeMismatchError(
            f'{len(eigs)} eigenvalues given for a {op.side}x{op.side} operator.')
    _check_gaps(eigs, eps_degen)
    identity = np.eye(op.side, dtype=np.complex128)
    total = np.zeros_like(identity)
    for k, lambda_k in enumerate(eigs):
        term = identity.copy()
        for m, lambda_m in enumerate(eigs):
            if m != k:
                term = term @ (op.matrix - lambda_m * identity) / (lambda_k - lambda_m)
        total += cmath.exp(-1j * g * lambda_k) * term
    return Operator(op.shape, total)


def exp_lagrange_hermitian(
    op: Operator, c, eps_degen: Optional[float] = None
) -> Operator:
    """Lagrange exponential of a Hermitian operator with computed eigenvalues."""
    _require_hermitian(op)
    eigs = np.linalg.eigvalsh(op.matrix).tolist()
    return exp_lagrange(op, eigs, c, eps_degen=eps_degen)


def two_level_coeffs(
    lambda1: float, lambda2: float, c, eps_degen: Optional[float] = None
) -> TwoLevelCoeffs:
    """Coefficients of exp(-i g A) = a A + b I for eigenvalues lambda1 != lambda2."""
    eps_degen = DEFAULT_TOLERANCES.eps_degen if eps_degen is None else eps_degen
    g = as_coupling(c).g
    lambda1, lambda2 = float(lambda1), float(lambda2)
    _check_gaps([lambda1, lambda2], eps_degen)
    e1 = cmath.exp(-1j * g * lambda1)
    e2 = cmath.exp(-1j * g * lambda2)
    gap = lambda1 - lambda2
    a = (e1 - e2) / gap
    b = -(lambda2 * e1 - lambda1 * e2) / gap
    return TwoLevelCoeffs(a, b, lambda1, lambda2, g)


def two_level_operator(
    op: Operator, coeffs: TwoLevelCoeffs, eigen_tol: Optional[float] = None
) -> Operator:
    """a A + b I, checked to be exp(-i g A) by the minimal polynomial of A.

    A may act on a larger space (an embedded site observable) as long as its
    spectrum is the pair (lambda1, lambda2).
    """
    eigen_tol = DEFAULT_TOLERANCES.eigen_tol if eigen_tol is None else eigen_tol
    identity = np.eye(op.side)
    residual = (op.matrix - coeffs.lambda1 * identity) @ \
        (op.matrix - coeffs.lambda2 * identity)
    if np.max(np.abs(residual), initial=0) > eigen_tol:
        raise ValueError(
            f'Operator spectrum is not contained in {(coeffs.lambda1, coeffs.lambda2)}.')
    return Operator(op.shape, coeffs.a * op.matrix + coeffs.b * identity)


def modular_value(
    op: Operator, eigs: Optional[Tuple[float, float]], c,
    ensemble: PrePostEnsemble, method: str = 'spectral',
    eps_degen: Optional[float] = None, eigen_tol: Optional[float] = None
) -> complex:
    """<phi|exp(-i g A)|psi> / <phi|psi>.

    Args:
        op: Hermitian observable on the ensemble's shape.
        eigs: Optional eigenvalue pair of a two-level observable.
        c: Coupling constant (CouplingSpec or float).
        ensemble: Pre/post-selected ensemble.
        method: ``spectral`` (default), ``lagrange`` (eigenvalues computed unless
            the operator side matches ``eigs``) or ``closed_form`` (a <A>_w + b,
            needs ``eigs``).
        eps_degen: Degeneracy tolerance override for ``lagrange`` and
            ``closed_form``.
        eigen_tol: Spectrum check tolerance override for ``closed_form``.
    """
    _require_hermitian(op)
    op.shape.check_same(ensemble.shape, 'observable and ensemble')
    c = as_coupling(c)
    if method == 'spectral':
        unitary = exp_spectral(op, c)
    elif method == 'lagrange':
        unitary = exp_lagrange(op, eigs, c, eps_degen=eps_degen) \
            if eigs is not None and len(eigs) == op.side \
            else exp_lagrange_hermitian(op, c, eps_degen=eps_degen)
    elif method == 'closed_form':
        if eigs is None:
            raise ValueError('The closed form needs the eigenvalue pair.')
        coeffs = two_level_coeffs(eigs[0], eigs[1], c, eps_degen=eps_degen)
        two_level_operator(op, coeffs, eigen_tol=eigen_tol)
        return modular_from_weak(weak_value(op, ensemble), coeffs)
    else:
        raise ValueError(f'Unknown evaluation method: {method}.')
    return ensemble.sandwich(unitary) / ensemble.overlap


def modular_from_weak(weak: complex, coeffs: TwoLevelCoeffs) -> complex:
    """(A)_mod = a <A>_w + b."""
    return coeffs.a * complex(weak) + coeffs.b


def weak_from_modular(
    modular: complex, coeffs: TwoLevelCoeffs, eps_a: Optional[float] = None
) -> complex:
    """<A>_w = ((A)_mod - b) / a.

    Undefined when g (lambda1 - lambda2) is a multiple of 2 pi since a vanishes.
    """
    eps_a = DEFAULT_TOLERANCES.eps_a if eps_a is None else eps_a
    if abs(coeffs.a) <= eps_a:
        raise ConversionUndefinedError(
            f'|a| = {abs(coeffs.a):.3e} at g = {coeffs.g!r}; the weak value cannot be '
            'recovered at this coupling.')
    return (complex(modular) - coeffs.b) / coeffs.a


# closed forms known from earlier work, in the exp(-i g A) convention
_SPECIAL_CASES = {
    ('spin', -np.pi / 2): (1j, 0),
    ('spin', np.pi / 2): (-1j, 0),
    ('projector', -np.pi / 2): (-(1 - 1j), 1),
    ('projector', np.pi): (-2, 1),
}

_SPECTRA = {'spin': (1.0, -1.0), 'projector': (1.0, 0.0)}


def known_special_case(kind: str, g: float) -> Tuple[complex, complex]:
    """(a, b) of a special coupling with a textbook closed form.

    Spin (eigenvalues +1, -1) at g = -pi/2 gives (A)_mod = i <A>_w and at
    g = pi/2 gives -i <A>_w. A projector at g = -pi/2 gives 1 - (1 - i) <A>_w and
    at g = pi gives 1 - 2 <A>_w.
    """
    for (name, value), pair in _SPECIAL_CASES.items():
        if name == kind and abs(value - g) < 1e-12:
            return pair
    raise KeyError(f'No closed form recorded for {kind} at g = {g!r}.')


def special_case_spectrum(kind: str) -> Tuple[float, float]:
    return _SPECTRA[kind]


def small_g_modular_estimate(weak: complex, g: float) -> complex:
    """First-order line 1 - i g <A>_w that a small-coupling modular value follows."""
    return 1 - 1j * g * complex(weak)


def calibrate_weak_from_small_g(modular: complex, g: float) -> complex:
    """Weak value from a small-coupling modular value, i ((A)_mod - 1) / g."""
    if g == 0:
        raise ConversionUndefinedError('Calibration needs a nonzero coupling.')
    return 1j * (complex(modular) - 1) / g
