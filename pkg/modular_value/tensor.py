"""Dense complex linear algebra over small tensor-product Hilbert spaces.

Basis ordering is row-major over factors: for dims (2, 2) the basis is
|00>, |01>, |10>, |11>. All objects are immutable after construction; the numpy
arrays they hold are read-only copies.
"""
import logging
from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import DEFAULT_TOLERANCES
from .exceptions import DimensionLimitError, NotHermitianError, ShapeMismatchError, \
    SiteError

_logger = logging.getLogger(__name__)


def _read_only(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.complex128, copy=True)
    array.setflags(write=False)
    return array


def _interleave(values: np.ndarray) -> List[float]:
    flat = np.asarray(values).reshape(-1)
    pairs = np.empty(2 * flat.size, dtype=float)
    pairs[0::2] = flat.real
    pairs[1::2] = flat.imag
    return pairs.tolist()


def _deinterleave(values: Sequence[float]) -> np.ndarray:
    pairs = np.asarray(values, dtype=float)
    return pairs[0::2] + 1j * pairs[1::2]


@dataclass(frozen=True)
class HilbertShape:
    """Ordered factor dimensions of a tensor-product Hilbert space."""
    dims: Tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise ShapeMismatchError('A Hilbert space needs at least one factor.')
        if any(d < 1 for d in dims):
            raise ShapeMismatchError(f'Factor dimensions must be positive. Got {dims}.')
        total = reduce(lambda x, y: x * y, dims, 1)
        if total > DEFAULT_TOLERANCES.max_total_dim:
            raise DimensionLimitError(
                f'Total dimension {total} exceeds the dense-matrix cap of '
                f'{DEFAULT_TOLERANCES.max_total_dim}.')
        object.__setattr__(self, 'dims', dims)

    @property
    def total_dim(self) -> int:
        return reduce(lambda x, y: x * y, self.dims, 1)

    @property
    def n_factors(self) -> int:
        return len(self.dims)

    def check_same(self, other: 'HilbertShape', what: str = 'operands'):
        if self.dims != other.dims:
            raise ShapeMismatchError(
                f'Shape mismatch between {what}: {self.dims} != {other.dims}.')


def _as_shape(shape: Union[HilbertShape, Iterable[int]]) -> HilbertShape:
    return shape if isinstance(shape, HilbertShape) else HilbertShape(tuple(shape))


@dataclass(frozen=True, eq=False)
class Ket:
    """Complex amplitude vector over a tensor-product Hilbert space.

    Args:
        shape: HilbertShape (or a sequence of factor dimensions).
        amplitudes: Amplitudes in row-major factor order.
        normalized: Assert that the ket has unit norm. Checked on construction.
    """
    shape: HilbertShape
    amplitudes: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        shape = _as_shape(self.shape)
        amplitudes = _read_only(np.asarray(self.amplitudes).reshape(-1))
        if amplitudes.size != shape.total_dim:
            raise ShapeMismatchError(
                f'Ket has {amplitudes.size} amplitudes but dims {shape.dims} need '
                f'{shape.total_dim}.')
        if self.normalized:
            norm = float(np.linalg.norm(amplitudes))
            if abs(norm - 1) > DEFAULT_TOLERANCES.norm_tol:
                raise ValueError(f'Ket marked normalized has norm {norm!r}.')
        object.__setattr__(self, 'shape', shape)
        object.__setattr__(self, 'amplitudes', amplitudes)

    @classmethod
    def basis(cls, dims: Sequence[int], indices: Sequence[int]) -> 'Ket':
        """Computational basis ket |i_1 i_2 ... i_N>."""
        shape = _as_shape(dims)
        if len(indices) != shape.n_factors:
            raise ShapeMismatchError(
                f'{len(indices)} indices given for {shape.n_factors} factors.')
        amplitudes = np.zeros(shape.total_dim, dtype=np.complex128)
        amplitudes[np.ravel_multi_index(tuple(indices), shape.dims)] = 1
        return cls(shape, amplitudes, normalized=True)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> 'Ket':
        norm = self.norm
        if norm == 0:
            raise ValueError('Cannot normalize the zero ket.')
        return Ket(self.shape, self.amplitudes / norm, normalized=True)

    def allclose(self, other: 'Ket', atol: float = 1e-12) -> bool:
        return self.shape.dims == other.shape.dims and \
            bool(np.allclose(self.amplitudes, other.amplitudes, rtol=0, atol=atol))

    def to_dict(self) -> Dict:
        return {
            'type': 'Ket',
            'dims': list(self.shape.dims),
            'amplitudes': _interleave(self.amplitudes)
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'Ket':
        assert data['type'] == 'Ket', f'Expected Ket dictionary. Got {data["type"]}.'
        return cls(HilbertShape(tuple(data['dims'])), _deinterleave(data['amplitudes']))

    def __repr__(self):
        return f'Ket(dims={self.shape.dims}, amplitudes={self.amplitudes.tolist()})'


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense complex matrix tagged with a tensor-product factor structure.

    The hermitian flag is asserted by the caller and checked on construction.
    """
    shape: HilbertShape
    matrix: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        shape = _as_shape(self.shape)
        matrix = _read_only(self.matrix)
        side = shape.total_dim
        if matrix.shape != (side, side):
            raise ShapeMismatchError(
                f'Operator matrix has shape {matrix.shape}; dims {shape.dims} need '
                f'({side}, {side}).')
        if self.hermitian:
            deviation = float(np.max(np.abs(matrix - matrix.conj().T), initial=0))
            if deviation > DEFAULT_TOLERANCES.hermitian_tol:
                raise NotHermitianError(
                    f'Operator flagged Hermitian deviates from its adjoint by '
                    f'{deviation:.3e}.')
        object.__setattr__(self, 'shape', shape)
        object.__setattr__(self, 'matrix', matrix)

    @classmethod
    def identity(cls, dims: Sequence[int]) -> 'Operator':
        shape = _as_shape(dims)
        return cls(shape, np.eye(shape.total_dim), hermitian=True)

    @property
    def side(self) -> int:
        return self.shape.total_dim

    def as_hermitian(self) -> 'Operator':
        """Return the same operator with the Hermitian flag asserted and checked."""
        return Operator(self.shape, self.matrix, hermitian=True)

    def allclose(self, other: 'Operator', atol: float = 1e-12) -> bool:
        return self.shape.dims == other.shape.dims and \
            bool(np.allclose(self.matrix, other.matrix, rtol=0, atol=atol))

    def to_dict(self) -> Dict:
        return {
            'type': 'Operator',
            'dims': list(self.shape.dims),
            'hermitian': self.hermitian,
            'matrix': _interleave(self.matrix)
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'Operator':
        assert data['type'] == 'Operator', \
            f'Expected Operator dictionary. Got {data["type"]}.'
        shape = HilbertShape(tuple(data['dims']))
        matrix = _deinterleave(data['matrix']).reshape(shape.total_dim, -1)
        return cls(shape, matrix, hermitian=data.get('hermitian', False))

    def __repr__(self):
        return f'Operator(dims={self.shape.dims}, hermitian={self.hermitian})'


@dataclass(frozen=True, eq=False)
class SiteObservable:
    """A local observable attached to one tensor factor.

    Args:
        site: 0-based factor index.
        local: Single-factor operator.
        eigenvalues: Optional (lambda1, lambda2) for two-level factors. Checked
            against the spectrum of ``local``.
        label: Optional display name used in reports.
    """
    site: int
    local: Operator
    eigenvalues: Optional[Tuple[float, float]] = None
    label: str = field(default='', compare=False)

    def __post_init__(self):
        if self.site < 0:
            raise SiteError(f'Site index must be non-negative. Got {self.site}.')
        if self.local.shape.n_factors != 1:
            raise ShapeMismatchError(
                f'A site observable acts on one factor. Got dims {self.local.shape.dims}.')
        if self.eigenvalues is not None:
            if self.local.side != 2:
                raise ShapeMismatchError(
                    'An eigenvalue pair is only meaningful on a two-level factor.')
            lambda1, lambda2 = (float(v) for v in self.eigenvalues)
            if lambda1 == lambda2:
                raise ValueError('The two eigenvalues of a site observable must differ.')
            computed = np.linalg.eigvals(self.local.matrix)
            declared = np.sort_complex(np.array([lambda1, lambda2], dtype=complex))
            if np.max(np.abs(np.sort_complex(computed) - declared)) > \
                    DEFAULT_TOLERANCES.eigen_tol:
                raise ValueError(
                    f'Declared eigenvalues {(lambda1, lambda2)} do not match the '
                    f'spectrum {computed.tolist()}.')
            object.__setattr__(self, 'eigenvalues', (lambda1, lambda2))

    @property
    def dimension(self) -> int:
        return self.local.side

    @property
    def name(self) -> str:
        return self.label or f'A{self.site}'


def tensor_kets(parts: Sequence[Ket]) -> Ket:
    """Kronecker product of kets in the listed order."""
    if not parts:
        raise ValueError('tensor_kets needs at least one ket.')
    dims = tuple(d for part in parts for d in part.shape.dims)
    amplitudes = reduce(np.kron, (part.amplitudes for part in parts))
    normalized = all(part.normalized for part in parts)
    return Ket(HilbertShape(dims), amplitudes, normalized=normalized)


def tensor_ops(parts: Sequence[Operator]) -> Operator:
    """Kronecker product of operators; Hermitian when every part is."""
    if not parts:
        raise ValueError('tensor_ops needs at least one operator.')
    dims = tuple(d for part in parts for d in part.shape.dims)
    matrix = reduce(np.kron, (part.matrix for part in parts))
    return Operator(HilbertShape(dims), matrix, all(part.hermitian for part in parts))


def embed(obs: SiteObservable, shape: Union[HilbertShape, Sequence[int]]) -> Operator:
    """Identity on every factor except ``obs.site``, which carries ``obs.local``."""
    shape = _as_shape(shape)
    if obs.site >= shape.n_factors:
        raise SiteError(
            f'Site {obs.site} is out of range for {shape.n_factors} factors.')
    if shape.dims[obs.site] != obs.dimension:
        raise ShapeMismatchError(
            f'Observable of dimension {obs.dimension} cannot sit on factor {obs.site} '
            f'of dimension {shape.dims[obs.site]}.')
    parts = [
        obs.local if j == obs.site else Operator.identity((d,))
        for j, d in enumerate(shape.dims)
    ]
    return tensor_ops(parts)


def inner(bra: Ket, ket: Ket) -> complex:
    """<bra|ket>, conjugate-linear in the first argument."""
    bra.shape.check_same(ket.shape, 'bra and ket')
    return complex(np.vdot(bra.amplitudes, ket.amplitudes))


def apply(op: Operator, ket: Ket) -> Ket:
    op.shape.check_same(ket.shape, 'operator and ket')
    return Ket(ket.shape, op.matrix @ ket.amplitudes)


def matmul(left: Operator, right: Operator) -> Operator:
    left.shape.check_same(right.shape, 'operator product')
    return Operator(left.shape, left.matrix @ right.matrix)


def adjoint(op: Operator) -> Operator:
    return Operator(op.shape, op.matrix.conj().T, op.hermitian)


def scale(value: Union[Ket, Operator], factor: complex) -> Union[Ket, Operator]:
    """Multiply a ket or an operator by a scalar."""
    factor = complex(factor)
    if isinstance(value, Ket):
        return Ket(value.shape, value.amplitudes * factor)
    hermitian = value.hermitian and factor.imag == 0
    return Operator(value.shape, value.matrix * factor, hermitian)


def add(left: Union[Ket, Operator], right: Union[Ket, Operator]) -> Union[Ket, Operator]:
    """Sum of two kets or two operators on the same shape."""
    left.shape.check_same(right.shape, 'summands')
    if isinstance(left, Ket) and isinstance(right, Ket):
        return Ket(left.shape, left.amplitudes + right.amplitudes)
    if isinstance(left, Operator) and isinstance(right, Operator):
        return Operator(
            left.shape, left.matrix + right.matrix, left.hermitian and right.hermitian)
    raise TypeError('Cannot add a ket and an operator.')


def partial_inner(bra: Ket, ket: Ket) -> Ket:
    """Contract ``bra`` with the leading factors of ``ket``.

    Returns the unnormalized ket on the remaining trailing factors. This is the
    projection of a system factor onto a post-selected state.
    """
    lead = bra.shape.n_factors
    if ket.shape.dims[:lead] != bra.shape.dims or ket.shape.n_factors == lead:
        raise ShapeMismatchError(
            f'Cannot contract dims {bra.shape.dims} with the leading factors of '
            f'{ket.shape.dims}.')
    rest = HilbertShape(ket.shape.dims[lead:])
    block = ket.amplitudes.reshape(bra.shape.total_dim, rest.total_dim)
    return Ket(rest, bra.amplitudes.conj() @ block)


# named single-qubit operators
def pauli_x() -> Operator:
    return Operator((2,), np.array([[0, 1], [1, 0]]), hermitian=True)


def pauli_y() -> Operator:
    return Operator((2,), np.array([[0, -1j], [1j, 0]]), hermitian=True)


def pauli_z() -> Operator:
    return Operator((2,), np.array([[1, 0], [0, -1]]), hermitian=True)


def stokes() -> Operator:
    """Polarization Stokes operator |H><H| - |V><V| with H first in the basis."""
    return Operator((2,), np.diag([1, -1]), hermitian=True)


def projector(ket: Ket) -> Operator:
    """Rank-one projector onto the normalized direction of ``ket``."""
    direction = ket.normalize().amplitudes
    return Operator(ket.shape, np.outer(direction, direction.conj()), hermitian=True)
