"""Numerical tolerances and command-line run configuration."""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .exceptions import ConfigError


@dataclass(frozen=True)
class Tolerances:
    """Numerical constants shared by all operations.

    Every operation that relies on one of these accepts the same name as a keyword
    argument which overrides the default for that call.

    Args:
        eps_overlap: Smallest accepted |<phi|psi>| for a pre/post-selected ensemble.
        eps_degen: Smallest accepted gap between two eigenvalues.
        eps_a: Smallest |a| for which a weak value is recovered from a modular value.
        hermitian_tol: Entrywise bound on |M - M^dagger| for a Hermitian operator.
        norm_tol: Bound on | ||psi|| - 1 | for a normalized ket.
        eigen_tol: Bound between declared and computed eigenvalues.
        product_rule_tol: Product-rule gap below which the premise of the
            product-to-sum implication is considered satisfied.
        max_total_dim: Largest total Hilbert space dimension for dense matrices.
    """
    eps_overlap: float = 1e-10
    eps_degen: float = 1e-8
    eps_a: float = 1e-10
    hermitian_tol: float = 1e-12
    norm_tol: float = 1e-12
    eigen_tol: float = 1e-10
    product_rule_tol: float = 1e-9
    max_total_dim: int = 4096


DEFAULT_TOLERANCES = Tolerances()


@dataclass
class RunConfig:
    """Parameters of a single command-line run.

    Either ``values`` (explicit couplings) or ``sweep`` (start, stop, count) is used
    by the sweep command; single-value commands read ``values[0]``.
    """
    values: List[float] = field(default_factory=lambda: [0.0])
    sweep: Optional[Tuple[float, float, int]] = None
    gamma_bar: float = 0.1
    shots: int = 1000000
    seed: int = 0
    output_format: str = 'json'
    output_path: Optional[str] = None

    def __post_init__(self):
        for value in self.values:
            if not math.isfinite(value):
                raise ConfigError(f'Coupling values must be finite. Got {value}.')
        if self.sweep is not None:
            start, stop, count = self.sweep
            if int(count) != count or count < 2:
                raise ConfigError(
                    f'A sweep range needs an integer count of at least 2. Got {count}.')
            if not (math.isfinite(start) and math.isfinite(stop)):
                raise ConfigError('Sweep bounds must be finite.')
            self.sweep = (float(start), float(stop), int(count))
        if not 0 < self.gamma_bar < 1:
            raise ConfigError(
                f'gamma-bar must lie in the open interval (0, 1). Got {self.gamma_bar}.')
        if self.shots < 1:
            raise ConfigError(f'shots must be at least 1. Got {self.shots}.')
        if self.seed < 0:
            raise ConfigError(f'seed must be non-negative. Got {self.seed}.')
        if self.output_format not in ('json', 'csv'):
            raise ConfigError(
                f'Output format must be json or csv. Got {self.output_format}.')

    @property
    def grid(self) -> List[float]:
        """Coupling grid: the sweep range when present, the explicit values otherwise."""
        if self.sweep is None:
            return list(self.values)
        start, stop, count = self.sweep
        step = (stop - start) / (count - 1)
        return [start + k * step for k in range(count - 1)] + [stop]
