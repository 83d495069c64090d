"""Exceptions raised by modular-value computations."""


class ModularValueError(ValueError):
    """Base class for every domain error in this package."""


class ShapeMismatchError(ModularValueError):
    """Two objects live on Hilbert spaces with different factor dimensions."""


class DimensionLimitError(ModularValueError):
    """The total Hilbert space dimension exceeds the dense-matrix cap."""


class NotHermitianError(ModularValueError):
    """An operator flagged or required to be Hermitian is not."""


class DegenerateSpectrumError(ModularValueError):
    """Two eigenvalues are closer than the degeneracy tolerance."""


class OrthogonalPostSelectionError(ModularValueError):
    """The pre- and post-selected states are (numerically) orthogonal."""


class ConversionUndefinedError(ModularValueError):
    """Weak value cannot be recovered because the coefficient a vanishes."""


class SiteError(ModularValueError):
    """A site index is out of range or two observables share a site."""


class BasisError(ModularValueError):
    """Unknown measurement basis or missing tomography record."""


class ConfigError(ModularValueError):
    """Invalid run configuration."""
