"""Exception types shared across the package."""


class HamcertError(Exception):
    """Base class for all package errors."""


class DimensionError(HamcertError, ValueError):
    """Operands act on different numbers of qubits or have bad shapes."""


class ResourceError(HamcertError):
    """A dense construction or enumeration exceeds its configured ceiling."""


class UnsupportedGroupError(HamcertError, ValueError):
    """The stabilizer group is not of product form."""


class NormalizationError(HamcertError, ValueError):
    """A state or distribution is not normalized within tolerance."""


class ConfigurationError(HamcertError, ValueError):
    """Parameters are outside the range an algorithm supports."""


class HamiltonianFormatError(HamcertError, ValueError):
    """A Hamiltonian file is malformed."""
