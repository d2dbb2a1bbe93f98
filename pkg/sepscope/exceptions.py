class SepscopeError(ValueError):
    """Base class for every error raised by sepscope."""


class InvalidStateError(SepscopeError):
    """A density matrix, Pauli tensor or state file violates one of its invariants."""


class RangeError(SepscopeError):
    """A numeric argument (eps, alpha, n-max, a start count) is outside its allowed range."""


class CapacityError(SepscopeError):
    """The requested number of qubits is over a dense-memory limit."""


class DomainError(SepscopeError):
    """A formula or construction is used outside the qubit counts it is defined for."""


class NotACertificateError(SepscopeError):
    """A decomposition has negative weights, so it does not certify separability."""


class FrameError(SepscopeError):
    """Tetrahedron vertices do not form a regular tetrahedral frame."""
