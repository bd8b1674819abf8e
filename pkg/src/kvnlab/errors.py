"""Exception hierarchy shared by the symbolic and numeric layers."""


class KvnError(Exception):
    """Base class for all errors raised by kvnlab."""


class ConfigurationError(KvnError):
    """Objects built over incompatible registries, models or rule tables."""


class VerificationError(KvnError):
    """An identity that must hold exactly left a nonzero residual."""

    def __init__(self, identity: str, residual: object):
        self.identity = identity
        self.residual = residual
        super().__init__(f"{identity}: residual {residual}")


class UnsupportedInputError(KvnError):
    """Input outside the class an algorithm is defined on."""


class UnsupportedHamiltonianError(UnsupportedInputError):
    """No characteristic integrator is available for this Hamiltonian."""


class ResolutionError(KvnError):
    """A Gaussian width is too small for the grid spacing."""


class DomainError(KvnError):
    """A point or trajectory leaves the phase-space grid."""


class ParseError(KvnError):
    """Syntax or validation error in an expression, with 1-based location."""

    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")
