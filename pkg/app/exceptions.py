"""
Exception hierarchy shared by services and the CLI.

Every error carries the process exit code the CLI reports for it.
"""


class AdelicError(Exception):
    """Base class for all library errors"""
    exit_code: int = 4


class ArgumentError(AdelicError, ValueError):
    """Invalid argument to an operation (zero element, non-prime, bad d, ...)"""
    exit_code = 4


class DescriptorError(AdelicError):
    """Problem descriptor could not be parsed or failed schema validation"""
    exit_code = 2

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class NumericalGuardError(AdelicError):
    """Clearance violation or root-location failure"""
    exit_code = 3


class InfeasibleInputError(AdelicError):
    """Input violates a structural requirement (singular lattice, indefinite Gram)"""
    exit_code = 4


class UnsupportedError(AdelicError):
    """Operation not supported for this combination of inputs"""
    exit_code = 4
