from enum import Enum


class KnodelError(Exception):
    """Base class for every error raised by kgdom."""


class NumberTheoryError(KnodelError, ValueError):
    """Invalid input to a number-theoretic function."""


class GraphError(KnodelError, ValueError):
    """Invalid graph parameters or vertex indices."""


class VerificationError(KnodelError, ValueError):
    """A certificate check was asked for outside its preconditions."""


class PreconditionFailure(Enum):
    NOT_EVEN = "n_not_even"
    TOO_SMALL = "n_too_small"
    NOT_ODD_PRIME = "p_not_odd_prime"
    EXPONENT_TOO_SMALL = "exponent_too_small"
    NOT_DIVISOR = "p_does_not_divide_n"
    PRIME_TOO_LARGE = "p_exceeds_ceil_log_n"
    TOTIENT_TOO_LARGE = "totient_not_below_ceil_log_n"
    NOT_PRIMITIVE = "two_not_primitive_root"
    WITNESS_MISMATCH = "witness_mismatch"


class PreconditionError(KnodelError, ValueError):
    """A theorem hypothesis failed; `code` names the failed clause."""

    def __init__(self, code: PreconditionFailure, message: str):
        super().__init__(f"[{code.value}] {message}")
        self.code = code
