"""Exception hierarchy. Each category maps to a distinct CLI exit code."""


class GhzError(Exception):
    exit_code = 1


class ContractError(GhzError, ValueError):
    """A precondition of an operation was violated."""

    exit_code = 2


class DomainError(ContractError):
    """Parameters outside the domain where a construction is defined."""


class ResourceError(GhzError, RuntimeError):
    """A configured budget (memory, enumeration, sweep) would be exceeded."""

    exit_code = 3


class ParseError(GhzError, ValueError):
    exit_code = 4


class ConsistencyError(GhzError, AssertionError):
    """An internal cross-check failed. Always indicates a bug."""

    exit_code = 5
