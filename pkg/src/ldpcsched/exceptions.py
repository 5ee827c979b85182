"""Exception hierarchy shared by every module of the package."""


class LdpcError(Exception):
    """Base class for all errors raised by ldpcsched."""


class ConfigError(LdpcError, ValueError):
    """A parameter or configuration value is out of its valid range."""


class InvalidSpecError(ConfigError):
    """Code parameters violate the regular-code consistency rules."""


class DimensionError(LdpcError, ValueError):
    """An input vector does not have the length the graph requires."""


class ConstructionError(LdpcError, RuntimeError):
    """Random code construction gave up after its retry budget."""


class RankError(LdpcError, ValueError):
    """The parity-check matrix is rank deficient, so the systematic encoder
    cannot produce ``k`` information positions."""

    def __init__(self, rank, m, n):
        self.rank = rank
        self.m = m
        self.n = n
        super().__init__(
            f"parity-check matrix has rank {rank} < m={m}; "
            f"effective dimension is {n - rank}"
        )


class AlistParseError(LdpcError, ValueError):
    """Malformed ALIST text. ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
