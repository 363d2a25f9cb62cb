"""Exception types shared across the package."""


class DataIntegrityError(Exception):
    """A raw data file parsed but does not match its expected shape or counts."""


class DivergenceError(RuntimeError):
    """Training produced non-finite or runaway parameters."""
