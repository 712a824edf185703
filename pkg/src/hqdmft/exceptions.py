"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Operand shapes or qubit counts do not match."""


class DegeneracyError(ValueError):
    """A requested ground state or two-level target is not unique."""


class ConfigError(ValueError):
    """Invalid run configuration (unknown key or out-of-range value)."""
