"""Exception types shared across the package."""


class ContractViolation(Exception):
    """A caller broke a documented call contract (bad pairing, stale clock, ...)."""


class ConfigError(Exception):
    """Run-configuration contents are invalid or contain unknown keys."""


class GenerationError(Exception):
    """Scenario placement constraints could not be satisfied."""


class RecordFormatError(Exception):
    """A records file contains a malformed line."""
