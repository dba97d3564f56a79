"""Exception types shared across the toolkit."""


class FormatError(ValueError):
    """Malformed or inconsistent input data (edge lists, profiles, weight files)."""


class ConfigError(ValueError):
    """Parameter combination that cannot produce a meaningful run."""


class UsageError(ValueError):
    """API misuse, e.g. committing the same node twice."""
