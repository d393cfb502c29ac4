"""Exception hierarchy shared across the harness.

Each top-level branch maps onto one CLI exit code so scripted callers can
distinguish configuration mistakes from provider trouble and from
unparseable model output.
"""

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PROVIDER = 3
EXIT_PARSE = 4


class HarnessError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class ConfigError(HarnessError):
    """Invalid configuration, corpus file, split file, or template set."""

    exit_code = EXIT_CONFIG


class CorpusFormatError(ConfigError):
    """A corpus or embedding file does not match the expected record schema."""


class ProviderError(HarnessError):
    """Model endpoint failure, replay miss, or exhausted scripted fixture."""

    exit_code = EXIT_PROVIDER


class ReplayMissError(ProviderError):
    """Replay store holds no exchange for the requested prompt hash."""


class FixtureExhaustedError(ProviderError):
    """Scripted fixture has no response left for the requested prompt."""


class UnparseableResponseError(HarnessError):
    """Model response contains no recognizable structure at all."""

    exit_code = EXIT_PARSE
