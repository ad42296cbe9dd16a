"""Semantic exception hierarchy shared by all screenlab modules."""


class ScreenlabError(Exception):
    """Base class for all screenlab errors."""


class NegativeDensity(ScreenlabError):
    """A density is negative somewhere on its support."""


class MassMismatch(ScreenlabError):
    """Total probability mass differs from 1 beyond tolerance."""


class OverlappingPieces(ScreenlabError):
    """Density pieces overlap or are out of order."""


class EmptyTruncation(ScreenlabError):
    """Truncation window carries no probability mass."""


class BadParams(ScreenlabError):
    """Parameters outside the valid range for a family or kernel."""


class InfiniteMean(ScreenlabError):
    """First moment does not exist (e.g. Pareto tail with shape <= 1)."""


class NotACdf(ScreenlabError):
    """One minus the signal density is not a valid conditional cdf."""


class ZeroEvidence(ScreenlabError):
    """Conditioning event has zero marginal probability/density."""


class ZeroDensity(ScreenlabError):
    """Density vanishes where a log-derivative is requested."""


class NoThreshold(ScreenlabError):
    """Noise log-density slope is not eventually nondecreasing."""


class NotAnInterval(ScreenlabError):
    """Prior support has interior gaps where an interval is required."""


class BadCutoffs(ScreenlabError):
    """Signal cutoffs are not strictly ordered."""


class AcceptanceStarved(ScreenlabError):
    """Monte Carlo acceptance rate fell below the feasibility floor."""


class ConfigError(ScreenlabError):
    """Scenario configuration is missing, malformed, or inconsistent."""
