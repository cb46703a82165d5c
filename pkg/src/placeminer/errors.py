"""Exception types shared across the package."""


class PlaceMinerError(Exception):
    """Base class for all errors raised by this package."""


class LogParseError(PlaceMinerError):
    """Malformed XES/CSV input; message carries position information."""


class IngestionError(PlaceMinerError):
    """Structurally valid input that violates log constraints (e.g. duplicate order keys)."""


class ConfigError(PlaceMinerError):
    """Invalid configuration value or missing required column/flag."""


class DomainError(PlaceMinerError):
    """Operation applied outside its domain (unknown activity, empty log, ...)."""


class BudgetError(PlaceMinerError):
    """A guard against work that would exceed an explicit budget tripped."""


class BoundedSearchError(PlaceMinerError):
    """State-space search hit its marking/token caps before reaching the goal."""


class NetClassError(PlaceMinerError):
    """A PNML net lies outside the supported class (duplicate labels, arc weights, ...)."""
