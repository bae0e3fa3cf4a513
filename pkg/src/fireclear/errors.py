"""Exception and warning types shared across the library."""


class FireclearError(Exception):
    """Base class for all library-specific failures."""


class ValidationFailure(FireclearError):
    """A financial system violated one or more structural invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(f"{v.code}: {v.message}" for v in self.violations)
        super().__init__(f"invalid financial system: {lines}")


class InvalidDistribution(FireclearError):
    """Malformed distribution spec for random network generation."""


class PaymentOutOfLattice(FireclearError):
    """A payment vector left the box [0, pbar]."""


class PriceNegative(FireclearError):
    """A price vector with negative entries was supplied."""


class NegativeLiquidation(FireclearError):
    """An inverse demand function received negative liquidations."""


class StateOutOfLattice(FireclearError):
    """A clearing state left the solution lattice."""


class EnumerationCapExceeded(FireclearError):
    """Too many candidate market-maker configurations to enumerate."""


class EnumerationUnsupported(FireclearError):
    """Enumeration only applies to inverse demand families that depend on
    liquidity through the market-maker set."""


class NoJumpFound(FireclearError):
    """The market-maker set is constant across the bracketing interval."""


class MalformedCsv(FireclearError):
    """A balance-sheet CSV file could not be parsed."""


class InconsistentTotalsWarning(UserWarning):
    """Aggregate interbank assets and liabilities disagree beyond tolerance."""
