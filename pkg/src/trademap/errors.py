"""Exception hierarchy shared across the package.

Every error raised on purpose derives from :class:`TradeMapError` so callers
(and the command-line layer) can distinguish expected data problems from
genuine bugs.
"""

from __future__ import annotations


class TradeMapError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(TradeMapError):
    """A required column is missing from the input header."""


class ParseError(TradeMapError):
    """A data row could not be interpreted; carries the 1-based row number."""

    def __init__(self, row_number: int, message: str):
        super().__init__(f"row {row_number}: {message}")
        self.row_number = row_number


class NoDataError(TradeMapError):
    """No usable records remain after filtering (e.g. an empty year slice)."""


class DuplicateDyadError(TradeMapError):
    """The same (reporter, partner, year) dyad appears more than once."""

    def __init__(self, reporter: str, partner: str, year: int):
        super().__init__(
            f"duplicate dyad ({reporter} -> {partner}, year {year}); "
            "refusing to aggregate silently"
        )
        self.dyad = (reporter, partner, year)


class DegenerateRosterError(TradeMapError):
    """The missing-data policy eliminated the roster down to nothing usable."""


class UnknownCountryError(TradeMapError):
    """A requested country code is not present in the roster."""

    def __init__(self, code: str):
        super().__init__(f"unknown country code {code!r}")
        self.code = code


class SubsetTooSmallError(TradeMapError):
    """A requested restriction has fewer than three countries."""


class NegativeFlowError(TradeMapError):
    """A trade value is negative where only nonnegative volumes are allowed."""


class IsolatedVertexError(TradeMapError):
    """A country has zero total trade, so degree normalization is undefined."""

    def __init__(self, code: str):
        super().__init__(
            f"country {code!r} has zero total trade (isolated vertex); "
            "drop it before building the normalized Laplacian"
        )
        self.code = code


class AsymmetricMatrixError(TradeMapError):
    """A matrix that must be symmetric is not, beyond tolerance."""

    def __init__(self, i: int, j: int, difference: float):
        super().__init__(
            f"matrix is not symmetric at ({i}, {j}): |a_ij - a_ji| = {difference:g}"
        )
        self.indices = (i, j)


class ConvergenceError(TradeMapError):
    """The eigenvalue iteration failed to converge within the sweep cap."""

    def __init__(self, index: int, sweeps: int):
        super().__init__(
            f"eigenvalue {index} did not converge within {sweeps} sweeps"
        )
        self.index = index


class DisconnectedGraphError(TradeMapError):
    """The trade graph splits into several components; embedding is ambiguous."""

    def __init__(self, components: list[list[str]]):
        parts = "; ".join(",".join(group) for group in components)
        super().__init__(
            f"trade graph is disconnected into {len(components)} components: {parts}"
        )
        self.components = components


class InsufficientSpectrumError(TradeMapError):
    """Fewer nontrivial eigenvalues are available than coordinates requested."""


class RosterMismatchError(TradeMapError):
    """Two objects that must share a roster do not."""


class DegenerateGeometryError(TradeMapError):
    """Two planted points coincide, so their gravity flow is undefined."""

    def __init__(self, i: int, j: int):
        super().__init__(f"planted points {i} and {j} coincide (zero distance)")
        self.pair = (i, j)
