"""Dyadic trade-table ingestion.

Parses delimiter-separated bilateral trade records, resolves a country
roster for one year, and assembles the directed flow matrix under an
explicit missing-data policy.  Country codes are opaque tokens; the roster
order is always lexicographic by code, so every derived matrix is
independent of input row order.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, TextIO

import numpy as np

from .errors import (
    DegenerateRosterError,
    DuplicateDyadError,
    NegativeFlowError,
    NoDataError,
    ParseError,
    SchemaError,
    SubsetTooSmallError,
    UnknownCountryError,
)

logger = logging.getLogger(__name__)

#: Missing-value sentinel used by the Correlates of War dyadic trade files.
COW_MISSING_SENTINEL = -9.0

POLICY_DROP_INCOMPLETE = "drop-incomplete"
POLICY_ZERO_FILL = "zero-fill"
POLICIES = (POLICY_DROP_INCOMPLETE, POLICY_ZERO_FILL)


@dataclass(frozen=True)
class DyadSchema:
    """Maps record fields to column names in the source table."""

    reporter: str = "reporter"
    partner: str = "partner"
    year: str = "year"
    export_value: str = "export_value"

    def required_columns(self) -> tuple[str, str, str, str]:
        return (self.reporter, self.partner, self.year, self.export_value)


#: Schema used by the COW "National Trade" dyadic files.
COW_SCHEMA = DyadSchema(
    reporter="ccode1", partner="ccode2", year="year", export_value="flow1"
)


@dataclass(frozen=True)
class DyadRecord:
    """One directed trade observation: reporter exported ``export_value`` to partner.

    ``export_value`` is ``None`` when the source marked the dyad as missing.
    """

    reporter: str
    partner: str
    year: int
    export_value: Optional[float]


@dataclass(frozen=True)
class CountryRoster:
    """Ordered set of country codes, optionally with display labels.

    Codes are unique and sorted lexicographically; this canonical order is
    what fixes the row/column layout of every matrix derived from the
    roster.
    """

    codes: tuple[str, ...]
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if len(set(self.codes)) != len(self.codes):
            raise ValueError("roster codes must be unique")
        if list(self.codes) != sorted(self.codes):
            raise ValueError("roster codes must be in canonical (sorted) order")
        if self.labels is not None and len(self.labels) != len(self.codes):
            raise ValueError("labels must align with codes")

    @classmethod
    def canonical(
        cls, codes: Iterable[str], label_map: Optional[dict[str, str]] = None
    ) -> "CountryRoster":
        """Build a roster from arbitrary codes, sorting and deduplicating."""
        ordered = tuple(sorted(set(codes)))
        labels = None
        if label_map is not None:
            labels = tuple(label_map.get(code, code) for code in ordered)
        return cls(ordered, labels)

    def __len__(self) -> int:
        return len(self.codes)

    def __contains__(self, code: str) -> bool:
        return code in self._index

    @property
    def _index(self) -> dict[str, int]:
        # Cached lazily on the instance; cheap to rebuild and keeps the
        # dataclass hashable-by-identity semantics simple.
        cache = getattr(self, "_index_cache", None)
        if cache is None:
            cache = {code: i for i, code in enumerate(self.codes)}
            object.__setattr__(self, "_index_cache", cache)
        return cache

    def index(self, code: str) -> int:
        try:
            return self._index[code]
        except KeyError:
            raise UnknownCountryError(code) from None

    def label_for(self, code: str) -> str:
        if self.labels is None:
            return code
        return self.labels[self.index(code)]

    def relabeled(self, label_map: dict[str, str]) -> "CountryRoster":
        """Attach display labels from a code -> label mapping."""
        labels = tuple(label_map.get(code, code) for code in self.codes)
        return CountryRoster(self.codes, labels)


@dataclass(frozen=True)
class FlowMatrix:
    """Directed export matrix over a roster.

    ``values[i, j]`` is the export from country ``i`` to country ``j``;
    ``missing_mask[i, j]`` is True where the source had no usable value
    (those entries hold 0 under the zero-fill policy).  The diagonal is
    identically zero.
    """

    roster: CountryRoster
    values: np.ndarray
    missing_mask: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        n = len(self.roster)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if self.missing_mask is None:
            object.__setattr__(self, "missing_mask", np.zeros((n, n), dtype=bool))
        else:
            object.__setattr__(
                self, "missing_mask", np.asarray(self.missing_mask, dtype=bool)
            )
        if values.shape != (n, n):
            raise ValueError(
                f"values shape {values.shape} does not match roster size {n}"
            )
        if self.missing_mask.shape != (n, n):
            raise ValueError("missing_mask shape does not match roster size")
        if np.any(np.diagonal(values) != 0.0):
            raise ValueError("flow matrix diagonal must be identically zero")
        if np.any(values < 0.0):
            i, j = np.argwhere(values < 0.0)[0]
            raise NegativeFlowError(
                f"negative flow {values[i, j]!r} for dyad "
                f"{self.roster.codes[i]} -> {self.roster.codes[j]}"
            )

    @property
    def n(self) -> int:
        return len(self.roster)


def parse_dyadic_csv(
    source: TextIO | Iterable[str],
    schema: DyadSchema = DyadSchema(),
    missing_sentinel: float = COW_MISSING_SENTINEL,
    delimiter: str = ",",
) -> list[DyadRecord]:
    """Parse a dyadic trade table into records.

    Parameters
    ----------
    source : text stream or iterable of lines
        Delimiter-separated text with a header row.
    schema : DyadSchema
        Column names for the reporter, partner, year and export-value fields.
    missing_sentinel : float
        Export values equal to this sentinel become missing (``None``).
    delimiter : str
        Field separator, default comma.

    Self-dyads (reporter equals partner) are dropped with a logged count.
    Malformed rows raise :class:`ParseError` carrying the row number.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source, delimiter=delimiter)
    try:
        header = next(reader)
    except StopIteration:
        return []
    header = [name.strip() for name in header]
    positions = {}
    for column in schema.required_columns():
        if column not in header:
            raise SchemaError(
                f"required column {column!r} not found in header {header}"
            )
        positions[column] = header.index(column)

    records: list[DyadRecord] = []
    self_dyads = 0
    for row_number, row in enumerate(reader, start=2):
        if not row or all(cell.strip() == "" for cell in row):
            continue
        if len(row) < len(header):
            raise ParseError(
                row_number, f"expected {len(header)} fields, found {len(row)}"
            )
        reporter = row[positions[schema.reporter]].strip()
        partner = row[positions[schema.partner]].strip()
        year_text = row[positions[schema.year]].strip()
        value_text = row[positions[schema.export_value]].strip()
        if not reporter or not partner:
            raise ParseError(row_number, "empty country code")
        try:
            year = int(year_text)
        except ValueError:
            raise ParseError(
                row_number, f"year {year_text!r} is not an integer"
            ) from None
        try:
            value = float(value_text)
        except ValueError:
            raise ParseError(
                row_number, f"export value {value_text!r} is not numeric"
            ) from None
        if value == missing_sentinel:
            export_value: Optional[float] = None
        elif value < 0.0:
            raise ParseError(
                row_number,
                f"negative export value {value!r} (sentinel is {missing_sentinel!r})",
            )
        else:
            export_value = value
        if reporter == partner:
            self_dyads += 1
            continue
        records.append(DyadRecord(reporter, partner, year, export_value))
    if self_dyads:
        logger.warning("dropped %d self-dyad rows", self_dyads)
    return records


def _missing_counts(missing: np.ndarray, alive: np.ndarray) -> np.ndarray:
    """Per-country count of missing dyads, both directions, among live rows."""
    sub = missing[np.ix_(alive, alive)]
    return sub.sum(axis=0) + sub.sum(axis=1)


def build_flow_matrix(
    records: list[DyadRecord],
    year: int,
    policy: str = POLICY_DROP_INCOMPLETE,
) -> FlowMatrix:
    """Assemble the flow matrix for one year under a missing-data policy.

    The roster is every country appearing as reporter or partner in that
    year.  A dyad is missing when no record covers it or the record's value
    is absent.  Under ``drop-incomplete`` the country incident to the most
    missing dyads is removed (ties broken by canonical roster order) and the
    check repeats until no missing dyads remain; under ``zero-fill`` missing
    dyads become 0 and are flagged in ``missing_mask``.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")
    slice_records = [r for r in records if r.year == year]
    if not slice_records:
        raise NoDataError(f"no records for year {year}")

    codes: set[str] = set()
    for record in slice_records:
        if record.reporter == record.partner:
            raise ValueError(
                f"self-dyad {record.reporter!r} must be dropped at parse time"
            )
        codes.add(record.reporter)
        codes.add(record.partner)
    roster = CountryRoster.canonical(codes)
    n = len(roster)

    values = np.zeros((n, n))
    seen = np.zeros((n, n), dtype=bool)  # any record for the dyad
    usable = np.zeros((n, n), dtype=bool)  # record carrying an actual value
    for record in slice_records:
        i = roster.index(record.reporter)
        j = roster.index(record.partner)
        if seen[i, j]:
            raise DuplicateDyadError(record.reporter, record.partner, year)
        seen[i, j] = True
        if record.export_value is not None:
            usable[i, j] = True
            values[i, j] = record.export_value

    missing = ~usable
    np.fill_diagonal(missing, False)

    if policy == POLICY_ZERO_FILL:
        return FlowMatrix(roster, values, missing)

    # drop-incomplete: greedily remove the worst offender until clean.
    alive = np.ones(n, dtype=bool)
    dropped: list[str] = []
    while True:
        counts = _missing_counts(missing, alive)
        if counts.sum() == 0:
            break
        worst = int(np.argmax(counts))  # ties resolve to the lowest live index
        victim = int(np.flatnonzero(alive)[worst])
        alive[victim] = False
        dropped.append(roster.codes[victim])
        if alive.sum() == 0:
            raise DegenerateRosterError(
                "drop-incomplete removed every country; "
                f"dropped order: {', '.join(dropped)}"
            )
    if alive.sum() < 2:
        raise DegenerateRosterError(
            "drop-incomplete left fewer than two countries; "
            f"dropped order: {', '.join(dropped)}"
        )
    if dropped:
        logger.info(
            "drop-incomplete removed %d countries: %s",
            len(dropped),
            ", ".join(dropped),
        )
    kept = np.flatnonzero(alive)
    sub_roster = CountryRoster(
        tuple(roster.codes[i] for i in kept),
        None if roster.labels is None else tuple(roster.labels[i] for i in kept),
    )
    sub_values = values[np.ix_(kept, kept)]
    return FlowMatrix(sub_roster, sub_values, np.zeros_like(sub_values, dtype=bool))


def select_subgraph(flow: FlowMatrix, subset: Iterable[str]) -> FlowMatrix:
    """Restrict a flow matrix to a subset of countries.

    The restriction happens on the raw flows, before any normalization, so
    the embedded map of the subset depends on trade within the subset alone.
    """
    requested = list(subset)
    for code in requested:
        if code not in flow.roster:
            raise UnknownCountryError(code)
    unique = sorted(set(requested))
    if len(unique) < 3:
        raise SubsetTooSmallError(
            f"subset has {len(unique)} countries; at least 3 are required"
        )
    idx = np.array([flow.roster.index(code) for code in unique])
    roster = CountryRoster(
        tuple(unique),
        None
        if flow.roster.labels is None
        else tuple(flow.roster.label_for(code) for code in unique),
    )
    return FlowMatrix(
        roster,
        flow.values[np.ix_(idx, idx)],
        flow.missing_mask[np.ix_(idx, idx)],
    )


def write_dyadic_csv(
    flow: FlowMatrix,
    sink: TextIO,
    year: int = 0,
    schema: DyadSchema = DyadSchema(),
    missing_sentinel: float = COW_MISSING_SENTINEL,
    delimiter: str = ",",
) -> None:
    """Write a flow matrix back out as a dyadic table.

    Masked dyads are written as the missing sentinel, so parsing the output
    with the same schema and rebuilding under zero-fill reproduces the value
    grid and mask exactly.
    """
    writer = csv.writer(sink, delimiter=delimiter, lineterminator="\n")
    writer.writerow(schema.required_columns())
    codes = flow.roster.codes
    for i, reporter in enumerate(codes):
        for j, partner in enumerate(codes):
            if i == j:
                continue
            if flow.missing_mask[i, j]:
                value = missing_sentinel
            else:
                value = flow.values[i, j]
            writer.writerow([reporter, partner, year, repr(float(value))])


def load_labels(source: TextIO | Iterable[str], delimiter: str = ",") -> dict[str, str]:
    """Read a two-column ``code,label`` side file into a mapping."""
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source, delimiter=delimiter)
    labels: dict[str, str] = {}
    for row_number, row in enumerate(reader, start=1):
        if not row or all(cell.strip() == "" for cell in row):
            continue
        if len(row) < 2:
            raise ParseError(row_number, "label file rows need code and label")
        labels[row[0].strip()] = row[1].strip()
    return labels
