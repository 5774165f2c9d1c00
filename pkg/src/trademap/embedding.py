"""Spectral embedding: countries to plane coordinates.

Selects the eigenvectors of the smallest nontrivial eigenvalues of the
normalized Laplacian and reads each country's coordinates straight off the
eigenvector entries.  The zero-eigenvalue eigenvector (proportional to the
square roots of the degrees) carries no cluster information and is always
excluded.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, TextIO

import numpy as np

from .errors import (
    DisconnectedGraphError,
    InsufficientSpectrumError,
    ParseError,
    SchemaError,
)
from .graph import LaplacianMatrix, affinity, laplacian_components, normalized_laplacian
from .ingest import CountryRoster, FlowMatrix
from .spectral import Spectrum, symmetric_eigen

logger = logging.getLogger(__name__)

#: Eigenvalues at or below this count as the trivial (zero) eigenspace.
DEFAULT_TRIVIAL_TOL = 1e-9

#: Gap below which the last used and first unused eigenvalues count as
#: degenerate, making the embedding non-unique up to rotation.
DEGENERACY_GAP = 1e-6


@dataclass(frozen=True)
class Embedding:
    """Per-country coordinates from nontrivial Laplacian eigenvectors.

    ``coordinates`` has one row per country in canonical roster order and
    one column per selected eigenvector, each column being exactly the
    sign-fixed unit eigenvector.  ``eigenvalues_used`` is ``None`` only for
    embeddings re-loaded from a coordinates file, where the spectrum is no
    longer available.  ``spectral_gap`` is the distance from the last used
    eigenvalue to the next unused one (NaN when there is none) and
    ``degeneracy_flag`` marks a gap small enough that the returned
    coordinates are one of a family of equally valid rotations.
    """

    roster: CountryRoster
    coordinates: np.ndarray
    eigenvalues_used: Optional[np.ndarray]
    spectral_gap: float = math.nan
    degeneracy_flag: bool = False

    def __post_init__(self):
        object.__setattr__(
            self, "coordinates", np.asarray(self.coordinates, dtype=float)
        )
        n = len(self.roster)
        if self.coordinates.ndim != 2 or self.coordinates.shape[0] != n:
            raise ValueError(
                f"coordinates shape {self.coordinates.shape} does not match "
                f"roster size {n}"
            )

    @property
    def k(self) -> int:
        return self.coordinates.shape[1]

    @property
    def n(self) -> int:
        return len(self.roster)


class NontrivialSelection(NamedTuple):
    indices: tuple[int, ...]
    trivial_count: int


def nontrivial_indices(
    spectrum: Spectrum,
    trivial_tol: float = DEFAULT_TRIVIAL_TOL,
    k: Optional[int] = None,
) -> NontrivialSelection:
    """Indices of eigenvalues above the trivial tolerance, ascending.

    The count of eigenvalues at or below the tolerance is returned
    alongside; for a valid normalized Laplacian it equals the number of
    connected components.  When ``k`` is given and fewer than ``k``
    nontrivial eigenvalues remain, raises
    :class:`InsufficientSpectrumError`.
    """
    eigenvalues = spectrum.eigenvalues
    if np.any(np.diff(eigenvalues) < 0):
        raise ValueError("spectrum eigenvalues must be sorted ascending")
    above = np.flatnonzero(eigenvalues > trivial_tol)
    trivial_count = eigenvalues.size - above.size
    if k is not None and above.size < k:
        raise InsufficientSpectrumError(
            f"requested {k} nontrivial eigenvalues but only {above.size} exceed "
            f"the trivial tolerance {trivial_tol:g} "
            f"({trivial_count} trivial eigenvalues found)"
        )
    return NontrivialSelection(tuple(int(i) for i in above), trivial_count)


def embed(
    lap: LaplacianMatrix,
    k: int = 2,
    require_connected: bool = True,
    trivial_tol: float = DEFAULT_TRIVIAL_TOL,
) -> Embedding:
    """Embed the countries of a normalized Laplacian into ``k`` dimensions.

    Coordinates are the eigenvectors of the ``k`` smallest nontrivial
    eigenvalues, in ascending eigenvalue order.  Connectivity is checked
    combinatorially on the Laplacian's sparsity pattern rather than
    inferred from the spectrum; a disconnected graph is rejected when
    ``require_connected`` is set because "nontrivial" is ambiguous across
    components.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    components = laplacian_components(lap)
    if require_connected and len(components) > 1:
        codes = lap.roster.codes
        raise DisconnectedGraphError(
            [[codes[i] for i in group] for group in components]
        )
    spectrum = symmetric_eigen(lap.values)
    selection = nontrivial_indices(spectrum, trivial_tol, k=k)
    if selection.trivial_count != len(components):
        logger.warning(
            "trivial eigenvalue count %d disagrees with %d graph components; "
            "spectrum is near-degenerate at the trivial tolerance",
            selection.trivial_count,
            len(components),
        )
    used = list(selection.indices[:k])
    coordinates = spectrum.eigenvectors[:, used]
    eigenvalues_used = spectrum.eigenvalues[used]
    next_index = used[-1] + 1
    if next_index < spectrum.n:
        gap = float(spectrum.eigenvalues[next_index] - spectrum.eigenvalues[used[-1]])
        degenerate = gap < DEGENERACY_GAP
    else:
        gap = math.nan
        degenerate = False
    if degenerate:
        logger.warning(
            "spectral gap %.3g below %.1g: embedding is non-unique up to "
            "rotation within the trailing eigenspace",
            gap,
            DEGENERACY_GAP,
        )
    return Embedding(lap.roster, coordinates, eigenvalues_used, gap, degenerate)


def compose_map(
    flow: FlowMatrix,
    k: int = 2,
    require_connected: bool = True,
    trivial_tol: float = DEFAULT_TRIVIAL_TOL,
) -> Embedding:
    """Full pipeline from flows to coordinates.

    Exactly the composition of :func:`trademap.graph.affinity`,
    :func:`trademap.graph.normalized_laplacian` and :func:`embed`; provided
    so callers cannot accidentally skip or reorder a stage.
    """
    lap = normalized_laplacian(affinity(flow))
    return embed(lap, k=k, require_connected=require_connected, trivial_tol=trivial_tol)


def _coordinate_columns(k: int) -> list[str]:
    names = ["x", "y"][:k]
    names += [f"dim{d}" for d in range(3, k + 1)]
    return names


def write_coordinates(emb: Embedding, sink: TextIO) -> None:
    """Write coordinates as CSV: ``code,label,x,y[,dim3...]``.

    One row per country in canonical roster order; floats are written with
    ``repr`` so the grid round-trips exactly.
    """
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["code", "label"] + _coordinate_columns(emb.k))
    for i, code in enumerate(emb.roster.codes):
        row = [code, emb.roster.label_for(code)]
        row += [repr(float(v)) for v in emb.coordinates[i]]
        writer.writerow(row)


def read_coordinates(source: TextIO | Iterable[str]) -> Embedding:
    """Read an embedding back from its CSV form.

    The spectrum is not stored in the file, so ``eigenvalues_used`` and the
    gap diagnostics are absent on the result; analysis queries only need
    the coordinates.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("coordinates file is empty") from None
    if len(header) < 3 or header[0] != "code" or header[1] != "label":
        raise SchemaError(
            f"unexpected coordinates header {header}; "
            "expected code,label,x[,y,...]"
        )
    k = len(header) - 2
    codes: list[str] = []
    labels: list[str] = []
    rows: list[list[float]] = []
    for row_number, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(row_number, f"expected {len(header)} fields")
        codes.append(row[0])
        labels.append(row[1])
        try:
            rows.append([float(v) for v in row[2:]])
        except ValueError:
            raise ParseError(row_number, "non-numeric coordinate") from None
    label_map = dict(zip(codes, labels))
    roster = CountryRoster.canonical(codes, label_map)
    if len(roster) != len(codes):
        raise ParseError(2, "duplicate country codes in coordinates file")
    coordinates = np.zeros((len(codes), k))
    for code, values in zip(codes, rows):
        coordinates[roster.index(code)] = values
    return Embedding(roster, coordinates, None)
