"""Queries over embeddings: distances, neighbors, sign splits, alignment.

These operate purely on finished embeddings.  Distances are Euclidean over
whatever dimensions were embedded; the bipartition reads the sign of the
first coordinate, which splits the trade graph at its bottleneck.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedding import Embedding
from .errors import RosterMismatchError, UnknownCountryError
from .ingest import CountryRoster


@dataclass(frozen=True)
class DistanceReport:
    """Symmetric Euclidean distance matrix over embedding coordinates."""

    roster: CountryRoster
    distances: np.ndarray


@dataclass(frozen=True)
class Bipartition:
    """Two-sided split by the sign of the first embedding coordinate.

    ``positive`` and ``negative`` are disjoint and together cover the
    roster.  Countries whose first coordinate fell inside the zero band
    were assigned to the nearer side and are additionally listed in
    ``boundary``.
    """

    positive: tuple[str, ...]
    negative: tuple[str, ...]
    boundary: tuple[str, ...]
    boundary_tolerance: float


def pairwise_distances(emb: Embedding) -> DistanceReport:
    """Euclidean distances between all country pairs in embedding space."""
    diff = emb.coordinates[:, None, :] - emb.coordinates[None, :, :]
    distances = np.sqrt(np.sum(diff * diff, axis=2))
    np.fill_diagonal(distances, 0.0)
    return DistanceReport(emb.roster, distances)


def nearest_neighbors(
    emb: Embedding, code: str, m: int
) -> list[tuple[str, float]]:
    """The ``m`` countries closest to ``code``, ascending by distance.

    Ties resolve by canonical roster order.  ``m`` must be smaller than the
    roster size (the country itself never appears in its own ranking).
    """
    if code not in emb.roster:
        raise UnknownCountryError(code)
    n = emb.n
    if not 1 <= m < n:
        raise ValueError(f"m must be in [1, {n - 1}], got {m}")
    row = emb.roster.index(code)
    diff = emb.coordinates - emb.coordinates[row]
    dist = np.sqrt(np.sum(diff * diff, axis=1))
    order = np.argsort(dist, kind="stable")  # stable: ties by roster order
    ranked = [int(i) for i in order if i != row][:m]
    return [(emb.roster.codes[i], float(dist[i])) for i in ranked]


def bipartition(emb: Embedding, zero_band: float = 0.0) -> Bipartition:
    """Split the roster by the sign of the first embedding coordinate.

    Coordinates strictly above ``zero_band`` go to the positive side,
    strictly below ``-zero_band`` to the negative side.  Entries inside the
    band are assigned to the nearer side (nonnegative values to the
    positive side) and flagged as boundary cases.
    """
    if zero_band < 0.0:
        raise ValueError("zero_band must be nonnegative")
    first = emb.coordinates[:, 0]
    positive: list[str] = []
    negative: list[str] = []
    boundary: list[str] = []
    for i, code in enumerate(emb.roster.codes):
        value = first[i]
        if value > zero_band:
            positive.append(code)
        elif value < -zero_band:
            negative.append(code)
        else:
            boundary.append(code)
            (positive if value >= 0.0 else negative).append(code)
    if not boundary and (not positive or not negative):
        # A genuine nontrivial eigenvector is orthogonal to the all-positive
        # sqrt-degree vector, so it must change sign.  One-sided input means
        # the coordinates did not come from a nontrivial eigenvector.
        raise AssertionError(
            "first coordinate never changes sign; coordinates are not a "
            "nontrivial Laplacian eigenvector"
        )
    return Bipartition(tuple(positive), tuple(negative), tuple(boundary), zero_band)


def procrustes_align(
    reference: Embedding,
    target: Embedding,
    allow_reflection: bool = True,
    allow_scaling: bool = False,
) -> tuple[Embedding, float]:
    """Orthogonally align ``target`` onto ``reference``.

    Finds the orthogonal matrix (rotation, optionally improper) and, when
    ``allow_scaling`` is set, the uniform scale minimizing the summed
    squared distances between matched countries.  No translation is
    applied: embedding coordinates are unit eigenvectors, so their origin
    is meaningful.  Returns the transformed embedding and the minimized sum
    of squared distances (the disparity).

    Eigenvector maps are only defined up to sign flips and rotations inside
    degenerate eigenspaces, so aligning before comparing two maps of the
    same roster (say, for two different years) is what makes the comparison
    meaningful.
    """
    if reference.roster.codes != target.roster.codes:
        only_ref = set(reference.roster.codes) - set(target.roster.codes)
        only_tgt = set(target.roster.codes) - set(reference.roster.codes)
        raise RosterMismatchError(
            "embeddings cover different rosters; "
            f"only in reference: {sorted(only_ref)}, only in target: {sorted(only_tgt)}"
        )
    if reference.k != target.k:
        raise RosterMismatchError(
            f"embedding dimensions differ: {reference.k} vs {target.k}"
        )
    a = target.coordinates
    b = reference.coordinates
    u, singular, vt = np.linalg.svd(a.T @ b)
    rotation = u @ vt
    if not allow_reflection and np.linalg.det(rotation) < 0.0:
        flip = np.ones(singular.size)
        flip[-1] = -1.0
        rotation = (u * flip) @ vt
        singular = singular * flip
    scale = 1.0
    if allow_scaling:
        denom = float(np.sum(a * a))
        if denom > 0.0:
            scale = float(np.sum(singular)) / denom
    aligned_coords = scale * (a @ rotation)
    disparity = float(np.sum((aligned_coords - b) ** 2))
    aligned = Embedding(
        target.roster,
        aligned_coords,
        target.eigenvalues_used,
        target.spectral_gap,
        target.degeneracy_flag,
    )
    return aligned, disparity
