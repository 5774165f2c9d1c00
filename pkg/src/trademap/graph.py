"""Affinity matrix, degrees, and the normalized Laplacian of a trade graph.

The directed flow matrix is symmetrized into total bilateral trade, which
plays the role of edge weights on a complete weighted graph.  The
normalized Laplacian built here is the operator whose low eigenvectors the
embedding reads off.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import IsolatedVertexError, NegativeFlowError
from .ingest import CountryRoster, FlowMatrix


@dataclass(frozen=True)
class AffinityMatrix:
    """Symmetric matrix of total bilateral trade; zero diagonal."""

    roster: CountryRoster
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        n = len(self.roster)
        if self.values.shape != (n, n):
            raise ValueError("affinity shape does not match roster size")

    @property
    def n(self) -> int:
        return len(self.roster)


@dataclass(frozen=True)
class DegreeVector:
    """Row sums of an affinity matrix: each country's total trade volume."""

    roster: CountryRoster
    degrees: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "degrees", np.asarray(self.degrees, dtype=float))


@dataclass(frozen=True)
class LaplacianMatrix:
    """Normalized Laplacian with unit diagonal and off-diagonals in [-1, 0].

    The degree vector is retained so downstream checks can reconstruct the
    trivial eigenvector direction (proportional to the square roots of the
    degrees) without going back to the affinity matrix.
    """

    roster: CountryRoster
    values: np.ndarray
    degrees: DegreeVector

    @property
    def n(self) -> int:
        return len(self.roster)


def affinity(flow: FlowMatrix) -> AffinityMatrix:
    """Total bilateral trade: entry (i, j) is flow i->j plus flow j->i.

    The sum is formed entrywise; IEEE addition is commutative, so the
    result is exactly symmetric without any explicit mirroring.
    """
    if np.any(flow.values < 0.0):
        i, j = np.argwhere(flow.values < 0.0)[0]
        raise NegativeFlowError(
            f"negative flow for dyad {flow.roster.codes[i]} -> {flow.roster.codes[j]}"
        )
    values = flow.values + flow.values.T
    return AffinityMatrix(flow.roster, values)


def degrees(aff: AffinityMatrix) -> DegreeVector:
    """Row sums of the affinity matrix, in fixed index order."""
    return DegreeVector(aff.roster, aff.values.sum(axis=1))


def normalized_laplacian(aff: AffinityMatrix) -> LaplacianMatrix:
    """Build ``I - D^{-1/2} A D^{-1/2}`` for a strictly positive degree vector.

    The off-diagonal part is ``-a_ij / sqrt(d_i * d_j)``.  Scaling factors
    are formed as an outer product first so the entry and its transpose are
    built from the identical float, keeping the matrix exactly symmetric.
    """
    deg = degrees(aff)
    zero = np.flatnonzero(deg.degrees <= 0.0)
    if zero.size:
        raise IsolatedVertexError(aff.roster.codes[int(zero[0])])
    inv_sqrt = 1.0 / np.sqrt(deg.degrees)
    scale = np.outer(inv_sqrt, inv_sqrt)
    values = -(aff.values * scale)
    np.fill_diagonal(values, 1.0)  # a_ii = 0, so the diagonal is exactly 1
    return LaplacianMatrix(aff.roster, values, deg)


def _components(adjacency: np.ndarray) -> list[list[int]]:
    """Connected components of a boolean adjacency matrix.

    Returned in deterministic order: the component containing the lowest
    index first, members ascending.
    """
    n = adjacency.shape[0]
    unvisited = np.ones(n, dtype=bool)
    components = []
    for start in range(n):
        if not unvisited[start]:
            continue
        queue = deque([start])
        unvisited[start] = False
        members = [start]
        while queue:
            node = queue.popleft()
            neighbors = np.flatnonzero(adjacency[node] & unvisited)
            for nb in neighbors:
                unvisited[nb] = False
                members.append(int(nb))
                queue.append(int(nb))
        components.append(sorted(members))
    return components


def connected_components(
    aff: AffinityMatrix, edge_threshold: float = 0.0
) -> list[list[int]]:
    """Partition roster indices by connectivity.

    An edge exists where the affinity strictly exceeds ``edge_threshold``.
    The default threshold 0 treats exact-zero dyads (which occur under the
    zero-fill policy) as absent edges.
    """
    adjacency = aff.values > edge_threshold
    np.fill_diagonal(adjacency, False)
    return _components(adjacency)


def laplacian_components(lap: LaplacianMatrix) -> list[list[int]]:
    """Connected components read off the Laplacian's sparsity pattern.

    Off-diagonal entries are strictly negative exactly where the underlying
    affinity is positive, so the pattern determines connectivity without
    revisiting the affinity matrix.
    """
    adjacency = lap.values < 0.0
    np.fill_diagonal(adjacency, False)
    return _components(adjacency)
