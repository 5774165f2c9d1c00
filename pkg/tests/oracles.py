"""Independent reference computations the tests check the library against.

Nothing here shares code with the package's solver: eigenvalues come from
characteristic-polynomial roots (principal minors + companion-matrix root
finding) or closed-form trigonometric formulas, and matrix products are
spelled out naively.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def charpoly_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues as roots of the characteristic polynomial (n <= 4).

    Coefficients come from sums of principal minors evaluated with LU-based
    determinants; roots from numpy's companion-matrix solver.  Entirely
    disjoint from any symmetric eigensolver code path.
    """
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[0]
    assert n <= 4, "characteristic-polynomial oracle is for tiny matrices only"
    coefficients = [1.0]
    for k in range(1, n + 1):
        minor_sum = 0.0
        for rows in itertools.combinations(range(n), k):
            sub = matrix[np.ix_(rows, rows)]
            minor_sum += float(np.linalg.det(sub))
        coefficients.append((-1.0) ** k * minor_sum)
    roots = np.roots(coefficients)
    assert np.max(np.abs(roots.imag)) < 1e-8
    return np.sort(roots.real)


def _det3(matrix: np.ndarray) -> float:
    return float(
        matrix[0, 0] * (matrix[1, 1] * matrix[2, 2] - matrix[1, 2] * matrix[2, 1])
        - matrix[0, 1] * (matrix[1, 0] * matrix[2, 2] - matrix[1, 2] * matrix[2, 0])
        + matrix[0, 2] * (matrix[1, 0] * matrix[2, 1] - matrix[1, 1] * matrix[2, 0])
    )


def closed_form_eigen_3x3(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Analytic eigendecomposition of a symmetric 3x3 matrix.

    Eigenvalues from the trigonometric solution of the cubic; eigenvectors
    from cross products of rows of (S - lambda I).  Requires distinct
    eigenvalues for the eigenvector step.
    """
    s = np.asarray(matrix, dtype=float)
    off = s[0, 1] ** 2 + s[0, 2] ** 2 + s[1, 2] ** 2
    if off == 0.0:
        order = np.argsort(np.diagonal(s), kind="stable")
        return np.diagonal(s)[order], np.eye(3)[:, order]
    q = float(np.trace(s)) / 3.0
    p2 = sum((s[i, i] - q) ** 2 for i in range(3)) + 2.0 * off
    p = math.sqrt(p2 / 6.0)
    b = (s - q * np.eye(3)) / p
    r = min(1.0, max(-1.0, _det3(b) / 2.0))
    phi = math.acos(r) / 3.0
    largest = q + 2.0 * p * math.cos(phi)
    smallest = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    middle = 3.0 * q - largest - smallest
    eigenvalues = np.array([smallest, middle, largest])

    columns = []
    for lam in eigenvalues:
        shifted = s - lam * np.eye(3)
        crosses = [
            np.cross(shifted[i], shifted[j]) for i, j in ((0, 1), (0, 2), (1, 2))
        ]
        best = max(crosses, key=lambda c: float(np.linalg.norm(c)))
        norm = float(np.linalg.norm(best))
        assert norm > 0.0, "eigenvalue appears repeated; cross-product step invalid"
        columns.append(best / norm)
    return eigenvalues, np.column_stack(columns)


def apply_sign_convention(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so each column's largest-magnitude entry is positive."""
    fixed = vectors.copy()
    for k in range(fixed.shape[1]):
        pivot = int(np.argmax(np.abs(fixed[:, k])))
        if fixed[pivot, k] < 0.0:
            fixed[:, k] = -fixed[:, k]
    return fixed


def naive_normalized_laplacian(affinity: np.ndarray) -> np.ndarray:
    """Textbook matrix-product construction used as a cross-check."""
    degrees = affinity.sum(axis=1)
    d_inv_sqrt = np.diag(1.0 / np.sqrt(degrees))
    return np.eye(affinity.shape[0]) - d_inv_sqrt @ affinity @ d_inv_sqrt


def naive_pairwise_distances(coordinates: np.ndarray) -> np.ndarray:
    """Double-loop Euclidean distances."""
    n = coordinates.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = math.sqrt(
                sum((coordinates[i, d] - coordinates[j, d]) ** 2
                    for d in range(coordinates.shape[1]))
            )
    return out


def normalized_cut(affinity: np.ndarray, side: np.ndarray) -> float:
    """Normalized cut value of a boolean bipartition."""
    cut = float(affinity[np.ix_(side, ~side)].sum())
    vol_a = float(affinity[side].sum())
    vol_b = float(affinity[~side].sum())
    return cut * (1.0 / vol_a + 1.0 / vol_b)


def best_bipartition_by_ncut(affinity: np.ndarray) -> np.ndarray:
    """Exhaustive minimum-normalized-cut bipartition (small n only)."""
    n = affinity.shape[0]
    assert n <= 12
    best_value = math.inf
    best_side = None
    # Last vertex pinned to one side; halves the search and skips mirrors.
    for bits in range(1, 2 ** (n - 1)):
        side = np.array([(bits >> i) & 1 == 1 for i in range(n - 1)] + [False])
        value = normalized_cut(affinity, side)
        if value < best_value:
            best_value = value
            best_side = side
    return best_side
