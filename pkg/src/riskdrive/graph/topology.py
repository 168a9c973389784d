"""Vertex topology vectors from the Laplacian spectrum."""

from __future__ import annotations

import numpy as np


def laplacian_spectrum(L: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and eigenvector columns of a symmetric L."""
    L = np.asarray(L, dtype=float)
    _check_symmetric(L)
    return np.linalg.eigh(L)


def vertex_topology(L: np.ndarray, U: np.ndarray, i: int) -> np.ndarray:
    """Column i of L @ U.

    For a weighted Laplacian the j-th entry equals the sum of the eigenvector
    differences u_i(j) - u_i(k) over all edges incident to vertex j, which
    summarizes the local edge-length arrangement around the vertex.
    """
    L = np.asarray(L, dtype=float)
    U = np.asarray(U, dtype=float)
    _check_symmetric(L)
    if U.shape[0] != L.shape[0]:
        raise ValueError("eigenvector matrix does not match L")
    if not 0 <= i < U.shape[1]:
        raise IndexError(f"column index {i} out of range")
    return L @ U[:, i]


def _check_symmetric(L: np.ndarray, tol: float = 1e-12) -> None:
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ValueError("L must be square")
    if L.size and not np.allclose(L, L.T, atol=tol, rtol=0.0):
        raise ValueError("L must be symmetric")
