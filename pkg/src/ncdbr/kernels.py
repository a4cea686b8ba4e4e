"""NC Szego kernel, adjunction maps, de Branges-Rovnyak kernels, and a
Choi-matrix complete-positivity check."""

import warnings

import numpy as np

from .errors import DimensionMismatch, NearBoundary
from .ncspace import row_norm

__all__ = [
    "ad_map",
    "szego_kernel",
    "szego_series",
    "dbr_kernel",
    "cp_check",
]


def _check_shapes(Z, W, P):
    P = np.asarray(P, dtype=complex)
    if Z.d != W.d:
        raise DimensionMismatch("points must share the coordinate count")
    if P.shape != (Z.n, W.n):
        raise DimensionMismatch("P must be (level of Z) x (level of W)")
    return P


def ad_map(Z, W, P):
    """Adjunction map sum_j Z_j P W_j*."""
    P = _check_shapes(Z, W, P)
    out = np.zeros_like(P)
    for Zj, Wj in zip(Z.coords, W.coords):
        out += Zj @ P @ Wj.conj().T
    return out


def szego_kernel(Z, W, P):
    """Value of the NC Szego kernel, the solution K of K - Ad_{Z,W*}(K) = P.

    Solved as one dense linear system: column-major vectorization turns
    Z_j K W_j* into kron(conj(W_j), Z_j) acting on vec(K).
    """
    P = _check_shapes(Z, W, P)
    r = row_norm(Z) * row_norm(W)
    if r >= (1.0 - 1e-6) ** 2:
        warnings.warn("kernel solve near the row-ball boundary", NearBoundary)
    M = np.eye(Z.n * W.n, dtype=complex)
    for Zj, Wj in zip(Z.coords, W.coords):
        M -= np.kron(Wj.conj(), Zj)
    vec = np.linalg.solve(M, P.ravel(order="F"))
    return vec.reshape(P.shape, order="F")


def szego_series(Z, W, P, L):
    """Partial sum sum_{l<=L} Ad_{Z,W*}^{(l)}(P) of the kernel series.

    Tail bound: the omitted remainder has norm at most
    ||P|| (rZ rW)^{L+1} / (1 - rZ rW) for row norms rZ, rW below 1.
    """
    if L < 0:
        raise ValueError("L must be nonnegative")
    P = _check_shapes(Z, W, P)
    term = P.copy()
    out = P.copy()
    for _ in range(L):
        term = ad_map(Z, W, term)
        out += term
    return out


def dbr_kernel(B, Z, W, P):
    """de Branges-Rovnyak kernel value K (x) I - B(Z) (K (x) I) B(W)*
    with K the Szego kernel value at (Z, W, P)."""
    K = szego_kernel(Z, W, P)
    lifted_out = np.kron(K, np.eye(B.output_dim))
    lifted_in = np.kron(K, np.eye(B.input_dim))
    return lifted_out - B(Z) @ lifted_in @ B(W).conj().T


def cp_check(B, Z, threshold=-1e-9):
    """Assemble the Choi block matrix of the kernel at (Z, Z) over matrix
    units of C^n and report its minimal eigenvalue; psd iff above the
    absolute threshold."""
    n = Z.n
    k = B.output_dim * n
    choi = np.zeros((n * k, n * k), dtype=complex)
    for p in range(n):
        for q in range(n):
            E = np.zeros((n, n), dtype=complex)
            E[p, q] = 1.0
            choi[p * k : (p + 1) * k, q * k : (q + 1) * k] = dbr_kernel(B, Z, Z, E)
    choi = (choi + choi.conj().T) / 2.0
    min_eig = float(np.linalg.eigvalsh(choi)[0])
    return min_eig, min_eig >= threshold
