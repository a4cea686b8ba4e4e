"""Dense complex linear-algebra primitives with an explicit tolerance policy.

All higher modules route their rank decisions, square roots and unitary
fits through this module so that a single pair of cutoffs (relative rank
cutoff, absolute equality tolerance) governs the whole toolkit.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotPSD

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "psd_sqrt",
    "pinv",
    "orthonormal_range",
    "orthonormal_kernel",
    "fit_unitary",
    "stabilized_span",
    "subspace_stable_basis",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical policy: relative singular-value cutoff and absolute equality
    tolerance. Both must sit strictly between 0 and 1e-3."""

    rank_rel: float = 1e-10
    eq_abs: float = 1e-10

    def __post_init__(self):
        if not (0.0 < self.rank_rel < 1e-3):
            raise ValueError("rank_rel out of range (0, 1e-3)")
        if not (0.0 < self.eq_abs < 1e-3):
            raise ValueError("eq_abs out of range (0, 1e-3)")


DEFAULT_TOL = Tolerance()


def _as_complex(A):
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2:
        raise DimensionMismatch("expected a 2-d array, got ndim=%d" % A.ndim)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix contains NaN or Inf entries")
    return A


def psd_sqrt(A, tol=DEFAULT_TOL):
    """Hermitian PSD square root via eigendecomposition of (A + A*)/2.

    Negative eigenvalues within the tolerance are clamped to zero; a
    genuinely indefinite input raises NotPSD.
    """
    A = _as_complex(A)
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch("psd_sqrt needs a square matrix")
    herm_defect = np.linalg.norm(A - A.conj().T, 2) if A.size else 0.0
    if herm_defect > tol.eq_abs:
        raise NotHermitian("Hermitian defect %.3e exceeds eq_abs" % herm_defect)
    H = (A + A.conj().T) / 2.0
    w, Q = np.linalg.eigh(H)
    if w.size and w[0] < -100.0 * tol.eq_abs:
        raise NotPSD("minimal eigenvalue %.3e below -100*eq_abs" % w[0])
    w = np.clip(w, 0.0, None)
    # zero tiny eigenvalues before the root so sqrt noise cannot inflate
    # the numerical rank of the result
    if w.size and w[-1] > 0.0:
        w[w <= tol.rank_rel * w[-1]] = 0.0
    S = (Q * np.sqrt(w)) @ Q.conj().T
    return (S + S.conj().T) / 2.0


def pinv(A, tol=DEFAULT_TOL):
    """Moore-Penrose pseudo-inverse with singular values below
    rank_rel * sigma_max treated as zero."""
    A = _as_complex(A)
    if A.size == 0:
        return np.zeros((A.shape[1], A.shape[0]), dtype=complex)
    return np.linalg.pinv(A, rcond=tol.rank_rel)


def _fix_column_phases(B, tol):
    """Make each column's first significant entry real positive.

    This is the deterministic sign convention: SVD bases are unique only
    up to per-column phases, so we normalize them for reproducibility.
    """
    B = B.copy()
    for k in range(B.shape[1]):
        col = B[:, k]
        idx = np.flatnonzero(np.abs(col) > tol.rank_rel * max(1.0, np.abs(col).max()))
        if idx.size == 0:
            continue
        pivot = col[idx[0]]
        B[:, k] = col * (np.conj(pivot) / np.abs(pivot))
    return B


def _svd_rank(s, tol):
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.sum(s > tol.rank_rel * s[0]))


def orthonormal_range(A, tol=DEFAULT_TOL):
    """Orthonormal columns spanning the numerical range of A."""
    A = _as_complex(A)
    if A.size == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    U, s, _ = np.linalg.svd(A)
    r = _svd_rank(s, tol)
    return _fix_column_phases(U[:, :r], tol)


def orthonormal_kernel(A, tol=DEFAULT_TOL):
    """Orthonormal columns spanning the numerical kernel of A."""
    A = _as_complex(A)
    if A.size == 0:
        return np.eye(A.shape[1], dtype=complex)
    _, s, Vh = np.linalg.svd(A)
    r = _svd_rank(s, tol)
    return _fix_column_phases(Vh[r:].conj().T, tol)


def subspace_stable_basis(frame, tol=DEFAULT_TOL):
    """Canonical orthonormal basis depending only on the spanned subspace.

    SVD bases of a degenerate singular subspace can rotate arbitrarily
    under entry-level perturbations; the pivoted QR of the orthogonal
    projector varies continuously with the subspace instead, which makes
    downstream frame-dependent quantities reproducible.
    """
    frame = _as_complex(frame)
    r = frame.shape[1]
    if r == 0:
        return frame
    import scipy.linalg

    P = frame @ frame.conj().T
    Q, _, _ = scipy.linalg.qr(P, pivoting=True, mode="economic")
    return _fix_column_phases(Q[:, :r], tol)


def stabilized_span(ops, seed, tol=DEFAULT_TOL):
    """Smallest subspace containing Ran(seed) and invariant under each op.

    Iterates S <- S + sum_j ops[j] S and stops as soon as the dimension is
    unchanged for one step; termination within dim steps is guaranteed
    because the dimension strictly grows until saturation.  Returns
    (orthonormal frame, stabilization step count).
    """
    frame = orthonormal_range(_as_complex(seed), tol)
    steps = 0
    while True:
        enlarged = np.hstack([frame] + [np.asarray(A, dtype=complex) @ frame for A in ops])
        new_frame = orthonormal_range(enlarged, tol)
        if new_frame.shape[1] == frame.shape[1]:
            return new_frame, steps
        frame = new_frame
        steps += 1


def fit_unitary(pairs):
    """Unitary U minimizing sum of ||U A_i - B_i||_F^2 over the given pairs.

    Orthogonal-Procrustes solution: U = W Vh for the SVD of sum B_i A_i*.
    Returns (U, attained residual).
    """
    pairs = [(_as_complex(A), _as_complex(B)) for A, B in pairs]
    if not pairs:
        raise DimensionMismatch("fit_unitary needs at least one pair")
    rows_a = pairs[0][0].shape[0]
    rows_b = pairs[0][1].shape[0]
    for A, B in pairs:
        if A.shape[0] != rows_a or B.shape[0] != rows_b:
            raise DimensionMismatch("inconsistent row counts across pairs")
        if A.shape[1] != B.shape[1]:
            raise DimensionMismatch("column counts differ within a pair")
    if rows_a != rows_b:
        raise DimensionMismatch("U must be square: row counts differ")
    M = np.zeros((rows_b, rows_a), dtype=complex)
    for A, B in pairs:
        M += B @ A.conj().T
    W, _, Vh = np.linalg.svd(M)
    U = W @ Vh
    residual = float(sum(np.linalg.norm(U @ A - B, "fro") ** 2 for A, B in pairs))
    return U, residual
