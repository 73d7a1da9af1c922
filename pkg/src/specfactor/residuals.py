"""Residual pipeline: factor removal, row standardization, covariance spectra.

An observation matrix R (N variables x T samples) is reduced to its p-level
residual by subtracting the best rank-p reconstruction, the residual rows are
standardized to mean 0 / variance 1 (population divisor T), and the spectrum
of the residual covariance (1/T) U U' feeds the spectral matching stage.
"""
from __future__ import annotations

import numpy as np

from .errors import DataError, ZeroVarianceRowError
from .spectra import BinningPolicy, SpectralDensity, as_spectrum, esd

__all__ = [
    "check_data_matrix",
    "factor_fit",
    "residual",
    "standardize_rows",
    "residual_covariance",
    "residual_spectrum",
    "residual_esd",
]


def check_data_matrix(R) -> np.ndarray:
    R = np.asarray(R, dtype=float)
    if R.ndim != 2:
        raise DataError(f"observation matrix must be 2-D, got shape {R.shape}")
    n, t = R.shape
    if n < 2 or t < 2:
        raise DataError(f"observation matrix must be at least 2x2, got {n}x{t}")
    if not np.all(np.isfinite(R)):
        raise DataError("observation matrix contains non-finite entries")
    return R


def right_singular_rows(R: np.ndarray) -> np.ndarray:
    """All right singular vectors of R as rows, ordered by singular value."""
    _, _, vt = np.linalg.svd(R, full_matrices=False)
    return vt


def factor_fit(R, p: int, right_rows: np.ndarray | None = None):
    """Fit p factors: returns (loadings N x p, factors p x T).

    The factor rows are the top-p right singular directions of R (orthonormal),
    and the loadings are the projections R @ factors', so loadings @ factors is
    the best rank-p approximation of R in Frobenius norm. ``right_rows`` lets a
    caller sweeping many p values reuse one decomposition; results are
    bit-identical either way.
    """
    R = check_data_matrix(R)
    n, t = R.shape
    if int(p) != p or p < 0 or p >= min(n, t):
        raise ValueError(f"factor count must satisfy 0 <= p < min(N, T) = {min(n, t)}, got {p}")
    if right_rows is None:
        right_rows = right_singular_rows(R)
    factors = right_rows[:p]
    loadings = R @ factors.T
    return loadings, factors


def residual(R, p: int, right_rows: np.ndarray | None = None) -> np.ndarray:
    """R minus its rank-p truncated reconstruction."""
    R = check_data_matrix(R)
    if p == 0:
        return R.copy()
    loadings, factors = factor_fit(R, p, right_rows)
    return R - loadings @ factors


def standardize_rows(U) -> np.ndarray:
    """Shift/scale each row to mean 0 and variance 1 (population divisor).

    A constant row cannot be standardized and aborts with the row index —
    a zero-variance residual row is a data defect, not something to paper
    over.
    """
    U = np.asarray(U, dtype=float)
    if U.ndim != 2:
        raise DataError(f"expected a 2-D matrix, got shape {U.shape}")
    if not np.all(np.isfinite(U)):
        raise DataError("matrix contains non-finite entries")
    mu = U.mean(axis=1, keepdims=True)
    sd = U.std(axis=1, ddof=0, keepdims=True)
    flat = np.flatnonzero(sd.ravel() <= 1e-12)
    if flat.size:
        raise ZeroVarianceRowError(int(flat[0]))
    return (U - mu) / sd


def residual_covariance(U) -> np.ndarray:
    """(1/T) U U', explicitly symmetrized against floating-point drift."""
    U = np.asarray(U, dtype=float)
    if U.ndim != 2:
        raise DataError(f"expected a 2-D matrix, got shape {U.shape}")
    if not np.all(np.isfinite(U)):
        raise DataError("matrix contains non-finite entries")
    t = U.shape[1]
    cov = (U @ U.T) / t
    return 0.5 * (cov + cov.T)


def residual_spectrum(R, p: int, right_rows: np.ndarray | None = None) -> np.ndarray:
    """Ascending eigenvalues of the standardized p-level residual covariance."""
    U = standardize_rows(residual(R, p, right_rows))
    return as_spectrum(np.linalg.eigvalsh(residual_covariance(U)))


def residual_esd(R, p: int, policy: BinningPolicy, clip: bool = False) -> SpectralDensity:
    """Empirical spectral density of the p-level residual covariance.

    Estimation assumes more samples than variables; a matrix with N > T is
    rejected rather than silently transposed.
    """
    R = check_data_matrix(R)
    n, t = R.shape
    if n > t:
        raise DataError(
            f"got N={n} > T={t}; estimation needs N <= T — transpose the matrix "
            "yourself if rows are samples"
        )
    return esd(residual_spectrum(R, p), policy, clip=clip)
