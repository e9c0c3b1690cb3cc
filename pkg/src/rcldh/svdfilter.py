"""Bulk-motion clutter rejection by truncated SVD of the space-time matrix."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg


@dataclass(frozen=True)
class SvdFilterSpec:
    """Clutter filter strength: equivalent Fourier cutoff, or an explicit
    number of rejected components."""

    cutoff_hz: float = 200.0
    rank_override: int | None = None

    def __post_init__(self):
        if self.cutoff_hz < 0:
            raise ValueError("cutoff_hz must be >= 0")
        if self.rank_override is not None and self.rank_override < 0:
            raise ValueError("rank_override must be >= 0")

    def rank(self, sample_rate_hz: float, n_win: int) -> int:
        if self.rank_override is not None:
            if self.rank_override >= n_win:
                raise ValueError("rank_override must be < n_win")
            return self.rank_override
        return cutoff_to_rank(self.cutoff_hz, sample_rate_hz, n_win)


def cutoff_to_rank(cutoff_hz: float, sample_rate_hz: float, n_win: int) -> int:
    """Number of singular components matching a two-sided Fourier cutoff.

    k = round(2 * n_win * cutoff_hz / sample_rate_hz) counts the DFT bins
    with |f| < cutoff; clamped to [1, n_win/4] so some clutter is always
    rejected and the signal subspace survives at low frame rates.
    """
    if cutoff_hz >= sample_rate_hz / 2:
        raise ValueError("cutoff_hz must be below Nyquist")
    k = int(round(2.0 * n_win * cutoff_hz / sample_rate_hz))
    return max(1, min(k, n_win // 4))


def svd_clutter_filter(
    window: np.ndarray,
    spec: SvdFilterSpec,
    sample_rate_hz: float,
    window_index: int | None = None,
) -> np.ndarray:
    """Subtract the k highest-energy singular components of one window.

    The window is reshaped to the (n_pixels x n_win) space-time matrix A and
    the rank-k truncation of A is removed: A_f = A - sum_{i<=k} s_i u_i v_i*.
    Only the top-k right singular vectors are materialized, via the
    (n_win x n_win) Gram matrix, since n_pixels >> n_win.
    """
    window = np.asarray(window)
    if window.ndim != 3:
        raise ValueError("window must be indexed (t, y, x)")
    if not np.all(np.isfinite(window)):
        raise ValueError("window contains non-finite values")
    n_win = window.shape[0]
    k = spec.rank(sample_rate_hz, n_win)
    if k == 0:
        return window.copy()
    casorati = window.reshape(n_win, -1).T.astype(np.complex128)
    gram = casorati.conj().T @ casorati
    try:
        # eigh returns ascending eigenvalues; the top k are the squared
        # largest singular values and their right singular vectors.
        _, vecs = scipy.linalg.eigh(gram, subset_by_index=[n_win - k, n_win - 1])
    except scipy.linalg.LinAlgError as exc:
        where = "" if window_index is None else f" (window {window_index})"
        raise ValueError(f"singular value decomposition failed{where}: {exc}") from exc
    coeffs = casorati @ vecs
    filtered = casorati - coeffs @ vecs.conj().T
    out = filtered.T.reshape(window.shape)
    return out.astype(window.dtype, copy=False)
