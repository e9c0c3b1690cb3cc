"""Short-time windowing and Doppler power spectral density."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import HologramStack, SpectralCube

APODIZATIONS = ("none", "hann")


@dataclass(frozen=True)
class StftPlan:
    """Sliding-window plan: window length, hop, and apodization."""

    n_win: int = 512
    hop: int = 256
    apodization: str = "none"

    def __post_init__(self):
        if self.n_win < 2 or self.n_win % 2 != 0:
            raise ValueError("n_win must be even and >= 2")
        if not (1 <= self.hop <= self.n_win):
            raise ValueError("hop must satisfy 1 <= hop <= n_win")
        if self.apodization not in APODIZATIONS:
            raise ValueError(f"apodization must be one of {APODIZATIONS}")

    def n_windows(self, nt: int) -> int:
        if nt < self.n_win:
            raise ValueError(
                f"stack shorter than window: nt={nt} < n_win={self.n_win}"
            )
        return (nt - self.n_win) // self.hop + 1

    def t_center_s(self, m: int, sample_rate_hz: float) -> float:
        return (m * self.hop + self.n_win / 2) / sample_rate_hz


def make_windows(
    stack: HologramStack, plan: StftPlan
) -> Iterator[tuple[np.ndarray, float]]:
    """Yield (window, t_center_s) pairs; window m covers frames
    [m*hop, m*hop + n_win). Windows are views into the stack."""
    fs = stack.meta.sample_rate_hz
    count = plan.n_windows(stack.meta.nt)
    for m in range(count):
        start = m * plan.hop
        yield stack.field[start : start + plan.n_win], plan.t_center_s(m, fs)


def dpsd(
    window: np.ndarray,
    sample_rate_hz: float,
    apodization: str = "none",
    t_center_s: float = 0.0,
) -> SpectralCube:
    """Per-pixel Doppler power spectral density of one short-time window.

    S[k] = |X[k]|^2 with X the unitary (1/sqrt(N)-scaled) temporal DFT, so
    with no apodization sum_k S[k] equals sum_t |h[t]|^2 per pixel exactly
    (Parseval). Hann apodization trades this identity for lower leakage.
    """
    window = np.asarray(window)
    if window.ndim != 3:
        raise ValueError("window must be indexed (t, y, x)")
    if apodization not in APODIZATIONS:
        raise ValueError(f"apodization must be one of {APODIZATIONS}")
    if not np.all(np.isfinite(window)):
        raise ValueError("window contains non-finite values")
    n = window.shape[0]
    w = window.astype(np.complex128)
    if apodization == "hann":
        w *= np.hanning(n)[:, None, None]
    x = np.fft.fft(w, axis=0)
    x /= np.sqrt(n)
    power = x.real**2 + x.imag**2
    return SpectralCube(
        nbins=n,
        sample_rate_hz=sample_rate_hz,
        power=power,
        t_center_s=t_center_s,
    )
