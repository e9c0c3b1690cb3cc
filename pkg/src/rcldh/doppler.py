"""Power Doppler moments, reverse contrast, corrections, traces, spectrograms."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.ndimage

from .core import Band, PowerDopplerMovie, RoiMask, SpectralCube, band_bins

MEAN_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class TracePair:
    """Artery/vein trace pair sharing one time axis."""

    t_s: np.ndarray
    artery: np.ndarray
    vein: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        if not (len(self.t_s) == len(self.artery) == len(self.vein)):
            raise ValueError("t_s, artery and vein must have equal lengths")
        if self.normalized:
            if abs(float(np.mean(self.artery))) > 1e-6 or not np.isclose(
                float(np.std(self.artery)), 1.0, atol=1e-6
            ):
                raise ValueError("normalized artery trace must have mean 0, std 1")


@dataclass(frozen=True, eq=False)
class Spectrogram:
    """ROI spectrum per window, indexed (f_bin, window)."""

    power: np.ndarray
    residual: bool
    sample_rate_hz: float
    times_s: np.ndarray


def power_doppler(cubes: Sequence[SpectralCube], band: Band) -> PowerDopplerMovie:
    """Integrate spectral cubes over a frequency band, one frame per window."""
    cubes = list(cubes)
    if not cubes:
        raise ValueError("need at least one spectral cube")
    first = cubes[0]
    bins = band_bins(band, first.nbins, first.sample_rate_hz)
    frames = np.empty((len(cubes),) + first.power.shape[1:], dtype=np.float64)
    times = np.empty(len(cubes))
    for i, cube in enumerate(cubes):
        if cube.nbins != first.nbins or cube.sample_rate_hz != first.sample_rate_hz:
            raise ValueError("all cubes must share nbins and sample rate")
        frames[i] = cube.power[bins].sum(axis=0)
        times[i] = cube.t_center_s
    if len(cubes) > 1:
        hop_s = float(times[1] - times[0])
    else:
        hop_s = first.nbins / first.sample_rate_hz  # lone window: use its span
    return PowerDopplerMovie(
        frames=frames, hop_s=hop_s, band=band, rc_flag=False, t0_s=float(times[0])
    )


def reverse_contrast(movie: PowerDopplerMovie) -> PowerDopplerMovie:
    """Negate the movie (the negative power Doppler used at low frame rates)."""
    if movie.rc_flag:
        raise ValueError("already reverse-contrast")
    return PowerDopplerMovie(
        frames=-movie.frames,
        hop_s=movie.hop_s,
        band=movie.band,
        rc_flag=True,
        t0_s=movie.t0_s,
        baseline_removed=movie.baseline_removed,
    )


def flat_field(
    movie: PowerDopplerMovie, sigma_px: float | None = None
) -> PowerDopplerMovie:
    """Divide out a smooth illumination estimate.

    The reference is the Gaussian-blurred temporal mean (default blur scale
    nx/8); frames are divided by it and rescaled by its spatial mean so the
    output keeps power Doppler units.
    """
    if movie.rc_flag:
        raise ValueError("flat-field correction expects a non-RC movie")
    nx = movie.frames.shape[2]
    if sigma_px is None:
        sigma_px = nx / 8.0
    if sigma_px <= 0:
        raise ValueError("sigma_px must be positive")
    reference = scipy.ndimage.gaussian_filter(movie.frames.mean(axis=0), sigma_px)
    scale = float(reference.mean())
    if scale <= 0:
        raise ValueError("flat-field reference is all zero")
    floored = np.maximum(reference, 1e-6 * scale)
    return PowerDopplerMovie(
        frames=movie.frames / floored * scale,
        hop_s=movie.hop_s,
        band=movie.band,
        rc_flag=False,
        t0_s=movie.t0_s,
        baseline_removed=movie.baseline_removed,
    )


def baseline_subtract(movie: PowerDopplerMovie) -> PowerDopplerMovie:
    """Subtract the per-pixel temporal 5th percentile (the static baseline)."""
    n = movie.frames.shape[0]
    if n < 8:
        raise ValueError("baseline subtraction needs at least 8 windows")
    baseline = np.percentile(movie.frames, 5.0, axis=0)
    return PowerDopplerMovie(
        frames=movie.frames - baseline,
        hop_s=movie.hop_s,
        band=movie.band,
        rc_flag=movie.rc_flag,
        t0_s=movie.t0_s,
        baseline_removed=True,
    )


def cov_map(movie: PowerDopplerMovie) -> np.ndarray:
    """Temporal coefficient of variation per pixel (population std / mean).

    Pulsatile arteries score higher than veins, veins higher than tissue.
    """
    if movie.rc_flag:
        raise ValueError("coefficient of variation expects a non-RC movie")
    if movie.frames.shape[0] < 2:
        raise ValueError("need at least 2 windows")
    mean = movie.frames.mean(axis=0)
    std = movie.frames.std(axis=0)
    out = np.zeros_like(mean)
    ok = mean > MEAN_FLOOR
    out[ok] = std[ok] / mean[ok]
    return out


def roi_trace(movie: PowerDopplerMovie, mask: RoiMask) -> np.ndarray:
    """Spatial mean over the mask, per window. RC movies yield the trace of
    the negative power Doppler (the stored negated values are averaged)."""
    if mask.n_pixels == 0:
        raise ValueError("empty mask")
    if mask.mask.shape != movie.frames.shape[1:]:
        raise ValueError("mask shape does not match movie frames")
    return movie.frames[:, mask.mask].mean(axis=1)


def normalize_trace_pair(
    artery: np.ndarray,
    vein: np.ndarray,
    t_s: np.ndarray | None = None,
) -> TracePair:
    """Center and scale both traces by the artery mean and population std."""
    artery = np.asarray(artery, dtype=np.float64)
    vein = np.asarray(vein, dtype=np.float64)
    if artery.shape != vein.shape:
        raise ValueError("artery and vein traces must have equal lengths")
    mu = float(artery.mean())
    sd = float(artery.std())
    if sd == 0:
        raise ValueError("artery trace has zero standard deviation")
    if t_s is None:
        t_s = np.arange(len(artery), dtype=np.float64)
    return TracePair(
        t_s=np.asarray(t_s, dtype=np.float64),
        artery=(artery - mu) / sd,
        vein=(vein - mu) / sd,
        normalized=True,
    )


def spectrogram(
    cubes: Sequence[SpectralCube],
    mask: RoiMask,
    subtract_spatial_mean: bool = False,
) -> Spectrogram:
    """ROI-averaged spectrum per window; optionally subtract the whole-field
    spatial-mean spectrum column-wise (the display used for pulse spectra)."""
    if mask.n_pixels == 0:
        raise ValueError("empty mask")
    cubes = list(cubes)
    if not cubes:
        raise ValueError("need at least one spectral cube")
    cols = np.empty((cubes[0].nbins, len(cubes)))
    times = np.empty(len(cubes))
    flat = mask.mask.ravel()
    for i, cube in enumerate(cubes):
        s = cube.power.reshape(cube.nbins, -1)
        col = s[:, flat].mean(axis=1)
        if subtract_spatial_mean:
            col = col - s.mean(axis=1)
        cols[:, i] = col
        times[i] = cube.t_center_s
    return Spectrogram(
        power=cols,
        residual=subtract_spatial_mean,
        sample_rate_hz=cubes[0].sample_rate_hz,
        times_s=times,
    )


def write_trace_csv(path, t_s: np.ndarray, values: np.ndarray) -> None:
    """Write a trace as CSV with header ``time_s,value``."""
    if len(t_s) != len(values):
        raise ValueError("time axis and values must have equal lengths")
    lines = ["time_s,value"]
    lines += [f"{t!r},{v!r}" for t, v in zip(map(float, t_s), map(float, values))]
    Path(path).write_text("\n".join(lines) + "\n")


def write_spectrogram(spec: Spectrogram, path_prefix) -> list[Path]:
    """Dump a spectrogram as raw float32 plus a dB-scaled PGM and a JSON
    sidecar stating shapes and the display scaling."""
    from .composite import RenderSpec, to_grayscale, write_pgm

    prefix = Path(path_prefix)
    raw_path = prefix.with_suffix(".f32")
    pgm_path = prefix.with_suffix(".pgm")
    meta_path = prefix.with_suffix(".json")
    data = spec.power.astype("<f4")
    raw_path.write_bytes(data.tobytes())
    if spec.residual:
        display, scale = spec.power, "linear"
    else:
        floor = max(float(spec.power.max()) * 1e-9, 1e-300)
        display, scale = 10.0 * np.log10(np.maximum(spec.power, floor)), "db"
    write_pgm(pgm_path, to_grayscale(display, RenderSpec()))
    meta_path.write_text(
        json.dumps(
            {
                "raw_dtype": "float32_le",
                "shape_bins_windows": list(spec.power.shape),
                "sample_rate_hz": spec.sample_rate_hz,
                "residual": spec.residual,
                "pgm_scale": scale,
                "times_s": [float(t) for t in spec.times_s],
            },
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    return [raw_path, pgm_path, meta_path]
