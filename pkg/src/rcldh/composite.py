"""Grayscale / low-high flow composite rendering and PGM/PPM sequences."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class RenderSpec:
    """Display mapping: percentile clip range and gamma."""

    clip_lo_pct: float = 0.5
    clip_hi_pct: float = 99.5
    gamma: float = 1.0

    def __post_init__(self):
        if not (0 <= self.clip_lo_pct < self.clip_hi_pct <= 100):
            raise ValueError("percentiles must satisfy 0 <= lo < hi <= 100")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")


def to_grayscale(image: np.ndarray, spec: RenderSpec = RenderSpec()) -> np.ndarray:
    """Percentile-clip, gamma-map and quantize an image to uint8.

    A degenerate clip range (constant image) maps to all zeros.
    """
    image = np.asarray(image, dtype=np.float64)
    if not np.all(np.isfinite(image)):
        raise ValueError("image contains non-finite values")
    lo, hi = np.percentile(image, [spec.clip_lo_pct, spec.clip_hi_pct])
    if hi <= lo:
        return np.zeros(image.shape, dtype=np.uint8)
    t = np.clip((image - lo) / (hi - lo), 0.0, 1.0)
    if spec.gamma != 1.0:
        t = t**spec.gamma
    return np.round(t * 255.0).astype(np.uint8)


def compose_low_high(
    slow_img: np.ndarray,
    fast_img: np.ndarray,
    spec: RenderSpec = RenderSpec(),
) -> np.ndarray:
    """Fuse slow and fast flow images into an RGB composite.

    Fast flow drives the red channel, slow flow the green and blue channels,
    so fast-only areas read red, slow-only areas cyan, and both white. The
    fast image is either a high-band power Doppler image or a
    reverse-contrast low-band image (whose polarity already puts fast flow
    bright).
    """
    slow_img = np.asarray(slow_img)
    fast_img = np.asarray(fast_img)
    if slow_img.shape != fast_img.shape:
        raise ValueError(
            f"shape mismatch: slow {slow_img.shape} vs fast {fast_img.shape}"
        )
    red = to_grayscale(fast_img, spec)
    slow = to_grayscale(slow_img, spec)
    return np.stack([red, slow, slow], axis=-1)


def write_pgm(path, image: np.ndarray) -> None:
    """Binary PGM (P5), maxval 255."""
    image = np.asarray(image)
    if image.ndim != 2 or image.dtype != np.uint8:
        raise ValueError("PGM writer expects a 2-D uint8 array")
    h, w = image.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(image.tobytes())


def write_ppm(path, image: np.ndarray) -> None:
    """Binary PPM (P6), maxval 255."""
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[2] != 3 or image.dtype != np.uint8:
        raise ValueError("PPM writer expects an (h, w, 3) uint8 array")
    h, w = image.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(image.tobytes())


def read_image(path) -> np.ndarray:
    """Read back a binary PGM/PPM written by this module."""
    blob = Path(path).read_bytes()
    magic, rest = blob.split(b"\n", 1)
    if magic not in (b"P5", b"P6"):
        raise ValueError(f"unrecognized format: {magic!r}")
    dims, rest = rest.split(b"\n", 1)
    maxval, rest = rest.split(b"\n", 1)
    if maxval != b"255":
        raise ValueError("only maxval 255 is supported")
    w, h = (int(v) for v in dims.split())
    if magic == b"P5":
        return np.frombuffer(rest, dtype=np.uint8, count=w * h).reshape(h, w)
    return np.frombuffer(rest, dtype=np.uint8, count=w * h * 3).reshape(h, w, 3)


def write_image_sequence(
    frames: Sequence[np.ndarray],
    directory,
    prefix: str,
    times_s: Sequence[float] | None = None,
) -> list[Path]:
    """Write numbered PGM/PPM frames plus an index file of frame times.

    Grayscale (2-D) frames become ``<prefix>_###.pgm``, color (h, w, 3)
    frames ``<prefix>_###.ppm``; the index file lists ``frame_index,time_s``
    lines. Returns the written paths (index last).
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    frames = list(frames)
    if times_s is None:
        times_s = [float(i) for i in range(len(frames))]
    if len(times_s) != len(frames):
        raise ValueError("times_s must match the number of frames")
    written: list[Path] = []
    for i, frame in enumerate(frames):
        frame = np.asarray(frame)
        ext = "ppm" if frame.ndim == 3 else "pgm"
        path = directory / f"{prefix}_{i:03d}.{ext}"
        try:
            if frame.ndim == 3:
                write_ppm(path, frame)
            else:
                write_pgm(path, frame)
        except (OSError, ValueError) as exc:
            raise type(exc)(f"frame {i}: {exc}") from exc
        written.append(path)
    index = directory / f"{prefix}_index.txt"
    index.write_text(
        "".join(f"{i},{t!r}\n" for i, t in enumerate(map(float, times_s)))
    )
    written.append(index)
    return written
