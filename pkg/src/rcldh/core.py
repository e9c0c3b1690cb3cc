"""Shared data model, frequency-axis conventions, and the raw stack file format.

Conventions used throughout the package:

* arrays holding image sequences are indexed ``(t, y, x)``;
* temporal spectra are two-sided, bin ``k`` of an ``N``-point transform maps to
  ``f_k = k * f_S / N`` for ``k < N/2`` and ``f_k = (k - N) * f_S / N``
  otherwise (the layout of ``numpy.fft.fftfreq``);
* frequency bands select bins by magnitude ``|f_k|``, half-open on the upper
  edge except that a band ending exactly at Nyquist includes the Nyquist bin,
  so that adjacent bands partition the spectrum.
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"RCLDH1"
DTYPE_REAL = 0
DTYPE_COMPLEX = 1

# little-endian: u32 nx, ny, nt; u8 dtype code; f64 sample_rate_hz,
# exposure_s, wavelength_m, pixel_pitch_m
_HEADER = struct.Struct("<IIIBdddd")
HEADER_BYTES = len(MAGIC) + _HEADER.size

_REL_TOL = 1.0 + 1e-12


@dataclass(frozen=True)
class StackMeta:
    """Acquisition metadata shared by frame and hologram stacks."""

    nx: int
    ny: int
    nt: int
    sample_rate_hz: float
    exposure_s: float
    wavelength_m: float
    pixel_pitch_m: float
    origin_tag: str = "external"

    def __post_init__(self):
        if min(self.nx, self.ny, self.nt) < 1:
            raise ValueError("nx, ny, nt must all be >= 1")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        if not (0 < self.exposure_s <= _REL_TOL / self.sample_rate_hz):
            raise ValueError("exposure_s must lie in (0, 1/sample_rate_hz]")
        if self.wavelength_m <= 0:
            raise ValueError("wavelength_m must be positive")
        if self.pixel_pitch_m <= 0:
            raise ValueError("pixel_pitch_m must be positive")

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nt, self.ny, self.nx)


def _check_stack_array(arr: np.ndarray, meta: StackMeta, what: str) -> None:
    if arr.shape != meta.shape:
        raise ValueError(
            f"{what} shape {arr.shape} does not match meta (nt, ny, nx) {meta.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite values")


@dataclass(frozen=True, eq=False)
class FrameStack:
    """Real-valued interferogram sequence, stored as float32."""

    meta: StackMeta
    samples: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.samples, dtype=np.float32)
        _check_stack_array(arr, self.meta, "samples")
        object.__setattr__(self, "samples", arr)


@dataclass(frozen=True, eq=False)
class HologramStack:
    """Complex reconstructed field sequence h(x, y, t), stored as complex64."""

    meta: StackMeta
    field: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.field, dtype=np.complex64)
        _check_stack_array(arr, self.meta, "field")
        object.__setattr__(self, "field", arr)


@dataclass(frozen=True)
class Band:
    """Frequency band [f_low_hz, f_high_hz) selected by |f|."""

    f_low_hz: float
    f_high_hz: float

    def __post_init__(self):
        if not (0 <= self.f_low_hz < self.f_high_hz):
            raise ValueError("band requires 0 <= f_low_hz < f_high_hz")


@dataclass(frozen=True, eq=False)
class SpectralCube:
    """Doppler power spectral density of one short-time window.

    ``power`` is indexed ``(f_bin, y, x)`` with the two-sided bin layout
    described in the module docstring.
    """

    nbins: int
    sample_rate_hz: float
    power: np.ndarray
    t_center_s: float

    def __post_init__(self):
        if self.power.shape[0] != self.nbins:
            raise ValueError("power first axis must have nbins entries")
        if np.any(self.power < 0):
            raise ValueError("spectral power must be non-negative")


@dataclass(frozen=True, eq=False)
class PowerDopplerMovie:
    """Band-integrated power Doppler time series, indexed (window, y, x).

    ``baseline_removed`` marks movies whose static baseline was subtracted;
    those may carry small noise negatives even though they are not
    reverse-contrast.
    """

    frames: np.ndarray
    hop_s: float
    band: Band
    rc_flag: bool = False
    t0_s: float = 0.0  # center time of the first window
    baseline_removed: bool = False

    def __post_init__(self):
        if self.hop_s <= 0:
            raise ValueError("hop_s must be positive")
        if (
            not self.rc_flag
            and not self.baseline_removed
            and np.any(self.frames < 0)
        ):
            raise ValueError("non-RC power Doppler values must be >= 0")

    @property
    def times_s(self) -> np.ndarray:
        return self.t0_s + self.hop_s * np.arange(self.frames.shape[0])


@dataclass(frozen=True, eq=False)
class RoiMask:
    """Boolean region-of-interest mask over (y, x)."""

    mask: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.mask, dtype=bool)
        object.__setattr__(self, "mask", arr)

    @property
    def n_pixels(self) -> int:
        return int(self.mask.sum())


def bin_frequencies(nbins: int, sample_rate_hz: float) -> np.ndarray:
    """Two-sided frequency of every DFT bin, in Hz."""
    return np.fft.fftfreq(nbins, d=1.0 / sample_rate_hz)


def band_bins(band: Band, nbins: int, sample_rate_hz: float) -> np.ndarray:
    """Indices of all bins with f_low <= |f_k| < f_high.

    A band whose upper edge equals Nyquist exactly also includes the
    Nyquist bin, so bands tiling [0, f_S/2] partition all bins.
    """
    nyquist = sample_rate_hz / 2.0
    if band.f_high_hz > nyquist * _REL_TOL:
        raise ValueError(
            f"band exceeds Nyquist: f_high={band.f_high_hz} Hz > {nyquist} Hz"
        )
    absf = np.abs(bin_frequencies(nbins, sample_rate_hz))
    keep = (absf >= band.f_low_hz) & (absf < band.f_high_hz)
    if band.f_high_hz == nyquist:
        keep |= absf == nyquist
    return np.nonzero(keep)[0]


def _dtype_code(stack) -> int:
    return DTYPE_COMPLEX if isinstance(stack, HologramStack) else DTYPE_REAL


def _payload(stack) -> np.ndarray:
    return stack.field if isinstance(stack, HologramStack) else stack.samples


def write_stack(stack: FrameStack | HologramStack, path) -> None:
    """Write a stack to the raw binary format plus a JSON metadata sidecar.

    Layout: magic ``RCLDH1``, little-endian header (u32 nx, ny, nt; u8 dtype
    code 0=real float32 / 1=complex float32 interleaved; f64 sample_rate_hz,
    exposure_s, wavelength_m, pixel_pitch_m), then the raw samples in
    (t, y, x) order. ``<path>.meta.json`` repeats the header as key/value
    pairs (plus the origin tag, which has no binary slot).
    """
    path = Path(path)
    meta = stack.meta
    data = _payload(stack)
    if not np.all(np.isfinite(data)):
        raise ValueError("refusing to write non-finite samples")
    code = _dtype_code(stack)
    header = MAGIC + _HEADER.pack(
        meta.nx,
        meta.ny,
        meta.nt,
        code,
        meta.sample_rate_hz,
        meta.exposure_s,
        meta.wavelength_m,
        meta.pixel_pitch_m,
    )
    wire = data.astype("<c8" if code == DTYPE_COMPLEX else "<f4", copy=False)
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(wire.tobytes())
    except OSError as exc:
        raise OSError(f"failed to write stack to {path}: {exc}") from exc
    sidecar = {
        "magic": MAGIC.decode("ascii"),
        "nx": meta.nx,
        "ny": meta.ny,
        "nt": meta.nt,
        "dtype_code": code,
        "dtype": "complex_float32" if code == DTYPE_COMPLEX else "real_float32",
        "sample_rate_hz": meta.sample_rate_hz,
        "exposure_s": meta.exposure_s,
        "wavelength_m": meta.wavelength_m,
        "pixel_pitch_m": meta.pixel_pitch_m,
        "origin_tag": meta.origin_tag,
    }
    Path(str(path) + ".meta.json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n"
    )


def read_stack(path) -> FrameStack | HologramStack:
    """Exact inverse of :func:`write_stack` (bit-exact payload roundtrip)."""
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise OSError(f"failed to read stack from {path}: {exc}") from exc
    if blob[: len(MAGIC)] != MAGIC:
        raise ValueError(f"unrecognized format: {path} does not start with {MAGIC!r}")
    if len(blob) < HEADER_BYTES:
        raise ValueError(
            f"size mismatch: expected at least {HEADER_BYTES} header bytes, "
            f"got {len(blob)}"
        )
    nx, ny, nt, code, fs, exposure, wavelength, pitch = _HEADER.unpack(
        blob[len(MAGIC) : HEADER_BYTES]
    )
    if code not in (DTYPE_REAL, DTYPE_COMPLEX):
        raise ValueError(f"unrecognized format: unknown dtype code {code}")
    item = 8 if code == DTYPE_COMPLEX else 4
    expected = HEADER_BYTES + nx * ny * nt * item
    if len(blob) != expected:
        raise ValueError(
            f"size mismatch: expected {expected} bytes, got {len(blob)}"
        )
    origin_tag = "external"
    sidecar = Path(str(path) + ".meta.json")
    if sidecar.exists():
        try:
            origin_tag = json.loads(sidecar.read_text()).get("origin_tag", origin_tag)
        except (OSError, json.JSONDecodeError):
            pass  # sidecar is advisory; the binary header is authoritative
    meta = StackMeta(
        nx=nx,
        ny=ny,
        nt=nt,
        sample_rate_hz=fs,
        exposure_s=exposure,
        wavelength_m=wavelength,
        pixel_pitch_m=pitch,
        origin_tag=origin_tag,
    )
    dtype = "<c8" if code == DTYPE_COMPLEX else "<f4"
    data = np.frombuffer(blob, dtype=dtype, offset=HEADER_BYTES).reshape(nt, ny, nx)
    if code == DTYPE_COMPLEX:
        return HologramStack(meta=meta, field=data)
    return FrameStack(meta=meta, samples=data)
