"""Off-axis demodulation and angular spectrum propagation of hologram stacks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FrameStack, HologramStack


@dataclass(frozen=True)
class CarrierSpec:
    """Off-axis carrier and the spatial-frequency selection window.

    Frequencies are in cycles per pixel; the selection window is the square
    of half-width ``halfwidth_cyc_per_px`` centered on the carrier and must
    fit inside the Nyquist square [-0.5, 0.5].
    """

    kx_cyc_per_px: float
    ky_cyc_per_px: float
    halfwidth_cyc_per_px: float

    def __post_init__(self):
        if max(abs(self.kx_cyc_per_px), abs(self.ky_cyc_per_px)) > 0.5:
            raise ValueError("carrier frequency exceeds Nyquist")
        if self.halfwidth_cyc_per_px <= 0:
            raise ValueError("halfwidth must be positive")
        self.validate_window()

    def validate_window(self) -> None:
        hw = self.halfwidth_cyc_per_px
        if (
            abs(self.kx_cyc_per_px) + hw > 0.5
            or abs(self.ky_cyc_per_px) + hw > 0.5
        ):
            raise ValueError("carrier window out of range")

    def mirrored(self) -> "CarrierSpec":
        """Carrier at the conjugate sideband position."""
        return CarrierSpec(
            -self.kx_cyc_per_px, -self.ky_cyc_per_px, self.halfwidth_cyc_per_px
        )


def demodulate_offaxis(frame: np.ndarray, carrier: CarrierSpec) -> np.ndarray:
    """Extract the complex field riding on a spatial-frequency carrier.

    Keeps the rectangular spectral region of half-width
    ``carrier.halfwidth_cyc_per_px`` around the carrier, recenters it to zero
    frequency (nearest integer bin), and inverse transforms. Output has the
    same pixel dimensions as the input.
    """
    frame = np.asarray(frame)
    if frame.ndim != 2:
        raise ValueError("frame must be 2-D")
    if not np.all(np.isfinite(frame)):
        raise ValueError("frame contains non-finite values")
    carrier.validate_window()
    ny, nx = frame.shape
    fx = np.fft.fftfreq(nx)
    fy = np.fft.fftfreq(ny)
    hw = carrier.halfwidth_cyc_per_px
    keep = (np.abs(fy[:, None] - carrier.ky_cyc_per_px) <= hw) & (
        np.abs(fx[None, :] - carrier.kx_cyc_per_px) <= hw
    )
    spectrum = np.fft.fft2(frame)
    spectrum = np.where(keep, spectrum, 0.0)
    cy = int(round(carrier.ky_cyc_per_px * ny))
    cx = int(round(carrier.kx_cyc_per_px * nx))
    spectrum = np.roll(spectrum, (-cy, -cx), axis=(0, 1))
    return np.fft.ifft2(spectrum)


def angular_spectrum_propagate(
    field: np.ndarray,
    z_m: float,
    wavelength_m: float,
    pixel_pitch_m: float,
) -> np.ndarray:
    """Propagate a complex field by z via the angular spectrum transfer function.

    Multiplies the spatial spectrum by exp(i z k_z) with
    k_z = sqrt((2 pi / lambda)^2 - k_x^2 - k_y^2); evanescent components
    (k_x^2 + k_y^2 beyond the wavenumber circle) are zeroed. z = 0 is the
    identity.
    """
    field = np.asarray(field, dtype=np.complex128)
    if field.ndim != 2:
        raise ValueError("field must be 2-D")
    if not np.all(np.isfinite(field)):
        raise ValueError("field contains non-finite values")
    if wavelength_m <= 0 or pixel_pitch_m <= 0:
        raise ValueError("wavelength and pixel pitch must be positive")
    if z_m == 0:
        return field.copy()
    ny, nx = field.shape
    kx = 2 * np.pi * np.fft.fftfreq(nx, d=pixel_pitch_m)
    ky = 2 * np.pi * np.fft.fftfreq(ny, d=pixel_pitch_m)
    kz2 = (2 * np.pi / wavelength_m) ** 2 - kx[None, :] ** 2 - ky[:, None] ** 2
    transfer = np.zeros((ny, nx), dtype=np.complex128)
    propagating = kz2 >= 0
    transfer[propagating] = np.exp(1j * z_m * np.sqrt(kz2[propagating]))
    return np.fft.ifft2(np.fft.fft2(field) * transfer)


def reconstruct_stack(
    frames: FrameStack, carrier: CarrierSpec, z_m: float
) -> HologramStack:
    """Demodulate every interferogram and propagate the field by ``z_m``."""
    meta = frames.meta
    out = np.empty(meta.shape, dtype=np.complex64)
    for i in range(meta.nt):
        try:
            field = demodulate_offaxis(frames.samples[i], carrier)
            out[i] = angular_spectrum_propagate(
                field, z_m, meta.wavelength_m, meta.pixel_pitch_m
            )
        except ValueError as exc:
            raise ValueError(f"frame {i}: {exc}") from exc
    return HologramStack(meta=meta, field=out)
