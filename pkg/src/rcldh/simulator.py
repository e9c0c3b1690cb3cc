"""Synthetic dynamic-speckle scenes with fully known Doppler ground truth.

Each pixel carries a unit-variance complex Gaussian first-order
autoregressive process (Lorentzian line shape) whose coefficient
``a_n = exp(-dt / tau_c)`` follows a per-region decorrelation time. Cardiac
pulsatility shortens ``tau_c`` (systole broadens the spectrum), a global
phase waveform emulates bulk axial motion, and complex white noise sets the
SNR. All randomness is counter-keyed per (seed, pixel index), so stacks are
bit-reproducible regardless of generation chunking.
"""
from __future__ import annotations

import configparser
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .core import FrameStack, HologramStack, RoiMask, StackMeta
from .reconstruct import CarrierSpec

_PIXEL_CHUNK = 512

# cardiac waveform shape: systolic lobe plus dicrotic bump, phases in cycles
_SYS_PHASE, _SYS_WIDTH = 0.15, 0.09
_DIC_PHASE, _DIC_WIDTH, _DIC_HEIGHT = 0.45, 0.05, 0.25


def _wrapped_distance(phase: np.ndarray, center: float) -> np.ndarray:
    return (phase - center + 0.5) % 1.0 - 0.5


def _raw_waveform(phase: np.ndarray) -> np.ndarray:
    d_sys = _wrapped_distance(phase, _SYS_PHASE)
    d_dic = _wrapped_distance(phase, _DIC_PHASE)
    return np.exp(-0.5 * (d_sys / _SYS_WIDTH) ** 2) + _DIC_HEIGHT * np.exp(
        -0.5 * (d_dic / _DIC_WIDTH) ** 2
    )


_REF_PHASE = np.arange(1 << 16) / (1 << 16)
_WAVE_MIN = float(_raw_waveform(_REF_PHASE).min())
_WAVE_MAX = float(_raw_waveform(_REF_PHASE).max())


def waveform_at_phase(phase) -> np.ndarray:
    """Cardiac waveform versus phase in cycles, normalized to [0, 1]."""
    p = (_raw_waveform(np.asarray(phase, dtype=np.float64)) - _WAVE_MIN) / (
        _WAVE_MAX - _WAVE_MIN
    )
    return np.clip(p, 0.0, 1.0)


def cardiac_waveform(heart_rate_hz: float, t: np.ndarray) -> np.ndarray:
    """Periodic pulse waveform in [0, 1]: a systolic peak and a secondary
    (dicrotic) local maximum at phase 0.45 with relative height 0.25."""
    if heart_rate_hz <= 0:
        raise ValueError("heart_rate_hz must be positive")
    return waveform_at_phase(np.asarray(t, dtype=np.float64) * heart_rate_hz)


@dataclass(frozen=True)
class RegionParams:
    """Per-region speckle dynamics and reflectivity."""

    tau_c_s: float
    pulsatility: float = 0.0
    phase_lag_cycles: float = 0.0
    reflectivity: float = 1.0

    def __post_init__(self):
        if not self.tau_c_s > 0:
            raise ValueError("tau_c_s must be positive (inf allowed)")
        if not (0 <= self.pulsatility < 1):
            raise ValueError("pulsatility must lie in [0, 1)")
        if self.reflectivity < 0:
            raise ValueError("reflectivity must be >= 0")


@dataclass(frozen=True)
class BulkMotionSpec:
    """Global phase waveform: fundamental amplitude/frequency plus optional
    relative amplitudes for harmonics 2, 3, ..."""

    amplitude_rad: float = 0.0
    frequency_hz: float = 0.0
    harmonic_amps: tuple[float, ...] = ()

    def phase(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        if self.amplitude_rad == 0.0 or self.frequency_hz == 0.0:
            return np.zeros_like(t)
        phi = np.sin(2 * np.pi * self.frequency_hz * t)
        for j, amp in enumerate(self.harmonic_amps, start=2):
            phi = phi + amp * np.sin(2 * np.pi * j * self.frequency_hz * t)
        return self.amplitude_rad * phi


@dataclass(frozen=True, eq=False)
class SceneSpec:
    """Ground-truth scene: labeled regions with dynamics, noise, and seed."""

    nx: int
    ny: int
    region_map: np.ndarray
    region_names: tuple[str, ...]
    regions: Mapping[str, RegionParams]
    heart_rate_hz: float
    tau_ratio: float = 3.0
    bulk: BulkMotionSpec = field(default_factory=BulkMotionSpec)
    noise_snr_db: float | None = 30.0
    seed: int = 0
    wavelength_m: float = 785e-9
    pixel_pitch_m: float = 5.6e-6

    def __post_init__(self):
        rmap = np.ascontiguousarray(self.region_map, dtype=np.int32)
        if rmap.shape != (self.ny, self.nx):
            raise ValueError("region_map shape must be (ny, nx)")
        if rmap.min() < 0 or rmap.max() >= len(self.region_names):
            raise ValueError("region_map labels outside region_names")
        object.__setattr__(self, "region_map", rmap)
        for name in self.region_names:
            if name not in self.regions:
                raise ValueError(f"no parameters for region {name!r}")
        if self.heart_rate_hz <= 0:
            raise ValueError("heart_rate_hz must be positive")
        if self.tau_ratio < 1:
            raise ValueError("tau_ratio must be >= 1")
        if "tissue" in self.regions:
            tissue_r = self.regions["tissue"].reflectivity
            for name, params in self.regions.items():
                if "absorber" in name and not params.reflectivity < tissue_r:
                    raise ValueError(
                        "absorber reflectivity must be strictly below tissue"
                    )

    def region_mask(self, name: str) -> RoiMask:
        label = self.region_names.index(name)
        return RoiMask(mask=self.region_map == label)

    def _per_pixel(self, getter) -> np.ndarray:
        table = np.array(
            [getter(self.regions[name]) for name in self.region_names]
        )
        return table[self.region_map]

    @property
    def reflectivity_map(self) -> np.ndarray:
        return self._per_pixel(lambda p: p.reflectivity)

    @property
    def tau_c0_map(self) -> np.ndarray:
        return self._per_pixel(lambda p: p.tau_c_s)


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """Everything needed to predict the statistics of a generated stack."""

    scene: SceneSpec
    sample_rate_hz: float
    t_s: np.ndarray
    cardiac: np.ndarray
    bulk_phase: np.ndarray
    reflectivity_map: np.ndarray
    tau_c0_map: np.ndarray

    def region_mask(self, name: str) -> RoiMask:
        return self.scene.region_mask(name)

    def tau_c_at(self, name: str, pulse_level: float) -> float:
        """Decorrelation time of a region at cardiac level p in [0, 1].

        Full systole (p = 1, pulsatility 1) divides tau_c by tau_ratio.
        """
        params = self.scene.regions[name]
        return params.tau_c_s / (
            1.0 + params.pulsatility * pulse_level * (self.scene.tau_ratio - 1.0)
        )

    def ar_coefficient(self, name: str, pulse_level: float = 0.0) -> float:
        return float(
            np.exp(-1.0 / (self.sample_rate_hz * self.tau_c_at(name, pulse_level)))
        )

    def analytic_dpsd(
        self, name: str, nbins: int, pulse_level: float = 0.0
    ) -> np.ndarray:
        """Expected unit-power spectrum of one pixel of a region.

        Measured window spectra approach ``reflectivity^2 * S + noise power
        per bin`` as the window grows.
        """
        a = self.ar_coefficient(name, pulse_level)
        return ar1_spectrum(a, nbins)

    def noise_power_per_bin(self) -> float:
        snr = self.scene.noise_snr_db
        if snr is None:
            return 0.0
        return float(np.mean(self.reflectivity_map**2) * 10.0 ** (-snr / 10.0))


def ar1_spectrum(a: float, nbins: int) -> np.ndarray:
    """Two-sided spectrum of a unit-variance AR(1) process at the DFT bins:
    S[k] = (1 - a^2) / |1 - a exp(-2 pi i k / N)|^2. The frozen-speckle limit
    a = 1 concentrates all power in bin 0."""
    if not (0 <= a <= 1):
        raise ValueError("AR coefficient must lie in [0, 1]")
    if a == 1.0:
        out = np.zeros(nbins)
        out[0] = nbins
        return out
    omega = 2 * np.pi * np.arange(nbins) / nbins
    return (1 - a * a) / (1 - 2 * a * np.cos(omega) + a * a)


def _region_ar_tables(
    scene: SceneSpec, sample_rate_hz: float, nt: int
) -> np.ndarray:
    """a_n per (time, region), following the pulsatile decorrelation time."""
    t = np.arange(nt) / sample_rate_hz
    tables = np.empty((nt, len(scene.region_names)))
    dt = 1.0 / sample_rate_hz
    for j, name in enumerate(scene.region_names):
        params = scene.regions[name]
        if params.pulsatility == 0.0:
            tau = np.full(nt, params.tau_c_s)
        else:
            p = waveform_at_phase(
                t * scene.heart_rate_hz - params.phase_lag_cycles
            )
            tau = params.tau_c_s / (
                1.0 + params.pulsatility * p * (scene.tau_ratio - 1.0)
            )
        tables[:, j] = np.exp(-dt / tau)
    return tables


def _pixel_generator(seed: int, pixel_index: int) -> np.random.Generator:
    key = np.array([seed, pixel_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def gen_field_stack(
    scene: SceneSpec, sample_rate_hz: float, nt: int
) -> tuple[HologramStack, GroundTruth]:
    """Generate a hologram stack plus its ground truth.

    Per pixel: h[n] = r(x, y) * g[n] * exp(i phi(n)) + noise, with g a
    unit-variance complex Gaussian AR(1) process driven at variance
    (1 - a_n^2) so |g| stays unit-variance even while tau_c is modulated.
    """
    if nt < 1:
        raise ValueError("nt must be >= 1")
    if sample_rate_hz <= 0:
        raise ValueError("sample_rate_hz must be positive")
    t = np.arange(nt) / sample_rate_hz
    pulse = cardiac_waveform(scene.heart_rate_hz, t)
    bulk_phase = scene.bulk.phase(t)
    a_tables = _region_ar_tables(scene, sample_rate_hz, nt)
    drive = np.sqrt(1.0 - a_tables**2)

    npx = scene.ny * scene.nx
    labels = scene.region_map.ravel()
    reflectivity = scene.reflectivity_map.ravel()
    noise_var = 0.0
    if scene.noise_snr_db is not None:
        noise_var = float(
            np.mean(reflectivity**2) * 10.0 ** (-scene.noise_snr_db / 10.0)
        )
    phase_factor = np.exp(1j * bulk_phase).astype(np.complex128)

    out = np.empty((nt, npx), dtype=np.complex64)
    for start in range(0, npx, _PIXEL_CHUNK):
        stop = min(start + _PIXEL_CHUNK, npx)
        width = stop - start
        rows = np.empty((width, nt), dtype=np.complex128)
        noise_rows = (
            np.empty((width, nt), dtype=np.complex128) if noise_var else None
        )
        for j in range(width):
            rng = _pixel_generator(scene.seed, start + j)
            d = rng.standard_normal((nt, 2))
            rows[j] = d.view(np.complex128)[:, 0]
            if noise_rows is not None:
                d = rng.standard_normal((nt, 2))
                noise_rows[j] = d.view(np.complex128)[:, 0]
        rows *= 1.0 / np.sqrt(2.0)
        white = np.ascontiguousarray(rows.T)
        # complex copies keep the recursion ufuncs on the unbuffered fast path
        a = a_tables[:, labels[start:stop]].astype(np.complex128)
        s = drive[:, labels[start:stop]].astype(np.complex128)
        g = np.empty_like(white)
        g[0] = white[0]
        state = g[0]
        tmp = np.empty(width, dtype=np.complex128)
        for n in range(1, nt):
            row = g[n]
            np.multiply(state, a[n], out=row)
            np.multiply(white[n], s[n], out=tmp)
            row += tmp
            state = row
        block = g
        block *= reflectivity[start:stop][None, :]
        block *= phase_factor[:, None]
        if noise_rows is not None:
            noise_rows *= np.sqrt(noise_var / 2.0)
            block += noise_rows.T
        out[:, start:stop] = block

    meta = StackMeta(
        nx=scene.nx,
        ny=scene.ny,
        nt=nt,
        sample_rate_hz=sample_rate_hz,
        exposure_s=1.0 / sample_rate_hz,  # full-frame integration
        wavelength_m=scene.wavelength_m,
        pixel_pitch_m=scene.pixel_pitch_m,
        origin_tag="simulated",
    )
    stack = HologramStack(meta=meta, field=out.reshape(nt, scene.ny, scene.nx))
    truth = GroundTruth(
        scene=scene,
        sample_rate_hz=sample_rate_hz,
        t_s=t,
        cardiac=pulse,
        bulk_phase=bulk_phase,
        reflectivity_map=scene.reflectivity_map,
        tau_c0_map=scene.tau_c0_map,
    )
    return stack, truth


def integrate_decimate(stack: HologramStack, factor: int) -> HologramStack:
    """Average consecutive frame blocks, emulating longer camera exposure at
    a lower frame rate (boxcar integration: the Dirichlet/sinc response)."""
    if factor < 1:
        raise ValueError("factor must be >= 1")
    meta = stack.meta
    if meta.nt % factor != 0:
        raise ValueError(f"factor {factor} does not divide nt={meta.nt}")
    if factor == 1:
        return HologramStack(meta=meta, field=stack.field.copy())
    blocks = stack.field.reshape(meta.nt // factor, factor, meta.ny, meta.nx)
    averaged = blocks.astype(np.complex128).mean(axis=1)
    new_meta = StackMeta(
        nx=meta.nx,
        ny=meta.ny,
        nt=meta.nt // factor,
        sample_rate_hz=meta.sample_rate_hz / factor,
        exposure_s=meta.exposure_s * factor,
        wavelength_m=meta.wavelength_m,
        pixel_pitch_m=meta.pixel_pitch_m,
        origin_tag=meta.origin_tag,
    )
    return HologramStack(meta=new_meta, field=averaged)


def render_interferograms(
    stack: HologramStack, carrier: CarrierSpec, ref_amplitude: float
) -> FrameStack:
    """Interfere the object field with a tilted plane reference beam.

    frame = |O + R|^2 with R = ref_amplitude * exp(2 pi i (kx x + ky y)).
    The conjugate-free object term lands on the *mirrored* carrier, so
    demodulate at ``carrier.mirrored()`` to recover the field itself.
    """
    if ref_amplitude <= 0:
        raise ValueError("ref_amplitude must be positive")
    meta = stack.meta
    yy = np.arange(meta.ny)[:, None]
    xx = np.arange(meta.nx)[None, :]
    ref = ref_amplitude * np.exp(
        2j * np.pi * (carrier.kx_cyc_per_px * xx + carrier.ky_cyc_per_px * yy)
    )
    out = np.empty(meta.shape, dtype=np.float32)
    for start in range(0, meta.nt, 256):
        stop = min(start + 256, meta.nt)
        total = stack.field[start:stop].astype(np.complex128) + ref[None]
        out[start:stop] = (total.real**2 + total.imag**2).astype(np.float32)
    return FrameStack(meta=meta, samples=out)


# -- canonical desk-scale scenes ------------------------------------------

TAU_ARTERY_S = 1.0 / (2 * np.pi * 16e3)  # ~10 us: fast flow, ~16 kHz linewidth
TAU_VEIN_S = 1.0 / (2 * np.pi * 8e3)  # ~20 us: slower flow
TAU_TISSUE_S = 1.0 / (2 * np.pi * 3e3)  # ~53 us: perfused background
ARTERY_ROWS = (12, 20)
VEIN_ROWS = (36, 44)
STATIC_ROWS = (24, 32)
ABSORBER_RECT = (52, 62, 8, 24)  # y0, y1, x0, x1


def default_scene(
    nx: int = 64,
    ny: int = 64,
    seed: int = 0,
    heart_rate_hz: float = 31.25,
    tau_ratio: float = 3.0,
    noise_snr_db: float | None = 30.0,
    bulk: BulkMotionSpec = BulkMotionSpec(),
    include_absorber: bool = True,
    include_static: bool = False,
    absorber_reflectivity: float = 0.25,
) -> SceneSpec:
    """Desk-scale scene: artery and vein bands over perfused tissue, plus an
    optional strongly absorbing patch and an optional frozen-speckle band."""
    names = ["tissue", "artery", "vein"]
    regions = {
        "tissue": RegionParams(tau_c_s=TAU_TISSUE_S, pulsatility=0.05),
        "artery": RegionParams(tau_c_s=TAU_ARTERY_S, pulsatility=0.8),
        "vein": RegionParams(
            tau_c_s=TAU_VEIN_S, pulsatility=0.3, phase_lag_cycles=0.05
        ),
    }
    rmap = np.zeros((ny, nx), dtype=np.int32)
    rmap[slice(*ARTERY_ROWS)] = 1
    rmap[slice(*VEIN_ROWS)] = 2
    if include_static:
        names.append("static")
        regions["static"] = RegionParams(tau_c_s=np.inf, pulsatility=0.0)
        rmap[slice(*STATIC_ROWS)] = names.index("static")
    if include_absorber:
        names.append("absorber")
        regions["absorber"] = RegionParams(
            tau_c_s=TAU_TISSUE_S,
            pulsatility=0.05,
            reflectivity=absorber_reflectivity,
        )
        y0, y1, x0, x1 = ABSORBER_RECT
        rmap[y0:y1, x0:x1] = names.index("absorber")
    return SceneSpec(
        nx=nx,
        ny=ny,
        region_map=rmap,
        region_names=tuple(names),
        regions=regions,
        heart_rate_hz=heart_rate_hz,
        tau_ratio=tau_ratio,
        bulk=bulk,
        noise_snr_db=noise_snr_db,
        seed=seed,
    )


def uniform_scene(
    nx: int = 64,
    ny: int = 64,
    tau_c_s: float = TAU_TISSUE_S,
    pulsatility: float = 0.0,
    heart_rate_hz: float = 31.25,
    noise_snr_db: float | None = None,
    seed: int = 0,
    reflectivity: float = 1.0,
) -> SceneSpec:
    """Single-region scene, the cleanest target for spectral oracles."""
    return SceneSpec(
        nx=nx,
        ny=ny,
        region_map=np.zeros((ny, nx), dtype=np.int32),
        region_names=("tissue",),
        regions={
            "tissue": RegionParams(
                tau_c_s=tau_c_s, pulsatility=pulsatility, reflectivity=reflectivity
            )
        },
        heart_rate_hz=heart_rate_hz,
        noise_snr_db=noise_snr_db,
        seed=seed,
    )


# -- scene configuration files and ground-truth sidecars -------------------


def _parse_rect(text: str, key: str) -> tuple[int, int, int, int]:
    try:
        ys, xs = (part.strip() for part in text.split(","))
        y0, y1 = (int(v) for v in ys.split(":"))
        x0, x1 = (int(v) for v in xs.split(":"))
    except ValueError as exc:
        raise ValueError(f"bad rect for {key}: {text!r} (want y0:y1, x0:x1)") from exc
    return y0, y1, x0, x1


def load_scene_config(path) -> tuple[SceneSpec, float, int]:
    """Parse a plain-text scene file into (scene, sample_rate_hz, nt).

    Sections: ``[scene]`` global parameters, ``[acquisition]`` sample rate
    and frame count, optional ``[bulk]``, and one ``[region.<name>]`` per
    region. Exactly one region carries no ``rect`` and becomes the
    background. ``tau_c_us = inf`` freezes a region's speckle.
    """
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise OSError(f"cannot read scene config {path}")

    def get(section, key, conv, default=None, required=False):
        if not parser.has_option(section, key):
            if required:
                raise ValueError(f"missing {key} in [{section}]")
            return default
        raw = parser.get(section, key)
        try:
            return conv(raw)
        except ValueError as exc:
            raise ValueError(f"bad value for {key} in [{section}]: {raw!r}") from exc

    nx = get("scene", "nx", int, required=True)
    ny = get("scene", "ny", int, required=True)
    seed = get("scene", "seed", int, 0)
    heart = get("scene", "heart_rate_hz", float, 31.25)
    tau_ratio = get("scene", "tau_ratio", float, 3.0)
    snr_raw = get("scene", "noise_snr_db", str, "30")
    noise_snr = None if snr_raw.strip().lower() == "none" else float(snr_raw)
    wavelength = get("scene", "wavelength_m", float, 785e-9)
    pitch = get("scene", "pixel_pitch_m", float, 5.6e-6)
    sample_rate = get("acquisition", "sample_rate_hz", float, required=True)
    nt = get("acquisition", "nt", int, required=True)

    bulk = BulkMotionSpec()
    if parser.has_section("bulk"):
        harmonics = ()
        if parser.has_option("bulk", "harmonics"):
            harmonics = tuple(
                float(v) for v in parser.get("bulk", "harmonics").split(",") if v.strip()
            )
        bulk = BulkMotionSpec(
            amplitude_rad=get("bulk", "amplitude_rad", float, 0.0),
            frequency_hz=get("bulk", "frequency_hz", float, 0.0),
            harmonic_amps=harmonics,
        )

    names: list[str] = []
    regions: dict[str, RegionParams] = {}
    rects: dict[str, tuple[int, int, int, int] | None] = {}
    for section in parser.sections():
        if not section.startswith("region."):
            continue
        name = section.split(".", 1)[1]
        tau_raw = get(section, "tau_c_us", str, required=True)
        tau_us = np.inf if tau_raw.strip().lower() == "inf" else float(tau_raw)
        beta = get(section, "pulsatility", float, 0.0)
        try:
            params = RegionParams(
                tau_c_s=tau_us * 1e-6 if np.isfinite(tau_us) else np.inf,
                pulsatility=beta,
                phase_lag_cycles=get(section, "phase_lag_cycles", float, 0.0),
                reflectivity=get(section, "reflectivity", float, 1.0),
            )
        except ValueError as exc:
            raise ValueError(f"[{section}] {exc}") from exc
        names.append(name)
        regions[name] = params
        rects[name] = (
            _parse_rect(parser.get(section, "rect"), f"[{section}] rect")
            if parser.has_option(section, "rect")
            else None
        )

    backgrounds = [n for n in names if rects[n] is None]
    if len(backgrounds) != 1:
        raise ValueError(
            "exactly one [region.*] section must omit rect (the background); "
            f"got {backgrounds or 'none'}"
        )
    ordered = [backgrounds[0]] + [n for n in names if rects[n] is not None]
    rmap = np.zeros((ny, nx), dtype=np.int32)
    for label, name in enumerate(ordered[1:], start=1):
        y0, y1, x0, x1 = rects[name]
        if not (0 <= y0 < y1 <= ny and 0 <= x0 < x1 <= nx):
            raise ValueError(f"rect for region {name!r} outside the field")
        rmap[y0:y1, x0:x1] = label
    scene = SceneSpec(
        nx=nx,
        ny=ny,
        region_map=rmap,
        region_names=tuple(ordered),
        regions=regions,
        heart_rate_hz=heart,
        tau_ratio=tau_ratio,
        bulk=bulk,
        noise_snr_db=noise_snr,
        seed=seed,
        wavelength_m=wavelength,
        pixel_pitch_m=pitch,
    )
    return scene, sample_rate, nt


def write_ground_truth(truth: GroundTruth, directory, prefix: str = "ground_truth"):
    """JSON sidecar plus raw float32 maps and waveforms."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    scene = truth.scene
    files = {}
    for name, arr in [
        ("reflectivity", truth.reflectivity_map),
        ("tau_c0_s", truth.tau_c0_map),
        ("cardiac", truth.cardiac),
        ("bulk_phase_rad", truth.bulk_phase),
    ]:
        path = directory / f"{prefix}_{name}.f32"
        path.write_bytes(np.asarray(arr, dtype="<f4").tobytes())
        files[name] = {"file": path.name, "shape": list(np.shape(arr))}
    label_path = directory / f"{prefix}_region_map.u8"
    label_path.write_bytes(scene.region_map.astype(np.uint8).tobytes())
    files["region_map"] = {
        "file": label_path.name,
        "shape": [scene.ny, scene.nx],
        "labels": list(scene.region_names),
    }
    doc = {
        "sample_rate_hz": truth.sample_rate_hz,
        "nt": len(truth.t_s),
        "heart_rate_hz": scene.heart_rate_hz,
        "tau_ratio": scene.tau_ratio,
        "noise_snr_db": scene.noise_snr_db,
        "seed": scene.seed,
        "bulk": {
            "amplitude_rad": scene.bulk.amplitude_rad,
            "frequency_hz": scene.bulk.frequency_hz,
            "harmonic_amps": list(scene.bulk.harmonic_amps),
        },
        "regions": {
            name: {
                "tau_c_s": None if not np.isfinite(p.tau_c_s) else p.tau_c_s,
                "pulsatility": p.pulsatility,
                "phase_lag_cycles": p.phase_lag_cycles,
                "reflectivity": p.reflectivity,
            }
            for name, p in scene.regions.items()
        },
        "arrays": files,
    }
    json_path = directory / f"{prefix}.json"
    json_path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return json_path
