import numpy as np
import pytest
from scipy.signal import argrelmax

from rcldh.core import Band, StackMeta
from rcldh.doppler import power_doppler
from rcldh.reconstruct import CarrierSpec, demodulate_offaxis
from rcldh.simulator import (
    BulkMotionSpec,
    RegionParams,
    SceneSpec,
    ar1_spectrum,
    cardiac_waveform,
    default_scene,
    gen_field_stack,
    integrate_decimate,
    render_interferograms,
    uniform_scene,
)
from rcldh.stft import StftPlan, dpsd, make_windows


class TestCardiacWaveform:
    def test_periodicity(self):
        hr = 1.3
        t = np.linspace(0, 2.0, 777)
        assert np.allclose(
            cardiac_waveform(hr, t), cardiac_waveform(hr, t + 1.0 / hr), atol=1e-9
        )

    def test_range_over_one_period(self):
        t = np.arange(100000) / 100000.0
        p = cardiac_waveform(1.0, t)
        assert p.min() == pytest.approx(0.0, abs=1e-6)
        assert p.max() == pytest.approx(1.0, abs=1e-6)

    def test_exactly_two_local_maxima_per_cycle(self):
        t = np.arange(1000) / 1000.0
        p = cardiac_waveform(1.0, t)
        peaks = argrelmax(p, mode="wrap")[0]
        assert len(peaks) == 2
        # secondary (dicrotic) bump near phase 0.45 at about a quarter height
        heights = sorted(p[peaks])
        assert 0.2 < heights[0] < 0.3
        assert abs(t[peaks[np.argsort(p[peaks])[0]]] - 0.45) < 0.02


class TestSceneValidation:
    def test_bad_pulsatility_named(self):
        with pytest.raises(ValueError, match="pulsatility"):
            RegionParams(tau_c_s=1e-4, pulsatility=1.2)

    def test_absorber_must_be_darker_than_tissue(self):
        scene = default_scene()
        with pytest.raises(ValueError, match="absorber"):
            SceneSpec(
                nx=scene.nx,
                ny=scene.ny,
                region_map=scene.region_map,
                region_names=scene.region_names,
                regions={
                    **scene.regions,
                    "absorber": RegionParams(tau_c_s=1e-4, reflectivity=1.5),
                },
                heart_rate_hz=scene.heart_rate_hz,
            )


class TestGenFieldStack:
    def test_frozen_speckle_is_constant(self):
        scene = uniform_scene(nx=8, ny=8, tau_c_s=np.inf, noise_snr_db=None)
        stack, _ = gen_field_stack(scene, 1000.0, 64)
        assert np.allclose(stack.field, stack.field[0][None], atol=1e-6)
        assert not np.allclose(stack.field[0], 0)

    def test_fast_decorrelation_kills_lag1(self):
        # dt/tau ~ 5 -> lag-1 autocorrelation indistinguishable from zero
        scene = uniform_scene(nx=32, ny=32, tau_c_s=2e-4, noise_snr_db=None, seed=3)
        stack, _ = gen_field_stack(scene, 1000.0, 128)
        x = stack.field.reshape(128, -1).astype(np.complex128)
        num = np.sum(x[1:] * np.conj(x[:-1])).real
        den = np.sum(np.abs(x[:-1]) ** 2)
        assert abs(num / den) < 0.02

    def test_lag1_matches_ar_coefficient(self):
        tau = 1.0 / (1000.0 * -np.log(0.9))  # a = 0.9
        scene = uniform_scene(nx=32, ny=32, tau_c_s=tau, noise_snr_db=None, seed=4)
        stack, truth = gen_field_stack(scene, 1000.0, 128)
        assert truth.ar_coefficient("tissue") == pytest.approx(0.9, abs=1e-12)
        x = stack.field.reshape(128, -1).astype(np.complex128)
        lag1 = np.sum(x[1:] * np.conj(x[:-1])).real / np.sum(np.abs(x[:-1]) ** 2)
        assert lag1 == pytest.approx(0.9, abs=0.01)

    def test_deterministic_given_seed(self):
        scene = default_scene(nx=16, ny=16, seed=11)
        s1, _ = gen_field_stack(scene, 64000.0, 64)
        s2, _ = gen_field_stack(scene, 64000.0, 64)
        assert np.array_equal(s1.field, s2.field)

    def test_different_seeds_differ(self):
        s1, _ = gen_field_stack(default_scene(nx=8, ny=8, seed=0), 64000.0, 32)
        s2, _ = gen_field_stack(default_scene(nx=8, ny=8, seed=1), 64000.0, 32)
        assert not np.array_equal(s1.field, s2.field)

    def test_equal_reflectivity_regions_share_full_band_power(self):
        # the energy-conservation premise: different decorrelation times,
        # same total power
        scene = default_scene(nx=32, ny=64, seed=5, include_absorber=False)
        stack, truth = gen_field_stack(scene, 64000.0, 1024)
        power = (np.abs(stack.field.astype(np.complex128)) ** 2).mean(axis=0)
        means = {
            name: power[truth.region_mask(name).mask].mean()
            for name in ("tissue", "artery", "vein")
        }
        base = means["tissue"]
        for value in means.values():
            assert abs(value - base) < 0.02 * base

    def test_bulk_phase_invisible_to_full_band(self):
        fs, nt = 16000.0, 512
        quiet = uniform_scene(nx=8, ny=8, tau_c_s=20e-3, noise_snr_db=None, seed=6)
        moving = SceneSpec(
            nx=8,
            ny=8,
            region_map=quiet.region_map,
            region_names=quiet.region_names,
            regions=quiet.regions,
            heart_rate_hz=quiet.heart_rate_hz,
            bulk=BulkMotionSpec(amplitude_rad=2.0, frequency_hz=300.0),
            noise_snr_db=None,
            seed=6,
        )
        band_full = Band(0.0, fs / 2)
        band_low = Band(100.0, 1000.0)
        movies = {}
        for tag, scene in [("quiet", quiet), ("moving", moving)]:
            stack, _ = gen_field_stack(scene, fs, nt)
            cube = dpsd(stack.field, fs)
            movies[tag] = {
                "full": power_doppler([cube], band_full).frames,
                "low": power_doppler([cube], band_low).frames,
            }
        # modulus-preserving phase: full band unchanged
        assert np.allclose(
            movies["quiet"]["full"], movies["moving"]["full"], rtol=1e-6
        )
        # but the unfiltered low band is badly corrupted
        low_quiet = movies["quiet"]["low"].mean()
        low_moving = movies["moving"]["low"].mean()
        assert low_moving > 5 * low_quiet


class TestIntegrateDecimate:
    def make_tone(self, f, fs=64000.0, nt=64, ny=2, nx=2):
        t = np.arange(nt) / fs
        tone = np.exp(2j * np.pi * f * t)
        field = np.broadcast_to(tone[:, None, None], (nt, ny, nx))
        meta = StackMeta(nx, ny, nt, fs, 1.0 / fs, 785e-9, 5.6e-6)
        from rcldh.core import HologramStack

        return HologramStack(meta=meta, field=field)

    def test_factor_one_is_identity(self):
        stack = self.make_tone(1000.0)
        out = integrate_decimate(stack, 1)
        assert np.array_equal(out.field, stack.field)
        assert out.meta == stack.meta

    def test_constant_stack_unchanged(self):
        stack = self.make_tone(0.0)
        out = integrate_decimate(stack, 8)
        assert np.allclose(out.field, 1.0, atol=1e-6)
        assert out.meta.sample_rate_hz == stack.meta.sample_rate_hz / 8
        assert out.meta.exposure_s == pytest.approx(stack.meta.exposure_s * 8)

    def test_dirichlet_attenuation_of_pure_tone(self):
        fs, d = 64000.0, 8
        f = 0.3 * fs
        stack = self.make_tone(f, fs=fs, nt=512)
        out = integrate_decimate(stack, d)
        expected = abs(
            np.sin(np.pi * f * d / fs) / (d * np.sin(np.pi * f / fs))
        )
        measured = np.abs(out.field.astype(np.complex128)).mean()
        assert measured == pytest.approx(expected, abs=1e-6)

    def test_non_divisor_rejected(self):
        stack = self.make_tone(100.0, nt=64)
        with pytest.raises(ValueError, match="does not divide"):
            integrate_decimate(stack, 7)


class TestRenderInterferograms:
    CARRIER = CarrierSpec(0.25, 0.25, 0.2)

    def test_zero_object_gives_reference_power(self):
        scene = uniform_scene(nx=16, ny=16, reflectivity=0.0, noise_snr_db=None)
        stack, _ = gen_field_stack(scene, 1000.0, 4)
        frames = render_interferograms(stack, self.CARRIER, ref_amplitude=2.0)
        assert np.allclose(frames.samples, 4.0, atol=1e-5)

    def test_output_non_negative(self):
        scene = uniform_scene(nx=16, ny=16, tau_c_s=1e-3, noise_snr_db=None, seed=7)
        stack, _ = gen_field_stack(scene, 1000.0, 8)
        frames = render_interferograms(stack, self.CARRIER, ref_amplitude=1.0)
        assert frames.samples.min() >= 0

    def test_demodulation_recovers_field_at_mirrored_carrier(self):
        # band-limit the object spatially so the carrier separates the orders
        from rcldh.core import HologramStack

        scene = uniform_scene(nx=64, ny=64, tau_c_s=1e-3, noise_snr_db=None, seed=8)
        raw, _ = gen_field_stack(scene, 1000.0, 2)
        f = np.fft.fftfreq(64)
        keep = (np.abs(f[:, None]) <= 0.08) & (np.abs(f[None, :]) <= 0.08)
        smooth = np.fft.ifft2(np.fft.fft2(raw.field, axes=(1, 2)) * keep, axes=(1, 2))
        stack = HologramStack(meta=raw.meta, field=smooth)
        amp = 20.0  # strong reference keeps |O|^2 self-interference negligible
        frames = render_interferograms(stack, self.CARRIER, ref_amplitude=amp)
        recovered = demodulate_offaxis(frames.samples[0], self.CARRIER.mirrored())
        target = amp * stack.field[0].astype(np.complex128)
        corr = np.corrcoef(
            np.concatenate([recovered.real.ravel(), recovered.imag.ravel()]),
            np.concatenate([target.real.ravel(), target.imag.ravel()]),
        )[0, 1]
        assert corr > 0.99


class TestAnalyticSpectrum:
    def test_unit_power(self):
        # exact discrete identity carries an a**N wrap-around correction
        s = ar1_spectrum(0.7, 64)
        assert s.sum() / 64 == pytest.approx(1.0, rel=1e-6)

    def test_frozen_limit(self):
        s = ar1_spectrum(1.0, 16)
        assert s[0] == 16 and np.all(s[1:] == 0)
