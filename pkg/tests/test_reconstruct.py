import numpy as np
import pytest

from rcldh.core import FrameStack, StackMeta
from rcldh.reconstruct import (
    CarrierSpec,
    angular_spectrum_propagate,
    demodulate_offaxis,
    reconstruct_stack,
)

CARRIER = CarrierSpec(0.25, 0.25, 0.125)
WAVELENGTH = 785e-9
PITCH = 5.6e-6


def carrier_cosine(ny, nx, kx, ky):
    y, x = np.mgrid[0:ny, 0:nx]
    return 1.0 + np.cos(2 * np.pi * (kx * x + ky * y))


class TestDemodulate:
    def test_zero_frame_gives_zero_field(self):
        out = demodulate_offaxis(np.zeros((16, 16)), CARRIER)
        assert np.allclose(out, 0)

    def test_cosine_carrier_yields_half_amplitude(self):
        frame = carrier_cosine(64, 64, 0.25, 0.25)
        out = demodulate_offaxis(frame, CARRIER)
        assert np.all(np.abs(np.abs(out) - 0.5) < 1e-6)

    def test_dc_is_rejected(self):
        out = demodulate_offaxis(np.full((32, 32), 7.0), CARRIER)
        assert np.max(np.abs(out)) < 1e-9 * 7.0

    def test_linearity(self):
        rng = np.random.default_rng(0)
        f = rng.standard_normal((32, 32))
        g = rng.standard_normal((32, 32))
        lhs = demodulate_offaxis(2.0 * f + 3.0 * g, CARRIER)
        rhs = 2.0 * demodulate_offaxis(f, CARRIER) + 3.0 * demodulate_offaxis(g, CARRIER)
        assert np.allclose(lhs, rhs, atol=1e-12)

    def test_window_clipped_by_nyquist_square(self):
        with pytest.raises(ValueError, match="carrier window out of range"):
            CarrierSpec(0.45, 0.0, 0.1)


class TestPropagate:
    def test_zero_distance_is_identity(self):
        rng = np.random.default_rng(1)
        field = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        out = angular_spectrum_propagate(field, 0.0, WAVELENGTH, PITCH)
        assert np.array_equal(out, field.astype(np.complex128))

    def test_plane_wave_gains_global_phase(self):
        field = np.full((32, 32), 1.5 + 0.5j)
        z = 1e-3
        out = angular_spectrum_propagate(field, z, WAVELENGTH, PITCH)
        expected = field * np.exp(1j * 2 * np.pi * z / WAVELENGTH)
        assert np.allclose(out, expected, rtol=1e-9)
        assert np.allclose(np.abs(out), np.abs(field), rtol=1e-9)

    def test_energy_conserved_without_evanescent_content(self):
        rng = np.random.default_rng(2)
        field = rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32))
        out = angular_spectrum_propagate(field, 2e-3, WAVELENGTH, PITCH)
        e_in = np.sum(np.abs(field) ** 2)
        e_out = np.sum(np.abs(out) ** 2)
        assert abs(e_out - e_in) < 1e-6 * e_in

    def test_forward_backward_roundtrip(self):
        rng = np.random.default_rng(3)
        field = rng.standard_normal((24, 24)) + 1j * rng.standard_normal((24, 24))
        z = 5e-4
        back = angular_spectrum_propagate(
            angular_spectrum_propagate(field, z, WAVELENGTH, PITCH),
            -z,
            WAVELENGTH,
            PITCH,
        )
        assert np.max(np.abs(back - field)) < 1e-6 * np.max(np.abs(field))

    def test_evanescent_components_are_dropped(self):
        # pitch far below half the wavelength puts the spectrum corners
        # beyond the propagating circle
        rng = np.random.default_rng(4)
        field = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        out = angular_spectrum_propagate(field, 1e-6, 785e-9, 5e-8)
        assert np.sum(np.abs(out) ** 2) < np.sum(np.abs(field) ** 2)


class TestReconstructStack:
    def make_stack(self, frames, fs=1000.0):
        nt, ny, nx = frames.shape
        meta = StackMeta(nx, ny, nt, fs, 1.0 / fs, WAVELENGTH, PITCH)
        return FrameStack(meta=meta, samples=frames)

    def test_zero_stack(self):
        stack = self.make_stack(np.zeros((3, 16, 16)))
        holo = reconstruct_stack(stack, CARRIER, 1e-3)
        assert np.allclose(holo.field, 0)
        assert holo.meta == stack.meta

    def test_zero_distance_equals_demodulation(self):
        frames = np.stack([carrier_cosine(32, 32, 0.25, 0.25)] * 2)
        stack = self.make_stack(frames)
        holo = reconstruct_stack(stack, CARRIER, 0.0)
        direct = demodulate_offaxis(frames[0], CARRIER)
        assert np.allclose(holo.field[0], direct.astype(np.complex64), atol=1e-6)

    def test_defocused_scene_modulus_tracks_reflectivity(self):
        # synthetic speckle scene rendered off-focus: reconstructing at the
        # opposite distance recovers an image whose time-averaged modulus
        # follows the reflectivity map
        from rcldh.core import HologramStack
        from rcldh.simulator import (
            gen_field_stack,
            render_interferograms,
            uniform_scene,
        )

        nt, n = 192, 64
        scene = uniform_scene(nx=n, ny=n, tau_c_s=1e-4, noise_snr_db=None, seed=9)
        speckle, _ = gen_field_stack(scene, 1000.0, nt)
        y, x = np.mgrid[0:n, 0:n]
        reflectivity = 0.6 + 0.4 * np.sin(2 * np.pi * x / 32) * np.sin(2 * np.pi * y / 32)
        focused = HologramStack(
            meta=speckle.meta, field=speckle.field * reflectivity[None]
        )
        z = 1e-3
        defocused = np.stack(
            [
                angular_spectrum_propagate(f, z, WAVELENGTH, PITCH)
                for f in focused.field
            ]
        )
        interferograms = render_interferograms(
            HologramStack(meta=focused.meta, field=defocused),
            CARRIER,
            ref_amplitude=20.0,
        )
        recon = reconstruct_stack(interferograms, CARRIER.mirrored(), -z)
        mean_modulus = np.abs(recon.field.astype(np.complex128)).mean(axis=0)
        r = np.corrcoef(mean_modulus.ravel(), reflectivity.ravel())[0, 1]
        assert r > 0.95
