import numpy as np
import pytest

from rcldh.svdfilter import SvdFilterSpec, cutoff_to_rank, svd_clutter_filter


class TestCutoffToRank:
    def test_paper_regime(self):
        assert cutoff_to_rank(200.0, 67000.0, 512) == 3

    def test_low_rate_regime(self):
        assert cutoff_to_rank(200.0, 8000.0, 512) == 26

    def test_zero_cutoff_clamps_to_one(self):
        assert cutoff_to_rank(0.0, 64000.0, 512) == 1
        assert cutoff_to_rank(0.0, 8000.0, 64) == 1

    def test_upper_clamp_protects_signal_subspace(self):
        assert cutoff_to_rank(3999.0, 8000.0, 64) == 16

    def test_cutoff_must_be_below_nyquist(self):
        with pytest.raises(ValueError):
            cutoff_to_rank(4000.0, 8000.0, 64)


def random_window(nt=32, ny=6, nx=6, seed=0):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((nt, ny, nx)) + 1j * rng.standard_normal((nt, ny, nx))


class TestClutterFilter:
    def test_rank_zero_is_identity(self):
        w = random_window()
        out = svd_clutter_filter(w, SvdFilterSpec(rank_override=0), 1000.0)
        assert np.array_equal(out, w)

    def test_rank_one_window_is_annihilated(self):
        rng = np.random.default_rng(1)
        spatial = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        temporal = np.exp(1j * np.linspace(0, 3, 32)) * (1 + 0.3 * np.sin(np.linspace(0, 7, 32)))
        w = temporal[:, None, None] * spatial[None]
        out = svd_clutter_filter(w, SvdFilterSpec(rank_override=1), 1000.0)
        assert np.sum(np.abs(out) ** 2) < 1e-10 * np.sum(np.abs(w) ** 2)

    def test_filtered_plus_rejected_is_original(self):
        w = random_window(seed=2)
        for k in (1, 3, 7):
            out = svd_clutter_filter(w, SvdFilterSpec(rank_override=k), 1000.0)
            rejected = w - out
            assert np.allclose(out + rejected, w, rtol=1e-6)
            # rejected part has numerical rank <= k
            mat = rejected.reshape(32, -1)
            sv = np.linalg.svd(mat, compute_uv=False)
            assert sv[k] < 1e-9 * sv[0]

    def test_energy_strictly_decreasing_in_k(self):
        w = random_window(seed=3)
        energies = []
        for k in (0, 1, 2, 4, 8):
            out = svd_clutter_filter(w, SvdFilterSpec(rank_override=k), 1000.0)
            energies.append(np.sum(np.abs(out) ** 2))
        assert all(b < a for a, b in zip(energies, energies[1:]))
        assert energies[0] <= np.sum(np.abs(w) ** 2)

    def test_commutes_with_amplitude_scaling(self):
        w = random_window(seed=4)
        spec = SvdFilterSpec(rank_override=2)
        out1 = svd_clutter_filter(3.5 * w, spec, 1000.0)
        out2 = 3.5 * svd_clutter_filter(w, spec, 1000.0)
        assert np.allclose(out1, out2, rtol=1e-9)

    def test_matches_full_svd_reference(self):
        w = random_window(nt=16, ny=5, nx=4, seed=5)
        k = 3
        out = svd_clutter_filter(w, SvdFilterSpec(rank_override=k), 1000.0)
        a = w.reshape(16, -1).T
        u, s, vh = np.linalg.svd(a, full_matrices=False)
        s[:k] = 0.0
        ref = (u @ np.diag(s) @ vh).T.reshape(w.shape)
        assert np.allclose(out, ref, atol=1e-9 * np.abs(s).max())

    def test_rank_override_must_stay_below_window(self):
        w = random_window()
        with pytest.raises(ValueError):
            svd_clutter_filter(w, SvdFilterSpec(rank_override=32), 1000.0)
