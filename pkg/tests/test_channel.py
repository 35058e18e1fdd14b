"""Channel-draw distribution, determinism and independence tests."""

import math
from types import SimpleNamespace

import numpy as np
import pytest
from scipy import stats

from compnoma.channel import CHUNK, ChannelSampler, draw_channel, gain
from compnoma.geometry import ScenarioConfig, Topology, build_topology


def unit_variance_topology():
    """Single-cell hand topology with every link at distance 1."""
    return Topology(bs_xy=np.zeros((1, 2)), ccu_xy=np.zeros((1, 2)),
                    ceu_xy=np.zeros((1, 2)), d_ccu=np.ones((1, 1)),
                    d_ceu=np.ones((1, 1)), cell_radius=1.0, bs_height=0.01)


def unit_config(sigma_eps=0.0):
    return SimpleNamespace(pathloss_exp=2.5, sigma_eps=sigma_eps,
                           sigma_eps_cap=0.5, master_seed=9)


class TestGain:
    def test_values(self):
        assert gain(1.0 + 0.0j) == 1.0
        assert gain(0.0j) == 0.0
        assert gain(3.0 + 4.0j) == pytest.approx(25.0)

    def test_array(self):
        out = gain(np.array([1.0 + 1.0j, 2.0j]))
        assert out == pytest.approx([2.0, 4.0])


class TestDeterminism:
    def test_same_trial_seed_identical(self):
        cfg = ScenarioConfig(n_cells=3, m_comp=3)
        topo = build_topology(cfg, 1)
        r1 = draw_channel(topo, cfg, trial_seed=77)
        r2 = draw_channel(topo, cfg, trial_seed=77)
        assert np.array_equal(r1.h_ccu, r2.h_ccu)
        assert np.array_equal(r1.h_ceu, r2.h_ceu)

    def test_different_trials_differ(self):
        cfg = ScenarioConfig(n_cells=3, m_comp=3)
        topo = build_topology(cfg, 1)
        sampler = ChannelSampler(topo, cfg)
        assert not np.array_equal(sampler.draw(0).h_ccu, sampler.draw(1).h_ccu)

    def test_block_equals_stacked_single_draws(self):
        cfg = ScenarioConfig(n_cells=2, m_comp=2)
        topo = build_topology(cfg, 4)
        sampler = ChannelSampler(topo, cfg)
        # straddle a chunk boundary on purpose
        start, count = CHUNK - 3, 7
        block_c, block_e = sampler.draw_block(start, count)
        for i in range(count):
            single = sampler.draw(start + i)
            assert np.array_equal(block_c[i], single.h_ccu)
            assert np.array_equal(block_e[i], single.h_ceu)

    def test_gains_chunk_matches_block(self):
        cfg = ScenarioConfig(n_cells=2, m_comp=2)
        topo = build_topology(cfg, 4)
        sampler = ChannelSampler(topo, cfg)
        g_ccu, g_ceu = sampler.gains_chunk(0, limit=5)
        block_c, block_e = sampler.draw_block(0, 5)
        assert g_ccu == pytest.approx(gain(block_c))
        assert g_ceu == pytest.approx(gain(block_e))


class TestDistribution:
    def test_unit_variance_mean_gain(self):
        sampler = ChannelSampler(unit_variance_topology(), unit_config(), master_seed=3)
        h, _ = sampler.draw_block(0, 1_000_000)
        mean = gain(h).mean()
        assert abs(mean - 1.0) < 0.005

    def test_mean_gain_tracks_sigma_hat_per_link(self):
        cfg = ScenarioConfig(n_cells=2, m_comp=2, sigma_eps=0.005)
        topo = build_topology(cfg, 11)
        sampler = ChannelSampler(topo, cfg, master_seed=8)
        h_ccu, h_ceu = sampler.draw_block(0, 1_000_000)
        for g, sh in ((gain(h_ccu), sampler.link_vars.sigma_hat_ccu),
                      (gain(h_ceu), sampler.link_vars.sigma_hat_ceu)):
            rel = np.abs(g.mean(axis=0) / sh - 1.0)
            assert rel.max() < 0.01

    def test_gain_is_exponential(self):
        sampler = ChannelSampler(unit_variance_topology(), unit_config(), master_seed=5)
        h, _ = sampler.draw_block(0, 100_000)
        g = gain(h).ravel()
        result = stats.kstest(g, "expon", args=(0.0, 1.0))
        assert result.pvalue > 0.01

    def test_real_and_imag_parts_gaussian(self):
        sampler = ChannelSampler(unit_variance_topology(), unit_config(), master_seed=6)
        h, _ = sampler.draw_block(0, 100_000)
        for part in (h.real.ravel(), h.imag.ravel()):
            result = stats.kstest(part, "norm", args=(0.0, math.sqrt(0.5)))
            assert result.pvalue > 0.01

    def test_links_independent(self):
        cfg = ScenarioConfig(n_cells=3, m_comp=3, sigma_eps=0.0)
        topo = build_topology(cfg, 2)
        sampler = ChannelSampler(topo, cfg, master_seed=12)
        h_ccu, h_ceu = sampler.draw_block(0, 100_000)
        g = gain(h_ccu).reshape(100_000, -1)
        picks = [(0, 1), (0, 4), (3, 8), (2, 7)]
        for a, b in picks:
            corr = np.corrcoef(g[:, a], g[:, b])[0, 1]
            assert abs(corr) < 0.01
        cross = np.corrcoef(gain(h_ccu[:, 0, 0]), gain(h_ceu[:, 0, 0]))[0, 1]
        assert abs(cross) < 0.01

    def test_finite(self):
        cfg = ScenarioConfig()
        topo = build_topology(cfg, 1)
        r = draw_channel(topo, cfg, trial_seed=1)
        assert np.all(np.isfinite(r.h_ccu)) and np.all(np.isfinite(r.h_ceu))
        assert r.h_ccu.shape == (12, 12)
