"""Per-realization SINR, rate and SM error-probability tests."""

import math
from types import SimpleNamespace

import numpy as np
import pytest

from compnoma.channel import ChannelRealization, ChannelSampler, draw_channel
from compnoma.errors import NumericalDomainError
from compnoma.geometry import ScenarioConfig, build_topology
from compnoma.link import (baseline_rates_block, inst_pe_cosm, inst_pe_noncosm,
                           noma_baseline_rates, proposed_rates_block, rate,
                           sinr_ccu, sinr_comp_ceu, sm_rate, trial_rates)
from compnoma.specfun import q_func


def hand_realization(g_ccu, g_ceu, eps_sum_ccu, eps_sum_ceu, sigma_eps=0.0):
    """Realization with prescribed squared gains (real amplitudes)."""
    lv = SimpleNamespace(eps_sum_ccu=np.asarray(eps_sum_ccu, dtype=float),
                         eps_sum_ceu=np.asarray(eps_sum_ceu, dtype=float))
    return ChannelRealization(h_ccu=np.sqrt(np.asarray(g_ccu, dtype=complex)),
                              h_ceu=np.sqrt(np.asarray(g_ceu, dtype=complex)),
                              sigma_eps=sigma_eps, link_vars=lv)


def hand_config(**kw):
    base = dict(m_comp=2, alpha=0.1, beta=0.9, rho=10.0, gamma=0.0,
                antennas_per_bs=2)
    base.update(kw)
    return SimpleNamespace(**base)


class TestRate:
    def test_values(self):
        assert rate(0.0) == 0.0
        assert rate(1.0) == pytest.approx(1.0)
        assert rate(3.0) == pytest.approx(2.0)

    def test_rejects_negative(self):
        with pytest.raises(NumericalDomainError):
            rate(-0.5)


class TestSinrCcu:
    def test_degenerate_single_cell(self):
        # no ICI, perfect CSI and SIC: tau = alpha * rho * g
        cfg = hand_config(m_comp=1)
        r = hand_realization([[1.0]], [[1.0]], [0.0], [0.0])
        assert sinr_ccu(r, 1, cfg) == pytest.approx(1.0)

    def test_hand_two_cell_case(self):
        # independently recomputed: 1 / (0.5 + 0.2 + 10**-1.5 + 1)
        cfg = hand_config(gamma=10.0 ** -2.5)
        r = hand_realization([[1.0, 0.0], [0.5, 0.0]], np.zeros((2, 2)),
                             [0.02, 0.02], [0.0, 0.0])
        expected = (0.1 * 10.0 * 1.0) / (0.1 * 10.0 * 0.5 + 10.0 * 0.02
                                         + 10.0 * 10.0 ** -2.5 + 1.0)
        assert expected == pytest.approx(0.577492686, rel=1e-8)
        assert sinr_ccu(r, 1, cfg) == pytest.approx(expected, rel=1e-12)

    def test_huge_residual_sic_kills_sinr(self):
        cfg = hand_config(m_comp=1, gamma=1e12)
        r = hand_realization([[1.0]], [[1.0]], [0.0], [0.0])
        assert sinr_ccu(r, 1, cfg) < 1e-10

    def test_index_out_of_range(self):
        cfg = hand_config()
        r = hand_realization(np.ones((2, 2)), np.ones((2, 2)), [0.0, 0.0], [0.0, 0.0])
        with pytest.raises(NumericalDomainError):
            sinr_ccu(r, 3, cfg)

    def test_monotonicity(self):
        # nondecreasing in desired gain, nonincreasing in gamma
        cfg = hand_config(gamma=0.01)
        base = np.array([[1.0, 0.0], [0.5, 0.0]])
        r1 = hand_realization(base, np.zeros((2, 2)), [0.02, 0.02], [0.0, 0.0])
        stronger = base.copy(); stronger[0, 0] = 2.0
        r2 = hand_realization(stronger, np.zeros((2, 2)), [0.02, 0.02], [0.0, 0.0])
        assert sinr_ccu(r2, 1, cfg) > sinr_ccu(r1, 1, cfg)
        cfg_hi_gamma = hand_config(gamma=0.1)
        assert sinr_ccu(r1, 1, cfg_hi_gamma) < sinr_ccu(r1, 1, cfg)

    def test_ceiling(self):
        cfg = ScenarioConfig(n_cells=4, m_comp=3, trials=10)
        topo = build_topology(cfg, 9)
        sampler = ChannelSampler(topo, cfg)
        for t in range(64):
            r = sampler.draw(t)
            for j in (1, 2, 3):
                tau = sinr_ccu(r, j, cfg)
                g_jj = abs(r.h_ccu[j - 1, j - 1]) ** 2
                bound = cfg.alpha * cfg.rho * g_jj / (cfg.rho * cfg.gamma + 1.0)
                assert tau <= bound * (1.0 + 1e-12)


class TestSinrCompCeu:
    def test_hand_two_cell_case(self):
        # gains {1, 0.5}, rho=10, alpha=0.1: 13.5 / (1.5 + 0.2 + 1) = 5.0
        cfg = hand_config()
        r = hand_realization(np.zeros((2, 2)), [[1.0, 0.0], [0.5, 0.0]],
                             [0.0, 0.0], [0.02, 0.0])
        assert sinr_comp_ceu(r, cfg) == pytest.approx(5.0, rel=1e-12)

    def test_zero_power(self):
        cfg = hand_config(rho=0.0)
        r = hand_realization(np.zeros((2, 2)), np.ones((2, 2)), [0.0, 0.0], [0.0, 0.0])
        assert sinr_comp_ceu(r, cfg) == 0.0

    def test_saturates_below_beta_over_alpha(self):
        # equal gains, no outer cells, perfect CSI: tau -> beta/alpha = 9 as rho grows
        cfg = hand_config(rho=1e9)
        r = hand_realization(np.zeros((2, 2)), [[1.0, 0.0], [1.0, 0.0]],
                             [0.0, 0.0], [0.0, 0.0])
        tau = sinr_comp_ceu(r, cfg)
        assert tau < 9.0
        assert tau == pytest.approx(9.0, rel=1e-6)

    def test_ceiling_over_random_draws(self):
        cfg = ScenarioConfig(n_cells=4, m_comp=3, trials=10)
        topo = build_topology(cfg, 10)
        sampler = ChannelSampler(topo, cfg)
        bound = cfg.beta / cfg.alpha
        for t in range(128):
            assert sinr_comp_ceu(sampler.draw(t), cfg) < bound


class TestInstPe:
    def test_zero_snr_coin_flip(self):
        assert inst_pe_cosm(0.0, 0.0) == pytest.approx(0.5)
        assert inst_pe_noncosm(0.0) == pytest.approx(0.5)

    def test_infinite_snr(self):
        assert inst_pe_cosm(1e12, 1e12) < 1e-12
        assert inst_pe_noncosm(1e12) < 1e-12

    def test_unit_snr(self):
        assert inst_pe_noncosm(1.0) == pytest.approx(float(q_func(1.0)), rel=1e-12)
        assert inst_pe_cosm(1.0, 1.0) == pytest.approx(float(q_func(1.0)), rel=1e-12)

    def test_never_above_half(self):
        for d1 in (0.0, 0.1, 1.0, 10.0):
            for d2 in (0.0, 0.5, 5.0):
                assert 0.0 <= inst_pe_cosm(d1, d2) <= 0.5


class TestSmRate:
    def test_bit_budgets(self):
        cfg = hand_config(m_comp=3)
        assert sm_rate(0.0, 2, cfg) == pytest.approx(2.0)
        assert sm_rate(0.0, 3, cfg) == pytest.approx(1.0)

    def test_half_error(self):
        cfg = hand_config(m_comp=3)
        assert sm_rate(0.5, 3, cfg) == pytest.approx(0.5)

    def test_budget_reached_only_at_zero_pe(self):
        cfg = hand_config(m_comp=3)
        assert sm_rate(1e-9, 2, cfg) < 2.0

    def test_cosm_advantage_with_equal_pe(self):
        cfg = hand_config(m_comp=3)
        for pe in (0.0, 0.05, 0.3):
            assert sm_rate(pe, 2, cfg) - sm_rate(pe, 3, cfg) == pytest.approx(1.0 - pe)

    def test_index_range(self):
        cfg = hand_config(m_comp=3)
        with pytest.raises(NumericalDomainError):
            sm_rate(0.1, 1, cfg)
        with pytest.raises(NumericalDomainError):
            sm_rate(0.1, 4, cfg)


class TestTrialRates:
    def test_assembly_shape(self):
        cfg = ScenarioConfig(n_cells=12, m_comp=3, trials=10)
        topo = build_topology(cfg, 1)
        r = draw_channel(topo, cfg, trial_seed=0)
        ur = trial_rates(r, topo, cfg)
        assert ur.ccu_rates.shape == (3,)
        assert ur.ceu_rates.shape == (3,)
        assert ur.sm_rates.shape == (2,)
        assert np.all(ur.ccu_rates >= 0.0)
        assert ur.sm_rates[0] <= 2.0 and ur.sm_rates[1] <= 1.0

    def test_zero_gains(self):
        cfg = hand_config(m_comp=3, gamma=10.0 ** -2.5)
        r = hand_realization(np.zeros((3, 3)), np.zeros((3, 3)),
                             np.zeros(3), np.zeros(3))
        ur = trial_rates(r, None, cfg)
        assert ur.ccu_rates == pytest.approx(np.zeros(3))
        assert ur.comp_ceu_rate == 0.0
        # Pe = 0.5 at zero SNR, so SM rates are half the bit budgets
        assert ur.sm_rates == pytest.approx([1.0, 0.5])

    def test_total_additivity(self):
        cfg = ScenarioConfig(n_cells=6, m_comp=3, trials=10)
        topo = build_topology(cfg, 2)
        for t in range(16):
            ur = trial_rates(draw_channel(topo, cfg, trial_seed=t), topo, cfg)
            assert ur.total() == pytest.approx(ur.noma_part + ur.sm_part, abs=1e-12)


class TestNomaBaseline:
    def test_single_cell_hand_case(self):
        # perfect CSI/SIC, unit gain, rho = 10:
        # CCU: alpha*rho/(0 + 1) = 1 -> 1 bit; CEU: 9/(1 + 1) = 4.5 -> log2(5.5)
        cfg = hand_config(m_comp=1)
        r = hand_realization([[1.0]], [[1.0]], [0.0], [0.0])
        ur = noma_baseline_rates(r, None, cfg)
        assert ur.ccu_rates[0] == pytest.approx(1.0, rel=1e-12)
        assert ur.ceu_rates[0] == pytest.approx(math.log2(1.0 + 4.5), rel=1e-12)

    def test_zero_power(self):
        cfg = hand_config(m_comp=2, rho=0.0)
        r = hand_realization(np.ones((2, 2)), np.ones((2, 2)),
                             np.zeros(2), np.zeros(2))
        ur = noma_baseline_rates(r, None, cfg)
        assert ur.total() == 0.0

    def test_full_power_interference_hurts_more_than_comp(self):
        # same draws: baseline CCU sees full-power in-cluster interference,
        # the proposed scheme only the alpha-weighted share
        cfg = ScenarioConfig(n_cells=6, m_comp=3, trials=10)
        topo = build_topology(cfg, 3)
        sampler = ChannelSampler(topo, cfg)
        g_ccu, g_ceu = sampler.gains_chunk(0, limit=256)
        pc, _ = proposed_rates_block(g_ccu, g_ceu, sampler.link_vars, cfg)
        bc, _ = baseline_rates_block(g_ccu, g_ceu, sampler.link_vars, cfg)
        assert np.all(pc >= bc)


class TestBlockMatchesScalarPath:
    def test_proposed_block_vs_trial_rates(self):
        cfg = ScenarioConfig(n_cells=5, m_comp=3, trials=10)
        topo = build_topology(cfg, 8)
        sampler = ChannelSampler(topo, cfg)
        g_ccu, g_ceu = sampler.gains_chunk(0, limit=8)
        ccu, ceu = proposed_rates_block(g_ccu, g_ceu, sampler.link_vars, cfg)
        for t in range(8):
            ur = trial_rates(sampler.draw(t), topo, cfg)
            assert ccu[t] == pytest.approx(ur.ccu_rates, rel=1e-12)
            assert ceu[t] == pytest.approx(ur.ceu_rates, rel=1e-12)

    def test_scalar_ops_consistent_with_block(self):
        cfg = ScenarioConfig(n_cells=5, m_comp=3, trials=10)
        topo = build_topology(cfg, 8)
        sampler = ChannelSampler(topo, cfg)
        r = sampler.draw(3)
        ur = trial_rates(r, topo, cfg)
        assert ur.ccu_rates[0] == pytest.approx(rate(sinr_ccu(r, 1, cfg)), rel=1e-12)
        assert ur.comp_ceu_rate == pytest.approx(rate(sinr_comp_ceu(r, cfg)), rel=1e-12)
