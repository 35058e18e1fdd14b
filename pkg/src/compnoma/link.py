"""Per-realization SINRs, rates and spatial-modulation error probabilities.

Index conventions follow the system model: CCU j and CEU k are 1-based
with 1 <= j, k <= M. CEU 1 is the jointly-served (CoMP) user; CEU 2 is
the coordinated-SM user fed by BS 1 and BS 2; CEUs 3..M are plain SM
users fed by their own BS. Block helpers carry a leading trial axis and
are what the Monte Carlo harness actually runs.
"""

import math
from dataclasses import dataclass

import numpy as np

from .channel import gain
from .errors import NumericalDomainError
from .specfun import q_func


@dataclass(frozen=True)
class UserRates:
    """Rates of the 2M served users for one trial (or trial average).

    ceu_rates[0] is CEU 1. For the proposed scheme ceu_rates[1:] are the
    SM users; for the NOMA baseline they are the per-cell directly
    decoded CEUs.
    """

    ccu_rates: np.ndarray
    ceu_rates: np.ndarray

    @property
    def comp_ceu_rate(self):
        return float(self.ceu_rates[0])

    @property
    def sm_rates(self):
        return self.ceu_rates[1:]

    @property
    def noma_part(self):
        return float(self.ccu_rates.sum() + self.ceu_rates[0])

    @property
    def sm_part(self):
        return float(self.ceu_rates[1:].sum())

    def total(self):
        return float(self.ccu_rates.sum() + self.ceu_rates.sum())


def rate(sinr):
    """Shannon rate log2(1 + sinr) in bits/s/Hz."""
    if np.any(np.asarray(sinr) < 0.0):
        raise NumericalDomainError("SINR must be >= 0")
    return np.log2(1.0 + sinr)


def sm_bits_cosm(config):
    """Index-bit budget of the coordinated SM user: floor(log2(T_X1 + T_X2))."""
    return float(math.floor(math.log2(2 * config.antennas_per_bs)))


def sm_bits_noncosm(config):
    """Index-bit budget of a single-BS SM user: floor(log2(T_Xk))."""
    return float(math.floor(math.log2(config.antennas_per_bs)))


# --- instantaneous (per-realization) forms ---------------------------------

def sinr_ccu(realization, j, config):
    """SINR of CCU j under imperfect CSI and imperfect SIC.

    Desired power is alpha*rho*|h_jj|^2; the denominator collects
    alpha-weighted interference from the other coordinated BSs,
    full-power interference from non-coordinated BSs, the accumulated
    estimation-error power, the residual SIC term rho*gamma, and noise.
    """
    m = config.m_comp
    if not 1 <= j <= m:
        raise NumericalDomainError(f"CCU index must satisfy 1 <= j <= {m}, got {j}")
    g = gain(realization.h_ccu[:, j - 1])
    jj = j - 1
    rho, alpha = config.rho, config.alpha
    num = alpha * rho * g[jj]
    den = (alpha * rho * (g[:m].sum() - g[jj])
           + rho * g[m:].sum()
           + rho * realization.link_vars.eps_sum_ccu[jj]
           + rho * config.gamma + 1.0)
    return float(num / den)


def sinr_comp_ceu(realization, config):
    """SINR of the jointly-served CEU (k = 1); no SIC residual term."""
    m = config.m_comp
    g = gain(realization.h_ceu[:, 0])
    rho, alpha = config.rho, config.alpha
    s = g[:m].sum()
    num = config.beta * rho * s
    den = (alpha * rho * s + rho * g[m:].sum()
           + rho * realization.link_vars.eps_sum_ceu[0] + 1.0)
    return float(num / den)


def inst_pe_cosm(delta1, delta2):
    """Instantaneous index-bit error probability of the coordinated SM user.

    Each coordinating link contributes Q(sqrt(delta)); the two links are
    equally likely to carry the bit, so the average is taken.
    """
    if delta1 < 0.0 or delta2 < 0.0:
        raise NumericalDomainError("SNRs must be >= 0")
    return float(0.5 * (q_func(math.sqrt(delta1)) + q_func(math.sqrt(delta2))))


def inst_pe_noncosm(delta):
    """Instantaneous index-bit error probability of a single-BS SM user."""
    if delta < 0.0:
        raise NumericalDomainError("SNR must be >= 0")
    return float(q_func(math.sqrt(delta)))


def sm_rate(pe, k, config):
    """SM rate (1 - pe) times the index-bit budget of SM user k (2 <= k <= M)."""
    if not 0.0 <= pe <= 1.0:
        raise NumericalDomainError("pe must be a probability")
    if not 2 <= k <= config.m_comp:
        raise NumericalDomainError(
            f"SM user index must satisfy 2 <= k <= {config.m_comp}, got {k}")
    bits = sm_bits_cosm(config) if k == 2 else sm_bits_noncosm(config)
    return (1.0 - pe) * bits


def trial_rates(realization, topology, config):
    """All per-user rates of the proposed scheme for one realization."""
    g_ccu = gain(realization.h_ccu)[None, :, :]
    g_ceu = gain(realization.h_ceu)[None, :, :]
    ccu, ceu = proposed_rates_block(g_ccu, g_ceu, realization.link_vars, config)
    return UserRates(ccu_rates=ccu[0], ceu_rates=ceu[0])


def noma_baseline_rates(realization, topology, config):
    """Per-user rates of the uncoordinated per-cell NOMA baseline."""
    g_ccu = gain(realization.h_ccu)[None, :, :]
    g_ceu = gain(realization.h_ceu)[None, :, :]
    ccu, ceu = baseline_rates_block(g_ccu, g_ceu, realization.link_vars, config)
    return UserRates(ccu_rates=ccu[0], ceu_rates=ceu[0])


# --- vectorized blocks (leading trial axis) ---------------------------------

def proposed_rates_block(g_ccu, g_ceu, link_vars, config):
    """Proposed-scheme rates for a block of trials.

    g_ccu, g_ceu: squared-magnitude gains, shape (B, N, N).
    Returns (ccu_rates, ceu_rates) with shapes (B, M) and (B, M).
    """
    m = config.m_comp
    rho, alpha, beta, gam = config.rho, config.alpha, config.beta, config.gamma
    b = g_ccu.shape[0]
    ccu = np.empty((b, m))
    ceu = np.empty((b, m))

    for j in range(m):
        col = g_ccu[:, :, j]
        num = alpha * rho * col[:, j]
        den = (alpha * rho * (col[:, :m].sum(axis=1) - col[:, j])
               + rho * col[:, m:].sum(axis=1)
               + rho * link_vars.eps_sum_ccu[j] + rho * gam + 1.0)
        ccu[:, j] = np.log2(1.0 + num / den)

    col = g_ceu[:, :, 0]
    s = col[:, :m].sum(axis=1)
    num = beta * rho * s
    den = alpha * rho * s + rho * col[:, m:].sum(axis=1) + rho * link_vars.eps_sum_ceu[0] + 1.0
    ceu[:, 0] = np.log2(1.0 + num / den)

    pe2 = 0.5 * (q_func(np.sqrt(rho * g_ceu[:, 0, 1])) + q_func(np.sqrt(rho * g_ceu[:, 1, 1])))
    ceu[:, 1] = (1.0 - pe2) * sm_bits_cosm(config)
    bits_k = sm_bits_noncosm(config)
    for k0 in range(2, m):
        pe = q_func(np.sqrt(rho * g_ceu[:, k0, k0]))
        ceu[:, k0] = (1.0 - pe) * bits_k

    return ccu, ceu


def baseline_rates_block(g_ccu, g_ceu, link_vars, config):
    """Baseline rates for a block of trials: no coordination anywhere.

    Every other cell interferes at full power; each CEU decodes directly
    against its own cell's alpha-power CCU signal.
    """
    m = config.m_comp
    rho, alpha, beta, gam = config.rho, config.alpha, config.beta, config.gamma
    b = g_ccu.shape[0]
    ccu = np.empty((b, m))
    ceu = np.empty((b, m))

    for j in range(m):
        col = g_ccu[:, :, j]
        num = alpha * rho * col[:, j]
        den = (rho * (col.sum(axis=1) - col[:, j])
               + rho * link_vars.eps_sum_ccu[j] + rho * gam + 1.0)
        ccu[:, j] = np.log2(1.0 + num / den)

    for k0 in range(m):
        col = g_ceu[:, :, k0]
        num = beta * rho * col[:, k0]
        den = (alpha * rho * col[:, k0]
               + rho * (col.sum(axis=1) - col[:, k0])
               + rho * link_vars.eps_sum_ceu[k0] + 1.0)
        ceu[:, k0] = np.log2(1.0 + num / den)

    return ccu, ceu
