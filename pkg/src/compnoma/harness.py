"""Monte Carlo engine, parameter sweeps, scheme comparison, degradation study.

Simulated runs average the per-trial user rates over independent channel
realizations on a fixed topology (or over several redrawn topologies).
Work is split into fixed-size chunks whose results are reduced in index
order, so reports are bit-identical for any thread count. The env var
COMPNOMA_THREADS caps the worker count (default: all cores).
"""

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import analytic, link
from .channel import CHUNK, ChannelSampler
from .errors import ConfigError
from .geometry import ScenarioConfig, build_topology

SCHEMES = ("proposed", "noma_baseline")
MODES = ("simulated", "exact_full", "exact_paper_literal")
SWEEP_PARAMETERS = ("rho_db", "n_cells", "gamma_db", "sigma_eps")


def db_to_linear(x_db):
    return 10.0 ** (x_db / 10.0)


def max_workers():
    env = os.environ.get("COMPNOMA_THREADS", "").strip()
    if env:
        try:
            w = int(env)
        except ValueError as exc:
            raise ConfigError(f"COMPNOMA_THREADS must be an integer, got {env!r}") from exc
        if w < 1:
            raise ConfigError("COMPNOMA_THREADS must be >= 1")
        return w
    return os.cpu_count() or 1


def _derive_seed(master_seed, *key):
    ss = np.random.SeedSequence(master_seed, spawn_key=key)
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class CapacityReport:
    """Per-user mean rates and ergodic sum capacity for one scenario run."""

    scheme: str
    mode: str
    config: ScenarioConfig
    user_roles: tuple
    user_indices: tuple
    user_means: np.ndarray
    user_stderrs: np.ndarray
    esc_mean: float
    esc_stderr: float
    trials_used: int
    wall_time: float
    param_name: str = ""
    param_value: float | None = None


def _user_layout(scheme, m):
    if scheme == "proposed":
        roles = ("ccu",) * m + ("comp_ceu",) + ("sm_ceu",) * (m - 1)
        indices = tuple(range(1, m + 1)) + tuple(range(1, m + 1))
    else:
        roles = ("ccu",) * m + ("noma_ceu",) * m
        indices = tuple(range(1, m + 1)) + tuple(range(1, m + 1))
    return roles, indices


def _topology_runs(config):
    """(topology_seed, channel_seed) pairs for the configured averaging scope."""
    if config.topology_redraws == 0:
        return [(config.master_seed, _derive_seed(config.master_seed, 1))]
    return [(_derive_seed(config.master_seed, 2, t), _derive_seed(config.master_seed, 1, t))
            for t in range(config.topology_redraws)]


def _simulate(config, scheme):
    block_fn = (link.proposed_rates_block if scheme == "proposed"
                else link.baseline_rates_block)
    m = config.m_comp
    n_users = 2 * m
    runs = _topology_runs(config)
    n_chunks = math.ceil(config.trials / CHUNK)
    jobs = []
    for topo_seed, chan_seed in runs:
        topology = build_topology(config, topo_seed)
        sampler = ChannelSampler(topology, config, master_seed=chan_seed)
        for c in range(n_chunks):
            limit = min(CHUNK, config.trials - c * CHUNK)
            jobs.append((sampler, c, limit))

    sums = np.zeros((len(jobs), n_users))
    sumsqs = np.zeros((len(jobs), n_users))
    esc_sums = np.zeros(len(jobs))
    esc_sumsqs = np.zeros(len(jobs))

    def run_job(idx):
        sampler, c, limit = jobs[idx]
        g_ccu, g_ceu = sampler.gains_chunk(c, limit=limit)
        ccu, ceu = block_fn(g_ccu, g_ceu, sampler.link_vars, config)
        rates = np.concatenate([ccu, ceu], axis=1)
        totals = rates.sum(axis=1)
        sums[idx] = rates.sum(axis=0)
        sumsqs[idx] = (rates * rates).sum(axis=0)
        esc_sums[idx] = totals.sum()
        esc_sumsqs[idx] = (totals * totals).sum()

    workers = min(max_workers(), len(jobs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run_job, range(len(jobs))))
    else:
        for idx in range(len(jobs)):
            run_job(idx)

    total = config.trials * len(runs)
    user_means = sums.sum(axis=0) / total
    esc_mean = float(user_means.sum())
    if total > 1:
        user_var = (sumsqs.sum(axis=0) - total * user_means ** 2) / (total - 1)
        user_stderrs = np.sqrt(np.maximum(user_var, 0.0) / total)
        esc_var = (esc_sumsqs.sum() - total * (esc_sums.sum() / total) ** 2) / (total - 1)
        esc_stderr = float(math.sqrt(max(esc_var, 0.0) / total))
    else:
        user_stderrs = np.zeros(n_users)
        esc_stderr = 0.0
    return user_means, user_stderrs, esc_mean, esc_stderr, total


def _exact(config, mode):
    analytic_mode = "full" if mode == "exact_full" else "paper_literal"
    runs = _topology_runs(config)
    per_topo = []
    for topo_seed, _ in runs:
        topology = build_topology(config, topo_seed)
        cap = analytic.esc_exact(topology, config, mode=analytic_mode)
        per_topo.append(np.concatenate([cap.ccu, [cap.comp_ceu], cap.sm]))
    stacked = np.vstack(per_topo)
    user_means = stacked.mean(axis=0)
    if len(runs) > 1:
        user_stderrs = stacked.std(axis=0, ddof=1) / math.sqrt(len(runs))
        esc_stderr = float(stacked.sum(axis=1).std(ddof=1) / math.sqrt(len(runs)))
    else:
        user_stderrs = np.zeros_like(user_means)
        esc_stderr = 0.0
    return user_means, user_stderrs, float(user_means.sum()), esc_stderr


def run_scenario(config, scheme="proposed", mode="simulated"):
    """Evaluate one scenario and return a CapacityReport.

    Simulated mode draws the topology once from the master seed and
    averages the per-trial rates; exact modes evaluate the closed forms.
    The baseline scheme has no closed form and only supports simulation.
    """
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}")
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}")
    if scheme == "noma_baseline" and mode != "simulated":
        raise ConfigError("the NOMA baseline is simulation-only")

    t0 = time.perf_counter()
    if mode == "simulated":
        user_means, user_stderrs, esc_mean, esc_stderr, trials_used = _simulate(config, scheme)
    else:
        user_means, user_stderrs, esc_mean, esc_stderr = _exact(config, mode)
        trials_used = 0
    wall = time.perf_counter() - t0
    roles, indices = _user_layout(scheme, config.m_comp)
    return CapacityReport(
        scheme=scheme, mode=mode, config=config,
        user_roles=roles, user_indices=indices,
        user_means=user_means, user_stderrs=user_stderrs,
        esc_mean=esc_mean, esc_stderr=esc_stderr,
        trials_used=trials_used, wall_time=wall)


def _apply_parameter(config, parameter, value):
    if parameter == "rho_db":
        return replace(config, rho=db_to_linear(value))
    if parameter == "n_cells":
        iv = int(value)
        if iv != value:
            raise ConfigError(f"n_cells sweep values must be integers, got {value}")
        return replace(config, n_cells=iv)
    if parameter == "gamma_db":
        return replace(config, gamma=db_to_linear(value))
    if parameter == "sigma_eps":
        if value < 0:
            raise ConfigError("sigma_eps must be >= 0")
        return replace(config, sigma_eps=float(value))
    raise ConfigError(f"unknown sweep parameter {parameter!r}")


def sweep(config, parameter, values, scheme="proposed", mode="simulated"):
    """One CapacityReport per parameter value, all sharing the master seed."""
    if parameter not in SWEEP_PARAMETERS:
        raise ConfigError(f"unknown sweep parameter {parameter!r}")
    reports = []
    for value in values:
        cfg = _apply_parameter(config, parameter, value)
        report = run_scenario(cfg, scheme=scheme, mode=mode)
        reports.append(replace(report, param_name=parameter, param_value=float(value)))
    return reports


@dataclass(frozen=True)
class ComparisonRow:
    label: str
    proposed_mean: float
    baseline_mean: float
    delta_pct: float


@dataclass(frozen=True)
class SchemeComparison:
    rows: tuple
    proposed: CapacityReport
    baseline: CapacityReport


def compare_schemes(config):
    """Proposed vs baseline per-user and ESC means with percentage deltas.

    Both schemes are simulated with the same seeds, hence identical
    channel draws; deltas are (proposed - baseline) / baseline.
    """
    rp = run_scenario(config, scheme="proposed", mode="simulated")
    rb = run_scenario(config, scheme="noma_baseline", mode="simulated")
    m = config.m_comp
    rows = []
    for j in range(m):
        p, b = rp.user_means[j], rb.user_means[j]
        rows.append(ComparisonRow(f"ccu_{j + 1}", float(p), float(b),
                                  100.0 * (p - b) / b))
    for k in range(m):
        p, b = rp.user_means[m + k], rb.user_means[m + k]
        role = "comp_ceu" if k == 0 else "sm_ceu"
        rows.append(ComparisonRow(f"{role}_{k + 1}", float(p), float(b),
                                  100.0 * (p - b) / b))
    rows.append(ComparisonRow("esc", rp.esc_mean, rb.esc_mean,
                              100.0 * (rp.esc_mean - rb.esc_mean) / rb.esc_mean))
    return SchemeComparison(rows=tuple(rows), proposed=rp, baseline=rb)


@dataclass(frozen=True)
class DegradationRow:
    axis: str
    level: float
    esc: float
    esc_perfect: float
    degradation_pct: float  # positive = capacity loss vs the perfect reference


DEFAULT_DEGRADATION_LEVELS = {
    "gamma": (db_to_linear(-15.0), db_to_linear(-25.0)),
    "sigma_eps": (0.01, 0.02),
}


def degradation_study(config, axis, levels=None, mode="exact_full"):
    """ESC loss vs the perfect reference (gamma = 0, sigma_eps = 0).

    Each level impairs only the requested axis; the other impairment is
    held at its perfect value so the two effects are isolated.
    """
    if axis not in ("gamma", "sigma_eps"):
        raise ConfigError(f"unknown degradation axis {axis!r}")
    if levels is None:
        levels = DEFAULT_DEGRADATION_LEVELS[axis]
    perfect_cfg = replace(config, gamma=0.0, sigma_eps=0.0)
    esc_perfect = run_scenario(perfect_cfg, scheme="proposed", mode=mode).esc_mean
    rows = []
    for level in levels:
        impaired = replace(perfect_cfg, **{axis: float(level)})
        esc = run_scenario(impaired, scheme="proposed", mode=mode).esc_mean
        rows.append(DegradationRow(axis=axis, level=float(level), esc=esc,
                                   esc_perfect=esc_perfect,
                                   degradation_pct=100.0 * (1.0 - esc / esc_perfect)))
    return rows
