"""Multi-cell downlink capacity simulator and analytical validator.

Models a coordinated-multipoint NOMA downlink in which the coordinated
cell-edge user is jointly served by all cooperating base stations and
the remaining cell-edge users ride on spatial-modulation antenna
indices. Per-user capacities and the ergodic sum capacity come from
Monte Carlo simulation and from closed-form hypoexponential /
exponential-integral expressions, under imperfect SIC and imperfect CSI.
"""

from .analytic import (ExactCapacity, RateVector, ccu_exact, ceu_exact,
                       esc_exact, hypoexp_pdf, log_expectation,
                       pe_cosm_exact, pe_noncosm_exact, rates_ccu, rates_ceu)
from .channel import ChannelRealization, ChannelSampler, draw_channel, gain
from .errors import ConfigError, NumericalDomainError
from .geometry import (LinkVariances, ScenarioConfig, Topology, build_topology,
                       distance_3d, estimated_variance, variance_tables)
from .harness import (CapacityReport, SchemeComparison, compare_schemes,
                      db_to_linear, degradation_study, run_scenario, sweep)
from .link import (UserRates, inst_pe_cosm, inst_pe_noncosm,
                   noma_baseline_rates, rate, sinr_ccu, sinr_comp_ceu,
                   sm_rate, trial_rates)
from .specfun import expi, expi_scaled, mgf_exp, q_func

__version__ = "0.1.0"

__all__ = [
    "CapacityReport", "ChannelRealization", "ChannelSampler", "ConfigError",
    "ExactCapacity", "LinkVariances", "NumericalDomainError", "RateVector",
    "ScenarioConfig", "SchemeComparison", "Topology", "UserRates",
    "build_topology", "ccu_exact", "ceu_exact", "compare_schemes",
    "db_to_linear", "degradation_study", "distance_3d", "draw_channel",
    "esc_exact", "estimated_variance", "expi", "expi_scaled", "gain",
    "hypoexp_pdf", "inst_pe_cosm", "inst_pe_noncosm", "log_expectation",
    "mgf_exp", "noma_baseline_rates", "pe_cosm_exact", "pe_noncosm_exact",
    "q_func", "rate", "rates_ccu", "rates_ceu", "run_scenario", "sinr_ccu",
    "sinr_comp_ceu", "sm_rate", "sweep", "trial_rates", "variance_tables",
]
