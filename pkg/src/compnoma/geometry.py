"""Multi-cell geometry: BS grid, random user drops, link distances, variances.

Cells sit on a hexagonal-row grid (rows of six, odd rows shifted by one
cell radius) so that adjacent base stations are exactly two cell radii
apart. Each cell holds one cell-center user (CCU) and one cell-edge user
(CEU), dropped uniformly in area inside configurable annuli around their
serving BS. User draws are seeded per cell, so the users of cells
1..M do not move when the total cell count changes.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericalDomainError

_SQRT3 = math.sqrt(3.0)
_GRID_COLS = 6


@dataclass(frozen=True)
class ScenarioConfig:
    """All scenario parameters. Power and SNR quantities are linear."""

    n_cells: int = 12
    m_comp: int = 3
    cell_radius: float = 1.0
    bs_height: float = 0.01
    alpha: float = 0.1                  # CCU power fraction; CEU gets 1 - alpha
    rho: float = 100.0                  # transmit SNR (linear)
    sigma_eps: float = 0.01             # channel-estimation error variance
    gamma: float = 10.0 ** -2.5         # residual SIC factor (linear)
    pathloss_exp: float = 2.5
    antennas_per_bs: int = 2
    trials: int = 10_000
    master_seed: int = 271_828
    ccu_annulus: tuple = (0.1, 0.5)     # fractions of cell_radius
    ceu_annulus: tuple = (0.8, 1.0)
    # Estimation-error power is capped at this fraction of the link power
    # so that estimated variances stay positive on arbitrarily long links.
    # None disables the cap and makes over-long links a hard error.
    sigma_eps_cap: float | None = 0.5
    topology_redraws: int = 0           # 0 = single fixed topology

    def __post_init__(self):
        if not 2 <= self.m_comp <= self.n_cells:
            raise ConfigError(
                f"need 2 <= m_comp <= n_cells, got m_comp={self.m_comp}, n_cells={self.n_cells}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must be in (0, 1), got {self.alpha}")
        for name, ann in (("ccu_annulus", self.ccu_annulus), ("ceu_annulus", self.ceu_annulus)):
            lo, hi = ann
            if not (0.0 <= lo < hi <= 1.0):
                raise ConfigError(f"{name} must satisfy 0 <= lo < hi <= 1, got {ann}")
        if self.ccu_annulus[1] >= self.ceu_annulus[0]:
            raise ConfigError("ccu_annulus outer radius must lie inside ceu_annulus inner radius")
        if self.cell_radius <= 0.0 or self.bs_height <= 0.0:
            raise ConfigError("cell_radius and bs_height must be positive")
        if self.rho < 0.0 or self.sigma_eps < 0.0 or self.gamma < 0.0:
            raise ConfigError("rho, sigma_eps and gamma must be nonnegative")
        if self.pathloss_exp <= 0.0:
            raise ConfigError("pathloss_exp must be positive")
        if self.antennas_per_bs < 2:
            raise ConfigError("antennas_per_bs must be >= 2 for index modulation")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ConfigError("master_seed must fit in 64 bits")
        if self.sigma_eps_cap is not None and not 0.0 < self.sigma_eps_cap < 1.0:
            raise ConfigError("sigma_eps_cap must be in (0, 1) or None")
        if self.topology_redraws < 0:
            raise ConfigError("topology_redraws must be >= 0")

    @property
    def beta(self):
        return 1.0 - self.alpha


@dataclass(frozen=True)
class Topology:
    """Fixed BS/user layout with precomputed 3-D link distances.

    ``d_ccu[i, j]`` is the antenna-to-user distance from BS i to the CCU
    of cell j; ``d_ceu[i, k]`` likewise for CEUs. Immutable once built.
    """

    bs_xy: np.ndarray
    ccu_xy: np.ndarray
    ceu_xy: np.ndarray
    d_ccu: np.ndarray
    d_ceu: np.ndarray
    cell_radius: float
    bs_height: float

    @property
    def n_cells(self):
        return self.bs_xy.shape[0]

    def bs_csv(self):
        lines = ["bs_id,x,y"]
        for i, (x, y) in enumerate(self.bs_xy, start=1):
            lines.append(f"{i},{x:.9g},{y:.9g}")
        return "\n".join(lines) + "\n"

    def users_csv(self):
        lines = ["user_id,role,cell,x,y"]
        uid = 1
        for role, pts in (("ccu", self.ccu_xy), ("ceu", self.ceu_xy)):
            for cell, (x, y) in enumerate(pts, start=1):
                lines.append(f"{uid},{role},{cell},{x:.9g},{y:.9g}")
                uid += 1
        return "\n".join(lines) + "\n"


def distance_3d(r, h):
    """Antenna-to-user distance from ground distance r and antenna height h."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0):
        raise NumericalDomainError("ground distance must be >= 0")
    if not h > 0.0:
        raise NumericalDomainError("antenna height must be > 0")
    out = np.hypot(r, h)
    return float(out) if out.ndim == 0 else out


def estimated_variance(d, v, sigma_eps):
    """Estimated-channel variance d**(-v) - sigma_eps for one link.

    Raises NumericalDomainError when the estimation-error variance meets
    or exceeds the link power, i.e. the channel model is invalid at that
    distance.
    """
    if not d > 0.0:
        raise NumericalDomainError("distance must be > 0")
    out = d ** (-v) - sigma_eps
    if out <= 0.0:
        raise NumericalDomainError(
            f"sigma_eps={sigma_eps} >= d**-v={d ** (-v):.6g} at d={d}; "
            "estimated variance would be non-positive")
    return out


def grid_positions(n_cells, cell_radius):
    """Hexagonal-row BS grid with adjacent spacing of two cell radii."""
    xy = np.empty((n_cells, 2))
    for i in range(n_cells):
        row, col = divmod(i, _GRID_COLS)
        xy[i, 0] = 2.0 * cell_radius * col + cell_radius * (row % 2)
        xy[i, 1] = _SQRT3 * cell_radius * row
    return xy


def _draw_user(rng, bs_pos, annulus, cell_radius):
    lo, hi = annulus
    u = rng.random(2)
    r = cell_radius * math.sqrt(lo * lo + u[0] * (hi * hi - lo * lo))
    theta = 2.0 * math.pi * u[1]
    return bs_pos + r * np.array([math.cos(theta), math.sin(theta)])


def build_topology(config, seed):
    """Place BSs and drop one CCU and one CEU per cell; pure in (config, seed)."""
    n = config.n_cells
    bs = grid_positions(n, config.cell_radius)
    ccu = np.empty((n, 2))
    ceu = np.empty((n, 2))
    for i in range(n):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        ccu[i] = _draw_user(rng, bs[i], config.ccu_annulus, config.cell_radius)
        ceu[i] = _draw_user(rng, bs[i], config.ceu_annulus, config.cell_radius)

    def dists(users):
        ground = np.linalg.norm(bs[:, None, :] - users[None, :, :], axis=2)
        return np.hypot(ground, config.bs_height)

    return Topology(bs_xy=bs, ccu_xy=ccu, ceu_xy=ceu,
                    d_ccu=dists(ccu), d_ceu=dists(ceu),
                    cell_radius=config.cell_radius, bs_height=config.bs_height)


@dataclass(frozen=True)
class LinkVariances:
    """Per-link estimated variances and effective error variances.

    ``sigma_hat_*[i, u]`` is the variance of the estimated gain on the
    BS i -> user u link; ``sigma_eps_*[i, u]`` the error variance charged
    to that link. With a cap configured, links too long to support the
    nominal error variance have it clipped to ``cap * d**-v`` so that
    sigma_hat stays positive; ``n_capped`` counts such links.
    """

    sigma_hat_ccu: np.ndarray
    sigma_hat_ceu: np.ndarray
    sigma_eps_ccu: np.ndarray
    sigma_eps_ceu: np.ndarray
    eps_sum_ccu: np.ndarray   # column sums over BSs, one per CCU
    eps_sum_ceu: np.ndarray
    n_capped: int


def variance_tables(topology, config):
    """Build the full N x N variance tables for both user classes."""
    v = config.pathloss_exp
    se = config.sigma_eps
    cap = config.sigma_eps_cap
    n_capped = 0
    tables = []
    for d in (topology.d_ccu, topology.d_ceu):
        pl = d ** (-v)
        if cap is None:
            if np.any(pl <= se):
                worst = float(d.flat[np.argmin(pl)])
                raise NumericalDomainError(
                    f"sigma_eps={se} >= link power at d={worst:.4g} and sigma_eps_cap "
                    "is disabled; reduce sigma_eps or enable the cap")
            eps = np.full_like(pl, se)
        else:
            eps = np.minimum(se, cap * pl)
            n_capped += int(np.count_nonzero(eps < se)) if se > 0 else 0
        tables.append((pl - eps, eps))
    (sh_ccu, ep_ccu), (sh_ceu, ep_ceu) = tables
    return LinkVariances(
        sigma_hat_ccu=sh_ccu, sigma_hat_ceu=sh_ceu,
        sigma_eps_ccu=ep_ccu, sigma_eps_ceu=ep_ceu,
        eps_sum_ccu=ep_ccu.sum(axis=0), eps_sum_ceu=ep_ceu.sum(axis=0),
        n_capped=n_capped)
