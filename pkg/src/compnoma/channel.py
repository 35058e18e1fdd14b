"""Rayleigh channel draws under the imperfect-CSI model.

Estimated gains are circularly-symmetric complex Gaussians whose variance
is the link's estimated variance (path gain minus estimation-error
variance). Trials are seeded with a counter-based scheme: a Philox stream
keyed by (master_seed, chunk_index) supplies a fixed-size block of trials,
and every trial owns a fixed slice of its chunk. Results are therefore
identical for any execution order or degree of parallelism.
"""

import math
from dataclasses import dataclass

import numpy as np

from .geometry import variance_tables

# Trials per keyed chunk. Fixed: changing it changes the random numbers
# assigned to a given trial index.
CHUNK = 4096


@dataclass(frozen=True)
class ChannelRealization:
    """Estimated gains for one trial: h_ccu[i, j] is BS i -> CCU j."""

    h_ccu: np.ndarray
    h_ceu: np.ndarray
    sigma_eps: float
    link_vars: "LinkVariances"  # noqa: F821 (geometry.LinkVariances)


def gain(h):
    """Squared magnitude of a complex gain (scalar or array)."""
    h = np.asarray(h)
    out = h.real ** 2 + h.imag ** 2
    return float(out) if out.ndim == 0 else out


class ChannelSampler:
    """Deterministic per-trial channel source for one (topology, config).

    draw(t) and draw_block(t0, n) consume the same underlying stream, so
    a block equals the stacked single draws for the same trial indices.
    """

    def __init__(self, topology, config, master_seed=None):
        self.link_vars = variance_tables(topology, config)
        self.n = topology.n_cells
        seed = config.master_seed if master_seed is None else master_seed
        self._key0 = np.uint64(seed)
        # CN(0, sigma_hat): real and imaginary parts carry half the power each
        self._amp_ccu = np.sqrt(self.link_vars.sigma_hat_ccu / 2.0)
        self._amp_ceu = np.sqrt(self.link_vars.sigma_hat_ceu / 2.0)
        self.sigma_eps = config.sigma_eps

    def _chunk(self, chunk_idx):
        key = np.array([self._key0, np.uint64(chunk_idx)], dtype=np.uint64)
        rng = np.random.Generator(np.random.Philox(key=key))
        u = rng.random((CHUNK, 2, 2, self.n, self.n))
        # Box-Muller in polar form; 1 - u keeps the log argument in (0, 1]
        radius = np.sqrt(-2.0 * np.log1p(-u[:, :, 0]))
        phase = 2.0 * math.pi * u[:, :, 1]
        z = radius * np.exp(1j * phase)
        return z[:, 0] * self._amp_ccu, z[:, 1] * self._amp_ceu

    def draw(self, trial_index):
        c, r = divmod(int(trial_index), CHUNK)
        h_ccu, h_ceu = self._chunk(c)
        return ChannelRealization(h_ccu=h_ccu[r].copy(), h_ceu=h_ceu[r].copy(),
                                  sigma_eps=self.sigma_eps, link_vars=self.link_vars)

    def draw_block(self, start, count):
        """Complex gains for trials [start, start + count) as two stacked arrays."""
        parts_c, parts_e = [], []
        t = int(start)
        end = t + int(count)
        while t < end:
            c, r = divmod(t, CHUNK)
            take = min(CHUNK - r, end - t)
            h_ccu, h_ceu = self._chunk(c)
            parts_c.append(h_ccu[r:r + take])
            parts_e.append(h_ceu[r:r + take])
            t += take
        return np.concatenate(parts_c), np.concatenate(parts_e)

    def gains_chunk(self, chunk_idx, limit=None):
        """Squared-magnitude gains of one whole chunk (optionally truncated)."""
        h_ccu, h_ceu = self._chunk(chunk_idx)
        if limit is not None:
            h_ccu, h_ceu = h_ccu[:limit], h_ceu[:limit]
        return gain(h_ccu), gain(h_ceu)


def draw_channel(topology, config, trial_seed):
    """One channel realization, deterministic in (topology, config, trial_seed)."""
    return ChannelSampler(topology, config, master_seed=trial_seed).draw(0)
