"""Sampling of network realizations on a finite disk.

Positions, marks, and fading are drawn from counter-based Philox streams
keyed by (seed, drop index, purpose), so any drop can be regenerated in
isolation and geometry is decoupled from fading.  Batches concatenate the
points of many drops into flat arrays delimited by offsets; per-drop
reductions then run as vectorized segment operations.

The disk truncates the true infinite network.  Helpers quantify what the
truncation removes: `far_field_mean_*` give the exact mean interference from
beyond the disk (added back as a deterministic correction), and the analytic
module's tail transforms give the exact out-of-disk Laplace factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Apdl, Apil, Scenario, los_probability
from .quadrature import DEFAULT_QUAD, integrate_semi_inf

_GEOMETRY, _FADING = 0, 1


def drop_rng(seed, index, purpose):
    """Independent generator for one drop and purpose (0 geometry, 1 fading)."""
    if purpose not in (_GEOMETRY, _FADING):
        raise ValueError("purpose must be 0 or 1")
    key = np.array([np.uint64(seed), np.uint64(2 * (index + 1) + purpose)],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def auto_disk_radius(density, target_points=3000.0):
    """Radius at which the disk holds `target_points` UAVs on average."""
    if density <= 0:
        raise ValueError("density must be positive")
    return math.sqrt(target_points / (math.pi * density))


@dataclass
class DropBatch:
    """Points of `n_drops` independent realizations, concatenated.

    Drop i owns the slice offsets[i]:offsets[i+1].  `ground_sq` is squared
    horizontal distance to the origin, `attenuation` is 1 on line-of-sight
    links and the NLoS factor otherwise.  `gains` hold unit-mean fading and
    are drawn separately via `draw_gains`.
    """

    n_drops: int
    counts: np.ndarray
    offsets: np.ndarray
    ground_sq: np.ndarray
    altitudes: np.ndarray
    attenuation: np.ndarray
    disk_radius: float

    @property
    def total(self):
        return int(self.ground_sq.shape[0])

    @property
    def seg_ids(self):
        return np.repeat(np.arange(self.n_drops), self.counts)

    def slant_sq(self):
        return self.ground_sq + self.altitudes ** 2

    def elevation(self):
        return np.arctan2(self.altitudes, np.sqrt(self.ground_sq))

    def base_power(self, power, alpha):
        """Received power before fading: power * attenuation * slant^-alpha."""
        return power * self.attenuation * self.slant_sq() ** (-alpha / 2.0)

    def effective_sq(self, alpha, weights=None):
        """Squared distance in the equivalent process: weighted received power
        w * L * slant^-alpha equals effective_sq^(-alpha/2).  Fully blocked
        links (weight 0) sit at infinity."""
        w = self.attenuation if weights is None else self.attenuation * weights
        with np.errstate(divide="ignore"):
            return self.slant_sq() * w ** (-2.0 / alpha)


def sample_batch(density, scenario: Scenario, radius, seed, first_index, n_drops):
    """Draw `n_drops` realizations, indexed first_index..first_index+n_drops-1.

    A single geometry stream keyed by `first_index` covers the whole batch, so
    batches are reproducible given (seed, first_index, n_drops).
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    rng = drop_rng(seed, first_index, _GEOMETRY)
    mu = density * math.pi * radius * radius
    counts = rng.poisson(mu, size=n_drops)
    offsets = np.zeros(n_drops + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    total = int(offsets[-1])
    ground_sq = rng.uniform(0.0, radius * radius, size=total)
    ground = np.sqrt(ground_sq)
    if isinstance(scenario, Apil):
        tans = scenario.angle.sample_tan(rng, total)
        altitudes = ground * tans
        theta = np.arctan(tans)
    elif isinstance(scenario, Apdl):
        altitudes = scenario.altitude.sample(rng, total, proj=ground)
        theta = np.arctan2(altitudes, ground)
    else:
        raise TypeError(f"unsupported scenario {scenario!r}")
    return DropBatch(n_drops, counts, offsets, ground_sq, altitudes,
                     np.ones(total), radius), rng, theta


def apply_los(batch: DropBatch, theta, ell, c1, c2, rng):
    """Resolve each link to LoS or NLoS in place."""
    p = los_probability(theta, c1, c2)
    nlos = rng.uniform(size=batch.total) >= p
    att = batch.attenuation
    att[nlos] = ell


def draw_batch(density, scenario: Scenario, ell, c1, c2, radius, seed,
               first_index, n_drops):
    """Complete geometry draw: positions, marks, and LoS resolution."""
    batch, rng, theta = sample_batch(density, scenario, radius, seed,
                                     first_index, n_drops)
    apply_los(batch, theta, ell, c1, c2, rng)
    return batch


def draw_gains(batch: DropBatch, seed, first_index, shape=None):
    """Unit-mean fading gains for every point of the batch.

    shape None gives exponential gains (single antenna); an integer n gives
    normalized Gamma(n, 1/n) gains; math.inf gives the deterministic limit.
    """
    if shape is not None and shape == math.inf:
        return np.ones(batch.total)
    rng = drop_rng(seed, first_index, _FADING)
    if shape is None or shape == 1:
        return rng.exponential(size=batch.total)
    n = int(shape)
    if n < 1:
        raise ValueError("gain shape must be a positive integer or inf")
    return rng.gamma(n, 1.0 / n, size=batch.total)


# ---------------------------------------------------------------------------
# single-drop view


@dataclass(frozen=True)
class UavRealization:
    """One UAV of a drop: planar position, altitude, elevation angle seen from
    the origin, line-of-sight flag, and its two fading draws (a beamformed
    serving gain with mean n_antennas, and the unit-mean gain it would
    contribute as an interferer)."""

    x: float
    y: float
    h: float
    theta: float
    los: bool
    gain_serving: float
    gain_interf: float


@dataclass(frozen=True)
class NetworkDrop:
    uavs: list
    disk_radius_m: float
    seed: int


def sample_drop(cfg, scenario: Scenario, disk_radius, seed, index=0) -> NetworkDrop:
    """One fully resolved realization, convenient for inspection and tests.

    Reuses the batched draw for everything the batch path consumes (counts,
    radii, marks, LoS), so those values match drop `index` of a batched run
    with the same seed; azimuths and per-UAV fading are drawn afterwards from
    the same streams.
    """
    batch, rng, theta = sample_batch(cfg.density, scenario, disk_radius, seed,
                                     index, 1)
    apply_los(batch, theta, cfg.ell, cfg.c1, cfg.c2, rng)
    n = batch.total
    azimuth = rng.uniform(0.0, 2.0 * math.pi, size=n)
    ground = np.sqrt(batch.ground_sq)
    rng_f = drop_rng(seed, index, _FADING)
    g_interf = rng_f.exponential(size=n)
    if cfg.n_antennas == math.inf:
        g_serving = np.ones(n)
    else:
        g_serving = rng_f.gamma(float(cfg.n_antennas), 1.0, size=n)
    uavs = [UavRealization(float(ground[i] * math.cos(azimuth[i])),
                           float(ground[i] * math.sin(azimuth[i])),
                           float(batch.altitudes[i]), float(theta[i]),
                           bool(batch.attenuation[i] == 1.0),
                           float(g_serving[i]), float(g_interf[i]))
            for i in range(n)]
    return NetworkDrop(uavs, float(disk_radius), int(seed))


def effective_distances(drop: NetworkDrop, alpha, ell):
    """Weighted link distances attenuation^(-1/alpha) * slant, ascending.

    Returns (distance, index) pairs; the first pair names the serving UAV.
    NLoS entries sit at infinity when ell is 0.  Empty drops give [].
    """
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    out = []
    for i, u in enumerate(drop.uavs):
        slant = math.sqrt(u.x ** 2 + u.y ** 2 + u.h ** 2)
        if u.los:
            d = slant
        elif ell == 0.0:
            d = math.inf
        else:
            d = slant * ell ** (-1.0 / alpha)
        out.append((d, i))
    out.sort()
    return out


def drop_to_rows(drop: NetworkDrop, drop_id=0):
    """Debug/visualization dump: one (drop_id, x, y, h, theta, los) per UAV."""
    return [(drop_id, u.x, u.y, u.h, u.theta, int(u.los)) for u in drop.uavs]


# ---------------------------------------------------------------------------
# segment reductions


def segment_sum(values, batch: DropBatch):
    if batch.total == 0:
        return np.zeros(batch.n_drops)
    # sentinel absorbs reduceat's handling of trailing/empty segments
    out = np.add.reduceat(np.append(values, 0.0), batch.offsets[:-1])
    out[batch.counts == 0] = 0.0
    return out


def segment_max(values, batch: DropBatch, empty=-np.inf):
    out = np.full(batch.n_drops, empty)
    if batch.total:
        padded = np.append(values, empty)
        out = np.maximum.reduceat(padded, batch.offsets[:-1])
        out[batch.counts == 0] = empty
    return out


def segment_rank(keys, batch: DropBatch):
    """Rank of each point inside its drop when sorted ascending by key."""
    if batch.total == 0:
        return np.zeros(0, dtype=np.int64)
    order = np.lexsort((keys, batch.seg_ids))
    ranks = np.empty(batch.total, dtype=np.int64)
    ranks[order] = np.arange(batch.total) - np.repeat(batch.offsets[:-1],
                                                      batch.counts)
    return ranks


def segment_argmax(values, batch: DropBatch):
    """Index (into the flat arrays) of the maximum of each nonempty drop."""
    best = segment_max(values, batch)
    hit = values == best[batch.seg_ids]
    # first occurrence per segment breaks ties deterministically
    first = np.zeros(batch.total, dtype=bool)
    if batch.total:
        idx = np.flatnonzero(hit)
        seg_of_hit = batch.seg_ids[idx]
        keep = np.ones(idx.size, dtype=bool)
        keep[1:] = seg_of_hit[1:] != seg_of_hit[:-1]
        first[idx[keep]] = True
    return np.flatnonzero(first), best


# ---------------------------------------------------------------------------
# out-of-disk compensation


def far_field_mean_apil(density, angle, mean_weight, ell, alpha, c1, c2, radius,
                        spec=DEFAULT_QUAD):
    """Exact mean interference received from beyond the disk, angle-marked."""
    if alpha <= 2:
        raise ValueError("alpha must exceed 2")

    def fn(theta):
        rho = los_probability(theta, c1, c2)
        return math.cos(theta) ** alpha * (rho + (1.0 - rho) * ell)

    kappa = angle.expect(fn, spec)
    return (2.0 * math.pi * density * mean_weight * kappa *
            radius ** (2.0 - alpha) / (alpha - 2.0))


def far_field_mean_apdl(density, altitude, mean_weight, ell, alpha, c1, c2, radius,
                        spec=DEFAULT_QUAD):
    """Exact mean interference received from beyond the disk, altitude-marked."""
    if alpha <= 2:
        raise ValueError("alpha must exceed 2")

    def integrand(z):
        def per_h(h):
            rho = los_probability(math.atan2(h, math.sqrt(z)), c1, c2)
            return (z + h * h) ** (-alpha / 2.0) * (rho + (1.0 - rho) * ell)

        return altitude.expect_at(z, per_h)

    r2 = radius * radius
    val = integrate_semi_inf(integrand, r2, scale=r2, spec=spec)
    return math.pi * density * mean_weight * val
