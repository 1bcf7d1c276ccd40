"""Monte Carlo estimation of coverage and interference functionals.

Simulations run on a finite disk sized so each drop holds ~3000 UAVs on
average.  The removed far field is reinstated exactly where possible
(independent-region Laplace factor for interference transforms) and through
its exact mean otherwise (coverage SINR denominators); without either
correction the truncation bias at the default radius exceeds the Monte Carlo
confidence width.

All estimators share a drop schedule keyed by (seed, batch start), so a
common set of realizations drives every threshold in a sweep and results are
reproducible bit for bit for a fixed spec.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats as _stats

from .analytic import (WeightModel, shot_laplace_tail_apdl, shot_laplace_tail_apil)
from .model import Apdl, Apil, NetworkConfig, Scenario
from .sampler import (auto_disk_radius, draw_batch, drop_rng, far_field_mean_apdl,
                      far_field_mean_apil, segment_argmax, segment_max,
                      segment_rank, segment_sum)


@dataclass(frozen=True)
class McSpec:
    n_drops: int = 100_000
    batch_size: int = 64
    seed: int = 1
    disk_radius: Optional[float] = None
    ci_level: float = 0.99
    target_points: float = 3000.0

    def __post_init__(self):
        if self.n_drops < 100:
            raise ValueError("need at least 100 drops for a meaningful CI")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if not (0 < self.ci_level < 1):
            raise ValueError("ci_level must lie in (0, 1)")
        if self.disk_radius is not None and self.disk_radius <= 0:
            raise ValueError("disk_radius must be positive")

    def radius(self, density):
        if self.disk_radius is not None:
            return self.disk_radius
        return auto_disk_radius(density, self.target_points)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    ci_low: float
    ci_high: float
    n_effective: int


def _wrap(mean, se, n, ci_level):
    z = float(_stats.norm.ppf(0.5 + ci_level / 2.0))
    return McEstimate(float(mean), float(se), float(mean - z * se),
                      float(mean + z * se), int(n))


def _batches(n_drops, batch_size):
    start = 0
    while start < n_drops:
        size = min(batch_size, n_drops - start)
        yield start, size
        start += size


def _far_field_mean(cfg: NetworkConfig, scenario: Scenario, mean_weight, radius):
    if isinstance(scenario, Apil):
        return far_field_mean_apil(cfg.density, scenario.angle, mean_weight,
                                   cfg.ell, cfg.alpha, cfg.c1, cfg.c2, radius)
    return far_field_mean_apdl(cfg.density, scenario.altitude, mean_weight,
                               cfg.ell, cfg.alpha, cfg.c1, cfg.c2, radius)


def estimate_coverage(cfg: NetworkConfig, scenario: Scenario, betas,
                      mc: McSpec = McSpec(), massive=False):
    """Coverage probability P[SINR > beta] for each threshold in `betas`.

    The user associates with the UAV of strongest mean received power; its
    beamformed gain is Gamma(n_antennas, 1) while interferers fade
    exponentially.  `massive` replaces the serving gain by its normalized
    deterministic limit 1.  Returns (list of McEstimate, diagnostics dict).
    """
    betas = np.atleast_1d(np.asarray(betas, dtype=float))
    if np.any(betas <= 0):
        raise ValueError("thresholds must be positive")
    n_ant = cfg.n_antennas
    if not massive and n_ant == math.inf:
        raise ValueError("infinite antennas require massive=True")
    radius = mc.radius(cfg.density)
    far = _far_field_mean(cfg, scenario, cfg.power_mw, radius)
    hits = np.zeros(betas.size)
    empties = 0
    points = 0
    for first, size in _batches(mc.n_drops, mc.batch_size):
        batch = draw_batch(cfg.density, scenario, cfg.ell, cfg.c1, cfg.c2,
                           radius, mc.seed, first, size)
        points += batch.total
        nonempty = batch.counts > 0
        empties += int(size - np.count_nonzero(nonempty))
        base = batch.base_power(cfg.power_mw, cfg.alpha)
        serve_idx, _ = segment_argmax(base, batch)
        rng_f = drop_rng(mc.seed, first, 1)
        gains = rng_f.exponential(size=batch.total)
        if massive:
            g0 = np.ones(serve_idx.size)
        else:
            g0 = rng_f.gamma(float(n_ant), 1.0, size=serve_idx.size)
        total_faded = segment_sum(base * gains, batch)
        signal = np.zeros(size)
        interf = np.zeros(size)
        signal[nonempty] = base[serve_idx] * g0
        interf[nonempty] = total_faded[nonempty] - base[serve_idx] * gains[serve_idx]
        denom = cfg.noise_mw + interf + far
        hits += np.count_nonzero(signal[None, :] >= betas[:, None] * denom[None, :],
                                 axis=1)
    n = mc.n_drops
    ests = []
    for h in hits:
        p = h / n
        se = math.sqrt(max(p * (1.0 - p), 0.0) / n)
        ests.append(_wrap(p, se, n, mc.ci_level))
    info = dict(disk_radius=radius, far_field_mean=far, empty_drops=empties,
                mean_points=points / n, n_drops=n, massive=bool(massive))
    return ests, info


def estimate_cellfree(cfg: NetworkConfig, scenario: Scenario, betas,
                      mc: McSpec = McSpec(), massive=False):
    """Coverage P[sum of all received powers > beta * noise] when every UAV
    serves the user coherently; gains are Gamma(n_antennas, 1), or the
    normalized limit 1 when `massive`."""
    betas = np.atleast_1d(np.asarray(betas, dtype=float))
    if np.any(betas <= 0):
        raise ValueError("thresholds must be positive")
    n_ant = cfg.n_antennas
    if not massive and n_ant == math.inf:
        raise ValueError("infinite antennas require massive=True")
    radius = mc.radius(cfg.density)
    mean_gain = 1.0 if massive else float(n_ant)
    far = _far_field_mean(cfg, scenario, cfg.power_mw * mean_gain, radius)
    hits = np.zeros(betas.size)
    empties = 0
    for first, size in _batches(mc.n_drops, mc.batch_size):
        batch = draw_batch(cfg.density, scenario, cfg.ell, cfg.c1, cfg.c2,
                           radius, mc.seed, first, size)
        empties += int(np.count_nonzero(batch.counts == 0))
        base = batch.base_power(cfg.power_mw, cfg.alpha)
        if massive:
            gains = np.ones(batch.total)
        else:
            rng_f = drop_rng(mc.seed, first, 1)
            gains = rng_f.gamma(float(n_ant), 1.0, size=batch.total)
        z = segment_sum(base * gains, batch) + far
        hits += np.count_nonzero(z[None, :] >= betas[:, None] * cfg.noise_mw, axis=1)
    n = mc.n_drops
    ests = []
    for h in hits:
        p = h / n
        se = math.sqrt(max(p * (1.0 - p), 0.0) / n)
        ests.append(_wrap(p, se, n, mc.ci_level))
    info = dict(disk_radius=radius, far_field_mean=far, empty_drops=empties,
                n_drops=n, massive=bool(massive))
    return ests, info


def estimate_shot_laplace(density, scenario: Scenario, weight: WeightModel,
                          s_values, ell, alpha, c1, c2, skip_nearest=0,
                          mc: McSpec = McSpec()):
    """Empirical Laplace transform of the aggregate weighted interference,
    excluding the `skip_nearest` closest ground projections.

    The in-disk sum is simulated; the out-of-disk remainder enters through its
    exact transform, so the estimator is unbiased up to the (astronomically
    rare) event that a skipped projection falls outside the disk.
    """
    s_values = np.atleast_1d(np.asarray(s_values, dtype=float))
    if np.any(s_values < 0):
        raise ValueError("transform arguments must be nonnegative")
    if skip_nearest != int(skip_nearest) or skip_nearest < 0:
        raise ValueError("skip_nearest must be a nonnegative integer")
    skip_nearest = int(skip_nearest)
    radius = mc.radius(density)
    r2 = radius * radius
    if isinstance(scenario, Apil):
        tails = [shot_laplace_tail_apil(s, density, scenario.angle, weight,
                                        ell, alpha, c1, c2, r2) for s in s_values]
    else:
        tails = [shot_laplace_tail_apdl(s, density, scenario.altitude, weight,
                                        ell, alpha, c1, c2, r2) for s in s_values]
    tails = np.asarray(tails)
    acc = np.zeros(s_values.size)
    acc_sq = np.zeros(s_values.size)
    for first, size in _batches(mc.n_drops, mc.batch_size):
        batch = draw_batch(density, scenario, ell, c1, c2, radius,
                           mc.seed, first, size)
        rng_f = drop_rng(mc.seed, first, 1)
        w = weight.sample(rng_f, batch.total)
        received = batch.base_power(1.0, alpha) * w
        if skip_nearest == 1:
            # same atom a rank sort would drop, without the O(n log n) sort
            near_idx, _ = segment_argmax(-batch.ground_sq, batch)
            received[near_idx] = 0.0
        elif skip_nearest > 1:
            ranks = segment_rank(batch.ground_sq, batch)
            received = np.where(ranks >= skip_nearest, received, 0.0)
        t_disk = segment_sum(received, batch)
        vals = np.exp(-s_values[:, None] * t_disk[None, :])
        acc += vals.sum(axis=1)
        acc_sq += (vals * vals).sum(axis=1)
    n = mc.n_drops
    ests = []
    for j, s in enumerate(s_values):
        m = acc[j] / n
        var = max(acc_sq[j] / n - m * m, 0.0)
        se = math.sqrt(var / n)
        ests.append(_wrap(m * tails[j], se * tails[j], n, mc.ci_level))
    info = dict(disk_radius=radius, tail_factors=tails, n_drops=n,
                skip_nearest=skip_nearest)
    return ests, info


def max_signal_samples(density, scenario: Scenario, weight: WeightModel,
                       ell, alpha, c1, c2, mc: McSpec = McSpec()):
    """One sample per drop of the strongest weighted received power in the
    disk (power factor excluded; fold it into the weight if needed).

    Returns (samples, diagnostics); empty drops yield 0 and are counted.
    """
    radius = mc.radius(density)
    out = np.empty(mc.n_drops)
    empties = 0
    for first, size in _batches(mc.n_drops, mc.batch_size):
        batch = draw_batch(density, scenario, ell, c1, c2, radius,
                           mc.seed, first, size)
        rng_f = drop_rng(mc.seed, first, 1)
        w = weight.sample(rng_f, batch.total)
        received = batch.base_power(1.0, alpha) * w
        best = segment_max(received, batch, empty=0.0)
        out[first:first + size] = best
        empties += int(np.count_nonzero(batch.counts == 0))
    return out, dict(disk_radius=radius, empty_drops=empties)


def estimate_distance_ccdf(density, scenario: Scenario, weight: WeightModel,
                           ell, alpha, c1, c2, grid=None,
                           mc: McSpec = McSpec()):
    """Empirical CCDF of the strongest weighted received power.

    Evaluated on `grid` (log spaced between empirical quantiles when omitted)
    with a binomial CI per grid point.  Returns (grid, list of McEstimate,
    diagnostics).
    """
    samples, info = max_signal_samples(density, scenario, weight, ell, alpha,
                                       c1, c2, mc)
    if grid is None:
        positive = samples[samples > 0]
        if positive.size == 0:
            grid = np.array([1.0])
        else:
            lo, hi = np.quantile(positive, [0.01, 0.99])
            grid = np.geomspace(max(lo, 1e-300), max(hi, 2e-300), 25)
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    n = samples.size
    ests = []
    for r in grid:
        p = float(np.count_nonzero(samples > r)) / n
        se = math.sqrt(max(p * (1.0 - p), 0.0) / n)
        ests.append(_wrap(p, se, n, mc.ci_level))
    return grid, ests, info


def kth_projection_sq_samples(density, scenario: Scenario, ell, alpha, c1, c2, k,
                              mc: McSpec = McSpec()):
    """One sample per drop of the k-th smallest squared projection distance
    (nan when the drop holds fewer than k points)."""
    if k != int(k) or k < 1:
        raise ValueError("k must be a positive integer")
    k = int(k)
    radius = mc.radius(density)
    out = np.full(mc.n_drops, np.nan)
    for first, size in _batches(mc.n_drops, mc.batch_size):
        batch = draw_batch(density, scenario, ell, c1, c2, radius,
                           mc.seed, first, size)
        if batch.total == 0:
            continue
        ranks = segment_rank(batch.ground_sq, batch)
        sel = ranks == k - 1
        segs = batch.seg_ids[sel]
        out[first + segs] = batch.ground_sq[sel]
    return out, dict(disk_radius=radius)
