"""Downlink and cell-free coverage probabilities for both deployment
scenarios.

The finite-antenna downlink expressions share one shape: an (N-1)-th
derivative in an auxiliary variable t, evaluated at 1/threshold, of t^(N-1)
times a Laplace-type transform of the serving-distance law.  The transform is
evaluated on a complex circle by the derivative helper, so every routine here
accepts complex arguments in the interior.  Large-array (infinite-antenna)
and cell-free variants invert a Laplace transform on the positive real axis
instead; those contours require the damped-series inverter because the
underlying distance expectations diverge left of the imaginary axis.

Angle-marked networks collapse to a single scalar (the equivalent-density
factor), so their transforms are closed up to one interference integral.
Altitude-marked networks carry the full radial measure; a per-configuration
kernel tabulates the measure density against fixed quadrature panels once,
after which every contour node costs a few small dot products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy import optimize as _optimize
from scipy import special as _special

from .analytic import (apdl_density_floor, apdl_distance_measure,
                       apdl_distance_measure_deriv, apil_density_factor,
                       _distance_measure_deriv_fixed_h, _proportional_rate,
                       interference_integral_rayleigh)
from .inversion import (DEFAULT_INVERSION, InversionSpec, ccdf_via_inversion,
                        high_order_derivative)
from .model import (Apdl, Apil, DegenerateAltitude, ExponentialAltitude,
                    NetworkConfig, ProportionalAltitude, Scenario,
                    UniformAltitude, los_probability)
from .quadrature import (DEFAULT_QUAD, QuadratureSpec, gauss_laguerre,
                         gauss_legendre, integrate_semi_inf)

# Euler damped-series settings for transforms only defined right of the
# imaginary axis (distance expectations diverge on the left half plane).
RIGHT_PLANE_INVERSION = InversionSpec(method="euler")

_VALUE_SLACK = 1e-9


@dataclass(frozen=True)
class CoverageResult:
    """A coverage probability with provenance.

    method is one of "analytic-exact", "analytic-lower-bound", "closed-form",
    "monte-carlo"; scenario is "apil" or "apdl"; diagnostics carries solver
    metadata (never needed to interpret value).
    """

    value: float
    method: str
    scenario: str
    cellfree: bool = False
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (-_VALUE_SLACK <= self.value <= 1.0 + _VALUE_SLACK):
            raise ValueError(f"coverage {self.value} outside [0, 1]")
        object.__setattr__(self, "value", float(min(max(self.value, 0.0), 1.0)))


def _v(alpha):
    return 2.0 / alpha


def _require_finite_n(cfg):
    if cfg.n_antennas == math.inf:
        raise ValueError("finite antenna count required; use the massive variant")
    return int(cfg.n_antennas)


def _gamma_ratio(n, v):
    """Gamma(n + v) / Gamma(n)."""
    return math.exp(math.lgamma(n + v) - math.lgamma(n))


def _derivative_value(transform, n, beta):
    """(1/(N-1)!) d^{N-1}/dt^{N-1} [t^{N-1} transform(1/t)] at t = 1/beta."""
    if n == 1:
        return float(np.real(transform(beta)))

    def g(t):
        return t ** (n - 1) * transform(1.0 / t)

    # g is analytic wherever Re(t) > 0, so the contour may use most of the
    # distance to the origin; a wide circle keeps high orders conditioned
    t0 = 1.0 / beta
    d = high_order_derivative(g, t0, n - 1, radius=0.8 * t0)
    val = d / math.factorial(n - 1)
    return min(max(val, 0.0), 1.0)


# ---------------------------------------------------------------------------
# angle-marked downlink


def _apil_transform(cfg, omega):
    """s -> E[exp(-s sigma0 D^{a/2} / P - pi lam omega D I_G(s, v))] with
    D ~ Exp(pi lam omega).

    The interference factor is linear in D, so the exponential expectation is
    taken along the rotated ray D = q / (pi lam omega (1 + I_G)); the noise
    term rides along as a perturbation.  With sigma0 = 0 the quadrature sum
    telescopes to 1/(1 + I_G) exactly.
    """
    lamom = math.pi * cfg.density * omega
    v = _v(cfg.alpha)
    noise = cfg.noise_mw / cfg.power_mw
    q, w = gauss_laguerre(48)
    half = cfg.alpha / 2.0

    def transform(s):
        a = interference_integral_rayleigh(s, v)
        d = q / (lamom * (1.0 + a))
        return np.sum(w * np.exp(-s * noise * d ** half)) / (1.0 + a)

    return transform


def coverage_apil(cfg: NetworkConfig, scenario: Apil,
                  quad: QuadratureSpec = DEFAULT_QUAD) -> CoverageResult:
    """Downlink coverage, angle-marked scenario, finite antenna count."""
    n = _require_finite_n(cfg)
    omega = apil_density_factor(scenario.angle, cfg.ell, cfg.alpha, cfg.c1,
                                cfg.c2, quad)
    if n == 1 and cfg.noise_mw == 0.0:
        val = 1.0 / (1.0 + interference_integral_rayleigh(cfg.beta, _v(cfg.alpha), quad))
        return CoverageResult(val, "closed-form", "apil",
                              diagnostics={"omega": omega})
    val = _derivative_value(_apil_transform(cfg, omega), n, cfg.beta)
    return CoverageResult(val, "analytic-exact", "apil",
                          diagnostics={"omega": omega, "derivative_order": n - 1})


def coverage_apil_lower_bound(cfg: NetworkConfig, scenario: Apil,
                              quad: QuadratureSpec = DEFAULT_QUAD) -> CoverageResult:
    """Jensen lower bound on the angle-marked downlink coverage: the serving
    distance is replaced by its moments inside the exponent."""
    n = _require_finite_n(cfg)
    omega = apil_density_factor(scenario.angle, cfg.ell, cfg.alpha, cfg.c1,
                                cfg.c2, quad)
    lamom = math.pi * cfg.density * omega
    v = _v(cfg.alpha)
    noise_moment = (cfg.noise_mw / cfg.power_mw) * math.gamma(1.0 + cfg.alpha / 2.0) \
        / lamom ** (cfg.alpha / 2.0)

    def transform(s):
        return np.exp(-s * noise_moment - interference_integral_rayleigh(s, v))

    val = _derivative_value(transform, n, cfg.beta)
    return CoverageResult(val, "analytic-lower-bound", "apil",
                          diagnostics={"omega": omega})


def coverage_apil_massive(cfg: NetworkConfig, scenario: Apil,
                          quad: QuadratureSpec = DEFAULT_QUAD,
                          inv: InversionSpec = RIGHT_PLANE_INVERSION) -> CoverageResult:
    """Large-array limit of the angle-marked downlink coverage: the serving
    gain hardens to its unit-mean limit while interference stays faded."""
    omega = apil_density_factor(scenario.angle, cfg.ell, cfg.alpha, cfg.c1,
                                cfg.c2, quad)
    val = ccdf_via_inversion(_apil_transform(cfg, omega), cfg.beta, inv)
    return CoverageResult(val, "analytic-exact", "apil",
                          diagnostics={"omega": omega, "inversion": inv.method})


# ---------------------------------------------------------------------------
# angle-marked cell-free


def _levy_cdf_complement(exponent_coeff, v, z0, inv: InversionSpec):
    """P[Z > z0] where E[e^{-sZ}] = exp(-exponent_coeff * s^v).

    Inverts (1/s) L_Z(s) at z0 for the CDF; z0 = 0 means certain success.
    """
    if z0 == 0.0:
        return 1.0

    def transform(s):
        return np.exp(-exponent_coeff * np.power(s, v))

    cdf = ccdf_via_inversion(transform, 1.0 / z0, inv)
    return 1.0 - cdf


def cellfree_apil(cfg: NetworkConfig, scenario: Apil,
                  quad: QuadratureSpec = DEFAULT_QUAD,
                  inv: InversionSpec = RIGHT_PLANE_INVERSION) -> CoverageResult:
    """Cell-free coverage, angle-marked: all UAVs transmit jointly and the
    received sum is a stable-law shot process, so its transform has a closed
    stretched-exponential form and only the inversion is numerical."""
    omega = apil_density_factor(scenario.angle, cfg.ell, cfg.alpha, cfg.c1,
                                cfg.c2, quad)
    v = _v(cfg.alpha)
    gain_moment = 1.0 if cfg.n_antennas == math.inf else _gamma_ratio(int(cfg.n_antennas), v)
    coeff = math.pi * cfg.density * omega * gain_moment * math.gamma(1.0 - v)
    z0 = cfg.beta * cfg.noise_mw / cfg.power_mw
    val = _levy_cdf_complement(coeff, v, z0, inv)
    return CoverageResult(val, "analytic-exact", "apil", cellfree=True,
                          diagnostics={"omega": omega, "inversion": inv.method})


def cellfree_apil_erf(cfg: NetworkConfig, scenario: Apil,
                      quad: QuadratureSpec = DEFAULT_QUAD) -> CoverageResult:
    """Closed form of the angle-marked cell-free coverage at path-loss
    exponent 4, where the received sum follows a Levy law."""
    if cfg.alpha != 4.0:
        raise ValueError("closed form requires alpha = 4")
    omega = apil_density_factor(scenario.angle, cfg.ell, cfg.alpha, cfg.c1,
                                cfg.c2, quad)
    if cfg.noise_mw == 0.0:
        return CoverageResult(1.0, "closed-form", "apil", cellfree=True)
    gain_moment = 1.0 if cfg.n_antennas == math.inf else _gamma_ratio(int(cfg.n_antennas), 0.5)
    arg = (math.pi ** 1.5 * cfg.density * omega * gain_moment / 2.0
           * math.sqrt(cfg.power_mw / (cfg.beta * cfg.noise_mw)))
    return CoverageResult(float(_special.erf(arg)), "closed-form", "apil",
                          cellfree=True, diagnostics={"omega": omega})


# ---------------------------------------------------------------------------
# altitude-marked radial measure kernel

# Geometric panels resolve the algebraic endpoint of the interference kernel
# after the x = 1/w fold; 16-point rules per panel leave the tabulation error
# far below inversion tolerances.
_PANEL_HALVINGS = 56
_PANEL_NODES = 16
_OUTER_NODES = 48


@dataclass(frozen=True)
class _RadialMeasure:
    """Radial measure of an altitude-marked deployment in squared-distance
    units: value is the measure, deriv its density (vectorized), floor the
    large-distance density limit, kinks the squared distances where the
    density is not smooth."""

    value: Callable
    deriv: Callable
    floor: float
    kinks: tuple = ()


def _uniform_deriv_vec(z, lo, hi, ell, alpha, c1, c2):
    """Altitude-averaged measure density for uniform altitudes, vectorized.

    The fixed-altitude density has jumps where the altitude crosses the
    line-of-sight and total support edges, so the average is integrated piece
    by piece between those edges.
    """
    z = np.asarray(z, dtype=float)
    ev = ell ** _v(alpha)
    xi, gw = gauss_legendre(_PANEL_NODES)
    xi = xi[None, :]
    gw = gw[None, :]
    width = hi - lo
    out = np.zeros(z.shape)

    def piece(a, b, fn):
        a = np.clip(a, lo, hi)[:, None]
        b = np.clip(b, lo, hi)[:, None]
        h = a + (b - a) * xi
        vals = fn(h) * gw * (b - a)
        return vals.sum(axis=1)

    sq_nlos = np.sqrt(np.maximum(z * ev, 0.0))
    sq_los = np.sqrt(np.maximum(z, 0.0))

    def both_terms(h):
        a = z[:, None] * ev - h * h
        b = z[:, None] - h * h
        t1 = ev * (1.0 - los_probability(
            np.arctan2(h, np.sqrt(np.maximum(a, 0.0))), c1, c2))
        t2 = los_probability(np.arctan2(h, np.sqrt(np.maximum(b, 0.0))), c1, c2)
        return t1 + t2

    def los_term(h):
        b = z[:, None] - h * h
        return los_probability(np.arctan2(h, np.sqrt(np.maximum(b, 0.0))), c1, c2)

    if ell > 0.0:
        out += piece(np.full(z.shape, lo), sq_nlos, both_terms)
        out += piece(sq_nlos, sq_los, los_term)
    else:
        out += piece(np.full(z.shape, lo), sq_los, los_term)
    return out / width


def _radial_measure(density, altitude, ell, alpha, c1, c2,
                    quad: QuadratureSpec = DEFAULT_QUAD) -> _RadialMeasure:
    floor = apdl_density_floor(ell, alpha, c1, c2)
    ev = ell ** _v(alpha)

    def value(y):
        return apdl_distance_measure(y, altitude, ell, alpha, c1, c2, quad)

    if isinstance(altitude, DegenerateAltitude):
        h = altitude.h

        def deriv(z):
            return _distance_measure_deriv_fixed_h(np.asarray(z, dtype=float),
                                                   h, ell, alpha, c1, c2)

        kinks = (h * h,) + ((h * h / ev,) if ell > 0.0 else ())
        return _RadialMeasure(value, deriv, floor, kinks)
    if isinstance(altitude, UniformAltitude):
        lo, hi = altitude.lo, altitude.hi

        def deriv(z):
            return _uniform_deriv_vec(z, lo, hi, ell, alpha, c1, c2)

        edges = [lo * lo, hi * hi]
        if ell > 0.0:
            edges += [lo * lo / ev, hi * hi / ev]
        return _RadialMeasure(value, deriv, floor, tuple(sorted(edges)))

    def deriv(z):
        return np.asarray(apdl_distance_measure_deriv(np.atleast_1d(z), altitude,
                                                      ell, alpha, c1, c2, quad))

    return _RadialMeasure(value, deriv, floor, ())


def _panel_rule(kink_x):
    """Graded panels on (0, 1] with optional extra breakpoints; returns
    (nodes, weights) of a composite fixed rule."""
    edges = [2.0 ** (-k) for k in range(_PANEL_HALVINGS + 1)]
    edges += [x for x in kink_x if edges[-1] < x < 1.0]
    edges = np.unique(np.asarray(edges))
    xi, gw = gauss_legendre(_PANEL_NODES)
    a = edges[:-1][:, None]
    b = edges[1:][:, None]
    nodes = (a + (b - a) * xi[None, :]).ravel()
    weights = ((b - a) * gw[None, :]).ravel()
    return nodes, weights


class _InterferenceRow:
    """Tabulated interference integral at one serving squared distance.

    Holds everything u-independent of
    int_1^inf density(y w) u/(u + w^(1/v)) dw; evaluation at a (complex)
    contour node reduces to one vectorized rational sum plus the closed
    floor term.
    """

    __slots__ = ("y", "pow_inv_v", "prefactor", "v")

    def __init__(self, y, measure: _RadialMeasure, v):
        kink_x = [y / z for z in measure.kinks if z > y]
        x, w = _panel_rule(kink_x)
        resid = measure.deriv(y / x) - measure.floor
        self.y = y
        self.v = v
        self.pow_inv_v = x ** (1.0 / v)
        # folded kernel: u x^(1/v - 2) / (1 + u x^(1/v))
        self.prefactor = w * resid * x ** (1.0 / v - 2.0)

    def __call__(self, u, floor_term):
        return floor_term + np.sum(self.prefactor * u / (1.0 + u * self.pow_inv_v))


@dataclass
class _ApdlKernel:
    """Per-configuration tabulation for altitude-marked coverage: serving
    squared-distance nodes against the exponential law of the measure, plus
    one tabulated interference row per node."""

    lam_pi: float
    v: float
    y_nodes: np.ndarray
    y_weights: np.ndarray
    rows: list
    measure: _RadialMeasure

    def transform(self, noise, half_alpha, quad: QuadratureSpec = DEFAULT_QUAD):
        """s -> E[exp(-s sigma0 Y^{a/2} / P - pi lam Y I(s, Y))] over the
        serving squared distance Y."""
        noise_pow = noise * self.y_nodes ** half_alpha
        scale = self.lam_pi * self.y_nodes

        def fn(s):
            ig = interference_integral_rayleigh(s, self.v, quad)
            acc = 0.0 + 0.0j
            for k, row in enumerate(self.rows):
                floor_term = self.measure.floor * ig
                expo = -s * noise_pow[k] - scale[k] * row(s, floor_term)
                acc += self.y_weights[k] * np.exp(expo)
            return acc

        return fn

    def moment(self, power):
        return float(np.sum(self.y_weights * self.y_nodes ** power))


def _solve_measure_level(measure: _RadialMeasure, target):
    """Least y with measure.value(y) = target; the measure density never
    exceeds one, so target itself brackets from below."""
    lo = target
    hi = max(2.0 * lo, 1.0)
    while measure.value(hi) < target:
        hi *= 2.0
        if hi > 1e300:
            raise RuntimeError("radial measure failed to reach target level")
    return float(_optimize.brentq(lambda y: measure.value(y) - target, lo, hi,
                                  rtol=1e-13, maxiter=200))


def _build_kernel(density, measure: _RadialMeasure, alpha) -> _ApdlKernel:
    lam_pi = math.pi * density
    v = _v(alpha)
    q, w = gauss_laguerre(_OUTER_NODES)
    y_nodes = np.array([_solve_measure_level(measure, qk / lam_pi) for qk in q])
    rows = [_InterferenceRow(y, measure, v) for y in y_nodes]
    return _ApdlKernel(lam_pi, v, y_nodes, w, rows, measure)


@lru_cache(maxsize=16)
def _cached_kernel(density, altitude, ell, alpha, c1, c2):
    measure = _radial_measure(density, altitude, ell, alpha, c1, c2)
    return _build_kernel(density, measure, alpha)


# ---------------------------------------------------------------------------
# altitude-marked downlink


def _apdl_delegates_to_apil(altitude):
    return isinstance(altitude, ProportionalAltitude)


def _proportional_as_apil(cfg, altitude):
    from .model import DegenerateAngle
    return Apil(DegenerateAngle(altitude.theta))


def coverage_apdl(cfg: NetworkConfig, scenario: Apdl,
                  quad: QuadratureSpec = DEFAULT_QUAD) -> CoverageResult:
    """Downlink coverage, altitude-marked scenario, finite antenna count."""
    n = _require_finite_n(cfg)
    alt = scenario.altitude
    if _apdl_delegates_to_apil(alt):
        # altitude proportional to ground distance fixes the elevation angle,
        # which is exactly the angle-marked model
        inner = coverage_apil(cfg, _proportional_as_apil(cfg, alt), quad)
        return CoverageResult(inner.value, inner.method, "apdl",
                              diagnostics=inner.diagnostics)
    kernel = _cached_kernel(cfg.density, alt, cfg.ell, cfg.alpha, cfg.c1, cfg.c2)
    transform = kernel.transform(cfg.noise_mw / cfg.power_mw, cfg.alpha / 2.0, quad)
    val = _derivative_value(transform, n, cfg.beta)
    return CoverageResult(val, "analytic-exact", "apdl",
                          diagnostics={"derivative_order": n - 1,
                                       "distance_nodes": len(kernel.rows)})


def coverage_apdl_massive(cfg: NetworkConfig, scenario: Apdl,
                          quad: QuadratureSpec = DEFAULT_QUAD,
                          inv: InversionSpec = RIGHT_PLANE_INVERSION) -> CoverageResult:
    """Large-array limit of the altitude-marked downlink coverage."""
    alt = scenario.altitude
    if _apdl_delegates_to_apil(alt):
        inner = coverage_apil_massive(cfg, _proportional_as_apil(cfg, alt), quad, inv)
        return CoverageResult(inner.value, inner.method, "apdl",
                              diagnostics=inner.diagnostics)
    kernel = _cached_kernel(cfg.density, alt, cfg.ell, cfg.alpha, cfg.c1, cfg.c2)
    transform = kernel.transform(cfg.noise_mw / cfg.power_mw, cfg.alpha / 2.0, quad)
    val = ccdf_via_inversion(transform, cfg.beta, inv)
    return CoverageResult(val, "analytic-exact", "apdl",
                          diagnostics={"inversion": inv.method})


def coverage_apdl_lower_bound(cfg: NetworkConfig, scenario: Apdl,
                              quad: QuadratureSpec = DEFAULT_QUAD) -> CoverageResult:
    """Jensen lower bound on the altitude-marked downlink coverage; distance
    moments replace the distance inside the exponent, and the interference
    integral is pinned at the mean squared distance."""
    n = _require_finite_n(cfg)
    alt = scenario.altitude
    if _apdl_delegates_to_apil(alt):
        inner = coverage_apil_lower_bound(cfg, _proportional_as_apil(cfg, alt), quad)
        return CoverageResult(inner.value, inner.method, "apdl",
                              diagnostics=inner.diagnostics)
    kernel = _cached_kernel(cfg.density, alt, cfg.ell, cfg.alpha, cfg.c1, cfg.c2)
    mean_y = kernel.moment(1.0)
    mean_pow = kernel.moment(cfg.alpha / 2.0)
    noise = cfg.noise_mw / cfg.power_mw
    row = _InterferenceRow(mean_y, kernel.measure, kernel.v)

    def transform(s):
        ig = interference_integral_rayleigh(s, kernel.v, quad)
        return np.exp(-s * noise * mean_pow
                      - kernel.lam_pi * mean_y * row(s, kernel.measure.floor * ig))

    val = _derivative_value(transform, n, cfg.beta)
    return CoverageResult(val, "analytic-lower-bound", "apdl",
                          diagnostics={"mean_sq_distance": mean_y})


# ---------------------------------------------------------------------------
# altitude-marked cell-free


def _log1p_vec(w):
    """log(1 + w) for complex arrays, accurate for small |w|."""
    w = np.asarray(w)
    small = np.abs(w) < 1e-4
    safe = np.where(small, 0.0, w)
    series = w * (1.0 - w * (0.5 - w / 3.0))
    return np.where(small, series, np.log(1.0 + safe))


def _expm1_vec(w):
    """exp(w) - 1 for complex arrays, accurate for small |w|."""
    w = np.asarray(w)
    small = np.abs(w) < 1e-4
    series = w * (1.0 + w * (0.5 + w / 6.0))
    return np.where(small, series, np.exp(w) - 1.0)


# Geometrically graded panels toward both endpoints of the unit interval
# resolve the knee near u=0, the endpoint algebra left by the quadratic
# infinite-interval map below, and contour-node oscillation in between.
# Third-octave steps keep the per-panel phase sweep within what the panel
# rule resolves for the complex abscissae the inversion contour supplies.
_CF_HALVINGS = 40
_CF_PER_OCTAVE = 3
_CF_PANEL_NODES = 24


@lru_cache(maxsize=1)
def _cellfree_unit_rule():
    steps = [0.5 ** (j / _CF_PER_OCTAVE)
             for j in range(1, _CF_PER_OCTAVE * _CF_HALVINGS + 1)]
    edges = np.asarray(sorted({x for x in steps} | {1.0 - x for x in steps}))
    xi, gw = gauss_legendre(_CF_PANEL_NODES)
    a = edges[:-1][:, None]
    b = edges[1:][:, None]
    u = (a + (b - a) * xi[None, :]).ravel()
    w = ((b - a) * gw[None, :]).ravel()
    return u, w


@lru_cache(maxsize=16)
def _altitude_rule(altitude):
    """Altitude nodes and weights for smooth expectations (no indicator
    jumps in the integrand here, so fixed rules converge fast)."""
    if isinstance(altitude, DegenerateAltitude):
        return np.array([altitude.h]), np.array([1.0])
    if isinstance(altitude, UniformAltitude):
        h, w = gauss_legendre(12, altitude.lo, altitude.hi)
        return h, w / (altitude.hi - altitude.lo)
    if isinstance(altitude, ExponentialAltitude):
        q, w = gauss_laguerre(32)
        return np.sqrt(q / altitude.rate), w
    raise TypeError(f"unsupported altitude {altitude!r}")


def _cellfree_apdl_exponent(s, altitude, ell, alpha, c1, c2, n_antennas):
    """int_0^inf (1 - E_H E_G[e^{-s G L (z + H^2)^{-a/2}}]) dz over squared
    projection distance z, for unit-mean beamformed gains.

    Altitudes proportional to the projection distance make the elevation
    angle constant, and the integral collapses to a gamma-function multiple
    of s^(2/a).  Other altitude laws use fixed graded quadrature after
    z = scale (u/(1-u))^2 with scale = |s|^(2/a): the integrand then has its
    plateau, line-of-sight knee and algebraic tail at fixed abscissae for
    every contour node.  Written through expm1 so the far tail (a gain
    expectation of 1 minus a vanishing quantity) keeps full relative
    accuracy.
    """
    finite = n_antennas != math.inf
    v = 2.0 / alpha
    if isinstance(altitude, ProportionalAltitude):
        rho = los_probability(altitude.theta, c1, c2)
        mix = rho + (1.0 - rho) * ell ** v
        shape = 1.0
        if finite:
            n = float(n_antennas)
            shape = math.exp(math.lgamma(n + v) - math.lgamma(n)
                             - v * math.log(n))
        cos_sq = 1.0 / (1.0 + altitude.h0 ** 2)
        return (s + 0j) ** v * cos_sq * shape * math.gamma(1.0 - v) * mix

    n = float(n_antennas) if finite else 0.0
    half = alpha / 2.0
    u, uw = _cellfree_unit_rule()
    scale = abs(s) ** v + 1.0
    ratio = u / (1.0 - u)
    z = scale * ratio * ratio
    dz = uw * scale * 2.0 * ratio / (1.0 - u) ** 2

    h_nodes, h_weights = _altitude_rule(altitude)
    hs = h_nodes[:, None] + np.zeros_like(z)[None, :]

    s_pl = s * (z[None, :] + hs * hs) ** (-half)
    rho = los_probability(np.arctan2(hs, np.sqrt(z)[None, :]), c1, c2)
    if finite:
        log_los = -n * _log1p_vec(s_pl / n)
        log_nlos = -n * _log1p_vec(s_pl * ell / n)
    else:
        log_los = -s_pl
        log_nlos = -s_pl * ell
    outage = -(rho * _expm1_vec(log_los) + (1.0 - rho) * _expm1_vec(log_nlos))
    total = np.sum(dz * (h_weights @ outage))

    # closed tail beyond the last panel: outage ~ s * E[L] * z^(-a/2) there
    r_top = (1.0 - 0.5 ** _CF_HALVINGS) / 0.5 ** _CF_HALVINGS
    z_top = scale * r_top * r_top
    rho0 = los_probability(0.0, c1, c2)
    mean_att = rho0 + (1.0 - rho0) * ell
    total += s * mean_att * z_top ** (1.0 - half) / (half - 1.0)
    return total


def cellfree_apdl(cfg: NetworkConfig, scenario: Apdl,
                  quad: QuadratureSpec = DEFAULT_QUAD,
                  inv: InversionSpec = RIGHT_PLANE_INVERSION) -> CoverageResult:
    """Cell-free coverage, altitude-marked: the jointly received sum has a
    shot-noise transform integrated over the projection plane; the threshold
    CDF comes out by numerical inversion."""
    alt = scenario.altitude
    z0 = cfg.beta * cfg.noise_mw / cfg.power_mw
    if z0 == 0.0:
        return CoverageResult(1.0, "analytic-exact", "apdl", cellfree=True)
    lam_pi = math.pi * cfg.density

    def transform(s):
        ex = _cellfree_apdl_exponent(s, alt, cfg.ell, cfg.alpha, cfg.c1, cfg.c2,
                                     cfg.n_antennas)
        return np.exp(-lam_pi * ex)

    cdf = ccdf_via_inversion(transform, 1.0 / z0, inv)
    return CoverageResult(1.0 - cdf, "analytic-exact", "apdl", cellfree=True,
                          diagnostics={"inversion": inv.method})


def cellfree_apdl_erf(cfg: NetworkConfig, scenario: Apdl,
                      quad: QuadratureSpec = DEFAULT_QUAD) -> CoverageResult:
    """Closed form of the altitude-marked cell-free coverage when altitudes
    are proportional to ground distance, the path-loss exponent is 4, and
    there is no extra non-line-of-sight attenuation."""
    alt = scenario.altitude
    if not isinstance(alt, ProportionalAltitude):
        raise ValueError("closed form requires proportional altitudes")
    if cfg.alpha != 4.0 or cfg.ell != 1.0:
        raise ValueError("closed form requires alpha = 4 and ell = 1")
    if cfg.noise_mw == 0.0:
        return CoverageResult(1.0, "closed-form", "apdl", cellfree=True)
    theta = alt.theta
    rho = los_probability(theta, cfg.c1, cfg.c2)
    cos4 = math.cos(theta) ** 4
    finite = cfg.n_antennas != math.inf
    n = float(cfg.n_antennas) if finite else 0.0

    def integrand(x):
        s_pl = cos4 / (x * x)
        if finite:
            return 1.0 - (1.0 + s_pl / n) ** (-n)
        return 1.0 - math.exp(-s_pl)

    c_int = integrate_semi_inf(integrand, 0.0, scale=math.sqrt(cos4), spec=quad)
    arg = (math.pi * cfg.density / 2.0
           * math.sqrt(cfg.power_mw / (cfg.beta * cfg.noise_mw)) * c_int)
    return CoverageResult(float(_special.erf(arg)), "closed-form", "apdl",
                          cellfree=True, diagnostics={"rho": rho})


# ---------------------------------------------------------------------------
# dispatch


def coverage(cfg: NetworkConfig, scenario: Scenario,
             quad: QuadratureSpec = DEFAULT_QUAD) -> CoverageResult:
    """Downlink coverage for any scenario; infinite antenna counts resolve to
    the large-array limit."""
    massive = cfg.n_antennas == math.inf
    if isinstance(scenario, Apil):
        if massive:
            return coverage_apil_massive(cfg, scenario, quad)
        return coverage_apil(cfg, scenario, quad)
    if isinstance(scenario, Apdl):
        if massive:
            return coverage_apdl_massive(cfg, scenario, quad)
        return coverage_apdl(cfg, scenario, quad)
    raise TypeError(f"unsupported scenario {scenario!r}")


def coverage_lower_bound(cfg: NetworkConfig, scenario: Scenario,
                         quad: QuadratureSpec = DEFAULT_QUAD) -> CoverageResult:
    if isinstance(scenario, Apil):
        return coverage_apil_lower_bound(cfg, scenario, quad)
    if isinstance(scenario, Apdl):
        return coverage_apdl_lower_bound(cfg, scenario, quad)
    raise TypeError(f"unsupported scenario {scenario!r}")


def cellfree(cfg: NetworkConfig, scenario: Scenario,
             quad: QuadratureSpec = DEFAULT_QUAD) -> CoverageResult:
    if isinstance(scenario, Apil):
        return cellfree_apil(cfg, scenario, quad)
    if isinstance(scenario, Apdl):
        return cellfree_apdl(cfg, scenario, quad)
    raise TypeError(f"unsupported scenario {scenario!r}")
