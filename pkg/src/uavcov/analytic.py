"""Analytic building blocks: distribution of the strongest received signal,
Laplace transforms of the aggregate interference, and the interference
integrals entering coverage probabilities.

The key reduction used throughout: thinning each UAV's position by the
(2/alpha)-th power of its link weight turns the network, as seen through
received powers, into an equivalent planar Poisson process.  In the
angle-marked scenario the equivalent process is homogeneous with density
scaled by `apil_density_factor`; in the altitude-marked scenario it is
isotropic but radially inhomogeneous with radial measure
`apdl_distance_measure`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

from .model import (AltitudeDistribution, AngleDistribution,
                    DegenerateAltitude, ExponentialAltitude, ProportionalAltitude,
                    UniformAltitude, los_probability)
from .quadrature import (DEFAULT_QUAD, QuadratureSpec, gauss_laguerre,
                         integrate, integrate_complex,
                         integrate_complex_semi_inf, integrate_semi_inf)


def _v(alpha):
    return 2.0 / alpha


# ---------------------------------------------------------------------------
# link weight models


@dataclass(frozen=True)
class WeightModel:
    """Distribution of the multiplicative link weight (power x fading gain).

    kind 'unit' is the deterministic weight 1, 'rayleigh' is power times a
    unit-mean exponential gain, 'beamformed' is power times a Gamma(n, 1) gain
    (sum of n unit exponentials).
    """

    kind: str
    power: float = 1.0
    n: int = 1

    def __post_init__(self):
        if self.kind not in ("unit", "rayleigh", "beamformed"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.power <= 0:
            raise ValueError("power must be positive")
        if self.kind == "beamformed" and (self.n != int(self.n) or self.n < 1):
            raise ValueError("beamformed weight needs an integer n >= 1")

    @staticmethod
    def unit():
        return WeightModel("unit")

    @staticmethod
    def rayleigh(power=1.0):
        return WeightModel("rayleigh", power)

    @staticmethod
    def beamformed(power=1.0, n=1):
        return WeightModel("beamformed", power, int(n))

    def moment(self, a):
        """E[W^a] for a > -1 (or a > -n for beamformed)."""
        if self.kind == "unit":
            return 1.0
        if self.kind == "rayleigh":
            return self.power ** a * math.gamma(1.0 + a)
        return self.power ** a * math.exp(math.lgamma(self.n + a) - math.lgamma(self.n))

    @property
    def mean(self):
        return self.moment(1.0)

    def laplace(self, x):
        """E[exp(-x W)]; accepts real or complex x."""
        if self.kind == "unit":
            return np.exp(-x)
        if self.kind == "rayleigh":
            return 1.0 / (1.0 + self.power * x)
        return (1.0 + self.power * x) ** (-self.n)

    def defect(self, x):
        """1 - E[exp(-x W)] for real x >= 0, stable down to tiny x."""
        if self.kind == "unit":
            return -math.expm1(-x)
        px = self.power * x
        if self.kind == "rayleigh":
            return px / (1.0 + px)
        return -math.expm1(-self.n * math.log1p(px))

    def sf(self, w):
        """Survival function P[W > w] for real w >= 0."""
        if self.kind == "unit":
            return 1.0 if w < 1.0 else 0.0
        if self.kind == "rayleigh":
            return math.exp(-w / self.power)
        return float(_sp.gammaincc(self.n, w / self.power))

    def sample(self, rng, size):
        if self.kind == "unit":
            return np.ones(size)
        if self.kind == "rayleigh":
            return self.power * rng.exponential(size=size)
        return self.power * rng.gamma(self.n, size=size)


# ---------------------------------------------------------------------------
# angle-marked scenario: equivalent density factor


def apil_density_factor(angle: AngleDistribution, ell, alpha, c1, c2,
                        spec: QuadratureSpec = DEFAULT_QUAD):
    """Density scaling of the equivalent planar process in the angle-marked
    scenario: E[cos^2(angle) * (p_los * (1 - ell^(2/alpha)) + ell^(2/alpha))].

    Lies in (0, 1]; multiplying the planar density by it absorbs both the
    3D-to-ground projection and line-of-sight attenuation.
    """
    ev = ell ** _v(alpha)

    def fn(theta):
        rho = los_probability(theta, c1, c2)
        return math.cos(theta) ** 2 * (rho * (1.0 - ev) + ev)

    return angle.expect(fn, spec)


# ---------------------------------------------------------------------------
# altitude-marked scenario: radial measures


def _theta_at(h, z):
    return math.atan2(h, math.sqrt(z))


def _signal_measure_fixed_h(r, h, weight: WeightModel, ell, alpha, c1, c2, spec):
    """Radial measure of the region where a UAV at altitude h delivers
    weighted signal above r, integrated over squared ground distance."""
    inv = r ** (-_v(alpha))

    def integrand(z):
        d = (z + h * h) ** (alpha / 2.0)
        rho = los_probability(_theta_at(h, z), c1, c2)
        val = rho * weight.sf(r * d)
        if ell > 0.0:
            val += (1.0 - rho) * weight.sf((r / ell) * d)
        return val

    if weight.kind == "unit":
        # survival is an indicator; integrate over its exact support
        z_los = inv - h * h
        z_nlos = (ell ** _v(alpha)) * inv - h * h if ell > 0.0 else -1.0
        top = max(z_los, z_nlos)
        if top <= 0.0:
            return 0.0
        return integrate(integrand, 0.0, top, spec,
                         points=[p for p in (z_los, z_nlos) if p > 0.0])
    scale = max(inv * max(weight.power, 1.0) ** _v(alpha), h * h, 1.0)
    return integrate_semi_inf(integrand, 0.0, scale=scale, spec=spec)


def _expect_h(altitude, g, breaks, top, spec):
    """Average g over the altitude law by adaptive quadrature.

    `breaks` lists altitudes where g kinks or jumps; `top` (if given) is an
    altitude beyond which g vanishes identically.
    """
    if isinstance(altitude, DegenerateAltitude):
        return g(altitude.h)
    if isinstance(altitude, UniformAltitude):
        hi = altitude.hi if top is None else min(altitude.hi, top)
        if hi <= altitude.lo:
            return 0.0
        val = integrate(g, altitude.lo, hi, spec, points=breaks)
        return val / (altitude.hi - altitude.lo)
    if isinstance(altitude, ExponentialAltitude):
        # integrate against the squared-altitude exponential density
        rate = altitude.rate
        upper = 45.0 if top is None else min(rate * top * top, 45.0)
        if upper <= 0.0:
            return 0.0
        return integrate(lambda q: g(math.sqrt(q / rate)) * math.exp(-q),
                         0.0, upper, spec,
                         points=[rate * b * b for b in breaks])
    raise TypeError(f"unsupported altitude distribution {altitude!r}")


def apdl_signal_measure(r, altitude: AltitudeDistribution, weight: WeightModel,
                        ell, alpha, c1, c2, spec: QuadratureSpec = DEFAULT_QUAD):
    """Mean measure of UAVs whose weighted received signal exceeds r in the
    altitude-marked scenario (to be multiplied by pi * density)."""
    if not (r > 0.0 and math.isfinite(r)):
        raise ValueError("r must be positive and finite")
    if isinstance(altitude, DegenerateAltitude):
        return _signal_measure_fixed_h(r, altitude.h, weight, ell, alpha, c1, c2, spec)
    if isinstance(altitude, (UniformAltitude, ExponentialAltitude)):
        if weight.kind == "unit":
            inv = r ** (-_v(alpha))
            top = math.sqrt(inv)
            breaks = [math.sqrt(ell ** _v(alpha) * inv)] if ell > 0.0 else []
        else:
            top, breaks = None, []
        return _expect_h(altitude,
                         lambda h: _signal_measure_fixed_h(r, h, weight, ell,
                                                           alpha, c1, c2, spec),
                         breaks, top, spec)
    if isinstance(altitude, ProportionalAltitude):
        # constant elevation angle: collapses to the angle-marked closed form
        th = altitude.theta
        rho = los_probability(th, c1, c2)
        ev = ell ** _v(alpha)
        omega = math.cos(th) ** 2 * (rho * (1.0 - ev) + ev)
        return weight.moment(_v(alpha)) * omega * r ** (-_v(alpha))
    raise TypeError(f"unsupported altitude distribution {altitude!r}")


def _distance_measure_fixed_h(y, h, ell, alpha, c1, c2, spec):
    ev = ell ** _v(alpha)
    a = max(y * ev - h * h, 0.0)
    b = max(y - h * h, 0.0)
    if b <= 0.0:
        return 0.0
    val = a
    if b > a:
        if h == 0.0:
            val += los_probability(0.0, c1, c2) * (b - a)
        else:
            val += integrate(lambda z: los_probability(_theta_at(h, z), c1, c2),
                             a, b, spec)
    return val


def _distance_measure_deriv_fixed_h(y, h, ell, alpha, c1, c2):
    """d/dy of the fixed-altitude radial measure; vectorized over y."""
    y = np.asarray(y, dtype=float)
    ev = ell ** _v(alpha)
    a = np.maximum(y * ev - h * h, 0.0)
    b = np.maximum(y - h * h, 0.0)
    out = np.zeros_like(y)
    if ell > 0.0:
        mask = y * ev > h * h
        if np.any(mask):
            th = np.arctan2(h, np.sqrt(a[mask]))
            out[mask] += ev * (1.0 - los_probability(th, c1, c2))
    mask = y > h * h
    if np.any(mask):
        th = np.arctan2(h, np.sqrt(b[mask]))
        out[mask] += los_probability(th, c1, c2)
    return out


def _proportional_rate(altitude, ell, alpha, c1, c2):
    th = altitude.theta
    rho = los_probability(th, c1, c2)
    ev = ell ** _v(alpha)
    return math.cos(th) ** 2 * (rho * (1.0 - ev) + ev)


def apdl_distance_measure(y, altitude: AltitudeDistribution, ell, alpha, c1, c2,
                          spec: QuadratureSpec = DEFAULT_QUAD):
    """Radial measure of squared equivalent distance in the altitude-marked
    scenario: the CDF of the strongest-signal distance is
    exp(-pi * density * measure).  Unit link weight.  Scalar or array y."""
    if isinstance(altitude, ProportionalAltitude):
        omega = _proportional_rate(altitude, ell, alpha, c1, c2)
        arr = omega * np.maximum(np.asarray(y, dtype=float), 0.0)
        return float(arr) if np.ndim(y) == 0 else arr
    ev = ell ** _v(alpha)

    def one(yv):
        if yv <= 0.0:
            return 0.0
        if isinstance(altitude, DegenerateAltitude):
            return _distance_measure_fixed_h(yv, altitude.h, ell, alpha, c1, c2, spec)
        breaks = [math.sqrt(yv * ev)] if ell > 0.0 else []
        return _expect_h(altitude,
                         lambda h: _distance_measure_fixed_h(yv, h, ell, alpha,
                                                             c1, c2, spec),
                         breaks, math.sqrt(yv), spec)

    if np.ndim(y) == 0:
        return one(float(y))
    return np.array([one(float(t)) for t in np.asarray(y, dtype=float)])


def apdl_distance_measure_deriv(y, altitude: AltitudeDistribution, ell, alpha, c1, c2,
                                spec: QuadratureSpec = DEFAULT_QUAD):
    """Derivative in y of `apdl_distance_measure`; scalar or array y."""
    if isinstance(altitude, ProportionalAltitude):
        omega = _proportional_rate(altitude, ell, alpha, c1, c2)
        out = np.full_like(np.asarray(y, dtype=float), omega)
        return float(out) if np.ndim(y) == 0 else out
    if isinstance(altitude, DegenerateAltitude):
        out = _distance_measure_deriv_fixed_h(np.asarray(y, dtype=float),
                                              altitude.h, ell, alpha, c1, c2)
        return float(out) if np.ndim(y) == 0 else out
    ev = ell ** _v(alpha)

    def one(yv):
        if yv <= 0.0:
            return 0.0
        breaks = [math.sqrt(yv * ev)] if ell > 0.0 else []
        return _expect_h(altitude,
                         lambda h: float(_distance_measure_deriv_fixed_h(
                             np.array([yv]), h, ell, alpha, c1, c2)[0]),
                         breaks, math.sqrt(yv), spec)

    if np.ndim(y) == 0:
        return one(float(y))
    return np.array([one(float(t)) for t in np.asarray(y, dtype=float)])


def apdl_density_floor(ell, alpha, c1, c2):
    """Limit of the radial measure density at large distance (angle -> 0)."""
    ev = ell ** _v(alpha)
    rho0 = los_probability(0.0, c1, c2)
    return rho0 * (1.0 - ev) + ev


# ---------------------------------------------------------------------------
# strongest-signal distribution


def max_signal_cdf_apil(r, density, angle: AngleDistribution, weight: WeightModel,
                        ell, alpha, c1, c2, spec: QuadratureSpec = DEFAULT_QUAD):
    """CDF of the strongest weighted received power in the angle-marked scenario."""
    if not (r > 0.0):
        raise ValueError("r must be positive")
    omega = apil_density_factor(angle, ell, alpha, c1, c2, spec)
    ew = weight.moment(_v(alpha))
    return math.exp(-math.pi * density * ew * omega * r ** (-_v(alpha)))


def max_signal_cdf_apdl(r, density, altitude: AltitudeDistribution, weight: WeightModel,
                        ell, alpha, c1, c2, spec: QuadratureSpec = DEFAULT_QUAD):
    """CDF of the strongest weighted received power in the altitude-marked scenario."""
    if not (r > 0.0):
        raise ValueError("r must be positive")
    meas = apdl_signal_measure(r, altitude, weight, ell, alpha, c1, c2, spec)
    return math.exp(-math.pi * density * meas)


# ---------------------------------------------------------------------------
# complete-interference Laplace transforms


def shot_laplace_apil(s, density, angle: AngleDistribution, weight: WeightModel,
                      ell, alpha, c1, c2, spec: QuadratureSpec = DEFAULT_QUAD):
    """Laplace transform of the total weighted interference power, angle-marked
    scenario.  Accepts complex s off the negative real axis."""
    if np.ndim(s) != 0:
        raise ValueError("s must be scalar")
    if not isinstance(s, complex):
        s = float(s)
        if s < 0.0:
            raise ValueError("s must be nonnegative")
        if s == 0.0:
            return 1.0
    v = _v(alpha)
    omega = apil_density_factor(angle, ell, alpha, c1, c2, spec)
    coeff = math.pi * density * weight.moment(v) * math.gamma(1.0 - v) * omega
    out = np.exp(-coeff * s ** v)
    return out if isinstance(s, complex) else float(out)


def _apdl_shot_exponent(s, lower, altitude, weight: WeightModel, ell, alpha, c1, c2, spec):
    """Integral over squared ground distance >= lower of the per-area
    interference defect 1 - E[exp(-s * W * L * ||U||^-alpha)]."""

    cplx = isinstance(s, complex)

    def integrand(z):
        def per_h(h):
            d = (z + h * h) ** (-alpha / 2.0)
            rho = los_probability(_theta_at(h, z), c1, c2)
            if cplx:
                val = rho * (1.0 - weight.laplace(s * d))
                val += (1.0 - rho) * (1.0 - weight.laplace(s * ell * d))
            else:
                val = rho * weight.defect(s * d)
                val += (1.0 - rho) * weight.defect(s * ell * d)
            return val

        return altitude.expect_at(z, per_h)

    ms = altitude.mean_sq()
    scale = max((abs(s) * max(weight.power, 1.0)) ** _v(alpha),
                ms if ms else 0.0, lower, 1.0)
    if isinstance(s, complex):
        return integrate_complex_semi_inf(integrand, lower, scale=scale, spec=spec)
    return integrate_semi_inf(integrand, lower, scale=scale, spec=spec)


def shot_laplace_apdl(s, density, altitude: AltitudeDistribution, weight: WeightModel,
                      ell, alpha, c1, c2, spec: QuadratureSpec = DEFAULT_QUAD):
    """Laplace transform of the total weighted interference power,
    altitude-marked scenario.  Accepts complex s with positive real part or
    nonzero imaginary part."""
    if np.ndim(s) != 0:
        raise ValueError("s must be scalar")
    if not isinstance(s, complex):
        s = float(s)
        if s < 0.0:
            raise ValueError("s must be nonnegative")
        if s == 0.0:
            return 1.0
    expo = _apdl_shot_exponent(s, 0.0, altitude, weight, ell, alpha, c1, c2, spec)
    out = np.exp(-math.pi * density * expo)
    return out if isinstance(s, complex) else float(out)


def _apil_shot_exponent(s, lower, angle, weight: WeightModel, ell, alpha, c1, c2, spec):
    """Angle-marked analog of the per-area interference defect integral over
    squared projection distance >= lower."""

    def integrand(z):
        def per_theta(theta):
            base = s * math.cos(theta) ** alpha * z ** (-alpha / 2.0)
            rho = los_probability(theta, c1, c2)
            val = rho * weight.defect(base)
            val += (1.0 - rho) * weight.defect(base * ell)
            return val

        return angle.expect(per_theta, spec)

    scale = max((abs(s) * max(weight.power, 1.0)) ** _v(alpha), lower, 1.0)
    return integrate_semi_inf(integrand, lower, scale=scale, spec=spec)


def shot_laplace_tail_apil(s, density, angle: AngleDistribution, weight: WeightModel,
                           ell, alpha, c1, c2, from_sq,
                           spec: QuadratureSpec = DEFAULT_QUAD):
    """Laplace transform of the interference received from UAVs whose ground
    projection lies beyond sqrt(from_sq), angle-marked scenario.

    from_sq = 0 recovers `shot_laplace_apil`; the tail factor corrects
    finite-disk simulations exactly, since disjoint regions contribute
    independent interference.
    """
    s = float(s)
    if s < 0.0:
        raise ValueError("s must be nonnegative")
    if from_sq < 0.0:
        raise ValueError("from_sq must be nonnegative")
    if s == 0.0:
        return 1.0
    expo = _apil_shot_exponent(s, from_sq, angle, weight, ell, alpha, c1, c2, spec)
    return math.exp(-math.pi * density * expo)


def shot_laplace_tail_apdl(s, density, altitude: AltitudeDistribution,
                           weight: WeightModel, ell, alpha, c1, c2, from_sq,
                           spec: QuadratureSpec = DEFAULT_QUAD):
    """Altitude-marked counterpart of `shot_laplace_tail_apil`."""
    s = float(s)
    if s < 0.0:
        raise ValueError("s must be nonnegative")
    if from_sq < 0.0:
        raise ValueError("from_sq must be nonnegative")
    if s == 0.0:
        return 1.0
    expo = _apdl_shot_exponent(s, from_sq, altitude, weight, ell, alpha, c1, c2, spec)
    return math.exp(-math.pi * density * expo)


# ---------------------------------------------------------------------------
# interference integrals


def interference_integral_weighted(u, v, weight: WeightModel,
                                   spec: QuadratureSpec = DEFAULT_QUAD):
    """Normalized mean interference defect beyond the serving distance for a
    general weight: u^v * (Gamma(1-v) E[W^v] - int_0^{u^-v} (1 - L_W(x^{-1/v})) dx).

    Evaluated through the exactly equivalent tail form, which avoids the
    cancellation of the two terms at small u.
    """
    if not (0.0 < v < 1.0):
        raise ValueError("v must lie in (0, 1)")
    u = float(u)
    if u < 0.0:
        raise ValueError("u must be nonnegative")
    if u == 0.0:
        return 0.0
    lo = u ** (-v)
    val = integrate_semi_inf(lambda x: weight.defect(x ** (-1.0 / v)),
                             lo, scale=max(lo, 1.0), spec=spec)
    return u ** v * val


def interference_integral_rayleigh(u, v, spec: QuadratureSpec = DEFAULT_QUAD):
    """Interference integral for exponential (Rayleigh-fading) weights:
    u^v * pi*v/sin(pi*v) - int_0^1 u / (u + tau^(1/v)) dtau.

    Accepts complex u with positive real part (needed on inversion contours).
    """
    if not (0.0 < v < 1.0):
        raise ValueError("v must lie in (0, 1)")
    if np.ndim(u) != 0:
        raise ValueError("u must be scalar")
    is_cplx = isinstance(u, complex)
    if not is_cplx:
        u = float(u)
        if u < 0.0:
            raise ValueError("u must be nonnegative")
        if u == 0.0:
            return 0.0
    elif u.real <= 0.0 and u.imag == 0.0:
        raise ValueError("complex u must have positive real part or nonzero imaginary part")
    const = math.pi * v / math.sin(math.pi * v)
    split = min(max(abs(u) ** v, 1e-12), 1.0 - 1e-12)
    if is_cplx:
        tail = integrate_complex(lambda t: u / (u + t ** (1.0 / v)), 0.0, 1.0,
                                 spec, points=[split])
        return u ** v * const - tail
    tail = integrate(lambda t: u / (u + t ** (1.0 / v)), 0.0, 1.0, spec, points=[split])
    return u ** v * const - tail


def apdl_interference_integral(u, v, y, altitude: AltitudeDistribution, ell, alpha,
                               c1, c2, spec: QuadratureSpec = DEFAULT_QUAD,
                               tail_from=4096.0):
    """Altitude-marked analog of the Rayleigh interference integral at serving
    squared distance y: int_1^inf measure'(y*w) * u / (u + w^(1/v)) dw.

    Where the radial density has settled to its large-distance floor the tail
    is folded into the closed Rayleigh integral; the remainder is integrated
    numerically.  Reference implementation used to validate the tabulated fast
    path in the coverage module.
    """
    floor = apdl_density_floor(ell, alpha, c1, c2)

    def kern(w):
        return u / (u + w ** (1.0 / v))

    def bulk(w):
        d = apdl_distance_measure_deriv(y * w, altitude, ell, alpha, c1, c2)
        return (d - floor) * kern(w)

    quadfun = integrate_complex if isinstance(u, complex) else integrate
    head = quadfun(bulk, 1.0, tail_from, spec, points=None)
    # residual bracket beyond the switch point, mapped to (0, 1]
    def tail_bracket(t):
        w = tail_from / t
        d = apdl_distance_measure_deriv(y * w, altitude, ell, alpha, c1, c2)
        return (d - floor) * kern(w) * tail_from / (t * t)

    tail_resid = quadfun(tail_bracket, 0.0, 1.0, spec, points=None)
    closed_tail = floor * tail_from * interference_integral_rayleigh(
        u * tail_from ** (-1.0 / v), v, spec)
    return head + tail_resid + closed_tail


# ---------------------------------------------------------------------------
# beamformed-fading kernel (distributed transmission)


def gamma_fading_kernel(x, theta, ell, alpha, c1, c2, n):
    """Per-area outage kernel under a Gamma(n, 1/n) unit-mean beamformed gain:
    1 - E_L[(1 + x L cos^alpha(theta) / n)^(-n)]; n = inf uses the
    deterministic-gain limit exp(-x L cos^alpha(theta)).

    Accepts complex x off the negative real axis.
    """
    rho = los_probability(theta, c1, c2)
    ca = math.cos(theta) ** alpha
    if n == math.inf:
        los_term = np.exp(-x * ca)
        nlos_term = np.exp(-x * ell * ca)
    else:
        n = int(n)
        los_term = (1.0 + x * ca / n) ** (-n)
        nlos_term = (1.0 + x * ell * ca / n) ** (-n)
    return 1.0 - (rho * los_term + (1.0 - rho) * nlos_term)


# ---------------------------------------------------------------------------
# truncated interference (all but the k nearest projections)


def _gamma_expect(k, fn, rate, spec: QuadratureSpec = DEFAULT_QUAD):
    """E[fn(D)] for D ~ Gamma(k, rate), k a positive integer.

    Generalized Gauss-Laguerre with an embedded error estimate; falls back to
    adaptive quadrature when the two rules disagree.
    """
    vals = []
    for m in (64, 96):
        q, w = gauss_laguerre(m, float(k - 1))
        tot = sum(wi * fn(qi / rate) for qi, wi in zip(q, w))
        vals.append(tot / math.gamma(k))
    if abs(vals[0] - vals[1]) <= 1e-9 * max(abs(vals[1]), 1e-12):
        return vals[1]
    lg = math.lgamma(k)

    def weighted(d):
        q = rate * d
        if q <= 0.0:
            return 0.0
        return fn(d) * math.exp((k - 1.0) * math.log(q) - q - lg) * rate

    return integrate_semi_inf(weighted, 0.0, scale=k / rate, spec=spec)


def truncated_shot_laplace_apil(s, k, density, angle: AngleDistribution,
                                weight: WeightModel, ell, alpha, c1, c2,
                                spec: QuadratureSpec = DEFAULT_QUAD):
    """Laplace transform of the interference from all but the k nearest
    projections, angle-marked scenario.  k = 0 recovers the complete sum."""
    s = float(s)
    if s < 0.0:
        raise ValueError("s must be nonnegative")
    if k != int(k) or k < 0:
        raise ValueError("k must be a nonnegative integer")
    k = int(k)
    if s == 0.0:
        return 1.0
    if k == 0:
        return shot_laplace_apil(s, density, angle, weight, ell, alpha, c1, c2, spec)
    v = _v(alpha)
    pl = math.pi * density

    def fn(d):
        def per_theta(theta):
            ca = math.cos(theta) ** alpha
            rho = los_probability(theta, c1, c2)
            base = s * ca * d ** (-alpha / 2.0)
            val = rho * interference_integral_weighted(base, v, weight, spec)
            if ell > 0.0:
                val += (1.0 - rho) * interference_integral_weighted(base * ell, v,
                                                                   weight, spec)
            return val

        a = angle.expect(per_theta, spec)
        return math.exp(-pl * d * a)

    return _gamma_expect(k, fn, pl, spec)


def truncated_shot_laplace_apil_scaled(zeta, k, angle: AngleDistribution,
                                       weight: WeightModel, ell, alpha, c1, c2,
                                       spec: QuadratureSpec = DEFAULT_QUAD):
    """Closed form of the truncated-interference transform after rescaling the
    interference by the k-th nearest distance to the alpha/2 power.

    The secant of each interferer's angle cancels against the rescaling, so
    the expectation over the angle mark factorizes and the k-th-distance
    average collapses to (1 + mix)^(-k), independent of density.
    """
    zeta = float(zeta)
    if zeta < 0.0:
        raise ValueError("zeta must be nonnegative")
    if k != int(k) or k < 1:
        raise ValueError("k must be a positive integer")
    if zeta == 0.0:
        return 1.0
    v = _v(alpha)
    p_los = angle.expect(lambda t: los_probability(t, c1, c2), spec)
    mix = p_los * interference_integral_weighted(zeta, v, weight, spec)
    if ell > 0.0:
        mix += (1.0 - p_los) * interference_integral_weighted(zeta * ell, v, weight, spec)
    return (1.0 + mix) ** (-int(k))


def truncated_shot_laplace_apdl(s, k, density, altitude: AltitudeDistribution,
                                weight: WeightModel, ell, alpha, c1, c2,
                                spec: QuadratureSpec = DEFAULT_QUAD):
    """Laplace transform of the interference from all but the k nearest
    projections, altitude-marked scenario."""
    s = float(s)
    if s < 0.0:
        raise ValueError("s must be nonnegative")
    if k != int(k) or k < 0:
        raise ValueError("k must be a nonnegative integer")
    k = int(k)
    if s == 0.0:
        return 1.0
    if k == 0:
        return shot_laplace_apdl(s, density, altitude, weight, ell, alpha, c1, c2, spec)
    pl = math.pi * density

    def fn(d):
        expo = _apdl_shot_exponent(s, d, altitude, weight, ell, alpha, c1, c2, spec)
        return math.exp(-pl * expo)

    return _gamma_expect(k, fn, pl, spec)
