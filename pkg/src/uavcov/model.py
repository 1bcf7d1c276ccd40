"""Network model: configuration, unit conversions, the elevation-dependent
line-of-sight probability, and the mark distributions of the two deployment
scenarios.

Geometry convention.  UAV projections form a planar Poisson process around the
origin receiver; each UAV carries either an elevation angle mark (the altitude
is ground-distance times tan of the angle) or an altitude mark (the angle is
then determined by the geometry).  All distances are in meters, powers in mW,
angles in radians unless a name says otherwise.
"""

from __future__ import annotations

import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .quadrature import DEFAULT_QUAD, QuadratureSpec, gauss_laguerre, gauss_legendre, integrate_semi_inf

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

# Elevation angles are capped just below vertical inside samplers so that
# tan/sec never overflow.
THETA_CAP = math.pi / 2 - 1e-9


class ConfigError(ValueError):
    """Raised for malformed configuration input (CLI exit code 2)."""


# ---------------------------------------------------------------------------
# unit conversions


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("dB conversion requires a positive ratio")
    return 10.0 * np.log10(x)


def dbm_to_mw(p_dbm):
    return 10.0 ** (np.asarray(p_dbm, dtype=float) / 10.0)


def mw_to_dbm(p_mw):
    p_mw = np.asarray(p_mw, dtype=float)
    if np.any(p_mw <= 0):
        raise ValueError("dBm conversion requires a positive power")
    return 10.0 * np.log10(p_mw)


# ---------------------------------------------------------------------------
# line-of-sight model


def los_probability(theta, c1, c2):
    """Probability that the link at elevation angle theta is line of sight.

    Logistic in the elevation angle: 1 / (1 + c2 * exp(-c1 * theta)).
    Accepts scalars or arrays; theta must lie in [0, pi/2].
    """
    if c1 <= 0 or c2 <= 0:
        raise ValueError("c1 and c2 must be positive")
    arr = np.asarray(theta, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0) or np.any(arr > math.pi / 2 + 1e-12):
        raise ValueError("theta must lie in [0, pi/2]")
    out = 1.0 / (1.0 + c2 * np.exp(-c1 * arr))
    return float(out) if np.isscalar(theta) or arr.ndim == 0 else out


# ---------------------------------------------------------------------------
# elevation-angle distributions (angle-marked scenario)


@dataclass(frozen=True)
class DegenerateAngle:
    """Every UAV sits at the same elevation angle."""

    theta: float

    def __post_init__(self):
        if not (0.0 <= self.theta < math.pi / 2):
            raise ValueError("theta must lie in [0, pi/2)")

    def sample_tan(self, rng, n):
        return np.full(n, math.tan(min(self.theta, THETA_CAP)))

    def expect(self, fn, spec: QuadratureSpec = DEFAULT_QUAD):
        return fn(self.theta)


@dataclass(frozen=True)
class GammaTanAngle:
    """tan(angle) is Gamma distributed with the given shape and mean tan(theta_bar).

    Larger shape concentrates the angles around theta_bar; the mean of the
    tangent (not of the angle itself) is matched.
    """

    shape: float
    theta_bar: float

    def __post_init__(self):
        if self.shape <= 0:
            raise ValueError("shape must be positive")
        if not (0.0 < self.theta_bar < math.pi / 2):
            raise ValueError("theta_bar must lie in (0, pi/2)")

    @property
    def _scale(self):
        return math.tan(self.theta_bar) / self.shape

    def sample_tan(self, rng, n):
        return rng.gamma(self.shape, self._scale, size=n)

    def expect(self, fn, spec: QuadratureSpec = DEFAULT_QUAD):
        """E[fn(angle)] integrated against the Gamma law of tan(angle)."""
        a, sc = self.shape, self._scale
        lg = math.lgamma(a)

        def integrand(u):
            if u <= 0.0:
                return 0.0
            logw = (a - 1.0) * math.log(u) - u / sc - lg - a * math.log(sc)
            return fn(math.atan(u)) * math.exp(logw)

        return integrate_semi_inf(integrand, 0.0, scale=a * sc, spec=spec)


AngleDistribution = Union[DegenerateAngle, GammaTanAngle]


def expect_over_angle(fn, dist: AngleDistribution, spec: QuadratureSpec = DEFAULT_QUAD):
    """Expectation of fn(angle) under an angle distribution."""
    return dist.expect(fn, spec)


# ---------------------------------------------------------------------------
# altitude distributions (altitude-marked scenario)


@dataclass(frozen=True)
class DegenerateAltitude:
    """Every UAV hovers at the same altitude (meters)."""

    h: float

    def __post_init__(self):
        if self.h < 0 or not math.isfinite(self.h):
            raise ValueError("altitude must be finite and nonnegative")

    def sample(self, rng, n, proj=None):
        return np.full(n, float(self.h))

    def expect_at(self, z, fn):
        return fn(self.h)

    def mean_sq(self):
        return self.h * self.h


@dataclass(frozen=True)
class UniformAltitude:
    """Altitude uniform on [h_bar - half_width, h_bar + half_width]."""

    h_bar: float
    half_width: float
    _gl_nodes: int = field(default=32, compare=False, repr=False)

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        if self.h_bar - self.half_width < 0:
            raise ValueError("altitude support must be nonnegative")

    @property
    def lo(self):
        return self.h_bar - self.half_width

    @property
    def hi(self):
        return self.h_bar + self.half_width

    def sample(self, rng, n, proj=None):
        return rng.uniform(self.lo, self.hi, size=n)

    def expect_at(self, z, fn):
        nodes, weights = gauss_legendre(self._gl_nodes, self.lo, self.hi)
        return sum(w * fn(h) for h, w in zip(nodes, weights)) / (2.0 * self.half_width)

    def mean_sq(self):
        return self.h_bar ** 2 + self.half_width ** 2 / 3.0


@dataclass(frozen=True)
class ExponentialAltitude:
    """Squared altitude is exponential with the given rate (1/m^2)."""

    rate: float
    _gl_nodes: int = field(default=48, compare=False, repr=False)

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("rate must be positive")

    def sample(self, rng, n, proj=None):
        return np.sqrt(rng.exponential(1.0 / self.rate, size=n))

    def expect_at(self, z, fn):
        nodes, weights = gauss_laguerre(self._gl_nodes)
        return sum(w * fn(math.sqrt(q / self.rate)) for q, w in zip(nodes, weights))

    def mean_sq(self):
        return 1.0 / self.rate

    def cdf_sq(self, y):
        """CDF of the squared altitude."""
        return 1.0 - np.exp(-self.rate * np.maximum(np.asarray(y, dtype=float), 0.0))


@dataclass(frozen=True)
class ProportionalAltitude:
    """Altitude is a fixed multiple h0 of the UAV's ground distance.

    All links then share the elevation angle arctan(h0).
    """

    h0: float

    def __post_init__(self):
        if self.h0 <= 0 or not math.isfinite(self.h0):
            raise ValueError("h0 must be positive and finite")

    @property
    def theta(self):
        return math.atan(self.h0)

    def sample(self, rng, n, proj=None):
        if proj is None:
            raise ValueError("proportional altitudes require ground distances")
        return self.h0 * np.asarray(proj, dtype=float)

    def expect_at(self, z, fn):
        return fn(self.h0 * math.sqrt(z))

    def mean_sq(self):
        return None


AltitudeDistribution = Union[DegenerateAltitude, UniformAltitude,
                             ExponentialAltitude, ProportionalAltitude]


# ---------------------------------------------------------------------------
# scenarios


@dataclass(frozen=True)
class Apil:
    """Angle-marked deployment: independent elevation angles, altitude follows."""

    angle: AngleDistribution


@dataclass(frozen=True)
class Apdl:
    """Altitude-marked deployment: independent altitudes, angle follows."""

    altitude: AltitudeDistribution


Scenario = Union[Apil, Apdl]


# ---------------------------------------------------------------------------
# network configuration


@dataclass(frozen=True)
class NetworkConfig:
    """Static network parameters.

    density      UAVs per square meter of ground plane.
    power_mw     per-UAV transmit power.
    noise_mw     receiver noise power (0 disables noise).
    alpha        path-loss exponent, must exceed 2.
    ell          excess attenuation applied to non-line-of-sight links, in [0, 1].
    c1, c2       line-of-sight model coefficients (suburban defaults).
    n_antennas   transmit antennas per UAV; math.inf selects the large-array limit.
    beta         SINR threshold, linear scale.
    """

    density: float
    power_mw: float = 50.0
    noise_mw: float = 10.0 ** (-92.5 / 10.0)
    alpha: float = 2.75
    ell: float = 0.25
    c1: float = 24.5811
    c2: float = 39.5971
    n_antennas: float = 1
    beta: float = 0.1

    def __post_init__(self):
        if not (self.density > 0 and math.isfinite(self.density)):
            raise ConfigError("density must be positive and finite")
        if not (self.power_mw > 0 and math.isfinite(self.power_mw)):
            raise ConfigError("power_mw must be positive and finite")
        if self.noise_mw < 0 or not math.isfinite(self.noise_mw):
            raise ConfigError("noise_mw must be finite and nonnegative")
        if not (self.alpha > 2 and math.isfinite(self.alpha)):
            raise ConfigError("alpha must exceed 2")
        if not (0.0 <= self.ell <= 1.0):
            raise ConfigError("ell must lie in [0, 1]")
        if self.c1 <= 0 or self.c2 <= 0:
            raise ConfigError("c1 and c2 must be positive")
        n = self.n_antennas
        if not (n == math.inf or (n == int(n) and n >= 1)):
            raise ConfigError("n_antennas must be a positive integer or infinity")
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ConfigError("beta must be positive and finite")


# ---------------------------------------------------------------------------
# configuration files (TOML)


def _parse_angle(section) -> AngleDistribution:
    variant = section.get("variant")
    theta_bar = section.get("theta_bar_deg")
    if theta_bar is None:
        raise ConfigError("scenario.angle.theta_bar_deg is required")
    theta = math.radians(float(theta_bar))
    if variant == "degenerate":
        return DegenerateAngle(theta)
    if variant == "gamma_tan":
        if "shape" not in section:
            raise ConfigError("scenario.angle.shape is required for gamma_tan")
        return GammaTanAngle(float(section["shape"]), theta)
    raise ConfigError(f"unknown angle variant: {variant!r}")


def _parse_altitude(section) -> AltitudeDistribution:
    variant = section.get("variant")
    if variant == "degenerate":
        if "h_bar_m" not in section:
            raise ConfigError("scenario.altitude.h_bar_m is required")
        return DegenerateAltitude(float(section["h_bar_m"]))
    if variant == "uniform":
        if "h_bar_m" not in section or "half_width_m" not in section:
            raise ConfigError("uniform altitude requires h_bar_m and half_width_m")
        return UniformAltitude(float(section["h_bar_m"]), float(section["half_width_m"]))
    if variant == "exponential":
        if "rate_per_m2" not in section:
            raise ConfigError("exponential altitude requires rate_per_m2")
        return ExponentialAltitude(float(section["rate_per_m2"]))
    if variant == "proportional":
        if "h0" not in section:
            raise ConfigError("proportional altitude requires h0")
        return ProportionalAltitude(float(section["h0"]))
    raise ConfigError(f"unknown altitude variant: {variant!r}")


def parse_config(data: dict) -> tuple[NetworkConfig, Scenario]:
    """Build a (NetworkConfig, Scenario) pair from a parsed config mapping.

    Interface units: noise in dBm, threshold in dB, angles in degrees.  They
    are converted exactly once, here.
    """
    if "lambda" not in data:
        raise ConfigError("config key 'lambda' (density per m^2) is required")
    kw = {"density": float(data["lambda"])}
    for key, dest in (("power_mw", "power_mw"), ("alpha", "alpha"), ("ell", "ell"),
                      ("c1", "c1"), ("c2", "c2")):
        if key in data:
            kw[dest] = float(data[key])
    if "noise_dbm" in data:
        kw["noise_mw"] = float(dbm_to_mw(float(data["noise_dbm"])))
    if "n_antennas" in data:
        n = data["n_antennas"]
        if isinstance(n, str):
            if n.lower() not in ("inf", "infinity"):
                raise ConfigError("n_antennas must be an integer or 'inf'")
            kw["n_antennas"] = math.inf
        else:
            kw["n_antennas"] = int(n)
    if "beta_db" in data:
        kw["beta"] = float(db_to_linear(float(data["beta_db"])))

    try:
        cfg = NetworkConfig(**kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc

    scen = data.get("scenario")
    if not isinstance(scen, dict):
        raise ConfigError("config section [scenario] is required")
    kind = scen.get("kind")
    if kind == "apil":
        if "angle" not in scen:
            raise ConfigError("[scenario.angle] is required for kind = 'apil'")
        scenario: Scenario = Apil(_parse_angle(scen["angle"]))
    elif kind == "apdl":
        if "altitude" not in scen:
            raise ConfigError("[scenario.altitude] is required for kind = 'apdl'")
        scenario = Apdl(_parse_altitude(scen["altitude"]))
    else:
        raise ConfigError(f"scenario.kind must be 'apil' or 'apdl', got {kind!r}")
    return cfg, scenario


def load_config(path) -> tuple[NetworkConfig, Scenario]:
    """Load a TOML configuration file."""
    try:
        with open(path, "rb") as fh:
            data = _toml.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML in {path}: {exc}") from exc
    return parse_config(data)


def describe_scenario(scenario: Scenario) -> dict:
    """Flat, JSON-friendly description of a scenario (used for CSV echo/digest)."""
    if isinstance(scenario, Apil):
        a = scenario.angle
        if isinstance(a, DegenerateAngle):
            return {"kind": "apil", "angle": "degenerate", "theta_bar_deg": math.degrees(a.theta)}
        return {"kind": "apil", "angle": "gamma_tan",
                "theta_bar_deg": math.degrees(a.theta_bar), "shape": a.shape}
    alt = scenario.altitude
    if isinstance(alt, DegenerateAltitude):
        return {"kind": "apdl", "altitude": "degenerate", "h_bar_m": alt.h}
    if isinstance(alt, UniformAltitude):
        return {"kind": "apdl", "altitude": "uniform", "h_bar_m": alt.h_bar,
                "half_width_m": alt.half_width}
    if isinstance(alt, ExponentialAltitude):
        return {"kind": "apdl", "altitude": "exponential", "rate_per_m2": alt.rate}
    return {"kind": "apdl", "altitude": "proportional", "h0": alt.h0}


def config_digest(cfg: NetworkConfig, scenario: Scenario) -> str:
    """Short stable digest identifying a (config, scenario) pair."""
    payload = {
        "density": cfg.density, "power_mw": cfg.power_mw, "noise_mw": cfg.noise_mw,
        "alpha": cfg.alpha, "ell": cfg.ell, "c1": cfg.c1, "c2": cfg.c2,
        "n_antennas": ("inf" if cfg.n_antennas == math.inf else int(cfg.n_antennas)),
        "beta": cfg.beta, "scenario": describe_scenario(scenario),
    }
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]
