"""Coverage analysis and simulation for low-altitude aerial cellular networks."""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    Apdl,
    Apil,
    AngleDistribution,
    AltitudeDistribution,
    ConfigError,
    DegenerateAltitude,
    DegenerateAngle,
    ExponentialAltitude,
    GammaTanAngle,
    NetworkConfig,
    ProportionalAltitude,
    Scenario,
    UniformAltitude,
    config_digest,
    db_to_linear,
    dbm_to_mw,
    expect_over_angle,
    linear_to_db,
    load_config,
    los_probability,
    mw_to_dbm,
    parse_config,
)
from .quadrature import QuadratureError, QuadratureSpec  # noqa: F401
