import math

import numpy as np
import pytest

from uavcov.model import (
    Apdl,
    Apil,
    ConfigError,
    DegenerateAltitude,
    DegenerateAngle,
    ExponentialAltitude,
    GammaTanAngle,
    NetworkConfig,
    ProportionalAltitude,
    UniformAltitude,
    config_digest,
    db_to_linear,
    dbm_to_mw,
    expect_over_angle,
    load_config,
    los_probability,
    parse_config,
)

C1, C2 = 24.5811, 39.5971


# ---------------------------------------------------------------------------
# line-of-sight probability


def test_visibility_at_ground_level():
    got = los_probability(0.0, C1, C2)
    assert got == pytest.approx(1.0 / (1.0 + C2), rel=1e-15)
    assert got == pytest.approx(0.024632301322015614, rel=1e-12)


def test_visibility_saturates_at_zenith():
    assert abs(los_probability(math.pi / 2.0, C1, C2) - 1.0) < 1e-15


def test_visibility_without_blockage():
    # vanishing c2 removes every obstruction
    assert los_probability(0.3, C1, 1e-300) == 1.0


def test_visibility_monotone_in_angle():
    grid = np.linspace(0.0, math.pi / 2.0, 1000)
    vals = los_probability(grid, C1, C2)
    assert np.all(np.diff(vals) >= 0.0)
    assert isinstance(los_probability(0.25, C1, C2), float)


def test_visibility_rejects_bad_inputs():
    with pytest.raises(ValueError):
        los_probability(-0.1, C1, C2)
    with pytest.raises(ValueError):
        los_probability(2.0, C1, C2)
    with pytest.raises(ValueError):
        los_probability(float("nan"), C1, C2)
    with pytest.raises(ValueError):
        los_probability(0.1, 0.0, C2)
    with pytest.raises(ValueError):
        los_probability(0.1, C1, -1.0)


# ---------------------------------------------------------------------------
# unit conversions


def test_unit_conversions():
    assert dbm_to_mw(-92.5) == pytest.approx(5.623413251903491e-10, rel=1e-14)
    assert db_to_linear(-10.0) == pytest.approx(0.1, rel=1e-14)
    assert db_to_linear(0.0) == 1.0
    assert dbm_to_mw(-math.inf) == 0.0


def test_conversion_round_trip():
    for x in (-92.5, -30.0, 0.0, 17.25):
        assert 10.0 * math.log10(dbm_to_mw(x)) == pytest.approx(x, abs=1e-12)
    for x in (-20.0, -3.0, 0.5, 10.0):
        assert 10.0 * math.log10(db_to_linear(x)) == pytest.approx(x, abs=1e-12)


# ---------------------------------------------------------------------------
# angle distributions


def test_degenerate_angle_expectation_is_evaluation():
    assert expect_over_angle(lambda t: math.cos(t) ** 2, DegenerateAngle(0.0)) == 1.0
    assert expect_over_angle(lambda t: t, DegenerateAngle(0.4)) == 0.4


def test_angle_expectation_normalizes():
    got = expect_over_angle(lambda t: 1.0, GammaTanAngle(4.0, math.radians(20.0)))
    assert got == pytest.approx(1.0, rel=1e-10)


def test_gamma_tan_expectation_matches_sampling():
    """Quadrature over the tangent law agrees with a large sample."""
    angle = GammaTanAngle(4.0, math.radians(20.0))
    rng = np.random.default_rng(7)
    samples = np.cos(np.arctan(angle.sample_tan(rng, 1_000_000))) ** 2
    se = samples.std() / math.sqrt(samples.size)
    exact = expect_over_angle(lambda t: math.cos(t) ** 2, angle)
    assert abs(exact - samples.mean()) < 3.0 * se


def test_gamma_tan_mean_tangent():
    angle = GammaTanAngle(4.0, math.radians(35.0))
    got = expect_over_angle(lambda t: math.tan(t), angle)
    assert got == pytest.approx(math.tan(math.radians(35.0)), rel=1e-9)


def test_angle_law_validation():
    with pytest.raises(ValueError):
        DegenerateAngle(math.pi / 2.0)
    with pytest.raises(ValueError):
        DegenerateAngle(-0.01)
    with pytest.raises(ValueError):
        GammaTanAngle(0.0, 0.3)
    with pytest.raises(ValueError):
        GammaTanAngle(4.0, 0.0)


# ---------------------------------------------------------------------------
# altitude distributions


def test_altitude_second_moments():
    assert DegenerateAltitude(40.0).mean_sq() == 1600.0
    assert UniformAltitude(40.0, 10.0).mean_sq() == pytest.approx(1600.0 + 100.0 / 3.0)
    assert ExponentialAltitude(1e-3).mean_sq() == pytest.approx(1000.0)
    assert ProportionalAltitude(0.5).mean_sq() is None


def test_exponential_altitude_squared_cdf():
    alt = ExponentialAltitude(2e-4)
    assert alt.cdf_sq(0.0) == 0.0
    assert alt.cdf_sq(5000.0) == pytest.approx(1.0 - math.exp(-1.0))


def test_uniform_altitude_conditional_expectation():
    alt = UniformAltitude(40.0, 10.0)
    assert alt.expect_at(0.0, lambda h: 1.0) == pytest.approx(1.0, rel=1e-12)
    assert alt.expect_at(0.0, lambda h: h * h) == pytest.approx(alt.mean_sq(), rel=1e-10)


def test_proportional_altitude_tracks_projection():
    alt = ProportionalAltitude(0.75)
    rng = np.random.default_rng(3)
    proj = np.array([10.0, 20.0, 400.0])
    np.testing.assert_allclose(alt.sample(rng, 3, proj=proj), 0.75 * proj)
    assert alt.theta == pytest.approx(math.atan(0.75))


def test_altitude_law_validation():
    with pytest.raises(ValueError):
        DegenerateAltitude(-1.0)
    with pytest.raises(ValueError):
        UniformAltitude(40.0, 50.0)
    with pytest.raises(ValueError):
        UniformAltitude(40.0, 0.0)
    with pytest.raises(ValueError):
        ExponentialAltitude(0.0)
    with pytest.raises(ValueError):
        ProportionalAltitude(0.0)


# ---------------------------------------------------------------------------
# network configuration


def test_config_validation():
    NetworkConfig(density=1e-6)
    with pytest.raises(ConfigError):
        NetworkConfig(density=0.0)
    with pytest.raises(ConfigError):
        NetworkConfig(density=1e-6, alpha=2.0)
    with pytest.raises(ConfigError):
        NetworkConfig(density=1e-6, ell=1.5)
    with pytest.raises(ConfigError):
        NetworkConfig(density=1e-6, n_antennas=2.5)
    with pytest.raises(ConfigError):
        NetworkConfig(density=1e-6, beta=0.0)
    with pytest.raises(ConfigError):
        NetworkConfig(density=1e-6, noise_mw=-1.0)


def _doc(**over):
    data = {
        "lambda": 1e-6,
        "power_mw": 50.0,
        "noise_dbm": -92.5,
        "alpha": 2.75,
        "ell": 0.25,
        "n_antennas": 4,
        "beta_db": -10.0,
        "scenario": {
            "kind": "apil",
            "angle": {"variant": "degenerate", "theta_bar_deg": 20.0},
        },
    }
    data.update(over)
    return data


def test_parse_config_units():
    cfg, scenario = parse_config(_doc())
    assert cfg.density == 1e-6
    assert cfg.noise_mw == pytest.approx(5.623413251903491e-10, rel=1e-14)
    assert cfg.beta == pytest.approx(0.1, rel=1e-14)
    assert cfg.n_antennas == 4
    assert isinstance(scenario, Apil)
    assert scenario.angle.theta == pytest.approx(math.radians(20.0))


def test_parse_config_infinite_antennas():
    cfg, _ = parse_config(_doc(n_antennas="inf"))
    assert cfg.n_antennas == math.inf
    cfg, _ = parse_config(_doc(n_antennas="Infinity"))
    assert cfg.n_antennas == math.inf
    with pytest.raises(ConfigError):
        parse_config(_doc(n_antennas="many"))


def test_parse_config_altitude_scenarios():
    doc = _doc(scenario={"kind": "apdl",
                         "altitude": {"variant": "degenerate", "h_bar_m": 40.0}})
    _, scenario = parse_config(doc)
    assert isinstance(scenario, Apdl)
    assert scenario.altitude.h == 40.0
    doc = _doc(scenario={"kind": "apdl",
                         "altitude": {"variant": "proportional", "h0": 0.5}})
    _, scenario = parse_config(doc)
    assert scenario.altitude.h0 == 0.5


def test_parse_config_rejects_bad_documents():
    with pytest.raises(ConfigError):
        parse_config({"scenario": {"kind": "apil"}})
    with pytest.raises(ConfigError):
        parse_config(_doc(scenario={"kind": "apil"}))
    with pytest.raises(ConfigError):
        parse_config(_doc(scenario={"kind": "apdl"}))
    with pytest.raises(ConfigError):
        parse_config(_doc(scenario={"kind": "tube"}))
    bad_angle = {"kind": "apil", "angle": {"variant": "gamma_tan",
                                           "theta_bar_deg": 20.0}}
    with pytest.raises(ConfigError):
        parse_config(_doc(scenario=bad_angle))


def test_load_config_round_trip(tmp_path):
    path = tmp_path / "net.toml"
    path.write_text(
        'lambda = 1e-6\nbeta_db = -10.0\n'
        '[scenario]\nkind = "apil"\n'
        '[scenario.angle]\nvariant = "degenerate"\ntheta_bar_deg = 20.0\n')
    cfg, scenario = load_config(path)
    assert cfg.beta == pytest.approx(0.1)
    assert scenario.angle.theta == pytest.approx(math.radians(20.0))


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("lambda = [unclosed")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_config_digest_discriminates():
    cfg, scenario = parse_config(_doc())
    assert config_digest(cfg, scenario) == config_digest(cfg, scenario)
    other, _ = parse_config(_doc(**{"lambda": 2e-6}))
    assert config_digest(other, scenario) != config_digest(cfg, scenario)
    alt_scen = parse_config(_doc(scenario={
        "kind": "apdl", "altitude": {"variant": "degenerate", "h_bar_m": 40.0}}))[1]
    assert config_digest(cfg, alt_scen) != config_digest(cfg, scenario)
