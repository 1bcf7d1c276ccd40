"""Command line front end: single-point evaluation, parameter sweeps, figure
presets, and the built-in validation suites.

Every output is CSV with one leading comment line carrying the config digest
and the seed, so downstream plots are traceable to exact inputs.  Outputs
contain no timestamps; rerunning a command with identical inputs reproduces
the file byte for byte.

Exit codes: 0 success, 2 configuration error, 3 numerical non-convergence,
4 validation failure.
"""

from __future__ import annotations

import csv
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import click
import numpy as np

from .inversion import InversionError, verification_corpus
from .model import (Apdl, Apil, ConfigError, DegenerateAltitude,
                    DegenerateAngle, GammaTanAngle, NetworkConfig,
                    ProportionalAltitude, UniformAltitude, config_digest,
                    describe_scenario, db_to_linear, load_config, mw_to_dbm,
                    parse_config)

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VALIDATION = 4

THETA_GRID_DEG = [float(x) for x in range(5, 85, 5)]
ALTITUDE_GRID_M = [float(x) for x in range(10, 160, 10)]
DENSITY_GRID = [float(x) for x in np.geomspace(1e-7, 1e-5, 9)]
BETA_GRID_DB = [float(x) for x in np.linspace(-20.0, 20.0, 41)]
ANTENNA_LIST = [1, 2, 4, 8, math.inf]

FIGURE_IDS = ("fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b",
              "fig5a", "fig5b", "fig6a", "fig6b")


def _noise_dbm(cfg):
    if cfg.noise_mw == 0.0:
        return -math.inf
    return float(mw_to_dbm(cfg.noise_mw))


def _beta_db(cfg):
    return 10.0 * math.log10(cfg.beta)


def _fmt_n(n):
    return "inf" if n == math.inf else str(int(n))


def _param_cols(exclude=()):
    cols = ["lambda", "n_antennas", "beta_db", "alpha", "ell", "power_mw",
            "noise_dbm", "scenario_kind", "scenario_variant"]
    return [c for c in cols if c not in exclude]


def _param_vals(cfg, scenario, exclude=()):
    d = describe_scenario(scenario)
    variant = d.get("angle", d.get("altitude", ""))
    vals = {"lambda": repr(cfg.density), "n_antennas": _fmt_n(cfg.n_antennas),
            "beta_db": repr(_beta_db(cfg)), "alpha": repr(cfg.alpha),
            "ell": repr(cfg.ell), "power_mw": repr(cfg.power_mw),
            "noise_dbm": repr(_noise_dbm(cfg)), "scenario_kind": d["kind"],
            "scenario_variant": variant}
    return [vals[c] for c in _param_cols(exclude)]


def _write_csv(path, digest, seed, header, rows):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(f"# config={digest} seed={seed}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _pool_map(fn, tasks, threads):
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))


# worker functions are module level so sweep points can run in subprocesses


def _analytic_task(args):
    cfg, scenario, cellfree = args
    from .coverage import cellfree as cf_op, coverage
    op = cf_op if cellfree else coverage
    return op(cfg, scenario).value


def _bound_task(args):
    cfg, scenario = args
    from .coverage import coverage_lower_bound
    return coverage_lower_bound(cfg, scenario).value


def _mc_task(args):
    cfg, scenario, cellfree, drops, seed = args
    from .montecarlo import McSpec, estimate_cellfree, estimate_coverage
    mc = McSpec(n_drops=drops, seed=seed)
    betas = np.array([cfg.beta])
    massive = cfg.n_antennas == math.inf
    if cellfree:
        ests, _ = estimate_cellfree(cfg, scenario, betas, mc, massive=massive)
    else:
        ests, _ = estimate_coverage(cfg, scenario, betas, mc, massive=massive)
    e = ests[0]
    return e.mean, e.ci_low, e.ci_high


# ---------------------------------------------------------------------------
# figure presets (fixed reference parameters; only explicit flags override)


def _table_cfg(**overrides):
    base = dict(density=1e-7, n_antennas=4)
    base.update(overrides)
    return NetworkConfig(**base)


def _preset_downlink_curve(axis_name, axis_values, scen_of, density, out,
                           seed, drops, threads, method):
    cfgs = [_table_cfg(density=density)] * len(axis_values)
    scens = [scen_of(v) for v in axis_values]
    header = ([axis_name, "p_cov_analytic", "p_cov_mc", "ci_low", "ci_high"]
              + _param_cols())
    ana = [""] * len(axis_values)
    mc = [("", "", "")] * len(axis_values)
    if method in ("analytic", "both"):
        ana = _pool_map(_analytic_task,
                        [(c, s, False) for c, s in zip(cfgs, scens)], threads)
        ana = [repr(v) for v in ana]
    if method in ("mc", "both"):
        mc = _pool_map(_mc_task,
                       [(c, s, False, drops, seed) for c, s in zip(cfgs, scens)],
                       threads)
        mc = [tuple(repr(x) for x in t) for t in mc]
    rows = []
    for v, a, m, c, s in zip(axis_values, ana, mc, cfgs, scens):
        rows.append([repr(v), a, m[0], m[1], m[2]] + _param_vals(c, s))
    digest = config_digest(cfgs[0], scens[0])
    _write_csv(out, digest, seed, header, rows)


def _preset_surface(axis1_name, axis1_values, scen_of, out, seed, threads):
    tasks = []
    grid = []
    for v1 in axis1_values:
        for lam in DENSITY_GRID:
            cfg = _table_cfg(density=lam)
            grid.append((v1, lam, cfg, scen_of(v1)))
            tasks.append((cfg, scen_of(v1), False))
    vals = _pool_map(_analytic_task, tasks, threads)
    header = (["axis1", "axis2", "value", "axis1_name", "axis2_name"]
              + _param_cols())
    rows = []
    for (v1, lam, cfg, scen), val in zip(grid, vals):
        rows.append([repr(v1), repr(lam), repr(val), axis1_name, "lambda"]
                    + _param_vals(cfg, scen))
    digest = config_digest(grid[0][2], grid[0][3])
    _write_csv(out, digest, seed, header, rows)


def _preset_cellfree(scenario, site_col, site_val, out, seed, threads):
    tasks = []
    grid = []
    for n in ANTENNA_LIST:
        for bdb in BETA_GRID_DB:
            cfg = _table_cfg(density=1e-6, n_antennas=n,
                             beta=float(db_to_linear(bdb)))
            grid.append((bdb, n, cfg))
            tasks.append((cfg, scenario, True))
    vals = _pool_map(_analytic_task, tasks, threads)
    skip = ("beta_db", "n_antennas")
    header = (["beta_db", "n_antennas", "p_cf_analytic", site_col]
              + _param_cols(skip))
    rows = []
    for (bdb, n, cfg), val in zip(grid, vals):
        rows.append([repr(float(bdb)), _fmt_n(n), repr(val), repr(site_val)]
                    + _param_vals(cfg, scenario, skip))
    digest = config_digest(grid[0][2], scenario)
    _write_csv(out, digest, seed, header, rows)


def _run_figure(figure_id, out_dir, seed, drops, threads, method):
    out = os.path.join(out_dir, f"{figure_id}.csv")
    if figure_id == "fig2a":
        _preset_downlink_curve(
            "theta_bar_deg", THETA_GRID_DEG,
            lambda d: Apil(DegenerateAngle(math.radians(d))),
            1e-7, out, seed, drops, threads, method or "both")
    elif figure_id == "fig3a":
        _preset_downlink_curve(
            "theta_bar_deg", THETA_GRID_DEG,
            lambda d: Apil(GammaTanAngle(4.0, math.radians(d))),
            1e-7, out, seed, drops, threads, method or "both")
    elif figure_id == "fig4a":
        _preset_downlink_curve(
            "h_bar_m", ALTITUDE_GRID_M,
            lambda h: Apdl(DegenerateAltitude(h)),
            1e-5, out, seed, drops, threads, method or "both")
    elif figure_id == "fig5a":
        _preset_downlink_curve(
            "h_bar_m", ALTITUDE_GRID_M,
            lambda h: Apdl(UniformAltitude(h, 5.0)),
            1e-5, out, seed, drops, threads, method or "both")
    elif figure_id == "fig2b":
        _preset_surface("theta_bar_deg", THETA_GRID_DEG,
                        lambda d: Apil(DegenerateAngle(math.radians(d))),
                        out, seed, threads)
    elif figure_id == "fig3b":
        _preset_surface("theta_bar_deg", THETA_GRID_DEG,
                        lambda d: Apil(GammaTanAngle(4.0, math.radians(d))),
                        out, seed, threads)
    elif figure_id == "fig4b":
        _preset_surface("h_bar_m", ALTITUDE_GRID_M,
                        lambda h: Apdl(DegenerateAltitude(h)),
                        out, seed, threads)
    elif figure_id == "fig5b":
        _preset_surface("h_bar_m", ALTITUDE_GRID_M,
                        lambda h: Apdl(UniformAltitude(h, 5.0)),
                        out, seed, threads)
    elif figure_id == "fig6a":
        _preset_cellfree(Apil(DegenerateAngle(math.radians(5.0))),
                         "theta_bar_deg", 5.0, out, seed, threads)
    elif figure_id == "fig6b":
        _preset_cellfree(Apdl(DegenerateAltitude(40.0)),
                         "h_bar_m", 40.0, out, seed, threads)
    else:
        raise ConfigError(f"unknown figure id {figure_id!r}; "
                          f"choose one of {', '.join(FIGURE_IDS)}")
    return out


# ---------------------------------------------------------------------------
# validation suites


def _validate_checks(drops, seed, threads):
    """MC versus analytic cross-checks at reference parameters.  Yields
    (name, passed, detail) as each check completes."""
    from .coverage import (cellfree_apil, cellfree_apil_erf, coverage,
                           coverage_apil, coverage_apil_massive,
                           coverage_lower_bound)
    from .montecarlo import McSpec, estimate_coverage

    mc = McSpec(n_drops=drops, seed=seed)
    angle20 = Apil(DegenerateAngle(math.radians(20.0)))

    # interference-limited closed form inside the MC confidence interval
    cfg0 = NetworkConfig(density=1e-6, noise_mw=0.0, n_antennas=1)
    betas = np.array([0.1, 1.0, 10.0])
    ests, _ = estimate_coverage(cfg0, angle20, betas, mc)
    for b, e in zip(betas, ests):
        ref = coverage_apil(NetworkConfig(density=1e-6, noise_mw=0.0,
                                          n_antennas=1, beta=float(b)),
                            angle20).value
        ok = e.ci_low <= ref <= e.ci_high
        yield (f"closed-form vs mc @beta={b:g}", ok,
               f"analytic={ref:.5f} ci=[{e.ci_low:.5f},{e.ci_high:.5f}]")

    # density invariance of the interference-limited value
    vals = [coverage_apil(NetworkConfig(density=lam, noise_mw=0.0,
                                        n_antennas=1), angle20).value
            for lam in (1e-7, 1e-6, 1e-5)]
    spread = max(vals) - min(vals)
    yield ("density invariance (no noise)", spread <= 1e-9,
           f"spread={spread:.2e}")

    # cell-free inversion equals the alpha=4 closed form
    worst = 0.0
    for n in (1, 4):
        for bdb in (-20.0, 0.0, 20.0):
            cfg = NetworkConfig(density=1e-6, alpha=4.0, n_antennas=n,
                                beta=float(db_to_linear(bdb)))
            sc = Apil(DegenerateAngle(math.radians(5.0)))
            a = cellfree_apil(cfg, sc).value
            b = cellfree_apil_erf(cfg, sc).value
            worst = max(worst, abs(a - b) / b)
    yield ("cell-free inversion vs closed form", worst <= 1e-6,
           f"worst rel={worst:.2e}")

    # downlink operating points against MC
    points = [
        ("downlink angle-marked point", _table_cfg(density=1e-7), angle20),
        ("downlink altitude-marked point", _table_cfg(density=1e-5),
         Apdl(DegenerateAltitude(40.0))),
    ]
    for name, cfg, scen in points:
        ana = coverage(cfg, scen).value
        m, lo, hi = _mc_task((cfg, scen, False, drops, seed))
        ok = abs(ana - m) <= 0.01
        yield (name, ok, f"analytic={ana:.5f} mc={m:.5f}")

    # hardened large-array limit against the concentration-limit estimator
    cfgI = NetworkConfig(density=1e-7, n_antennas=math.inf)
    ana = coverage_apil_massive(cfgI, angle20).value
    m, lo, hi = _mc_task((cfgI, angle20, False, drops, seed))
    yield ("large-array limit vs mc", abs(ana - m) <= 0.01,
           f"analytic={ana:.5f} mc={m:.5f}")

    # single-antenna lower bounds stay below the exact values
    for name, cfg, scen in [
            ("bound below exact (angle-marked)", _table_cfg(density=1e-7,
                                                            n_antennas=1),
             angle20),
            ("bound below exact (altitude-marked)", _table_cfg(density=1e-5,
                                                               n_antennas=1),
             Apdl(DegenerateAltitude(40.0)))]:
        ex = coverage(cfg, scen).value
        lb = coverage_lower_bound(cfg, scen).value
        yield (name, lb <= ex + 1e-9, f"bound={lb:.5f} exact={ex:.5f}")


def _print_table(results):
    width = max(len(name) for name, _, _ in results)
    failures = 0
    for name, ok, detail in results:
        tag = "PASS" if ok else "FAIL"
        click.echo(f"{tag}  {name:<{width}}  {detail}")
        if not ok:
            failures += 1
    click.echo(f"{len(results) - failures}/{len(results)} checks passed")
    return failures


# ---------------------------------------------------------------------------
# commands


def _common_options(fn):
    opts = [
        click.option("--out", "out_dir", default=".", show_default=True,
                     help="Output directory for CSV files."),
        click.option("--seed", default=1, show_default=True, type=int,
                     help="Base seed for all Monte Carlo streams."),
        click.option("--drops", default=100_000, show_default=True, type=int,
                     help="Monte Carlo drops per estimate."),
        click.option("--threads", default=None, type=int,
                     help="Worker pool size (default: logical cores)."),
        click.option("--tol", default=1e-7, show_default=True, type=float,
                     help="Target relative tolerance for inversions."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _resolve_threads(threads):
    return threads if threads and threads > 0 else (os.cpu_count() or 1)


def _load_required_config(config_path):
    if config_path is None:
        raise ConfigError("--config is required for this command")
    return load_config(config_path)


def _guard(fn):
    try:
        return fn()
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except ValueError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except InversionError as exc:
        click.echo(f"numerical error: {exc}", err=True)
        sys.exit(EXIT_NUMERIC)
    except RuntimeError as exc:
        click.echo(f"numerical error: {exc}", err=True)
        sys.exit(EXIT_NUMERIC)


@click.group()
def main():
    """Coverage probabilities for aerial cellular networks."""


@main.command("coverage")
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="TOML network description (required).")
@click.option("--method", type=click.Choice(["analytic", "mc", "both"]),
              default="analytic", show_default=True)
@click.option("--cellfree", is_flag=True, default=False,
              help="Evaluate the joint-transmission coverage instead.")
@_common_options
def coverage_cmd(config_path, method, cellfree, out_dir, seed, drops, threads,
                 tol):
    """Evaluate coverage at a single parameter point and write coverage.csv."""

    def body():
        cfg, scenario = _load_required_config(config_path)
        prefix = "p_cf" if cellfree else "p_cov"
        ana = ""
        m = ("", "", "")
        if method in ("analytic", "both"):
            ana = repr(_analytic_task((cfg, scenario, cellfree)))
        if method in ("mc", "both"):
            m = tuple(repr(x) for x in
                      _mc_task((cfg, scenario, cellfree, drops, seed)))
        header = ([f"{prefix}_analytic", f"{prefix}_mc", "ci_low", "ci_high"]
                  + _param_cols())
        rows = [[ana, m[0], m[1], m[2]] + _param_vals(cfg, scenario)]
        path = os.path.join(out_dir, "coverage.csv")
        _write_csv(path, config_digest(cfg, scenario), seed, header, rows)
        click.echo(path)

    _guard(body)


def _parse_grid(text):
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if len(parts) == 4 and parts[3] in ("linear", "log"):
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ConfigError("grid count must be positive")
        if parts[3] == "log":
            if lo <= 0 or hi <= 0:
                raise ConfigError("log grid endpoints must be positive")
            return [float(x) for x in np.geomspace(lo, hi, count)]
        return [float(x) for x in np.linspace(lo, hi, count)]
    if not parts:
        raise ConfigError("empty grid")
    return [math.inf if p == "inf" else float(p) for p in parts]


def _apply_axis(cfg, scenario, axis, value):
    if axis == "lambda":
        return NetworkConfig(**{**_cfg_kwargs(cfg), "density": value}), scenario
    if axis == "beta_db":
        return NetworkConfig(**{**_cfg_kwargs(cfg),
                                "beta": float(db_to_linear(value))}), scenario
    if axis == "n_antennas":
        n = math.inf if value == math.inf else int(value)
        return NetworkConfig(**{**_cfg_kwargs(cfg), "n_antennas": n}), scenario
    if axis == "theta_bar":
        if not isinstance(scenario, Apil):
            raise ConfigError("theta_bar sweeps need an angle-marked scenario")
        a = scenario.angle
        rad = math.radians(value)
        if isinstance(a, DegenerateAngle):
            return cfg, Apil(DegenerateAngle(rad))
        return cfg, Apil(GammaTanAngle(a.shape, rad))
    if axis == "h_bar":
        if not isinstance(scenario, Apdl):
            raise ConfigError("h_bar sweeps need an altitude-marked scenario")
        alt = scenario.altitude
        if isinstance(alt, UniformAltitude):
            return cfg, Apdl(UniformAltitude(value, alt.half_width))
        if isinstance(alt, ProportionalAltitude):
            raise ConfigError("h_bar sweeps do not apply to proportional "
                              "altitudes")
        return cfg, Apdl(DegenerateAltitude(value))
    raise ConfigError(f"unknown sweep axis {axis!r}")


def _cfg_kwargs(cfg):
    return dict(density=cfg.density, power_mw=cfg.power_mw,
                noise_mw=cfg.noise_mw, alpha=cfg.alpha, ell=cfg.ell,
                c1=cfg.c1, c2=cfg.c2, n_antennas=cfg.n_antennas, beta=cfg.beta)


@main.command("sweep")
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="TOML network description (required).")
@click.option("--axis", required=True,
              type=click.Choice(["theta_bar", "h_bar", "lambda", "beta_db",
                                 "n_antennas"]))
@click.option("--grid", required=True,
              help="Either 'min,max,count,linear|log' or an explicit "
                   "comma-separated list.")
@click.option("--methods", default="analytic", show_default=True,
              help="Comma-separated subset of analytic,mc,bound,closed_form.")
@click.option("--cellfree", is_flag=True, default=False)
@_common_options
def sweep_cmd(config_path, axis, grid, methods, cellfree, out_dir, seed, drops,
              threads, tol):
    """Sweep one axis over a grid and write sweep.csv in grid order."""

    def body():
        cfg, scenario = _load_required_config(config_path)
        values = _parse_grid(grid)
        wanted = [m.strip() for m in methods.split(",") if m.strip()]
        allowed = {"analytic", "mc", "bound", "closed_form"}
        bad = set(wanted) - allowed
        if bad:
            raise ConfigError(f"unknown methods: {', '.join(sorted(bad))}")
        nthreads = _resolve_threads(threads)
        points = [_apply_axis(cfg, scenario, axis, v) for v in values]
        prefix = "p_cf" if cellfree else "p_cov"
        columns = {}
        if "analytic" in wanted:
            vals = _pool_map(_analytic_task,
                             [(c, s, cellfree) for c, s in points], nthreads)
            columns[f"{prefix}_analytic"] = [repr(v) for v in vals]
        if "bound" in wanted:
            if cellfree:
                raise ConfigError("bound method applies to downlink only")
            vals = _pool_map(_bound_task, list(points), nthreads)
            columns[f"{prefix}_bound"] = [repr(v) for v in vals]
        if "closed_form" in wanted:
            vals = [repr(_closed_form_value(c, s, cellfree))
                    for c, s in points]
            columns[f"{prefix}_closed_form"] = vals
        if "mc" in wanted:
            if axis == "beta_db" and not cellfree:
                # common random numbers: one simulation pass, all thresholds
                from .montecarlo import McSpec, estimate_coverage
                betas = np.array([c.beta for c, _ in points])
                ests, _ = estimate_coverage(
                    cfg, scenario, betas, McSpec(n_drops=drops, seed=seed),
                    massive=cfg.n_antennas == math.inf)
                trip = [(e.mean, e.ci_low, e.ci_high) for e in ests]
            else:
                trip = _pool_map(_mc_task,
                                 [(c, s, cellfree, drops, seed)
                                  for c, s in points], nthreads)
            columns[f"{prefix}_mc"] = [repr(t[0]) for t in trip]
            columns["ci_low"] = [repr(t[1]) for t in trip]
            columns["ci_high"] = [repr(t[2]) for t in trip]
        skip = (axis,) if axis in _param_cols() else ()
        header = [axis] + list(columns) + _param_cols(skip)
        rows = []
        for i, (v, (c, s)) in enumerate(zip(values, points)):
            rows.append([repr(v)] + [columns[k][i] for k in columns]
                        + _param_vals(c, s, skip))
        path = os.path.join(out_dir, "sweep.csv")
        _write_csv(path, config_digest(cfg, scenario), seed, header, rows)
        click.echo(path)

    _guard(body)


def _closed_form_value(cfg, scenario, cellfree):
    from .coverage import cellfree_apil_erf, cellfree_apdl_erf, coverage_apil
    if cellfree:
        if isinstance(scenario, Apil):
            return cellfree_apil_erf(cfg, scenario).value
        return cellfree_apdl_erf(cfg, scenario).value
    if cfg.noise_mw != 0.0 or cfg.n_antennas != 1:
        raise ConfigError("downlink closed form requires no noise and a "
                          "single antenna")
    if not isinstance(scenario, Apil):
        raise ConfigError("downlink closed form requires an angle-marked "
                          "scenario")
    return coverage_apil(cfg, scenario).value


@main.command("figure")
@click.argument("figure_id")
@click.option("--method", type=click.Choice(["analytic", "mc", "both"]),
              default=None, help="Override the preset method choice.")
@_common_options
def figure_cmd(figure_id, method, out_dir, seed, drops, threads, tol):
    """Write the CSV for one preset figure (fig2a .. fig6b).

    Presets pin the reference parameter set; use coverage/sweep with an
    explicit config for anything else.
    """

    def body():
        nthreads = _resolve_threads(threads)
        path = _run_figure(figure_id, out_dir, seed, drops, nthreads, method)
        click.echo(path)

    _guard(body)


@main.command("validate")
@_common_options
def validate_cmd(out_dir, seed, drops, threads, tol):
    """Cross-check analytic formulas against simulation; exit 4 on failure."""

    def body():
        results = list(_validate_checks(drops, seed, _resolve_threads(threads)))
        if _print_table(results):
            sys.exit(EXIT_VALIDATION)

    _guard(body)


@main.command("selftest")
@_common_options
def selftest_cmd(out_dir, seed, drops, threads, tol):
    """Run the inversion and derivative corpus; exit 4 on failure."""

    def body():
        results = verification_corpus()
        if _print_table(results):
            sys.exit(EXIT_VALIDATION)

    _guard(body)


if __name__ == "__main__":
    main()
