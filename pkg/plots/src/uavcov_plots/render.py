"""CSV loading and matplotlib rendering for the figure recipes.

The CSV files start with a provenance comment (config digest and seed)
followed by a header row; both are preserved untouched.  Outputs are
deterministic for identical input: the SVG creation date is suppressed and
its hash salt is pinned to the figure id, and nothing here consults clocks,
RNGs, or the network.
"""

import csv
import math
import os

import matplotlib
import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure
from matplotlib.ticker import FuncFormatter

from .recipes import FigureRecipe

PNG_DPI = 150


class SchemaError(Exception):
    """Input file absent, empty, or missing a required column."""


# ---------------------------------------------------------------------------
# input


class Table:
    def __init__(self, preamble, header, rows):
        self.preamble = preamble
        self.header = header
        self.rows = rows

    def column(self, name):
        idx = self.header.index(name)
        return [row[idx] for row in self.rows]

    def floats(self, name):
        return np.array([float(v) if v != "" else math.nan
                         for v in self.column(name)])


def load_table(path, required_columns=()):
    if not os.path.isfile(path):
        raise SchemaError(f"missing input file {path}")
    preamble = []
    with open(path, newline="") as fh:
        pos = fh.tell()
        line = fh.readline()
        while line.startswith("#"):
            preamble.append(line.rstrip("\n"))
            pos = fh.tell()
            line = fh.readline()
        fh.seek(pos)
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{os.path.basename(path)} has no header row") from None
        rows = [row for row in reader if row]
    name = os.path.basename(path)
    for col in required_columns:
        if col not in header:
            raise SchemaError(f"{name} is missing required column {col!r}")
    if not rows:
        raise SchemaError(f"{name} has no data rows")
    width = len(header)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise SchemaError(f"{name} row {i + 1} has {len(row)} fields, "
                              f"expected {width}")
    return Table(preamble, header, rows)


# ---------------------------------------------------------------------------
# drawing


def _new_figure(three_d=False):
    fig = Figure(figsize=(6.4, 4.8))
    FigureCanvasAgg(fig)
    if three_d:
        ax = fig.add_subplot(projection="3d")
    else:
        ax = fig.add_subplot()
    return fig, ax


def _finish_2d(ax, recipe):
    ax.set_xlabel(recipe.xlabel)
    ax.set_ylabel(recipe.ylabel)
    ax.set_title(recipe.title)
    ax.grid(True, alpha=0.3)


def _draw_curve(recipe, table):
    fig, ax = _new_figure()
    x = table.floats(recipe.x)
    ana = table.floats("p_cov_analytic")
    if np.isfinite(ana).any():
        ax.plot(x, ana, "-", color="tab:blue", label="analytic")
    mc = table.floats("p_cov_mc")
    have = np.isfinite(mc)
    if have.any():
        lo = table.floats("ci_low")[have]
        hi = table.floats("ci_high")[have]
        mid = mc[have]
        ax.errorbar(x[have], mid, yerr=(mid - lo, hi - mid), fmt="o",
                    color="tab:red", markersize=4, capsize=3, linestyle="none",
                    label="simulation")
    ax.legend()
    _finish_2d(ax, recipe)
    return fig


_FAMILY_STYLES = (("-", "o"), ("--", "s"), ("-.", "^"), (":", "d"), ("-", "x"))


def _family_text(raw):
    return r"$N=\infty$" if raw == "inf" else f"$N={raw}$"


def _draw_family(recipe, table):
    fig, ax = _new_figure()
    x = table.floats(recipe.x)
    y = table.floats("p_cf_analytic")
    keys = table.column(recipe.family)
    seen = []
    for k in keys:
        if k not in seen:
            seen.append(k)
    for j, k in enumerate(seen):
        mask = np.array([v == k for v in keys])
        ls, marker = _FAMILY_STYLES[j % len(_FAMILY_STYLES)]
        order = np.argsort(x[mask], kind="stable")
        ax.plot(x[mask][order], y[mask][order], linestyle=ls, marker=marker,
                markevery=(3 * j + 2, 11), markersize=4,
                label=_family_text(k))
    ax.legend(title=recipe.family_label)
    _finish_2d(ax, recipe)
    return fig


def _decade_ticks(ax, values):
    ax.set_yticks(sorted(set(np.round(values, 6))))
    ax.yaxis.set_major_formatter(FuncFormatter(lambda v, _: f"$10^{{{v:g}}}$"))


def _draw_surface(recipe, table):
    a1 = table.floats("axis1")
    a2 = table.floats("axis2")
    z = table.floats("value")
    a1_name = table.column("axis1_name")[0]
    xlabel = {"theta_bar_deg": "elevation angle (deg)",
              "h_bar_m": "altitude (m)"}.get(a1_name, a1_name)
    u1 = np.unique(a1)
    u2 = np.unique(a2)
    grid = np.full((u2.size, u1.size), math.nan)
    for xi, yi, zi in zip(a1, a2, z):
        grid[np.searchsorted(u2, yi), np.searchsorted(u1, xi)] = zi
    fig, ax = _new_figure(three_d=True)
    ly = np.log10(u2) if recipe.log_density else u2
    xg, yg = np.meshgrid(u1, ly)
    ax.plot_surface(xg, yg, grid, cmap="viridis", edgecolor="none",
                    antialiased=True)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("density (UAV/m$^2$)")
    ax.set_zlabel(recipe.ylabel)
    ax.set_title(recipe.title)
    if recipe.log_density:
        _decade_ticks(ax, ly)
    return fig


_DRAWERS = {"curve": _draw_curve, "family": _draw_family,
            "surface": _draw_surface}


def build_figure(recipe: FigureRecipe, table: Table):
    return _DRAWERS[recipe.kind](recipe, table)


# ---------------------------------------------------------------------------
# output


def render(recipe: FigureRecipe, in_dir, out_dir, formats=("png", "svg")):
    """Validate the recipe's CSV, draw it, and write one file per format.

    Validation happens before anything is created, so a bad input leaves the
    output directory untouched.
    """
    table = load_table(os.path.join(in_dir, recipe.filename),
                       recipe.required_columns)
    fig = build_figure(recipe, table)
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for fmt in formats:
        path = os.path.join(out_dir, f"{recipe.figure_id}.{fmt}")
        if fmt == "svg":
            with matplotlib.rc_context({"svg.hashsalt": recipe.figure_id}):
                fig.savefig(path, format="svg", metadata={"Date": None})
        else:
            fig.savefig(path, format=fmt, dpi=PNG_DPI)
        written.append(path)
    return written
