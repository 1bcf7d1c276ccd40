"""Acceptance gate for the rendering package: every preset CSV renders, and
the cell-free antenna family collapses onto one curve.

The data directory was produced by the simulation CLI (`uavcov figure <id>
--out plots/tests/data --seed 1 --drops 2000`); the commands to refresh it are
in the package README.
"""

import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from uavcov_plots import RECIPES, load_table

DATA = Path(__file__).parent / "data"
FIGURE_IDS = ("fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b",
              "fig5a", "fig5b", "fig6a", "fig6b")


def test_criterion_10_render_all_presets_and_antenna_band(tmp_path):
    t_start = time.time()
    for fid in FIGURE_IDS:
        out = tmp_path / fid
        proc = subprocess.run(
            [sys.executable, "-m", "uavcov_plots.cli", "render",
             "--figure", fid, "--in", str(DATA), "--out", str(out)],
            capture_output=True, text=True)
        assert proc.returncode == 0, (fid, proc.stderr)
        for ext in ("png", "svg"):
            img = out / f"{fid}.{ext}"
            assert img.is_file() and img.stat().st_size > 0, (fid, ext)

    table = load_table(DATA / "fig6a.csv", RECIPES["fig6a"].required_columns)
    beta = table.floats("beta_db")
    pcf = table.floats("p_cf_analytic")
    keys = table.column("n_antennas")
    curves = {}
    for k in sorted(set(keys)):
        mask = np.array([v == k for v in keys])
        order = np.argsort(beta[mask], kind="stable")
        curves[k] = pcf[mask][order]
    assert len(curves) == 5
    stack = np.vstack(list(curves.values()))
    band = float((stack.max(axis=0) - stack.min(axis=0)).max())
    elapsed = time.time() - t_start
    status = "PASS" if band <= 0.01 else "FAIL"
    print(f"criterion 10: {status} (ten presets rendered as png+svg; "
          f"fig6a antenna band {band:.3e} <= 0.01; {elapsed:.1f}s)")
    assert band <= 0.01
