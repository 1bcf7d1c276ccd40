"""One recipe per supported figure: which CSV, which columns, how to draw."""

from dataclasses import dataclass


@dataclass(frozen=True)
class FigureRecipe:
    figure_id: str
    kind: str                     # curve | surface | family
    title: str
    ylabel: str
    x: str = ""
    xlabel: str = ""
    family: str = ""
    family_label: str = ""
    log_density: bool = False
    extra_columns: tuple = ()

    @property
    def filename(self):
        return self.figure_id + ".csv"

    @property
    def required_columns(self):
        if self.kind == "curve":
            base = (self.x, "p_cov_analytic", "p_cov_mc", "ci_low", "ci_high")
        elif self.kind == "surface":
            base = ("axis1", "axis2", "value", "axis1_name", "axis2_name")
        else:
            base = (self.x, self.family, "p_cf_analytic")
        return base + self.extra_columns


ANGLE_LABEL = "elevation angle (deg)"
ALT_LABEL = "altitude (m)"
DENSITY_LABEL = "density (UAV/m$^2$)"


def _curve(fid, title, x, xlabel):
    return FigureRecipe(fid, "curve", title, "downlink coverage probability",
                        x=x, xlabel=xlabel)


def _surface(fid, title):
    return FigureRecipe(fid, "surface", title, "downlink coverage probability",
                        log_density=True)


def _family(fid, title, site):
    return FigureRecipe(fid, "family", title, "cell-free coverage probability",
                        x="beta_db", xlabel="SINR threshold (dB)",
                        family="n_antennas", family_label="N",
                        extra_columns=(site,))


RECIPES = {r.figure_id: r for r in (
    _curve("fig2a", "Coverage, fixed elevation angle", "theta_bar_deg", ANGLE_LABEL),
    _surface("fig2b", "Coverage over density and fixed elevation angle"),
    _curve("fig3a", "Coverage, random elevation angle", "theta_bar_deg", ANGLE_LABEL),
    _surface("fig3b", "Coverage over density and random elevation angle"),
    _curve("fig4a", "Coverage, fixed altitude", "h_bar_m", ALT_LABEL),
    _surface("fig4b", "Coverage over density and fixed altitude"),
    _curve("fig5a", "Coverage, uniform altitude", "h_bar_m", ALT_LABEL),
    _surface("fig5b", "Coverage over density and uniform altitude"),
    _family("fig6a", "Cell-free coverage, fixed elevation angle", "theta_bar_deg"),
    _family("fig6b", "Cell-free coverage, fixed altitude", "h_bar_m"),
)}
