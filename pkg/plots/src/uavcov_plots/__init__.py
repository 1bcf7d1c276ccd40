"""Publication-style figures from uavcov CSV files.

This package never computes coverage itself; it draws whatever the CSV
contract delivers, so the numerical single source of truth stays in the
simulation package.
"""

from .recipes import RECIPES, FigureRecipe
from .render import SchemaError, load_table, render

__all__ = ["RECIPES", "FigureRecipe", "SchemaError", "load_table", "render"]

__version__ = "0.1.0"
