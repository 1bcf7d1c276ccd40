"""Command line entry point: uavcov-plots."""

import sys

import click

from .recipes import RECIPES
from .render import SchemaError, render

EXIT_INPUT = 2


@click.group()
def main():
    """Render figures from uavcov CSV output."""


@main.command("render")
@click.option("--figure", "figure_id", required=True,
              help="Figure id, fig2a .. fig6b.")
@click.option("--in", "in_dir", required=True,
              help="Directory holding the figure CSVs.")
@click.option("--out", "out_dir", required=True,
              help="Directory for the rendered images.")
def render_cmd(figure_id, in_dir, out_dir):
    """Render one figure as PNG and SVG."""
    recipe = RECIPES.get(figure_id)
    if recipe is None:
        click.echo(f"error: unknown figure id {figure_id!r}; choose one of "
                   f"{', '.join(sorted(RECIPES))}", err=True)
        sys.exit(EXIT_INPUT)
    try:
        written = render(recipe, in_dir, out_dir)
    except SchemaError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    for path in written:
        click.echo(path)


if __name__ == "__main__":
    main()
