"""Figure recipes: which columns to plot, how to group them into curves,
and how to split panels, for each standard preset."""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["FigureRecipe", "PRESET_RECIPES"]


@dataclass(frozen=True)
class FigureRecipe:
    """Declarative description of one figure built from sweep CSV columns.

    ``group_by`` defines the curves: the first entry (conventionally the
    spacetime family) selects the line style, the remaining entries the
    colour.  ``panel_by`` splits side-by-side panels on a column's distinct
    values; ``zoom_by`` adds one extra panel restricted to a single group
    value (the stand-in for the insets of the mass and gap figures).
    """

    name: str
    x: str
    x_scale: str
    y: str
    group_by: tuple[str, ...]
    panel_by: str | None = None
    zoom_by: tuple[str, float] | None = None
    x_label: str = ""
    y_label: str = ""

    def __post_init__(self):
        if self.x_scale not in ("log", "linear"):
            raise ValueError(f"x_scale must be 'log' or 'linear', got {self.x_scale!r}")
        if not self.group_by:
            raise ValueError("group_by must name at least one column")

    def required_columns(self) -> set[str]:
        cols = {self.x, self.y, *self.group_by}
        if self.panel_by:
            cols.add(self.panel_by)
        if self.zoom_by:
            cols.add(self.zoom_by[0])
        return cols


PRESET_RECIPES: dict[str, FigureRecipe] = {
    "fig2": FigureRecipe(
        name="fig2", x="dist_a", x_scale="log", y="p_a",
        group_by=("family", "gap"), panel_by="mass",
        x_label="proper distance from horizon [switching widths]",
        y_label="transition probability per squared coupling",
    ),
    "fig3": FigureRecipe(
        name="fig3", x="mass", x_scale="log", y="x_abs",
        group_by=("family",),
        x_label="black hole mass",
        y_label="|X| per squared coupling",
    ),
    "fig4": FigureRecipe(
        name="fig4", x="mass", x_scale="log", y="concurrence",
        group_by=("family", "gap"), zoom_by=("gap", 1.0),
        x_label="black hole mass",
        y_label="concurrence per squared coupling",
    ),
    "fig5": FigureRecipe(
        name="fig5", x="gap", x_scale="linear", y="concurrence",
        group_by=("family", "mass"), zoom_by=("mass", 0.01),
        x_label="energy gap [inverse switching widths]",
        y_label="concurrence per squared coupling",
    ),
    "fig6": FigureRecipe(
        name="fig6", x="dist_a", x_scale="log", y="concurrence",
        group_by=("family", "gap"),
        x_label="proper distance of detector A from horizon [switching widths]",
        y_label="concurrence per squared coupling",
    ),
    "fig7": FigureRecipe(
        name="fig7", x="mass", x_scale="log", y="d_death",
        group_by=("family", "gap"),
        x_label="black hole mass",
        y_label="shadow boundary distance [switching widths]",
    ),
}
