"""Figure rendering for geonharvest sweep CSVs.

Consumes only the CSV contract of the geonharvest CLI (``#``-prefixed
metadata lines, a header row, comma-separated values, empty fields for
inapplicable columns) and renders the standard comparison figures: BTZ
solid, geon dashed, one colour per gap or mass, log or linear axes per
preset.
"""

__version__ = "0.1.0"

from .recipes import PRESET_RECIPES, FigureRecipe
from .render import RenderResult, SchemaError, load_table, render, render_all

__all__ = [
    "__version__",
    "FigureRecipe",
    "PRESET_RECIPES",
    "RenderResult",
    "SchemaError",
    "load_table",
    "render",
    "render_all",
]
