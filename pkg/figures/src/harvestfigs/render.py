"""CSV loading and matplotlib rendering for the preset figures.

The input contract (from the geonharvest sweep CLI): UTF-8 CSV, metadata
in leading ``# key: value`` lines, a header naming every column, empty
fields where a column does not apply to a row, and an ``error`` column
that is empty for clean rows.  Rendering never mutates inputs, so
re-rendering is idempotent.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd

from .recipes import PRESET_RECIPES, FigureRecipe

__all__ = ["SchemaError", "RenderResult", "load_table", "render", "render_all"]

_FAMILY_STYLE = {"btz": "-", "geon": "--"}
_COLORS = plt.rcParams["axes.prop_cycle"].by_key()["color"]


class SchemaError(ValueError):
    """The CSV does not match the sweep contract needed by a recipe."""


@dataclass(frozen=True)
class RenderResult:
    path: Path
    curve_counts: dict
    x_scale: str

    @property
    def total_curves(self) -> int:
        return sum(self.curve_counts.values())


def load_table(path) -> tuple[dict, pd.DataFrame]:
    """Read one sweep CSV into (metadata, dataframe)."""
    path = Path(path)
    metadata = {}
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            body = line[1:].strip()
            if ":" in body:
                key, value = body.split(":", 1)
                metadata[key.strip()] = value.strip()
    frame = pd.read_csv(path, comment="#")
    return metadata, frame


def _check_schema(recipe: FigureRecipe, frame: pd.DataFrame) -> None:
    missing = sorted(recipe.required_columns() - set(frame.columns))
    if missing:
        raise SchemaError(
            f"recipe {recipe.name!r} needs columns {missing} that are absent; "
            f"found columns: {sorted(frame.columns)}"
        )


def _clean(recipe: FigureRecipe, frame: pd.DataFrame) -> pd.DataFrame:
    frame = frame.copy()
    if "error" in frame.columns:
        frame = frame[frame["error"].isna() | (frame["error"].astype(str) == "")]
    if "status" in frame.columns and recipe.y == "d_death":
        frame = frame[frame["status"] == "boundary_found"]
    for col in (recipe.x, recipe.y):
        frame[col] = pd.to_numeric(frame[col], errors="coerce")
    frame = frame.dropna(subset=[recipe.x, recipe.y])
    if frame.empty:
        raise SchemaError(
            f"recipe {recipe.name!r}: no usable rows after filtering "
            f"(column {recipe.y!r} empty or all rows failed)"
        )
    return frame


def _curve_label(group_cols: Sequence[str], key) -> str:
    values = key if isinstance(key, tuple) else (key,)
    parts = []
    for col, value in zip(group_cols, values):
        parts.append(str(value) if col == "family" else f"{col[0].upper()}{col[1:]}={value:g}"
                     if isinstance(value, float) else f"{col}={value}")
    return " ".join(parts)


def _draw_panel(ax, recipe: FigureRecipe, frame: pd.DataFrame) -> int:
    groups = sorted(frame.groupby(list(recipe.group_by)).groups.keys(), key=str)
    color_keys = sorted({g[1:] if isinstance(g, tuple) else () for g in groups}, key=str)
    color_of = {key: _COLORS[i % len(_COLORS)] for i, key in enumerate(color_keys)}
    count = 0
    for key in groups:
        sub = frame
        values = key if isinstance(key, tuple) else (key,)
        for col, value in zip(recipe.group_by, values):
            sub = sub[sub[col] == value]
        sub = sub.sort_values(recipe.x)
        if sub.empty:
            continue
        family = str(values[0]).lower()
        style = _FAMILY_STYLE.get(family, "-")
        color = color_of[tuple(values[1:])]
        ax.plot(sub[recipe.x], sub[recipe.y], style, color=color,
                label=_curve_label(recipe.group_by, key), linewidth=1.4)
        count += 1
    ax.set_xscale(recipe.x_scale)
    ax.set_xlabel(recipe.x_label or recipe.x)
    ax.set_ylabel(recipe.y_label or recipe.y)
    ax.grid(True, which="both", alpha=0.25)
    ax.legend(fontsize=7)
    return count


def render(recipe: FigureRecipe | str, csv_paths, out_path) -> RenderResult:
    """Render one recipe from one or more sweep CSVs into an image file.

    Raises
    ------
    SchemaError
        If required columns are missing or no usable rows remain.
    """
    if isinstance(recipe, str):
        try:
            recipe = PRESET_RECIPES[recipe]
        except KeyError:
            raise SchemaError(
                f"unknown preset {recipe!r}; choose from {sorted(PRESET_RECIPES)}"
            ) from None
    if isinstance(csv_paths, (str, Path)):
        csv_paths = [csv_paths]
    metadata = {}
    frames = []
    for path in csv_paths:
        meta, frame = load_table(path)
        metadata = metadata or meta
        frames.append(frame)
    frame = pd.concat(frames, ignore_index=True)
    _check_schema(recipe, frame)
    frame = _clean(recipe, frame)

    panels: list[tuple[str, pd.DataFrame]] = []
    if recipe.panel_by:
        for value in sorted(frame[recipe.panel_by].dropna().unique()):
            panels.append((f"{recipe.panel_by}={value:g}", frame[frame[recipe.panel_by] == value]))
        if not panels:
            raise SchemaError(f"panel column {recipe.panel_by!r} has no values")
    else:
        panels.append(("", frame))
    if recipe.zoom_by:
        col, value = recipe.zoom_by
        zoomed = frame[frame[col] == value]
        if zoomed.empty:
            raise SchemaError(
                f"zoom group {col}={value} selects no rows; "
                f"available values: {sorted(frame[col].dropna().unique())}"
            )
        panels.append((f"detail: {col}={value:g}", zoomed))

    fig, axes = plt.subplots(
        1, len(panels), figsize=(5.0 * len(panels), 3.8), squeeze=False
    )
    curve_counts = {}
    for ax, (title, sub) in zip(axes[0], panels):
        curve_counts[title or "main"] = _draw_panel(ax, recipe, sub)
        if title:
            ax.set_title(title, fontsize=9)
    footnote = "; ".join(f"{k}: {v}" for k, v in list(metadata.items())[:3])
    if footnote:
        fig.text(0.01, 0.005, footnote, fontsize=5, alpha=0.7)
    fig.tight_layout(rect=(0, 0.02, 1, 1))
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return RenderResult(out_path, curve_counts, recipe.x_scale)


def render_all(directory, out_dir=None) -> list[RenderResult]:
    """Render every recognized preset-named CSV in a directory.

    Files whose stem does not start with a preset name are skipped with a
    warning; files that fail to load or render are reported and the rest
    are still rendered.
    """
    directory = Path(directory)
    out_dir = Path(out_dir) if out_dir else directory
    results = []
    csvs = sorted(directory.glob("*.csv"))
    if not csvs:
        print(f"warning: no CSV files in {directory}", file=sys.stderr)
        return results
    for path in csvs:
        preset = next((p for p in PRESET_RECIPES if path.stem.startswith(p)), None)
        if preset is None:
            print(f"warning: skipping {path.name}: no preset matches", file=sys.stderr)
            continue
        try:
            results.append(render(preset, path, out_dir / f"{path.stem}.png"))
        except Exception as exc:
            print(f"error: {path.name}: {exc}", file=sys.stderr)
    return results
