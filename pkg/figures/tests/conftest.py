"""Synthetic sweep CSVs following the geonharvest CSV contract."""

import math

import pytest

PAIR_COLUMNS = (
    "preset", "family", "mass", "ads_length", "zeta", "gap", "dist_a", "sep",
    "p_a", "p_b", "x_abs", "concurrence",
    "err_p_a", "err_p_b", "err_x_abs", "err_concurrence", "n_max", "error",
)
SHADOW_COLUMNS = (
    "preset", "family", "mass", "ads_length", "zeta", "gap", "sep",
    "d_death", "status", "bracket_lo", "bracket_hi", "error",
)

META = [
    "# tool: geonharvest 0.1.0",
    "# quadrature: rel_tol=1e-10 abs_tol=1e-14",
    "# units: lengths and times in switching widths; observables per squared coupling",
]


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    return f"{value:.11e}"


def _write(path, columns, rows):
    lines = META + [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(row.get(c)) for c in columns))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _fake_concurrence(family, mass, gap, dist):
    bump = 0.05 if family == "geon" else 0.0
    return max(0.0, 0.3 * math.exp(-gap) * (1 - math.exp(-3 * dist)) - 0.02 * math.log10(1 / mass) + bump)


@pytest.fixture
def make_pair_csv(tmp_path):
    def build(name="fig4.csv", masses=(1e-3, 1e-2, 1e-1, 1.0), gaps=(0.01, 0.1, 1.0),
              dists=(1.0,), families=("btz", "geon"), preset="fig4", error_rows=0):
        rows = []
        for mass in masses:
            for gap in gaps:
                for dist in dists:
                    for family in families:
                        conc = _fake_concurrence(family, mass, gap, dist)
                        rows.append({
                            "preset": preset, "family": family, "mass": mass,
                            "ads_length": 10.0, "zeta": 1, "gap": gap,
                            "dist_a": dist, "sep": 0.5,
                            "p_a": 0.4 * math.exp(-gap), "p_b": 0.35 * math.exp(-gap),
                            "x_abs": conc / 2 + 0.1, "concurrence": conc,
                            "err_p_a": 1e-7, "err_p_b": 1e-7, "err_x_abs": 1e-7,
                            "err_concurrence": 4e-7, "n_max": 12, "error": "",
                        })
        for i in range(error_rows):
            row = dict(rows[i])
            for col in ("p_a", "p_b", "x_abs", "concurrence"):
                row[col] = None
            row["error"] = "ValueError: synthetic"
            rows[i] = row
        return _write(tmp_path / name, PAIR_COLUMNS, rows)

    return build


@pytest.fixture
def make_shadow_csv(tmp_path):
    def build(name="fig7.csv", masses=(1e-3, 1e-2, 1e-1, 1.0), gaps=(0.01,),
              families=("btz", "geon"), shadowed_first=True):
        rows = []
        for mass in masses:
            for gap in gaps:
                for family in families:
                    dd = 0.2 + 0.1 * math.log10(1 / mass) + (0.05 if family == "geon" else 0)
                    first = shadowed_first and mass == masses[0] and family == "btz"
                    rows.append({
                        "preset": "fig7", "family": family, "mass": mass,
                        "ads_length": 10.0, "zeta": 1, "gap": gap, "sep": 0.5,
                        "d_death": None if first else dd,
                        "status": "fully_shadowed" if first else "boundary_found",
                        "bracket_lo": None if first else dd - 5e-4,
                        "bracket_hi": None if first else dd + 5e-4,
                        "error": "",
                    })
        return _write(tmp_path / name, SHADOW_COLUMNS, rows)

    return build
