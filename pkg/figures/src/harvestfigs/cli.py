"""Command line: render one preset figure or a whole directory of CSVs.

Exit codes: 0 success, 1 usage error, 2 schema or rendering failure.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .recipes import PRESET_RECIPES
from .render import SchemaError, render, render_all

USAGE_EXIT = 1
RENDER_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="harvestfigs",
                     description="Render geonharvest sweep CSVs into comparison figures")
    parser.add_argument("--version", action="version", version=f"harvestfigs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_render = sub.add_parser("render", help="render one preset figure")
    p_render.add_argument("--csv", required=True, nargs="+", help="input sweep CSV path(s)")
    p_render.add_argument("--preset", required=True, choices=sorted(PRESET_RECIPES))
    p_render.add_argument("--out", required=True, help="output image path")

    p_all = sub.add_parser("render-all", help="render every preset-named CSV in a directory")
    p_all.add_argument("--dir", required=True, help="directory of preset-named CSVs")
    p_all.add_argument("--out-dir", help="image output directory (default: same directory)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "render":
            result = render(args.preset, args.csv, args.out)
            print(f"wrote {result.path} ({result.total_curves} curves)")
        else:
            results = render_all(args.dir, args.out_dir)
            for result in results:
                print(f"wrote {result.path} ({result.total_curves} curves)")
    except SchemaError as exc:
        print(f"harvestfigs: schema error: {exc}", file=sys.stderr)
        return RENDER_EXIT
    except OSError as exc:
        print(f"harvestfigs: error: {exc}", file=sys.stderr)
        return RENDER_EXIT
    return 0


if __name__ == "__main__":
    sys.exit(main())
