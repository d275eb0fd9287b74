"""Command line entry point: render_figures <csv_dir> <out_dir> [--only <figure-id>]."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from fleetfigs.render import FIGURE_IDS, RenderError, build_spec, render


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_figures",
        description="Render the fleetlab figure layouts from a directory of CSV artifacts",
    )
    parser.add_argument("csv_dir", type=Path, help="directory with the pipeline's CSV outputs")
    parser.add_argument("out_dir", type=Path, help="directory to write PNG and SVG files")
    parser.add_argument(
        "--only", choices=FIGURE_IDS, default=None, help="render a single figure"
    )
    args = parser.parse_args(argv)

    if not args.csv_dir.is_dir():
        print(f"error: csv_dir not found: {args.csv_dir}", file=sys.stderr)
        return 2

    figure_ids = (args.only,) if args.only else FIGURE_IDS
    try:
        for figure_id in figure_ids:
            png, svg = render(build_spec(figure_id, args.csv_dir, args.out_dir))
            print(f"ok: {figure_id} -> {png}, {svg}")
    except RenderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
