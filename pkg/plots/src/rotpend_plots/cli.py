"""Render figures from plot spec files:  rotpend-plots render <spec.yaml>...

Exit codes: 0 success, 2 spec/input error (the offending file or column is
named on stderr).
"""

from __future__ import annotations

import argparse
import sys

from .render import render
from .specs import PlotSpecError, load_spec


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="rotpend-plots", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    rp = sub.add_parser("render")
    rp.add_argument("specs", nargs="+", help="plot spec YAML files")
    args = parser.parse_args(argv)
    for path in args.specs:
        try:
            out = render(load_spec(path))
        except PlotSpecError as e:
            print(f"plot spec error in {path}: {e}", file=sys.stderr)
            return 2
        print(f"{path} -> {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
