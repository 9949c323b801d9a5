"""Tabulate coherence floor and certified entropies over an angle grid as CSV.

    python3 scripts/theta_sweep.py --start 0.05 --stop 0.45 --step 0.01 > sweep.csv
"""

import argparse
import sys

from ringcert.cli import main


def parse_args(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--start", default="0.05")
    p.add_argument("--stop", default="0.45")
    p.add_argument("--step", default="0.01")
    p.add_argument("--oracles", action="store_true", help="also run the brute-force oracles (slower)")
    p.add_argument("--output", help="CSV path; stdout when omitted")
    return p.parse_args(argv)


if __name__ == "__main__":
    a = parse_args()
    argv = ["bounds", "--sweep", f"{a.start}:{a.stop}:{a.step}", "--format", "csv"]
    if a.oracles:
        argv.append("--oracles")
    if a.output:
        argv += ["--output", a.output]
    sys.exit(main(argv))
