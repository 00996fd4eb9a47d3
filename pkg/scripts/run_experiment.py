#!/usr/bin/env python3
"""Run one of the shipped experiment configs end to end.

Examples:
    python scripts/run_experiment.py s3_chain --out out/s3
    python scripts/run_experiment.py torus_self_dual --threads 4
"""

import argparse
import sys
from pathlib import Path

from symboot.cli import main as cli_main

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def main() -> int:
    names = sorted(p.stem for p in CONFIG_DIR.glob("*.json"))
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("experiment", choices=names)
    parser.add_argument("--out", default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()
    out = args.out or f"out/{args.experiment}"
    argv = ["pipeline", "--config", str(CONFIG_DIR / f"{args.experiment}.json"), "--out", out,
            "--threads", str(args.threads)]
    if args.seed is not None:
        argv += ["--seed", str(args.seed)]
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
