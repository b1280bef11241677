"""Run every config under configs/ and write results under results/<name>/."""

import argparse
import sys
from pathlib import Path

from itersig.cli import run

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=ROOT / "results")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    status = 0
    for cfg in sorted((ROOT / "configs").glob("*.yaml")):
        print(f"== {cfg.name}")
        status |= run(cfg, args.out / cfg.stem, args.threads)
    return status


if __name__ == "__main__":
    sys.exit(main())
