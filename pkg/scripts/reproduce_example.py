"""Build the 5-GDDs of type 5^{4m} (4t+1)^1 for one m and print a table."""

import argparse
import time
from pathlib import Path

from design_forge.io import save_design
from design_forge.parallel import corollary2, corollary2_params


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=11)
    ap.add_argument("--out", help="directory to write each GDD as JSON")
    a = ap.parse_args()

    max_t = corollary2_params(a.m, 0).max_t
    print(f"{'t':>3} {'s':>4} {'points':>7} {'blocks':>7} {'type':<14} {'verified':<9} seconds")
    for t in range(max_t + 1):
        start = time.perf_counter()
        res = corollary2(a.m, t)
        dt = time.perf_counter() - start
        print(f"{t:>3} {4 * t + 1:>4} {res.gdd.n:>7} {len(res.gdd.blocks):>7} "
              f"{str(res.type):<14} {str(res.passed):<9} {dt:.3f}")
        if a.out:
            Path(a.out).mkdir(parents=True, exist_ok=True)
            save_design(res.gdd, Path(a.out) / f"gdd_m{a.m}_t{t}.json")


if __name__ == "__main__":
    main()
