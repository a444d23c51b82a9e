"""Exact maximum number of disjoint blocks in TD(l, u) against the lower bound."""

import argparse

from design_forge.constructions import build_td
from design_forge.parallel import find_disjoint_blocks_exact, lemma4_bound


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--u", type=int, nargs="+", default=[2, 3, 4, 5, 7, 8, 9])
    a = ap.parse_args()
    print(f"{'l':>3} {'u':>3} {'exact r':>8} {'bound':>6}")
    for u in a.u:
        for ell in range(2, u + 2):
            r = len(find_disjoint_blocks_exact(build_td(ell, u), cap=10_000))
            print(f"{ell:>3} {u:>3} {r:>8} {lemma4_bound(ell, u):>6}")


if __name__ == "__main__":
    main()
