"""Range of t reachable with one prescribed block per ingredient TD versus alpha."""

from design_forge.constructions import build_projective_plane, build_td, delete_point
from design_forge.errors import PreconditionViolated
from design_forge.parallel import (
    Ingredients,
    Theorem1Params,
    Theorem3Params,
    parallel_class_from_td,
    theorem1,
    theorem3,
)


def ingredients(m):
    td_small, dbs = parallel_class_from_td(build_td(5, 4))
    return Ingredients(
        td_master=build_td(5, m),
        td_small=td_small,
        gdd_uv=delete_point(build_projective_plane(4), 0),
        pbd_fill=build_projective_plane(4),
        td_small_disjoint=dbs.blocks,
    )


def main():
    m = 5
    print("l=4, m=5, u=v=4, K={4,5}")
    print(f"{'t':>3} {'alpha=1':<12} {'alpha=2':<12} {'alpha=4':<12}")
    for t in range(m + 1):
        row = []
        for alpha in (1, 2, 4):
            try:
                if alpha == 1:
                    res = theorem1(Theorem1Params(4, m, 4, 4, t, {4, 5}), ingredients(m))
                else:
                    res = theorem3(Theorem3Params(4, m, 4, 4, t, {4, 5}, alpha=alpha), ingredients(m))
                row.append(str(res.type) if res.passed else "FAILED")
            except PreconditionViolated:
                row.append("-")
        print(f"{t:>3} " + " ".join(f"{c:<12}" for c in row))


if __name__ == "__main__":
    main()
