import itertools
from collections import Counter

import pytest

from design_forge.constructions import (
    build_affine_plane,
    build_projective_plane,
    build_td,
    delete_point,
    truncate_td,
)
from design_forge.core import Design, relabel
from design_forge.parallel import Ingredients, parallel_class_from_td

ACCEPTANCE_LINES = []


def brute_force_gdd(n, groups, blocks, K):
    """Independent GDD check: plain dict pair counts, no numpy."""
    group_of = {p: i for i, g in enumerate(groups) for p in g}
    if sorted(group_of) != list(range(n)):
        return False
    count = Counter()
    for b in blocks:
        if len(b) not in K:
            return False
        if len({group_of[p] for p in b}) != len(b):
            return False
        for a, c in itertools.combinations(sorted(b), 2):
            count[a, c] += 1
    for a, c in itertools.combinations(range(n), 2):
        want = 0 if group_of[a] == group_of[c] else 1
        if count[a, c] != want:
            return False
    return True


def brute_force_pbd(n, blocks, K):
    return brute_force_gdd(n, [(p,) for p in range(n)], blocks, K)


def record_acceptance(label, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f" -- {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)


@pytest.fixture
def acceptance():
    return record_acceptance


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


SMALL_MASTERS = [
    build_td(3, 2),
    build_td(3, 3),
    build_td(4, 3),
    build_td(3, 4),
    build_projective_plane(2),
    build_affine_plane(3),
    truncate_td(build_td(4, 3), 1).design,
    delete_point(build_projective_plane(3), 0),
    Design(5, [[0, 1], [2, 3], [4]], [[0, 2, 4], [0, 3], [1, 2], [1, 3, 4]]),
]


def random_wfc_case(rng):
    """A relabeled small master and weights in {1,2,3}, half of them uniform."""
    master = rng.choice(SMALL_MASTERS)
    perm = list(range(master.n))
    rng.shuffle(perm)
    master = relabel(master, perm)
    if rng.random() < 0.5:
        w = rng.choice([1, 2, 3])
        weights = [w] * master.n
    else:
        weights = [rng.choice([1, 2, 3]) for _ in range(master.n)]
    return master, weights


def ingredients_445(disjoint=True):
    """l=4, m=5, u=v=4, K={4,5}."""
    td_small, dbs = parallel_class_from_td(build_td(5, 4))
    return Ingredients(
        td_master=build_td(5, 5),
        td_small=td_small,
        gdd_uv=delete_point(build_projective_plane(4), 0),
        pbd_fill=build_projective_plane(4),
        td_small_disjoint=dbs.blocks if disjoint else None,
    )
