import itertools

import pytest
from conftest import brute_force_gdd

from design_forge.constructions import (
    build_affine_plane,
    build_projective_plane,
    build_td,
    delete_point,
    truncate_td,
)
from design_forge.core import (
    Design,
    GddType,
    compute_type,
    verify_gdd,
    verify_parallel_class,
    verify_pbd,
)
from design_forge.errors import InvalidInput, KTooLarge, NotPrimePower


def test_td_3_2():
    td = build_td(3, 2)
    assert td.n == 6 and len(td.blocks) == 4
    assert str(compute_type(td)) == "2^3"
    assert brute_force_gdd(td.n, td.groups, td.blocks, {3})


def test_td_6_11():
    td = build_td(6, 11)
    assert len(td.blocks) == 121
    assert verify_gdd(td, {6}).passed


def test_td_errors():
    with pytest.raises(KTooLarge):
        build_td(6, 4)
    with pytest.raises(NotPrimePower):
        build_td(3, 6)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_td_max_k(q):
    td = build_td(q + 1, q)
    assert verify_gdd(td, {q + 1}).passed


@pytest.mark.parametrize("k, q", [(3, 2), (4, 3), (5, 4), (3, 5), (6, 7), (4, 8)])
def test_td_structure(k, q):
    td = build_td(k, q)
    for a, b in itertools.combinations(td.blocks, 2):
        assert len(set(a) & set(b)) <= 1
    for p in range(td.n):
        assert sum(p in b for b in td.blocks) == q


def test_affine_planes():
    ag2 = build_affine_plane(2)
    assert (ag2.n, len(ag2.blocks), len(ag2.meta["parallel_classes"])) == (4, 6, 3)
    assert set(ag2.blocks) == set(itertools.combinations(range(4), 2))
    ag5 = build_affine_plane(5)
    assert (ag5.n, len(ag5.blocks), len(ag5.meta["parallel_classes"])) == (25, 30, 6)
    with pytest.raises(NotPrimePower):
        build_affine_plane(6)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7])
def test_affine_classes_partition_blocks(q):
    ag = build_affine_plane(q)
    assert verify_pbd(ag, {q}).passed
    classes = ag.meta["parallel_classes"]
    assert sorted(i for c in classes for i in c) == list(range(len(ag.blocks)))
    assert all(len(c) == q and verify_parallel_class(ag, c).passed for c in classes)


@pytest.mark.parametrize("q, n, k", [(2, 7, 3), (4, 21, 5), (7, 57, 8)])
def test_projective_planes(q, n, k):
    pg = build_projective_plane(q)
    assert pg.n == n == len(pg.blocks)
    assert set(pg.block_sizes()) == {k}
    assert verify_pbd(pg, {k}).passed


@pytest.mark.parametrize("src, k, want", [
    (lambda: build_projective_plane(4), 5, "4^5"),
    (lambda: build_affine_plane(5), 5, "4^6"),
    (lambda: build_projective_plane(7), 8, "7^8"),
    (lambda: build_projective_plane(3), 4, "3^4"),
])
def test_delete_point(src, k, want):
    d = delete_point(src(), 0)
    assert compute_type(d) == GddType.parse(want)
    assert verify_gdd(d, {k}).passed


def test_delete_point_any_point():
    pg = build_projective_plane(2)
    for p in range(pg.n):
        d = delete_point(pg, p)
        assert str(compute_type(d)) == "2^3"
        assert verify_gdd(d, {3}).passed


def test_delete_point_mixed_sizes():
    mixed = Design.pbd(4, [[0, 1, 2], [0, 3], [1, 3], [2, 3]])
    with pytest.raises(InvalidInput):
        delete_point(mixed, 0)


def test_truncate_td_6_11():
    tt = truncate_td(build_td(6, 11), 4)
    assert str(compute_type(tt.design)) == "11^5 4^1"
    assert len(tt.deleted_classes) == 7
    assert all(len(c) == 11 for c in tt.deleted_classes)
    assert verify_gdd(tt.design, {5, 6}).passed
    last = set(tt.last_group)
    for b in tt.design.blocks:
        if len(b) == 6:
            assert last & set(b)
    first_points = set(range(tt.design.n)) - last
    for cls in tt.deleted_classes:
        assert all(len(tt.design.blocks[i]) == 5 for i in cls)
        covered = sorted(p for i in cls for p in tt.design.blocks[i])
        assert covered == sorted(first_points)
    assert sum(len(c) for c in tt.deleted_classes) == (11 - 4) * 11


def test_truncate_small_and_identity():
    tt = truncate_td(build_td(3, 2), 1)
    assert str(compute_type(tt.design)) == "2^2 1^1"
    assert brute_force_gdd(tt.design.n, tt.design.groups, tt.design.blocks, {2, 3})
    td = build_td(4, 3)
    same = truncate_td(td, 3)
    assert same.design == td and same.deleted_classes == ()


def test_truncate_t0_drops_group():
    tt = truncate_td(build_td(4, 3), 0)
    assert str(compute_type(tt.design)) == "3^3"
    assert tt.design.meta["last_group_dropped"] is True
    assert tt.last_group == ()
    assert len(tt.deleted_classes) == 3


def test_truncate_rejects_non_td():
    with pytest.raises(InvalidInput):
        truncate_td(build_affine_plane(3), 1)
    with pytest.raises(InvalidInput):
        truncate_td(build_td(4, 3), 4)
