import itertools
from collections import Counter

import pytest
from conftest import brute_force_pbd

from design_forge.algebra import (
    DifferenceFamily,
    abelian_group,
    develop_difference_family,
    gf_build,
    prime_power,
    search_difference_family,
)
from design_forge.core import verify_pbd
from design_forge.errors import Infeasible, InvalidFamily, NotPrimePower

FIELD_ORDERS = [2, 3, 4, 5, 7, 8, 9, 11, 13]


def test_prime_field_arithmetic():
    F = gf_build(5)
    assert F.mul(2, 3) == 1
    assert F.add(3, 4) == 2


def test_gf4_modulus_and_x_squared():
    F = gf_build(4)
    assert F.modulus == (1, 1, 1)  # x^2 + x + 1
    # x is encoded as 2; x^2 = x + 1 is encoded as 1*2 + 1 = 3
    assert F.mul(2, 2) == 3


@pytest.mark.parametrize("q", [1, 6, 10, 12, 15])
def test_not_prime_power(q):
    with pytest.raises(NotPrimePower):
        gf_build(q)


def test_prime_power_decomposition():
    assert prime_power(8) == (2, 3)
    assert prime_power(9) == (3, 2)
    assert prime_power(13) == (13, 1)


@pytest.mark.parametrize("q", FIELD_ORDERS)
def test_field_axioms_exhaustive(q):
    F = gf_build(q)
    E = range(q)
    for a in E:
        assert F.add(a, 0) == a and F.mul(a, 1) == a
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
        for b in E:
            assert F.add(a, b) == F.add(b, a)
            assert F.mul(a, b) == F.mul(b, a)
            for c in E:
                assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
                assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
                assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))


@pytest.mark.parametrize("q", FIELD_ORDERS)
def test_characteristic_and_no_zero_divisors(q):
    F = gf_build(q)
    for a in range(q):
        acc = 0
        for _ in range(F.p):
            acc = F.add(acc, a)
        assert acc == 0
    assert all(F.mul(a, b) != 0 for a in range(1, q) for b in range(1, q))


def test_least_modulus_choice():
    # x^3+x+1 precedes x^3+x^2+1; x^2+1 is irreducible over GF(3)
    assert gf_build(8).modulus == (1, 1, 0, 1)
    assert gf_build(9).modulus == (1, 0, 1)


def _differences(design, moduli):
    G = abelian_group(moduli)
    diffs = Counter()
    for b in design.blocks:
        for x, y in itertools.permutations(b, 2):
            diffs[G.sub(x, y)] += 1
    return diffs


@pytest.mark.parametrize("v, base, n_blocks", [(7, (0, 1, 3), 7), (13, (0, 1, 3, 9), 13)])
def test_develop_planar_sets(v, base, n_blocks):
    d = develop_difference_family(DifferenceFamily(v, (base,), (v,)))
    assert len(d.blocks) == n_blocks
    assert brute_force_pbd(v, d.blocks, {len(base)})


def test_develop_rejects_bad_family():
    with pytest.raises(InvalidFamily):
        develop_difference_family(DifferenceFamily(7, ((0, 1, 2),), (7,)))
    with pytest.raises(InvalidFamily):
        develop_difference_family(DifferenceFamily(7, ((0, 1, 3),), (3,)))


def test_search_7_3():
    df = search_difference_family(7, 3)
    d = develop_difference_family(df)
    assert verify_pbd(d, {3}).passed and len(d.blocks) == 7


def test_search_45_5():
    df = search_difference_family(45, 5)
    d = develop_difference_family(df)
    # 45*44/20 = 99 blocks: one short orbit of 9 and two full orbits of 45
    assert len(d.blocks) == 45 * 44 // 20 == 99
    assert sorted(df.orbit_lengths) == [9, 45, 45]
    assert verify_pbd(d, {5}).passed
    assert brute_force_pbd(45, d.blocks, {5})


def test_no_cyclic_45_5():
    # Z_45 has no (45,5,1) family, so the search moves on to Z_3 x Z_15
    assert search_difference_family(45, 5).group == (3, 15)


def test_search_infeasible():
    with pytest.raises(Infeasible):
        search_difference_family(8, 3)


@pytest.mark.parametrize("v, k", [(7, 3), (9, 3), (13, 3), (13, 4), (21, 5), (25, 4), (41, 5), (45, 5)])
def test_round_trip_and_difference_cover(v, k):
    df = search_difference_family(v, k)
    d = develop_difference_family(df)
    assert verify_pbd(d, {k}).passed
    # every nonzero group element arises exactly v times as an ordered difference
    diffs = _differences(d, df.group)
    assert set(diffs) == set(range(1, v))
    assert set(diffs.values()) == {v}


def test_family_json_round_trip():
    df = search_difference_family(45, 5)
    assert DifferenceFamily.from_dict(df.to_dict()) == df
    cyclic = search_difference_family(13, 4)
    assert "group" not in cyclic.to_dict()
