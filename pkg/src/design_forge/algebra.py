"""Small finite fields and cyclic difference families.

Field elements of GF(p^e) are encoded as integers ``0..q-1`` whose base-p
digits are the polynomial coefficients (lowest degree first), so for q = 4
the element ``x`` is encoded as 2.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

from .core import Design, verify_pbd
from .errors import Infeasible, InvalidFamily, NotFound, NotPrimePower


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, e)`` with ``q == p**e``; raise NotPrimePower otherwise."""
    if q < 2:
        raise NotPrimePower(f"{q} is not a prime power")
    p = next(d for d in itertools.count(2) if q % d == 0)
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    if r != 1:
        raise NotPrimePower(f"{q} is not a prime power")
    return p, e


def is_prime_power(q: int) -> bool:
    try:
        prime_power(q)
    except NotPrimePower:
        return False
    return True


def _digits(a, p, e):
    return [(a // p**i) % p for i in range(e)]


def _undigits(coeffs, p):
    return sum(c * p**i for i, c in enumerate(coeffs))


def _polymulmod(a, b, modulus, p):
    """Product of coefficient lists ``a*b`` reduced by a monic ``modulus``."""
    e = len(modulus) - 1
    prod = [0] * (2 * e - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for deg in range(len(prod) - 1, e - 1, -1):
        c = prod[deg]
        if c:
            for i, m in enumerate(modulus):
                prod[deg - e + i] = (prod[deg - e + i] - c * m) % p
    return prod[:e]


def _has_root_free_factorization(modulus, p):
    """True iff the monic ``modulus`` has no factor of degree <= deg/2."""
    e = len(modulus) - 1
    for d in range(1, e // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            divisor = list(low) + [1]
            rem = list(modulus)
            for deg in range(e, d - 1, -1):
                c = rem[deg]
                if c:
                    for i, m in enumerate(divisor):
                        rem[deg - d + i] = (rem[deg - d + i] - c * m) % p
            if not any(rem[:d]):
                return False
    return True


def least_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Least monic irreducible of degree ``e`` over GF(p).

    Candidates are ordered by their lower coefficients read as a base-p
    integer; the result lists coefficients lowest degree first, ending in 1.
    """
    for code in range(p**e):
        modulus = _digits(code, p, e) + [1]
        if _has_root_free_factorization(modulus, p):
            return tuple(modulus)
    raise AssertionError("an irreducible polynomial always exists")


@dataclass(frozen=True)
class FiniteField:
    q: int
    p: int
    e: int
    modulus: tuple
    add_table: tuple = field(repr=False, compare=False)
    mul_table: tuple = field(repr=False, compare=False)

    def add(self, a, b):
        return self.add_table[a][b]

    def mul(self, a, b):
        return self.mul_table[a][b]

    def neg(self, a):
        return self.add_table[a].index(0)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.mul_table[a].index(1)

    @property
    def elements(self):
        return range(self.q)


@lru_cache(maxsize=None)
def gf_build(q: int) -> FiniteField:
    p, e = prime_power(q)
    if e == 1:
        modulus = (0, 1)
        add = tuple(tuple((a + b) % p for b in range(q)) for a in range(q))
        mul = tuple(tuple((a * b) % p for b in range(q)) for a in range(q))
        return FiniteField(q, p, 1, modulus, add, mul)
    modulus = least_irreducible(p, e)
    digits = [_digits(a, p, e) for a in range(q)]
    add = tuple(
        tuple(_undigits([(x + y) % p for x, y in zip(digits[a], digits[b])], p) for b in range(q))
        for a in range(q)
    )
    mul = tuple(
        tuple(_undigits(_polymulmod(digits[a], digits[b], modulus, p), p) for b in range(q))
        for a in range(q)
    )
    return FiniteField(q, p, e, modulus, add, mul)


class AbelianGroup:
    """``Z_{n1} x ... x Z_{nr}`` with elements encoded row-major as ``0..v-1``."""

    def __init__(self, moduli):
        self.moduli = tuple(int(m) for m in moduli)
        self.order = 1
        for m in self.moduli:
            self.order *= m
        coords = list(itertools.product(*(range(m) for m in self.moduli)))
        index = {c: i for i, c in enumerate(coords)}
        self.add_table = [
            [index[tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))] for b in coords]
            for a in coords
        ]
        self.neg_table = [index[tuple((-x) % m for x, m in zip(a, self.moduli))] for a in coords]

    def add(self, a, b):
        return self.add_table[a][b]

    def sub(self, a, b):
        return self.add_table[a][self.neg_table[b]]

    def element_order(self, a):
        k, x = 1, a
        while x:
            x = self.add(x, a)
            k += 1
        return k

    def translate(self, block, g):
        return tuple(sorted(self.add(x, g) for x in block))

    @property
    def is_cyclic(self):
        return len(self.moduli) == 1


@lru_cache(maxsize=None)
def abelian_group(moduli: tuple) -> AbelianGroup:
    return AbelianGroup(moduli)


def candidate_groups(v: int) -> list[tuple[int, ...]]:
    """Z_v first, then every ``Z_a x Z_b`` with ``a | b``, ``a*b = v``, ``a > 1``."""
    groups = [(v,)]
    for a in range(2, v):
        if v % a == 0 and (v // a) % a == 0:
            groups.append((a, v // a))
    return groups


@dataclass(frozen=True)
class DifferenceFamily:
    """Base blocks over an abelian group of order ``v``.

    ``group`` lists the cyclic factors (``(v,)`` for Z_v).  Base block ``i``
    has ``orbit_lengths[i]`` distinct translates; a short orbit means the
    block is fixed by a subgroup.
    """

    v: int
    base_blocks: tuple
    orbit_lengths: tuple = ()
    group: tuple = ()

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(x) for x in b)) for b in self.base_blocks)
        lengths = tuple(int(x) for x in self.orbit_lengths) or (self.v,) * len(blocks)
        object.__setattr__(self, "base_blocks", blocks)
        object.__setattr__(self, "orbit_lengths", lengths)
        object.__setattr__(self, "group", tuple(self.group) or (self.v,))

    def to_dict(self):
        data = {
            "v": self.v,
            "base_blocks": [list(b) for b in self.base_blocks],
            "orbit_lengths": list(self.orbit_lengths),
        }
        if self.group != (self.v,):
            data["group"] = list(self.group)
        return data

    @classmethod
    def from_dict(cls, data):
        return cls(
            int(data["v"]),
            tuple(map(tuple, data["base_blocks"])),
            tuple(data.get("orbit_lengths", ())),
            tuple(data.get("group", ())),
        )


def develop_difference_family(df: DifferenceFamily) -> Design:
    """Develop every base block over the group into a PBD on ``0..v-1``."""
    v = df.v
    if len(df.orbit_lengths) != len(df.base_blocks):
        raise InvalidFamily("one orbit length per base block required")
    if math.prod(df.group) != v:
        raise InvalidFamily(f"group {df.group} does not have order {v}")
    G = abelian_group(df.group)
    blocks = []
    for base, length in zip(df.base_blocks, df.orbit_lengths):
        if any(not 0 <= x < v for x in base) or len(set(base)) != len(base):
            raise InvalidFamily(f"base block {base} is not a subset of the group")
        orbit = list(dict.fromkeys(G.translate(base, g) for g in range(v)))
        if len(orbit) != length:
            raise InvalidFamily(f"{base} has orbit length {len(orbit)}, declared {length}")
        blocks.extend(orbit)
    ks = sorted({len(b) for b in df.base_blocks})
    design = Design.pbd(v, blocks, meta={"construction": "difference-family", **df.to_dict()})
    report = verify_pbd(design, ks)
    if not report.passed:
        raise InvalidFamily(f"development does not verify: {report.summary()}")
    return design


def family_shape(v: int, k: int) -> tuple[int, bool]:
    """Number of full-orbit base blocks and whether a short orbit is needed.

    Full orbits alone need ``k(k-1) | v-1``.  Otherwise one short orbit, a
    subgroup of order k, is used; that needs ``k | v`` and ``k(k-1) | v-k``.
    """
    if k < 2 or v < k:
        raise Infeasible(f"no ({v},{k},1) family: need 2 <= k <= v")
    kk = k * (k - 1)
    if (v - 1) % kk == 0:
        return (v - 1) // kk, False
    if v % k == 0 and (v - k) % kk == 0:
        return (v - k) // kk, True
    raise Infeasible(f"no ({v},{k},1) difference family: divisibility fails")


def search_difference_family(v: int, k: int, node_limit: int = 2_000_000) -> DifferenceFamily:
    """Deterministic backtracking for a (v, k, 1) difference family.

    Groups are tried in the order of :func:`candidate_groups`.  Each new
    base block must cover the smallest uncovered difference ``d``;
    translating, it contains ``{0, d}`` and its other points exceed ``d``
    (a smaller point ``x`` would repeat the covered difference ``x - 0``).
    ``node_limit`` bounds the work per group.
    """
    n_full, short = family_shape(v, k)
    exhausted = False
    for moduli in candidate_groups(v):
        G = abelian_group(moduli)
        covered = [False] * v
        covered[0] = True
        base_blocks, lengths = [], []
        if short:
            gen = next((a for a in range(1, v) if G.element_order(a) == k), None)
            if gen is None:
                continue
            sub = [0]
            while len(sub) < k:
                sub.append(G.add(sub[-1], gen))
            base_blocks.append(tuple(sorted(sub)))
            lengths.append(v // k)
            for x in sub[1:]:
                covered[x] = True
        try:
            full = _search_full_orbits(G, k, n_full, covered, node_limit)
        except NotFound:
            exhausted = True
            continue
        if full is None:
            continue
        df = DifferenceFamily(v, tuple(base_blocks + full),
                              tuple(lengths + [v] * len(full)), moduli)
        develop_difference_family(df)
        return df
    reason = "node limit reached" if exhausted else "search exhausted"
    raise NotFound(f"no ({v},{k},1) difference family found ({reason})")


def _search_full_orbits(G, k, n_full, covered, node_limit):
    v = G.order
    covered = list(covered)
    chosen: list[tuple] = []
    nodes = 0

    def next_block():
        if len(chosen) == n_full:
            return all(covered)
        d = covered.index(False)
        if G.neg_table[d] == d:
            return False
        return grow([0, d], [d, G.neg_table[d]])

    def grow(block, taken):
        nonlocal nodes
        nodes += 1
        if nodes > node_limit:
            raise NotFound("node limit reached")
        if len(block) == k:
            for d in taken:
                covered[d] = True
            chosen.append(tuple(sorted(block)))
            if next_block():
                return True
            chosen.pop()
            for d in taken:
                covered[d] = False
            return False
        seen = set(taken)
        for x in range(block[-1] + 1, v):
            new = []
            for y in block:
                d1, d2 = G.sub(x, y), G.sub(y, x)
                if covered[d1] or d1 == d2 or d1 in seen or d2 in seen:
                    break
                seen.update((d1, d2))
                new += [d1, d2]
            else:
                if grow(block + [x], taken + new):
                    return True
            seen.difference_update(new)
        return False

    if next_block():
        return chosen
    return None
