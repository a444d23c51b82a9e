"""Design data model and the axiomatic verifiers.

A single :class:`Design` object stores GDDs, PBDs and TDs alike: points are
``0..n-1``, ``groups`` partition the points, ``blocks`` is a family of point
sets.  A PBD is a design whose groups are all singletons.  The verifiers in
this module count every one of the ``C(n, 2)`` pairs and are the oracle the
rest of the package is checked against.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DesignError


def _sorted_blocks(blocks, distinguished):
    """Sort blocks lexicographically and remap distinguished indices."""
    order = sorted(range(len(blocks)), key=lambda i: blocks[i])
    new_pos = {old: new for new, old in enumerate(order)}
    return (
        tuple(blocks[i] for i in order),
        tuple(sorted(new_pos[i] for i in distinguished)),
    )


@dataclass(frozen=True)
class Design:
    """Points ``0..n-1`` with a group partition and a block family.

    The constructor canonicalizes: each group and block is sorted, then the
    group and block lists are sorted lexicographically.  ``distinguished``
    holds indices (into the canonical block list) of blocks exempt from the
    block-size rules, e.g. the size-1 block ``{inf}``.  ``meta`` is free-form
    JSON-able provenance and does not take part in equality.
    """

    n: int
    groups: tuple
    blocks: tuple
    distinguished: tuple = ()
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        n = int(self.n)
        if n < 0:
            raise DesignError(f"negative point count {n}")
        groups = tuple(sorted(tuple(sorted(int(p) for p in g)) for g in self.groups))
        raw_blocks = [tuple(sorted(int(p) for p in b)) for b in self.blocks]
        distinguished = tuple(int(i) for i in self.distinguished)
        for i in distinguished:
            if not 0 <= i < len(raw_blocks):
                raise DesignError(f"distinguished index {i} out of range")
        if len(set(distinguished)) != len(distinguished):
            raise DesignError("repeated distinguished index")
        blocks, distinguished = _sorted_blocks(raw_blocks, distinguished)

        seen = [False] * n
        for g in groups:
            if not g:
                raise DesignError("empty group")
            for p in g:
                if not 0 <= p < n:
                    raise DesignError(f"group point {p} outside 0..{n - 1}")
                if seen[p]:
                    raise DesignError(f"point {p} lies in two groups")
                seen[p] = True
        if not all(seen):
            raise DesignError(f"point {seen.index(False)} lies in no group")

        special = set(distinguished)
        for i, b in enumerate(blocks):
            if len(set(b)) != len(b):
                raise DesignError(f"block {b} repeats a point")
            if b and not (0 <= b[0] and b[-1] < n):
                raise DesignError(f"block {b} has a point outside 0..{n - 1}")
            if len(b) < 2 and i not in special:
                raise DesignError(f"block {b} has fewer than two points")

        object.__setattr__(self, "n", n)
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "distinguished", distinguished)
        object.__setattr__(self, "meta", dict(self.meta))

    @classmethod
    def pbd(cls, n, blocks, distinguished=(), meta=None):
        """A design with singleton groups."""
        return cls(n, [(p,) for p in range(n)], blocks, distinguished, meta or {})

    @cached_property
    def group_of(self) -> np.ndarray:
        gid = np.empty(self.n, dtype=np.int64)
        for i, g in enumerate(self.groups):
            gid[list(g)] = i
        return gid

    @cached_property
    def block_index(self) -> dict:
        """First index of each block tuple in the canonical order."""
        index = {}
        for i, b in enumerate(self.blocks):
            index.setdefault(b, i)
        return index

    @property
    def is_pbd(self) -> bool:
        return all(len(g) == 1 for g in self.groups)

    def block_sizes(self) -> Counter:
        return Counter(len(b) for b in self.blocks)

    def with_meta(self, **updates) -> "Design":
        return replace(self, meta={**self.meta, **updates})

    def index_of(self, block: Iterable[int]) -> int:
        return self.block_index[tuple(sorted(block))]


def relabel(d: Design, mapping: Sequence[int], n: int | None = None, **meta) -> Design:
    """Apply the point map ``p -> mapping[p]`` to groups and blocks."""
    n = d.n if n is None else n
    groups = [[mapping[p] for p in g] for g in d.groups]
    blocks = [[mapping[p] for p in b] for b in d.blocks]
    return Design(n, groups, blocks, d.distinguished, {**d.meta, **meta})


@dataclass(frozen=True)
class GddType:
    """Multiset of group sizes.

    Rendered in exponential notation, most frequent size first (ties broken
    by larger size), e.g. ``"5^44 29^1"``.
    """

    sizes: tuple

    def __post_init__(self):
        sizes = tuple(sorted((int(s) for s in self.sizes), reverse=True))
        if any(s <= 0 for s in sizes):
            raise ValueError("group sizes must be positive")
        object.__setattr__(self, "sizes", sizes)

    @classmethod
    def from_exponents(cls, pairs: Iterable[tuple[int, int]]) -> "GddType":
        return cls(tuple(s for s, count in pairs for _ in range(count)))

    @classmethod
    def parse(cls, text: str) -> "GddType":
        pairs = []
        for token in text.split():
            size, _, count = token.partition("^")
            pairs.append((int(size), int(count) if count else 1))
        return cls.from_exponents(pairs)

    def exponents(self) -> list[tuple[int, int]]:
        counts = Counter(self.sizes)
        return sorted(counts.items(), key=lambda sc: (-sc[1], -sc[0]))

    def __str__(self):
        return " ".join(f"{s}^{c}" for s, c in self.exponents())

    def __len__(self):
        return len(self.sizes)


class BlockSizeSet(frozenset):
    """The set K of admissible block sizes; every element is at least 2."""

    def __new__(cls, sizes=()):
        if isinstance(sizes, int):
            sizes = (sizes,)
        elif isinstance(sizes, str):
            sizes = [int(s) for s in sizes.replace(" ", "").split(",") if s]
        values = frozenset(int(k) for k in sizes)
        if any(k < 2 for k in values):
            raise ValueError(f"block sizes must be at least 2, got {sorted(values)}")
        return super().__new__(cls, values)

    def __or__(self, other):
        return BlockSizeSet(frozenset(self) | frozenset(other))

    def __repr__(self):
        return "{" + ",".join(str(k) for k in sorted(self)) + "}"

    __str__ = __repr__


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple

    def to_dict(self):
        return {"axiom": self.axiom, "witness": list(self.witness)}


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of a verifier; passes iff there are no violations.

    Violations are listed in a fixed order (axiom, then witness) and capped
    per axiom, so ``violations[0]`` is the first violated axiom.
    """

    kind: str
    violations: tuple = ()

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    @property
    def first(self) -> Violation | None:
        return self.violations[0] if self.violations else None

    def axioms(self) -> set[str]:
        return {v.axiom for v in self.violations}

    def __bool__(self):
        return self.passed

    def to_dict(self):
        return {
            "kind": self.kind,
            "verdict": self.verdict,
            "violations": [v.to_dict() for v in self.violations],
        }

    def summary(self) -> str:
        if self.passed:
            return f"{self.kind}: pass"
        v = self.first
        return f"{self.kind}: fail ({len(self.violations)} violations; first {v.axiom} {list(v.witness)})"


def compute_type(d: Design) -> GddType:
    return GddType(tuple(len(g) for g in d.groups))


def pair_counts(d: Design) -> np.ndarray:
    """Upper-triangular ``n x n`` matrix: ``C[a, b]`` = blocks containing a<b."""
    n = d.n
    by_size: dict[int, list] = {}
    for b in d.blocks:
        if len(b) >= 2:
            by_size.setdefault(len(b), []).append(b)
    flat = []
    for k, bs in by_size.items():
        arr = np.asarray(bs, dtype=np.int64)
        for i, j in itertools.combinations(range(k), 2):
            flat.append(arr[:, i] * n + arr[:, j])
    if flat:
        counts = np.bincount(np.concatenate(flat), minlength=n * n)
    else:
        counts = np.zeros(n * n, dtype=np.int64)
    return counts.reshape(n, n)


def _size_exempt(d: Design, i: int) -> bool:
    return i in d.distinguished and len(d.blocks[i]) == 1


def _pair_violations(counts, want, limit):
    out = []
    upper = np.triu(np.ones_like(counts, dtype=bool), k=1)
    for axiom, mask in (
        ("uncovered-pair", upper & want & (counts == 0)),
        ("repeated-pair", upper & want & (counts > 1)),
        ("within-group-pair", upper & ~want & (counts > 0)),
    ):
        a, b = np.nonzero(mask)
        out.extend(Violation(axiom, (int(x), int(y))) for x, y in zip(a[:limit], b[:limit]))
    return out


def verify_gdd(d: Design, K, limit: int = 50) -> VerificationReport:
    """Check every GDD axiom for ``d`` with block sizes in ``K``.

    Size-1 distinguished blocks are exempt from the size check (they cover
    no pairs).
    """
    K = BlockSizeSet(K)
    violations = []
    gid = d.group_of
    meets = []
    sizes = []
    for i, b in enumerate(d.blocks):
        if len(set(gid[list(b)].tolist())) < len(b):
            meets.append(Violation("group-intersection", b))
        if len(b) not in K and not _size_exempt(d, i):
            sizes.append(Violation("block-size", b))
    violations += meets[:limit]
    counts = pair_counts(d)
    want = gid[:, None] != gid[None, :]
    violations += _pair_violations(counts, want, limit)
    violations += sizes[:limit]
    order = {"uncovered-pair": 0, "repeated-pair": 1, "group-intersection": 2,
             "within-group-pair": 3, "block-size": 4}
    violations.sort(key=lambda v: order[v.axiom])
    return VerificationReport("gdd", tuple(violations))


def verify_pbd(d: Design, K, limit: int = 50) -> VerificationReport:
    """Every pair of points in exactly one block, block sizes in ``K``.

    Groups are ignored: all ``C(n, 2)`` pairs must be covered.
    """
    K = BlockSizeSet(K)
    counts = pair_counts(d)
    want = ~np.eye(d.n, dtype=bool)
    violations = _pair_violations(counts, want, limit)
    sizes = [Violation("block-size", b) for i, b in enumerate(d.blocks)
             if len(b) not in K and not _size_exempt(d, i)]
    violations += sizes[:limit]
    return VerificationReport("pbd", tuple(violations))


def verify_td(d: Design, limit: int = 50) -> VerificationReport:
    """A TD(k, m): k groups of equal size m, a k-GDD."""
    k = len(d.groups)
    report = verify_gdd(d, {k} if k >= 2 else {2}, limit)
    extra = []
    if len({len(g) for g in d.groups}) > 1:
        extra.append(Violation("unequal-groups", tuple(len(g) for g in d.groups)))
    return VerificationReport("td", tuple(extra) + report.violations)


def verify_parallel_class(d: Design, indices: Sequence[int]) -> VerificationReport:
    """Selected blocks are pairwise disjoint and cover all points."""
    owner = [-1] * d.n
    violations = []
    for i in indices:
        for p in d.blocks[i]:
            if owner[p] >= 0:
                violations.append(Violation("overlap", (p, owner[p], i)))
            else:
                owner[p] = i
    violations += [Violation("uncovered-point", (p,)) for p in range(d.n) if owner[p] < 0]
    return VerificationReport("parallel-class", tuple(violations))


def td_parameters(d: Design) -> tuple[int, int] | None:
    """``(k, m)`` if ``d`` verifies as a TD(k, m), else ``None``."""
    if not d.groups or len({len(g) for g in d.groups}) != 1:
        return None
    if not verify_td(d).passed:
        return None
    return len(d.groups), len(d.groups[0])
