"""Direct constructions: TDs from MOLS, affine/projective planes, point
deletion and truncation of a TD's last group."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .algebra import gf_build
from .core import Design, td_parameters, verify_pbd
from .errors import InvalidInput, KTooLarge


@lru_cache(maxsize=None)
def build_td(k: int, q: int) -> Design:
    """TD(k, q) over GF(q).

    The block for ``(x, y)`` has coordinates ``x``, ``y`` and
    ``a*x + y`` for ``a = 1..k-2``; coordinate ``i`` with value ``c`` is
    point ``i*q + c``.
    """
    F = gf_build(q)
    if k < 2:
        raise InvalidInput(f"TD(k,{q}) needs k >= 2, got {k}")
    if k > q + 1:
        raise KTooLarge(f"TD({k},{q}) does not exist: k <= q+1 is required")
    groups = [range(i * q, (i + 1) * q) for i in range(k)]
    blocks = []
    for x in range(q):
        for y in range(q):
            coords = [x, y] + [F.add(F.mul(a, x), y) for a in range(1, k - 1)]
            blocks.append([i * q + c for i, c in enumerate(coords)])
    return Design(k * q, groups, blocks, meta={"construction": f"TD({k},{q}) from GF({q}) MOLS"})


def _attach_classes(d: Design, classes) -> Design:
    """Record parallel classes (given as block tuples) as canonical indices."""
    labeled = [[d.index_of(b) for b in cls] for cls in classes]
    return d.with_meta(parallel_classes=labeled)


@lru_cache(maxsize=None)
def build_affine_plane(q: int) -> Design:
    """AG(2, q) as a PBD; point ``(x, y)`` is ``x*q + y``.

    ``meta["parallel_classes"]`` lists the lines ``y = a*x + b`` by slope
    ``a = 0..q-1``, then the vertical lines ``x = c``.
    """
    F = gf_build(q)
    classes = []
    for a in range(q):
        classes.append([
            tuple(sorted(x * q + F.add(F.mul(a, x), b) for x in range(q))) for b in range(q)
        ])
    classes.append([tuple(c * q + y for y in range(q)) for c in range(q)])
    blocks = [b for cls in classes for b in cls]
    d = Design.pbd(q * q, blocks, meta={"construction": f"AG(2,{q})"})
    return _attach_classes(d, classes)


@lru_cache(maxsize=None)
def build_projective_plane(q: int) -> Design:
    """PG(2, q): AG(2, q) plus one point at infinity per parallel class."""
    ag = build_affine_plane(q)
    n = q * q
    blocks = []
    for i, cls in enumerate(ag.meta["parallel_classes"]):
        blocks += [ag.blocks[j] + (n + i,) for j in cls]
    blocks.append(tuple(range(n, n + q + 1)))
    return Design.pbd(n + q + 1, blocks, meta={"construction": f"PG(2,{q})"})


def delete_point(pbd: Design, p: int) -> Design:
    """Delete ``p`` from a (v, k, 1)-BIBD.

    The lines through ``p`` (minus ``p``) become the groups and the lines
    avoiding ``p`` the blocks of a k-GDD on ``v-1`` points.
    """
    sizes = set(pbd.block_sizes())
    if len(sizes) != 1:
        raise InvalidInput(f"delete_point needs a single block size, got {sorted(sizes)}")
    if not 0 <= p < pbd.n:
        raise InvalidInput(f"point {p} outside 0..{pbd.n - 1}")
    if not verify_pbd(pbd, sizes).passed:
        raise InvalidInput("delete_point needs a design that verifies as a BIBD")
    new = [q if q < p else q - 1 for q in range(pbd.n)]
    groups = [[new[x] for x in b if x != p] for b in pbd.blocks if p in b]
    blocks = [[new[x] for x in b] for b in pbd.blocks if p not in b]
    source = pbd.meta.get("construction", "BIBD")
    return Design(pbd.n - 1, groups, blocks, meta={
        "construction": f"{source} minus point {p}",
        "deleted_point": p,
        "point_map": [x for x in new[:p]] + [-1] + new[p + 1:],
    })


@dataclass(frozen=True)
class TruncatedTd:
    """A TD(l+1, m) with ``m - t`` points removed from its last group.

    ``deleted_classes[i]`` holds the indices of the m blocks of size l that
    went through the i-th deleted point (ascending original labels).
    """

    design: Design
    ell: int
    m: int
    t: int
    last_group: tuple
    deleted_points: tuple
    deleted_classes: tuple

    @property
    def first_groups(self) -> tuple:
        last = set(self.last_group)
        return tuple(g for g in self.design.groups if not last.intersection(g))


def truncate_td(td: Design, t: int) -> TruncatedTd:
    params = td_parameters(td)
    if params is None:
        raise InvalidInput("truncate_td needs a design that verifies as a TD")
    k, m = params
    if k < 3:
        raise InvalidInput(f"truncate_td needs at least 3 groups, got {k}")
    if not 0 <= t <= m:
        raise InvalidInput(f"t={t} outside 0..{m}")
    last = td.groups[-1]
    deleted = last[t:]
    gone = set(deleted)
    new, nxt = [], 0
    for x in range(td.n):
        new.append(-1 if x in gone else nxt)
        nxt += x not in gone
    groups = [[new[x] for x in g if x not in gone] for g in td.groups]
    groups = [g for g in groups if g]
    blocks = [[new[x] for x in b if x not in gone] for b in td.blocks]
    d = Design(td.n - len(deleted), groups, blocks, meta={
        "construction": f"TD({k},{m}) truncated to t={t}",
        "deleted_points": list(deleted),
        "last_group_dropped": t == 0,
    })
    classes = tuple(
        tuple(sorted(d.index_of(new[x] for x in b if x != pt) for b in td.blocks if pt in b))
        for pt in deleted
    )
    d = d.with_meta(deleted_classes=[list(c) for c in classes])
    return TruncatedTd(d, k - 1, m, t, tuple(new[x] for x in last[:t]), tuple(deleted), classes)
