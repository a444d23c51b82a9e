"""PBDs with an explicit parallel class, and disjoint blocks in TDs.

The pipeline truncates a TD(l+1, m) to an {l, l+1}-GDD of type m^l t^1,
inflates it by WFC (weight u on the first l groups, v on the last), closes
the big groups with an (mu+1)-point PBD through a new point ``inf`` and
adds ``B0 = last group + inf``.  The blocks prescribed inside the
ingredient TDs together with ``B0`` form a parallel class, which becomes
the group partition of a K-GDD of type l^{mu} (tv+1)^1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from .algebra import develop_difference_family, is_prime_power, search_difference_family
from .constructions import (
    build_affine_plane,
    build_projective_plane,
    build_td,
    delete_point,
    truncate_td,
)
from .core import (
    BlockSizeSet,
    Design,
    GddType,
    VerificationReport,
    compute_type,
    td_parameters,
    verify_gdd,
    verify_parallel_class,
    verify_pbd,
)
from .errors import (
    AlphaUnavailable,
    Infeasible,
    IngredientInvalid,
    IngredientMissing,
    InvalidInput,
    NotFound,
    PreconditionViolated,
    SizeLimitExceeded,
)
from .wfc import DesignSupplier, Ingredient, apply_wfc

ROLES = ("td_master", "td_small", "gdd_uv", "pbd_fill")


@dataclass(frozen=True)
class DisjointBlockSet:
    design: Design = field(repr=False, compare=False)
    indices: tuple
    exact: bool

    @property
    def blocks(self) -> tuple:
        return tuple(self.design.blocks[i] for i in self.indices)

    def __len__(self):
        return len(self.indices)


def lemma4_bound(ell: int, u: int) -> int:
    """Lower bound ceil(u^2 / (l(u-1) + 1)) on disjoint blocks in a TD(l, u)."""
    if ell < 2 or u < 2:
        raise PreconditionViolated("lemma4_bound needs ell >= 2 and u >= 2")
    return -(-u * u // (ell * (u - 1) + 1))


def _masks(d: Design) -> list[int]:
    return [sum(1 << p for p in b) for b in d.blocks]


def find_disjoint_blocks_greedy(d: Design) -> DisjointBlockSet:
    """Scan blocks in canonical order, keeping each one disjoint from the rest."""
    used = 0
    chosen = []
    for i, mask in enumerate(_masks(d)):
        if not used & mask:
            chosen.append(i)
            used |= mask
    return DisjointBlockSet(d, tuple(chosen), exact=False)


def find_disjoint_blocks_exact(d: Design, cap: int = 250) -> DisjointBlockSet:
    """Maximum set of pairwise disjoint blocks by branch and bound.

    Branches in canonical block order.  A node is pruned when the points
    still coverable by its candidates cannot hold enough blocks of the
    smallest size to beat the incumbent.
    """
    if len(d.blocks) > cap:
        raise SizeLimitExceeded(f"{len(d.blocks)} blocks exceed the exact-search cap {cap}")
    if not d.blocks:
        return DisjointBlockSet(d, (), exact=True)
    masks = _masks(d)
    kmin = min(len(b) for b in d.blocks)
    ceiling = d.n // kmin
    best = list(find_disjoint_blocks_greedy(d).indices)

    def search(chosen, cands):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if len(best) >= ceiling or not cands:
            return
        free = 0
        for j in cands:
            free |= masks[j]
        if len(chosen) + min(len(cands), free.bit_count() // kmin) <= len(best):
            return
        for pos, i in enumerate(cands):
            if len(chosen) + len(cands) - pos <= len(best):
                return
            rest = [j for j in cands[pos + 1:] if not masks[j] & masks[i]]
            chosen.append(i)
            search(chosen, rest)
            chosen.pop()
            if len(best) >= ceiling:
                return

    search([], list(range(len(masks))))
    return DisjointBlockSet(d, tuple(sorted(best)), exact=True)


def parallel_class_from_td(td: Design) -> tuple[Design, DisjointBlockSet]:
    """Drop the last group of a TD(l+1, u).

    The u blocks through any one dropped point are pairwise disjoint in
    the resulting TD(l, u); the set through the first dropped point is
    returned, and all u such classes go to ``meta["parallel_classes"]``.
    """
    params = td_parameters(td)
    if params is None:
        raise InvalidInput("parallel_class_from_td needs a design that verifies as a TD")
    k, u = params
    if k < 3:
        raise InvalidInput(f"need a TD with at least 3 groups, got {k}")
    last = td.groups[-1]
    gone = set(last)
    new, nxt = [], 0
    for x in range(td.n):
        new.append(-1 if x in gone else nxt)
        nxt += x not in gone
    groups = [[new[x] for x in g] for g in td.groups[:-1]]
    blocks = [[new[x] for x in b if x not in gone] for b in td.blocks]
    small = Design(td.n - u, groups, blocks, meta={
        "construction": f"TD({k},{u}) minus its last group",
    })
    classes = [
        sorted(small.index_of(new[x] for x in b if x != pt) for b in td.blocks if pt in b)
        for pt in last
    ]
    small = small.with_meta(parallel_classes=classes)
    return small, DisjointBlockSet(small, tuple(classes[0]), exact=True)


@lru_cache(maxsize=None)
def td_from_affine_plane(q: int) -> tuple[Design, DisjointBlockSet]:
    """TD(q, q) from AG(2, q): vertical lines are the groups.

    The other lines are the blocks; the horizontal lines (slope 0) give q
    disjoint blocks.
    """
    ag = build_affine_plane(q)
    classes = ag.meta["parallel_classes"]
    groups = [ag.blocks[i] for i in classes[-1]]
    blocks = [ag.blocks[i] for cls in classes[:-1] for i in cls]
    td = Design(q * q, groups, blocks, meta={"construction": f"TD({q},{q}) from AG(2,{q})"})
    slope_classes = [[td.index_of(ag.blocks[i]) for i in cls] for cls in classes[:-1]]
    td = td.with_meta(parallel_classes=slope_classes)
    return td, DisjointBlockSet(td, tuple(sorted(slope_classes[0])), exact=True)


@dataclass(frozen=True)
class Theorem1Params:
    ell: int
    m: int
    u: int
    v: int
    t: int
    K: frozenset

    def __post_init__(self):
        object.__setattr__(self, "K", BlockSizeSet(self.K))

    @property
    def classes_used(self) -> int:
        """Deleted points whose induced classes carry the prescribed blocks."""
        return self.u

    @property
    def max_t(self) -> int:
        return self.m - self.classes_used

    def label_chunks(self) -> list[list[int]]:
        return [[i] for i in range(self.u)]

    def check(self):
        for name in ("ell", "m", "u", "v"):
            if getattr(self, name) < 1:
                raise PreconditionViolated(f"{name} must be a positive integer")
        if self.ell < 2:
            raise PreconditionViolated("ell must be at least 2")
        if self.u > self.m:
            raise PreconditionViolated(f"u={self.u} exceeds m={self.m}")
        if self.ell not in self.K:
            raise PreconditionViolated(f"ell={self.ell} is not in K={self.K}")
        if not 0 <= self.t <= self.max_t:
            raise PreconditionViolated(f"t={self.t} outside 0..{self.max_t}")

    @property
    def target_type(self) -> GddType:
        return GddType.from_exponents([(self.ell, self.m * self.u), (self.t * self.v + 1, 1)])

    def to_dict(self):
        out = {k: getattr(self, k) for k in ("ell", "m", "u", "v", "t")}
        out["K"] = sorted(self.K)
        return out


@dataclass(frozen=True)
class Theorem3Params(Theorem1Params):
    alpha: int = 1

    @property
    def classes_used(self) -> int:
        return math.ceil(self.u / self.alpha)

    def label_chunks(self) -> list[list[int]]:
        a = self.alpha
        return [list(range(i * a, min((i + 1) * a, self.u))) for i in range(self.classes_used)]

    def check(self):
        if self.alpha < 1:
            raise PreconditionViolated("alpha must be a positive integer")
        super().check()

    def to_dict(self):
        return {**super().to_dict(), "alpha": self.alpha}


@dataclass
class Ingredients:
    """The four input designs, by role.  ``td_small_disjoint`` optionally
    lists known pairwise-disjoint blocks of ``td_small``."""

    td_master: Design | None = None
    td_small: Design | None = None
    gdd_uv: Design | None = None
    pbd_fill: Design | None = None
    td_small_disjoint: tuple | None = None
    provenance: dict = field(default_factory=dict)

    def require(self):
        missing = [r for r in ROLES if getattr(self, r) is None]
        if missing:
            raise IngredientMissing(f"missing ingredients: {', '.join(missing)}")


@dataclass(frozen=True)
class PipelineResult:
    params: Theorem1Params
    pbd: Design
    parallel_class: tuple
    gdd: Design
    infinity: int
    b0: int
    wfc_gdd: Design = field(repr=False)
    reports: dict = field(default_factory=dict, repr=False)

    @property
    def type(self) -> GddType:
        return compute_type(self.gdd)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports.values())


def check_ingredients(p: Theorem1Params, ing: Ingredients):
    """Verify every ingredient against its role; raise IngredientInvalid."""
    ing.require()
    if td_parameters(ing.td_master) != (p.ell + 1, p.m):
        raise IngredientInvalid(f"td_master is not a TD({p.ell + 1},{p.m})")
    if td_parameters(ing.td_small) != (p.ell, p.u):
        raise IngredientInvalid(f"td_small is not a TD({p.ell},{p.u})")
    want = GddType.from_exponents([(p.u, p.ell), (p.v, 1)])
    if compute_type(ing.gdd_uv) != want:
        raise IngredientInvalid(f"gdd_uv has type {compute_type(ing.gdd_uv)}, need {want}")
    report = verify_gdd(ing.gdd_uv, p.K)
    if not report.passed:
        raise IngredientInvalid(f"gdd_uv is not a {p.K}-GDD: {report.summary()}")
    if ing.pbd_fill.n != p.m * p.u + 1:
        raise IngredientInvalid(f"pbd_fill has {ing.pbd_fill.n} points, need {p.m * p.u + 1}")
    report = verify_pbd(ing.pbd_fill, p.K)
    if not report.passed:
        raise IngredientInvalid(f"pbd_fill is not a ({p.m * p.u + 1},{p.K})-PBD: {report.summary()}")


def _small_td_disjoint(p: Theorem1Params, ing: Ingredients, needed: int) -> tuple:
    if ing.td_small_disjoint is not None:
        blocks = tuple(tuple(sorted(b)) for b in ing.td_small_disjoint)
        for b in blocks:
            if b not in ing.td_small.block_index:
                raise IngredientInvalid(f"declared disjoint block {b} is not in td_small")
        if len(set().union(*map(set, blocks))) != sum(map(len, blocks)):
            raise IngredientInvalid("declared disjoint blocks of td_small intersect")
        if len(blocks) >= needed:
            return blocks
    found = find_disjoint_blocks_greedy(ing.td_small)
    if len(found) < needed:
        found = find_disjoint_blocks_exact(ing.td_small)
    if len(found) < needed:
        raise AlphaUnavailable(
            f"td_small has at most {len(found)} disjoint blocks, alpha={needed} requested"
        )
    return found.blocks


def run_pipeline(p: Theorem1Params, ing: Ingredients) -> PipelineResult:
    p.check()
    check_ingredients(p, ing)
    chunks = p.label_chunks()
    alpha = max(len(c) for c in chunks)
    disjoint = _small_td_disjoint(p, ing, alpha)

    tt = truncate_td(ing.td_master, p.t)
    master = tt.design
    last = set(tt.last_group)
    weights = [p.v if x in last else p.u for x in range(master.n)]
    offset = [0]
    for w in weights:
        offset.append(offset[-1] + w)

    stipulated = {}
    for i, labels in enumerate(chunks):
        for bi in tt.deleted_classes[i]:
            A = master.blocks[bi]
            stipulated[bi] = [{x: j for x in A} for j in labels]
    supplier = DesignSupplier(
        [Ingredient(ing.td_small, disjoint, "td_small"), Ingredient(ing.gdd_uv, source="gdd_uv")],
        K=p.K,
    )
    wfc = apply_wfc(master, weights, supplier, stipulated, K=p.K)

    mu = p.m * p.u
    inf = wfc.n
    last_exp = tuple(offset[x] + i for x in sorted(last) for i in range(p.v))
    last_set = set(last_exp)
    big = [g for g in wfc.groups if not last_set.intersection(g)]
    if len(big) != p.ell or any(len(g) != mu for g in big):
        raise AssertionError("WFC output does not have type (mu)^l (tv)^1")
    fill = ing.pbd_fill
    blocks = list(wfc.blocks)
    for g in big:
        image = list(g) + [inf]
        blocks += [[image[x] for x in b] for b in fill.blocks]
    blocks.append(last_exp + (inf,))
    pbd = Design.pbd(inf + 1, blocks, distinguished=[len(blocks) - 1])
    b0 = pbd.distinguished[0]

    parallel = []
    for i, labels in enumerate(chunks):
        for bi in tt.deleted_classes[i]:
            for j in labels:
                parallel.append(pbd.index_of(offset[x] + j for x in master.blocks[bi]))
    parallel = tuple(sorted(parallel)) + (b0,)
    pbd = pbd.with_meta(
        construction=f"pipeline {type(p).__name__}",
        params=p.to_dict(),
        infinity=inf,
        b0=b0,
        parallel_class=list(parallel),
    )

    pbd_K = p.K | {p.t * p.v + 1} if p.t * p.v + 1 >= 2 else p.K
    reports = {
        "pbd": verify_pbd(pbd, pbd_K),
        "parallel_class": verify_parallel_class(pbd, parallel),
    }
    in_class = set(parallel)
    gdd = Design(
        pbd.n,
        [pbd.blocks[i] for i in parallel],
        [b for i, b in enumerate(pbd.blocks) if i not in in_class],
        meta={
            "construction": f"{type(p).__name__} pipeline: parallel class as groups",
            "params": p.to_dict(),
            "infinity": inf,
            "provenance": ing.provenance,
        },
    )
    reports["gdd"] = verify_gdd(gdd, p.K)
    got = compute_type(gdd)
    reports["type"] = VerificationReport(
        "type", () if got == p.target_type else (_type_violation(got, p.target_type),)
    )
    return PipelineResult(p, pbd, parallel, gdd, inf, b0, wfc, reports)


def _type_violation(got, want):
    from .core import Violation

    return Violation("type-mismatch", (str(got), str(want)))


def theorem1(p: Theorem1Params, ingredients: Ingredients) -> PipelineResult:
    """K-GDD of type l^{mu} (tv+1)^1 for 0 <= t <= m - u."""
    if isinstance(p, Theorem3Params):
        p = Theorem1Params(p.ell, p.m, p.u, p.v, p.t, p.K)
    return run_pipeline(p, ingredients)


def theorem3(p: Theorem3Params, ingredients: Ingredients) -> PipelineResult:
    """As :func:`theorem1`, but ``alpha`` prescribed blocks per ingredient TD
    allow ``0 <= t <= m - ceil(u/alpha)``."""
    if not isinstance(p, Theorem3Params):
        raise TypeError("theorem3 needs Theorem3Params")
    return run_pipeline(p, ingredients)


@lru_cache(maxsize=None)
def bibd_from_search(v: int, k: int) -> Design:
    """A (v, k, 1)-BIBD developed from a searched difference family."""
    try:
        df = search_difference_family(v, k)
    except (NotFound, Infeasible) as exc:
        raise IngredientMissing(f"no ({v},{k},1)-BIBD available: {exc}") from exc
    return develop_difference_family(df)


def corollary2_ingredients(m: int, pbd_fill: Design | None = None,
                           td_master: Design | None = None) -> Ingredients:
    prov = {}
    if td_master is None:
        if not is_prime_power(m):
            raise IngredientMissing(f"TD(6,{m}) is not built in for non-prime-power m; import one")
        td_master = build_td(6, m)
        prov["td_master"] = f"builtin TD(6,{m})"
    if pbd_fill is None:
        pbd_fill = bibd_from_search(4 * m + 1, 5)
        prov["pbd_fill"] = f"builtin ({4 * m + 1},5,1) difference family"
    prov.setdefault("td_master", "supplied")
    prov.setdefault("pbd_fill", "supplied")
    prov["td_small"] = "PG(2,4) minus a point"
    prov["gdd_uv"] = "AG(2,5) minus a point"
    return Ingredients(
        td_master=td_master,
        td_small=delete_point(build_projective_plane(4), 0),
        gdd_uv=delete_point(build_affine_plane(5), 0),
        pbd_fill=pbd_fill,
        provenance=prov,
    )


def corollary2_params(m: int, t: int) -> Theorem1Params:
    if m % 5 not in (0, 1):
        raise PreconditionViolated(f"m={m} must be 0 or 1 mod 5")
    if m <= 10:
        raise PreconditionViolated(f"m={m} must exceed 10")
    if not 0 <= t <= m - 4:
        raise PreconditionViolated(f"t={t} outside 0..{m - 4}")
    return Theorem1Params(5, m, 4, 4, t, BlockSizeSet({5}))


def corollary2(m: int, t: int, pbd_fill: Design | None = None,
               td_master: Design | None = None) -> PipelineResult:
    """5-GDD of type 5^{4m} (4t+1)^1."""
    p = corollary2_params(m, t)
    return theorem1(p, corollary2_ingredients(m, pbd_fill, td_master))


def corollary5_params(m: int, t: int) -> Theorem3Params:
    if m < 7:
        raise PreconditionViolated(f"m={m} must be at least u=7")
    if not 0 <= t <= m - 1:
        raise PreconditionViolated(f"t={t} outside 0..{m - 1}")
    return Theorem3Params(7, m, 7, 7, t, BlockSizeSet({7, 8}), alpha=7)


def corollary5_ingredients(m: int, bibd: Design | None, td_master: Design | None = None) -> Ingredients:
    if bibd is None:
        raise IngredientMissing(f"corollary5 needs a supplied ({7 * m + 1},7,1)-BIBD")
    prov = {"pbd_fill": "supplied"}
    if td_master is None:
        if not is_prime_power(m):
            raise IngredientMissing(f"TD(8,{m}) is not built in for non-prime-power m; import one")
        td_master = build_td(8, m)
        prov["td_master"] = f"builtin TD(8,{m})"
    else:
        prov["td_master"] = "supplied"
    td_small, disjoint = td_from_affine_plane(7)
    prov["td_small"] = "TD(7,7) from AG(2,7)"
    prov["gdd_uv"] = "PG(2,7) minus a point"
    return Ingredients(
        td_master=td_master,
        td_small=td_small,
        gdd_uv=delete_point(build_projective_plane(7), 0),
        pbd_fill=bibd,
        td_small_disjoint=disjoint.blocks,
        provenance=prov,
    )


def corollary5(m: int, t: int, bibd: Design | None = None,
               td_master: Design | None = None) -> PipelineResult:
    """{7,8}-GDD of type 7^{7m} (7t+1)^1 from a supplied (7m+1, 7, 1)-BIBD."""
    p = corollary5_params(m, t)
    return theorem3(p, corollary5_ingredients(m, bibd, td_master))
