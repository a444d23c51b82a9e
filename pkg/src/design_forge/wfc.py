"""Wilson's Fundamental Construction with prescribed ingredient blocks.

Every master point ``x`` of weight ``w(x)`` is blown up into the copies
``(x, 0) .. (x, w(x)-1)``; these get global ids row-major by master point,
then copy index.  Each master block ``A`` is replaced by an ingredient
GDD of type ``{w(x) : x in A}`` asked from a supplier.

An ingredient is handed back in *local* coordinates: for a request on the
block ``(x_0, .., x_{s-1})`` the copy ``(x_j, i)`` is the local point
``offset_j + i`` and the local groups are the consecutive runs.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Mapping, Protocol, Sequence

from .constructions import build_td
from .core import BlockSizeSet, Design, GddType, relabel, verify_gdd
from .errors import (
    IngredientInvalid,
    InvalidInput,
    NotDisjoint,
    NotTransversal,
    PreconditionViolated,
    SupplierFailure,
    TooManyTargets,
)


@dataclass(frozen=True)
class IngredientRequest:
    """Ask for a GDD of type ``{w(x) : x in block}``.

    ``required`` lists prescribed transversals; each gives one copy label
    per master point of ``block`` (same order).
    """

    block: tuple
    weights: tuple
    required: tuple = ()
    block_index: int = -1

    def __post_init__(self):
        if len(self.block) != len(self.weights):
            raise ValueError("one weight per master point")
        for labels in self.required:
            if len(labels) != len(self.block):
                raise ValueError("required block must pick one copy per master point")
            if any(not 0 <= i < w for i, w in zip(labels, self.weights)):
                raise ValueError(f"required labels {labels} exceed weights {self.weights}")
        for a, b in itertools.combinations(self.required, 2):
            if any(i == j for i, j in zip(a, b)):
                raise NotDisjoint(f"required blocks {a} and {b} intersect")

    @property
    def type(self) -> GddType:
        return GddType(self.weights)

    @property
    def offsets(self) -> list[int]:
        return list(itertools.accumulate(self.weights, initial=0))[:-1]

    @property
    def n(self) -> int:
        return sum(self.weights)

    def local_groups(self) -> list[tuple]:
        return [tuple(range(o, o + w)) for o, w in zip(self.offsets, self.weights)]

    def local_targets(self) -> list[tuple]:
        offs = self.offsets
        return [tuple(o + i for o, i in zip(offs, labels)) for labels in self.required]

    def required_points(self) -> list[list[tuple[int, int]]]:
        """Required blocks as ``(master point, copy label)`` pairs."""
        return [list(zip(self.block, labels)) for labels in self.required]


class IngredientSupplier(Protocol):
    """Anything that turns an :class:`IngredientRequest` into a local GDD.

    ``K`` is the block-size set the returned designs use (``None`` when it
    depends on the request).  ``resolve`` raises SupplierFailure when it
    has nothing of the requested type.
    """

    K: BlockSizeSet | None

    def resolve(self, request: IngredientRequest) -> Design: ...


def align_ingredient(ing: Design, disjoint: Sequence[Sequence[int]],
                     targets: Sequence[Sequence[int]]) -> Design:
    """Relabel points inside each group so ``disjoint[j]`` becomes ``targets[j]``.

    Only the first ``len(targets)`` disjoint blocks are moved.  A group-wise
    bijection keeps every GDD axiom intact.
    """
    disjoint = [tuple(sorted(b)) for b in disjoint]
    targets = [tuple(sorted(t)) for t in targets]
    if len(targets) > len(disjoint):
        raise TooManyTargets(f"{len(targets)} targets but only {len(disjoint)} disjoint blocks")
    for name, family in (("blocks", disjoint), ("targets", targets)):
        for a, b in itertools.combinations(family, 2):
            if set(a) & set(b):
                raise NotDisjoint(f"{name} {a} and {b} intersect")
    gid = ing.group_of
    k = len(ing.groups)
    for b in disjoint + targets:
        if len(b) != k or len({int(gid[p]) for p in b}) != k:
            raise NotTransversal(f"{b} is not a transversal of the {k} groups")
    for b in disjoint:
        if b not in ing.block_index:
            raise InvalidInput(f"{b} is not a block of the ingredient")

    mapping = list(range(ing.n))
    for g in ing.groups:
        src, dst = [], []
        for b, t in zip(disjoint, targets):
            src.append(next(p for p in b if p in g))
            dst.append(next(p for p in t if p in g))
        rest_src = [p for p in g if p not in src]
        rest_dst = [p for p in g if p not in dst]
        for a, b in zip(src + rest_src, dst + rest_dst):
            mapping[a] = b
    return relabel(ing, mapping, aligned_targets=[list(t) for t in targets])


def fit_ingredient(design: Design, request: IngredientRequest,
                   disjoint: Sequence[Sequence[int]] = ()) -> Design:
    """Relabel ``design`` onto the request's local points and align it.

    Groups are matched to master points by size (ties in order).
    ``disjoint`` are pairwise-disjoint transversal blocks of ``design``
    used to realize the required blocks.
    """
    sizes = sorted(len(g) for g in design.groups)
    if sizes != sorted(request.weights):
        raise SupplierFailure(f"ingredient type {GddType(sizes)} != requested {request.type}")
    groups = sorted(design.groups, key=len)
    slots = sorted(range(len(request.block)), key=lambda j: request.weights[j])
    local = request.local_groups()
    mapping = [0] * design.n
    for g, j in zip(groups, slots):
        for p, q in zip(g, local[j]):
            mapping[p] = q
    fitted = relabel(design, mapping, n=request.n)
    if not request.required:
        return fitted
    if len(disjoint) < len(request.required):
        raise SupplierFailure(
            f"{len(request.required)} prescribed blocks need as many disjoint blocks, "
            f"ingredient offers {len(disjoint)}"
        )
    moved = [[mapping[p] for p in b] for b in disjoint]
    return align_ingredient(fitted, moved, request.local_targets())


def _single_block(k: int) -> Design:
    return Design(k, [(i,) for i in range(k)], [tuple(range(k))], meta={"construction": f"TD({k},1)"})


@lru_cache(maxsize=None)
def td_with_disjoint_blocks(k: int, u: int) -> tuple[Design, tuple]:
    """TD(k, u) plus as many pairwise-disjoint blocks as the cheap routes give.

    For k <= u this is ``u`` blocks (drop the last group of a TD(k+1, u));
    for k = u + 1 only one.
    """
    if u == 1:
        d = _single_block(k)
        return d, (d.blocks[0],)
    if k <= u:
        from .parallel import parallel_class_from_td

        td, dbs = parallel_class_from_td(build_td(k + 1, u))
        return td, dbs.blocks
    td = build_td(k, u)
    return td, (td.blocks[0],)


class TdSupplier:
    """Fills uniform types ``u^k`` with a TD(k, u) over GF(u)."""

    def __init__(self, K=None):
        self.K = BlockSizeSet(K) if K is not None else None

    def resolve(self, request: IngredientRequest) -> Design:
        u = request.weights[0]
        k = len(request.block)
        if any(w != u for w in request.weights):
            raise SupplierFailure(f"TD supplier needs a uniform type, got {request.type}")
        if self.K is not None and k not in self.K:
            raise SupplierFailure(f"block size {k} not in {self.K}")
        try:
            td, disjoint = td_with_disjoint_blocks(k, u)
        except PreconditionViolated as exc:
            raise SupplierFailure(f"no TD({k},{u}): {exc}") from exc
        return fit_ingredient(td, request, disjoint)

    def __repr__(self):
        return f"TdSupplier(K={self.K})"


class PairSupplier:
    """The 2-GDD of any type: every cross pair is a block."""

    K = BlockSizeSet({2})

    def resolve(self, request: IngredientRequest) -> Design:
        groups = request.local_groups()
        blocks = [(a, b) for g, h in itertools.combinations(groups, 2) for a in g for b in h]
        d = Design(request.n, groups, blocks, meta={"construction": f"2-GDD of type {request.type}"})
        for t in request.local_targets():
            if len(t) != 2:
                raise SupplierFailure("a 2-GDD can only hold prescribed blocks of size 2")
        return d

    def __repr__(self):
        return "PairSupplier()"


@dataclass
class Ingredient:
    """A design kept by a :class:`DesignSupplier`, with known disjoint blocks."""

    design: Design
    disjoint: tuple | None = None
    source: str = ""

    def disjoint_blocks(self, needed: int) -> tuple:
        if self.disjoint is not None and len(self.disjoint) >= needed:
            return self.disjoint
        from .parallel import find_disjoint_blocks_exact, find_disjoint_blocks_greedy

        k = len(self.design.groups)
        transversal = Design(
            self.design.n, self.design.groups, [b for b in self.design.blocks if len(b) == k]
        )
        found = find_disjoint_blocks_greedy(transversal)
        if len(found) < needed:
            found = find_disjoint_blocks_exact(transversal)
        self.disjoint = found.blocks
        return self.disjoint


class DesignSupplier:
    """Serves fixed ingredient designs, matched by type."""

    def __init__(self, ingredients: Sequence[Ingredient | Design], K=None):
        self.ingredients = [i if isinstance(i, Ingredient) else Ingredient(i) for i in ingredients]
        if K is None:
            sizes = {s for i in self.ingredients for s in i.design.block_sizes()}
            K = sizes or None
        self.K = BlockSizeSet(K) if K is not None else None

    def resolve(self, request: IngredientRequest) -> Design:
        want = request.type
        for ing in self.ingredients:
            if GddType(tuple(len(g) for g in ing.design.groups)) == want:
                disjoint = ing.disjoint_blocks(len(request.required)) if request.required else ()
                return fit_ingredient(ing.design, request, disjoint)
        raise SupplierFailure(f"no ingredient of type {want}")

    def __repr__(self):
        return f"DesignSupplier({[i.source or str(GddType(tuple(map(len, i.design.groups)))) for i in self.ingredients]})"


class ChainSupplier:
    """Try suppliers in order; the first that resolves wins."""

    def __init__(self, suppliers: Sequence[IngredientSupplier]):
        self.suppliers = list(suppliers)
        Ks = [s.K for s in self.suppliers]
        self.K = None if any(k is None for k in Ks) else BlockSizeSet(set().union(*Ks))

    def resolve(self, request: IngredientRequest) -> Design:
        errors = []
        for s in self.suppliers:
            try:
                return s.resolve(request)
            except SupplierFailure as exc:
                errors.append(f"{s!r}: {exc}")
        raise SupplierFailure(f"no supplier for type {request.type}: " + "; ".join(errors))


class RuleSupplier:
    """Route requests by type pattern.

    A rule is ``{"type": "4^5" | "*", "source": "builtin:td" |
    "builtin:pairs" | <path to a JSON design>}``; the first matching rule
    serves the request.
    """

    def __init__(self, rules: Sequence[tuple[GddType | None, IngredientSupplier]]):
        self.rules = list(rules)
        Ks = [s.K for _, s in self.rules]
        self.K = None if any(k is None for k in Ks) or not Ks else BlockSizeSet(set().union(*Ks))

    def resolve(self, request: IngredientRequest) -> Design:
        for pattern, supplier in self.rules:
            if pattern is None or pattern == request.type:
                return supplier.resolve(request)
        raise SupplierFailure(f"no rule matches type {request.type}")

    @classmethod
    def from_config(cls, config, base: Path | None = None) -> "RuleSupplier":
        from .io import load_design

        if isinstance(config, (str, Path)):
            path = Path(config)
            base = path.parent
            config = json.loads(path.read_text())
        rules = []
        for rule in config:
            pattern = None if rule.get("type", "*") == "*" else GddType.parse(rule["type"])
            source = rule["source"]
            if source == "builtin:td":
                supplier = TdSupplier(rule.get("K"))
            elif source == "builtin:pairs":
                supplier = PairSupplier()
            else:
                path = Path(source)
                if base is not None and not path.is_absolute():
                    path = base / path
                supplier = DesignSupplier([Ingredient(load_design(path), source=str(path))], rule.get("K"))
            rules.append((pattern, supplier))
        return cls(rules)


def normalize_weights(master: Design, w) -> list[int]:
    if isinstance(w, int):
        weights = [w] * master.n
    elif isinstance(w, Mapping):
        missing = [x for x in range(master.n) if x not in w]
        if missing:
            raise InvalidInput(f"no weight for points {missing[:5]}")
        weights = [int(w[x]) for x in range(master.n)]
    else:
        weights = [int(x) for x in w]
        if len(weights) != master.n:
            raise InvalidInput(f"{len(weights)} weights for {master.n} points")
    bad = [x for x, v in enumerate(weights) if v < 1]
    if bad:
        raise PreconditionViolated(f"weights must be positive integers; point {bad[0]} has {weights[bad[0]]}")
    return weights


def _labels(block, stipulation):
    if isinstance(stipulation, Mapping):
        return tuple(int(stipulation[x]) for x in block)
    return tuple(int(i) for i in stipulation)


def apply_wfc(master: Design, w, supplier: IngredientSupplier,
              stipulated: Mapping[int, Sequence] | None = None,
              K=None, verify: bool = True) -> Design:
    """Weight ``master`` by ``w`` and fill every block from ``supplier``.

    ``stipulated`` maps a master block index to its prescribed transversals,
    each either a ``{point: label}`` map or a label tuple in block order.
    Returns a GDD of type ``{w_G}``; ``meta["expanded_points"][p]`` is the
    ``(x, i)`` pair behind output point ``p``.
    """
    sizes = BlockSizeSet(master.block_sizes()) if master.blocks else BlockSizeSet({2})
    report = verify_gdd(master, sizes)
    if not report.passed:
        raise InvalidInput(f"master is not a GDD: {report.summary()}")
    weights = normalize_weights(master, w)
    offset = list(itertools.accumulate(weights, initial=0))
    stipulated = stipulated or {}
    K = BlockSizeSet(K) if K is not None else supplier.K

    blocks = []
    for bi, A in enumerate(master.blocks):
        required = tuple(_labels(A, s) for s in stipulated.get(bi, ()))
        request = IngredientRequest(A, tuple(weights[x] for x in A), required, bi)
        ing = supplier.resolve(request)
        _check_ingredient(ing, request, K)
        to_global = [offset[x] + i for x, wx in zip(A, request.weights) for i in range(wx)]
        blocks += [[to_global[p] for p in b] for b in ing.blocks]

    n = offset[-1]
    groups = [[p for x in g for p in range(offset[x], offset[x + 1])] for g in master.groups]
    expanded = [[x, i] for x in range(master.n) for i in range(weights[x])]
    out = Design(n, groups, blocks, meta={
        "construction": "WFC",
        "weights": weights,
        "expanded_points": expanded,
    })
    if verify:
        check_K = K if K is not None else BlockSizeSet(out.block_sizes() or {2})
        report = verify_gdd(out, check_K)
        if not report.passed:
            raise IngredientInvalid(f"WFC output does not verify: {report.summary()}")
    return out


def _check_ingredient(ing: Design, request: IngredientRequest, K):
    if ing.n != request.n or list(ing.groups) != request.local_groups():
        raise IngredientInvalid(
            f"ingredient for block {request.block} is not on the requested groups {request.type}"
        )
    check_K = K if K is not None else BlockSizeSet(ing.block_sizes() or {2})
    report = verify_gdd(ing, check_K)
    if not report.passed:
        raise IngredientInvalid(f"ingredient for block {request.block}: {report.summary()}")
    for t in request.local_targets():
        if t not in ing.block_index:
            raise IngredientInvalid(f"ingredient for block {request.block} lacks required block {t}")
