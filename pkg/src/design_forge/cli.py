"""Command-line front end.

Exit codes: 0 success / verified, 1 verification failed, 2 bad arguments
or violated preconditions, 3 missing or invalid ingredient.
"""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
from pathlib import Path

from . import io
from .algebra import develop_difference_family, search_difference_family
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
    compute_type,
    verify_gdd,
    verify_parallel_class,
    verify_pbd,
    verify_td,
)
from .errors import DesignForgeError, InvalidInput
from .parallel import (
    ROLES,
    Ingredients,
    Theorem1Params,
    Theorem3Params,
    corollary2_ingredients,
    corollary2_params,
    corollary5_ingredients,
    corollary5_params,
    find_disjoint_blocks_exact,
    find_disjoint_blocks_greedy,
    lemma4_bound,
    run_pipeline,
)
from .wfc import RuleSupplier, TdSupplier, apply_wfc

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_INGREDIENT = 0, 1, 2, 3


class Outcome:
    """What a subcommand hands back to :func:`main`."""

    def __init__(self, reports=(), design=None, extra=None, summary="", payload=None,
                 ingredients=None, parameters=None):
        self.reports = dict(reports)
        self.design = design
        self.extra = extra or {}
        self.summary = summary
        self.payload = payload
        self.ingredients = ingredients or {}
        self.parameters = parameters or {}

    @property
    def passed(self):
        return all(r.passed for r in self.reports.values())


def _K(text):
    try:
        return BlockSizeSet(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _describe(d: Design) -> str:
    return f"type {compute_type(d)}, {d.n} points, {len(d.blocks)} blocks"


# construct ---------------------------------------------------------------

def _construct_td(a):
    d = build_td(a.k, a.q)
    return Outcome({"td": verify_td(d)}, d, parameters={"k": a.k, "q": a.q})


def _construct_affine(a):
    d = build_affine_plane(a.q)
    reports = {"pbd": verify_pbd(d, {a.q})}
    for i, cls in enumerate(d.meta["parallel_classes"]):
        reports[f"class{i}"] = verify_parallel_class(d, cls)
    return Outcome(reports, d, parameters={"q": a.q})


def _construct_projective(a):
    d = build_projective_plane(a.q)
    return Outcome({"pbd": verify_pbd(d, {a.q + 1})}, d, parameters={"q": a.q})


def _construct_delete_point(a):
    src = io.load_design(a.input)
    d = delete_point(src, a.point)
    return Outcome({"gdd": verify_gdd(d, d.block_sizes())}, d,
                   parameters={"point": a.point},
                   ingredients={"input": {"source": a.input, "sha256": io.design_hash(src)}})


def _construct_truncate(a):
    src = io.load_design(a.input)
    tt = truncate_td(src, a.t)
    d = tt.design
    return Outcome({"gdd": verify_gdd(d, d.block_sizes() or {2})}, d,
                   extra={"deleted_classes": [list(c) for c in tt.deleted_classes]},
                   parameters={"t": a.t},
                   ingredients={"input": {"source": a.input, "sha256": io.design_hash(src)}})


def _weights(text, n):
    path = Path(text)
    if path.exists():
        data = io.load_json(path)
        return data if isinstance(data, list) else {int(k): v for k, v in data.items()}
    values = [int(x) for x in text.split(",")]
    return values[0] if len(values) == 1 else values


def _construct_wfc(a):
    master = io.load_design(a.master)
    supplier = RuleSupplier.from_config(a.supplier) if a.supplier else TdSupplier()
    d = apply_wfc(master, _weights(a.weights, master.n), supplier, K=a.K, verify=False)
    K = a.K if a.K is not None else (supplier.K or BlockSizeSet(d.block_sizes() or {2}))
    return Outcome({"gdd": verify_gdd(d, K)}, d, parameters={"weights": a.weights, "K": sorted(K)},
                   ingredients={"master": {"source": a.master, "sha256": io.design_hash(master)}})


def _gather(a, roles=ROLES):
    ing = Ingredients()
    for role in roles:
        d, disjoint, prov = io.resolve_ingredient(getattr(a, role, None), role)
        if d is not None:
            setattr(ing, role, d)
            ing.provenance[role] = prov
            if role == "td_small" and disjoint is not None:
                ing.td_small_disjoint = disjoint
    return ing


def _pipeline_outcome(result, ing, parameters):
    for role in ROLES:
        prov = ing.provenance.get(role)
        if not isinstance(prov, dict):
            ing.provenance[role] = {"source": prov or "supplied",
                                    "sha256": io.design_hash(getattr(ing, role))}
    out = Outcome(result.reports, result.gdd, parameters=parameters,
                  ingredients=ing.provenance, payload={"pbd": result.pbd})
    out.summary = f"{result.type} via parallel class of {len(result.parallel_class)} blocks"
    return out


def _construct_theorem(a, cls):
    fields = dict(ell=a.ell, m=a.m, u=a.u, v=a.v, t=a.t, K=a.K)
    if cls is Theorem3Params:
        fields["alpha"] = a.alpha
    p = cls(**fields)
    p.check()
    ing = _gather(a)
    return _pipeline_outcome(run_pipeline(p, ing), ing, p.to_dict())


def _construct_corollary2(a):
    p = corollary2_params(a.m, a.t)
    ing = _gather(a, ("td_master", "pbd_fill"))
    full = corollary2_ingredients(a.m, ing.pbd_fill, ing.td_master)
    full.provenance.update(ing.provenance)
    return _pipeline_outcome(run_pipeline(p, full), full, {"m": a.m, "t": a.t})


def _construct_corollary5(a):
    p = corollary5_params(a.m, a.t)
    bibd, _, prov = io.resolve_ingredient(a.bibd, "pbd_fill")
    ing = _gather(a, ("td_master",))
    full = corollary5_ingredients(a.m, bibd, ing.td_master)
    full.provenance.update(ing.provenance)
    if prov:
        full.provenance["pbd_fill"] = prov
    return _pipeline_outcome(run_pipeline(p, full), full, {"m": a.m, "t": a.t})


# verify / search -----------------------------------------------------------

def _verify(a):
    d = io.load_design(a.input)
    if a.kind == "gdd":
        report = verify_gdd(d, a.K)
    elif a.kind == "pbd":
        report = verify_pbd(d, a.K)
    elif a.kind == "td":
        report = verify_td(d)
    else:
        if a.blocks:
            indices = [int(x) for x in a.blocks.split(",")]
        elif "parallel_class" in d.meta:
            indices = d.meta["parallel_class"]
        else:
            raise InvalidInput("no --class given and no meta.parallel_class in the file")
        if any(not 0 <= i < len(d.blocks) for i in indices):
            raise InvalidInput(f"block index out of range 0..{len(d.blocks) - 1}")
        report = verify_parallel_class(d, indices)
    return Outcome({a.kind: report}, summary=f"{_describe(d)}")


def _disjoint(a):
    d = io.load_design(a.input)
    found = find_disjoint_blocks_greedy(d) if a.greedy else find_disjoint_blocks_exact(d, a.cap)
    kind = "exact maximum" if found.exact else "greedy maximal"
    payload = {"r": len(found), "exact": found.exact, "indices": list(found.indices),
               "blocks": [list(b) for b in found.blocks]}
    return Outcome(summary=f"{kind}: r = {len(found)}", payload=payload)


def _bound(a):
    value = lemma4_bound(a.ell, a.u)
    return Outcome(summary=str(value), payload={"ell": a.ell, "u": a.u, "bound": value})


def _df_develop(a):
    df = io.load_family(a.input)
    d = develop_difference_family(df)
    return Outcome({"pbd": verify_pbd(d, d.block_sizes())}, d, parameters=df.to_dict())


def _df_search(a):
    df = search_difference_family(a.v, a.k)
    d = develop_difference_family(df)
    return Outcome({"pbd": verify_pbd(d, {a.k})}, d, payload={"family": df.to_dict()},
                   parameters={"v": a.v, "k": a.k}, summary=json.dumps(df.to_dict()))


def _replay(a):
    manifest = io.RunManifest.load(a.manifest)
    with tempfile.TemporaryDirectory() as tmp:
        argv = list(manifest.argv)
        target = str(Path(tmp) / "replay.json")
        for flag in ("-o", "--output"):
            if flag in argv:
                argv[argv.index(flag) + 1] = target
        code = main(argv, quiet=True)
        if code != EXIT_OK:
            return Outcome(summary=f"replay exited with {code}", payload={"exit": code}), code
        digest = io.sha256_text(Path(target).read_text())
    same = digest == manifest.output_sha256
    return Outcome(summary=f"replay {'reproduces' if same else 'DIFFERS from'} {manifest.output}",
                   payload={"identical": same, "sha256": digest}), EXIT_OK if same else EXIT_FAILED


# parser ----------------------------------------------------------------------

def _ingredient_args(p, roles=ROLES):
    for role in roles:
        p.add_argument("--" + role.replace("_", "-"), dest=role, metavar="SOURCE",
                       help=f"{role}: JSON path or builtin:<name>:<args>")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="design-forge", description=__doc__.splitlines()[0])
    parser.add_argument("--json", action="store_true", help="print a machine-readable report")
    sub = parser.add_subparsers(dest="command", required=True)

    construct = sub.add_parser("construct", help="build a design and self-verify it")
    csub = construct.add_subparsers(dest="what", required=True)

    def cmd(name, func, **kw):
        p = csub.add_parser(name, **kw)
        p.add_argument("-o", "--output")
        p.add_argument("--pbd-output", help="pipelines: also write the intermediate PBD")
        p.set_defaults(func=func)
        return p

    p = cmd("td", _construct_td)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    cmd("affine", _construct_affine).add_argument("--q", type=int, required=True)
    cmd("projective", _construct_projective).add_argument("--q", type=int, required=True)
    p = cmd("delete-point", _construct_delete_point)
    p.add_argument("input")
    p.add_argument("--point", type=int, default=0)
    p = cmd("truncate", _construct_truncate)
    p.add_argument("input")
    p.add_argument("--t", type=int, required=True)
    p = cmd("wfc", _construct_wfc)
    p.add_argument("master")
    p.add_argument("--weights", required=True, help="one int, a comma list, or a JSON file")
    p.add_argument("--supplier", help="JSON rule list; default is the builtin TD supplier")
    p.add_argument("--K", type=_K)
    for name, cls in (("theorem1", Theorem1Params), ("theorem3", Theorem3Params)):
        p = cmd(name, lambda a, cls=cls: _construct_theorem(a, cls))
        for arg in ("ell", "m", "u", "v", "t"):
            p.add_argument("--" + arg, type=int, required=True)
        p.add_argument("--K", type=_K, required=True)
        if cls is Theorem3Params:
            p.add_argument("--alpha", type=int, required=True)
        _ingredient_args(p)
    p = cmd("corollary2", _construct_corollary2)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    _ingredient_args(p, ("td_master", "pbd_fill"))
    p = cmd("corollary5", _construct_corollary5)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--bibd", metavar="SOURCE")
    _ingredient_args(p, ("td_master",))

    verify = sub.add_parser("verify", help="check a design file")
    vsub = verify.add_subparsers(dest="kind", required=True)
    for kind in ("gdd", "pbd"):
        p = vsub.add_parser(kind)
        p.add_argument("--K", type=_K, required=True)
        p.add_argument("input")
        p.set_defaults(func=_verify)
    p = vsub.add_parser("td")
    p.add_argument("input")
    p.set_defaults(func=_verify)
    p = vsub.add_parser("parallel-class")
    p.add_argument("input")
    p.add_argument("--class", dest="blocks", help="comma-separated block indices")
    p.set_defaults(func=_verify)

    p = sub.add_parser("disjoint-blocks", help="pairwise disjoint blocks of a design")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", default=True)
    mode.add_argument("--greedy", action="store_true")
    p.add_argument("--cap", type=int, default=250)
    p.add_argument("input")
    p.set_defaults(func=_disjoint)

    p = sub.add_parser("bound", help="lower bound on disjoint blocks in a TD(ell, u)")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--u", type=int, required=True)
    p.set_defaults(func=_bound)

    df = sub.add_parser("df", help="difference families")
    dsub = df.add_subparsers(dest="df_command", required=True)
    p = dsub.add_parser("develop")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_df_develop)
    p = dsub.add_parser("search")
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("-o", "--output", help="write the family JSON here")
    p.add_argument("--design-output", help="also write the developed design")
    p.set_defaults(func=_df_search)

    p = sub.add_parser("replay", help="re-run a manifest and compare output bytes")
    p.add_argument("manifest")
    p.set_defaults(func=_replay)
    return parser


def _write_outputs(a, argv, out: Outcome):
    command = " ".join(x for x in (a.command, getattr(a, "what", None) or getattr(a, "df_command", None)) if x)
    if a.command == "df" and a.df_command == "search":
        if a.output:
            sha = io.save_family(search_family_from(out), a.output)
            _manifest(a, argv, out, command, a.output, sha)
        if a.design_output:
            io.save_design(out.design, a.design_output)
        return
    if getattr(a, "output", None) and out.design is not None:
        sha = io.save_design(out.design, a.output, **out.extra)
        _manifest(a, argv, out, command, a.output, sha)
    if getattr(a, "pbd_output", None) and out.payload and "pbd" in out.payload:
        io.save_design(out.payload["pbd"], a.pbd_output)


def search_family_from(out: Outcome):
    from .algebra import DifferenceFamily

    return DifferenceFamily.from_dict(out.payload["family"])


def _manifest(a, argv, out, command, output, sha):
    io.RunManifest(
        command=command,
        argv=list(argv),
        parameters=out.parameters,
        ingredients=out.ingredients,
        verdicts={k: r.verdict for k, r in out.reports.items()},
        output=str(output),
        output_sha256=sha,
    ).save(io.manifest_path(output))


def main(argv=None, quiet=False) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    code = EXIT_OK
    try:
        result = a.func(a)
        if isinstance(result, tuple):
            out, code = result
        else:
            out = result
            code = EXIT_OK if out.passed else EXIT_FAILED
            if code == EXIT_OK:
                _write_outputs(a, argv, out)
    except DesignForgeError as exc:
        if a.json and not quiet:
            print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit": exc.exit_code}))
        elif not quiet:
            print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return exc.exit_code
    if quiet:
        return code
    if a.json:
        report = {
            "exit": code,
            "summary": out.summary,
            "reports": {k: r.to_dict() for k, r in out.reports.items()},
        }
        if out.design is not None:
            report["type"] = str(compute_type(out.design))
            report["n"] = out.design.n
            report["blocks"] = len(out.design.blocks)
        if out.payload:
            report.update({k: v for k, v in out.payload.items() if not isinstance(v, Design)})
        print(json.dumps(report))
    else:
        if out.design is not None:
            print(_describe(out.design))
        if out.summary:
            print(out.summary)
        for name, r in out.reports.items():
            print(f"{name}: {r.summary().split(': ', 1)[1]}")
        if code == EXIT_FAILED and getattr(a, "output", None):
            print("self-verification failed; no output written", file=sys.stderr)
    return code


cli_dispatch = main


if __name__ == "__main__":
    sys.exit(main())
