import json

import pytest

from design_forge import cli, io
from design_forge.algebra import DifferenceFamily
from design_forge.constructions import build_projective_plane, build_td, truncate_td
from design_forge.core import Design
from design_forge.errors import IngredientMissing, ParseError, SchemaError


def run(capsys, *argv):
    code = cli.main(list(map(str, argv)))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_round_trip_and_hash(tmp_path):
    d = build_td(4, 3)
    sha = io.save_design(d, tmp_path / "td.json")
    back = io.load_design(tmp_path / "td.json")
    assert back == d and back.meta == d.meta
    assert sha == io.design_hash(d)
    assert io.dumps_design(back) == (tmp_path / "td.json").read_text()


def test_distinguished_survives(tmp_path):
    d = Design.pbd(3, [[0, 1], [0, 2], [1, 2], [0]], distinguished=[3])
    io.save_design(d, tmp_path / "d.json")
    assert io.load_design(tmp_path / "d.json").distinguished == d.distinguished


@pytest.mark.parametrize("data,field", [
    ({"n": 4, "groups": [[0, 1], [1, 2, 3]], "blocks": []}, "groups[1]"),
    ({"n": 3, "groups": [[0], [1], [2]], "blocks": [[0, 3]]}, "blocks[0]"),
    ({"n": 3, "groups": [[0], [1]], "blocks": []}, "groups"),
    ({"n": "3", "groups": [], "blocks": []}, "n"),
    ({"groups": [], "blocks": []}, "n"),
    ({"n": 2, "groups": [[0], [1]], "blocks": [[0, "x"]]}, "blocks[0]"),
])
def test_schema_errors_name_the_field(data, field):
    with pytest.raises(SchemaError) as exc:
        io.design_from_dict(data)
    assert exc.value.field == field


def test_parse_error(tmp_path):
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(ParseError):
        io.load_design(tmp_path / "bad.json")
    with pytest.raises(ParseError):
        io.load_design(tmp_path / "missing.json")


def test_truncated_keeps_deleted_classes(tmp_path):
    tt = truncate_td(build_td(4, 5), 2)
    io.save_truncated(tt, tmp_path / "t.json")
    data = json.loads((tmp_path / "t.json").read_text())
    assert data["deleted_classes"] == [list(c) for c in tt.deleted_classes]


def test_family_round_trip(tmp_path):
    df = DifferenceFamily(13, ((0, 1, 3, 9),))
    io.save_family(df, tmp_path / "f.json")
    assert io.load_family(tmp_path / "f.json") == df


def test_resolve_builtins_and_env(tmp_path, monkeypatch):
    d, disjoint, prov = io.resolve_ingredient("builtin:td-from-td:4,4", "td_small")
    assert len(disjoint) == 4 and prov["source"] == "builtin:td-from-td:4,4"
    with pytest.raises(IngredientMissing):
        io.resolve_ingredient("builtin:nope:1", "td_small")
    with pytest.raises(IngredientMissing):
        io.resolve_ingredient("absent.json", "td_small")
    monkeypatch.delenv(io.INGREDIENT_DIR_ENV, raising=False)
    assert io.resolve_ingredient(None, "pbd_fill") == (None, None, None)
    io.save_design(build_projective_plane(4), tmp_path / "pbd_fill.json")
    monkeypatch.setenv(io.INGREDIENT_DIR_ENV, str(tmp_path))
    d, _, prov = io.resolve_ingredient(None, "pbd_fill")
    assert d == build_projective_plane(4)
    d, _, _ = io.resolve_ingredient("pbd_fill.json", "whatever")
    assert d.n == 21


def test_cli_construct_and_verify(tmp_path, capsys):
    out = tmp_path / "g.json"
    code, text, _ = run(capsys, "construct", "corollary2", "--m", 11, "--t", 2, "-o", out)
    assert code == 0 and "5^44 9^1" in text
    manifest = io.RunManifest.load(io.manifest_path(out))
    assert manifest.output_sha256 == io.sha256_text(out.read_text())
    assert set(manifest.ingredients) == {"td_master", "td_small", "gdd_uv", "pbd_fill"}
    assert run(capsys, "verify", "gdd", "--K", 5, out)[0] == 0
    assert run(capsys, "verify", "gdd", "--K", 4, out)[0] == 1


def test_cli_verify_failure_and_witness(tmp_path, capsys):
    td = build_td(3, 3)
    io.save_design(Design(td.n, td.groups, td.blocks[1:]), tmp_path / "broken.json")
    code, text, _ = run(capsys, "--json", "verify", "gdd", "--K", 3, tmp_path / "broken.json")
    report = json.loads(text)
    assert code == 1 and report["exit"] == 1
    first = report["reports"]["gdd"]["violations"][0]
    assert first["axiom"] == "uncovered-pair"


def test_cli_exit_codes(tmp_path, capsys):
    assert run(capsys, "construct", "corollary2", "--m", 12, "--t", 0)[0] == 2
    assert run(capsys, "construct", "td", "--k", 5, "--q", 6)[0] == 2
    assert run(capsys, "construct", "td", "--k", 7, "--q", 5)[0] == 2
    assert run(capsys, "construct", "corollary5", "--m", 8, "--t", 0)[0] == 3
    assert run(capsys, "construct", "theorem1", "--ell", 4, "--m", 5, "--u", 4, "--v", 4,
               "--t", 0, "--K", "4,5")[0] == 3
    (tmp_path / "bad.json").write_text("[")
    assert run(capsys, "verify", "td", tmp_path / "bad.json")[0] == 2
    assert run(capsys, "no-such-command")[0] == 2
    assert run(capsys, "bound", "--ell", 7, "--u", 7)[1].strip() == "2"


def test_cli_alpha_pipeline_with_env_ingredients(tmp_path, capsys, monkeypatch):
    from design_forge.constructions import delete_point
    from design_forge.parallel import parallel_class_from_td

    io.save_design(build_td(5, 5), tmp_path / "td_master.json")
    io.save_design(parallel_class_from_td(build_td(5, 4))[0], tmp_path / "td_small.json")
    io.save_design(delete_point(build_projective_plane(4), 0), tmp_path / "gdd_uv.json")
    io.save_design(build_projective_plane(4), tmp_path / "pbd_fill.json")
    monkeypatch.setenv(io.INGREDIENT_DIR_ENV, str(tmp_path))
    out = tmp_path / "t3.json"
    code, text, _ = run(capsys, "construct", "theorem3", "--ell", 4, "--m", 5, "--u", 4, "--v", 4,
                        "--t", 4, "--K", "4,5", "--alpha", 4, "-o", out, "--pbd-output", tmp_path / "pbd.json")
    assert code == 0 and "4^20 17^1" in text
    assert run(capsys, "verify", "parallel-class", tmp_path / "pbd.json")[0] == 0
    assert run(capsys, "verify", "pbd", "--K", "4,5,17", tmp_path / "pbd.json")[0] == 0


def test_replay_reproduces_bytes(tmp_path, capsys):
    out = tmp_path / "pg.json"
    assert run(capsys, "construct", "projective", "--q", 3, "-o", out)[0] == 0
    mpath = io.manifest_path(out)
    code, text, _ = run(capsys, "--json", "replay", mpath)
    assert code == 0 and json.loads(text)["identical"]
    data = json.loads(mpath.read_text())
    data["output_sha256"] = "0" * 64
    mpath.write_text(json.dumps(data))
    assert run(capsys, "replay", mpath)[0] == 1


def test_manifest_digest_ignores_timestamp():
    a = io.RunManifest("c", [], {"m": 1}, timestamp="2020")
    b = io.RunManifest("c", [], {"m": 1}, timestamp="2030")
    assert a.digest() == b.digest()
    assert a.digest() != io.RunManifest("c", [], {"m": 2}).digest()


def test_cli_wfc_and_truncate(tmp_path, capsys):
    assert run(capsys, "construct", "td", "--k", 6, "--q", 11, "-o", tmp_path / "td.json")[0] == 0
    assert run(capsys, "construct", "truncate", tmp_path / "td.json", "--t", 1,
               "-o", tmp_path / "tt.json")[0] == 0
    assert "deleted_classes" in json.loads((tmp_path / "tt.json").read_text())
    assert run(capsys, "construct", "td", "--k", 3, "--q", 2, "-o", tmp_path / "m.json")[0] == 0
    code, text, _ = run(capsys, "construct", "wfc", tmp_path / "m.json", "--weights", 2)
    assert code == 0 and "4^3" in text


def test_cli_df(tmp_path, capsys):
    fam = tmp_path / "f.json"
    code, _, _ = run(capsys, "df", "search", "--v", 13, "--k", 4, "-o", fam,
                     "--design-output", tmp_path / "d.json")
    assert code == 0 and io.load_design(tmp_path / "d.json").n == 13
    assert run(capsys, "df", "develop", fam, "-o", tmp_path / "d2.json")[0] == 0
    (tmp_path / "bad.json").write_text(json.dumps({"v": 13, "base_blocks": [[0, 1, 2, 3]]}))
    assert run(capsys, "df", "develop", tmp_path / "bad.json")[0] == 2
    assert run(capsys, "df", "search", "--v", 8, "--k", 3)[0] == 2


def test_cli_disjoint_blocks(tmp_path, capsys):
    io.save_design(build_td(4, 4), tmp_path / "td.json")
    code, text, _ = run(capsys, "--json", "disjoint-blocks", tmp_path / "td.json")
    assert code == 0 and len(json.loads(text)["blocks"]) == 4
