import csv
import json

import pytest

from relhyp.cli import BUILTINS, build_parser, main
from relhyp.presets import PRESETS


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_help_lists_every_subcommand(capsys):
    with pytest.raises(SystemExit) as e:
        main(["--help"])
    assert e.value.code == 0
    out = capsys.readouterr().out
    for name in ("ball", "coset", "coned", "tree", "delta", "delta-series", "qi-eqdef", "qi-map", "britton",
                 "member", "reduce", "decompose", "experiment"):
        assert name in out


@pytest.mark.parametrize("cmd", ["ball", "delta", "decompose", "experiment"])
def test_subcommand_help_mentions_common_flags(capsys, cmd):
    with pytest.raises(SystemExit):
        main([cmd, "--help"])
    out = capsys.readouterr().out
    for flag in ("--seed", "--threads", "--out"):
        assert flag in out


def test_usage_errors_exit_1(capsys, tmp_path):
    with pytest.raises(SystemExit) as e:
        main(["ball", "--group", "free2", "--bogus"])
    assert e.value.code == 1
    assert run(capsys, "ball", "--group", "nosuchgroup", "--out", str(tmp_path))[0] == 1
    assert run(capsys, "ball", "--group", '{"type": "nilpotent"}', "--out", str(tmp_path))[0] == 1
    assert run(capsys, "britton", "--group", "free2", "--word", "a", "--out", str(tmp_path))[0] == 1
    assert run(capsys, "reduce", "--group", "free2", "--word", "x", "--out", str(tmp_path))[0] == 1
    assert run(capsys, "experiment", "nope", "--out", str(tmp_path))[0] == 1


def test_budget_overflow_exits_1(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("RELHYP_BUDGET", "20")
    code, _, err = run(capsys, "ball", "--group", "free2", "-r", "4", "--out", str(tmp_path))
    assert code == 1 and "budget" in err


@pytest.mark.parametrize("kind", ["ball", "coset", "coned", "tree"])
def test_ball_commands_write_artifacts(capsys, tmp_path, kind):
    args = [kind, "--group", "commuting-hnn", "-r", "2", "--out", str(tmp_path), "--seed", "7"]
    if kind != "tree":
        args += ["-X", "t", "--parabolic", '{"type": "base"}']
    code, out, _ = run(capsys, *args)
    assert code == 0
    summary = json.loads(out)
    assert summary["vertices"] > 0
    data = json.loads((tmp_path / f"{kind}.json").read_text())
    assert data["meta"]["seed"] == 7
    assert (tmp_path / f"{kind}.dot").read_text().startswith("graph")


def test_delta_and_series(capsys, tmp_path):
    code, out, _ = run(capsys, "delta", "--group", "free2", "-r", "3", "--out", str(tmp_path))
    assert code == 0 and json.loads(out)["delta"] == "0"
    code, out, _ = run(
        capsys, "delta-series", "--group", "z2", "--kind", "coset", "-X", "b", "--parabolic",
        '{"type": "lattice", "coordinates": [0]}', "--radii", "3", "4", "5", "--expect", "bounded", "--out", str(tmp_path),
    )
    assert code == 0 and json.loads(out)["verdict"] == "bounded"
    rows = list(csv.DictReader(open(tmp_path / "delta_series.csv")))
    assert len(rows) == 3
    assert (tmp_path / "delta_series.png").stat().st_size > 0
    # a wrong expectation is a failing verdict
    code, _, _ = run(capsys, "delta-series", "--group", "free2", "--radii", "1", "2", "3", "--expect", "growing", "--out", str(tmp_path))
    assert code == 2


def test_qi_eqdef(capsys, tmp_path):
    code, out, _ = run(
        capsys, "qi-eqdef", "--group", "z2", "-X", "b", "--parabolic", '{"type": "lattice", "coordinates": [0]}',
        "-r", "2", "--R-H", "4", "--out", str(tmp_path),
    )
    assert code == 0
    assert json.loads(out) == {"alpha": True, "iota": True, "provisional": False}
    assert json.loads((tmp_path / "eqdef.json").read_text())["alpha"]["lambda"] == "2"


def test_qi_map_between_exported_balls(capsys, tmp_path):
    run(capsys, "ball", "--group", "free2", "-r", "2", "--out", str(tmp_path))
    src = tmp_path / "ball.json"
    n = len(json.loads(src.read_text())["vertices"])
    ident = json.dumps(list(range(n)))
    code, out, _ = run(capsys, "qi-map", "--source", str(src), "--target", str(src), "--map", ident, "--inverse", ident,
                       "--out", str(tmp_path))
    assert code == 0
    assert json.loads(out)["lipschitz"] == "quasi-isometry (both directions)"
    const = json.dumps([0] * n)
    assert run(capsys, "qi-map", "--source", str(src), "--target", str(src), "--map", const, "--out", str(tmp_path))[0] == 2


def test_word_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "britton", "--group", "swap-hnn", "--word", "t^-1 a^2 t b^-2", "--out", str(tmp_path))
    assert code == 0 and out.strip() == "e"
    code, out, _ = run(capsys, "reduce", "--group", "z2", "--word", "b a b^-1", "--out", str(tmp_path))
    assert out.strip() == "a"
    code, out, _ = run(capsys, "reduce", "--group", "amalgam", "--word", "a c^-1", "--out", str(tmp_path))
    assert json.loads((tmp_path / "reduce.json").read_text())["identity"]


def test_member(capsys, tmp_path):
    code, out, _ = run(capsys, "member", "--group", "free2", "--subgroup", '["a^2", "a b"]', "--word", "b^-1 a",
                       "--express", "--out", str(tmp_path))
    lines = out.split("\n")
    assert code == 0 and lines[0] == "true" and lines[1]
    code, out, _ = run(capsys, "member", "--group", "free2", "--subgroup", '["a^2", "a b"]', "--word", "a", "--out", str(tmp_path))
    assert out.strip() == "false"
    data = json.loads((tmp_path / "member.json").read_text())
    assert data["rank"] == 2 and data["member"] is False


def test_decompose(capsys, tmp_path):
    code, out, _ = run(capsys, "decompose", "--group", "commuting-hnn", "--word", "t^-1 a t a^-1 t^-1 a^2 t a^-2",
                       "--out", str(tmp_path))
    assert code == 0
    res = json.loads(out)
    assert res["ok"] and res["n"] == 4
    code, _, _ = run(capsys, "decompose", "--group", "z2", "--word", "a b", "--out", str(tmp_path))
    assert code == 1
    code, out, _ = run(capsys, "decompose", "--group", "z2", "--word", "a^2 b^2 a^-2 b^-2", "--margin", "2",
                       "--out", str(tmp_path))
    assert code == 0 and json.loads(out)["ok"]


def test_builtins_load():
    for name, make in BUILTINS.items():
        assert make().alphabet.names, name


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets(capsys, tmp_path, name):
    code, out, _ = run(capsys, "experiment", name, "--seed", "1", "--out", str(tmp_path))
    assert code == 0 and json.loads(out)["pass"]
    data = json.loads((tmp_path / f"{name}.json").read_text())
    assert data["seed"] == 1 and data["pass"]
    assert (tmp_path / f"{name}.csv").stat().st_size > 0
    assert (tmp_path / f"{name}.png").read_bytes()[:4] == b"\x89PNG"


def test_parser_defaults():
    args = build_parser().parse_args(["ball", "--group", "free2"])
    assert args.radius == 2 and args.R_H == 2 and args.seed == 0 and str(args.out) == "relhyp_out"
