import json
import subprocess
import sys

import pytest

from epwgm.cli import main


def run(args, capsys):
    code = main([str(a) for a in args])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def gm7(tmp_path, capsys):
    path = tmp_path / "g.json"
    assert run(["gen", "--seed", 3, "--field", 7, "--out", path], capsys)[0] == 0
    return path


def test_gen_and_convert_roundtrip(gm7, tmp_path, capsys):
    lag = tmp_path / "l.json"
    back = tmp_path / "g2.json"
    code, out, _ = run(["convert", gm7, "--out", lag], capsys)
    assert code == 0 and "dim W = 7" in out
    assert json.loads(lag.read_text())["kind"] == "lagrangian"
    assert run(["convert", lag, "--out", back], capsys)[0] == 0
    assert back.read_bytes() == gm7.read_bytes()


def test_outputs_carry_schema_version(gm7, capsys):
    for cmd in (["convert", gm7], ["census", gm7], ["lattice", "discriminant", "--gram", "[[2,1],[1,2]]"]):
        code, out, _ = run(cmd, capsys)
        assert code == 0
        assert json.loads(out)["schema_version"] == 1


def test_census_threads_identical(gm7, tmp_path, capsys):
    outs = []
    for t in (1, 4):
        path = tmp_path / f"c{t}.json"
        assert run(["census", gm7, "--threads", t, "--out", path], capsys)[0] == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_parse_error_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "kind": "gm",\n  "qx": [1, 2\n')
    code, _, err = run(["convert", bad], capsys)
    assert code == 2
    assert "bad.json:4:1" in err


def test_structural_error_is_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "gm", "field": "Q"}')
    assert run(["census", bad], capsys)[0] == 2


def test_invariant_error(gm7, tmp_path, capsys):
    obj = json.loads(gm7.read_text())
    obj["qx"][0][1] = str((int(obj["qx"][0][1]) + 1) % 7)
    bad = tmp_path / "asym.json"
    bad.write_text(json.dumps(obj))
    code, _, err = run(["convert", bad], capsys)
    assert code == 3 and "symmetric" in err


def test_non_lagrangian_is_invariant_error(gm7, tmp_path, capsys):
    lag = tmp_path / "l.json"
    run(["convert", gm7, "--out", lag], capsys)
    obj = json.loads(lag.read_text())
    obj["A"]["basis"][0] = ["1"] + ["0"] * 19
    obj["A"]["basis"][1] = ["0"] * 19 + ["1"]
    lag.write_text(json.dumps(obj))
    assert run(["census", lag], capsys)[0] == 3


def test_degenerate_sextic(tmp_path, capsys):
    # A = F_e6 meets every F_v, so the chart determinant vanishes identically
    from epwgm.fields import GF
    from epwgm.lagrangian import F_of, LagrangianData
    L = LagrangianData.canonical(F_of([0, 0, 0, 0, 0, 1], GF(7)))
    path = tmp_path / "fe6.json"
    path.write_text(json.dumps(L.to_json()))
    assert run(["sextic", path], capsys)[0] == 4


def test_bound_exceeded(gm7, capsys):
    assert run(["census", gm7, "--bound", 100], capsys)[0] == 5
    assert run(["lattice", "discriminant", "--gram", "[[10,5],[5,0]]",
                "--bound", 3], capsys)[0] == 5


def test_lattice_commands(capsys):
    code, out, _ = run(["lattice", "overlattices", "--gram", "[[10,5],[5,0]]"], capsys)
    data = json.loads(out)
    assert code == 0 and len(data["overlattices"]) == 1 and data["overlattices"][0]["isometric_to_U"]
    code, out, _ = run(["lattice", "overlattices", "--gram", "[[10,2],[2,-2]]"], capsys)
    assert json.loads(out)["overlattices"] == []
    code, out, _ = run(["lattice", "divisor", "--gram", "[[10,5],[5,0]]", "--x", 5, "--y", 0], capsys)
    assert json.loads(out)["vector"] == [0, 1]
    assert run(["lattice", "discriminant", "--gram", "[[1,2],[3,4]]"], capsys)[0] == 3
    assert run(["lattice", "discriminant", "--gram", "[[1,2"], capsys)[0] == 2


def test_auto_command(tmp_path, capsys):
    sw = tmp_path / "sw.json"
    run(["gen", "--kind", "swap", "--seed", 0, "--field", 7, "--out", sw], capsys)
    obj = json.loads(sw.read_text())
    m = tmp_path / "m.json"
    m.write_text(json.dumps(obj["symmetry"]))
    code, out, _ = run(["auto", sw, "--matrix", m], capsys)
    data = json.loads(out)
    assert code == 0 and data["verdict"] is True
    assert sorted(data["permutation"]) == list(range(len(data["points"])))
    ident = tmp_path / "id.json"
    shear = [[int(i == j) for j in range(6)] for i in range(6)]
    shear[0][1] = 1
    ident.write_text(json.dumps(shear))
    code, out, _ = run(["auto", sw, "--matrix", ident], capsys)
    assert code == 0 and json.loads(out)["verdict"] is False
    sing = tmp_path / "sing.json"
    sing.write_text(json.dumps([[0] * 6] * 6))
    assert run(["auto", sw, "--matrix", sing], capsys)[0] == 3


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "epwgm", "lattice", "discriminant", "--gram", "[[10,1],[1,-2]]"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["orders"] == [21]


def test_bad_arguments_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["census"])
    assert exc.value.code == 2
