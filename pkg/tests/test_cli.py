import json

import pytest

from minionlab import boolfn as B
from minionlab import cli


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_shapley_majority(capsys):
    code, out, err = run(["shapley", "--fn", "maj3", "--trials", "2000"], capsys)
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0] == "coordinate,phi_exact,phi_mc,phi_integral"
    assert all(r.split(",")[1] == "0.33333333333333331" for r in rows[1:])
    assert "sum 1" in err


def test_function_file(tmp_path, capsys):
    path = tmp_path / "maj3.fn"
    B.write_functions(path, [B.majority(3)])
    code, out, _ = run(["shapley", "--fn", str(path), "--trials", "100"], capsys)
    assert code == 0 and len(out.splitlines()) == 4


def test_pullback_audit(capsys):
    code, out, err = run(["pullback", "audit", "--m", "4", "--p", "0.5"], capsys)
    assert code == 0
    assert float(out.splitlines()[1].split(",")[2]) >= 1


def test_pcsp_enum_k2(capsys):
    code, out, err = run(["pcsp", "enum", "--template", "k2", "--arity", "2"], capsys)
    assert code == 0 and len(out.splitlines()) == 5


def test_template_file(tmp_path, capsys):
    from minionlab import pcsp

    path = tmp_path / "k2.tmpl"
    path.write_text(pcsp.format_template(pcsp.builtin_template("k2")))
    code, out, _ = run(["pcsp", "enum", "--template", str(path), "--arity", "2"], capsys)
    assert code == 0 and len(out.splitlines()) == 5


def test_json_format(capsys):
    code, out, _ = run(["fourier", "influence", "--fn", "collapse", "--format", "json"], capsys)
    rows = json.loads(out)
    assert code == 0 and len(rows) == 4
    assert rows[0]["flip_probability"] == 0.75


def test_out_file(tmp_path, capsys):
    path = tmp_path / "o.csv"
    code, out, err = run(["pullback", "mass", "--m", "2", "--out", str(path)], capsys)
    assert code == 0 and "total 1" in out and path.read_text().startswith("point,popcount,mass")


def test_verdict_failure(capsys):
    assert run(["ptf", "represent", "--fn", "parity2", "--degree", "1"], capsys)[0] == cli.EXIT_VERDICT
    assert run(["pcsp", "check-choice", "--slice", "collapse", "--variant", "multiple"], capsys)[0] == cli.EXIT_VERDICT


def test_malformed_and_caps(tmp_path, capsys):
    bad = tmp_path / "bad.fn"
    bad.write_text("arity=3 table=zz\n")
    assert run(["shapley", "--fn", str(bad)], capsys)[0] == cli.EXIT_MALFORMED
    assert run(["shapley", "--fn", "nosuchfile"], capsys)[0] == cli.EXIT_MALFORMED
    assert run(["fourier", "expand", "--fn", "maj25"], capsys)[0] == cli.EXIT_CAP
    with pytest.raises(SystemExit) as exc:
        cli.main(["bogus"])
    assert exc.value.code == cli.EXIT_USAGE


def test_help_documents_exit_codes(capsys):
    with pytest.raises(SystemExit):
        cli.main(["--help"])
    out = capsys.readouterr().out
    for code in range(5):
        assert f"  {code}  " in out


def test_labelcover_pipeline(tmp_path, capsys):
    inst = tmp_path / "lc.txt"
    assert run(["labelcover", "gen", "--variant", "unique", "--sigma-r", "3", "--seed", "2",
                "--out", str(inst)], capsys)[0] == 0
    code, out, err = run(["labelcover", "eval", "--instance", str(inst)], capsys)
    assert code == 0 and "YES" in out


def test_pcsp_solve_cnf(tmp_path, capsys):
    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 3 8\n" + "".join(f"{a} {b} {c} 0\n" for a in (1, -1) for b in (2, -2) for c in (3, -3)))
    code, out, _ = run(["pcsp", "solve", "--template", "3sat", "--cnf", str(cnf)], capsys)
    assert code == 0 and ",no," in out
