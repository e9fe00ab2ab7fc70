import json

import pytest

from masurelab.cli import main
from masurelab.heckepath import build_path
from masurelab.rootgeom import WeylElt


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_retract_json_reports_folds(capsys):
    code, out, _ = run(["retract", "gN:2", "--emit", "json"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["schema"] == "masure-lab/1"
    assert d["folding_points"] == [["0", "-2/3"], ["1", "-5/6"], ["2/3", "-8/9"]]
    assert d["maps"] == ["id", "R2", "R2R5", "R5"]


def test_retract_gprime_has_folds(capsys):
    code, out, _ = run(["retract", "gprimeN:2", "--emit", "json"], capsys)
    assert code == 0 and len(json.loads(out)["folding_points"]) >= 2


def test_retract_empty_word_is_straight(capsys):
    code, out, _ = run(["retract", "--emit", "json"], capsys)
    assert code == 0 and len(json.loads(out)["pieces"]) == 1


def test_json_is_byte_identical(capsys):
    _, a, _ = run(["retract", "gN:3", "--emit", "json"], capsys)
    _, b, _ = run(["retract", "gN:3", "--emit", "json"], capsys)
    assert a == b


def test_verify_and_count_roundtrip(tmp_path, capsys):
    f = tmp_path / "g2.json"
    assert main(["retract", "gN:2", "--emit", "json", "--out", str(f)]) == 0
    code, out, _ = run(["verify-hecke", str(f)], capsys)
    assert code == 0 and "PASS" in out
    code, out, _ = run(["count", str(f), "--q", "2,3", "--oracle", "--emit", "json"], capsys)
    d = json.loads(out)
    assert code == 0 and d["ok"] and d["count"] == "q^5*(q-1)^3"
    assert d["values"] == d["oracle"] == {"2": 32, "3": 1944}


def test_count_trivial_path(tmp_path, capsys):
    f = tmp_path / "straight.json"
    assert main(["retract", "--emit", "json", "--range", "1/2:1", "--out", str(f)]) == 0
    code, out, _ = run(["count", str(f), "--symbolic"], capsys)
    assert code == 0 and out.strip() == "1"


def test_count_problematic_case(tmp_path, capsys):
    # a positive path from the origin is outside the counting statement
    from masurelab.heckepath import decorate, superdecorate

    sd = superdecorate(decorate(build_path((0, 1), [(1, "e")])))
    f = tmp_path / "pos.json"
    f.write_text(json.dumps(sd.to_json()))
    code, _, err = run(["count", str(f)], capsys)
    assert code == 5 and "origin" in err


def test_verify_fold_off_thick_walls(tmp_path, capsys):
    from fractions import Fraction as Fr

    path = build_path((0, -1), [(Fr(1, 2), "e"), (Fr(1, 2), WeylElt(-1, -1))])
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(path.to_json()))
    code, out, _ = run(["verify-hecke", str(f)], capsys)
    assert code == 1 and "FAIL" in out


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(["count", str(bad)], capsys)[0] == 2
    assert run(["verify-hecke", str(bad)], capsys)[0] == 2
    assert run(["counterexample", "--field", "fp:4"], capsys)[0] == 2
    assert run(["retract", "gN:2", "--kbound", "1"], capsys)[0] == 3
    assert run(["retract", "nonsense"], capsys)[0] == 2
    assert run(["retract", "gN:2", "--range", "1:0"], capsys)[0] == 2
    assert run([], capsys)[0] == 2


def test_counterexample_fields(capsys):
    for field in ("rational", "fp:5"):
        code, out, _ = run(["counterexample", "--field", field], capsys)
        assert code == 0
        assert [l.split()[0] for l in out.strip().splitlines()] == ["PASS"] * 4


def test_svg_and_csv(capsys):
    code, out, _ = run(["retract", "gN:2", "--emit", "svg"], capsys)
    assert code == 0 and out.startswith("<svg") and out.count("<circle") == 3
    code, out, _ = run(["retract", "gN:2", "--emit", "csv"], capsys)
    assert code == 0 and len(out.strip().splitlines()) == 5


def test_selfcheck(capsys):
    code, out, _ = run(["selfcheck", "--trials", "50", "--seed", "3"], capsys)
    assert code == 0 and "0 mismatches" in out
