import io
import json
import subprocess
import sys

import pytest

from d4quartic.census import field_table
from d4quartic.cli import _num, parse_grid, read_reference, run, DataError


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_count_relative_both_match():
    code, out, _ = call("count-relative", "--disc", "-4", "--bound", "16", "--engine", "both")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "disc,bound,engine,total,n_c4,n_v4,n_d4"
    assert lines[-1] == "match"


def test_count_relative_non_fundamental():
    code, out, err = call("count-relative", "--disc", "9", "--bound", "10")
    assert code == 2 and "not a fundamental discriminant" in err and out == ""


def test_count_relative_direct_small():
    code, out, _ = call("count-relative", "--disc", "5", "--bound", "1", "--engine", "direct")
    assert code == 0
    assert out.splitlines()[1] == "5,1,direct,0,0,0,0"


def test_census_identity_column():
    code, out, _ = call("census", "--bound", "100,1000")
    assert code == 0
    assert out == "X,total,n_d4,n_c4,n_v4,identity_check\n100,0,0,0,0,ok\n1000,73,24,1,8,ok\n"


def test_census_bad_bound():
    assert call("census", "--bound", "0")[0] == 2
    assert call("census", "--bound", "abc")[0] == 2


def test_census_breakdown_sums():
    code, out, _ = call("census", "--bound", "2000", "--breakdown")
    rows = [line.split(",") for line in out.splitlines()[1:]]
    assert code == 0 and sum(int(r[3]) for r in rows) == int(call("census", "--bound", "2000")[1].split("\n")[1].split(",")[1])


def _write_reference(tmp_path, X, corrupt=False):
    rows = sorted(field_table(X).items())
    if corrupt:
        (d, t), c = rows[3]
        rows[3] = ((d, t), c + 1)
    p = tmp_path / "ref.csv"
    p.write_text("abs_disc,galois_type,count\n" + "".join(f"{d},{t},{c}\n" for (d, t), c in rows))
    return p


def test_compare_clean_and_corrupted(tmp_path):
    p = _write_reference(tmp_path, 3000)
    code, out, _ = call("census", "--bound", "3000", "--compare", str(p))
    assert code == 0 and out == "abs_disc,galois_type,reference,observed\n"
    p = _write_reference(tmp_path, 3000, corrupt=True)
    code, out, err = call("census", "--bound", "3000", "--compare", str(p))
    assert code == 3 and "1 discrepancies" in err
    assert len(out.splitlines()) == 2


@pytest.mark.parametrize("body, line", [
    ("abs_disc,galois_type,count\n117,D4,1\n125,C4\n", 3),
    ("abs_disc,galois_type,count\n117,D4,x\n", 2),
    ("abs_disc,galois_type,count\n117,S4,1\n", 2),
    ("abs_disc,galois_type,count\n117,D4,-1\n", 2),
    ("abs_disc,galois_type,count\n117,D4,1\n117,D4,1\n", 3),
    ("abs_disc,galois_type,count\n125,C4,1\n117,D4,1\n", 3),
    ("disc,type,count\n117,D4,1\n", 1),
])
def test_malformed_reference(tmp_path, body, line):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    code, _, err = call("census", "--bound", "1000", "--compare", str(p))
    assert code == 3 and f"bad.csv:{line}:" in err
    with pytest.raises(DataError):
        read_reference(str(p))


def test_missing_reference(tmp_path):
    assert call("census", "--bound", "1000", "--compare", str(tmp_path / "nope.csv"))[0] == 3


def test_emit_table():
    code, out, _ = call("census", "--bound", "300", "--emit-table")
    assert code == 0
    assert out.splitlines()[:4] == ["abs_disc,galois_type,count", "117,D4,1", "125,C4,1", "144,V4,1"]


def test_constant_c_json():
    code, out, _ = call("constant-c", "--truncation", "1000")
    a = json.loads(out)
    b = json.loads(call("constant-c", "--truncation", "100")[1])
    assert code == 0 and float(a["lo"]) < float(a["hi"])
    assert float(a["width"]) < float(b["width"])
    assert a["precision"]["arithmetic"] == "IEEE double"
    assert call("constant-c", "--truncation", "2")[0] == 2


def test_error_scan_json():
    code, out, _ = call("error-scan", "--disc", "-4", "--grid", "1e2:1e4:log10")
    obj = json.loads(out)
    Y = [r["Y"] for r in obj["rows"]]
    assert code == 0 and Y == sorted(Y) and Y[0] == 100 and Y[-1] == 10**4
    assert all(isinstance(r["count"], int) for r in obj["rows"])
    assert obj["precision"]["printed_digits"] == 30
    code, out, _ = call("--format", "csv", "error-scan", "--disc", "-4", "--grid", "10,20")
    assert out.startswith("Y,count,main_term,error,ratio\n")


def test_fit_secondary_json():
    code, out, _ = call("fit-secondary", "--grid", "1e3:1e5:log10")
    obj = json.loads(out)
    assert code == 0 and float(obj["fitted_D"]) > 0 and len(obj["rows"]) == 3
    assert call("fit-secondary", "--grid", "1000,5000")[0] == 2


def test_zsplit_json():
    code, out, _ = call("zsplit", "--bound", "10000")
    obj = json.loads(out)
    assert code == 0 and len(obj["rows"]) == 3 and obj["best_measured"] in {r["Z"] for r in obj["rows"]}
    assert call("zsplit", "--bound", "15")[0] == 2


@pytest.mark.parametrize("argv", [
    ["--precision", "20", "constant-c", "--truncation", "10"],
    ["--threads", "0", "census", "--bound", "10"],
    ["count-relative", "--disc", "-4"],
    ["nonsense"],
    ["error-scan", "--disc", "-4", "--grid", "1:x"],
])
def test_usage_errors(argv):
    assert call(*argv)[0] == 2


def test_grid_parsing():
    assert parse_grid("5,1,3") == [1, 3, 5]
    assert parse_grid("10:30:10") == [10, 20, 30]
    assert parse_grid("1e2:1e4:log10:2") == [100, 316, 1000, 3162, 10000]


def test_big_integers_as_strings():
    assert _num(2**53) == 2**53
    assert _num(2**53 + 1) == str(2**53 + 1)
    assert _num(1.5) == 1.5


def test_thread_count_does_not_change_bytes():
    outs = {call("--threads", str(t), "census", "--bound", "20000", "--breakdown")[1] for t in (1, 4, 8)}
    assert len(outs) == 1


def test_module_entry_point_lf():
    p = subprocess.run([sys.executable, "-m", "d4quartic", "census", "--bound", "1000"], capture_output=True)
    assert p.returncode == 0
    assert b"\r" not in p.stdout and p.stdout.endswith(b"\n")


def test_engine_mismatch_exits_4(monkeypatch):
    import d4quartic.cli as cli

    monkeypatch.setattr(cli, "count_relative_characters", lambda k, Y: -1)
    code, out, err = call("count-relative", "--disc", "-4", "--bound", "16")
    assert code == 4 and out.splitlines()[-1] == "mismatch" and "engines disagree" in err


def test_engine_check():
    code, out, _ = call("engine-check", "--max-disc", "8", "--grid", "1,64")
    assert code == 0
    assert out.splitlines()[0] == "disc,bound,direct,characters,verdict"
    assert len(out.splitlines()) == 1 + 6 * 2 and out.count(",match") == 12
    assert call("engine-check", "--max-disc", "2", "--grid", "4")[0] == 2
