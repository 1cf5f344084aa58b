import csv
import io
import json

import pytest

from negmoments.cli import FORMAT_VERSION, SCAN_COLUMNS, parse_grid, run


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_moment_k0(capsys):
    code, out, _ = call(capsys, "moment", "--q", "3", "--g", "1", "--k", "0", "--beta", "0.5")
    doc = json.loads(out)
    assert code == 0 and doc["result"]["moment"] == 1
    assert doc["format_version"] == FORMAT_VERSION
    assert doc["config"]["command"] == "moment" and doc["config"]["q"] == 3
    assert "threads" not in doc["config"]


def test_rhcheck(capsys):
    code, out, _ = call(capsys, "rhcheck", "--q", "3", "--g", "2", "--validate")
    doc = json.loads(out)["result"]
    assert code == 0 and doc["failures"] == 0 and doc["family_size"] == 162
    assert doc["functional_equation_failures"] == 0


def test_resource_refusal(capsys):
    code, _, err = call(capsys, "moment", "--q", "5", "--g", "9", "--k", "1", "--beta", "0.5")
    assert code == 2 and "refused" in err
    code, _, _ = call(capsys, "moment", "--q", "3", "--g", "2", "--k", "1", "--beta", "0.5", "--resource-cap", "100")
    assert code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["moment", "--q", "3", "--g", "1", "--bogus", "1"],
        ["symbol", "--q", "3", "--f", "0,x", "--m", "1,1"],
        ["lpoly", "--q", "3", "--D", "1,0,1"],
        ["moment", "--q", "4", "--g", "1", "--k", "1", "--beta", "0.5"],
        ["moment", "--q", "3", "--g", "1", "--k", "1"],
        ["scan", "--q", "3", "--g", "1", "--k", "1", "--beta-grid", "1:0:0.1"],
        [],
    ],
)
def test_bad_input_exits_1(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 1 and err


def test_symbol_and_lpoly(capsys):
    assert call(capsys, "symbol", "--q", "3", "--f", "0,1", "--m", "1,1")[1] == "-1\n"
    code, out, _ = call(capsys, "lpoly", "--q", "3", "--D", "0,2,0,1", "--validate")
    assert code == 0 and json.loads(out)["result"]["coeffs"] == [1, 0, 3]


def test_enumerate(capsys):
    assert call(capsys, "enumerate", "--q", "3", "--n", "3", "--kind", "squarefree", "--count-only")[1] == "18\n"
    lines = call(capsys, "enumerate", "--q", "3", "--n", "2", "--kind", "irreducible")[1].split()
    assert lines == ["1,0,1", "2,1,1", "2,2,1"]


def test_scan_csv_schema(capsys, tmp_path):
    code, out, _ = call(capsys, "scan", "--q", "3", "--g", "2", "--k", "2", "--beta-grid", "0.2:0.6:0.2", "--format", "csv",
                        "--cache-dir", str(tmp_path))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == SCAN_COLUMNS and len(rows) == 3
    types = {"q": int, "g": int, "k": float, "beta": float, "t": float, "family_size": int, "moment": float,
             "rhs": float, "rel_error": float, "regime": str}
    for row in rows:
        parsed = {c: types[c](row[c]) for c in SCAN_COLUMNS}
        assert parsed["family_size"] == 162 and parsed["moment"] > 0
    assert [float(r["beta"]) for r in rows] == [0.2, 0.4, 0.6]
    assert (tmp_path / "lpoly_q3_g2.txt").exists()


def test_nan_is_null_in_json(capsys):
    code, out, _ = call(capsys, "moment", "--q", "3", "--g", "1", "--k", "1.5", "--beta", "0.5")
    assert code == 0 and json.loads(out)["result"]["rhs"] is None


def test_config_file_and_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nq=3\ng=1\nk=1\nbeta=0.5\n")
    code, out, _ = call(capsys, "moment", "--config", str(cfg))
    assert code == 0 and json.loads(out)["result"]["moment"] == 0.9571428571428571
    code, out, _ = call(capsys, "moment", "--config", str(cfg), "--beta", "0.9")
    assert json.loads(out)["result"]["beta"] == 0.9
    cfg.write_text("q=3\nwhatever=1\n")
    assert call(capsys, "moment", "--config", str(cfg))[0] == 1
    cfg.write_text("q=three\n")
    assert call(capsys, "moment", "--config", str(cfg))[0] == 1


def test_out_file_and_threads(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["scan", "--q", "3", "--g", "2", "--k", "1", "--beta-grid", "0.1:0.5:0.1", "--format", "csv"]
    assert run(base + ["--threads", "1", "--out", str(a)]) == 0
    assert run(base + ["--threads", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_identity_and_aconst(capsys):
    assert call(capsys, "identity", "--q", "3", "--which", "tau", "--maxdeg", "6")[0] == 0
    assert call(capsys, "identity", "--q", "5", "--which", "power", "--s", "3", "--degrees", "1,2")[0] == 0
    assert call(capsys, "identity", "--q", "3", "--which", "square", "--k", "2", "--beta", "0.5")[0] == 0
    code, out, _ = call(capsys, "aconst", "--q", "3", "--k", "1", "--beta", "0.3")
    assert json.loads(out)["result"]["value"] == 1.0


def test_sieve_command(capsys):
    code, out, _ = call(capsys, "sieve", "--q", "3", "--g", "50", "--k", "1", "--beta", "0.2")
    doc = json.loads(out)["result"]
    assert code == 0 and doc["budget"]["sum_ell_N"] <= 100
    assert doc["schedule"]["top_clamped"] is True


def test_parse_grid():
    assert parse_grid("0.1:0.3:0.1") == [0.1, 0.2, 0.3]
    assert parse_grid("1:1:0.5") == [1.0]


def test_cache_dir_from_environment(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("NEGMOMENTS_CACHE_DIR", str(tmp_path))
    code, _, _ = call(capsys, "moment", "--q", "3", "--g", "1", "--k", "1", "--beta", "0.5")
    assert code == 0 and (tmp_path / "lpoly_q3_g1.txt").exists()
