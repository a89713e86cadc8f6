import csv
import io
import json

import numpy as np
import pytest

from erasure_duals.bench import HEADER
from erasure_duals.cli import main
from erasure_duals.fixtures import repeated_e1, two_in_plane
from erasure_duals.frames import duality_error, make_frame
from erasure_duals.frm import read_frm, write_frm


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def small_files(tmp_path):
    f, d = tmp_path / "x.frm", tmp_path / "y.frm"
    write_frm(f, two_in_plane())
    write_frm(d, [[0.5, 0.5, 0.0], [0.0, 0.0, 1.0]])
    return f, d


@pytest.fixture
def degenerate_files(tmp_path):
    x, z = repeated_e1(4)
    f, d = tmp_path / "x31.frm", tmp_path / "z31.frm"
    write_frm(f, x)
    write_frm(d, z)
    return f, d


def test_gen_and_info(tmp_path, capsys):
    out = tmp_path / "g.frm"
    code, stdout, _ = run(capsys, "gen", "--n", 3, "--r", 2, "--out", out)
    assert code == 0 and json.loads(stdout)["N"] == 3
    code, stdout, _ = run(capsys, "info", "--frame", out)
    info = json.loads(stdout)
    assert code == 0 and (info["r"], info["N"], info["is_frame"]) == (2, 3, True)


@pytest.mark.parametrize("kind", ["canonical", "random"])
def test_gen_dual_verifies(tmp_path, capsys, kind):
    out = tmp_path / "g.frm"
    code, stdout, _ = run(capsys, "--seed", 4, "gen", "--n", 30, "--r", 20, "--out", out, "--dual", kind)
    dual = json.loads(stdout)["dual"]
    assert code == 0
    assert duality_error(make_frame(read_frm(out)), read_frm(dual)) <= 1e-9
    code, stdout, _ = run(capsys, "verify", "--frame", out, "--dual", dual)
    assert code == 0 and json.loads(stdout)["ok"]


def test_gen_complex(tmp_path, capsys):
    out = tmp_path / "c.frm"
    assert run(capsys, "gen", "--n", 4, "--r", 2, "--out", out, "--field", "complex")[0] == 0
    assert out.read_text().startswith("FRM1 complex 2 4")


def test_gen_seed_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("FRAME_ERASURE_SEED", "17")
    run(capsys, "gen", "--n", 5, "--r", 3, "--out", tmp_path / "a.frm")
    run(capsys, "gen", "--n", 5, "--r", 3, "--out", tmp_path / "b.frm", "--seed", 17)
    run(capsys, "gen", "--n", 5, "--r", 3, "--out", tmp_path / "c.frm", "--seed", 18)
    assert (tmp_path / "a.frm").read_text() == (tmp_path / "b.frm").read_text()
    assert (tmp_path / "a.frm").read_text() != (tmp_path / "c.frm").read_text()


@pytest.mark.parametrize("argv", [
    ["gen", "--n", 3, "--r", 0, "--out", "x.frm"],
    ["gen", "--n", 2, "--r", 3, "--out", "x.frm"],
    ["gen", "--n", 3],
    ["--tol-rank", "-1", "gen", "--n", 3, "--r", 2, "--out", "x.frm"],
    ["--threads", "0", "gen", "--n", 3, "--r", 2, "--out", "x.frm"],
])
def test_usage_errors(tmp_path, capsys, monkeypatch, argv):
    monkeypatch.chdir(tmp_path)
    with pytest.raises(SystemExit) as info:
        code = main([str(a) for a in argv])
        raise SystemExit(code)
    assert info.value.code == 2


def test_gen_unwritable(tmp_path, capsys):
    assert run(capsys, "gen", "--n", 3, "--r", 2, "--out", tmp_path / "no" / "x.frm")[0] == 3


def test_verify_not_dual(small_files, capsys):
    f, _ = small_files
    code, stdout, _ = run(capsys, "verify", "--frame", f, "--dual", f)
    assert code == 1 and not json.loads(stdout)["ok"]


def test_reduce_gram_small(small_files, tmp_path, capsys):
    f, d = small_files
    out = tmp_path / "v.frm"
    code, stdout, _ = run(capsys, "reduce", "--frame", f, "--dual", d, "--erase", "1",
                          "--method", "gram", "--out", out)
    assert code == 0
    np.testing.assert_allclose(read_frm(out), np.eye(2), atol=1e-15)
    meta = json.loads((tmp_path / "v.frm.json").read_text())
    assert meta["method"] == "gram" and meta["erased_indices"] == [1]
    assert json.loads(stdout)["method"] == "gram"


def test_reduce_iter_sidecar_steps(small_files, tmp_path, capsys):
    f, d = small_files
    out = tmp_path / "v.frm"
    assert run(capsys, "reduce", "--frame", f, "--dual", d, "--erase", "1",
               "--method", "iter", "--out", out)[0] == 0
    assert json.loads((tmp_path / "v.frm.json").read_text())["steps"] == pytest.approx([0.5])


def test_reduce_degenerate_iter(degenerate_files, capsys):
    f, d = degenerate_files
    code, stdout, err = run(capsys, "reduce", "--frame", f, "--dual", d, "--erase", "1", "--method", "iter")
    assert code == 5
    assert "denominator" in err.lower()
    assert stdout == ""


@pytest.mark.parametrize("method, kind", [("gram", "SingularGram"), ("op", "SingularOperator")])
def test_reduce_degenerate_other(degenerate_files, capsys, method, kind):
    f, d = degenerate_files
    code, _, err = run(capsys, "reduce", "--frame", f, "--dual", d, "--erase", "1", "--method", method)
    assert code == 5 and kind in err


def test_reduce_all(degenerate_files, tmp_path, capsys):
    f, d = degenerate_files
    out = tmp_path / "report.json"
    code, stdout, _ = run(capsys, "reduce", "--frame", f, "--dual", d, "--erase", "1",
                          "--method", "all", "--out", out)
    rep = json.loads(stdout)
    assert code == 5
    assert rep["failed"] == {"iter": "DenominatorVanishes", "gram": "SingularGram", "op": "SingularOperator"}
    assert json.loads(out.read_text()) == rep
    code, stdout, _ = run(capsys, "reduce", "--frame", f, "--erase", "2,3", "--method", "all")
    rep = json.loads(stdout)
    assert code == 0 and rep["all_equal"] and rep["input_dual_canonical"]


def test_reduce_mrc_violation(small_files, capsys):
    f, d = small_files
    code, _, err = run(capsys, "reduce", "--frame", f, "--dual", d, "--erase", "1,2", "--method", "gram")
    assert code == 4 and "minimal redundancy condition" in err


@pytest.mark.parametrize("erase", ["4", "0", "1,1", "a", "1,2,3"])
def test_reduce_bad_erase(small_files, capsys, erase):
    f, d = small_files
    assert run(capsys, "reduce", "--frame", f, "--dual", d, "--erase", erase)[0] == 2


def test_reduce_missing_file(tmp_path, capsys):
    assert run(capsys, "reduce", "--frame", tmp_path / "nope.frm", "--erase", "1")[0] == 3


def test_transmit_recovered(small_files, tmp_path, capsys):
    f, d = small_files
    sig = tmp_path / "h.txt"
    sig.write_text("3 4\n")
    code, stdout, _ = run(capsys, "transmit", "--frame", f, "--dual", d, "--erase", "1",
                          "--signal", sig, "--method", "iter")
    rep = json.loads(stdout)
    assert code == 0 and rep["status"] == "Recovered" and rep["recon_error_rel"] <= 1e-9


def test_transmit_basis(tmp_path, capsys):
    f = tmp_path / "b.frm"
    write_frm(f, np.eye(3))
    code, stdout, _ = run(capsys, "transmit", "--frame", f, "--erase", "2", "--random-signal")
    assert code == 4 and json.loads(stdout)["status"] == "MrcViolated"


def test_transmit_degenerate(degenerate_files, capsys):
    f, d = degenerate_files
    code, stdout, _ = run(capsys, "transmit", "--frame", f, "--dual", d, "--erase", "1",
                          "--random-signal", "--method", "iter")
    rep = json.loads(stdout)
    assert code == 5 and rep["reason"] == "DenominatorVanishes"


@pytest.mark.parametrize("content", ["3 x\n", "1 2 3\n", "nan 1\n"])
def test_transmit_bad_signal(small_files, tmp_path, capsys, content):
    f, d = small_files
    sig = tmp_path / "h.txt"
    sig.write_text(content)
    assert run(capsys, "transmit", "--frame", f, "--erase", "1", "--signal", sig)[0] == 3


def test_transmit_batch_jsonl(tmp_path, capsys):
    out = tmp_path / "g.frm"
    run(capsys, "gen", "--n", 40, "--r", 20, "--out", out)
    code, stdout, _ = run(capsys, "transmit", "--frame", out, "--random-erase", 5,
                          "--random-signal", "--trials", 6, "--method", "op")
    lines = [json.loads(line) for line in stdout.splitlines()]
    assert code == 0 and len(lines) == 6
    assert all(r["recon_error_rel"] <= 1e-9 for r in lines)
    assert len({tuple(r["erased_indices"]) for r in lines}) > 1


def _csv_rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_bench_inline(capsys):
    code, stdout, _ = run(capsys, "bench", "--n", 30, "--r", 20, "--k", 3, "--reps", 1, "--warmup", 0)
    rows = _csv_rows(stdout)
    assert code == 0 and rows[0] == list(HEADER) and len(rows) == 2
    assert rows[1][-1] == "ok"


def test_bench_config_file_and_determinism(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps([
        {"N": 30, "r": 20, "k": 2, "seed": 1, "reps": 1, "warmup": 0},
        {"N": 40, "r": 20, "k": 4, "seed": 2, "reps": 1, "warmup": 0, "test_id": "wide"},
        {"N": 25, "r": 20, "k": 1, "seed": 3, "reps": 1, "warmup": 0, "field": "complex"},
    ]))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "bench", "--config", cfg, "--out", a)[0] == 0
    assert run(capsys, "bench", "--config", cfg, "--out", b)[0] == 0
    ra, rb = _csv_rows(a.read_text()), _csv_rows(b.read_text())
    assert len(ra) == 4 and ra[2][0] == "wide"
    e_cols = [i for i, c in enumerate(HEADER) if c.startswith("e")]
    assert [[r[i] for i in e_cols] for r in ra] == [[r[i] for i in e_cols] for r in rb]


def test_bench_bad_config(tmp_path, capsys):
    assert run(capsys, "bench", "--n", 3)[0] == 2
    cfg = tmp_path / "c.json"
    cfg.write_text("{not json")
    assert run(capsys, "bench", "--config", cfg)[0] == 3
    cfg.write_text('{"N": 3, "r": 5, "k": 1}')
    assert run(capsys, "bench", "--config", cfg)[0] == 2


def test_bench_basis_mrc(capsys):
    assert run(capsys, "bench", "--n", 5, "--r", 5, "--k", 1, "--reps", 1, "--warmup", 0)[0] == 4
