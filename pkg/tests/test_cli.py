import json

import pytest

from regimesplit.cli import _glue_values, main
from regimesplit.verify import T_STAR

PIECEWISE = ["--family", "piecewise", "--breaks", "-2,-0.1,0.1,2", "--values", "0.125,2.625,0.125"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_split_gaussian(capsys):
    code, out, _ = run(capsys, "split", "--family", "gaussian", "--mu", "0", "--sigma", "1")
    assert code == 0
    assert json.loads(out)["thresholds"] == [0.0]


def test_split_piecewise_global(capsys):
    code, out, _ = run(capsys, "split", *PIECEWISE, "--force-global")
    assert code == 0
    assert json.loads(out)["thresholds"] == pytest.approx([-T_STAR, T_STAR], abs=1e-6)


def test_split_piecewise_needs_global(capsys):
    code, _, err = run(capsys, "split", *PIECEWISE)
    assert code == 3
    assert "NotLogConcave" in err


def test_split_force_logconcave_skips_probe(capsys):
    # on the symmetric two-maxima law the stationarity root found is the centre
    code, out, _ = run(capsys, "split", *PIECEWISE, "--force-logconcave")
    assert code == 0
    assert json.loads(out)["thresholds"][0] == pytest.approx(0.0, abs=1e-9)


def test_split_sample(tmp_path, capsys):
    f = tmp_path / "data.txt"
    f.write_text("0 1\n3\n")
    code, out, _ = run(capsys, "split", "--sample", str(f))
    res = json.loads(out)
    assert code == 0
    assert (res["thresholds"], res["alpha"], res["beta"]) == ([2.0], 0.5, 3.0)


def test_split_csv(capsys):
    code, out, _ = run(capsys, "split", "--family", "laplace", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0].startswith("threshold,alpha,beta")


def test_split_config(tmp_path, capsys):
    f = tmp_path / "law.cfg"
    f.write_text("family = gaussian\nmu = 2\nsigma = 3\n")
    code, out, _ = run(capsys, "split", "--config", str(f))
    assert json.loads(out)["thresholds"][0] == pytest.approx(2.0, abs=1e-8)


def test_sweep_uniform(capsys):
    code, out, _ = run(capsys, "sweep", "--family", "uniform", "--a", "-1", "--b", "1", "--range", "-0.9:0.9:19")
    rows = [line.split(",") for line in out.splitlines()[1:]]
    assert code == 0 and len(rows) == 19
    for t, fx, *_ in rows:
        assert float(fx) == pytest.approx((1 - float(t) ** 2) / 4, abs=1e-9)


def test_sweep_is_deterministic(capsys, monkeypatch):
    argv = ["sweep", "--family", "gaussian", "--range", "-2:2:9"]
    _, first, _ = run(capsys, *argv)
    monkeypatch.setenv("REGIMESPLIT_THREADS", "4")
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_elliptical(tmp_path, capsys):
    f = tmp_path / "m.cfg"
    f.write_text("dimension = 2\nmean = 0 0\nscatter = 4 0 0 1\nz0 = gaussian\n")
    code, out, _ = run(capsys, "elliptical", "--model", str(f))
    res = json.loads(out)
    assert code == 0
    assert res["u_star"] == [1.0, 0.0] and res["lambda_max"] == pytest.approx(4.0)


def test_polygon(tmp_path, capsys):
    f = tmp_path / "hex.txt"
    f.write_text("-3 0\n-1 -12\n3 -8\n3 0\n1 12\n-3 8\n")
    code, out, _ = run(capsys, "polygon", "--file", str(f), "--cut", "0", "--cut", "1", "--cut", "3")
    rows = json.loads(out)["rows"]
    assert code == 0
    assert [r.get("exact") for r in rows[:2]] == ["22045/12168", "9389/4995"]
    assert "DegenerateCut" in rows[2]["error"]


def test_lemma(capsys):
    code, out, _ = run(capsys, "lemma", "--slopes", "1")
    assert code == 0 and json.loads(out)["slack"] == pytest.approx(0.0, abs=1e-14)
    code, out, _ = run(capsys, "lemma", "--random", "50", "--seed", "3")
    assert json.loads(out)["held"] == 50


def test_verify_subset(capsys):
    code, out, _ = run(capsys, "verify", "--only", "hexagon", "--claims")
    assert code == 0
    assert "22045/12168" in out and "9389/4995" in out and "claim:" in out


def test_verify_lemma_seeded(capsys):
    code, out, _ = run(capsys, "verify", "--only", "lemma", "--n", "1000", "--seed", "7")
    assert code == 0 and "1000/1000" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["split", "--family", "nope"],
        ["split", "--family", "gaussian", "--sigma", "-1"],
        ["split"],
        ["split", "--sample", "/nonexistent/file"],
        ["sweep", "--family", "gaussian", "--range", "0:1"],
        ["polygon", "--hexagon", "--cut", "x"],
        ["lemma", "--slopes", "0"],
        ["verify", "--only", "bogus"],
    ],
)
def test_invalid_input_exits_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_malformed_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["split", "--bogus"])
    assert exc.value.code == 2


def test_negative_values_are_glued():
    assert _glue_values(["--breaks", "-2,0", "--mu", "-1", "--family", "x"]) == ["--breaks=-2,0", "--mu=-1", "--family", "x"]
