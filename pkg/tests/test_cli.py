import csv
import io
import json

import pytest
from click.testing import CliRunner

from gpmatch.cli import main


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def inst(tmp_path, runner):
    out = tmp_path / "inst"
    res = runner.invoke(main, ["gen", "random", "--n", "300", "--m", "8", "--sigma-t", "30", "--sigma-p", "30",
                               "--degree-cap", "2", "--plant", "--seed", "3", "--out", str(out)])
    assert res.exit_code == 0, res.output
    return out


def _args(d):
    return [str(d / "text.txt"), str(d / "pattern.txt"), str(d / "relation.txt")]


def test_gen_prints_params(runner, tmp_path):
    res = runner.invoke(main, ["gen", "random", "--n", "20", "--m", "3", "--sigma-t", "4", "--sigma-p", "5",
                               "--density", "1", "--out", str(tmp_path / "x")])
    assert res.exit_code == 0
    assert res.output.startswith("D=5 S=20 ")


def test_gen_deterministic(runner, tmp_path):
    for name in ("a", "b"):
        runner.invoke(main, ["gen", "random", "--n", "50", "--m", "4", "--sigma-t", "9", "--sigma-p", "9",
                             "--degree-cap", "2", "--seed", "11", "--out", str(tmp_path / name)])
    for f in ("text.txt", "pattern.txt", "relation.txt"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_brute_self_match(runner, tmp_path):
    (tmp_path / "t.txt").write_text("0 1 2\n")
    (tmp_path / "r.txt").write_text("rel 3 3\n0 0\n1 1\n2 2\n")
    res = runner.invoke(main, ["count", str(tmp_path / "t.txt"), str(tmp_path / "t.txt"), str(tmp_path / "r.txt")])
    assert res.output == "1 0\n"


def test_match_algorithms_agree(runner, inst):
    want = runner.invoke(main, ["match", *_args(inst), "--algo", "brute"]).output
    assert want.strip()
    for algo in ("rand-d", "rand-s", "det-d", "det-s", "interval"):
        assert runner.invoke(main, ["match", *_args(inst), "--algo", algo]).output == want


def test_zero_index(runner, inst):
    one = runner.invoke(main, ["match", *_args(inst)]).output.split()
    zero = runner.invoke(main, ["match", *_args(inst), "--zero-index"]).output.split()
    assert [int(x) - 1 for x in one] == [int(x) for x in zero]


def test_json_lines(runner, inst):
    res = runner.invoke(main, ["count", *_args(inst), "--format", "json"])
    rows = [json.loads(line) for line in res.output.splitlines()]
    assert len(rows) == 293 and set(rows[0]) == {"i", "count"}


def test_band_columns(runner, inst):
    res = runner.invoke(main, ["count", *_args(inst), "--algo", "det-d", "--eps", "1/4"])
    first = res.output.splitlines()[0].split()
    assert len(first) == 4


def test_byte_identical_runs(runner, inst):
    cmd = ["count", *_args(inst), "--algo", "rand-count", "--eps", "0.25", "--seed", "5"]
    assert runner.invoke(main, cmd).output == runner.invoke(main, cmd).output


def test_exit_codes(runner, inst, tmp_path):
    assert runner.invoke(main, ["count", "missing.txt", *_args(inst)[1:]]).exit_code == 2
    assert runner.invoke(main, ["count", *_args(inst), "--algo", "det-d"]).exit_code == 2
    assert runner.invoke(main, ["count", *_args(inst), "--algo", "rand-count", "--eps", "2"]).exit_code == 2
    assert runner.invoke(main, ["count", *_args(inst), "--algo", "nope"]).exit_code == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("rel 3\n")
    assert runner.invoke(main, ["count", *_args(inst)[:2], str(bad)]).exit_code == 2


def test_threshold_without_relation(runner, tmp_path):
    (tmp_path / "t.txt").write_text("1 5 9\n")
    (tmp_path / "p.txt").write_text("4\n")
    res = runner.invoke(main, ["count", str(tmp_path / "t.txt"), str(tmp_path / "p.txt"),
                               "--algo", "threshold", "--delta", "2"])
    assert res.output == "1 1\n2 0\n3 1\n"


@pytest.mark.parametrize("algo", ["interval", "det-d", "det-s", "rand-d", "rand-count", "threshold"])
def test_verify_passes(runner, algo, tmp_path):
    res = runner.invoke(main, ["verify", "--algo", algo, "--instances", "20", "--dump", str(tmp_path / "ce")])
    assert res.exit_code == 0, res.output
    assert res.output.startswith("PASS")


@pytest.mark.parametrize("algo", ["brute", "interval", "det-d", "rand-d", "rand-count"])
def test_verify_rejects_corruption(runner, algo, tmp_path):
    dump = tmp_path / "ce"
    res = runner.invoke(main, ["verify", "--algo", algo, "--instances", "5", "--corrupt", "--dump", str(dump)])
    assert res.exit_code == 1
    assert res.output.startswith("FAIL")
    info = json.loads((dump / "info.json").read_text())
    assert info["algo"] == algo and "seed" in info
    assert (dump / "text.txt").exists()


def test_bench_csv(runner):
    res = runner.invoke(main, ["bench", "--algo", "interval", "--algo", "brute",
                               "--n", "4096,8192,16384,32768,65536", "--reps", "1"])
    assert res.exit_code == 0, res.output
    rows = list(csv.DictReader(io.StringIO(res.output)))
    assert len(rows) == 10
    assert list(rows[0]) == ["algo", "n", "m", "D", "S", "I", "eps", "threads", "reps", "median_s"]
    assert all(v not in ("", "nan", "NaN") for r in rows for v in r.values())


def test_discrepancy_and_codes(runner, tmp_path):
    path = tmp_path / "s.txt"
    assert runner.invoke(main, ["gen", "sys", "--z", "16", "--k", "32", "--out", str(path)]).exit_code == 0
    res = runner.invoke(main, ["discrepancy", str(path), "--partition"])
    assert res.exit_code == 0 and "audit=PASS" in res.output and "partition" in res.output
    res = runner.invoke(main, ["codes", str(path), "--eps", "1/2"])
    assert res.exit_code == 0 and "verdict=PASS" in res.output


def test_gen_matrix_and_diagonal(runner, tmp_path):
    res = runner.invoke(main, ["gen", "matrix", "--random", "3", "4", "5", "--out", str(tmp_path / "mm")])
    assert res.exit_code == 0
    lines = (tmp_path / "mm" / "alignments.txt").read_text().splitlines()[1:]
    occ = set(runner.invoke(main, ["match", *_args(tmp_path / "mm")]).output.split())
    for line in lines:
        _, _, al, prod = line.split()
        assert (al not in occ) == (prod == "1")
    res = runner.invoke(main, ["gen", "diagonal", "--n", "20", "--m", "4", "--grant", "--out", str(tmp_path / "dg")])
    assert res.exit_code == 0 and "S=80" in res.output
    assert len(runner.invoke(main, ["match", *_args(tmp_path / "dg")]).output.split()) == 1
