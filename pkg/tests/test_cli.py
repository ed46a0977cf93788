import json

import pytest

from widecount.cli import parse_range, run
from widecount.gallery import unlabeled_tree_counts
from widecount.quasipoly import write_sequence_csv


def _run_json(argv, capsys):
    code = run(list(argv) + ["--no-timing"])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_parse_range():
    assert parse_range("0..4") == [0, 1, 2, 3, 4]
    assert parse_range("7") == [7]


def test_example_cube_verify(capsys):
    code, data = _run_json(["example", "cube", "--d", "3", "--n", "0..12", "--verify"], capsys)
    assert code == 0
    counts = [int(c) for _, c in data["sequence"]]
    assert counts == [1, 1, 2, 4, 5, 7, 10, 12, 15, 19, 22, 26, 31]
    assert data["verdict"] == "pass"
    assert not data["truncated"]


def test_elementary_galois_fit(capsys):
    code, data = _run_json(
        ["elementary", "--k", "2", "--group", "(1 2)", "--n", "0..10", "--fit"], capsys
    )
    assert code == 0
    assert [int(c) for _, c in data["sequence"]] == [n // 2 + 1 for n in range(11)]
    qp = data["quasipolynomial"]
    assert qp["period"] == 2
    assert qp["constituents"][0] == [["1", "1"], ["1", "2"]]


def test_fit_subcommand_nofit_on_trees(tmp_path, capsys):
    counts = unlabeled_tree_counts(10)
    path = tmp_path / "seq.csv"
    write_sequence_csv(path, {n: counts[n - 1] for n in range(1, 11)})
    code, data = _run_json(
        ["fit", "--in", str(path), "--max-period", "6", "--max-degree", "4"], capsys
    )
    assert code == 2  # the NoFit verdict is a reported cross-check failure
    assert any("nofit" in v.get("witness", {}) for v in data["checks"])


def test_fit_subcommand_success(tmp_path, capsys):
    path = tmp_path / "lin.csv"
    write_sequence_csv(path, {n: 3 * n + 1 for n in range(12)})
    code, data = _run_json(["fit", "--in", str(path)], capsys)
    assert code == 0
    assert data["quasipolynomial"]["period"] == 1


def test_codes_count_cross_check(capsys):
    code, data = _run_json(
        ["codes", "count", "--q", "2", "--m", "2", "--n", "2..6", "--method", "both"], capsys
    )
    assert code == 0
    assert [int(c) for _, c in data["sequence"]] == [1, 3, 6, 10, 16]
    assert all(v["status"] == "pass" for v in data["checks"])


def test_codes_fit(capsys):
    code, data = _run_json(["codes", "fit", "--q", "2", "--m", "1", "--nmax", "9"], capsys)
    assert code == 0
    assert data["quasipolynomial"]["period"] == 1


def test_ranks_verify(capsys):
    code, data = _run_json(
        ["ranks", "--entries", "0,1", "--k", "2", "--n", "4", "--shape", "symmetric", "--verify"],
        capsys,
    )
    assert code == 0
    assert data["sequence"] == [["4", "14"]]


def test_model_both_methods(capsys):
    code, data = _run_json(
        ["model", "--preset", "roots-of-unity", "--d", "2", "--n", "1..6"], capsys
    )
    assert code == 0
    assert [int(c) for _, c in data["sequence"]] == [1, 2, 2, 3, 3, 4]
    assert all(v["status"] == "pass" for v in data["checks"])


def test_precomp_planes(capsys):
    code, data = _run_json(["precomp", "--preset", "planes", "--n", "0..5"], capsys)
    assert code == 0
    assert [int(c) for _, c in data["sequence"]] == [1] * 6


def test_verify_suite(capsys):
    code, data = _run_json(["verify"], capsys)
    assert code == 0
    assert data["verdict"] == "pass"


def test_usage_error_exit_code(capsys):
    assert run(["example"]) == 1
    assert run(["nonsense"]) == 1


def test_reports_byte_stable(capsys):
    code1 = run(["example", "galois", "--n", "0..6", "--verify", "--no-timing"])
    out1 = capsys.readouterr().out
    code2 = run(["example", "galois", "--n", "0..6", "--verify", "--no-timing"])
    out2 = capsys.readouterr().out
    assert code1 == code2 == 0
    assert out1 == out2


def test_out_and_csv_files(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = run(["example", "galois", "--n", "0..4", "--out", str(out), "--no-timing"])
    assert code == 0
    data = json.loads(out.read_text())
    assert [int(c) for _, c in data["sequence"]] == [1, 1, 2, 2, 3]
    csv_text = (tmp_path / "report.csv").read_text().strip().splitlines()
    assert csv_text[0] == "n,count"
    assert csv_text[1] == "0,1"


def test_time_limit_truncates(capsys):
    code, data = _run_json(
        ["example", "cube", "--d", "4", "--n", "0..40", "--time-limit", "0"], capsys
    )
    assert data["truncated"] is True
    # a truncated report reports only the prefix it completed, never junk
    assert len(data["sequence"]) <= 41
