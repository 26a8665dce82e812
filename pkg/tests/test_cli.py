"""CLI thin client: commands, formats, exit codes."""

import json

import pytest

from folspec.cli import main

# valid only because the two differentials of x5 cancel: d(dx5) =
# (dx3 + dx3b)^x4 = (x1^x2 - x1^x2)^x4 = 0; bumping one coefficient breaks it
CANCELING_MODEL = {
    "scalar": "rational",
    "p": 2,
    "q": 4,
    "generators": [
        {"name": "x1", "bidegree": [1, 0]},
        {"name": "x2", "bidegree": [1, 0]},
        {"name": "x3", "bidegree": [1, 0]},
        {"name": "x3b", "bidegree": [1, 0]},
        {"name": "x4", "bidegree": [0, 1]},
        {"name": "x5", "bidegree": [0, 1]},
    ],
    "differentials": [
        {"on": "x3", "value": [{"coeff": "1", "monomial": ["x1", "x2"]}]},
        {"on": "x3b", "value": [{"coeff": "-1", "monomial": ["x1", "x2"]}]},
        {
            "on": "x5",
            "value": [
                {"coeff": "1", "monomial": ["x3", "x4"]},
                {"coeff": "1", "monomial": ["x3b", "x4"]},
            ],
        },
    ],
}


def write_json(path, data):
    path.write_text(json.dumps(data, indent=2))
    return str(path)


def test_validate_ok_and_corrupted_coefficient(tmp_path, capsys):
    good = write_json(tmp_path / "good.json", CANCELING_MODEL)
    assert main(["validate", good]) == 0
    capsys.readouterr()

    corrupted = json.loads(json.dumps(CANCELING_MODEL))
    corrupted["differentials"][2]["value"][1]["coeff"] = "2"
    bad = write_json(tmp_path / "bad.json", corrupted)
    assert main(["validate", bad]) == 1
    out = capsys.readouterr().out
    assert "INVALID" in out
    assert "(0, 1)" in out  # the failing source cell, x5's cell


def test_validate_missing_file_is_io_error(capsys):
    assert main(["validate", "/no/such/file.json"]) == 2
    assert "error" in capsys.readouterr().err


def test_validate_unparseable_json_is_io_error(tmp_path, capsys):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    assert main(["validate", str(path)]) == 2


def test_emit_then_validate_round_trip(tmp_path, capsys):
    out = tmp_path / "kodaira.json"
    assert main(["emit", "--builtin", "kodaira", "-o", str(out)]) == 0
    assert main(["validate", str(out)]) == 0
    capsys.readouterr()


def test_emit_is_deterministic(tmp_path):
    for builtin, extra in [("kodaira", []), ("suspension", ["--n", "1", "--modes", "2"])]:
        a, b = tmp_path / f"{builtin}_a.json", tmp_path / f"{builtin}_b.json"
        for target in (a, b):
            assert main(["emit", "--builtin", builtin, *extra, "-o", str(target)]) == 0
        assert a.read_bytes() == b.read_bytes()


def test_emit_unwritable_path(capsys):
    assert main(["emit", "--builtin", "kodaira", "-o", "/no-such-dir/out.json"]) == 2


def test_pages_kodaira_table_output(capsys):
    assert main(["pages", "--builtin", "kodaira", "--max-page", "4"]) == 0
    out = capsys.readouterr().out
    assert "E_2" in out and "E_4  (stabilized)" in out
    assert "euler characteristic per page: [0]" in out
    assert "match" in out
    assert "direct/iterated agreement: True" in out


def test_pages_json_output(capsys):
    assert main(["pages", "--builtin", "kodaira", "--max-page", "2", "--format", "json"]) == 0
    body = json.loads(capsys.readouterr().out)
    page2 = next(t for t in body["pages"] if t["page"] == 2)
    dims = {(u, v): d for u, v, d in page2["dims"]}
    assert dims[(0, 0)] == 1 and dims[(1, 1)] == 4


def test_pages_suspension_vanishing_cells(capsys):
    assert main(["pages", "--builtin", "suspension", "--n", "1", "--modes", "4",
                 "--max-page", "2", "--format", "json"]) == 0
    body = json.loads(capsys.readouterr().out)
    dims = {(u, v): d for u, v, d in body["pages"][2]["dims"]}
    assert dims[(2, 0)] == 0 and dims[(0, 1)] == 0


def test_pages_requires_one_source(capsys):
    with pytest.raises(SystemExit):
        main(["pages"])
    with pytest.raises(SystemExit):
        main(["pages", "--builtin", "kodaira", "--model", "x.json"])


def test_predict_hopf(capsys):
    assert main(["predict", "--n", "1", "--betti", "1,1,0,1,1", "--quasi-regular"]) == 0
    out = capsys.readouterr().out
    assert "e: [1, 0, 1]" in out


def test_predict_json_and_rejection(capsys):
    assert main(["predict", "--n", "1", "--betti", "1,1,0,1,1", "--quasi-regular",
                 "--format", "json"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["rows"]["1"] == [2, 0, 2]
    assert main(["predict", "--n", "1", "--betti", "1,0,0,0,1"]) == 1
    err = capsys.readouterr().err
    assert "NotVaismanCompatible" in err


def test_check_exit_codes(tmp_path, capsys):
    assert main(["check", "--builtin", "suspension", "--n", "1", "--modes", "2"]) == 1
    out = capsys.readouterr().out
    assert "NotVaisman" in out
    assert "top_basic_cohomology_vanishes" in out
    assert "leafwise_term_below_two" in out

    assert main(["check", "--builtin", "kodaira"]) == 0
    assert "Inconclusive" in capsys.readouterr().out

    table = {
        "page": 2, "q": 2, "p": 2, "stabilized": False,
        "dims": [[0, 0, 1], [0, 1, 1], [0, 2, 1], [1, 0, 1], [1, 1, 2],
                 [1, 2, 1], [2, 0, 1], [2, 1, 2], [2, 2, 1]],
    }
    path = write_json(tmp_path / "table.json", table)
    assert main(["check", "--table", path]) == 1
    assert "leafwise_term_below_two" in capsys.readouterr().out


def test_adiabatic_csv(capsys):
    assert main(["adiabatic", "--builtin", "kodaira", "--h", "1,0.5,0.25",
                 "--degree", "1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("# degree=1 kernel_dim=3")
    assert out[2].startswith("h,small_count,lambda_1")
    assert len(out) == 6  # two comment lines, header, three sweep rows


def test_adiabatic_exact_model_errors(tmp_path, capsys):
    path = write_json(tmp_path / "exact.json", CANCELING_MODEL)
    assert main(["adiabatic", "--model", path, "--h", "1", "--degree", "1"]) == 1
    assert "BackendError" in capsys.readouterr().err


def test_matrix_a_output(capsys):
    assert main(["matrix-a", "--n", "1", "--diophantine-height", "2"]) == 0
    out = capsys.readouterr().out
    assert "det A = 1" in out
    assert "diophantine v_1" in out


def test_matrix_a_json(capsys):
    assert main(["matrix-a", "--n", "2", "--format", "json"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["diagonal"] == [1, 2, 3, 7, 43]


ZERO_DIFFERENTIAL_MODEL = {
    "scalar": "rational",
    "p": 1,
    "q": 1,
    "generators": [
        {"name": "t1", "bidegree": [1, 0]},
        {"name": "l1", "bidegree": [0, 1]},
    ],
    "differentials": [],
}


def test_pages_zero_differential_fixture_all_pages_equal(tmp_path, capsys):
    path = write_json(tmp_path / "zero.json", ZERO_DIFFERENTIAL_MODEL)
    assert main(["pages", "--model", path, "--format", "json"]) == 0
    body = json.loads(capsys.readouterr().out)
    first = body["pages"][0]["dims"]
    assert all(t["dims"] == first for t in body["pages"])
    assert all(t["stabilized"] for t in body["pages"])


def test_pages_corrupted_model_fails_with_cells(tmp_path, capsys):
    corrupted = json.loads(json.dumps(CANCELING_MODEL))
    corrupted["differentials"][2]["value"][0]["coeff"] = "3"
    path = write_json(tmp_path / "broken.json", corrupted)
    assert main(["pages", "--model", path]) == 1
    assert "square to zero" in capsys.readouterr().err


def test_predict_table_feeds_check(tmp_path, capsys):
    # the prediction's table field is valid page-table JSON for `check`
    assert main(["predict", "--n", "1", "--betti", "1,1,0,1,1", "--quasi-regular",
                 "--format", "json"]) == 0
    body = json.loads(capsys.readouterr().out)
    path = write_json(tmp_path / "pred.json", body["table"])
    assert main(["check", "--table", path]) == 0
    assert "Inconclusive" in capsys.readouterr().out


def test_pages_tolerance_override(capsys):
    assert main(["pages", "--builtin", "suspension", "--n", "1", "--modes", "2",
                 "--tolerance", "1e-6", "--max-page", "2", "--format", "json"]) == 0
    body = json.loads(capsys.readouterr().out)
    dims = {(u, v): d for u, v, d in body["pages"][2]["dims"]}
    assert dims[(2, 0)] == 0 and dims[(0, 1)] == 0
    assert body["direct_agreement"] is True


def test_predict_kodaira_vector(capsys):
    assert main(["predict", "--n", "1", "--betti", "1,3,4,3,1", "--quasi-regular",
                 "--format", "json"]) == 0
    body = json.loads(capsys.readouterr().out)
    assert body["e"] == [1, 2, 1]
    assert body["rows"] == {"0": [1, 2, 1], "1": [2, 4, 2], "2": [1, 2, 1]}
