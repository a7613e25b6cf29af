import json

from voablocks.cli import RunConfig, main


def _read(path):
    with open(path) as fh:
        return fh.read()


def test_uc_solve_example(tmp_path):
    out = tmp_path / "uc.tsv"
    status = main(["uc-solve", "--taylor", "1,1,1,1", "--out", str(out)])
    assert status == 0
    assert _read(out) == "c0\t1\nc1\t1\nc2\t0\nc3\t0\n"


def test_uc_solve_rational_input(tmp_path):
    out = tmp_path / "uc.tsv"
    status = main(["uc-solve", "--taylor", "3/2,0,0", "--out", str(out)])
    assert status == 0
    assert _read(out).splitlines()[0] == "c0\t3/2"


def test_config_round_trip():
    cfg = RunConfig(
        subcommand="sew",
        cutoffs={"L": 20, "N": 6, "M": 10},
        points=["1/2", "3/4"],
        seed=7,
        mode="float",
        threads=4,
        params={"u": [{"monomial": [2]}]},
    )
    again = RunConfig.from_json(cfg.to_json())
    assert again.to_json() == cfg.to_json()


def test_schema_violation_reports_field_path(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"subcommand": "sew", "cutoffs": {"L": -3}}))
    status = main(["sew", "--config", str(bad)])
    assert status == 2
    assert "cutoffs.L" in capsys.readouterr().err


def test_unknown_field_rejected(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"subcommand": "sew", "bogus": 1}))
    assert main(["sew", "--config", str(bad)]) == 2
    assert "bogus" in capsys.readouterr().err


def test_residue_check_fixtures(tmp_path):
    out = tmp_path / "r.tsv"
    assert main(["residue-check", "--out", str(out)]) == 0
    body = _read(out)
    assert "constant\ttrue\tpass" in body
    assert "perturbed-fail\tfalse\tpass" in body
    assert "simple-pole\ttrue\tpass" in body


def test_residue_check_detects_violation(tmp_path):
    cfg = {
        "subcommand": "residue-check",
        "params": {
            "marked": ["0", "inf"],
            "series": [
                [{"terms": [[0, 1, "1"]], "trunc": 8}],
                [{"terms": [[0, 1, "1"], [1, 1, "1"]], "trunc": 8}],
            ],
            "expect": True,
            "pole_bound": 2,
            "dual_pole_bound": 4,
        },
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "r.tsv"
    status = main(["residue-check", "--config", str(path), "--out", str(out)])
    assert status == 1
    assert "FAIL" in _read(out)


def test_sew_output(tmp_path):
    out = tmp_path / "s.tsv"
    assert main(["sew", "--cutoff-q", "5", "--out", str(out)]) == 0
    lines = _read(out).splitlines()
    assert lines[0] == "q_exponent\tcoefficient"
    assert len(lines) > 2


def test_commute_check_cli(tmp_path):
    cfg = {
        "subcommand": "commute-check",
        "cutoffs": {"L": 24, "N": 6},
        "params": {
            "insertions_a": [[{"monomial": [1]}]],
            "points_a": ["1/3"],
            "insertions_b": [[{"monomial": [1]}]],
            "points_b": ["3/2"],
            "w": [{"monomial": [1]}],
            "wp": [{"monomial": [1]}],
        },
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "c.tsv"
    assert main(["commute-check", "--config", str(path), "--out", str(out)]) == 0
    for line in _read(out).splitlines()[1:-1]:
        assert line.split("\t")[3] == "0"


def test_twist_modes_json(tmp_path):
    out = tmp_path / "m.json"
    assert main(["twist-modes", "--k", "2", "--grade", "1", "--out", str(out)]) == 0
    payload = json.loads(_read(out))
    assert payload["k"] == 2
    assert payload["modes"]
    for entry in payload["modes"]:
        num, den = entry["n"]
        assert den in (1, 2)


def test_twist_check_small(tmp_path):
    out = tmp_path / "t.tsv"
    assert main(["twist-check", "--k", "2", "--grade", "2", "--out", str(out)]) == 0
    body = _read(out)
    assert "grading\t2\tpass" in body
    assert "equivariance\t2\tpass" in body
    assert "jacobi\t2\tpass" in body
    assert "path-agreement\t2\tpass" in body


def test_jacobi_check_small(tmp_path):
    out = tmp_path / "j.tsv"
    assert main(["jacobi-check", "--grade", "1", "--cutoff-grade", "12", "--out", str(out)]) == 0
    assert _read(out).splitlines()[1].endswith("\t0")


def test_float_mode(tmp_path):
    out = tmp_path / "uc.tsv"
    assert main(["uc-solve", "--taylor", "1/2,0", "--mode", "float", "--out", str(out)]) == 0
    assert _read(out).splitlines()[0].startswith("c0\t0.5")


def test_thread_count_does_not_change_output(tmp_path):
    baseline = None
    for threads in (1, 4):
        out = tmp_path / f"r{threads}.tsv"
        assert main(["residue-check", "--threads", str(threads), "--out", str(out)]) == 0
        body = _read(out)
        if baseline is None:
            baseline = body
        assert body == baseline


def test_propagate_cli(tmp_path):
    import json

    cfg = {
        "subcommand": "propagate",
        "cutoffs": {"L": 30},
        "points": ["1/2", "2"],
        "params": {
            "insertions": [[{"monomial": [1]}], [{"monomial": [1]}]],
            "w": [{"monomial": []}],
            "wp": [{"monomial": []}],
        },
    }
    path = tmp_path / "p.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "p.tsv"
    assert main(["propagate", "--config", str(path), "--out", str(out)]) == 0
    lines = _read(out).splitlines()
    assert lines[0] == "grade_cutoff\tpartial_sum_re\tpartial_sum_im\ttail_estimate"
    assert any(line.startswith("# oracle value") for line in lines)
    # last partial sum is near the oracle 1/(1/2 - 2)^2 = 4/9
    final = float(lines[-3].split("\t")[1])
    assert abs(final - 4 / 9) < 1e-6


def test_overflow_surfaced_with_cutoff(tmp_path, capsys):
    import json

    cfg = {
        "subcommand": "propagate",
        "cutoffs": {"L": 2},
        "points": ["1/2"],
        "params": {
            "insertions": [[{"monomial": [1]}]],
            "w": [{"monomial": [2, 1]}],
            "wp": [{"monomial": [2, 1, 1]}],
        },
    }
    path = tmp_path / "p.json"
    path.write_text(json.dumps(cfg))
    status = main(["propagate", "--config", str(path)])
    assert status == 1
    err = capsys.readouterr().err
    assert "cutoff 2" in err
