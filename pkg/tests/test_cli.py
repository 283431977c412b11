import json

import numpy as np
import pytest

from shortops.cli import main, parse_tolerance
from shortops.serialize import matrix_to_payload


def write_matrix(path, A):
    path.write_text(json.dumps(matrix_to_payload(np.asarray(A, dtype=complex))))
    return str(path)

def write_subspace(path, columns):
    cols = np.asarray(columns, dtype=complex)
    payload = {"ambient": cols.shape[0], "kind": "basis",
               "data": matrix_to_payload(cols)}
    path.write_text(json.dumps(payload))
    return str(path)


@pytest.fixture
def worked(tmp_path):
    a = write_matrix(tmp_path / "A.json", [[2.0, 1.0], [1.0, 1.0]])
    s = write_subspace(tmp_path / "S.json", [[1.0], [0.0]])
    return a, s


def test_cmd_short_success(worked, capsys):
    a, s = worked
    assert main(["short", a, s, s]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["tool"] == "shortops"
    assert report["tolerance"]["eq_rel"] == 1e-9
    assert report["result"]["shorted"]["data"] == [[1.0, 0.0], [0.0, 0.0]]
    assert report["result"]["diagnostics"]["qa_ap_gap"] <= 1e-9


def test_cmd_short_not_complementable(tmp_path, capsys):
    a = write_matrix(tmp_path / "A.json", [[1.0, 1.0], [1.0, 0.0]])
    s = write_subspace(tmp_path / "S.json", [[1.0], [0.0]])
    assert main(["short", a, s, s]) == 2
    report = json.loads(capsys.readouterr().out)
    assert report["error"] == "not-complementable"
    assert report["report"]["strongly"] is False


def test_cmd_short_malformed_input(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    s = write_subspace(tmp_path / "S.json", [[1.0], [0.0]])
    assert main(["short", str(bad), s, s]) == 1
    missing = str(tmp_path / "missing.json")
    assert main(["short", missing, s, s]) == 1


def test_cmd_psum(tmp_path, capsys):
    a = write_matrix(tmp_path / "a.json", [[2.0]])
    b = write_matrix(tmp_path / "b.json", [[2.0]])
    assert main(["psum", a, b]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["result"]["sum"]["data"] == [[1.0]]
    assert report["result"]["max_route_disagreement"] <= 1e-12

    c = write_matrix(tmp_path / "c.json", np.diag([1.0, 0.0]))
    d = write_matrix(tmp_path / "d.json", np.diag([-1.0, 0.0]))
    assert main(["psum", c, d]) == 2
    assert json.loads(capsys.readouterr().out)["error"] == "not-summable"

    e = write_matrix(tmp_path / "e.json", np.eye(3))
    assert main(["psum", a, e]) == 1


def test_cmd_psub(tmp_path, capsys):
    c = write_matrix(tmp_path / "c.json", [[1.0]])
    a = write_matrix(tmp_path / "a.json", [[2.0]])
    assert main(["psub", c, a]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["result"]["difference"]["data"] == [[2.0]]
    assert report["result"]["round_trip_residual"] <= 1e-12

    assert main(["psub", a, a]) == 2


def test_cmd_check_complementable(worked, capsys):
    a, s = worked
    assert main(["check", a, s, s, "--what", "complementable"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["holds"] is True
    assert report["report"]["witnesses"] is not None


def test_cmd_check_minus_and_summable(tmp_path, capsys):
    c = write_matrix(tmp_path / "c.json", np.diag([1.0, 0.0, 0.0]))
    b = write_matrix(tmp_path / "b.json", np.diag([1.0, 1.0, 0.0]))
    assert main(["check", c, b, "--what", "minus"]) == 0
    capsys.readouterr()

    x = write_matrix(tmp_path / "x.json", np.diag([1.0, 0.0]))
    y = write_matrix(tmp_path / "y.json", np.diag([-1.0, 0.0]))
    assert main(["check", x, y, "--what", "summable"]) == 3
    report = json.loads(capsys.readouterr().out)
    assert report["holds"] is False

    assert main(["check", x, "--what", "summable"]) == 1


def test_cmd_converge(worked, tmp_path, capsys):
    a, s = worked
    b = write_matrix(tmp_path / "B.json", np.diag([1.0, 0.0]))
    assert main(["converge", a, s, s, b, "--schedule", "1,2,4,8"]) == 0
    report = json.loads(capsys.readouterr().out)
    errors = report["result"]["errors"]
    assert errors == pytest.approx([1 / 2, 1 / 3, 1 / 5, 1 / 9], abs=1e-12)

    # generated auxiliary (seeded) also converges
    assert main(["converge", a, s, s, "--seed", "3", "--schedule", "1,4,16,64"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["result"]["errors"][-1] < report["result"]["errors"][0]

    assert main(["converge", a, s, str(tmp_path / "nope.json")]) == 1


def test_cmd_converge_not_complementable(tmp_path, capsys):
    a = write_matrix(tmp_path / "A.json", [[1.0, 1.0], [1.0, 0.0]])
    s = write_subspace(tmp_path / "S.json", [[1.0], [0.0]])
    assert main(["converge", a, s, s]) == 2


def test_cmd_verify_and_determinism(tmp_path, capsys):
    out1 = tmp_path / "r1.json"
    argv = ["verify", "--seed", "7", "--trials", "2", "--json-out", str(out1)]
    assert main(argv) == 0
    first = out1.read_bytes()
    assert main(argv) == 0
    assert out1.read_bytes() == first
    report = json.loads(first)
    assert report["report"]["total_failures"] == 0
    assert report["report"]["rng"] == "pcg64"


def test_cmd_verify_exit_four_on_failures(tmp_path, capsys, monkeypatch):
    import shortops.cli as cli
    from shortops.genlab import InvariantOutcome, SuiteReport

    def fake_suite(config, tol):
        report = SuiteReport(seed=config.seed, dim_range=config.dim_range,
                            trials=config.trials,
                            condition_cap=config.condition_cap,
                            rng_name="pcg64")
        report.outcomes["probe"] = InvariantOutcome(passed=0, failed=1, skipped=0)
        report.failures.append({"invariant": "probe", "trial": 0,
                                "entropy": [config.seed, 0, 0]})
        return report

    monkeypatch.setattr(cli, "run_suite", fake_suite)
    assert main(["verify", "--trials", "1"]) == 4
    report = json.loads(capsys.readouterr().out)
    assert report["report"]["failures"][0]["entropy"] == [20240801, 0, 0]


def test_cmd_demo_impedance(capsys, tmp_path):
    assert main(["demo-impedance", "--resistors", "2", "2"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["result"]["impedance"]["data"] == [[1.0]]

    z = write_matrix(tmp_path / "z.json", np.diag([2.0, 4.0]))
    assert main(["demo-impedance", "--ports", z, z]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["result"]["impedance"]["data"] == [[1.0, 0.0], [0.0, 2.0]]

    assert main(["demo-impedance", "--resistors", "2"]) == 1


def test_tolerance_flag_and_env(tmp_path, capsys, monkeypatch):
    a = write_matrix(tmp_path / "a.json", [[2.0]])
    b = write_matrix(tmp_path / "b.json", [[2.0]])
    assert main(["psum", a, b, "--tol", "eq_rel=1e-6,rank_rel=1e-8"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["tolerance"]["eq_rel"] == 1e-6
    assert report["tolerance"]["rank_rel"] == 1e-8

    monkeypatch.setenv("SHORTOPS_TOL", "psd_slack=1e-8")
    assert main(["psum", a, b]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["tolerance"]["psd_slack"] == 1e-8

    # the command-line flag wins over the environment
    monkeypatch.setenv("SHORTOPS_TOL", "eq_rel=1e-5")
    assert main(["psum", a, b, "--tol", "eq_rel=1e-7"]) == 0
    assert json.loads(capsys.readouterr().out)["tolerance"]["eq_rel"] == 1e-7

    assert main(["psum", a, b, "--tol", "bogus=1"]) == 1


def test_parse_tolerance():
    tol = parse_tolerance("eq_rel=1e-7")
    assert tol.eq_rel == 1e-7 and tol.rank_rel == 1e-10
    with pytest.raises(ValueError):
        parse_tolerance("nope")


def test_usage_errors_exit_one(capsys):
    assert main(["unknown-subcommand"]) == 1
    assert main(["check", "somefile", "--what", "nonsense"]) == 1


def test_invocation_echoed(worked, capsys):
    a, s = worked
    main(["check", a, s, s, "--what", "complementable"])
    report = json.loads(capsys.readouterr().out)
    assert report["invocation"][0] == "shortops"
    assert report["invocation"][1] == "check"
