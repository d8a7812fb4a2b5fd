import csv
import io
import json
import math
import subprocess
import sys

import pytest

from freudapprox import acceptance, cli


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestRecurrence:
    def test_alpha2_b10(self, capsys):
        code, out, err = run(["recurrence", "--alpha", "2", "--N", "10"], capsys)
        assert code == 0
        table = rows(out)
        assert float(table[-1]["b_n"]) == pytest.approx(1.5811388301, abs=1e-10)
        assert float(table[-1]["b_n"]) == pytest.approx(0.5 * math.sqrt(10), rel=1e-12)
        assert "max |b_n(stieltjes) - sqrt(n)/2|" in err

    def test_closed_method(self, capsys):
        code, out, _ = run(["recurrence", "--alpha", "2", "--N", "4", "--method", "closed"], capsys)
        assert code == 0 and float(rows(out)[3]["b_n"]) == 1.0
        code, _, _ = run(["recurrence", "--alpha", "3", "--method", "closed"], capsys)
        assert code == cli.EXIT_INVALID_ARGUMENT

    @pytest.mark.parametrize("alpha", ["1", "0.5", "nan", "inf", "-3", "two"])
    def test_invalid_alpha(self, alpha, capsys):
        code, out, _ = run(["recurrence", "--alpha", alpha], capsys)
        assert code == cli.EXIT_INVALID_ARGUMENT and out == ""

    def test_empty_range(self, capsys):
        code, out, err = run(["recurrence", "--alpha", "3", "--N", "0"], capsys)
        assert code == 0 and out == "n,b_n\n"
        mu0 = float(err.split("mu0 = ")[1])
        assert mu0 == pytest.approx(2 * math.gamma(1 + 1 / 3) * 2 ** (-1 / 3), rel=1e-14)

    def test_convergence_failure_marker(self, capsys):
        code, out, err = run(["recurrence", "--alpha", "3", "--N", "20", "--tol", "1e-30"], capsys)
        assert code == cli.EXIT_CONVERGENCE
        lines = out.splitlines()
        assert lines[0] == "n,b_n" and lines[-1].startswith("# convergence-failure")
        assert len(lines) == 22

    def test_json(self, capsys):
        code, out, _ = run(["recurrence", "--alpha", "3", "--N", "5", "--format", "json"], capsys)
        d = json.loads(out)
        assert code == 0 and d["schema_version"] == 1 and d["command"] == "recurrence"
        assert d["config"]["alpha"] == 3.0 and d["config"]["N"] == 5


class TestAnalysisCommands:
    def test_markov_alpha2(self, capsys):
        code, out, _ = run(["markov", "--alpha", "2", "--n", "1..50"], capsys)
        assert code == 0
        table = rows(out)
        assert len(table) == 50
        for r in table:
            assert float(r["rho_n"]) == pytest.approx(2.0, abs=1e-8)

    def test_markov_iterated(self, capsys):
        code, out, _ = run(["markov", "--alpha", "3", "--n", "2..20", "--j", "3", "--format", "json"], capsys)
        d = json.loads(out)
        assert code == 0 and d["iterated"]["all_pass"] is True
        assert d["iterated"]["c"] == d["markov"]["c_op"]

    def test_classify_abs(self, capsys):
        code, out, err = run(["classify", "--alpha", "2", "--function", "abs", "--N", "80"], capsys)
        assert code == 0 and "verdict: not_rapid" in err
        assert rows(out)[0].keys() >= {"k", "s_k_N1", "s_k_N2"}

    def test_classify_json(self, capsys):
        code, out, _ = run(["classify", "--alpha", "2", "-f", "x3gauss", "--N", "80", "--format", "json"], capsys)
        d = json.loads(out)
        assert d["verdict"] == "rapid" and d["N1"] == 40 and d["N2"] == 80
        assert d["thresholds"]["stable_delta"] == 0.05

    def test_alpha2_verify(self, capsys):
        code, out, err = run(["alpha2-verify", "--function", "x3gauss", "--N", "60"], capsys)
        assert code == 0
        assert max(abs(float(r["diff"])) for r in rows(out)) <= 1e-9

    def test_alpha2_verify_tolerance_exceeded(self, capsys):
        code, out, _ = run(["alpha2-verify", "-f", "sin", "--N", "10", "--tol", "0"], capsys)
        assert code == cli.EXIT_CHECK_FAILED and out.startswith("n,a_n,hermite_n,diff")

    def test_coeffs_round_trip(self, capsys):
        from freudapprox import expansion, functions, orthopoly

        code, out, _ = run(["coeffs", "--alpha", "3", "-f", "cos", "--N", "12"], capsys)
        exp = expansion.fourier_coefficients(functions.cosine(), orthopoly.recurrence_table(3.0, 12), 12)
        table = rows(out)
        # the last row carries only d(f, Pi_N)
        assert table[-1]["n"] == "13" and table[-1]["a_n"] == ""
        got = [float(r["a_n"]) for r in table[:-1]]
        assert got == exp.coeffs.tolist()

    def test_distance(self, capsys):
        code, out, _ = run(["distance", "--alpha", "2", "-f", "sin", "--N", "30", "--format", "json"], capsys)
        d = json.loads(out)
        assert code == 0 and d["projection_check"]["min_gap"] >= -1e-9
        assert len(d["distance"]) == 32

    def test_seminorms(self, capsys):
        code, out, _ = run(["seminorms", "--alpha", "2", "-f", "abs", "--N", "40", "--k-max", "2"], capsys)
        table = rows(out)
        assert code == 0 and int(table[2]["argmax_n"]) == 41

    def test_jackson(self, capsys):
        code, out, _ = run(["jackson", "--alpha", "3", "-f", "sin", "--r", "1", "--n", "1..20"], capsys)
        assert code == 0 and len(rows(out)) == 20

    def test_corpus(self, capsys):
        code, out, _ = run(["corpus", "--format", "json"], capsys)
        names = {f["name"] for f in json.loads(out)["functions"]}
        assert code == 0 and {"abs", "x3", "lift(schwartz_x3_b3)"} <= names


class TestErrors:
    def test_unknown_function(self, capsys):
        code, _, err = run(["coeffs", "--alpha", "2", "-f", "nope"], capsys)
        assert code == cli.EXIT_INVALID_FUNCTION and "nope" in err

    def test_incompatible_function(self, capsys):
        code, _, _ = run(["coeffs", "--alpha", "1.5", "-f", "exp_half_sq"], capsys)
        assert code == cli.EXIT_INVALID_ARGUMENT

    def test_bad_range(self, capsys):
        code, _, _ = run(["markov", "--alpha", "2", "--n", "9..3"], capsys)
        assert code == cli.EXIT_INVALID_ARGUMENT

    def test_missing_derivative(self, capsys):
        code, _, _ = run(["jackson", "--alpha", "2", "-f", "sign", "--r", "1"], capsys)
        assert code == cli.EXIT_INVALID_ARGUMENT

    def test_unwritable_output(self, capsys, tmp_path):
        target = tmp_path / "missing" / "out.csv"
        code, _, err = run(["recurrence", "--alpha", "2", "--N", "3", "-o", str(target)], capsys)
        assert code == cli.EXIT_IO and "io error" in err

    @pytest.mark.parametrize("value", ["0", "-2", "many"])
    def test_threads_env(self, value, capsys, monkeypatch):
        monkeypatch.setenv(cli.THREADS_ENV, value)
        assert run(["recurrence", "--alpha", "2", "--N", "3"], capsys)[0] == cli.EXIT_INVALID_ARGUMENT

    def test_threads_env_ok(self, capsys, monkeypatch):
        monkeypatch.setenv(cli.THREADS_ENV, "4")
        assert run(["recurrence", "--alpha", "2", "--N", "3"], capsys)[0] == 0

    def test_unexpected_error(self, capsys, monkeypatch):
        def boom(args):
            raise KeyError("x")

        monkeypatch.setattr(cli, "cmd_corpus", boom)
        code, _, err = run(["corpus"], capsys)
        assert code == cli.EXIT_INTERNAL and "KeyError" in err

    def test_no_command(self, capsys):
        assert run([], capsys)[0] == cli.EXIT_INVALID_ARGUMENT


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv",
        [
            ["distance", "--alpha", "3", "-f", "abs", "--N", "20", "--format", "json", "--seed", "7"],
            ["markov", "--alpha", "4", "--n", "1..15"],
            ["classify", "--alpha", "2", "-f", "sign", "--N", "30", "--format", "json"],
        ],
    )
    def test_byte_identical(self, argv, tmp_path, capsys):
        outs = []
        for i in range(2):
            path = tmp_path / f"out{i}"
            assert cli.main(argv + ["-o", str(path)]) == 0
            outs.append(path.read_bytes())
        capsys.readouterr()
        assert outs[0] == outs[1] and len(outs[0]) > 0

    def test_seed_changes_projection_check(self, capsys):
        base = ["distance", "--alpha", "2", "-f", "abs", "--N", "20", "--format", "json"]
        a = json.loads(run(base + ["--seed", "1"], capsys)[1])
        b = json.loads(run(base + ["--seed", "2"], capsys)[1])
        assert a["distance"] == b["distance"]
        assert a["projection_check"]["min_gap"] != b["projection_check"]["min_gap"]


def test_report_wiring(capsys, monkeypatch):
    fake = [
        acceptance.CriterionResult(1, "first", True, "ok", 0.0),
        acceptance.CriterionResult(2, "second", False, "bad", 0.0),
    ]
    monkeypatch.setattr(acceptance, "run_all", lambda: fake)
    code, out, err = run(["report"], capsys)
    d = json.loads(out)
    assert code == cli.EXIT_CHECK_FAILED and d["all_passed"] is False
    assert [c["passed"] for c in d["criteria"]] == [True, False]
    assert "criterion  2 FAIL" in err

    monkeypatch.setattr(acceptance, "run_all", lambda: fake[:1])
    code, out, _ = run(["report"], capsys)
    assert code == 0 and json.loads(out)["all_passed"] is True


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "freudapprox", "recurrence", "--alpha", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == cli.EXIT_INVALID_ARGUMENT and proc.stdout == ""
