"""The acceptance suite: twelve numbered checks with fixed tolerances.

Each check returns a :class:`CriterionResult` whose ``detail`` dict holds the
measured quantities next to the thresholds they were judged against.
"""

from __future__ import annotations

import io
import math
import os
import tempfile
import time
from contextlib import redirect_stderr, redirect_stdout
from dataclasses import dataclass, field

import numpy as np

from . import alpha2, diagnostics, expansion, functions, orthopoly

__all__ = ["CriterionResult", "CRITERIA", "run_criterion", "run_all"]

TEST_ALPHAS = (1.5, 2.0, 3.0, 4.0)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:2d} {status}  {self.title}"


def _c1():
    table = orthopoly.stieltjes_recurrence(orthopoly.FreudWeight(2.0), 60, tol=1e-11)
    err = float(np.max(np.abs(table.b - np.sqrt(np.arange(1, 61)) / 2.0)))
    return err <= 1e-10, {"max_abs_error": err, "tolerance": 1e-10}


def _gram_error(alpha, n=40, m=400):
    rule = orthopoly.gauss_freud_rule(alpha, m)
    table = orthopoly.recurrence_table(alpha, m - 1)
    with np.errstate(divide="ignore"):
        log_w = np.log(rule.weights)
    Q = orthopoly.weighted_polys(table, rule.nodes, n, log_w)
    return float(np.max(np.abs(Q @ Q.T - np.eye(n + 1))))


def _c2():
    errs = {str(a): _gram_error(a) for a in TEST_ALPHAS}
    return max(errs.values()) <= 1e-9, {"gram_max_entry_error": errs, "tolerance": 1e-9}


def _markov(alpha, n_range, m=400):
    table = orthopoly.recurrence_table(alpha, m - 1)
    rule = orthopoly.gauss_freud_rule(alpha, m)
    return table, rule, diagnostics.markov_table(table, rule, n_range)


def _c3():
    _, _, rep = _markov(2.0, "1..50")
    rel = max(abs(r - 2.0 * math.sqrt(n)) / (2.0 * math.sqrt(n)) for n, r, _, _ in rep.rows)
    rho_dev = max(abs(rho - 2.0) for _, _, rho, _ in rep.rows)
    ok = rel <= 1e-8 and rho_dev <= 1e-8
    return ok, {"max_rel_error_r_n": rel, "max_abs_dev_rho_n": rho_dev, "tolerance": 1e-8}


def _c4():
    detail = {}
    ok = True
    for a in (1.5, 3.0, 4.0):
        _, _, rep = _markov(a, "10..60")
        ratio = rep.boundedness_ratio(10, 60)
        slope_err = abs(rep.slope - rep.exponent)
        ok &= ratio <= diagnostics.BOUNDEDNESS_FACTOR and slope_err <= diagnostics.SLOPE_TOL
        detail[str(a)] = {"max_over_min_rho": ratio, "slope": rep.slope, "expected": rep.exponent}
    detail["thresholds"] = {"ratio": diagnostics.BOUNDEDNESS_FACTOR, "slope": diagnostics.SLOPE_TOL}
    return ok, detail


def _c5():
    table = orthopoly.recurrence_table(2.0, 60)
    exp = expansion.fourier_coefficients(functions.sine(), table, 60)
    worst = 0.0
    checked = 0
    for n in range(exp.N + 2):
        d = expansion.distance(exp, n)
        if d.below_floor:
            continue
        checked += 1
        worst = max(worst, abs(d.value - expansion.tail_distance(exp, n)) / d.value)
    naive = max(
        abs(expansion.distance(exp, n, "naive").raw - expansion.tail_distance(exp, n))
        / expansion.distance(exp, n).raw
        for n in range(exp.N + 2)
        if not expansion.distance(exp, n).below_floor
    )
    return worst <= 1e-7, {
        "max_rel_disagreement": worst,
        "indices_above_floor": checked,
        "tolerance": 1e-7,
        "naive_subtraction_disagreement": naive,
    }


def _c6():
    detail = {}
    ok = True
    f = functions.sine()
    for a in (2.0, 3.0):
        table = orthopoly.recurrence_table(a, 100)
        for r in (1, 2, 3):
            j1 = diagnostics.jackson_table(f, table, r, "1..40")
            j2 = diagnostics.jackson_table(f, table, r, "1..40", panels=2 * j1.quad_meta["panels"])
            t = j1.t()
            k = j1.argmax_n - 1
            finite = bool(np.all(np.isfinite(t)))
            decreasing = bool(np.all(np.diff(t[k:]) <= 0))
            stable = abs(j2.c_hat - j1.c_hat) <= 0.05 * j1.c_hat
            good = finite and j1.argmax_n <= 10 and decreasing and stable
            ok &= good
            detail[f"alpha={a:g},r={r}"] = {
                "argmax_n": j1.argmax_n,
                "c_hat": j1.c_hat,
                "c_hat_refined": j2.c_hat,
                "decreasing_after_max": decreasing,
            }
    detail["thresholds"] = {"argmax_n_max": 10, "c_hat_rel_stability": 0.05}
    return ok, detail


def _c7():
    table = orthopoly.recurrence_table(2.0, 60)
    exp = expansion.fourier_coefficients(functions.sine(), table, 60)
    x = np.linspace(-2.0, 2.0, 401)
    e1 = float(np.max(np.abs(expansion.reconstruct(exp, table, x, 1) - np.cos(x))))
    e3 = float(np.max(np.abs(expansion.reconstruct(exp, table, x, 3) + np.cos(x))))
    return e1 <= 1e-6 and e3 <= 1e-4, {"err_j1": e1, "tol_j1": 1e-6, "err_j3": e3, "tol_j3": 1e-4}


def _c8():
    rep = alpha2.coefficient_correspondence(functions.get("x3gauss"), 60)
    pl, pr, nf = rep.parseval_left, rep.parseval_right, rep.f_norm_sq
    parseval = max(abs(pl - pr), abs(pl - nf), abs(pr - nf)) / nf
    ok = rep.max_diff <= 1e-9 and parseval <= 1e-8
    return ok, {
        "max_diff": rep.max_diff,
        "tol_diff": 1e-9,
        "parseval_rel": parseval,
        "tol_parseval": 1e-8,
    }


def _verdict(f, N1=40, N2=80, k_max=6):
    table = orthopoly.recurrence_table(2.0, N2)
    e1 = expansion.fourier_coefficients(f, table, N1)
    e2 = expansion.fourier_coefficients(f, table, N2)
    return diagnostics.classify_rapid(e1, e2, k_max)


def _c9():
    members = [
        alpha2.schwartz_lift(functions.gaussian_monomial(3, 3.0, name="x^3 exp(-3x^2)")),
        alpha2.schwartz_lift(functions.gaussian_monomial(0, 1.5, name="exp(-3x^2/2)")),
        functions.exp_half_square(),
    ]
    detail = {f.name: _verdict(f).verdict for f in members}
    return all(v == "rapid" for v in detail.values()), detail


def _c10():
    detail = {}
    ok = True
    for f in (functions.absolute(), functions.sign()):
        rep = _verdict(f)
        _, s1, s2, i1, i2 = rep.k_rows[2]
        pinned = i1 >= rep.N1 - 1 and i2 >= rep.N2 - 1
        good = rep.verdict == "not_rapid" and s2 >= 1.5 * s1 and pinned
        ok &= good
        detail[f.name] = {"verdict": rep.verdict, "s2_ratio": s2 / s1, "argmax": [i1, i2]}
    return ok, detail


def _c11():
    detail = {}
    ok = True
    for a in TEST_ALPHAS:
        table, rule, rep = _markov(a, "1..40")
        it = diagnostics.iterated_markov_check(table, rule, 3, "2..40", rep.c_hat)
        it_op = diagnostics.iterated_markov_check(table, rule, 3, "2..40", rep.c_op)
        ok &= it.all_pass
        detail[str(a)] = {
            "c_hat": rep.c_hat,
            "pass_with_c_hat": it.all_pass,
            "worst_ratio_c_hat": it.worst_ratio(),
            "c_op": rep.c_op,
            "pass_with_c_op": it_op.all_pass,
        }
    return ok, detail


def _c12():
    from . import cli

    def run(argv):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = cli.main(argv)
        return code, out.getvalue()

    commands = [
        ["recurrence", "--alpha", "3", "--N", "20"],
        ["coeffs", "--alpha", "2", "--function", "sin", "--N", "20", "--format", "json"],
        ["markov", "--alpha", "1.5", "--n", "1..20"],
        ["distance", "--alpha", "2", "--function", "abs", "--N", "10", "--seed", "7", "--format", "json"],
    ]
    identical = True
    with tempfile.TemporaryDirectory() as tmp:
        for i, argv in enumerate(commands):
            blobs = []
            for rep in range(2):
                path = os.path.join(tmp, f"out{i}_{rep}")
                code, _ = run(argv + ["--output", path])
                with open(path, "rb") as fh:
                    blobs.append((code, fh.read()))
            identical &= blobs[0] == blobs[1] and blobs[0][0] == 0
    bad = {}
    for alpha in ("1", "0.5", "nan"):
        try:
            code, _ = run(["recurrence", "--alpha", alpha])
        except SystemExit as e:  # argparse exits directly
            code = e.code
        bad[alpha] = code
    ok = identical and all(c == cli.EXIT_INVALID_ARGUMENT for c in bad.values())
    return ok, {"byte_identical_reruns": identical, "exit_codes_invalid_alpha": bad}


CRITERIA = {
    1: ("recurrence oracle at alpha=2", _c1),
    2: ("orthonormality of P_0..P_40", _c2),
    3: ("Markov identity at alpha=2", _c3),
    4: ("Markov boundedness and exponent", _c4),
    5: ("distance subtraction vs tail form", _c5),
    6: ("Jackson ratios for sin", _c6),
    7: ("derivative-series convergence", _c7),
    8: ("alpha=2 coefficient correspondence", _c8),
    9: ("Schwartz lifts classify rapid", _c9),
    10: ("|x| and sign classify not_rapid", _c10),
    11: ("iterated Markov bound with c = c_hat", _c11),
    12: ("CLI determinism and exit codes", _c12),
}


def run_criterion(number):
    title, fn = CRITERIA[number]
    t0 = time.perf_counter()
    passed, detail = fn()
    return CriterionResult(number, title, bool(passed), detail, time.perf_counter() - t0)


def run_all(numbers=None):
    return [run_criterion(n) for n in (numbers or sorted(CRITERIA))]
