"""Command-line front end: ``freud-approx <command> [options]``.

Exit codes
----------
0  success
1  a verification ran but did not pass (``alpha2-verify``, ``report``)
2  invalid argument (also argparse usage errors)
3  convergence failure
4  I/O error
5  invalid function (non-finite values, unknown corpus name)
70 internal error

Outputs are written once, at the end, to ``--output`` or stdout. CSV
floats use 17 significant digits; JSON floats use the shortest repr that
round-trips. Identical arguments give byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from . import alpha2, diagnostics, expansion, functions, orthopoly
from .errors import ConvergenceFailure, InternalError, InvalidArgument, InvalidFunction

__all__ = ["main", "build_parser", "SCHEMA_VERSION"]

SCHEMA_VERSION = 1
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID_ARGUMENT = 2
EXIT_CONVERGENCE = 3
EXIT_IO = 4
EXIT_INVALID_FUNCTION = 5
EXIT_INTERNAL = 70

THREADS_ENV = "FREUD_APPROX_THREADS"


class _Failure(Exception):
    """Carries partial output together with a nonzero exit code."""

    def __init__(self, code, message, payload=None):
        super().__init__(message)
        self.code = code
        self.payload = payload


def _alpha(text):
    try:
        a = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (a > 1.0 and math.isfinite(a)):
        raise argparse.ArgumentTypeError(f"alpha must be a finite number > 1, got {text}")
    return a


def _nonneg_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _pos_int(text):
    v = _nonneg_int(text)
    if v == 0:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _m(text):
    return None if text == "auto" else _pos_int(text)


def _fmt(v):
    return format(float(v), ".17g")


def _json(payload):
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _envelope(command, args, body):
    out = {"schema_version": SCHEMA_VERSION, "command": command, "version": __version__}
    out["config"] = {
        k: v for k, v in sorted(vars(args).items()) if k not in ("func", "output", "format", "command")
    }
    out.update(body)
    return out


def _table(alpha, N):
    if alpha == 2.0:
        return orthopoly.closed_form_recurrence(2.0, N)
    return orthopoly.recurrence_table(alpha, N)


def _function(name, alpha):
    try:
        f = functions.get(name)
    except InvalidArgument as e:
        raise InvalidFunction(str(e)) from None
    if not f.compatible(alpha):
        raise InvalidArgument(f"{name} is not in L2(exp(-2|x|^{alpha:g}))")
    return f


# commands ----------------------------------------------------------------


def cmd_recurrence(args):
    alpha, N = args.alpha, args.N
    method = args.method
    if method == "closed" and alpha != 2.0:
        raise InvalidArgument("--method closed requires --alpha 2")
    notes = {}
    try:
        if method == "closed":
            table = orthopoly.closed_form_recurrence(2.0, N)
        else:
            table = orthopoly.stieltjes_recurrence(orthopoly.FreudWeight(alpha), N, tol=args.tol)
            if alpha == 2.0 and method == "auto":
                ref = orthopoly.closed_form_recurrence(2.0, N)
                dev = float(np.max(np.abs(table.b - ref.b))) if N else 0.0
                notes["max_deviation_from_closed_form"] = dev
                print(f"max |b_n(stieltjes) - sqrt(n)/2| = {dev:.3e}", file=sys.stderr)
    except ConvergenceFailure as e:
        last = e.last
        if args.format == "json":
            body = last.to_dict() if last is not None else {"alpha": alpha, "b": []}
            body["failure"] = str(e)
            text = _json(_envelope("recurrence", args, body))
        else:
            text = (last.to_csv() if last is not None else "n,b_n\n") + f"# convergence-failure: {e}\n"
        raise _Failure(EXIT_CONVERGENCE, str(e), text) from None
    if args.format == "json":
        body = table.to_dict()
        body.update(notes)
        return _json(_envelope("recurrence", args, body))
    print(f"mu0 = {table.mu0!r}", file=sys.stderr)
    return table.to_csv()


def _expansion(args):
    f = _function(args.function, args.alpha)
    table = _table(args.alpha, args.N)
    return f, table, expansion.fourier_coefficients(f, table, args.N, m=args.m, method=args.method)


def cmd_coeffs(args):
    _, _, exp = _expansion(args)
    if args.format == "json":
        return _json(_envelope("coeffs", args, expansion.expansion_report(exp)))
    return expansion.expansion_csv(exp)


def cmd_distance(args):
    f, table, exp = _expansion(args)
    rows = []
    for n in range(exp.N + 2):
        d = expansion.distance(exp, n)
        rows.append((n, d.value, expansion.tail_distance(exp, n), d.below_floor))
    if args.format == "json":
        gap = expansion.projection_gap(
            f, table, exp, min(exp.N + 1, max(1, exp.N // 2)), trials=args.trials, seed=args.seed
        )
        body = {
            "function": exp.name,
            "distance_indexing": "d(f, Pi_{n-1}), n = 0..N+1",
            "distance": [r[1] for r in rows],
            "tail_form": [r[2] for r in rows],
            "below_floor": [r[3] for r in rows],
            "projection_check": {"seed": args.seed, "trials": args.trials, "min_gap": gap},
            "thresholds": {"distance_floor_rel": expansion.DIST_FLOOR},
        }
        return _json(_envelope("distance", args, body))
    lines = ["n,d_f_Pi_n_minus_1,tail_form,below_floor"]
    lines += [f"{n},{_fmt(d)},{_fmt(t)},{int(bf)}" for n, d, t, bf in rows]
    return "\n".join(lines) + "\n"


def cmd_seminorms(args):
    _, _, exp = _expansion(args)
    semis = expansion.seminorms(exp, args.k_max)
    if args.format == "json":
        return _json(_envelope("seminorms", args, expansion.expansion_report(exp, semis)))
    return expansion.seminorms_csv(semis)


def _gauss(alpha, n_max, m):
    m = max(400, n_max + 1) if m is None else m
    table = orthopoly.recurrence_table(alpha, max(m - 1, n_max))
    return table, orthopoly.gauss_freud_rule(alpha, m)


def cmd_markov(args):
    ns = diagnostics.parse_range(args.n)
    table, rule = _gauss(args.alpha, max(ns), args.m)
    rep = diagnostics.markov_table(table, rule, ns)
    if args.j > 1:
        it = diagnostics.iterated_markov_check(table, rule, args.j, ns, args.c or rep.c_op)
        if args.format == "json":
            body = {"markov": rep.to_dict(), "iterated": it.to_dict()}
            return _json(_envelope("markov", args, body))
        return it.to_csv()
    if args.format == "json":
        return _json(_envelope("markov", args, {"markov": rep.to_dict()}))
    return rep.to_csv()


def cmd_jackson(args):
    f = _function(args.function, args.alpha)
    ns = diagnostics.parse_range(args.n)
    table = _table(args.alpha, max(ns))
    rep = diagnostics.jackson_table(f, table, args.r, ns, panels=args.m)
    if args.format == "json":
        return _json(_envelope("jackson", args, rep.to_dict()))
    return rep.to_csv()


def cmd_classify(args):
    f = _function(args.function, args.alpha)
    N2 = args.N
    N1 = N2 // 2
    table = _table(args.alpha, N2)
    e1 = expansion.fourier_coefficients(f, table, N1)
    e2 = expansion.fourier_coefficients(f, table, N2)
    rep = diagnostics.classify_rapid(e1, e2, args.k_max)
    print(f"verdict: {rep.verdict}", file=sys.stderr)
    if args.format == "json":
        return _json(_envelope("classify", args, rep.to_dict()))
    return rep.to_csv()


def cmd_alpha2_verify(args):
    f = _function(args.function, 2.0)
    rep = alpha2.coefficient_correspondence(f, args.N)
    print(f"max |a_n - hermite_n| = {rep.max_diff:.3e}", file=sys.stderr)
    if args.format == "json":
        body = rep.to_dict()
        body["tolerance"] = args.tol
        text = _json(_envelope("alpha2-verify", args, body))
    else:
        text = rep.to_csv()
    if not rep.max_diff <= args.tol:
        raise _Failure(EXIT_CHECK_FAILED, f"max diff {rep.max_diff:.3e} exceeds {args.tol:g}", text)
    return text


def cmd_report(args):
    from .acceptance import run_all

    results = run_all()
    for r in results:
        print(r.line(), file=sys.stderr)
    body = {
        "all_passed": all(r.passed for r in results),
        "criteria": [
            {"number": r.number, "title": r.title, "passed": r.passed, "detail": r.detail}
            for r in results
        ],
    }
    text = _json(_envelope("report", args, body))
    if not body["all_passed"]:
        raise _Failure(EXIT_CHECK_FAILED, "some acceptance criteria failed", text)
    return text


def cmd_corpus(args):
    alphas = (1.5, 2.0, 3.0, 4.0) if args.alpha is None else (args.alpha,)
    rows = []
    for f in functions.corpus():
        rows.append(
            {
                "name": f.name,
                "tags": sorted(f.tags),
                "j_max": f.j_max,
                "compatible_alpha": [a for a in alphas if f.compatible(a)],
            }
        )
    if args.format == "json":
        return _json(_envelope("corpus", args, {"functions": rows}))
    lines = ["name,tags,j_max,compatible_alpha"]
    for r in rows:
        jm = "inf" if r["j_max"] is None else str(r["j_max"])
        al = " ".join(f"{a:g}" for a in r["compatible_alpha"])
        lines.append(f"{r['name']},{' '.join(r['tags'])},{jm},{al}")
    return "\n".join(lines) + "\n"


# parser --------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(
        prog="freud-approx",
        description="Polynomial approximation in L2(exp(-2|x|^alpha) dx).",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, func, help, alpha=True, alpha_required=True):
        sp = sub.add_parser(name, help=help, description=help)
        if alpha:
            sp.add_argument("--alpha", type=_alpha, required=alpha_required, help="Freud exponent, > 1")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--output", "-o", help="output file (default stdout)")
        sp.set_defaults(func=func)
        return sp

    def expansion_opts(sp, default_N=40):
        sp.add_argument("--function", "-f", required=True, help="corpus function name")
        sp.add_argument("--N", type=_nonneg_int, default=default_N, help="highest coefficient index")
        sp.add_argument("--m", type=_m, default=None, help="nodes or panels, or 'auto'")
        sp.add_argument("--method", choices=("auto", "gauss", "composite"), default="auto")

    sp = add("recurrence", cmd_recurrence, "recurrence coefficients b_1..b_N")
    sp.add_argument("--N", type=_nonneg_int, default=40)
    sp.add_argument("--method", choices=("auto", "closed", "stieltjes"), default="auto")
    sp.add_argument("--tol", type=float, default=1e-11)

    sp = add("coeffs", cmd_coeffs, "Fourier coefficients and distances")
    expansion_opts(sp)

    sp = add("distance", cmd_distance, "distances d(f, Pi_{n-1}) in subtraction and tail form")
    expansion_opts(sp)
    sp.add_argument("--seed", type=int, default=0, help="seed of the projection-optimality check")
    sp.add_argument("--trials", type=_pos_int, default=20)

    sp = add("seminorms", cmd_seminorms, "seminorms q_0..q_kmax")
    expansion_opts(sp)
    sp.add_argument("--k-max", dest="k_max", type=_nonneg_int, default=6)

    sp = add("markov", cmd_markov, "Markov ratios ||P_n'|| / n^(1-1/alpha)")
    sp.add_argument("--n", default="1..50", help="index range, e.g. 1..50 or 3,5,8")
    sp.add_argument("--m", type=_m, default=None, help="Gauss-Freud nodes (default max(400, n+1))")
    sp.add_argument("--j", type=_pos_int, default=1, help="iterated check up to this order")
    sp.add_argument("--c", type=float, default=None, help="constant for the iterated check (default c_op)")

    sp = add("jackson", cmd_jackson, "Jackson ratios n^(r(1/alpha-1)) d(f, Pi_n)")
    sp.add_argument("--function", "-f", required=True)
    sp.add_argument("--r", type=_nonneg_int, default=1)
    sp.add_argument("--n", default="1..40")
    sp.add_argument("--m", type=_m, default=None, help="composite panels or 'auto'")

    sp = add("classify", cmd_classify, "rapid-approximability verdict from N/2 and N coefficients")
    sp.add_argument("--function", "-f", required=True)
    sp.add_argument("--N", type=_pos_int, default=80)
    sp.add_argument("--k-max", dest="k_max", type=_nonneg_int, default=6)

    sp = add("alpha2-verify", cmd_alpha2_verify, "alpha=2 Hermite coefficient correspondence", alpha=False)
    sp.add_argument("--function", "-f", required=True)
    sp.add_argument("--N", type=_nonneg_int, default=60)
    sp.add_argument("--tol", type=float, default=1e-9)

    add("report", cmd_report, "run the acceptance suite, bundled JSON", alpha=False)
    add("corpus", cmd_corpus, "list corpus functions", alpha_required=False)
    return p


def _threads():
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        v = int(raw)
    except ValueError:
        v = 0
    if v < 1:
        raise InvalidArgument(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return v


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INVALID_ARGUMENT if e.code not in (0, None) else EXIT_OK
    if args.command == "report":
        args.format = "json"
    code = EXIT_OK
    try:
        _threads()  # validated only; the computations are single-threaded
        text = args.func(args)
    except _Failure as e:
        print(f"error: {e}", file=sys.stderr)
        text, code = e.payload, e.code
    except InvalidFunction as e:
        print(f"invalid function: {e}", file=sys.stderr)
        return EXIT_INVALID_FUNCTION
    except InvalidArgument as e:
        print(f"invalid argument: {e}", file=sys.stderr)
        return EXIT_INVALID_ARGUMENT
    except ConvergenceFailure as e:
        print(f"convergence failure: {e}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (InternalError, Exception) as e:  # never a traceback on the command line
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    if text is not None:
        try:
            _write(text, args.output)
        except BrokenPipeError:
            # reader went away (e.g. `| head`); silence the flush at interpreter exit
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
            return EXIT_IO
        except OSError as e:
            print(f"io error: {e}", file=sys.stderr)
            return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
