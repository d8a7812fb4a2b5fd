"""Empirical checks of the Markov and Jackson inequalities and of rapid approximability.

Every report carries the thresholds it was judged against and exports to
CSV (fixed column order) and to a JSON-ready dict.

Two Markov constants are measured. ``c_hat`` is the largest normalized
ratio ``rho_n = ||P_n'|| / n**(1 - 1/alpha)`` over the basis polynomials.
``c_op`` is the largest normalized operator norm of ``d/dx`` restricted to
polynomials of degree ``<= n``, which is the constant the Markov
inequality actually bounds. Always ``c_op >= c_hat``, with equality at
``alpha = 2``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument, InvalidFunction
from .expansion import (
    COEFF_TOL,
    DIST_FLOOR,
    distance_to_degree,
    fourier_coefficients,
    function_norm,
)
from .orthopoly import FreudWeight, weighted_poly_derivs

__all__ = [
    "MarkovReport",
    "IteratedMarkovReport",
    "JacksonReport",
    "DecayReport",
    "GrowthReport",
    "markov_table",
    "iterated_markov_check",
    "jackson_table",
    "classify_rapid",
    "growth_bound_check",
    "parse_range",
    "BOUNDEDNESS_FACTOR",
    "SLOPE_TOL",
    "STABLE_DELTA",
    "GROWTH_FACTOR",
]

BOUNDEDNESS_FACTOR = 3.0  # max/min of rho_n
SLOPE_TOL = 0.1  # log-log slope of r_n against 1 - 1/alpha
STABLE_DELTA = 0.05  # s_k(N2) <= (1 + delta) s_k(N1) means stabilized
GROWTH_FACTOR = 1.5  # s_k(N2) >= 1.5 s_k(N1) means growing
BOUND_RTOL = 1e-10  # rounding slack in the iterated Markov comparison


def _fmt(v):
    return "" if v is None else format(float(v), ".17g")


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def parse_range(rng):
    """Parse ``"a..b"`` (inclusive), ``"a,b,c"`` or a single integer into a list."""
    if isinstance(rng, (list, tuple, range)):
        out = [int(v) for v in rng]
    else:
        text = str(rng).strip()
        try:
            if ".." in text:
                lo, hi = text.split("..", 1)
                out = list(range(int(lo), int(hi) + 1))
            else:
                out = [int(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise InvalidArgument(f"cannot parse index range {rng!r}") from None
    if not out or min(out) < 0:
        raise InvalidArgument(f"index range {rng!r} must be nonempty and nonnegative")
    return out


def _exact_rule_check(table, rule, degree):
    if rule.kind != "gauss" or rule.measure.kind != "freud":
        raise InvalidArgument("polynomial norms need a Gauss-Freud rule")
    if rule.measure.params[0] != table.alpha:
        raise InvalidArgument(
            f"rule is for alpha={rule.measure.params[0]:g}, table for alpha={table.alpha:g}"
        )
    if 2 * len(rule) - 1 < degree:
        raise InvalidArgument(
            f"a {len(rule)}-node rule is exact to degree {2 * len(rule) - 1}, need {degree}"
        )


def _deriv_values(table, rule, n_max, j):
    with np.errstate(divide="ignore"):
        log_w = np.log(rule.weights)
    return weighted_poly_derivs(table, rule.nodes, n_max, j, log_w)


def _norms(vals):
    return np.array([[math.sqrt(math.fsum((row * row).tolist())) for row in order] for order in vals])


# Markov ------------------------------------------------------------------


@dataclass(frozen=True)
class MarkovReport:
    alpha: float
    rows: list  # (n, r_n, rho_n or None, op_n or None)
    c_hat: float
    c_op: float
    slope: float | None = None
    thresholds: dict = field(default_factory=dict)

    @property
    def exponent(self):
        return 1.0 - 1.0 / self.alpha

    def rho(self, lo=None, hi=None):
        return np.array(
            [
                rho
                for n, _, rho, _ in self.rows
                if rho is not None and (lo is None or n >= lo) and (hi is None or n <= hi)
            ]
        )

    def boundedness_ratio(self, lo=10, hi=60):
        r = self.rho(lo, hi)
        return float(r.max() / r.min())

    def to_csv(self):
        return _csv(
            ["n", "r_n", "rho_n", "op_norm_n"],
            [(n, _fmt(r), _fmt(rho), _fmt(op)) for n, r, rho, op in self.rows],
        )

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "exponent": self.exponent,
            "c_hat": self.c_hat,
            "c_op": self.c_op,
            "slope": self.slope,
            "rows": [
                {"n": n, "r_n": r, "rho_n": rho, "op_norm_n": op} for n, r, rho, op in self.rows
            ],
            "thresholds": self.thresholds,
        }


def markov_table(table, rule, n_range):
    """Markov ratios ``r_n = ||P_n'||`` (``||P_n|| = 1``) and ``rho_n = r_n / n**(1 - 1/alpha)``.

    Norms are Gauss-Freud sums, exact for the polynomial integrands when the
    rule has at least ``max(n_range)`` nodes. ``n = 0`` gives ``r_0 = 0``
    with ``rho_0`` undefined and excluded from ``c_hat``. ``op_norm_n`` is
    the spectral norm of ``d/dx`` on polynomials of degree ``<= n`` divided
    by ``n**(1 - 1/alpha)``; ``c_op`` is its maximum. The least-squares
    slope of ``log r_n`` against ``log n`` is fitted over ``n >= 10`` when
    at least three such rows exist.
    """
    ns = sorted(set(parse_range(n_range)))
    n_max = ns[-1]
    if n_max > len(table):
        raise InvalidArgument(f"n={n_max} exceeds recurrence table length {len(table)}")
    _exact_rule_check(table, rule, 2 * n_max)
    e = 1.0 - 1.0 / table.alpha
    vals = _deriv_values(table, rule, n_max, 1)
    r = _norms(vals)[1]
    # gram[k, l] = <P_l', P_k>; strictly lower in k < l
    gram = vals[0] @ vals[1].T
    rows = []
    for n in ns:
        if n == 0:
            rows.append((0, float(r[0]), None, None))
            continue
        op = float(np.linalg.norm(gram[:n, : n + 1], 2))
        rows.append((n, float(r[n]), float(r[n] / n**e), op / n**e))
    live = [row for row in rows if row[2] is not None]
    if not live:
        raise InvalidArgument("n_range must contain some n >= 1")
    c_hat = max(row[2] for row in live)
    c_op = max(row[3] for row in live)
    fit = [(n, rn) for n, rn, _, _ in live if n >= 10]
    slope = None
    if len(fit) >= 3:
        x, y = np.log([n for n, _ in fit]), np.log([rn for _, rn in fit])
        slope = float(np.polyfit(x, y, 1)[0])
    thresholds = {
        "boundedness_factor": BOUNDEDNESS_FACTOR,
        "boundedness_range": [10, 60],
        "slope_tolerance": SLOPE_TOL,
    }
    return MarkovReport(table.alpha, rows, c_hat, c_op, slope, thresholds)


@dataclass(frozen=True)
class IteratedMarkovReport:
    alpha: float
    c: float
    j: int
    rows: list  # (i, n, norm, bound, ok)
    all_pass: bool

    def worst_ratio(self):
        return max(norm / bound for _, _, norm, bound, _ in self.rows if bound > 0)

    def to_csv(self):
        return _csv(
            ["j", "n", "norm", "bound", "ok"],
            [(i, n, _fmt(v), _fmt(b), int(ok)) for i, n, v, b, ok in self.rows],
        )

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "c": self.c,
            "j_max": self.j,
            "all_pass": self.all_pass,
            "worst_ratio": self.worst_ratio(),
            "rows": [
                {"j": i, "n": n, "norm": v, "bound": b, "ok": ok} for i, n, v, b, ok in self.rows
            ],
            "thresholds": {"relative_slack": BOUND_RTOL},
        }


def iterated_markov_check(table, rule, j, n_range, c):
    """Check ``||P_n^{(i)}|| <= c**i * n**(i (1 - 1/alpha))`` for ``0 <= i <= j``.

    A relative slack of ``1e-10`` absorbs rounding where the bound is
    attained, as at ``alpha = 2``, ``i = 1``.
    """
    if int(j) != j or j < 0:
        raise InvalidArgument("derivative order must be a nonnegative integer")
    if not c > 0:
        raise InvalidArgument("constant c must be positive")
    j = int(j)
    ns = sorted(set(parse_range(n_range)))
    n_max = ns[-1]
    if n_max > len(table):
        raise InvalidArgument(f"n={n_max} exceeds recurrence table length {len(table)}")
    _exact_rule_check(table, rule, 2 * n_max)
    e = 1.0 - 1.0 / table.alpha
    norms = _norms(_deriv_values(table, rule, n_max, j))
    rows = []
    for i in range(j + 1):
        for n in ns:
            bound = c**i * float(n) ** (i * e) if n else (1.0 if i == 0 else 0.0)
            v = float(norms[i, n])
            ok = v <= bound * (1.0 + BOUND_RTOL)
            rows.append((i, n, v, bound, bool(ok)))
    return IteratedMarkovReport(table.alpha, float(c), j, rows, all(r[4] for r in rows))


# Jackson -----------------------------------------------------------------


@dataclass(frozen=True)
class JacksonReport:
    alpha: float
    r: int
    rows: list  # (n, t_n, below_floor)
    deriv_norm: float
    c_hat: float | None
    argmax_n: int
    quad_meta: dict = field(default_factory=dict)

    def t(self):
        return np.array([t for _, t, _ in self.rows])

    def to_csv(self):
        return _csv(["n", "t_n", "below_floor"], [(n, _fmt(t), int(bf)) for n, t, bf in self.rows])

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "r": self.r,
            "distance_indexing": "d(f, Pi_n)",
            "deriv_norm": self.deriv_norm,
            "c_hat": self.c_hat,
            "argmax_n": self.argmax_n,
            "rows": [{"n": n, "t_n": t, "below_floor": bf} for n, t, bf in self.rows],
            "thresholds": {"distance_floor_rel": DIST_FLOOR},
            "quad_meta": self.quad_meta,
        }


def jackson_table(f, table, r, n_range, panels=None):
    """Jackson ratios ``t_n = n**(r (1/alpha - 1)) d(f, Pi_n)`` and ``c_hat = max t_n / ||f^{(r)}||``.

    ``n = 0`` is skipped since the rate factor is infinite there.
    ``panels`` overrides the composite quadrature resolution, for
    refinement studies.
    """
    if int(r) != r or r < 0:
        raise InvalidArgument("derivative order r must be a nonnegative integer")
    r = int(r)
    if hasattr(f, "has_derivative") and not f.has_derivative(r):
        raise InvalidArgument(f"{f.name} has no derivative of order {r}")
    ns = [n for n in sorted(set(parse_range(n_range))) if n >= 1]
    if not ns:
        raise InvalidArgument("n_range must contain some n >= 1")
    N = ns[-1]
    exp = fourier_coefficients(f, table, N, m=panels, method="composite")
    breakpoints = getattr(f, "breakpoints", ())

    def fr(x):
        return f.deriv(r, x)

    deriv_norm = function_norm(fr, table.alpha, N, breakpoints, panels)
    e = r * (1.0 / table.alpha - 1.0)
    rows = []
    for n in ns:
        d = distance_to_degree(exp, n)
        rows.append((n, float(n) ** e * d.value, d.below_floor))
    t = np.array([row[1] for row in rows])
    argmax = rows[int(np.argmax(t))][0]
    c_hat = float(t.max() / deriv_norm) if deriv_norm > 0 else None
    return JacksonReport(table.alpha, r, rows, deriv_norm, c_hat, argmax, dict(exp.quad_meta))


# rapid approximability ------------------------------------------------------


@dataclass(frozen=True)
class DecayReport:
    k_rows: list  # (k, s_k(N1), s_k(N2), argmax1, argmax2)
    verdict: str  # "rapid", "not_rapid" or "inconclusive"
    N1: int
    N2: int
    coeff_floor: float

    def to_csv(self):
        return _csv(
            ["k", "s_k_N1", "s_k_N2", "argmax_N1", "argmax_N2"],
            [(k, _fmt(a), _fmt(b), i, j) for k, a, b, i, j in self.k_rows],
        )

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "N1": self.N1,
            "N2": self.N2,
            "rows": [
                {"k": k, "s_k_N1": a, "s_k_N2": b, "argmax_N1": i, "argmax_N2": j}
                for k, a, b, i, j in self.k_rows
            ],
            "thresholds": {
                "stable_delta": STABLE_DELTA,
                "growth_factor": GROWTH_FACTOR,
                "coeff_floor_rel": COEFF_TOL,
                "coeff_floor": self.coeff_floor,
            },
        }


def _s_k(coeffs, k, floor):
    a = np.abs(np.asarray(coeffs, dtype=float))
    a = np.where(a < floor, 0.0, a)
    n = np.arange(a.size, dtype=float)
    row = n**k * a
    i = int(np.argmax(row))
    return float(row[i]), i


def classify_rapid(exp, exp_refined, k_max):
    """Three-way verdict on the decay of Fourier coefficients.

    ``s_k(N) = max_{n <= N} n**k |a_n|``, with coefficients below
    ``1e-10 ||f||`` (the quadrature noise level) read as 0.

    * ``rapid``: ``s_k(N2) <= 1.05 s_k(N1)`` for every ``k <= k_max``.
    * ``not_rapid``: some ``s_k`` grows by at least 50% and its argmax sits
      at the truncation (``n >= N - 1``, allowing for parity) for both N.
    * ``inconclusive`` otherwise.
    """
    if int(k_max) != k_max or k_max < 0:
        raise InvalidArgument("k_max must be a nonnegative integer")
    N1, N2 = exp.N, exp_refined.N
    if N2 < 2 * N1:
        raise InvalidArgument(f"refined expansion needs N2 >= 2 N1, got N1={N1}, N2={N2}")
    floor = COEFF_TOL * exp_refined.f_norm
    rows = []
    rapid = True
    growing = False
    for k in range(int(k_max) + 1):
        s1, i1 = _s_k(exp.coeffs, k, floor)
        s2, i2 = _s_k(exp_refined.coeffs, k, floor)
        rows.append((k, s1, s2, i1, i2))
        if s2 > (1.0 + STABLE_DELTA) * s1:
            rapid = False
        if s2 >= GROWTH_FACTOR * s1 and s2 > 0 and i1 >= N1 - 1 and i2 >= N2 - 1:
            growing = True
    verdict = "rapid" if rapid else ("not_rapid" if growing else "inconclusive")
    return DecayReport(rows, verdict, N1, N2, floor)


@dataclass(frozen=True)
class GrowthReport:
    alpha: float
    c_obs: float
    argmax_x: float
    rows: list  # (x, |f(x)| exp(-|x|**alpha))

    def to_csv(self):
        return _csv(["x", "ratio"], [(_fmt(x), _fmt(v)) for x, v in self.rows])

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "c_obs": self.c_obs,
            "argmax_x": self.argmax_x,
            "rows": [{"x": x, "ratio": v} for x, v in self.rows],
            "note": "finite-grid evidence only",
        }


def growth_bound_check(f, alpha, grid):
    """``c_obs = max |f(x)| exp(-|x|**alpha)`` over ``grid``; evidence, not proof."""
    alpha = FreudWeight(alpha).alpha
    x = np.asarray(grid, dtype=float).reshape(-1)
    if x.size == 0 or not np.all(np.isfinite(x)):
        raise InvalidArgument("grid must be a nonempty list of finite reals")
    with np.errstate(divide="ignore", over="ignore"):
        fx = np.abs(np.asarray(f(x), dtype=float))
    if not np.all(np.isfinite(fx)):
        raise InvalidFunction(f"{getattr(f, 'name', 'f')} is not finite on the grid")
    with np.errstate(divide="ignore"):
        ratio = np.where(fx == 0, 0.0, np.exp(np.log(fx) - np.abs(x) ** alpha))
    i = int(np.argmax(ratio))
    rows = [(float(a), float(v)) for a, v in zip(x, ratio)]
    return GrowthReport(alpha, float(ratio[i]), float(x[i]), rows)
