"""Fourier expansions in ``L2(exp(-2|x|**alpha) dx)``.

Coefficients ``a_n(f) = int f P_n exp(-2|x|**alpha) dx``, best-approximation
distances and the seminorms ``q_k(f) = sup_n n**k d(f, Pi_{n-1})``.

Two distance indexings appear in the literature. :func:`distance` returns
``d(f, Pi_{n-1})`` (the seminorm convention, ``Pi_{-1} = {0}``) and
:func:`distance_to_degree` returns ``d(f, Pi_n)`` (the Jackson convention).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import ConvergenceFailure, InvalidArgument, InvalidFunction
from .orthopoly import (
    composite_freud_rule,
    eval_poly_derivs,
    gauss_freud,
    recurrence_table,
    truncation_radius,
    weighted_polys,
)

__all__ = [
    "Expansion",
    "Distance",
    "SeminormTable",
    "fourier_coefficients",
    "coefficients_on_rule",
    "distance",
    "distance_to_degree",
    "tail_distance",
    "distances",
    "function_norm",
    "seminorms",
    "reconstruct",
    "projection_gap",
    "expansion_csv",
    "seminorms_csv",
    "expansion_report",
]

DIST_FLOOR = 1e-8  # relative to ||f||
COEFF_TOL = 1e-10  # refinement agreement, relative to max(1, ||f||)
R_GROWTH = 1.25


@dataclass(frozen=True)
class Expansion:
    alpha: float
    coeffs: np.ndarray
    f_norm_sq: float
    quad_meta: dict = field(default_factory=dict, compare=False)
    name: str = ""
    residual_sq: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "f_norm_sq", float(self.f_norm_sq))
        if self.residual_sq is not None:
            r = np.array(self.residual_sq, dtype=float)
            if r.shape != (c.size + 1,):
                raise InvalidArgument("residual_sq must hold N+2 entries")
            r.setflags(write=False)
            object.__setattr__(self, "residual_sq", r)

    @property
    def N(self):
        return self.coeffs.size - 1

    @property
    def f_norm(self):
        return math.sqrt(self.f_norm_sq)


class Distance(NamedTuple):
    value: float  # 0.0 when below the noise floor
    below_floor: bool
    raw: float


@dataclass(frozen=True)
class SeminormTable:
    k_max: int
    values: np.ndarray
    argmax: np.ndarray
    N_used: int


def _log_weights(rule):
    log_w = rule.meta.get("log_weights")
    if log_w is not None:
        return np.asarray(log_w)
    with np.errstate(divide="ignore"):
        return np.log(rule.weights)


def coefficients_on_rule(f, table, N, rule):
    """Coefficients ``a_0..a_N`` and ``||f||**2`` from one quadrature rule.

    Returns ``(coeffs, f_norm_sq)``. Quadrature weights are split as
    ``sqrt(w) * sqrt(w)`` between ``f`` and ``P_n`` so that neither factor
    overflows.
    """
    coeffs, norm_sq, _ = _project(f, table, N, rule)
    return coeffs, norm_sq


def _project(f, table, N, rule, residuals=False):
    x = rule.nodes
    log_w = _log_weights(rule)
    sw = np.exp(0.5 * log_w)
    live = sw > 0
    with np.errstate(all="ignore"):
        fx = np.asarray(f(x), dtype=float)
    if fx.shape != x.shape:
        raise InvalidFunction(f"{getattr(f, 'name', f)!r} did not return one value per node")
    if not np.all(np.isfinite(fx[live])):
        bad = x[live][~np.isfinite(fx[live])]
        raise InvalidFunction(
            f"{getattr(f, 'name', f)!r} is not finite at {bad.size} quadrature nodes, e.g. x={bad[0]!r}"
        )
    fw = np.where(live, fx, 0.0) * sw
    Q = weighted_polys(table, x, N, log_w)
    coeffs = np.array([math.fsum((row * fw).tolist()) for row in Q])
    norm_sq = math.fsum((fw * fw).tolist())
    resid = None
    if residuals:
        # ||f - sum_{k<n} a_k P_k||^2 on the rule: the same quantity as
        # ||f||^2 - sum_{k<n} a_k^2, without the cancellation
        resid = np.empty(N + 2)
        r = fw.copy()
        resid[0] = norm_sq
        for k in range(N + 1):
            r -= coeffs[k] * Q[k]
            resid[k + 1] = math.fsum((r * r).tolist())
        # removing a (numerically) zero coefficient must not raise the residual
        resid = np.minimum.accumulate(resid)
    return coeffs, norm_sq, resid


def _rules(alpha, table, N, method, m, breakpoints):
    if method == "gauss":
        m = max(2 * (N + 1), 200) if m is None else int(m)
        if m < N + 1:
            raise InvalidArgument(f"Gauss rule needs m >= N+1 nodes, got m={m}, N={N}")
        need = 2 * m - 1
        big = table if len(table) >= need else recurrence_table(alpha, need)
        return [
            (gauss_freud(big, m), {"method": "gauss", "nodes": m}),
            (gauss_freud(big, 2 * m), {"method": "gauss", "nodes": 2 * m}),
        ]
    R = truncation_radius(alpha, N)
    panels = max(8, 2 ** math.ceil(math.log2(max(1.0, N / 4.0)))) if m is None else int(m)
    out = []
    for level in range(2):
        r = R * R_GROWTH**level
        p = panels * 2**level
        rule = composite_freud_rule(alpha, r, p, breakpoints)
        out.append((rule, {"method": "composite", "nodes": len(rule), "panels": p, "R": r}))
    return out


def fourier_coefficients(f, table, N, m=None, method="auto", name=None):
    """Expansion of ``f`` in the orthonormal system described by ``table``.

    Parameters
    ----------
    f : FunctionSpec or callable
    table : RecurrenceTable
    N : int
        Highest coefficient index.
    m : int, optional
        Gauss node count (``method="gauss"``, default ``max(2(N+1), 200)``)
        or panels per half-width (``method="composite"``).
    method : {"auto", "gauss", "composite"}
        ``"auto"`` uses the Gauss-Freud rule for polynomials and the
        composite rule, split at the function's breakpoints, otherwise.

    The computation is repeated on a refined rule (twice the nodes, and a
    wider interval for the composite rule); every coefficient must agree to
    ``1e-10 * max(1, ||f||)``. The refined values are returned.
    """
    if int(N) != N or N < 0:
        raise InvalidArgument(f"N must be a nonnegative integer, got {N!r}")
    N = int(N)
    if N > len(table):
        raise InvalidArgument(f"N={N} exceeds recurrence table length {len(table)}")
    alpha = table.alpha
    compat = getattr(f, "compatible", None)
    if compat is not None and not compat(alpha):
        raise InvalidArgument(f"{f.name} is not in L2(exp(-2|x|^{alpha:g}))")
    if method == "auto":
        method = "gauss" if "polynomial" in getattr(f, "tags", ()) else "composite"
    if method not in ("gauss", "composite"):
        raise InvalidArgument(f"unknown quadrature method {method!r}")
    breakpoints = getattr(f, "breakpoints", ())

    results = []
    for level, (rule, meta) in enumerate(_rules(alpha, table, N, method, m, breakpoints)):
        results.append((_project(f, table, N, rule, residuals=level == 1), meta))
    (c1, n1, _), _ = results[0]
    (c2, n2, resid), meta = results[1]
    scale = max(1.0, math.sqrt(n2))
    diff = float(np.max(np.abs(c2 - c1))) if N >= 0 else 0.0
    if diff >= COEFF_TOL * scale or not math.isclose(n1, n2, rel_tol=1e-9, abs_tol=1e-300):
        raise ConvergenceFailure(
            f"coefficients of {getattr(f, 'name', f)!r} changed by {diff:.3e} under refinement",
            previous=c1,
            last=c2,
        )
    meta = dict(meta, refinement_diff=diff, coarse_nodes=results[0][1]["nodes"])
    return Expansion(alpha, c2, n2, meta, name or getattr(f, "name", ""), resid)


def function_norm(func, alpha, N=0, breakpoints=(), panels=None):
    """``||func||`` in ``L2(exp(-2|x|**alpha) dx)`` on the composite rule used for expansions.

    ``N`` only sets the truncation radius and default panel count, so that
    the norm is resolved on the same grid as an expansion of that length.
    The value must be stable under refinement.
    """
    from .orthopoly import FreudWeight

    alpha = FreudWeight(alpha).alpha
    norms = []
    for rule, _ in _rules(alpha, None, int(N), "composite", panels, tuple(breakpoints)):
        log_w = _log_weights(rule)
        sw = np.exp(0.5 * log_w)
        with np.errstate(all="ignore"):
            v = np.asarray(func(rule.nodes), dtype=float)
        live = sw > 0
        if not np.all(np.isfinite(v[live])):
            raise InvalidFunction(f"{getattr(func, 'name', func)!r} is not finite at quadrature nodes")
        fw = np.where(live, v, 0.0) * sw
        norms.append(math.fsum((fw * fw).tolist()))
    n1, n2 = norms
    if abs(n2 - n1) > 1e-9 * max(n2, 1e-300):
        raise ConvergenceFailure(
            f"norm changed from {n1!r} to {n2!r} under refinement", previous=n1, last=n2
        )
    return math.sqrt(n2)


def _check_n(exp, n, hi):
    if int(n) != n or n < 0 or n > hi:
        raise InvalidArgument(f"index {n!r} outside [0, {hi}]")
    return int(n)


def distance(exp, n, form="auto"):
    """``d(f, Pi_{n-1}) = sqrt(||f||**2 - sum_{k<n} a_k**2)`` for ``0 <= n <= N+1``.

    With ``form="auto"`` the difference is taken from the residual norms
    ``||f - sum_{k<n} a_k P_k||**2`` recorded on the quadrature rule when the
    expansion carries them. Subtracting two nearly equal sums loses about
    ``eps ||f||**2 / d**2`` relative accuracy, which is large just above the
    noise floor; the residual form does not cancel. ``form="naive"`` forces
    the literal subtraction.

    Values below ``1e-8 ||f||`` are quadrature noise: they are reported as
    0 with ``below_floor`` set, the unclipped value kept in ``raw``.
    """
    n = _check_n(exp, n, exp.N + 1)
    if form not in ("auto", "naive"):
        raise InvalidArgument(f"unknown distance form {form!r}")
    if form == "auto" and exp.residual_sq is not None:
        raw = math.sqrt(max(0.0, float(exp.residual_sq[n])))
    else:
        partial = math.fsum((exp.coeffs[:n] ** 2).tolist())
        raw = math.sqrt(max(0.0, exp.f_norm_sq - partial))
    if raw < DIST_FLOOR * exp.f_norm:
        return Distance(0.0, True, raw)
    return Distance(raw, False, raw)


def distance_to_degree(exp, n, form="auto"):
    """``d(f, Pi_n)``, i.e. :func:`distance` at ``n + 1``."""
    n = _check_n(exp, n, exp.N)
    return distance(exp, n + 1, form)


def tail_distance(exp, n):
    """``sqrt(sum_{n <= k <= N} a_k**2)``, summed from the smallest term up."""
    n = _check_n(exp, n, exp.N + 1)
    tail = np.sort(exp.coeffs[n:] ** 2)
    acc = 0.0
    for t in tail:
        acc += t
    return math.sqrt(acc)


def distances(exp, form="auto"):
    """All :func:`distance` values for ``n = 0..N+1``."""
    return [distance(exp, n, form) for n in range(exp.N + 2)]


def seminorms(exp, k_max):
    """``q_k = max_{0 <= n <= N+1} n**k d(f, Pi_{n-1})`` for ``k <= k_max`` (``0**0 = 1``).

    The supremum over all ``n`` is truncated at ``N_used = N + 1``; an argmax
    equal to ``N_used`` signals that the true supremum may be larger.
    """
    if int(k_max) != k_max or k_max < 0:
        raise InvalidArgument("k_max must be a nonnegative integer")
    k_max = int(k_max)
    d = np.array([dist.value for dist in distances(exp)])
    n = np.arange(d.size, dtype=float)
    values = np.empty(k_max + 1)
    argmax = np.empty(k_max + 1, dtype=int)
    for k in range(k_max + 1):
        weights = n**k  # numpy gives 0.0**0 == 1.0
        row = weights * d
        argmax[k] = int(np.argmax(row))
        values[k] = row[argmax[k]]
    return SeminormTable(k_max, values, argmax, exp.N + 1)


def projection_gap(f, table, exp, n, trials=20, seed=0, scale=1e-3):
    """Smallest ``||f - T|| - d(f, Pi_{n-1})`` over random degree ``< n`` perturbations ``T``.

    ``T`` takes the first ``n`` coefficients of ``exp`` plus Gaussian noise of
    relative size ``scale``; ``||f - T||`` is computed directly on a fresh
    composite rule, independently of the coefficient bookkeeping. Orthogonal
    projection is optimal, so the gap is nonnegative up to quadrature error.
    """
    n = _check_n(exp, n, exp.N + 1)
    rng = np.random.default_rng(seed)
    R = truncation_radius(table.alpha, exp.N) * R_GROWTH
    rule = composite_freud_rule(table.alpha, R, 2 * max(8, exp.N), getattr(f, "breakpoints", ()))
    log_w = _log_weights(rule)
    sw = np.exp(0.5 * log_w)
    with np.errstate(all="ignore"):
        fw = np.where(sw > 0, np.asarray(f(rule.nodes), dtype=float), 0.0) * sw
    Q = weighted_polys(table, rule.nodes, max(n - 1, 0), log_w)[:n]
    d = math.sqrt(max(0.0, float(exp.residual_sq[n]))) if exp.residual_sq is not None else distance(exp, n).raw
    amp = scale * max(exp.f_norm, 1e-300)
    gaps = []
    for _ in range(int(trials)):
        c = exp.coeffs[:n] + amp * rng.standard_normal(n)
        r = fw - c @ Q if n else fw
        gaps.append(math.sqrt(math.fsum((r * r).tolist())) - d)
    return min(gaps) if gaps else 0.0


def reconstruct(exp, table, x, j=0):
    """``sum_{n <= N} a_n P_n^{(j)}(x)``, the j-th derivative of the partial sum."""
    if int(j) != j or j < 0:
        raise InvalidArgument("derivative order must be a nonnegative integer")
    derivs = eval_poly_derivs(table, x, exp.N, int(j))[int(j)]
    return np.tensordot(exp.coeffs, derivs, axes=(0, 0))


def _fmt(v):
    return format(float(v), ".17g")


def expansion_csv(exp):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "a_n", "d_f_Pi_n_minus_1", "below_floor"])
    for n, dist in enumerate(distances(exp)):
        a = _fmt(exp.coeffs[n]) if n <= exp.N else ""
        w.writerow([n, a, _fmt(dist.value), int(dist.below_floor)])
    return buf.getvalue()


def seminorms_csv(table):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "q_k", "argmax_n"])
    for k in range(table.k_max + 1):
        w.writerow([k, _fmt(table.values[k]), int(table.argmax[k])])
    return buf.getvalue()


def _clean_meta(meta):
    return {k: (float(v) if isinstance(v, (float, np.floating)) else v) for k, v in meta.items()}


def expansion_report(exp, semis=None):
    """JSON-ready dict with coefficients, distances, seminorms and quadrature metadata."""
    dists = distances(exp)
    out = {
        "function": exp.name,
        "alpha": exp.alpha,
        "N": exp.N,
        "f_norm_sq": exp.f_norm_sq,
        "coefficients": [float(a) for a in exp.coeffs],
        "distance_indexing": "d(f, Pi_{n-1}), n = 0..N+1",
        "distances": [d.value for d in dists],
        "below_floor": [d.below_floor for d in dists],
        "thresholds": {"distance_floor_rel": DIST_FLOOR, "coefficient_refinement_tol": COEFF_TOL},
        "quad_meta": _clean_meta(exp.quad_meta),
    }
    if semis is not None:
        out["seminorms"] = {
            "k_max": semis.k_max,
            "q": [float(v) for v in semis.values],
            "argmax_n": [int(v) for v in semis.argmax],
            "N_used": semis.N_used,
        }
    return out
