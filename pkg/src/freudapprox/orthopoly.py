"""Orthonormal polynomials for the Freud weights ``exp(-2|x|**alpha)``.

The system ``P_n`` is described by its three-term recurrence

    x P_n(x) = b_{n+1} P_{n+1}(x) + b_n P_{n-1}(x),    P_0 = 1/sqrt(mu0),

with zero diagonal because the weight is even. Leading coefficients are
positive.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceFailure, InvalidArgument
from .quadrature import QuadratureRule, composite_legendre, freud_mu0, golub_welsch
from .quadrature import freud as freud_tag

__all__ = [
    "FreudWeight",
    "RecurrenceTable",
    "closed_form_recurrence",
    "stieltjes_recurrence",
    "recurrence_table",
    "truncation_radius",
    "mrs_number",
    "eval_polys",
    "eval_polys_scaled",
    "eval_poly_derivs",
    "weighted_polys",
    "weighted_poly_derivs",
    "gauss_freud",
    "leading_coefficients",
    "gauss_freud_rule",
    "composite_freud_rule",
]

# exp(-2 R**alpha) ~ 2**-75 at the base truncation radius
TAIL_EXPONENT = 75.0 * math.log(2.0)
PANEL_ORDER = 40
MAX_PANELS = 1024
GRADING_LEVELS = 16
AIRY_MARGIN = 8.0
RESCALE = 1e150
LOG_RESCALE = 150.0 * math.log(10.0)


@dataclass(frozen=True)
class FreudWeight:
    """The weight ``W(x) = exp(-|x|**alpha)``; integrals use ``W**2``."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not a > 1.0 or not math.isfinite(a):
            raise InvalidArgument(f"Freud exponent must satisfy alpha > 1, got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)

    def w(self, x):
        return np.exp(-np.abs(x) ** self.alpha)

    def w2(self, x):
        return np.exp(-2.0 * np.abs(x) ** self.alpha)

    @property
    def mu0(self):
        return freud_mu0(self.alpha)


@dataclass(frozen=True)
class RecurrenceTable:
    alpha: float
    mu0: float
    b: np.ndarray

    def __post_init__(self):
        b = np.array(self.b, dtype=float).reshape(-1)
        if not self.mu0 > 0:
            raise InvalidArgument("mu0 must be positive")
        if np.any(b <= 0) or not np.all(np.isfinite(b)):
            raise InvalidArgument("recurrence coefficients must be finite and positive")
        b.setflags(write=False)
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "mu0", float(self.mu0))
        object.__setattr__(self, "b", b)

    def __len__(self):
        return self.b.size

    # serialization -------------------------------------------------------

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "b_n"])
        for n, bn in enumerate(self.b, start=1):
            writer.writerow([n, format(bn, ".17g")])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, alpha, mu0=None):
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["n", "b_n"]:
            raise InvalidArgument("expected CSV header 'n,b_n'")
        b = [float(r[1]) for r in rows[1:] if r]
        return cls(alpha, freud_mu0(alpha) if mu0 is None else mu0, b)

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "mu0": self.mu0,
            "b": [float(v) for v in self.b],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls(d["alpha"], d["mu0"], d["b"])


def _check_alpha(alpha):
    return FreudWeight(alpha).alpha


def closed_form_recurrence(alpha, N):
    """Exact table for ``alpha = 2``: ``mu0 = sqrt(pi/2)``, ``b_n = sqrt(n)/2``.

    These are the orthonormal Hermite coefficients ``sqrt(n/2)`` rescaled by
    the dilation ``x -> sqrt(2) x`` that maps ``exp(-x**2)`` to ``exp(-2x**2)``.
    """
    if float(alpha) != 2.0:
        raise InvalidArgument(f"closed form recurrence exists only for alpha=2, got {alpha!r}")
    if int(N) != N or N < 0:
        raise InvalidArgument(f"N must be a nonnegative integer, got {N!r}")
    n = np.arange(1, int(N) + 1, dtype=float)
    return RecurrenceTable(2.0, math.sqrt(math.pi / 2.0), np.sqrt(n) / 2.0)


def mrs_number(alpha, n):
    """Effective support radius ``a_n = (n / lambda_alpha)**(1/alpha)`` of degree-n weighted polynomials.

    ``lambda_alpha = Gamma(alpha) / (2**(alpha-2) Gamma(alpha/2)**2)``; at
    ``alpha = 2`` this gives ``sqrt(n)``, the edge of the zeros of ``P_{2,n}``.
    """
    lam = math.exp(math.lgamma(alpha) - (alpha - 2.0) * math.log(2.0) - 2.0 * math.lgamma(alpha / 2.0))
    return (n / lam) ** (1.0 / alpha)


def truncation_radius(alpha, N):
    """Half-width ``R`` of the interval carrying the Stieltjes discretization.

    ``R`` covers both the weight itself (``exp(-2 R**alpha) ~ 2**-75``) and
    the squared degree-``N`` weighted polynomials, which live on
    ``[-a_N, a_N]`` and decay across an Airy layer of width
    ``~ a_N N**(-2/3)`` beyond it.
    """
    base = (TAIL_EXPONENT / 2.0) ** (1.0 / alpha)
    if N == 0:
        return base
    return max(base, mrs_number(alpha, N) * (1.0 + AIRY_MARGIN * N ** (-2.0 / 3.0)))


def _half_line_rule(alpha, R, panels):
    """Composite Legendre nodes on ``[0, R]`` with the first panel graded towards 0.

    Returns nodes and the log of the weights including ``exp(-2 x**alpha)``.
    The grading absorbs the weak singularity of ``|x|**alpha`` at the
    origin for non-even ``alpha``.
    """
    h = R / panels
    graded = h * 2.0 ** -np.arange(GRADING_LEVELS, 0, -1)
    breaks = np.concatenate([[0.0], graded, h * np.arange(1, panels + 1)])
    x, w = composite_legendre(breaks, PANEL_ORDER)
    return x, np.log(w) - 2.0 * x**alpha


def _stieltjes_discrete(x, log_w, N):
    """Discretized Stieltjes procedure on a symmetric measure given by its half.

    Tracks ``q_n = p_n * sqrt(w)`` as mantissa times a per-node scale
    ``exp(s)`` so that neither the underflowing weight nor the growing
    polynomial leaves the floating-point range. The full-line inner product
    of an even integrand is twice the half-line sum.
    """
    log_mass = math.log(2.0) + np.logaddexp.reduce(log_w)
    s = 0.5 * (log_w - log_mass)
    scale = np.exp(s)
    mq_prev = np.zeros_like(x)
    mq = np.ones_like(x)
    b = np.empty(N)
    for n in range(N):
        mv = x * mq
        if n:
            mv -= b[n - 1] * mq_prev
        v = mv * scale
        bn = math.sqrt(2.0 * np.sum(v * v))
        b[n] = bn
        mq_prev, mq = mq, mv / bn
        big = np.abs(mq) > RESCALE
        if np.any(big):
            f = np.where(big, 1.0 / RESCALE, 1.0)
            mq *= f
            mq_prev *= f
            s = s + np.where(big, LOG_RESCALE, 0.0)
            scale = np.exp(s)
    return b


def stieltjes_recurrence(weight, N, tol=1e-11):
    """Recurrence table for ``exp(-2|x|**alpha)`` by the discretized Stieltjes procedure.

    Panels are doubled until two successive tables agree to ``tol``
    (relative to ``max(1, b_n)``).
    """
    if not isinstance(weight, FreudWeight):
        weight = FreudWeight(weight)
    if int(N) != N or N < 0:
        raise InvalidArgument(f"N must be a nonnegative integer, got {N!r}")
    if not tol > 0:
        raise InvalidArgument("tol must be positive")
    N = int(N)
    alpha = weight.alpha
    if N == 0:
        return RecurrenceTable(alpha, weight.mu0, [])
    R = truncation_radius(alpha, N)
    panels = max(4, 2 ** math.ceil(math.log2(max(1.0, N / 8.0))))
    prev = b = None
    while panels <= MAX_PANELS:
        x, log_w = _half_line_rule(alpha, R, panels)
        prev, b = b, _stieltjes_discrete(x, log_w, N)
        if prev is not None:
            err = np.max(np.abs(b - prev) / np.maximum(1.0, b))
            if err <= tol:
                return RecurrenceTable(alpha, weight.mu0, b)
        panels *= 2
    raise ConvergenceFailure(
        f"Stieltjes coefficients for alpha={alpha} did not stabilize to {tol} "
        f"with {MAX_PANELS} panels",
        previous=RecurrenceTable(alpha, weight.mu0, prev),
        last=RecurrenceTable(alpha, weight.mu0, b),
    )


@lru_cache(maxsize=64)
def recurrence_table(alpha, N):
    """Cached table: closed form at ``alpha = 2``, Stieltjes otherwise."""
    alpha = _check_alpha(alpha)
    if alpha == 2.0:
        return closed_form_recurrence(2.0, N)
    return stieltjes_recurrence(FreudWeight(alpha), N)


def _check_degree(table, N):
    if int(N) != N or N < 0:
        raise InvalidArgument(f"degree must be a nonnegative integer, got {N!r}")
    if N > len(table):
        raise InvalidArgument(f"degree {N} exceeds recurrence table length {len(table)}")
    return int(N)


def eval_polys(table, x, N):
    """Values ``[P_0(x), ..., P_N(x)]``.

    ``x`` may be a scalar or an array; the result has shape
    ``(N + 1,) + shape(x)``.
    """
    N = _check_degree(table, N)
    x = np.asarray(x, dtype=float)
    out = np.empty((N + 1,) + x.shape)
    out[0] = 1.0 / math.sqrt(table.mu0)
    b = table.b
    if N >= 1:
        out[1] = x * out[0] / b[0]
    for n in range(1, N):
        out[n + 1] = (x * out[n] - b[n - 1] * out[n - 1]) / b[n]
    return out


def eval_polys_scaled(table, x, N):
    """Overflow-safe values as ``(mantissas, exponent)`` with ``P_n(x) = m_n * 2**exponent``.

    A single base-2 exponent is shared by the whole list.
    """
    N = _check_degree(table, N)
    x = float(x)
    b = table.b
    vals = [1.0 / math.sqrt(table.mu0)]
    exps = [0]
    prev, cur, shift = 0.0, vals[0], 0
    for n in range(N):
        nxt = (x * cur - (b[n - 1] * prev if n else 0.0)) / b[n]
        if abs(nxt) > 2.0**500:
            nxt, cur = math.ldexp(nxt, -500), math.ldexp(cur, -500)
            shift += 500
        prev, cur = cur, nxt
        vals.append(cur)
        exps.append(shift)
    top = exps[-1]
    mant = [math.ldexp(v, e - top) for v, e in zip(vals, exps)]
    return np.array(mant), top


def eval_poly_derivs(table, x, N, j):
    """Derivatives ``P_n^{(i)}(x)`` for ``n <= N`` and ``i <= j``.

    Returns an array of shape ``(j + 1, N + 1) + shape(x)``; entry
    ``[i, n]`` is ``P_n^{(i)}(x)``. Uses the differentiated recurrence
    ``b_{n+1} p^{(i)}_{n+1} = i p^{(i-1)}_n + x p^{(i)}_n - b_n p^{(i)}_{n-1}``.
    """
    N = _check_degree(table, N)
    if int(j) != j or j < 0:
        raise InvalidArgument(f"derivative order must be a nonnegative integer, got {j!r}")
    j = int(j)
    x = np.asarray(x, dtype=float)
    b = table.b
    out = np.zeros((j + 1, N + 1) + x.shape)
    out[0] = eval_polys(table, x, N)
    for i in range(1, j + 1):
        lower = out[i - 1]
        cur = out[i]
        for n in range(0, N):
            val = i * lower[n] + x * cur[n]
            if n:
                val = val - b[n - 1] * cur[n - 1]
            cur[n + 1] = val / b[n]
    return out


def weighted_polys(table, x, N, log_weights):
    """``P_n(x_i) * exp(log_weights_i / 2)`` for ``n <= N``.

    Used wherever ``P_n`` is integrated against quadrature weights that
    already contain the Freud measure. A per-node scale keeps tiny weights
    and large polynomial values from under- or overflowing.
    """
    N = _check_degree(table, N)
    x = np.asarray(x, dtype=float)
    s = 0.5 * np.asarray(log_weights, dtype=float) - 0.5 * math.log(table.mu0)
    scale = np.exp(s)
    out = np.empty((N + 1,) + x.shape)
    b = table.b
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    out[0] = scale
    for n in range(N):
        nxt = x * cur
        if n:
            nxt -= b[n - 1] * prev
        nxt /= b[n]
        prev, cur = cur, nxt
        big = np.abs(cur) > RESCALE
        if np.any(big):
            f = np.where(big, 1.0 / RESCALE, 1.0)
            cur *= f
            prev *= f
            s = s + np.where(big, LOG_RESCALE, 0.0)
            scale = np.exp(s)
        out[n + 1] = cur * scale
    return out


def weighted_poly_derivs(table, x, N, j, log_weights):
    """``P_n^{(i)}(x_k) * exp(log_weights_k / 2)`` for ``n <= N``, ``i <= j``.

    Same layout as :func:`eval_poly_derivs`. The differentiated recurrence is
    linear in all orders jointly, so one per-node scale serves every order.
    """
    N = _check_degree(table, N)
    if int(j) != j or j < 0:
        raise InvalidArgument(f"derivative order must be a nonnegative integer, got {j!r}")
    j = int(j)
    x = np.asarray(x, dtype=float)
    s = 0.5 * np.asarray(log_weights, dtype=float) - 0.5 * math.log(table.mu0)
    b = table.b
    prev = np.zeros((j + 1,) + x.shape)
    cur = np.zeros((j + 1,) + x.shape)
    cur[0] = 1.0
    out = np.empty((j + 1, N + 1) + x.shape)
    out[:, 0] = cur * np.exp(s)
    orders = np.arange(j + 1, dtype=float).reshape((j + 1,) + (1,) * x.ndim)
    for n in range(N):
        nxt = x * cur
        nxt[1:] += orders[1:] * cur[:-1]
        if n:
            nxt -= b[n - 1] * prev
        nxt /= b[n]
        prev, cur = cur, nxt
        big = np.max(np.abs(cur), axis=0) > RESCALE
        if np.any(big):
            f = np.where(big, 1.0 / RESCALE, 1.0)
            cur *= f
            prev *= f
            s = s + np.where(big, LOG_RESCALE, 0.0)
        out[:, n + 1] = cur * np.exp(s)
    return out


def leading_coefficients(table, N):
    """Leading coefficients ``1 / (sqrt(mu0) * prod_{k<=n} b_k)`` for ``n <= N``."""
    N = _check_degree(table, N)
    logs = -0.5 * math.log(table.mu0) - np.concatenate([[0.0], np.cumsum(np.log(table.b[:N]))])
    return np.exp(logs)


def gauss_freud(table, m):
    """``m``-node Gauss rule for ``exp(-2|x|**alpha) dx``."""
    return golub_welsch(table, m)


@lru_cache(maxsize=64)
def gauss_freud_rule(alpha, m) -> QuadratureRule:
    """Cached Gauss-Freud rule built from :func:`recurrence_table`."""
    return golub_welsch(recurrence_table(alpha, max(int(m) - 1, 0)), m)


def _graded_breaks(a, b, h):
    """Breaks splitting ``[a, b]`` into panels of width ``<= h``, graded
    geometrically towards both ends."""
    k = max(1, math.ceil((b - a) / h - 1e-12))
    width = (b - a) / k
    fracs = 2.0 ** -np.arange(1, GRADING_LEVELS + 1)
    pts = np.concatenate([
        np.linspace(a, b, k + 1),
        a + width * fracs,
        b - width * fracs,
    ])
    return np.unique(pts)


def composite_freud_rule(alpha, R, panels, breakpoints=()):
    """Composite Legendre rule for ``exp(-2|x|**alpha) dx`` on ``[-R, R]``.

    Panels have width ``R / panels`` and are graded towards the origin and
    towards every interior breakpoint, where integrands may lose
    smoothness. ``meta["log_weights"]`` holds the logarithms of the weights,
    which stay finite where the weights themselves underflow.
    """
    alpha = _check_alpha(alpha)
    h = R / panels
    cuts = sorted({0.0, *(float(p) for p in breakpoints if -R < p < R)})
    edges = [-R, *cuts, R]
    breaks = np.unique(np.concatenate(
        [_graded_breaks(a, b, h) for a, b in zip(edges[:-1], edges[1:])]
    ))
    x, w = composite_legendre(breaks, PANEL_ORDER)
    log_w = np.log(w) - 2.0 * np.abs(x) ** alpha
    return QuadratureRule(
        x,
        np.exp(log_w),
        freud_tag(alpha),
        kind="composite",
        meta={"log_weights": log_w, "R": R, "panels": panels},
    )
