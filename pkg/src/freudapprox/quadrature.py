"""Quadrature rules: Gauss-Legendre, composite rules and Golub-Welsch.

All rules are immutable :class:`QuadratureRule` objects tagged with the
measure they integrate against, either Lebesgue measure on an interval or
the Freud measure ``exp(-2|x|**alpha) dx`` on the real line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import InternalError, InvalidArgument

__all__ = [
    "MeasureTag",
    "QuadratureRule",
    "lebesgue",
    "freud",
    "freud_moment",
    "freud_mu0",
    "gauss_legendre",
    "composite_legendre",
    "eigen_sym_tridiag",
    "golub_welsch",
]

EPS = np.finfo(float).eps
MAX_QL_SWEEPS = 50


@dataclass(frozen=True)
class MeasureTag:
    kind: str  # "lebesgue" or "freud"
    params: tuple

    def __str__(self):
        args = ", ".join(repr(float(p)) for p in self.params)
        return f"{self.kind}({args})"


def lebesgue(a, b):
    return MeasureTag("lebesgue", (float(a), float(b)))


def freud(alpha):
    return MeasureTag("freud", (float(alpha),))


def _frozen(values):
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a quadrature rule.

    ``kind`` is ``"gauss"`` for Gaussian rules, which are exact for
    polynomials of degree ``2 * len(nodes) - 1``, and ``"composite"`` for
    panel rules that are exact only up to discretization error.

    Weights are nonnegative. For Gauss-Freud rules with many nodes the
    outermost weights can underflow to zero; such nodes carry no mass in
    double precision and are kept so that ``len(rule)`` equals the
    requested node count.
    """

    nodes: np.ndarray
    weights: np.ndarray
    measure: MeasureTag
    kind: str = "gauss"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        nodes = _frozen(self.nodes)
        weights = _frozen(self.weights)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise InvalidArgument("nodes and weights must be 1-d arrays of equal length")
        if nodes.size > 1 and not np.all(np.diff(nodes) > 0):
            raise InvalidArgument("nodes must be strictly ascending")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise InvalidArgument("weights must be finite and nonnegative")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.nodes.size

    def integrate(self, values):
        """Return ``sum(weights * values)`` with exactly rounded summation."""
        values = np.asarray(values, dtype=float)
        if values.shape != self.nodes.shape:
            raise InvalidArgument("values must be sampled on the rule's nodes")
        return math.fsum((self.weights * values).tolist())

    def integrate_function(self, f):
        return self.integrate(f(self.nodes))


def freud_moment(alpha, k):
    """Exact moment ``int x**k exp(-2|x|**alpha) dx`` over the real line."""
    if k % 2:
        return 0.0
    s = (k + 1) / alpha
    return 2.0 * math.exp(gammaln(s) - s * math.log(2.0)) / alpha


def freud_mu0(alpha):
    """Total mass ``2 Gamma(1 + 1/alpha) 2**(-1/alpha)`` of the Freud measure."""
    return 2.0 * math.gamma(1.0 + 1.0 / alpha) * 2.0 ** (-1.0 / alpha)


def gauss_legendre(m, a=-1.0, b=1.0):
    """``m``-node Gauss-Legendre rule on ``[a, b]``."""
    if int(m) != m or m < 1:
        raise InvalidArgument(f"gauss_legendre needs m >= 1, got {m!r}")
    x, w = np.polynomial.legendre.leggauss(int(m))
    # leggauss is symmetric only up to rounding; enforce exact pairing
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    half = 0.5 * (b - a)
    return QuadratureRule(half * x + 0.5 * (a + b), half * w, lebesgue(a, b))


def composite_legendre(breaks, order):
    """Composite Gauss-Legendre rule over consecutive intervals of ``breaks``.

    Returns ``(nodes, weights)`` arrays; shared endpoints are never nodes.
    """
    breaks = np.asarray(breaks, dtype=float)
    if breaks.ndim != 1 or breaks.size < 2 or np.any(np.diff(breaks) <= 0):
        raise InvalidArgument("breaks must be strictly increasing with at least two entries")
    x, w = np.polynomial.legendre.leggauss(order)
    lo, hi = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (half * x + 0.5 * (lo + hi)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def eigen_sym_tridiag(diag, offdiag):
    """Eigenvalues and first eigenvector components of a symmetric tridiagonal matrix.

    Implicitly shifted QL iteration. Only the first row of the eigenvector
    matrix is accumulated, which is all Golub-Welsch needs.

    Parameters
    ----------
    diag : sequence of float, length n
    offdiag : sequence of float, length n - 1

    Returns
    -------
    eigenvalues : ndarray
        Ascending.
    first_components : ndarray
        Nonnegative first components of the normalized eigenvectors, in the
        same order.
    """
    d = [float(v) for v in diag]
    n = len(d)
    if n == 0:
        raise InvalidArgument("empty diagonal")
    if len(offdiag) != n - 1:
        raise InvalidArgument("offdiag must have length len(diag) - 1")
    e = [float(v) for v in offdiag] + [0.0]
    z = [0.0] * n
    z[0] = 1.0
    hypot = math.hypot

    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= EPS * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > MAX_QL_SWEEPS:
                raise InternalError(f"QL iteration did not converge for eigenvalue {l}")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi1 = z[i + 1]
                z[i + 1] = s * z[i] + c * zi1
                z[i] = c * z[i] - s * zi1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0

    vals = np.array(d)
    order = np.argsort(vals, kind="stable")
    return vals[order], np.abs(np.array(z))[order]


def _christoffel_weights(b, mu0, x):
    """``mu0 * v1**2`` with ``v`` the Jacobi eigenvector at eigenvalue ``x``.

    The eigenvector of the zero-diagonal Jacobi matrix at an eigenvalue is
    ``(p_0(x), ..., p_{m-1}(x))`` up to normalization, with ``p_k`` the
    orthonormal polynomials. Running that recurrence with a running rescale
    gives each weight to full relative precision, including the tiny
    weights at the outermost nodes, and underflows to zero gracefully.
    """
    m = x.size
    p_prev = np.zeros(m)
    p = np.ones(m)  # p_0 scaled to 1; true value is 1/sqrt(mu0)
    total = np.ones(m)
    log_scale = np.zeros(m)
    for k in range(1, m):
        p_next = (x * p - b[k - 2] * p_prev if k >= 2 else x * p) / b[k - 1]
        p_prev, p = p, p_next
        total += p * p
        big = total > 1e100
        if np.any(big):
            factor = np.where(big, 1e-50, 1.0)
            p *= factor
            p_prev *= factor
            total *= factor * factor
            log_scale += np.where(big, 50.0 * math.log(10.0), 0.0)
    # v1^2 = p_0^2 / sum p_k^2 with p_0 scaled to 1, undoing the rescale
    log_w = math.log(mu0) - np.log(total) - 2.0 * log_scale
    return np.exp(log_w)


def golub_welsch(table, m):
    """``m``-node Gauss rule for ``exp(-2|x|**alpha) dx`` from a recurrence table.

    Nodes are eigenvalues of the ``m x m`` Jacobi matrix with zero diagonal and
    off-diagonal ``table.b[:m-1]``; weights are ``mu0 * v1**2``.
    """
    if int(m) != m or m < 1:
        raise InvalidArgument(f"golub_welsch needs m >= 1, got {m!r}")
    m = int(m)
    b = np.asarray(table.b, dtype=float)
    if b.size < m - 1:
        raise InvalidArgument(
            f"recurrence table has {b.size} coefficients, {m - 1} needed for m={m}"
        )
    b = b[: m - 1]
    nodes, first = eigen_sym_tridiag(np.zeros(m), b)
    # the spectrum of a zero-diagonal Jacobi matrix is symmetric: pair it exactly
    nodes = 0.5 * (nodes - nodes[::-1])
    if m % 2:
        nodes[m // 2] = 0.0
    weights = _christoffel_weights(b, table.mu0, nodes)
    weights = 0.5 * (weights + weights[::-1])
    return QuadratureRule(
        nodes,
        weights,
        freud(table.alpha),
        kind="gauss",
        meta={"ql_first_components": first},
    )
