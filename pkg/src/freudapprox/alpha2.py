"""The Gaussian case ``alpha = 2`` and its link with Hermite functions.

With ``psi(x) = exp(-x**2/2)`` and orthonormal Hermite polynomials ``Q_n``,
the Hermite functions are ``h_n = Q_n psi`` and

    Q_n(s) = 2**(-1/4) P_{2,n}(s / sqrt(2)).

Consequently, for ``f`` in ``L2(exp(-2x**2) dx)``,

    a_{2,n}(f) = int g(s) h_n(s) ds,    g(s) = 2**(-1/4) f(s/sqrt(2)) psi(s),

and ``f`` is rapidly approximable exactly when ``f = g0 * exp(x**2)`` for a
Schwartz function ``g0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_hermite

from .errors import ConvergenceFailure, InvalidArgument
from .expansion import COEFF_TOL, fourier_coefficients
from .functions import FunctionSpec, gaussian_monomial
from .orthopoly import closed_form_recurrence, eval_polys, truncation_radius
from .quadrature import composite_legendre

__all__ = [
    "HermiteBasisValues",
    "CorrespondenceReport",
    "hermite_functions",
    "hermite_coefficients",
    "dilation_check",
    "coefficient_correspondence",
    "reconstruct_from_hermite",
    "schwartz_lift",
]

SQRT2 = math.sqrt(2.0)
QUARTER_ROOT2 = 2.0**0.25
PI_QUARTER = math.pi**-0.25


@dataclass(frozen=True)
class HermiteBasisValues:
    x: np.ndarray
    values: np.ndarray  # values[n] = h_n(x)


def hermite_functions(x, N):
    """``h_0(x), ..., h_N(x)`` by the normalized three-term recurrence."""
    if int(N) != N or N < 0:
        raise InvalidArgument("N must be a nonnegative integer")
    N = int(N)
    x = np.asarray(x, dtype=float)
    h = np.empty((N + 1,) + x.shape)
    h[0] = PI_QUARTER * np.exp(-0.5 * x * x)
    if N >= 1:
        h[1] = SQRT2 * x * h[0]
    for n in range(1, N):
        h[n + 1] = x * math.sqrt(2.0 / (n + 1)) * h[n] - math.sqrt(n / (n + 1)) * h[n - 1]
    return HermiteBasisValues(x, h)


def _weighted_hermite_polys(s, N, log_w):
    """``Q_n(s_i) * exp(log_w_i / 2)`` with a per-node rescale against overflow."""
    sc = 0.5 * log_w + math.log(PI_QUARTER)
    scale = np.exp(sc)
    out = np.empty((N + 1,) + s.shape)
    prev = np.zeros_like(s)
    cur = np.ones_like(s)
    out[0] = scale
    for n in range(N):
        nxt = s * math.sqrt(2.0 / (n + 1)) * cur - math.sqrt(n / (n + 1)) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > 1e150
        if np.any(big):
            f = np.where(big, 1e-150, 1.0)
            cur *= f
            prev *= f
            sc = sc + np.where(big, 150.0 * math.log(10.0), 0.0)
            scale = np.exp(sc)
        out[n + 1] = cur * scale
    return out


def _gauss_hermite_coeffs(u, N, m):
    s, w = roots_hermite(m)
    with np.errstate(divide="ignore"):
        log_w = np.log(w)
    sw = np.sqrt(w)
    Q = _weighted_hermite_polys(s, N, log_w)
    uw = u(s) * sw
    return np.array([math.fsum((row * uw).tolist()) for row in Q])


def _composite_hermite_coeffs(g, N, R, panels, breakpoints):
    cuts = sorted({0.0, *(p for p in breakpoints if -R < p < R)})
    edges = [-R, *cuts, R]
    breaks = []
    for a, b in zip(edges[:-1], edges[1:]):
        k = max(1, math.ceil((b - a) / (R / panels)))
        breaks.append(np.linspace(a, b, k + 1))
    x, w = composite_legendre(np.unique(np.concatenate(breaks)), 40)
    h = hermite_functions(x, N).values
    gw = g(x) * w
    return np.array([math.fsum((row * gw).tolist()) for row in h])


def hermite_coefficients(N, *, u=None, g=None, method="gauss", m=None, breakpoints=()):
    """Hermite coefficients ``int g(s) h_n(s) ds`` for ``n <= N``.

    ``method="gauss"`` integrates ``u(s) = g(s) exp(s**2/2)`` against
    ``exp(-s**2)`` with a Gauss-Hermite rule; this requires ``g`` to decay
    faster than ``exp(-s**2/2)``. ``method="composite"`` integrates ``g h_n``
    directly with composite Gauss-Legendre on ``[-R, R]`` and handles any
    Schwartz ``g``, including piecewise-smooth ones split at
    ``breakpoints``. Both runs are repeated on a refined rule; returns the
    refined coefficients and the refinement difference.
    """
    if method == "gauss":
        if u is None:
            raise InvalidArgument("gauss method needs u(s) = g(s) exp(s^2/2)")
        m = max(2 * (N + 1), 200) if m is None else int(m)
        c1 = _gauss_hermite_coeffs(u, N, m)
        c2 = _gauss_hermite_coeffs(u, N, 2 * m)
    elif method == "composite":
        if g is None:
            raise InvalidArgument("composite method needs g(s)")
        R = SQRT2 * truncation_radius(2.0, N)
        panels = max(8, N // 2) if m is None else int(m)
        c1 = _composite_hermite_coeffs(g, N, R, panels, breakpoints)
        c2 = _composite_hermite_coeffs(g, N, 1.25 * R, 2 * panels, breakpoints)
    else:
        raise InvalidArgument(f"unknown method {method!r}")
    return c2, float(np.max(np.abs(c2 - c1)))


def dilation_check(table, x_grid, N):
    """``max |h_n(x) - 2**(-1/4) P_{2,n}(x/sqrt(2)) exp(-x**2/2)|`` over the grid and ``n <= N``."""
    if table.alpha != 2.0:
        raise InvalidArgument("dilation_check needs an alpha=2 recurrence table")
    x = np.asarray(x_grid, dtype=float)
    h = hermite_functions(x, N).values
    rhs = eval_polys(table, x / SQRT2, N) * np.exp(-0.5 * x * x) / QUARTER_ROOT2
    return float(np.max(np.abs(h - rhs)))


@dataclass(frozen=True)
class CorrespondenceReport:
    a: np.ndarray  # a_{2,n}(f)
    hermite: np.ndarray  # Hermite coefficients of 2**(-1/4) f(s/sqrt 2) psi(s)
    max_diff: float
    f_norm_sq: float
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def parseval_left(self):
        return math.fsum((self.a**2).tolist())

    @property
    def parseval_right(self):
        return math.fsum((self.hermite**2).tolist())

    def to_csv(self):
        lines = ["n,a_n,hermite_n,diff"]
        for n, (a, h) in enumerate(zip(self.a, self.hermite)):
            lines.append(f"{n},{a:.17g},{h:.17g},{a - h:.17g}")
        return "\n".join(lines) + "\n"

    def to_dict(self):
        return {
            "N": int(self.a.size - 1),
            "max_diff": self.max_diff,
            "f_norm_sq": self.f_norm_sq,
            "parseval_left": self.parseval_left,
            "parseval_right": self.parseval_right,
            "a": [float(v) for v in self.a],
            "hermite": [float(v) for v in self.hermite],
            "quad_meta": self.meta,
        }


def coefficient_correspondence(f, N, method="auto"):
    """Compare ``a_{2,n}(f)`` with the Hermite coefficients of the transformed function.

    The left side comes from :func:`fourier_coefficients` at ``alpha = 2``;
    the right side from an independent Hermite-function quadrature of
    ``2**(-1/4) f(s/sqrt 2) exp(-s**2/2)``.
    """
    table = closed_form_recurrence(2.0, N)
    left = fourier_coefficients(f, table, N)
    breakpoints = tuple(SQRT2 * p for p in getattr(f, "breakpoints", ()))
    if method == "auto":
        method = "composite" if breakpoints else "gauss"

    def u(s):
        return f(s / SQRT2) / QUARTER_ROOT2

    def g(s):
        with np.errstate(over="ignore", invalid="ignore"):
            v = f(s / SQRT2) * np.exp(-0.5 * s * s) / QUARTER_ROOT2
        return np.where(np.isfinite(v), v, 0.0)

    right, herm_diff = hermite_coefficients(N, u=u, g=g, method=method, breakpoints=breakpoints)
    if herm_diff >= COEFF_TOL * max(1.0, left.f_norm):
        raise ConvergenceFailure(
            f"Hermite-side coefficients changed by {herm_diff:.3e} under refinement",
            last=right,
        )
    diff = float(np.max(np.abs(left.coeffs - right)))
    meta = {"left": dict(left.quad_meta), "right": {"method": method, "refinement_diff": herm_diff}}
    return CorrespondenceReport(left.coeffs, right, diff, left.f_norm_sq, meta)


def reconstruct_from_hermite(hermite, x):
    """Rebuild ``f(x) = 2**(1/4) exp(x**2) sum_n c_n h_n(sqrt(2) x)`` from Hermite coefficients."""
    x = np.asarray(x, dtype=float)
    c = np.asarray(hermite, dtype=float)
    h = hermite_functions(SQRT2 * x, c.size - 1).values
    return QUARTER_ROOT2 * np.exp(x * x) * np.tensordot(c, h, axes=(0, 0))


def _exp_sq_poly(i):
    """``E_i`` with ``d^i/dx^i exp(x**2) = E_i(x) exp(x**2)``."""
    from numpy.polynomial import Polynomial

    X = Polynomial([0.0, 1.0])
    p = Polynomial([1.0])
    for _ in range(i):
        p = p.deriv() + 2.0 * X * p
    return p


def schwartz_lift(g):
    """``f(x) = g(x) exp(x**2)`` for Schwartz ``g``.

    Gaussian monomials ``x**k exp(-beta x**2)`` lift in closed form to
    ``x**k exp(-(beta - 1) x**2)``. Other inputs use the Leibniz rule
    ``f^{(j)} = sum_i C(j,i) g^{(j-i)} E_i exp(x**2)``.
    """
    if "schwartz" not in g.tags:
        raise InvalidArgument(f"{g.name} is not tagged Schwartz-class")
    name = f"lift({g.name})"
    gauss = g.params.get("gaussian")
    if gauss is not None:
        k, beta = gauss
        tags = {"schwartz_lift"}
        if beta < 1:
            tags.add("superexp_growth")
        elif beta > 1:
            tags.add("schwartz")
        lifted = gaussian_monomial(k, beta - 1.0, name=name, tags=tags)
        return lifted

    def _product(gx, x, poly=None):
        with np.errstate(over="ignore", invalid="ignore"):
            e = np.exp(x * x)
            v = gx * e if poly is None else gx * poly(x) * e
        return np.where(gx == 0, 0.0, v)

    def _eval(x):
        return _product(g(x), x)

    def deriv(j, x):
        total = np.zeros_like(x)
        for i in range(j + 1):
            total = total + math.comb(j, i) * _product(g.deriv(j - i, x), x, _exp_sq_poly(i))
        return total

    return FunctionSpec(
        name,
        _eval,
        deriv,
        j_max=g.j_max,
        tags=frozenset({"schwartz_lift", "superexp_growth"}),
        alpha_compat=lambda a: a == 2.0,
        breakpoints=g.breakpoints,
    )
