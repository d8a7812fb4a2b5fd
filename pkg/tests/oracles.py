"""Independent reference computations used only by the tests.

Nothing here calls the package's quadrature or recurrence code.
"""

import math
import warnings

import numpy as np
from scipy import integrate
from scipy.special import gammaln


def adaptive_simpson(f, a, b, tol=1e-12, max_depth=60):
    """Recursive adaptive Simpson rule for a scalar function."""

    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return recurse(a, m, fa, flm, fm, left, tol / 2, depth - 1) + recurse(
            m, b, fm, frm, fb, right, tol / 2, depth - 1
        )

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, max_depth)


def freud_mass_bruteforce(alpha):
    """``int exp(-2|x|**alpha) dx`` by adaptive Simpson on a truncated interval."""
    R = (40.0 / 2.0) ** (1.0 / alpha)
    g = lambda x: math.exp(-2.0 * abs(x) ** alpha)
    return 2.0 * adaptive_simpson(g, 0.0, R, tol=1e-14)


def freud_moment_gamma(alpha, k):
    if k % 2:
        return 0.0
    s = (k + 1) / alpha
    return 2.0 * math.exp(gammaln(s)) / (alpha * 2.0**s)


def weighted_integral(g, alpha, breakpoints=(), limit=400):
    """``int g(x) exp(-2|x|**alpha) dx`` with scipy's QUADPACK on pieces."""
    R = (750.0 / 2.0) ** (1.0 / alpha)
    pts = sorted({-R, 0.0, R, *[p for p in breakpoints if -R < p < R]})
    h = lambda x: g(x) * math.exp(-2.0 * abs(x) ** alpha)
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        with warnings.catch_warnings():
            # the tolerance sits at roundoff level on purpose; test tolerances absorb the rest
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(h, a, b, limit=limit, epsabs=1e-15, epsrel=1e-13)
        total += val
    return total


def orthonormal_hermite(n, x):
    """Orthonormal Hermite polynomial ``Q_n`` for ``exp(-x**2)``, own recurrence."""
    q_prev, q = 0.0, math.pi**-0.25
    for k in range(n):
        q_prev, q = q, (math.sqrt(2.0) * x * q - math.sqrt(k) * q_prev) / math.sqrt(k + 1)
    return q


def p2(n, x):
    """``P_{2,n}(x) = 2**(1/4) Q_n(sqrt(2) x)``, orthonormal for ``exp(-2x**2)``."""
    return 2.0**0.25 * orthonormal_hermite(n, math.sqrt(2.0) * x)


def alpha2_coefficient(f, n, breakpoints=()):
    """``a_{2,n}(f)`` by QUADPACK with the Hermite-based ``P_{2,n}``."""
    return weighted_integral(lambda x: f(x) * p2(n, x), 2.0, breakpoints)


def central_difference(f, x, h):
    return (f(x + h) - f(x - h)) / (2.0 * h)


def char_poly_roots(diag, off):
    """Eigenvalues of a small symmetric tridiagonal matrix via its characteristic polynomial."""
    P = np.polynomial.Polynomial
    prev, cur = P([1.0]), P([diag[0], -1.0])
    for i in range(1, len(diag)):
        prev, cur = cur, P([diag[i], -1.0]) * cur - off[i - 1] ** 2 * prev
    return np.sort(cur.roots().real)
