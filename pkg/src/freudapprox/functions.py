"""Test functions with closed-form derivatives and class metadata.

Every :class:`FunctionSpec` carries hand-derived derivatives, a set of class
tags (``polynomial``, ``schwartz``, ``finite_smoothness(k)``, ...) and a
predicate telling for which ``alpha`` the function and its available
derivatives lie in ``L2(exp(-2|x|**alpha) dx)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import Polynomial

from .errors import InvalidArgument

__all__ = [
    "FunctionSpec",
    "monomial",
    "sine",
    "cosine",
    "bump",
    "absolute",
    "abs_cubed",
    "sign",
    "gaussian_monomial",
    "exp_half_square",
    "dilate",
    "scale",
    "orthopoly_function",
    "corpus",
    "get",
]


def _all_alpha(alpha):
    return alpha > 1


@dataclass(frozen=True)
class FunctionSpec:
    name: str
    eval: Callable
    derivative: Callable  # (j, x) -> values for 1 <= j <= j_max
    j_max: Optional[int] = None  # None means every order is available
    tags: frozenset = frozenset()
    alpha_compat: Callable = _all_alpha
    breakpoints: tuple = ()
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, x):
        return self.eval(np.asarray(x, dtype=float))

    def deriv(self, j, x):
        if int(j) != j or j < 0:
            raise InvalidArgument(f"derivative order must be a nonnegative integer, got {j!r}")
        if self.j_max is not None and j > self.j_max:
            raise InvalidArgument(
                f"{self.name} provides derivatives up to order {self.j_max}, asked for {j}"
            )
        x = np.asarray(x, dtype=float)
        if j == 0:
            return self.eval(x)
        return self.derivative(int(j), x)

    def compatible(self, alpha):
        return bool(self.alpha_compat(float(alpha)))

    def has_derivative(self, j):
        return self.j_max is None or j <= self.j_max


def _poly_deriv_table(p0, step):
    """Lazily grown list ``[p0, p1, ...]`` with ``p_{j+1} = step(p_j)``."""
    table = [p0]

    def get(j):
        while len(table) <= j:
            table.append(step(table[-1]))
        return table[j]

    return get


def monomial(d):
    d = int(d)
    if d < 0:
        raise InvalidArgument("monomial degree must be nonnegative")

    def deriv(j, x):
        if j > d:
            return np.zeros_like(x)
        return math.perm(d, j) * x ** (d - j)

    return FunctionSpec(
        f"x{d}",
        lambda x: x**d,
        deriv,
        tags=frozenset({"polynomial", "entire_bounded_derivs"} if d == 0 else {"polynomial"}),
        params={"degree": d},
    )


def sine():
    return FunctionSpec(
        "sin",
        np.sin,
        lambda j, x: np.sin(x + j * np.pi / 2),
        tags=frozenset({"entire_bounded_derivs"}),
    )


def cosine():
    return FunctionSpec(
        "cos",
        np.cos,
        lambda j, x: np.cos(x + j * np.pi / 2),
        tags=frozenset({"entire_bounded_derivs"}),
    )


def bump():
    """``exp(-1/(1-x**2))`` on ``|x| < 1``, zero outside.

    The j-th derivative is ``N_j(x) / (1-x**2)**(2j) * bump(x)`` with
    ``N_{j+1} = N_j' D**2 + 4 j x N_j D - 2 x N_j`` and ``D = 1 - x**2``.
    """
    D = Polynomial([1.0, 0.0, -1.0])
    X = Polynomial([0.0, 1.0])
    numer = [Polynomial([1.0])]

    def numerator(j):
        while len(numer) <= j:
            k = len(numer) - 1
            n = numer[-1]
            numer.append(n.deriv() * D**2 + 4 * k * X * n * D - 2 * X * n)
        return numer[j]

    def _eval(x):
        out = np.zeros_like(x)
        inside = np.abs(x) < 1
        xi = x[inside]
        out[inside] = np.exp(-1.0 / (1.0 - xi * xi))
        return out

    def deriv(j, x):
        out = np.zeros_like(x)
        inside = np.abs(x) < 1
        xi = x[inside]
        d = 1.0 - xi * xi
        # exp(-1/d) underflows before d**(2j) does, so this is 0 near |x| = 1
        out[inside] = numerator(j)(xi) * np.exp(-1.0 / d) / d ** (2 * j)
        return out

    return FunctionSpec(
        "bump",
        _eval,
        deriv,
        tags=frozenset({"compact_support"}),
        breakpoints=(-1.0, 1.0),
    )


def absolute():
    return FunctionSpec(
        "abs",
        np.abs,
        lambda j, x: np.sign(x),
        j_max=1,
        tags=frozenset({"finite_smoothness(0)"}),
        breakpoints=(0.0,),
    )


def abs_cubed():
    derivs = {
        1: lambda x: 3.0 * x * np.abs(x),
        2: lambda x: 6.0 * np.abs(x),
        3: lambda x: 6.0 * np.sign(x),
    }
    return FunctionSpec(
        "abs3",
        lambda x: np.abs(x) ** 3,
        lambda j, x: derivs[j](x),
        j_max=3,
        tags=frozenset({"finite_smoothness(2)"}),
        breakpoints=(0.0,),
    )


def sign():
    return FunctionSpec(
        "sign",
        np.sign,
        None,
        j_max=0,
        tags=frozenset({"discontinuous"}),
        breakpoints=(0.0,),
    )


def _gaussian_compat(beta):
    """``x**k exp(-beta x**2)`` and its derivatives are in L2(exp(-2|x|**alpha)) iff ..."""

    def compat(alpha):
        if alpha <= 1:
            return False
        if beta >= 0:
            return True
        return alpha > 2 or (alpha == 2 and beta > -1)

    return compat


def gaussian_monomial(k, beta, name=None, tags=None):
    """``x**k * exp(-beta * x**2)``; Schwartz-class for ``beta > 0``.

    Derivatives are ``p_j(x) exp(-beta x**2)`` with
    ``p_{j+1} = p_j' - 2 beta x p_j``.
    """
    k = int(k)
    beta = float(beta)
    X = Polynomial([0.0, 1.0])
    polys = _poly_deriv_table(X**k, lambda p: p.deriv() - 2.0 * beta * X * p)
    if tags is None:
        if beta > 0:
            tags = {"schwartz"}
        elif beta == 0:
            tags = {"polynomial"}
        else:
            tags = {"superexp_growth"}
    if name is None:
        name = f"x{k}_exp(-{beta:g}x^2)"

    def _eval(x):
        return x**k * np.exp(-beta * x * x)

    def deriv(j, x):
        return polys(j)(x) * np.exp(-beta * x * x)

    return FunctionSpec(
        name,
        _eval,
        deriv,
        tags=frozenset(tags),
        alpha_compat=_gaussian_compat(beta),
        params={"gaussian": (k, beta)},
    )


def exp_half_square():
    """``exp(x**2 / 2)``: superexponential growth, inside L2 of the alpha=2 measure."""
    return gaussian_monomial(0, -0.5, name="exp_half_sq", tags={"superexp_growth"})


def dilate(f, r):
    """``x -> f(r x)`` with derivatives ``r**j f^{(j)}(r x)``."""
    r = float(r)
    if not r > 0:
        raise InvalidArgument("dilation factor must be positive")
    return FunctionSpec(
        f"dilate({f.name},{r:g})",
        lambda x: f(r * x),
        lambda j, x: r**j * f.deriv(j, r * x),
        j_max=f.j_max,
        tags=f.tags,
        alpha_compat=_dilated_compat(f, r),
        breakpoints=tuple(sorted(p / r for p in f.breakpoints)),
    )


def _dilated_compat(f, r):
    # shrinking the argument slows growth; stretching it is safe only without superexponential growth
    if r <= 1 or "superexp_growth" not in f.tags:
        return f.alpha_compat
    return lambda a: False


def scale(f, c):
    """``c * f``."""
    c = float(c)
    return FunctionSpec(
        f"{c:g}*{f.name}",
        lambda x: c * f(x),
        lambda j, x: c * f.deriv(j, x),
        j_max=f.j_max,
        tags=f.tags,
        alpha_compat=f.alpha_compat,
        breakpoints=f.breakpoints,
        params=dict(f.params),
    )


def orthopoly_function(table, n):
    """``P_{alpha,n}`` as a function, derivatives from the differentiated recurrence."""
    from .orthopoly import eval_poly_derivs, eval_polys

    n = int(n)
    if n > len(table):
        raise InvalidArgument(f"degree {n} exceeds recurrence table length {len(table)}")

    def _eval(x):
        return eval_polys(table, x, n)[n]

    def deriv(j, x):
        if j > n:
            return np.zeros_like(x)
        return eval_poly_derivs(table, x, n, j)[j, n]

    return FunctionSpec(
        f"P_{table.alpha:g}_{n}",
        _eval,
        deriv,
        tags=frozenset({"polynomial"}),
        params={"degree": n},
    )


def corpus():
    """The standard corpus of test functions."""
    from .alpha2 import schwartz_lift

    members = [monomial(d) for d in range(9)]
    members += [sine(), cosine(), bump(), absolute(), abs_cubed(), sign(), exp_half_square()]
    schwartz = [
        gaussian_monomial(0, 1.5, name="schwartz_x0_b1.5"),
        gaussian_monomial(0, 2.0, name="schwartz_x0_b2"),
        gaussian_monomial(1, 2.0, name="schwartz_x1_b2"),
        gaussian_monomial(3, 3.0, name="schwartz_x3_b3"),
    ]
    members += schwartz
    members += [schwartz_lift(g) for g in schwartz]
    return members


_ALIASES = {"x3gauss": "lift(schwartz_x3_b3)"}


def get(name):
    """Look up a corpus member by name (or alias)."""
    name = _ALIASES.get(name, name)
    for f in corpus():
        if f.name == name:
            return f
    raise InvalidArgument(f"unknown corpus function {name!r}")
