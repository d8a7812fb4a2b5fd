"""The alpha = 2 coefficient correspondence and the Schwartz lift.

``f(x) = x^3 exp(-2x^2)`` is the lift of ``g(x) = x^3 exp(-3x^2)``. Its
Fourier coefficients against ``exp(-2x^2)`` are computed twice: from the
orthonormal polynomials directly and from Hermite-function coefficients
of ``2^(-1/4) f(s/sqrt 2) exp(-s^2/2)``. The function is then rebuilt
from the Hermite side alone.

Run: python3 demos/hermite_correspondence.py
"""

import numpy as np

from freudapprox import alpha2, functions


def main():
    f = functions.get("x3gauss")
    rep = alpha2.coefficient_correspondence(f, 120)
    print(f"max |a_n - hermite_n|      = {rep.max_diff:.2e}")
    print(f"sum a_n^2 / ||f||^2 - 1    = {rep.parseval_left / rep.f_norm_sq - 1:.2e}")
    print(f"sum herm_n^2 / ||f||^2 - 1 = {rep.parseval_right / rep.f_norm_sq - 1:.2e}")
    x = np.linspace(-3, 3, 7)
    back = alpha2.reconstruct_from_hermite(rep.hermite, x)
    for xi, b, v in zip(x, back, f(x)):
        print(f"x = {xi:5.1f}  rebuilt {b: .12e}  exact {v: .12e}")


if __name__ == "__main__":
    main()
