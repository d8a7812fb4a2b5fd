"""Markov constants for several Freud exponents.

For each alpha the script prints the largest basis ratio
``max_n ||P_n'|| / n^(1 - 1/alpha)`` next to the operator-norm constant of
``d/dx`` on polynomials of degree <= n, and the fitted growth exponent of
``||P_n'||``. The two constants coincide only at alpha = 2.

Run: python3 demos/markov_constants.py
"""

from freudapprox import diagnostics, orthopoly


def main():
    print(f"{'alpha':>6} {'c_hat':>9} {'c_op':>9} {'slope':>7} {'1-1/alpha':>9}")
    for alpha in (1.5, 2.0, 3.0, 4.0, 6.0):
        table = orthopoly.recurrence_table(alpha, 200)
        rule = orthopoly.gauss_freud_rule(alpha, 200)
        rep = diagnostics.markov_table(table, rule, "1..60")
        print(f"{alpha:6.1f} {rep.c_hat:9.5f} {rep.c_op:9.5f} {rep.slope:7.4f} {rep.exponent:9.4f}")


if __name__ == "__main__":
    main()
