"""Rapid-approximability verdicts across the function corpus at alpha = 2.

Each compatible corpus member is expanded to N1 = 40 and N2 = 80
coefficients; ``s_k(N) = max_{n <= N} n^k |a_n|`` is compared between the
two truncations for k <= 6.

Run: python3 demos/rapid_classification.py
"""

from freudapprox import diagnostics, functions, orthopoly
from freudapprox.expansion import fourier_coefficients


def main(alpha=2.0, N1=40, N2=80, k_max=6):
    table = orthopoly.recurrence_table(alpha, N2)
    for f in functions.corpus():
        if not f.compatible(alpha):
            continue
        rep = diagnostics.classify_rapid(
            fourier_coefficients(f, table, N1), fourier_coefficients(f, table, N2), k_max
        )
        k, s1, s2, _, i2 = rep.k_rows[-1]
        print(f"{f.name:24s} {rep.verdict:13s} s_{k}: {s1:10.3e} -> {s2:10.3e} (argmax {i2})")


if __name__ == "__main__":
    main()
