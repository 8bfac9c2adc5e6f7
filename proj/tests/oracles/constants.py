# Copyright 2026 The helm Authors
# SPDX-License-Identifier: Apache-2.0
"""Reference values for the computable constants, evaluated with mpmath.

The numbers printed here are frozen into tests/test_bounds.cpp and
tests/test_estimator.cpp; rerun after changing any formula.
"""

from mpmath import mp, mpf, sqrt, pi

mp.dps = 30


def theta_tilde_1(t):
    s = mpf(1) / 2 + sqrt(mpf(1) / 4 + t * t)
    return sqrt(s + s * s + t * t) - sqrt(2)


def theta_tilde_2(t, tt):
    s = mpf(1) / 2 + sqrt(mpf(1) / 4 + t * t)
    return sqrt(s * s + t * t + tt * tt) - 1


def c_up(t):
    return sqrt(2) + theta_tilde_1(t)


def main():
    c_stab = (3 + sqrt(2)) / (2 * sqrt(2))
    h_omega = 2 * sqrt(2)
    c_i = mpf("0.493") / sqrt(2)
    print("c_stab", c_stab)
    for m in (2, 10):
        k = m * pi
        a = 1 + c_stab * k * h_omega
        bound = sqrt(a + a * a)
        print(f"case1a k={m}pi A", a, "bound", bound, "c_up", c_up(bound))
    for n in (8, 16, 32, 64, 128):
        k = pi
        h = h_omega / n
        c_ba = c_i * (2 + c_stab * k * h_omega) * k * h
        print(f"case1b k=pi n={n} c_ba", c_ba, "c_up", c_up(c_ba))
    # Case 2a on (-1,1)^2 with k = 1.
    k = mpf(1)
    lams = sorted(pi**2 * (i * i + j * j) / 4 for i in range(1, 51) for j in range(1, 51))
    print("case2a", max(k * sqrt(l) / abs(l - k * k) for l in lams))
    print("case2b", c_i * (1 + k * k / min(abs(l - k * k) for l in lams)) * k * mpf("0.25"))
    # Trace constant, right isosceles triangle, one absorbing edge.
    legs = mpf(1)
    hyp = sqrt(2)
    rho = legs * legs / (2 * legs + hyp)
    print("c_tr", sqrt(3 / (4 * pi) * (1 + 1 / pi) * (hyp / rho) ** 2))
    print("theta_tilde_2(1,2)", theta_tilde_2(mpf(1), mpf(2)))
    print("theta_tilde_1(1)", theta_tilde_1(mpf(1)))
    print("norm", [sqrt(8 * (m * pi) ** 2 + 8 * m * pi) for m in (1, 4, 10)])


if __name__ == "__main__":
    main()
