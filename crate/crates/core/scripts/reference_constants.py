"""High-precision reference values for the density normalizer A_d and the
limit constant C_d, used to freeze the constants acceptance test.

    python3 reference_constants.py > ../tests/data/reference_constants.in
"""
from mpmath import mp, mpf, gamma, pi, factorial, sqrt

mp.dps = 40


def theta(k):
    return pi ** (mpf(k) / 2) / gamma(mpf(k) / 2 + 1)


def a_d(d, alpha, lam):
    d, alpha, lam = mpf(d), mpf(alpha), mpf(lam)
    return alpha * lam ** (d / alpha) * gamma(d / 2 + 1) / (d * pi ** (d / 2) * gamma(d / alpha))


def c_d(d, alpha):
    return mpf(alpha) * theta(d - 1) * factorial(d - 1) / 2 * (mpf(d - 1) / (2 * pi)) ** (mpf(d - 1) / 2)


if __name__ == "__main__":
    print("[")
    for d in (2, 3, 4):
        for alpha in (1, 2, 3):
            for lam in ("0.5", "1", "2"):
                a = mp.nstr(a_d(d, alpha, mpf(lam)), 32)
                c = mp.nstr(c_d(d, alpha), 32)
                print(f'({d}, {alpha}.0, {float(lam)!r}, "{a}", "{c}"),')
    print("]")
