"""Root of the degree-21 elimination polynomial of the forest tree component.

Plain bisection on the printed integer coefficients; no library root finder.
"""
from mpmath import mp, mpf

COEFFS = [1, 2, 11, 10, 39, -24, 44, -216, 95, -412, 465, -438,
          678, -600, 897, 192, 1332, 176, 268, -272, 60, -4]  # z^21 down to z^0


def p(z):
    acc = mpf(0)
    for c in COEFFS:
        acc = acc * z + c
    return acc


def main():
    mp.dps = 60
    lo, hi = mpf("0.1703916"), mpf("0.1703917")
    assert p(lo) * p(hi) < 0, "no sign change in the interval"
    for _ in range(220):
        mid = (lo + hi) / 2
        if p(lo) * p(mid) <= 0:
            hi = mid
        else:
            lo = mid
    print(mp.nstr(lo, 45))


if __name__ == "__main__":
    main()
