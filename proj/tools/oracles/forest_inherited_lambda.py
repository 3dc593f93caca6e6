"""Perron root of the tree block [[0,2B Tg,0],[0,0,2G Tr],[2R Tb,0,0]] at z = 0.2462661.

Values by plain fixed-point iteration of the generating-function equations.
"""
from mpmath import mp, mpf, sqrt, cbrt


def main():
    mp.dps = 40
    z = mpf("0.2462661")
    b = r = mpf(0)
    for _ in range(2000000):
        b2, r2 = z / (1 - r), z**3 + z / (1 - b)
        done = abs(b2 - b) + abs(r2 - r) < mpf(10) ** -30
        b, r = b2, r2
        if done:
            break
    g = (1 - sqrt(1 - 4 * z)) / 2
    tr = tb = tg = mpf(0)
    for _ in range(10000):
        tr, tb, tg = z + r * tb**2, b * tg**2, g * tr**2
    # the block is a 3-cycle, so the Perron root is the cube root of the cycle product
    print(mp.nstr(cbrt(8 * r * b * g * tr * tb * tg), 12))


if __name__ == "__main__":
    main()
