# Exact y_n for Y = exp(z ln(1/(1-z^4))) against the two-term oscillatory formula
# y_n ~ 1/4 + (A cos(pi n/2 - ln n + phi) - 1/4)/n, A = 2 sqrt(sinh(pi)/pi), phi = 2 ln 2 + arg Gamma(i).
from mpmath import mp, mpf, sqrt, sinh, pi, log, cos, arg, gamma, mpc, taylor, exp

mp.dps = 50
N = 100
y = taylor(lambda z: exp(z * log(1 / (1 - z**4))), 0, N)
A = 2 * sqrt(sinh(pi) / pi)
phi = 2 * log(2) + arg(gamma(mpc(0, 1)))
worst = 0
for n in range(50, N + 1):
    f = mpf(1) / 4 + (A * cos(pi * n / 2 - log(n) + phi) - mpf(1) / 4) / n
    env = mpf(1) / 4 + (A + mpf(1) / 4) / n
    r = abs(y[n] - f) / env
    worst = max(worst, r)
    if n in (50, 51, 75, 100):
        print(n, mp.nstr(y[n], 20), mp.nstr(r, 6))
print("worst", mp.nstr(worst, 6))
