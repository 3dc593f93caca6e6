# Reference values of C_n(alpha, k) = (-1)^k d^k/dalpha^k Gamma(n-alpha)/(Gamma(-alpha)Gamma(n+1)),
# by numerical differentiation of mpmath's Gamma functions, plus series coefficients.
from mpmath import mp, mpf, mpc, rgamma, gamma, diff, sinh, pi, sqrt, log, arg, taylor, exp
import sympy as sp

mp.dps = 60


def cn(n, alpha, k):
    f = lambda a: gamma(n - a) * rgamma(-a) * rgamma(n + 1)
    return (-1) ** k * diff(f, alpha, k)


for n, a, k in [(4, mpf(1) / 2, 0), (10, mpf(2), 1), (50, mpc("0.3", "0.7"), 2), (20, mpc(0, -1), 0),
                (30, mpf("1.2218236899108796729628937556"), 1), (7, mpf(-1), 3)]:
    print("cn", n, a, k, mp.nstr(cn(n, a, k), 40))

print("rgamma(i)", mp.nstr(rgamma(mpc(0, 1)), 40))
print("rgamma(-2.5)", mp.nstr(rgamma(mpf("-2.5")), 40))

x = sp.symbols("x")
print("[x^4](1-x)^(1/2)", sp.series(sp.sqrt(1 - x), x, 0, 5).removeO().coeff(x, 4))
print("[x^4](1-x)^(3/2) ln(1/(1-x))",
      sp.series((1 - x) ** sp.Rational(3, 2) * sp.log(1 / (1 - x)), x, 0, 5).removeO().coeff(x, 4))
print("[x^5](1-x)^(3/2) ln(1/(1-x))",
      sp.nsimplify(sp.series((1 - x) ** sp.Rational(3, 2) * sp.log(1 / (1 - x)), x, 0, 6).removeO().coeff(x, 5)))

# Set(Z*Cyc(Z^4)): leading oscillation of the coefficients
print("amplitude", mp.nstr(2 * sqrt(sinh(pi) / pi), 30))
print("phi", mp.nstr(2 * log(2) + arg(gamma(mpc(0, 1))), 30))
