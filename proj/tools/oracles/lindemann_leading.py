"""Leading term of Y = exp(z ln(1/(1-2z^2)) exp(z^3/(1-z^3))) at z = 1/sqrt(2).

Y = C Z^(-alpha) (1 + O(Z ln Z)) with Z = 1 - z sqrt(2). alpha is the coefficient of
ln(1/Z) in the exponent; C = lim Y Z^alpha, estimated at Z = 1e-60.
"""
from mpmath import mp, mpf, sqrt, exp, log

# 1 - 2z^2 cancels about 60 digits at Z = 1e-60
mp.dps = 160
s = 1 / sqrt(2)
alpha = s * exp(s**3 / (1 - s**3))
Z = mpf(10) ** -60
z = s * (1 - Z)
U = z * log(1 / (1 - 2 * z**2)) * exp(z**3 / (1 - z**3))
C = exp(U - alpha * log(1 / Z))
print("alpha", mp.nstr(alpha, 50))
print("C", mp.nstr(C, 50))
