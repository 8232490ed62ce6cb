# # Karamata transforms, self-neglecting functions and Gamma-variation
#
# The transform int_a^x t^alpha U(t) dt / (x^(alpha+1) U(x)) keeps U in its
# class. Self-neglecting b and Gamma-variation U(x + y b(x)) / U(x) ->
# exp(+-y) are checked on a grid of y.

# %%
import math

from genorder import (NormalizerSpec, analyze_W, gamma_ratio_check, integrate_and_classify,
                      is_self_neglecting, karamata_transform, verify_karamata_preservation)
from genorder.errors import AlphaMinusOne

# %%
for alpha in (-3.0, 0.0, 2.5):
    v = verify_karamata_preservation("(log(x))^2", "1/log(x)", math.e, alpha, rho=2.0)
    print(alpha, v.member, v.order.rho)
try:
    karamata_transform("(log(x))^2", -1.0, 1.0, 10.0)
except AlphaMinusOne as exc:
    print("rejected:", exc)

# %%
for b in ("1", "x/log(x)", "x"):
    print(b, is_self_neglecting(b).passed)

# %%
g = gamma_ratio_check("exp(-x^2/2)", "1/x", "gamma_minus")
print(g.passed, max(g.errors().values()))
print(gamma_ratio_check("exp(floor(x)*log(x))", "1/log(x)").passed)

# %%
# integrating U in M0plus(L, rho) with W = int 1/L
w = analyze_W("0.5*x^0.5")
print(w.regime, w.alpha)
v = integrate_and_classify("exp(2*x^0.5)", NormalizerSpec.weighted("0.5*x^0.5", 1.0), 2.0)
print(v.member, v.order.rho, v.details["ratio_limit"].value)
