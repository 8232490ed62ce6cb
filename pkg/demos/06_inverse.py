# # Inverse functions
#
# For increasing U in M1(b) with order rho > 0 the inverse V is found by
# bracketing and bisection in log scale, and its order is 1/rho.

# %%
import numpy as np

from genorder import InverseFn, PositiveFunction, inverse_order_check, numeric_inverse

# %%
inv = InverseFn("exp(2*x)", 10.0)
x = np.linspace(10.0, 300.0, 5)
log_y = PositiveFunction("exp(2*x)").log(x)
print(numeric_inverse(inv, log_y=log_y) - x)

# %%
v = inverse_order_check("exp(2*x)", "1", 2.0)
print(v.member, v.order.rho)
