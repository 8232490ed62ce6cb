# # Laplace transform and the Tauberian order check
#
# The Laplace-Stieltjes transform is computed in log scale, so very large
# values of U_hat(s) = int exp(-t) U(t/s) dt stay representable. The order of
# U_hat(1/x) in the same class matches the order of U.

# %%
import math

import numpy as np
from scipy import special

from genorder import laplace_transform, tauberian_order_check

# %%
r = laplace_transform("log(1+x)", 1.0)
print(r.value, math.e * special.exp1(1.0))

# %%
# Laplace-method asymptotics for exp(sqrt(x)) as s -> 0
for s in (1e-2, 1e-3, 1e-4):
    r = laplace_transform("exp(x^0.5)", s)
    print(s, r.log_value, 1 / (4 * s) + 0.5 * np.log(np.pi / s))

# %%
v = tauberian_order_check("(log(1+x))^2", "1/log(x)", math.e, 2.0)
print(v.member, v.order.rho)
# U = x is regularly varying, the ratio does not converge
v = tauberian_order_check("x", "1/log(x)", math.e, 1.0)
print(v.member, v.order.converged)
