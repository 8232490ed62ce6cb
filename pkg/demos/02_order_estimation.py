# # Order estimation
#
# The order of U is the limit of log U divided by a normalizer: log x for the
# class M, H(x) = int_a^x L(t)/t dt for M0 and M0plus, the tail
# int_x^inf L(t)/t dt for M0minus, and int_a^x dt/b(t) for M1. The ratio is
# tabulated on a geometric grid and the limit extrapolated.

# %%
import math

from genorder import (NormalizerSpec, check_assumption, estimate_order, estimate_order_bounds,
                      estimate_order_M, estimate_order_sn, estimate_order_tail,
                      estimate_order_weighted)

# %%
est = estimate_order_weighted("(log(x))^2", "1/log(x)", math.e)
print(est.class_id, est.rho, est.limit.method)
print(est.table["ratio"][:5])

# %%
# which class a normalizer L selects
for L in ("1/log(x)", "0.5*x^0.5", "2*x^-2"):
    print(L, check_assumption(L))

# %%
print(estimate_order_weighted("exp(2*x^0.5)", "0.5*x^0.5", 1.0).rho)
print(estimate_order_tail("exp(5*x^-2)", "2*x^-2", 1.0).rho)
print(estimate_order_sn("0.5*exp(-0.5*x)", "1", 0.0).rho)

# %%
# slow convergence: the raw ratio is still near 0.55 at x = 5e12 while the
# extrapolated limit is 0
slow = estimate_order_M("exp(3*log(x)^0.5)")
print(slow.table["ratio"][-1], slow.rho, slow.limit.method)

# %%
# a ratio that oscillates has no limit, only lower and upper orders
lo, hi = estimate_order_bounds("exp(x*(2+cos(log(x))))", NormalizerSpec.sn("1", 0.0))
print(lo, hi)
print(estimate_order("exp(x*(2+cos(log(x))))", NormalizerSpec.sn("1", 0.0)).limit.converged)
