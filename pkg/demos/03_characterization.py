# # Characterization and representation
#
# Membership with order rho is equivalent to exp((rho - eps) H) <= U <=
# exp((rho + eps) H) eventually, for every eps > 0. locate_sandwich finds the
# point after which the two bounds hold. The representation log U =
# (rho + eps(x)) H(x) exposes the vanishing correction eps.

# %%
import math

import numpy as np

from genorder import NormalizerSpec, characterize, decompose_representation, locate_sandwich
from genorder.suites import eps_set

# %%
norm = NormalizerSpec.weighted("1/log(x)", math.e)
for eps in eps_set(2.0):
    v = characterize("(log(x))^2", norm, 2.0, eps)
    print(eps, v.member, v.x_epsilon)

# %%
# a perturbed exponent, the sine term is absorbed beyond x_eps
norm = NormalizerSpec.weighted("0.5*x^0.5", 1.0)
print(locate_sandwich("exp(2*x^0.5 + sin(x))", norm, 2.0, 0.1))
print(locate_sandwich("exp(2*x^0.5 + sin(x))", norm, 2.0, 0.1, samples_per_panel=0))

# %%
rep = decompose_representation("exp(3*(log(x))^0.5)", "0.5*(log(x))^-0.5", 1.0, 3.0)
print(np.abs(rep.eps[-5:]))
print(rep.alpha_ratio_limit.value)
