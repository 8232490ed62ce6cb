# # Expressions
#
# Functions are written as strings in a small grammar (+ - * / ^, exp, log,
# sqrt, sin, cos, floor, the constants pi and e) and parsed into trees that
# can be evaluated on numpy arrays, differentiated, and evaluated in log scale
# far past the float range.

# %%
import numpy as np

from genorder import differentiate, evaluate, log_eval, parse, to_string

# %%
e = parse("exp(2*x^0.5 + sin(x))")
print(to_string(e))
x = np.array([1.0, 10.0, 100.0])
print(evaluate(e, x))

# %%
# symbolic derivative, checked against a central difference
de = differentiate(e)
h = 1e-6 * x
print(evaluate(de, x))
print((evaluate(e, x + h) - evaluate(e, x - h)) / (2 * h))

# %%
# exp(x^2) overflows near x = 27; log_eval returns (sign, log|value|) instead
print(evaluate(parse("exp(x^2)"), 30.0))
print(log_eval(parse("exp(x^2)"), 1e6))
