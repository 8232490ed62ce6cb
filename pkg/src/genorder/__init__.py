"""Orders of positive functions at infinity.

The order of ``U`` is the limit of ``log U(x)`` divided by a normalizer:
``log x`` (class M), ``int_a^x L(t)/t dt`` (M0, M0plus), the tail
``int_x^inf L(t)/t dt`` (M0minus) or ``int_a^x 1/b(t) dt`` (M1). The
package estimates these limits numerically and checks the statements that
come with them: two-sided bounds, representations, Karamata and Laplace
transforms, Gamma(b) membership, integrals and inverses.
"""

__version__ = "0.1.0"

from .classes import (AssumptionVerdict, ClassVerdict, OrderEstimate, RepresentationDecomposition,
                      algebra_orders, characterize, check_assumption, check_derivative_criterion,
                      check_m0minus_ratio, composition_order, decompose_representation,
                      decompose_representation_tail, estimate_order, estimate_order_bounds,
                      estimate_order_M, estimate_order_sn, estimate_order_tail,
                      estimate_order_weighted, locate_sandwich, log_derivative_order,
                      sequence_order)
from .expr import differentiate, evaluate, log_eval, parse, to_string
from .functions import Normalizer, NormalizerKind, NormalizerSpec, PositiveFunction
from .inverse import InverseFn, inverse_order_check, numeric_inverse
from .karamata import (GammaVerdict, WAnalysis, analyze_W, gamma_integral_equivalence,
                       gamma_ratio_check, integrate_and_classify, is_self_neglecting,
                       karamata_transform, verify_karamata_preservation)
from .laplace import LaplaceResult, laplace_transform, tauberian_order_check
from .numerics import (Grid, LimitEstimate, QuadConfig, extrapolate_limit, integrate_finite,
                       integrate_to_infinity)
