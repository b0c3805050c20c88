"""Positive linear operators acting on functions with jumps.

Bernstein polynomials and symmetric exponential convolution operators,
explicit error bounds in terms of a local first modulus of continuity,
exact checks of those bounds, and total-variation competitors.
"""

from .bounds import (
    BoundReport,
    Decomposition,
    a_n,
    b_n,
    bojanic_cheng_bound,
    cn_beta,
    corollary10_bound,
    corollary11_bound,
    kn_sandwich,
    lemma2_bounds,
    modulus_vs_tv_gap,
    theorem3_bound,
    theorem4_bound,
    theorem5_decomposition,
    zeng_bound,
    zeng_report,
)
from .funcspace import (
    JumpTriple,
    PiecewiseFunction,
    associated_g,
    e_n_indicator,
    limits_at,
    load_function,
    local_modulus,
    primitive_phi,
    total_variation,
)
from .operators import (
    DiscreteOperator,
    bernstein_apply,
    bernstein_operator,
    convolution_apply,
    discrete_apply,
    discrete_expected_modulus,
)
from .probkit import (
    DiscreteLaw,
    ExpLaw,
    ModulusProfile,
    binom_abs_mgf,
    binom_mad,
    binom_pmf,
    binom_sign_probs,
    binom_z_law,
    exp_expectation,
    exp_expectation_primitive,
    stirling_bounds,
)
from .verify import (
    SweepResult,
    SymmetricSpec,
    check_prop2,
    check_theorem6_a,
    check_theorem6_b,
    load_corpus,
    validity_sweep,
)

__version__ = "0.1.0"
