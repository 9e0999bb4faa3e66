"""Granger causality inference for Gaussian signals observed through quantizers."""

__version__ = "0.1.0"

from .bounds import (
    HighresBound,
    MidtreadBounds,
    PerturbationBounds,
    PriorBounds,
    SufficientDecision,
    highres_epsilon_norm_bound,
    highres_sufficient_test,
    midtread_bounds,
    midtread_sufficient_test,
    nonuniform_norm_bounds,
    nonuniform_sufficient_test,
    riemann_zeta,
    s_bounds_analytic,
    s_bounds_grid,
)
from .causality import (
    BinaryDecision,
    CausalityMatrix,
    GaussianBlocks,
    binary_causality_test,
    build_binary_R,
    build_causality_matrix,
    conditional_distance_lower_bound,
    conditional_equality_rank,
    conditional_mean_distance,
    numeric_rank,
    phi_factor,
    smallest_singular_value,
)
from .gausslink import (
    GaussPair,
    binary_true_moments,
    midtread_cross_cov,
    midtread_true_moments,
    midtread_variance,
    quantized_cross_cov,
    quantized_true_moments,
    quantized_variance,
    std_normal_cdf,
    vanvleck_forward,
    vanvleck_invert,
)
from .moments import LaggedMoments, estimate_cross_cov, estimate_moments
from .quantize import (
    BinaryQuantizer,
    FiniteQuantizer,
    QuantizerSpec,
    UniformQuantizer,
    make_saturated_uniform,
    quantize_series,
)
from .report import DecisionReport, QRecord, Verdict
from .signals import (
    SeriesPair,
    TrueMoments,
    VarModel,
    coupled_ar2_example,
    simulate_var,
    stationary_covariances,
)
