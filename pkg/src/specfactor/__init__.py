"""Residual-spectrum estimation of factor count and noise shape.

The package fits a latent factor model R = L F + U by singular value
truncation, then matches the eigenvalue distribution of the residual
covariance against a one-parameter family of product laws.  The best
(p, phi) pair under Jensen-Shannon divergence is the estimate.
"""
from .errors import (
    DataError,
    GridMismatchError,
    NumericalError,
    SpecfactorError,
    ZeroVarianceRowError,
)
from .estimator import EstimationResult, EstimatorConfig, divergence_surface, estimate
from .product_law import (
    GreenValue,
    ModelDensityParams,
    green_function,
    green_line,
    model_density,
    model_moment,
    s_transform_component,
    s_transform_product,
    support_edges,
)
from .residuals import (
    factor_fit,
    residual,
    residual_covariance,
    residual_esd,
    residual_spectrum,
    standardize_rows,
)
from .spectra import (
    BinningPolicy,
    SpectralDensity,
    as_spectrum,
    density_moment,
    esd,
    js_divergence,
    mp_density_on_grid,
    mp_pdf,
    stieltjes_of_density,
)
from .synthetic import (
    ScenarioConfig,
    SyntheticConfig,
    generate_factor_data,
    generate_iid_check_data,
    generate_scenario,
    sample_wishart_product,
)
from .windows import WindowConfig, WindowEntry, WindowSeries, sliding_estimates

__version__ = "0.1.0"

__all__ = [
    "BinningPolicy",
    "DataError",
    "EstimationResult",
    "EstimatorConfig",
    "GreenValue",
    "GridMismatchError",
    "ModelDensityParams",
    "NumericalError",
    "ScenarioConfig",
    "SpecfactorError",
    "SpectralDensity",
    "SyntheticConfig",
    "WindowConfig",
    "WindowEntry",
    "WindowSeries",
    "ZeroVarianceRowError",
    "as_spectrum",
    "density_moment",
    "divergence_surface",
    "esd",
    "estimate",
    "factor_fit",
    "generate_factor_data",
    "generate_iid_check_data",
    "generate_scenario",
    "green_function",
    "green_line",
    "js_divergence",
    "model_density",
    "model_moment",
    "mp_density_on_grid",
    "mp_pdf",
    "residual",
    "residual_covariance",
    "residual_esd",
    "residual_spectrum",
    "s_transform_component",
    "s_transform_product",
    "sample_wishart_product",
    "sliding_estimates",
    "standardize_rows",
    "stieltjes_of_density",
    "support_edges",
]
