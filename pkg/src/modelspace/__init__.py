"""Numerical toolkit for model spaces of inner functions.

Modules
-------
boundary_measures
    Closed boundary sets, Cantor gap schedules, singular measures, entropy.
inner_functions
    Blaschke products, singular inner functions, reproducing kernels.
circle_harmonics
    Circle grids, Riesz and Herglotz transforms, Toeplitz operators.
smoothing_pipeline
    Blow-up profiles, smoothing outer functions, kernel approximation.
bergman_lab
    Disc quadrature, Bergman norms, pairing identity, cyclicity.
lab_cli
    YAML-driven experiment runner.
"""

__version__ = "0.1.0"

from .boundary_measures import (  # noqa: E402
    ArcSet,
    CantorComponent,
    Family,
    GapSchedule,
    SingularMeasure,
    boundary_distance,
    decompose,
    discretize,
    entropy,
    is_beurling_carleson,
)
from .inner_functions import (  # noqa: E402
    BlaschkeProduct,
    InnerFunction,
    KernelSpec,
    SingularInner,
    factor_truncate,
    inner_derivative,
    reproducing_kernel,
)
from .circle_harmonics import (  # noqa: E402
    CircleGrid,
    GridFunction,
    decay_report,
    h2_inner,
    h2_norm,
    herglotz,
    ktheta_membership_residual,
    riesz_project,
    toeplitz_coanalytic,
)
from .smoothing_pipeline import (  # noqa: E402
    CutoffFamily,
    KernelSmoother,
    SmoothingSequence,
    approximate_kernel,
    build_profile,
    smooth_product_check,
)
from .bergman_lab import (  # noqa: E402
    DiscFunction,
    DiscQuadrature,
    cauchy_pairing_disc,
    cyclicity_curve,
    obstruction_functional,
)

__all__ = [
    "ArcSet", "CantorComponent", "Family", "GapSchedule", "SingularMeasure",
    "boundary_distance", "decompose", "discretize", "entropy", "is_beurling_carleson",
    "BlaschkeProduct", "InnerFunction", "KernelSpec", "SingularInner", "factor_truncate",
    "inner_derivative", "reproducing_kernel",
    "CircleGrid", "GridFunction", "decay_report", "h2_inner", "h2_norm", "herglotz",
    "ktheta_membership_residual", "riesz_project", "toeplitz_coanalytic",
    "CutoffFamily", "KernelSmoother", "SmoothingSequence", "approximate_kernel",
    "build_profile", "smooth_product_check",
    "DiscFunction", "DiscQuadrature", "cauchy_pairing_disc", "cyclicity_curve",
    "obstruction_functional",
]
