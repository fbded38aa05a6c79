"""Diversity spectra of spatial multipath fading over planar apertures.

Compute the eigenvalue spectrum of the spatial autocorrelation operator of
a fading field restricted to a curve, region, line set, or discrete array
in the plane, for an arbitrary power azimuth spectrum, together with
certified truncation error bounds and the resulting diversity measure.
"""

from .specfun import (
    BesselOrderRange,
    bessel_abs_tail,
    bessel_abs_tail_bound,
    bessel_i_ratio,
    bessel_j,
    bessel_j_orders,
    bessel_sq_tail,
    bessel_sq_tail_bound,
    truncation_order,
)
from .pas import (
    DopplerSpec,
    IsotropicPas,
    PasModel,
    TabulatedPas,
    UniformPas,
    VonMisesPas,
    doppler_spectrum,
    time_acf,
    wrap_angle,
)
from .aperture import (
    ArcPiece,
    Circle,
    DiscreteArray,
    Disk,
    LinePiece,
    ParallelLines,
    PiecewiseCurve,
    QuadratureRule,
    Rectangle,
    Segment,
    UnsupportedApertureError,
    build_quadrature,
    centering_transform,
    enclosing_radius,
    smallest_enclosing_circle,
    translate,
)
from .operators import (
    QuadratureConvergenceError,
    TruncatedOperator,
    basis_matrix,
    basis_v,
    build_truncated_operator,
    gram_matrix,
    rho_n_kernel,
    rtilde_matrix,
)
from .spectrum import (
    BoundTooLooseError,
    DiscreteDiversityReport,
    DiversitySpectrum,
    ExcessiveClampError,
    OracleConvergenceError,
    discrete_correlation,
    discrete_diversity,
    discrete_report,
    diversity_measure,
    mimo_slope,
    nystrom_oracle,
    omega_corrected,
    solve_spectrum,
)

__version__ = "0.1.0"
