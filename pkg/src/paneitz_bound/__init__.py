"""Numerical verification of the second-eigenvalue bound for Paneitz operators
of submanifolds in space forms."""

from .bounds import (
    BoundReport,
    ProbeWarning,
    lambda1_mean_q_bound,
    radius_from_lambda2,
    reilly_laplace_check,
    slack_coefficient,
    verify_theorem,
)
from .conformal import CenteringError, CenteringResult, MobiusParam, center_measure, mobius_apply
from .curvature import (
    CurvatureData,
    ImmersionInvariants,
    SpaceFormTag,
    einstein_curvature,
    gauss_scalar,
    scalar_upper_bound,
)
from .models import FlatTorus, GeodesicSphere, ProductSphere
from .paneitz import PaneitzCoefficients, QValue, coefficients, paneitz_symbol, q_curvature
from .spectrum import (
    CertificateError,
    EnumerationCertificate,
    SpectrumSlice,
    enumerate_spectrum,
    flat_torus_grid_oracle,
    second_eigenvalue,
)

__version__ = "0.1.0"
