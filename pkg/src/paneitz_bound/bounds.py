"""Both sides of the second-eigenvalue inequalities for catalog models.

Catalog integrands are constant, so every bound is evaluated per unit volume:
integrals become the integrand itself and V(M) drops out.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

from .curvature import gauss_scalar
from .spectrum import DEFAULT_MODE_BUDGET, first_eigenvalue, model_spectrum, second_eigenvalue

EQUALITY_RTOL = 1e-9
VIOLATION_RTOL = 1e-10


class ProbeWarning(UserWarning):
    """Raised for n <= 6, where the inequality is not asserted."""


@dataclass(frozen=True)
class BoundReport:
    n: int
    c: int
    lambda1: float
    lambda2: float
    rhs_theorem: float
    rhs_corollary: float
    rhs_remark31: float | None
    slack_theorem: float
    equality: bool
    n_valid: bool
    lambda1_bound: float

    @property
    def violated(self) -> bool:
        return self.n_valid and self.slack_theorem < -VIOLATION_RTOL * max(1.0, abs(self.rhs_theorem))

    @property
    def verdict(self) -> str:
        if not self.n_valid:
            return "probe"
        if self.violated:
            return "violation"
        return "equality" if self.equality else "strict"

    def as_dict(self) -> dict:
        out = asdict(self)
        if self.rhs_remark31 is None:
            del out["rhs_remark31"]
        return out


def theorem_rhs(n: int, shifted: float, q: float) -> float:
    """1/2 n(n^2-4) (|H|^2+c)^2 + (n-4)/2 Q, per unit volume."""
    return 0.5 * n * (n * n - 4) * shifted**2 + 0.5 * (n - 4) * q


def corollary_rhs(n: int, shifted: float, scalar: float) -> float:
    """Theorem bound with Q replaced through its R^2 upper estimate."""
    return 0.5 * n * (n * n - 4) * shifted**2 + (n - 4) * (n * n - 4) / (16 * n * (n - 1) ** 2) * scalar**2


def nonneg_scalar_rhs(n: int, shifted: float) -> float:
    """1/16 n(n+4)(n^2-4)(|H|^2+c)^2, valid when R >= 0."""
    return n * (n + 4) * (n * n - 4) * shifted**2 / 16


def sphere_lambda1(n: int, shifted: float) -> float:
    return n * (n - 4) * (n * n - 4) * shifted**2 / 16


def sphere_lambda2(n: int, shifted: float) -> float:
    return n * (n + 4) * (n * n - 4) * shifted**2 / 16


def _shifted(model, inv) -> float:
    return getattr(model, "shifted_mean_curv_sq", inv.shifted_mean_curv_sq)


def verify_theorem(model, count_budget: int = DEFAULT_MODE_BUDGET, distinct: bool = False) -> BoundReport:
    """Evaluate the second-eigenvalue bound, its corollary and the R >= 0 variant.

    ``count_budget`` caps the number of mode tuples the enumeration may visit.
    For n <= 6 a :class:`ProbeWarning` is issued and the report is marked
    ``n_valid = False``.
    """
    n = model.n
    n_valid = n >= 7
    if not n_valid:
        warnings.warn(f"n = {n} is outside n >= 7; reporting a probe only", ProbeWarning, stacklevel=2)
    inv = model.invariants()
    data = model.curvature()
    slices, _, _, q = model_spectrum(model, 2, count_budget, extrapolated=n < 5)
    lam1 = first_eigenvalue(slices)
    lam2 = second_eigenvalue(slices, distinct=distinct)
    shifted = _shifted(model, inv)
    rhs = theorem_rhs(n, shifted, q.q)
    rhs_cor = corollary_rhs(n, shifted, data.scalar)
    rhs_31 = nonneg_scalar_rhs(n, shifted) if data.scalar >= 0 else None
    slack = rhs - lam2
    return BoundReport(
        n=n,
        c=model.c,
        lambda1=lam1,
        lambda2=lam2,
        rhs_theorem=rhs,
        rhs_corollary=rhs_cor,
        rhs_remark31=rhs_31,
        slack_theorem=slack,
        equality=abs(slack) <= EQUALITY_RTOL * abs(rhs),
        n_valid=n_valid,
        lambda1_bound=0.5 * (n - 4) * q.q,
    )


def lambda1_mean_q_bound(model, count_budget: int = DEFAULT_MODE_BUDGET) -> tuple[float, float, bool]:
    """(lambda1, (n-4)/2 * mean Q, strict). Q is constant on the catalog, so never strict."""
    slices, _, _, q = model_spectrum(model, 1, count_budget, extrapolated=model.n < 5)
    lam1 = first_eigenvalue(slices)
    bound = 0.5 * (model.n - 4) * q.q
    strict = lam1 < bound - EQUALITY_RTOL * max(1.0, abs(bound))
    return lam1, bound, strict


def radius_from_lambda2(n: int, lambda2: float, c: int) -> float:
    """Radius of the geodesic sphere in R^{n+p}(c) with second eigenvalue ``lambda2``."""
    if not lambda2 > 0:
        raise ValueError("lambda2 must be positive")
    ratio = n * (n + 4) * (n * n - 4) / lambda2
    r0 = 0.5 * math.sqrt(math.sqrt(ratio))
    if c == 0:
        return r0
    if c == 1:
        if 1.0 < r0 <= 1.0 + 1e-12:
            r0 = 1.0  # great sphere up to roundoff
        if r0 > 1.0:
            raise ValueError(f"no geodesic sphere in the unit sphere has lambda2 = {lambda2} (r0 = {r0} > 1)")
        return math.asin(r0)
    if c == -1:
        return math.asinh(r0)
    raise ValueError(f"c must be -1, 0 or 1, got {c}")


def slack_coefficient(n: int) -> float:
    """1/2 (n+2)(n^2-8n+8): positive exactly for n >= 7 among n >= 3."""
    if n < 3:
        raise ValueError("n must be >= 3")
    return 0.5 * (n + 2) * (n * n - 8 * n + 8)


def reilly_laplace_check(model, laplace_lambda1: float | None = None) -> tuple[float, bool]:
    """Classical bound lambda1(Laplacian) <= n |H|^2 per unit volume, Euclidean ambient only.

    Returns (bound, equality). ``laplace_lambda1`` defaults to the model's
    first nonzero Laplacian eigenvalue.
    """
    if model.c != 0:
        raise ValueError("the Laplacian bound is implemented for Euclidean ambients only")
    inv = model.invariants()
    if laplace_lambda1 is None:
        laplace_lambda1 = min(f.level(1)[0] for f in model.spectrum_source().factors)
    bound = model.n * inv.mean_curv_sq
    return bound, abs(bound - laplace_lambda1) <= EQUALITY_RTOL * bound


def gauss_consistency(model) -> float:
    """Relative gap between intrinsic R and the Gauss-equation R."""
    R_int = model.curvature().scalar
    R_ext = gauss_scalar(model.invariants())
    return abs(R_int - R_ext) / max(1.0, abs(R_int))
