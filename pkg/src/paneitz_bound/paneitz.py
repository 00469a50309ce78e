"""Paneitz coefficients, Q-curvature and the operator's action on eigenspaces.

The operator is

    P f = Delta^2 f - div((a_n R Id + b_n Ric) df) + (n - 4)/2 Q f

with Delta = div d. On a metric with parallel Ricci and constant R, Q, a joint
eigenfunction of the factor Laplacians (-Delta_i f = mu_i f) is an
eigenfunction of P with eigenvalue

    s^2 + a_n R s + b_n sum_i rho_i mu_i + (n - 4)/2 Q,   s = sum_i mu_i.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .curvature import CurvatureData


@dataclass(frozen=True)
class PaneitzCoefficients:
    n: int
    a: float
    b: float
    c: float
    d: float
    exact: tuple[Fraction, Fraction, Fraction, Fraction]
    extrapolated: bool = False

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "d": self.d,
            "exact": {k: str(v) for k, v in zip("abcd", self.exact)},
            "extrapolated": self.extrapolated,
        }


@dataclass(frozen=True)
class QValue:
    q: float
    form_a: float
    form_b: float


def exact_coefficients(n: int) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    if n <= 2:
        raise ValueError(f"Paneitz coefficients are singular for n = {n}")
    a = Fraction((n - 2) ** 2 + 4, 2 * (n - 1) * (n - 2))
    b = Fraction(-4, n - 2)
    c = Fraction(-2, (n - 2) ** 2)
    d = Fraction(n**3 - 4 * n**2 + 16 * n - 16, 8 * (n - 1) ** 2 * (n - 2) ** 2)
    return a, b, c, d


def coefficients(n: int, extrapolated: bool = False) -> PaneitzCoefficients:
    """Coefficients a_n, b_n, c_n, d_n.

    The operator is defined for n >= 5. Dimensions 3 and 4 are only returned
    when ``extrapolated`` is set, for probing outside that range.
    """
    if n <= 2:
        raise ValueError(f"Paneitz coefficients are singular for n = {n}")
    if n < 5 and not extrapolated:
        raise ValueError(f"n = {n} < 5 requires extrapolated=True")
    exact = exact_coefficients(n)
    a, b, c, d = (float(x) for x in exact)
    return PaneitzCoefficients(n, a, b, c, d, exact, extrapolated=n < 5)


def q_curvature(data: CurvatureData, coeffs: PaneitzCoefficients | None = None) -> QValue:
    """Q-curvature through both the |Ric|^2 and the traceless |E|^2 expressions."""
    n = data.n
    if coeffs is None:
        coeffs = coefficients(n)
    if coeffs.n != n:
        raise ValueError("coefficients and curvature data disagree on n")
    lap_term = data.lap_scalar / (2 * (n - 1))
    form_a = coeffs.c * data.ric_norm_sq + coeffs.d * data.scalar**2 - lap_term
    form_b = (
        (n * n - 4) / (8 * n * (n - 1) ** 2) * data.scalar**2
        - 2.0 / (n - 2) ** 2 * data.traceless_norm_sq
        - lap_term
    )
    return QValue(q=form_b, form_a=form_a, form_b=form_b)


def q_curvature_exact(n: int, ricci_spectrum: Sequence[tuple[Fraction, int]], lap_scalar=Fraction(0)):
    """Exact-rational Q from a rational Ricci spectrum; returns (form_a, form_b)."""
    a, b, c, d = exact_coefficients(n)
    R = sum(Fraction(r) * m for r, m in ricci_spectrum)
    ric_sq = sum(Fraction(r) ** 2 * m for r, m in ricci_spectrum)
    e_sq = ric_sq - R * R / n
    lap_term = Fraction(lap_scalar) / (2 * (n - 1))
    form_a = c * ric_sq + d * R * R - lap_term
    form_b = Fraction(n * n - 4, 8 * n * (n - 1) ** 2) * R * R - Fraction(2, (n - 2) ** 2) * e_sq - lap_term
    return form_a, form_b


def einstein_q(n: int, kappa) -> float:
    """Q on a space form of sectional curvature kappa: n(n^2-4) kappa^2 / 8."""
    return n * (n * n - 4) * kappa * kappa / 8


def paneitz_symbol(
    coeffs: PaneitzCoefficients,
    data: CurvatureData,
    factor_modes: Sequence[tuple[float, float]],
    q: QValue | float,
) -> float:
    """Eigenvalue of P on a joint eigenspace.

    ``factor_modes`` holds one (mu_i, rho_i) pair per factor: the factor
    Laplacian eigenvalue (nonnegative) and the Ricci eigenvalue on that factor.
    """
    if not data.parallel_ricci:
        raise ValueError("the eigenspace symbol needs parallel Ricci curvature")
    if data.lap_scalar != 0.0:
        raise ValueError("the eigenspace symbol needs constant scalar curvature")
    qv = q.q if isinstance(q, QValue) else float(q)
    s = 0.0
    ric_weighted = 0.0
    for mu, rho in factor_modes:
        if mu < 0:
            raise ValueError("Laplacian eigenvalues must be nonnegative")
        s += mu
        ric_weighted += rho * mu
    n = data.n
    return s * s + coeffs.a * data.scalar * s + coeffs.b * ric_weighted + 0.5 * (n - 4) * qv


def symbol_lower_bound(coeffs: PaneitzCoefficients, data: CurvatureData, q: QValue | float):
    """Quadratic lower bound of the symbol in the total eigenvalue s.

    Returns ``(linear, constant)`` with symbol(s) >= s^2 + linear*s + constant
    for every mode of total eigenvalue s. Valid because b_n < 0, so the Ricci
    term is smallest when all of s sits on the factor with the largest rho
    (or the smallest, if that is negative).
    """
    qv = q.q if isinstance(q, QValue) else float(q)
    rho_worst = data.ricci_max if coeffs.b < 0 else data.ricci_min
    linear = coeffs.a * data.scalar + coeffs.b * rho_worst
    return linear, 0.5 * (data.n - 4) * qv
