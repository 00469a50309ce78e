"""Intrinsic and extrinsic curvature packages and the Gauss-equation algebra.

All quantities are carried in absolute units. Per-unit-volume normalization
is done by the bound checker, never here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

UMBILIC_RTOL = 1e-10


@dataclass(frozen=True)
class SpaceFormTag:
    """Ambient space form of curvature ``c`` and dimension ``ambient_dim``."""

    c: int
    ambient_dim: int

    def __post_init__(self):
        if self.c not in (-1, 0, 1):
            raise ValueError(f"ambient curvature must be -1, 0 or 1, got {self.c}")
        if self.ambient_dim < 2:
            raise ValueError("ambient dimension must be at least 2")

    def admits(self, n: int) -> bool:
        return self.ambient_dim > n


@dataclass(frozen=True)
class ImmersionInvariants:
    """Extrinsic data of an immersion M^n -> R^{n+p}(c).

    ``mean_curv_sq`` is |H|^2 and ``second_ff_sq`` is |h|^2, both measured in
    the space form itself (for c = 1 that is the sphere, not R^{n+p+1}).
    """

    n: int
    mean_curv_sq: float
    second_ff_sq: float
    c: int
    volume: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("intrinsic dimension must be >= 2")
        if self.c not in (-1, 0, 1):
            raise ValueError(f"ambient curvature must be -1, 0 or 1, got {self.c}")
        if self.mean_curv_sq < 0 or self.second_ff_sq < 0:
            raise ValueError("|H|^2 and |h|^2 must be nonnegative")
        if self.volume <= 0:
            raise ValueError("volume must be positive")
        # Cauchy-Schwarz on the trace of h, with roundoff headroom
        slack = self.second_ff_sq - self.n * self.mean_curv_sq
        if slack < -UMBILIC_RTOL * max(1.0, self.n * self.mean_curv_sq):
            raise ValueError(f"|h|^2 < n|H|^2 by {-slack:.3e}")

    @property
    def shifted_mean_curv_sq(self) -> float:
        """|H|^2 + c, the quantity every bound is phrased in."""
        return self.mean_curv_sq + self.c

    @property
    def umbilicity_defect(self) -> float:
        """|h|^2 - n|H|^2 (zero iff totally umbilical)."""
        return self.second_ff_sq - self.n * self.mean_curv_sq

    @property
    def is_umbilic(self) -> bool:
        return self.umbilicity_defect <= UMBILIC_RTOL * max(1.0, self.n * self.mean_curv_sq)


@dataclass(frozen=True)
class CurvatureData:
    """Curvature of a metric with parallel, simultaneously diagonal Ricci.

    ``ricci_spectrum`` lists (eigenvalue, multiplicity) pairs. The derived
    norms are computed from it in :meth:`from_ricci`; constructing directly
    checks the stored values for consistency.
    """

    n: int
    scalar: float
    ricci_spectrum: tuple[tuple[float, int], ...]
    ric_norm_sq: float
    traceless_norm_sq: float
    lap_scalar: float = 0.0
    parallel_ricci: bool = True

    def __post_init__(self):
        if sum(m for _, m in self.ricci_spectrum) != self.n:
            raise ValueError("Ricci multiplicities must sum to n")
        if any(m < 1 for _, m in self.ricci_spectrum):
            raise ValueError("Ricci multiplicities must be positive")
        scale = max(1.0, sum(abs(r) * m for r, m in self.ricci_spectrum))
        if abs(sum(r * m for r, m in self.ricci_spectrum) - self.scalar) > 1e-12 * scale:
            raise ValueError("scalar curvature is not the Ricci trace")
        if abs(sum(r * r * m for r, m in self.ricci_spectrum) - self.ric_norm_sq) > 1e-12 * scale**2:
            raise ValueError("|Ric|^2 inconsistent with the Ricci spectrum")
        if self.traceless_norm_sq < 0:
            raise ValueError("|E|^2 must be nonnegative")

    @classmethod
    def from_ricci(cls, n, spectrum, lap_scalar=0.0, parallel_ricci=True) -> "CurvatureData":
        spectrum = tuple((float(r), int(m)) for r, m in spectrum)
        scalar = sum(r * m for r, m in spectrum)
        ric_sq = sum(r * r * m for r, m in spectrum)
        # |E|^2 = sum m_i (rho_i - R/n)^2, the cancellation-free form
        if len({r for r, _ in spectrum}) == 1:
            traceless = 0.0
        else:
            mean = scalar / n
            traceless = sum(m * (r - mean) ** 2 for r, m in spectrum)
        return cls(n, scalar, spectrum, ric_sq, traceless, float(lap_scalar), parallel_ricci)

    @property
    def ricci_max(self) -> float:
        return max(r for r, _ in self.ricci_spectrum)

    @property
    def ricci_min(self) -> float:
        return min(r for r, _ in self.ricci_spectrum)

    @property
    def is_einstein(self) -> bool:
        return self.traceless_norm_sq <= 1e-24 * max(1.0, self.ric_norm_sq)


def gauss_scalar(inv: ImmersionInvariants) -> float:
    """Scalar curvature from the Gauss equation.

    R = n(n-1)(|H|^2 + c) - (|h|^2 - n|H|^2)
    """
    n = inv.n
    return n * (n - 1) * inv.shifted_mean_curv_sq - inv.umbilicity_defect


def scalar_upper_bound(inv: ImmersionInvariants) -> tuple[float, bool]:
    """Return ``(n(n-1)(|H|^2+c), is_equality)``; equality iff umbilic."""
    n = inv.n
    return n * (n - 1) * inv.shifted_mean_curv_sq, inv.is_umbilic


def einstein_curvature(n: int, kappa: float) -> CurvatureData:
    """Curvature of a space form of dimension ``n`` and sectional curvature ``kappa``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    rho = (n - 1) * kappa
    return CurvatureData(
        n=n,
        scalar=n * rho,
        ricci_spectrum=((rho, n),),
        ric_norm_sq=n * rho * rho,
        traceless_norm_sq=0.0,
        lap_scalar=0.0,
        parallel_ricci=True,
    )
