"""Closed-form model submanifolds of space forms.

Each model exports its extrinsic invariants, intrinsic curvature, and the
Laplacian spectra of its Riemannian factors, which is everything the
eigenspace symbol needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .curvature import CurvatureData, ImmersionInvariants, einstein_curvature

NORMALIZATION_TOL = 1e-14


def unit_sphere_volume(n: int) -> float:
    """Volume of the round unit n-sphere."""
    return 2 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)


def sphere_multiplicity(k: int, dim: int) -> int:
    """Dimension of degree-k spherical harmonics on S^dim.

    Hook-count difference C(dim+k, dim) - C(dim+k-2, dim); for dim = 1 this
    gives 1 at k = 0 and 2 afterwards.
    """
    if k < 0:
        raise ValueError("level must be nonnegative")
    lower = math.comb(dim + k - 2, dim) if k >= 2 else 0
    return math.comb(dim + k, dim) - lower


@dataclass(frozen=True)
class SphereFactor:
    """Round S^dim(radius) as a Riemannian factor; dim = 1 is a circle."""

    dim: int
    radius: float

    @property
    def ricci(self) -> float:
        return (self.dim - 1) / self.radius**2

    def level(self, k: int) -> tuple[float, int]:
        return k * (k + self.dim - 1) / self.radius**2, sphere_multiplicity(k, self.dim)

    def levels_upto(self, cutoff: float):
        """Yield (k, mu_k, m_k) for every level with mu_k <= cutoff."""
        k = 0
        while True:
            mu, m = self.level(k)
            if mu > cutoff:
                return
            yield k, mu, m
            k += 1


@dataclass(frozen=True)
class SpectrumSource:
    factors: tuple[SphereFactor, ...]

    def __post_init__(self):
        if not self.factors:
            raise ValueError("need at least one factor")


@dataclass(frozen=True)
class GeodesicSphere:
    """Geodesic sphere of radius r in R^{n+p}(c).

    For c = 0 the radius is Euclidean; for c = +-1 it is the geodesic radius
    in the sphere or hyperbolic space.
    """

    n: int
    p: int
    c: int
    r: float

    kind = "sphere"

    def __post_init__(self):
        if self.n < 2 or self.p < 1:
            raise ValueError("need n >= 2 and codimension p >= 1")
        if self.c not in (-1, 0, 1):
            raise ValueError(f"c must be -1, 0 or 1, got {self.c}")
        if not self.r > 0:
            raise ValueError("radius must be positive")
        if self.c == 1 and self.r > math.pi / 2:
            raise ValueError("geodesic spheres in the unit sphere need r <= pi/2")

    @property
    def mean_curv_sq(self) -> float:
        if self.c == 0:
            return 1.0 / self.r**2
        if self.c == 1:
            return 1.0 / math.tan(self.r) ** 2
        return 1.0 / math.tanh(self.r) ** 2

    @property
    def intrinsic_radius(self) -> float:
        """Radius of the induced round metric; 1/rho^2 = |H|^2 + c."""
        if self.c == 0:
            return self.r
        if self.c == 1:
            return math.sin(self.r)
        return math.sinh(self.r)

    @property
    def shifted_mean_curv_sq(self) -> float:
        # evaluated as 1/rho^2, free of the cancellation in coth^2 - 1
        return 1.0 / self.intrinsic_radius**2

    def invariants(self) -> ImmersionInvariants:
        h2 = self.mean_curv_sq
        vol = self.intrinsic_radius**self.n * unit_sphere_volume(self.n)
        return ImmersionInvariants(self.n, h2, self.n * h2, self.c, vol)

    def curvature(self) -> CurvatureData:
        return einstein_curvature(self.n, self.shifted_mean_curv_sq)

    def spectrum_source(self) -> SpectrumSource:
        return SpectrumSource((SphereFactor(self.n, self.intrinsic_radius),))

    def describe(self) -> dict:
        return {"model": self.kind, "n": self.n, "p": self.p, "c": self.c, "r": self.r}


@dataclass(frozen=True)
class ProductSphere:
    """S^a(r1) x S^b(r2) inside the unit sphere S^{a+b+1}, r1^2 + r2^2 = 1."""

    a: int
    b: int
    r1: float
    r2: float

    kind = "product"
    c = 1
    p = 1

    def __post_init__(self):
        if self.a < 1 or self.b < 1:
            raise ValueError("factor dimensions must be >= 1")
        if not (0 < self.r1 < 1 and 0 < self.r2 < 1):
            raise ValueError("radii must lie in (0, 1)")
        if abs(self.r1**2 + self.r2**2 - 1) > NORMALIZATION_TOL:
            raise ValueError("need r1^2 + r2^2 = 1")

    @classmethod
    def from_r1(cls, a: int, b: int, r1: float) -> "ProductSphere":
        return cls(a, b, r1, math.sqrt((1 - r1) * (1 + r1)))

    @classmethod
    def minimal(cls, a: int, b: int) -> "ProductSphere":
        """The minimal (Clifford-type) product, r1^2 = a/n."""
        n = a + b
        return cls(a, b, math.sqrt(a / n), math.sqrt(b / n))

    @property
    def n(self) -> int:
        return self.a + self.b

    def principal_curvatures(self) -> tuple[tuple[float, int], tuple[float, int]]:
        return (self.r2 / self.r1, self.a), (-self.r1 / self.r2, self.b)

    @property
    def shifted_mean_curv_sq(self) -> float:
        return self.invariants().mean_curv_sq + 1

    def invariants(self) -> ImmersionInvariants:
        (k1, a), (k2, b) = self.principal_curvatures()
        trace = a * k1 + b * k2
        h2 = a * k1 * k1 + b * k2 * k2
        vol = (
            self.r1**self.a * unit_sphere_volume(self.a)
            * self.r2**self.b * unit_sphere_volume(self.b)
        )
        return ImmersionInvariants(self.n, (trace / self.n) ** 2, h2, 1, vol)

    def curvature(self) -> CurvatureData:
        spectrum = [((self.a - 1) / self.r1**2, self.a), ((self.b - 1) / self.r2**2, self.b)]
        return CurvatureData.from_ricci(self.n, spectrum)

    def spectrum_source(self) -> SpectrumSource:
        return SpectrumSource((SphereFactor(self.a, self.r1), SphereFactor(self.b, self.r2)))

    def describe(self) -> dict:
        return {"model": self.kind, "n": self.n, "a": self.a, "b": self.b, "r1": self.r1, "r2": self.r2}


@dataclass(frozen=True)
class FlatTorus:
    """Product of circles of radii r_i in S^{2n-1}(1), sum r_i^2 = 1."""

    radii: tuple[float, ...]

    kind = "torus"
    c = 1

    def __post_init__(self):
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        if len(self.radii) < 2 or any(not 0 < r < 1 for r in self.radii):
            raise ValueError("need at least two circles with radii in (0, 1)")
        if abs(math.fsum(r * r for r in self.radii) - 1) > NORMALIZATION_TOL:
            raise ValueError("need sum of squared radii = 1")

    @classmethod
    def normalized(cls, weights) -> "FlatTorus":
        """Rescale positive ``weights`` onto the unit sphere."""
        weights = [float(w) for w in weights]
        if any(w <= 0 for w in weights):
            raise ValueError("radii must be positive")
        norm = math.sqrt(math.fsum(w * w for w in weights))
        return cls(tuple(w / norm for w in weights))

    @classmethod
    def equal(cls, n: int) -> "FlatTorus":
        return cls((1 / math.sqrt(n),) * n)

    @property
    def n(self) -> int:
        return len(self.radii)

    @property
    def p(self) -> int:
        return self.n - 1

    @property
    def shifted_mean_curv_sq(self) -> float:
        """|H|^2 + 1 = (1/n^2) sum 1/r_i^2."""
        return math.fsum(1 / r**2 for r in self.radii) / self.n**2

    def invariants(self) -> ImmersionInvariants:
        n = self.n
        shifted = self.shifted_mean_curv_sq
        h2 = max(0.0, shifted - 1)
        # Gauss equation with R = 0
        second_ff = n * h2 + n * (n - 1) * shifted
        vol = math.prod(2 * math.pi * r for r in self.radii)
        return ImmersionInvariants(n, h2, second_ff, 1, vol)

    def curvature(self) -> CurvatureData:
        return CurvatureData.from_ricci(self.n, [(0.0, self.n)])

    def spectrum_source(self) -> SpectrumSource:
        return SpectrumSource(tuple(SphereFactor(1, r) for r in self.radii))

    def describe(self) -> dict:
        return {"model": self.kind, "n": self.n, "radii": list(self.radii)}


Model = GeodesicSphere | ProductSphere | FlatTorus


def sphere_invariants(m: GeodesicSphere):
    return m.invariants(), m.curvature()


def product_invariants(m: ProductSphere):
    return m.invariants(), m.curvature(), m.spectrum_source()


def torus_invariants(m: FlatTorus):
    return m.invariants(), m.curvature(), m.spectrum_source()


def is_umbilic(model) -> bool:
    return model.invariants().is_umbilic
