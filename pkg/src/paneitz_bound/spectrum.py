"""Certified enumeration of the Paneitz spectrum of a product model.

Mode tuples (one Laplacian level per factor) are enumerated up to a cutoff
s* on the total Laplacian eigenvalue. Every mode beyond the cutoff has a
symbol at least L(s) = s^2 + linear*s + constant with s > s*, so all
enumerated eigenvalues strictly below inf_{s > s*} L(s) are complete, with
their full multiplicity. The cutoff doubles until enough eigenvalues are
certified.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .curvature import CurvatureData
from .models import FlatTorus, SpectrumSource
from .paneitz import (
    PaneitzCoefficients,
    QValue,
    coefficients,
    paneitz_symbol,
    q_curvature,
    symbol_lower_bound,
)

DEDUP_RTOL = 1e-9
DEFAULT_MODE_BUDGET = 2_000_000


class CertificateError(RuntimeError):
    """The enumeration could not be certified within the mode budget."""


@dataclass(frozen=True)
class SpectrumSlice:
    value: float
    multiplicity: int
    modes: tuple[tuple[int, ...], ...] = field(default=(), compare=False)

    def as_dict(self) -> dict:
        return {"value": self.value, "multiplicity": self.multiplicity, "modes": [list(m) for m in self.modes]}


@dataclass(frozen=True)
class EnumerationCertificate:
    cutoff: float
    lower_bound_at_cutoff: float
    certified_count: int

    def as_dict(self) -> dict:
        return {
            "cutoff": self.cutoff,
            "lower_bound_at_cutoff": self.lower_bound_at_cutoff,
            "certified_count": self.certified_count,
        }


def mode_tuples(source: SpectrumSource, cutoff: float) -> Iterator[tuple[tuple[int, ...], tuple[float, ...], int]]:
    """All (levels, eigenvalues, multiplicity) with total eigenvalue <= cutoff.

    Output order is deterministic: lexicographic in the level indices.
    """
    factors = source.factors
    # per-factor level tables, computed once
    tables = [list(f.levels_upto(cutoff)) for f in factors]

    def rec(i, budget, levels, mus, mult):
        if i == len(factors):
            yield tuple(levels), tuple(mus), mult
            return
        for k, mu, m in tables[i]:
            if mu > budget:
                break
            levels.append(k)
            mus.append(mu)
            yield from rec(i + 1, budget - mu, levels, mus, mult * m)
            levels.pop()
            mus.pop()

    yield from rec(0, cutoff, [], [], 1)


def _merge(entries, scale, rtol=DEDUP_RTOL) -> list[SpectrumSlice]:
    """Merge (value, mult, levels) entries whose values agree to ``rtol``."""
    entries = sorted(entries, key=lambda e: (e[0], e[2]))
    slices = []
    floor = rtol * scale
    group_val, group_mult, group_modes = None, 0, []
    for value, mult, levels in entries:
        if group_val is not None and abs(value - group_val) <= max(rtol * abs(group_val), floor):
            group_mult += mult
            group_modes.append(levels)
            continue
        if group_val is not None:
            slices.append(SpectrumSlice(group_val, group_mult, tuple(group_modes)))
        group_val, group_mult, group_modes = value, mult, [levels]
    if group_val is not None:
        slices.append(SpectrumSlice(group_val, group_mult, tuple(group_modes)))
    return slices


def _initial_cutoff(source: SpectrumSource) -> float:
    first = min(f.level(1)[0] for f in source.factors)
    return 2.0 * first


def enumerate_spectrum(
    source: SpectrumSource,
    data: CurvatureData,
    q: QValue | float,
    coeffs: PaneitzCoefficients,
    count: int,
    mode_budget: int = DEFAULT_MODE_BUDGET,
    cutoff: float | None = None,
) -> tuple[list[SpectrumSlice], EnumerationCertificate]:
    """First ``count`` Paneitz eigenvalues (with multiplicity) and their certificate.

    Returns the shortest prefix of slices whose multiplicities reach
    ``count``. Raises :class:`CertificateError` if more than ``mode_budget``
    mode tuples would be needed.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if len(source.factors) == 0:
        raise ValueError("empty spectrum source")
    linear, constant = symbol_lower_bound(coeffs, data, q)
    vertex = max(0.0, -0.5 * linear)
    s_star = cutoff if cutoff is not None else max(_initial_cutoff(source), vertex)

    while True:
        entries = []
        for n_seen, (levels, mus, mult) in enumerate(mode_tuples(source, s_star)):
            if n_seen >= mode_budget:
                raise CertificateError(
                    f"more than {mode_budget} modes below cutoff {s_star:.6g} before certifying {count} eigenvalues"
                )
            modes = [(mu, f.ricci) for mu, f in zip(mus, source.factors)]
            entries.append((paneitz_symbol(coeffs, data, modes, q), mult, levels))
        s_bound = max(s_star, vertex)
        lower = s_bound * s_bound + linear * s_bound + constant
        scale = max(1.0, abs(lower))
        slices = _merge(entries, scale=scale)
        # keep a dedup-sized margin so no merged group can straddle the bound
        threshold = lower - 2.0 * DEDUP_RTOL * scale
        certified = [s for s in slices if s.value < threshold]
        total = sum(s.multiplicity for s in certified)
        if total >= count:
            out, acc = [], 0
            for s in certified:
                out.append(s)
                acc += s.multiplicity
                if acc >= count:
                    break
            return out, EnumerationCertificate(s_star, lower, total)
        s_star *= 2.0


def expand(slices) -> list[float]:
    """Multiplicity-expanded eigenvalue list."""
    return [s.value for s in slices for _ in range(s.multiplicity)]


def first_eigenvalue(slices) -> float:
    if not slices:
        raise ValueError("no certified eigenvalues")
    return slices[0].value


def second_eigenvalue(slices, distinct: bool = False) -> float:
    """Second eigenvalue, counted with multiplicity unless ``distinct``.

    With multiplicity, a repeated first eigenvalue is also the second.
    """
    if distinct:
        if len(slices) < 2:
            raise ValueError("fewer than two distinct certified eigenvalues")
        return slices[1].value
    values = expand(slices[:2])
    if len(values) < 2:
        raise ValueError("fewer than two certified eigenvalues")
    return values[1]


def discrete_circle_symbol(radius: float, n_points: int) -> np.ndarray:
    """Eigenvalues of the periodic second-difference Laplacian on a circle.

    (2 - 2 cos(2 pi k / N)) (N / (2 pi r))^2 for the N wavenumbers k.
    """
    k = np.fft.fftfreq(n_points, d=1.0 / n_points)
    return (2.0 - 2.0 * np.cos(2.0 * np.pi * k / n_points)) * (n_points / (2.0 * np.pi * radius)) ** 2


def flat_torus_grid_oracle(m: FlatTorus, grid_points_per_circle: int, count: int) -> np.ndarray:
    """Smallest ``count`` eigenvalues of the squared grid Laplacian on a flat torus."""
    N = grid_points_per_circle
    if N < 8 or N % 2:
        raise ValueError("grid_points_per_circle must be even and >= 8")
    sums = np.zeros(1)
    for r in m.radii:
        sigma = discrete_circle_symbol(r, N)
        sums = np.sort(np.add.outer(sums, sigma).ravel())[:count]
    return sums**2


def extrapolated_grid_eigenvalues(m: FlatTorus, grid_points_per_circle: int, count: int) -> np.ndarray:
    """Richardson extrapolation of the grid oracle from N and 2N points."""
    coarse = flat_torus_grid_oracle(m, grid_points_per_circle, count)
    fine = flat_torus_grid_oracle(m, 2 * grid_points_per_circle, count)
    return (4.0 * fine - coarse) / 3.0


def model_spectrum(model, count: int = 2, mode_budget: int = DEFAULT_MODE_BUDGET, extrapolated: bool = False):
    """Enumerate a catalog model's Paneitz spectrum; returns (slices, certificate, coeffs, q)."""
    data = model.curvature()
    coeffs = coefficients(model.n, extrapolated=extrapolated)
    q = q_curvature(data, coeffs)
    slices, cert = enumerate_spectrum(model.spectrum_source(), data, q, coeffs, count, mode_budget)
    return slices, cert, coeffs, q
