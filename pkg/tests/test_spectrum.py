import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paneitz_bound.curvature import CurvatureData
from paneitz_bound.models import FlatTorus, GeodesicSphere, ProductSphere, SphereFactor, SpectrumSource
from paneitz_bound.paneitz import coefficients, paneitz_symbol, q_curvature
from paneitz_bound.spectrum import (
    CertificateError,
    SpectrumSlice,
    enumerate_spectrum,
    expand,
    extrapolated_grid_eigenvalues,
    flat_torus_grid_oracle,
    mode_tuples,
    model_spectrum,
    second_eigenvalue,
)

def test_unit_seven_sphere():
    slices, cert, _, _ = model_spectrum(GeodesicSphere(7, 1, 0, 1.0), 2)
    assert [(s.value, s.multiplicity) for s in slices] == [(59.0625, 1), (216.5625, 8)]
    assert cert.lower_bound_at_cutoff > slices[-1].value

def test_equal_flat_torus():
    slices, _, _, _ = model_spectrum(FlatTorus.equal(7), 2)
    assert slices[0].value == 0 and slices[0].multiplicity == 1
    assert slices[1].value == pytest.approx(49, rel=1e-14) and slices[1].multiplicity == 14

def brute_force_clifford(cutoff=100):
    # exact rational symbol over all modes with s <= cutoff, written independently
    n, a_dim, b_dim = 7, 3, 4
    r1s, r2s = Fraction(3, 7), Fraction(4, 7)
    an, bn = Fraction(29, 60), Fraction(-4, 5)
    rho1, rho2 = Fraction(2) / r1s, Fraction(3) / r2s
    R = 3 * rho1 + 4 * rho2
    E2 = 3 * rho1**2 + 4 * rho2**2 - R * R / n
    Q = Fraction(45, 2016) * R * R - Fraction(2, 25) * E2
    values = {}
    for k in range(50):
        mu = Fraction(k * (k + a_dim - 1)) / r1s
        if mu > cutoff:
            break
        for l in range(50):
            nu = Fraction(l * (l + b_dim - 1)) / r2s
            if mu + nu > cutoff:
                break
            s = mu + nu
            lam = s * s + an * R * s + bn * (rho1 * mu + rho2 * nu) + Fraction(3, 2) * Q
            values.setdefault(lam, []).append((k, l))
    return sorted(values.items())

def test_clifford_second_eigenvalue_against_brute_force():
    oracle = brute_force_clifford()
    assert oracle[1][0] == Fraction(859019, 4800) and oracle[1][1] == [(0, 1)]
    slices, _, _, _ = model_spectrum(ProductSphere.minimal(3, 4), 2)
    assert slices[0].value == pytest.approx(float(oracle[0][0]), rel=1e-12)
    assert slices[1].value == pytest.approx(float(oracle[1][0]), rel=1e-12)
    assert slices[1].multiplicity == 5 and slices[1].modes == ((0, 1),)

def test_second_eigenvalue_conventions():
    assert second_eigenvalue([SpectrumSlice(59.0625, 1), SpectrumSlice(216.5625, 8)]) == 216.5625
    assert second_eigenvalue([SpectrumSlice(0.0, 1), SpectrumSlice(49.0, 14)]) == 49
    assert second_eigenvalue([SpectrumSlice(5.0, 3), SpectrumSlice(9.0, 1)]) == 5
    assert second_eigenvalue([SpectrumSlice(5.0, 3), SpectrumSlice(9.0, 1)], distinct=True) == 9
    with pytest.raises(ValueError):
        second_eigenvalue([SpectrumSlice(5.0, 1)])

def test_certificate_failure_on_tiny_budget():
    with pytest.raises(CertificateError):
        model_spectrum(FlatTorus.equal(7), 200, mode_budget=50)

models = st.one_of(
    st.builds(lambda a, b, r1: ProductSphere.from_r1(a, b, r1), st.integers(1, 6), st.integers(2, 6), st.floats(0.15, 0.95)),
    st.builds(FlatTorus.normalized, st.lists(st.floats(0.3, 1.0), min_size=3, max_size=5)),
    st.builds(lambda n, c, r: GeodesicSphere(n, 1, c, r), st.integers(3, 12), st.sampled_from([-1, 0, 1]), st.floats(0.2, 1.5)),
)

def full_spectrum_below(model, cutoff):
    data = model.curvature()
    co = coefficients(model.n, extrapolated=True)
    q = q_curvature(data, co)

    src = model.spectrum_source()
    return [
        (paneitz_symbol(co, data, [(mu, f.ricci) for mu, f in zip(mus, src.factors)], q), mult)
        for _, mus, mult in mode_tuples(src, cutoff)
    ]

@settings(max_examples=30, deadline=None)
@given(models, st.integers(2, 12))
def test_certificate_soundness(model, count):
    slices, cert, _, _ = model_spectrum(model, count, extrapolated=model.n < 5)
    assert sum(s.multiplicity for s in slices) >= count
    assert cert.lower_bound_at_cutoff > slices[-1].value
    wide = full_spectrum_below(model, 4 * cert.cutoff)
    # the reported prefix, last slice at full multiplicity, is exactly the
    # bottom of a much wider enumeration
    top = slices[-1].value
    reach = top + 1e-8 * max(1.0, abs(top))
    below = sorted(v for v, m in wide for _ in range(m) if v <= reach)
    reported = expand(slices)
    assert len(below) == len(reported)
    assert np.allclose(below, reported, rtol=1e-9, atol=1e-9)

@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.3, 1.0), min_size=3, max_size=6), st.randoms(use_true_random=False))
def test_multiplicity_invariant_under_factor_order(weights, rnd):
    m = FlatTorus.normalized(weights)
    shuffled = list(m.radii)
    rnd.shuffle(shuffled)
    m2 = FlatTorus(tuple(shuffled))
    s1, _, _, _ = model_spectrum(m, 12, extrapolated=m.n < 5)
    s2, _, _, _ = model_spectrum(m2, 12, extrapolated=m.n < 5)
    assert np.allclose(expand(s1)[:12], expand(s2)[:12], rtol=1e-12, atol=1e-12)
    assert [s.multiplicity for s in s1] == [s.multiplicity for s in s2]

def test_product_factor_swap():
    m = ProductSphere.from_r1(3, 4, 0.4)
    swapped = ProductSphere(4, 3, m.r2, m.r1)
    s1, _, _, _ = model_spectrum(m, 30)
    s2, _, _, _ = model_spectrum(swapped, 30)
    assert np.allclose(expand(s1)[:30], expand(s2)[:30], rtol=1e-12)

@given(st.floats(0.3, 4.0), st.floats(0.2, 0.9))
def test_eigenvalues_scale_with_radius(t, r1):
    def spectrum(scale):
        R1, R2 = scale * r1, scale * math.sqrt(1 - r1 * r1)
        src = SpectrumSource((SphereFactor(3, R1), SphereFactor(4, R2)))
        data = CurvatureData.from_ricci(7, [(2 / R1**2, 3), (3 / R2**2, 4)])
        co = coefficients(7)
        slices, _ = enumerate_spectrum(src, data, q_curvature(data), co, 10)
        return np.array(expand(slices)[:10])

    assert np.allclose(spectrum(t), spectrum(1.0) / t**4, rtol=1e-10)

def test_sphere_scaling():
    base = expand(model_spectrum(GeodesicSphere(8, 1, 0, 1.0), 10)[0])[:10]
    scaled = expand(model_spectrum(GeodesicSphere(8, 1, 0, 2.5), 10)[0])[:10]
    assert np.allclose(scaled, np.array(base) / 2.5**4, rtol=1e-13)

def test_grid_oracle_equal_torus():
    m = FlatTorus.equal(7)
    eig = flat_torus_grid_oracle(m, 32, 15)
    assert eig[0] == 0.0
    h = 2 * math.pi / 32
    deviation = abs((2 - 2 * math.cos(h)) / h**2 - 1)
    assert abs(eig[1] - 49) / 49 <= 2.5 * deviation
    assert np.allclose(eig[1:15], eig[1])

def test_grid_oracle_error_quarters_under_refinement():
    m = FlatTorus.normalized([1, 1.3, 1.7])
    exact = 1 / max(m.radii) ** 4
    errors = [abs(flat_torus_grid_oracle(m, N, 2)[1] - exact) for N in (16, 32, 64)]
    assert errors[0] / errors[1] == pytest.approx(4, rel=0.05)
    assert errors[1] / errors[2] == pytest.approx(4, rel=0.02)

def test_grid_oracle_rejects_bad_sizes():
    with pytest.raises(ValueError):
        flat_torus_grid_oracle(FlatTorus.equal(3), 7, 3)
    with pytest.raises(ValueError):
        flat_torus_grid_oracle(FlatTorus.equal(3), 6, 3)

def test_enumeration_matches_extrapolated_grid_oracle():
    rng = np.random.default_rng(5)
    for _ in range(4):
        m = FlatTorus.normalized(rng.uniform(0.2, 1.0, 7))
        enumerated = np.array(expand(model_spectrum(m, 10)[0])[:10])
        grid = extrapolated_grid_eigenvalues(m, 256, 10)
        scale = enumerated.max()
        assert np.all(np.abs(enumerated - grid) <= 1e-6 * np.maximum(np.abs(enumerated), scale))
