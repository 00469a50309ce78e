"""Moebius normalization of point measures and conformal checks on flat tori.

The Moebius map used throughout is the boundary action of the ball
automorphism with parameter p (|p| < 1):

    phi_p(x) = (1 - |p|^2) (x - p) / |x - p|^2 - p

It fixes both poles on the p-axis, pushes mass toward -p, is the identity at
p = 0, and phi_{-p} inverts it.

Grid checks live on flat tori T = prod S^1(r_j) sampled on periodic product
grids. Derivatives are spectral (exact for band-limited data) and integrals
are grid means, i.e. per-unit-volume integrals.
"""

from __future__ import annotations

import csv
import functools
import itertools
from dataclasses import dataclass, field

import numpy as np

from .models import FlatTorus


# ---------------------------------------------------------------------------
# Moebius maps and the ambient-to-sphere map


@dataclass(frozen=True)
class MobiusParam:
    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 1:
            raise ValueError("Moebius parameter must be a vector")
        if not np.dot(p, p) < 1.0:
            raise ValueError(f"Moebius parameter must lie in the open unit ball, |p| = {np.linalg.norm(p)}")
        object.__setattr__(self, "p", p)

    @property
    def inverse(self) -> "MobiusParam":
        return MobiusParam(-self.p)


def mobius_apply(p, x: np.ndarray) -> np.ndarray:
    """Apply phi_p to unit vector(s) ``x`` (last axis is the coordinate axis)."""
    p = p.p if isinstance(p, MobiusParam) else np.asarray(p, dtype=float)
    pp = float(np.dot(p, p))
    if not pp < 1.0:
        raise ValueError("Moebius parameter must lie in the open unit ball")
    x = np.asarray(x, dtype=float)
    norms = np.einsum("...i,...i->...", x, x)
    if np.any(np.abs(norms - 1.0) > 2e-12):
        raise ValueError("Moebius maps act on unit vectors")
    if pp == 0.0:
        return x.copy()
    d = x - p
    dd = np.einsum("...i,...i->...", d, d)
    return (1.0 - pp) * d / dd[..., None] - p


def ambient_map(c: int, x: np.ndarray) -> np.ndarray:
    """Conformal map from the model space of curvature c into the unit sphere.

    c = 1: inclusion. c = 0: inverse stereographic projection from the north
    pole (0 goes to the south pole). c = -1: the same projection restricted
    to the Poincare ball, landing in the lower hemisphere.
    """
    x = np.asarray(x, dtype=float)
    if c == 1:
        return x
    if c not in (0, -1):
        raise ValueError(f"c must be -1, 0 or 1, got {c}")
    xx = np.einsum("...i,...i->...", x, x)
    if c == -1 and np.any(xx >= 1.0):
        raise ValueError("Poincare ball points need |x| < 1")
    denom = 1.0 + xx
    return np.concatenate([2.0 * x / denom[..., None], ((xx - 1.0) / denom)[..., None]], axis=-1)


# ---------------------------------------------------------------------------
# Conformal centering


@dataclass(frozen=True)
class CenteringResult:
    p: MobiusParam
    residual: float
    iterations: int
    converged: bool = True

    def as_dict(self) -> dict:
        return {
            "p": self.p.p.tolist(),
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
        }


class CenteringError(RuntimeError):
    def __init__(self, message, result: CenteringResult):
        super().__init__(message)
        self.result = result


def moment(p, points, weights) -> np.ndarray:
    """Weighted moment sum_i w_i phi_p(X_i) / sum_i w_i."""
    return weights @ mobius_apply(p, points) / weights.sum()


def _fd_jacobian(p, points, weights, h):
    dim = p.size
    J = np.empty((dim, dim))
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = h
        J[:, j] = (moment(p + e, points, weights) - moment(p - e, points, weights)) / (2 * h)
    return J


def _damped_newton(p, points, weights, tol, max_iter):
    """Newton on m(p) = 0 with central-difference Jacobian and step halving on |m|^2."""
    m = moment(p, points, weights)
    res = float(np.linalg.norm(m))
    it = 0
    while res > tol and it < max_iter:
        it += 1
        h = 1e-6 * (1.0 - np.linalg.norm(p))
        J = _fd_jacobian(p, points, weights, h)
        try:
            step = np.linalg.solve(J, -m)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(J, -m, rcond=None)[0]
        t = 1.0
        while t > 1e-12:
            trial = p + t * step
            if np.dot(trial, trial) < 1.0:
                m_trial = moment(trial, points, weights)
                res_trial = float(np.linalg.norm(m_trial))
                if res_trial < res:
                    break
            t *= 0.5
        else:
            return p, res, it, False
        p, m, res = trial, m_trial, res_trial
    return p, res, it, res <= tol


def center_measure(points, weights=None, tol: float = 1e-10, max_iter: int = 200) -> CenteringResult:
    """Find p with sum_i w_i phi_p(X_i) = 0 for a positive measure on the sphere.

    Damped Newton from the better of +-(1/2)(weighted centroid); if that
    stalls, a homotopy moving the weights from uniform to the target ones is
    tried. The residual is |sum w_i phi_p(X_i)| / sum w_i. Raises
    :class:`CenteringError` carrying the best iterate on failure.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] < 2:
        raise ValueError("need at least two points")
    norms = np.linalg.norm(points, axis=1)
    if np.max(np.abs(norms - 1.0)) > 1e-10:
        raise ValueError("points must lie on the unit sphere")
    weights = np.ones(points.shape[0]) if weights is None else np.asarray(weights, dtype=float)
    if weights.shape != (points.shape[0],):
        raise ValueError("one weight per point")
    if np.any(weights <= 0):
        if np.any(weights > 0):
            raise ValueError("weights have mixed signs; centering needs a positive measure")
        raise ValueError("weights must be positive")
    if np.ptp(points, axis=0).max() == 0:
        raise ValueError("points are all equal")

    centroid = moment(np.zeros(points.shape[1]), points, weights)
    if np.linalg.norm(centroid) <= tol:
        return CenteringResult(MobiusParam(np.zeros(points.shape[1])), float(np.linalg.norm(centroid)), 0)
    starts = [0.5 * centroid, -0.5 * centroid]
    p0 = min(starts, key=lambda s: np.linalg.norm(moment(s, points, weights)))

    p, res, it, ok = _damped_newton(p0, points, weights, tol, max_iter)
    best = (res, p, it)
    if not ok:
        # homotopy: uniform weights -> target weights
        q = np.zeros(points.shape[1])
        total = 0
        uniform = np.full_like(weights, weights.mean())
        for t in np.linspace(0.0, 1.0, 11)[1:]:
            w_t = (1 - t) * uniform + t * weights
            q, res_t, it_t, ok_t = _damped_newton(q, points, w_t, tol, max_iter)
            total += it_t
            if not ok_t:
                break
        else:
            ok = True
        res_h = float(np.linalg.norm(moment(q, points, weights)))
        if res_h < best[0]:
            best = (res_h, q, it + total)
        ok = ok and res_h <= tol
    res, p, it = best
    result = CenteringResult(MobiusParam(p), res, it, converged=res <= tol)
    if not result.converged:
        raise CenteringError(f"centering did not converge, best residual {res:.3e}", result)
    return result


# ---------------------------------------------------------------------------
# Periodic grid fields on flat tori


@dataclass
class GridField:
    """Samples on a periodic product grid over a flat torus.

    ``values`` has shape ``components + grid`` where ``grid`` has one axis per
    circle. A scalar field has no component axes.
    """

    values: np.ndarray
    radii: tuple[float, ...]
    grid: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        self.radii = tuple(float(r) for r in self.radii)
        n = len(self.radii)
        if self.values.ndim < n:
            raise ValueError("fewer array axes than torus circles")
        self.grid = tuple(self.values.shape[-n:])
        if any(N < 8 or N % 2 for N in self.grid):
            raise ValueError(f"grid sizes must be even and >= 8, got {self.grid}")

    @property
    def n(self) -> int:
        return len(self.radii)

    @property
    def components(self) -> tuple[int, ...]:
        return self.values.shape[: self.values.ndim - self.n]

    def grid_axis(self, j: int) -> int:
        return self.values.ndim - self.n + j

    def mean(self, values=None) -> float:
        """Grid average over the torus axes (per-unit-volume integral)."""
        v = self.values if values is None else values
        return float(np.mean(v))

    def to_csv(self, path) -> None:
        """Write one row per grid point: indices (lexicographic, first circle slowest), then values."""
        flat = self.values.reshape(self.components + (-1,))
        flat = flat.reshape(-1, flat.shape[-1]).T if self.components else flat.reshape(-1, 1)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"i{j + 1}" for j in range(self.n)] + (["value"] if not self.components else [f"v{k}" for k in range(flat.shape[1])]))
            for idx, row in zip(itertools.product(*(range(N) for N in self.grid)), flat):
                w.writerow(list(idx) + [repr(float(x)) for x in row])


def angles(grid, j: int) -> np.ndarray:
    """Angle samples of circle j, shaped to broadcast over the grid."""
    N = grid[j]
    shape = [1] * len(grid)
    shape[j] = N
    return (2.0 * np.pi * np.arange(N) / N).reshape(shape)


@functools.lru_cache(maxsize=None)
def spectral_diff_matrix(N: int, order: int = 1) -> np.ndarray:
    """Fourier differentiation matrix on N periodic points of [0, 2 pi).

    Odd orders drop the Nyquist mode so the matrix stays real and skew.
    """
    k = np.fft.rfftfreq(N, d=1.0 / N)
    mult = (1j * k) ** order
    if order % 2 and N % 2 == 0:
        mult[-1] = 0.0
    eye = np.eye(N)
    D = np.fft.irfft(np.fft.rfft(eye, axis=0) * mult[:, None], n=N, axis=0)
    D.setflags(write=False)
    return D


def spectral_derivative(values: np.ndarray, axis: int, radius: float = 1.0, order: int = 1) -> np.ndarray:
    """d^order/ds^order along a periodic axis, s = radius * angle."""
    D = spectral_diff_matrix(values.shape[axis], order)
    # D annihilates constants; removing the first sample makes that exact
    shifted = values - np.take(values, [0], axis=axis)
    out = np.tensordot(D, shifted, axes=([1], [axis]))
    del shifted
    if radius != 1.0:
        out /= radius**order
    return np.moveaxis(out, 0, axis)


def gradient_sq(u: GridField) -> np.ndarray:
    out = np.zeros(u.values.shape)
    for j, r in enumerate(u.radii):
        out += spectral_derivative(u.values, u.grid_axis(j), r) ** 2
    return out


def laplacian(u: GridField) -> np.ndarray:
    out = np.zeros(u.values.shape)
    for j, r in enumerate(u.radii):
        out += spectral_derivative(u.values, u.grid_axis(j), r, order=2)
    return out


def standard_immersion_coords(m: FlatTorus, grid) -> list:
    """Broadcastable components (r_j cos t_j, r_j sin t_j) of the torus in S^{2n-1}."""
    comps = []
    for j, r in enumerate(m.radii):
        t = angles(grid, j)
        comps += [r * np.cos(t), r * np.sin(t)]
    return comps


def torus_immersion(m: FlatTorus, grid, p=None) -> GridField:
    """Sample phi_p composed with the standard immersion of ``m`` into S^{2n-1}."""
    grid = tuple(grid)
    if len(grid) != m.n:
        raise ValueError("need one grid size per circle")
    comps = standard_immersion_coords(m, grid)
    X = np.empty((len(comps),) + grid)
    if p is None or not np.any(np.asarray(p.p if isinstance(p, MobiusParam) else p)):
        for a, comp in enumerate(comps):
            X[a] = comp
        return GridField(X, m.radii)
    p = p.p if isinstance(p, MobiusParam) else np.asarray(p, dtype=float)
    if p.shape != (2 * m.n,):
        raise ValueError(f"Moebius parameter must have dimension {2 * m.n}")
    pp = float(p @ p)
    if not pp < 1:
        raise ValueError("Moebius parameter must lie in the open unit ball")
    # |X - p|^2 = 1 - 2 p.X + |p|^2 since |X| = 1
    dist = np.full(grid, 1.0 + pp)
    for a, comp in enumerate(comps):
        if p[a]:
            dist = dist - 2.0 * p[a] * comp
    scale = (1.0 - pp) / dist
    del dist
    for a, comp in enumerate(comps):
        np.multiply(comp - p[a], scale, out=X[a])
        X[a] -= p[a]
    return GridField(X, m.radii)


def frame_gram(X: GridField) -> dict:
    """Inner products <d_j X, d_k X> in the orthonormal flat frame, j <= k."""
    if len(X.components) != 1:
        raise ValueError("X must be a vector-valued field")
    n = X.n
    gram = {}
    for a in range(X.components[0]):
        derivs = [spectral_derivative(X.values[a], j, X.radii[j]) for j in range(n)]
        for j in range(n):
            for k in range(j, n):
                prod = derivs[j] * derivs[k]
                if (j, k) in gram:
                    gram[j, k] += prod
                else:
                    gram[j, k] = prod
        del derivs
    return gram


def _factor_from_trace(trace: np.ndarray, n: int) -> np.ndarray:
    e2u = trace / n
    if not np.all(e2u > 0):
        raise ValueError("degenerate differential: e^{2u} is not strictly positive")
    return e2u


def conformal_factor(X: GridField) -> GridField:
    """u with e^{2u} = (1/n) |grad X|^2, using spectral derivatives in the flat metric."""
    n = X.n
    trace = np.zeros(X.grid)
    for a in range(X.components[0]):
        for j in range(n):
            trace += spectral_derivative(X.values[a], j, X.radii[j]) ** 2
    e2u = _factor_from_trace(trace, n)
    return GridField(0.5 * np.log(e2u), X.radii)


def conformality_defect(X: GridField) -> tuple[float, GridField]:
    """Max |<d_j X, d_k X> - e^{2u} delta_jk| relative to max e^{2u}, and u."""
    gram = frame_gram(X)
    n = X.n
    trace = sum(gram[j, j] for j in range(n))
    e2u = _factor_from_trace(trace, n)
    scale = float(e2u.max())
    defect = 0.0
    for (j, k), g in gram.items():
        if j == k:
            g = g - e2u
        defect = max(defect, float(np.abs(g).max()) / scale)
    del gram
    return defect, GridField(0.5 * np.log(e2u), X.radii)


def ibp_identity_check(u: GridField) -> float:
    """Residual of  mean(e^{2u} Lap u) = -2 mean(e^{2u} |grad u|^2)."""
    e2u = np.exp(2.0 * u.values)
    lap_term = float(np.mean(e2u * laplacian(u)))
    grad_term = float(np.mean(e2u * gradient_sq(u)))
    return abs(lap_term + 2.0 * grad_term) / (1.0 + grad_term)


@dataclass(frozen=True)
class Lemma24Report:
    n: int
    p_norm: float
    shifted: float
    mean_e2u_shifted: float
    mean_e4u: float
    mean_e2u_grad_sq: float
    slack_intermediate: float
    slack_lemma: float
    ok: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def lemma24_check(model: FlatTorus, p, grid) -> Lemma24Report:
    """Evaluate both integral inequalities behind the |grad u| slack term.

    intermediate:  mean e^{4u} <= K mean e^{2u} - (n-6)/n mean e^{2u}|grad u|^2
    lemma:         K mean e^{2u} <= K^2 - (n-6)/n mean e^{2u}|grad u|^2
    with K = |H|^2 + 1 of the torus in the unit sphere.
    """
    n = model.n
    if n < 7:
        raise ValueError("the integral inequalities are checked for n >= 7")
    X = torus_immersion(model, grid, p)
    u = conformal_factor(X)
    del X
    return _lemma24_from_u(model, u, p)


def _lemma24_from_u(model: FlatTorus, u: GridField, p) -> Lemma24Report:
    n = model.n
    K = model.shifted_mean_curv_sq
    e2u = np.exp(2.0 * u.values)
    mean_e2u = float(np.mean(e2u))
    mean_e4u = float(np.mean(e2u * e2u))
    mean_grad = float(np.mean(e2u * gradient_sq(u)))
    coef = (n - 6) / n
    slack_mid = K * mean_e2u - coef * mean_grad - mean_e4u
    slack_lemma = K * K - coef * mean_grad - K * mean_e2u
    p_vec = p.p if isinstance(p, MobiusParam) else (np.zeros(1) if p is None else np.asarray(p, dtype=float))
    return Lemma24Report(
        n=n,
        p_norm=float(np.linalg.norm(p_vec)),
        shifted=K,
        mean_e2u_shifted=K * mean_e2u,
        mean_e4u=mean_e4u,
        mean_e2u_grad_sq=mean_grad,
        slack_intermediate=slack_mid,
        slack_lemma=slack_lemma,
        ok=slack_mid >= -1e-8 and slack_lemma >= -1e-8,
    )


def axis_parameter(model: FlatTorus, norm: float, circle: int = 0) -> np.ndarray:
    """Moebius parameter of length ``norm`` in the coordinate plane of one circle."""
    p = np.zeros(2 * model.n)
    p[2 * circle] = norm
    return p
