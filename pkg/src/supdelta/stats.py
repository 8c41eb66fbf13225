"""Exact computation of the normalized sup-type statistics from raw samples.

The 1-d Kolmogorov-Smirnov/Kuiper scans use both cadlag channels at the
order statistics, so the supremum over the whole line is exact even though
the empirical cdf jumps; declared jump points of a discontinuous reference
cdf extend the scan set.  The Berk-Jones statistic uses the convexity of the
Bernoulli divergence to reduce the supremum to an endpoint scan.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from .dists import Cdf
from .empirical import (
    Sample,
    ecdf_at,
    max_ranks,
    multivariate_ecdf_on_lattice,
    rank_lattice_copula,
)
from .grid import FunctionalKind

_K = FunctionalKind


@dataclass(frozen=True)
class StatResult:
    """Raw functional value with its centering and scaling."""

    raw: float
    reference: float
    r_n: float
    kind: FunctionalKind
    n: int
    m: Optional[int] = None

    @property
    def centered(self) -> float:
        return self.r_n * (self.raw - self.reference)


def _assemble(kind, sup, inf):
    if kind is _K.SUP_NORM:
        return max(sup, -inf)
    if kind is _K.SUP:
        return sup
    if kind is _K.AMP:
        return sup - inf
    raise ValueError("kind must be one of sup-norm, sup, amp")


def _one_sample_extrema_1d(xs_sorted, G: Cdf, jump_points=None):
    """Exact sup and inf of F_n - G over the extended line."""
    n = xs_sorted.size
    gx = np.asarray(G.cdf(xs_sorted), float)
    gxl = np.asarray(G.cdf_left(xs_sorted), float)
    i = np.arange(1, n + 1)
    sup = max((i / n - gx).max(), 0.0)
    inf = min(((i - 1) / n - gxl).min(), 0.0)
    jumps = G.jump_points()
    if jump_points is not None:
        jumps = np.union1d(jumps, jump_points)
    if jumps.size:
        fr = ecdf_at(xs_sorted, jumps, "right")
        fl = ecdf_at(xs_sorted, jumps, "left")
        vr = fr - np.asarray(G.cdf(jumps), float)
        vl = fl - np.asarray(G.cdf_left(jumps), float)
        sup = max(sup, vr.max(), vl.max())
        inf = min(inf, vr.min(), vl.min())
    return sup, inf


def ks_one_sample(
    sample: Sample,
    G: Cdf,
    kind: FunctionalKind,
    reference: float,
    jump_points=None,
    extra_axes=None,
) -> StatResult:
    """One-sample Kolmogorov-Smirnov / Kuiper statistic, exact in d=1.

    For d >= 2 the supremum is scanned over the lattice of per-axis sample
    coordinates, refinable through `extra_axes`.
    """
    if kind is _K.INF:
        raise ValueError("the infimum is not a one-sample statistic here")
    n = sample.n
    if sample.dim == 1:
        xs = np.sort(sample.x)
        sup, inf = _one_sample_extrema_1d(xs, G, jump_points)
    else:
        axes = []
        for k in range(sample.dim):
            a = np.unique(sample.data[:, k])
            if extra_axes is not None:
                a = np.union1d(a, extra_axes[k])
            axes.append(a)
        fn = multivariate_ecdf_on_lattice(sample, axes)
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        diff = fn - np.asarray(G.cdf(mesh), float)
        sup = max(float(diff.max()), 0.0)
        inf = min(float(diff.min()), 0.0)
    raw = _assemble(kind, sup, inf)
    return StatResult(raw, reference, np.sqrt(n), kind, n)


def ks_two_sample(
    sx: Sample, sy: Sample, kind: FunctionalKind, reference: float
) -> StatResult:
    """Two-sample statistic with scaling sqrt(nm / (n + m)); exact in d=1."""
    if kind is _K.INF:
        raise ValueError("the infimum is not a two-sample statistic here")
    n, m = sx.n, sy.n
    if sx.dim != sy.dim:
        raise ValueError("samples must share a dimension")
    if sx.dim == 1:
        xs = np.sort(sx.x)
        ys = np.sort(sy.x)
        pooled = np.concatenate([xs, ys])
        pooled.sort(kind="mergesort")
        diff = ecdf_at(xs, pooled, "right") - ecdf_at(ys, pooled, "right")
        sup = max(float(diff.max()), 0.0)
        inf = min(float(diff.min()), 0.0)
    else:
        axes = [
            np.union1d(np.unique(sx.data[:, k]), np.unique(sy.data[:, k]))
            for k in range(sx.dim)
        ]
        diff = multivariate_ecdf_on_lattice(sx, axes) - multivariate_ecdf_on_lattice(
            sy, axes
        )
        sup = max(float(diff.max()), 0.0)
        inf = min(float(diff.min()), 0.0)
    raw = _assemble(kind, sup, inf)
    return StatResult(raw, reference, np.sqrt(n * m / (n + m)), kind, n, m)


def copula_stat_Tn(sample: Sample, D: Cdf, reference: float) -> StatResult:
    """sqrt(n) (||C_n - D||_inf - reference), sup over the full rank lattice."""
    if sample.dim != 2:
        raise ValueError("implemented for d = 2")
    n = sample.n
    cn = rank_lattice_copula(sample)
    u = np.arange(n + 1) / n
    mesh = np.stack(np.meshgrid(u, u, indexing="ij"), axis=-1)
    raw = float(np.abs(cn - np.asarray(D.cdf(mesh), float)).max())
    return StatResult(raw, reference, np.sqrt(n), _K.SUP_NORM, n)


def copula_symmetry_stat(sample: Sample, reference: float) -> StatResult:
    """Radial-symmetry statistic sqrt(n) (||C_n - C_n_bar||_inf - reference)."""
    if sample.dim != 2:
        raise ValueError("implemented for d = 2")
    n = sample.n
    cn = rank_lattice_copula(sample)
    u = np.arange(n + 1) / n
    lin = u[:, None] + u[None, :] - 1.0
    cbar = lin + cn[::-1, ::-1]
    raw = float(np.abs(cn - cbar).max())
    return StatResult(raw, reference, np.sqrt(n), _K.SUP_NORM, n)


def kl_bernoulli(x, y):
    """Kullback-Leibler divergence between Bernoulli(x) and Bernoulli(y).

    x may hit 0 or 1 (values taken by continuity); y must lie in (0, 1).
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if np.any(y <= 0.0) or np.any(y >= 1.0):
        raise ValueError("y must lie in (0, 1)")
    return _kl_extended(x, y) if x.shape or y.shape else float(_kl_extended(x, y))


def _kl_extended(x, y):
    """K(x, y) with the boundary conventions K(0,0) = K(1,1) = 0."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(x > 0.0, x * (np.log(x) - np.log(y)), 0.0)
        t2 = np.where(x < 1.0, (1.0 - x) * (np.log1p(-x) - np.log1p(-y)), 0.0)
    out = t1 + t2
    out = np.where((x == 0.0) & (y == 0.0), 0.0, out)
    out = np.where((x == 1.0) & (y == 1.0), 0.0, out)
    return out


def berk_jones_R(sample: Sample, G: Cdf) -> float:
    """sup over x of K(F_n(x), G(x)) for continuous strictly increasing G.

    K(x, .) is convex with its minimum at the first argument, so on each
    constancy interval of F_n the supremum sits at one of the interval's
    G-endpoints; scanning those (with G = 0 and 1 at the outer intervals)
    is exact.
    """
    if sample.dim != 1:
        raise ValueError("Berk-Jones statistic is univariate")
    xs = np.sort(sample.x)
    n = xs.size
    gv = np.asarray(G.cdf(xs), float)
    levels = np.arange(0, n + 1) / n
    left = np.concatenate([[0.0], gv])
    right = np.concatenate([gv, [1.0]])
    best = 0.0
    for y in (left, right):
        vals = _kl_extended(levels, np.clip(y, 0.0, 1.0))
        best = max(best, float(np.max(vals)))
    return best


def berk_jones_centering(n: int) -> float:
    """d_n = log log n - (1/2) log log log n - (1/2) log(4 pi)."""
    if n < 16:
        raise ValueError("need n >= 16 for the iterated logarithms")
    lln = np.log(np.log(n))
    return float(lln - 0.5 * np.log(np.log(np.log(n))) - 0.5 * np.log(4.0 * np.pi))


def berk_jones_null_centered(sample: Sample, F: Cdf) -> float:
    """n R(F_n, F) - d_n, the null-calibrated Berk-Jones statistic."""
    n = sample.n
    return n * berk_jones_R(sample, F) - berk_jones_centering(n)


def berk_jones_Bn(
    sample: Sample, F_true: Cdf, G: Cdf, reference: Optional[float] = None
) -> StatResult:
    """sqrt(n) (R(F_n, G) - R(F, G)); reference computed densely if absent."""
    if reference is None:
        reference = bj_divergence_reference(F_true, G)
    raw = berk_jones_R(sample, G)
    return StatResult(raw, reference, np.sqrt(sample.n), _K.SUP, sample.n)


def bj_divergence_reference(F: Cdf, G: Cdf, points: int = 100001) -> float:
    """Dense-grid maximization of K(F(x), G(x)) over the F-quantile range."""
    u = (np.arange(points) + 0.5) / points
    x = F.ppf(u)
    fv = np.asarray(F.cdf(x), float)
    gv = np.clip(np.asarray(G.cdf(x), float), 1e-300, 1.0 - 1e-16)
    return float(np.max(_kl_extended(fv, gv)))


class FiniteFunctionClass:
    """A finite class of real test functions with moment helpers.

    Functions are named pieces: ("indicator", t) for 1{x <= t} and
    ("ramp", t, w) for the continuous descending ramp that is 1 below t and
    0 above t + w, or arbitrary callables.  The symmetric flag declares
    closure under negation, in which case discrepancies use |gap|.
    """

    def __init__(self, functions, symmetric: bool = False):
        if len(functions) < 1:
            raise ValueError("class must contain at least one function")
        self.functions = list(functions)
        self.symmetric = bool(symmetric)

    @classmethod
    def indicators(cls, thresholds, symmetric=True) -> "FiniteFunctionClass":
        return cls([("indicator", float(t)) for t in thresholds], symmetric=symmetric)

    @classmethod
    def indicators_and_ramps(
        cls, thresholds, ramp_width: float, symmetric=False
    ) -> "FiniteFunctionClass":
        fns = [("indicator", float(t)) for t in thresholds]
        fns += [("ramp", float(t), float(ramp_width)) for t in thresholds]
        return cls(fns, symmetric=symmetric)

    @property
    def size(self) -> int:
        return len(self.functions)

    def evals(self, x) -> np.ndarray:
        """Evaluation matrix with one column per function."""
        x = np.asarray(x, float).ravel()
        cols = []
        for fn in self.functions:
            if callable(fn):
                cols.append(np.asarray(fn(x), float))
            elif fn[0] == "indicator":
                cols.append((x <= fn[1]).astype(float))
            elif fn[0] == "ramp":
                t, w = fn[1], fn[2]
                cols.append(np.clip((t + w - x) / w, 0.0, 1.0))
            else:
                raise ValueError(f"unknown function spec {fn!r}")
        return np.column_stack(cols)

    def means_under(self, F: Cdf, points: int = 200001) -> np.ndarray:
        """E_F[f_k]; closed form for indicator/ramp pieces under a uniform."""
        from .dists import Uniform

        if isinstance(F, Uniform) and all(
            not callable(fn) and fn[0] in ("indicator", "ramp") for fn in self.functions
        ):
            a, b = F.a, F.b
            out = np.empty(self.size)
            for k, fn in enumerate(self.functions):
                if fn[0] == "indicator":
                    out[k] = min(max((fn[1] - a) / (b - a), 0.0), 1.0)
                else:
                    t, w = fn[1], fn[2]
                    flat = max(0.0, min(b, t) - a)
                    c, d = max(a, t), min(b, t + w)
                    tri = (d - c) * ((t + w) - 0.5 * (c + d)) / w if d > c else 0.0
                    out[k] = (flat + tri) / (b - a)
            return out
        u = (np.arange(points) + 0.5) / points
        return self.evals(F.ppf(u)).mean(axis=0)

    def cov_under(self, F: Cdf, points: int = 200001) -> np.ndarray:
        """Cov_F(f_j, f_k) by quantile-space midpoint quadrature."""
        u = (np.arange(points) + 0.5) / points
        e = self.evals(F.ppf(u))
        mu = e.mean(axis=0)
        return (e.T @ e) / points - np.outer(mu, mu)


def mmd_finite(evals_x: np.ndarray, evals_y: np.ndarray, symmetric: bool = False):
    """Empirical discrepancy over a finite class from evaluation matrices.

    Returns (mmd, per-function mean gaps); symmetric classes use max |gap|.
    """
    ex = np.asarray(evals_x, float)
    ey = np.asarray(evals_y, float)
    if ex.ndim != 2 or ey.ndim != 2 or ex.shape[1] != ey.shape[1]:
        raise ValueError("evaluation matrices need matching columns")
    gaps = ex.mean(axis=0) - ey.mean(axis=0)
    mmd = float(np.abs(gaps).max() if symmetric else gaps.max())
    return mmd, gaps


def mmd_statistic(
    sx: Sample, sy: Sample, cls: FiniteFunctionClass, reference: float
) -> StatResult:
    """sqrt(nm/(n+m)) (MMD[F, P_n, Q_m] - reference)."""
    raw, _ = mmd_finite(cls.evals(sx.x), cls.evals(sy.x), cls.symmetric)
    n, m = sx.n, sy.n
    return StatResult(raw, reference, np.sqrt(n * m / (n + m)), _K.SUP, n, m)


def kernel_mmd(sx: Sample, sy: Sample, kernel: str = "gaussian", bandwidth: float = 1.0):
    """Kernel distance between the two empirical measures (V-statistic form)."""
    if bandwidth <= 0:
        raise ValueError("bandwidth must be > 0")
    x, y = sx.data, sy.data
    if kernel == "gaussian":
        kxx = np.exp(-0.5 * cdist(x, x, "sqeuclidean") / bandwidth**2)
        kxy = np.exp(-0.5 * cdist(x, y, "sqeuclidean") / bandwidth**2)
        kyy = np.exp(-0.5 * cdist(y, y, "sqeuclidean") / bandwidth**2)
    elif kernel == "laplace":
        kxx = np.exp(-cdist(x, x, "cityblock") / bandwidth)
        kxy = np.exp(-cdist(x, y, "cityblock") / bandwidth)
        kyy = np.exp(-cdist(y, y, "cityblock") / bandwidth)
    else:
        raise ValueError(f"unknown kernel '{kernel}'")
    val = kxx.mean() - 2.0 * kxy.mean() + kyy.mean()
    return float(np.sqrt(max(val, 0.0)))
