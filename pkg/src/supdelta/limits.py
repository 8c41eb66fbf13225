"""Simulation of the limit laws: derivatives of sup-functionals along
sampled Gaussian paths.

Two realizations are provided.  "derivative" applies the directional
derivative through precomputed extremal sets (the epsilon-level sets of the
centering function, expanded by one grid cell); it samples the limit law
itself.  "quotient" evaluates the scaled difference quotient
r_n (phi(q + path / r_n) - phi(q)) along the same paths, the finite-n form
of the delta method that the derivative is the limit of; it is the honest
object to compare against a statistic computed at sample size matching r_n.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dists import Cdf
from .empirical import _safe_cdf, copula_partials, survival_copula
from .functionals import expand_node_mask, full_differentiability_witness, superlevel_set, sublevel_set
from .grid import CH_LEFT, FunctionalKind, GridDomain, GridFunction
from .samplers import (
    CopulaLimitSampler,
    FiniteClassSampler,
    PathSampler,
    WeightedBridgeSampler,
)
from .stats import _kl_extended

_K = FunctionalKind


@dataclass(frozen=True)
class LimitSpec:
    """What to simulate: functional kind, centering q, path sampler, epsilon."""

    kind: FunctionalKind
    q: GridFunction
    sampler: PathSampler
    epsilon: float = 0.0
    expand_cells: int = 1

    def __post_init__(self):
        if self.q.values.size != self.sampler.n_nodes:
            raise ValueError("q and sampler must share a grid")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")


@dataclass(frozen=True)
class Shortcut:
    """Exact Gaussian variance available under full differentiability."""

    variance: float
    witness: object


@dataclass(frozen=True)
class LimitReplicates:
    values: np.ndarray
    epsilon: float
    mode: str
    shortcut: Optional[Shortcut] = None

    @property
    def n_paths(self) -> int:
        return self.values.size


def lil_epsilon(n: int, c: float = 1.0) -> float:
    """Law-of-iterated-logarithm envelope c sqrt(2 log log n) / sqrt(n)."""
    if n < 16:
        raise ValueError("need n >= 16")
    return c * np.sqrt(2.0 * np.log(np.log(n))) / np.sqrt(n)


def _sign_per_node(q: GridFunction) -> np.ndarray:
    s = np.where(q.values.ravel() >= 0.0, 1.0, -1.0)
    if q.cadlag:
        left = q.left_limits.ravel()
        use_left = np.abs(left) > np.abs(q.values.ravel())
        s = np.where(use_left, np.where(left >= 0.0, 1.0, -1.0), s)
    return s


def _extremal_nodes(spec: LimitSpec):
    """Flat node indices (and signs for the sup-norm) of the extremal sets."""
    q, eps, cells = spec.q, spec.epsilon, spec.expand_cells
    shape = q.domain.shape
    up = lo = None
    signs = None
    if spec.kind in (_K.SUP, _K.AMP):
        mask = expand_node_mask(superlevel_set(q, eps).node_mask(shape), cells)
        up = np.flatnonzero(mask.ravel())
    if spec.kind in (_K.INF, _K.AMP):
        mask = expand_node_mask(sublevel_set(q, eps).node_mask(shape), cells)
        lo = np.flatnonzero(mask.ravel())
    if spec.kind is _K.SUP_NORM:
        mask = expand_node_mask(superlevel_set(abs(q), eps).node_mask(shape), cells)
        up = np.flatnonzero(mask.ravel())
        signs = _sign_per_node(q)[up]
    return up, lo, signs


def gaussian_shortcut(spec: LimitSpec) -> Optional[Shortcut]:
    """Exact limit variance when the extremal cluster is a single point."""
    if spec.kind is _K.SUP_NORM and np.abs(spec.q.all_values()).max() == 0.0:
        return None
    w = full_differentiability_witness(spec.kind, spec.q, spec.epsilon)
    if w is None:
        return None
    cov = spec.sampler.cov
    if spec.kind is _K.AMP:
        var = (
            cov(w.node_max, w.node_max)
            + cov(w.node_min, w.node_min)
            - 2.0 * cov(w.node_max, w.node_min)
        )
    else:
        var = cov(w.node, w.node)
    return Shortcut(variance=float(var), witness=w)


def _quotient_1d(kind, qv, qmax_cells, qmin_cells, path, cmax, cmin, r_n):
    v_nodes = qv + path / r_n
    if cmax is not None:
        sup = float(np.max(qmax_cells + cmax / r_n))
        inf = float(np.min(qmin_cells + cmin / r_n))
        sup = max(sup, float(v_nodes.max()))
        inf = min(inf, float(v_nodes.min()))
    else:
        sup = float(v_nodes.max())
        inf = float(v_nodes.min())
    if kind is _K.SUP_NORM:
        return max(sup, -inf)
    if kind is _K.SUP:
        return sup
    if kind is _K.INF:
        return inf
    return sup - inf


def _phi_of_q(kind, q: GridFunction) -> float:
    v = q.all_values()
    if kind is _K.SUP_NORM:
        return float(np.abs(v).max())
    if kind is _K.SUP:
        return float(v.max())
    if kind is _K.INF:
        return float(v.min())
    return float(v.max() - v.min())


def simulate_limit(
    spec: LimitSpec,
    n_paths: int,
    mode: str = "derivative",
    r_n: Optional[float] = None,
    path_transform=None,
) -> LimitReplicates:
    """Simulate the limit of the normalized statistic along sampled paths.

    mode="derivative": each replicate is the directional derivative of the
    functional at q along the path, evaluated over the precomputed extremal
    sets.  mode="quotient": each replicate is the scaled difference quotient
    at step 1/r_n, which converges to the derivative as r_n grows.
    """
    if n_paths < 1:
        raise ValueError("need at least one path")
    q = spec.q
    if spec.kind is _K.SUP_NORM and np.abs(q.all_values()).max() == 0.0:
        raise ValueError("sup-norm limit undefined at q = 0")
    sampler = spec.sampler
    out = np.empty(n_paths)
    shortcut = gaussian_shortcut(spec)

    if mode == "derivative":
        up, lo, signs = _extremal_nodes(spec)
        for i in range(n_paths):
            path = sampler.sample_path(i)
            if path_transform is not None:
                path = path_transform(path)
            if spec.kind is _K.SUP_NORM:
                out[i] = (path[up] * signs).max()
            elif spec.kind is _K.SUP:
                out[i] = path[up].max()
            elif spec.kind is _K.INF:
                out[i] = path[lo].min()
            else:
                out[i] = path[up].max() - path[lo].min()
        return LimitReplicates(out, spec.epsilon, mode, shortcut)

    if mode != "quotient":
        raise ValueError("mode must be 'derivative' or 'quotient'")
    if r_n is None or r_n <= 0:
        raise ValueError("quotient mode needs the scaling r_n")
    qv = q.values.ravel()
    phi_q = _phi_of_q(spec.kind, q)
    refine = q.domain.ndim == 1 and path_transform is None
    if refine:
        qmax_cells = np.maximum(qv[:-1], qv[1:])
        qmin_cells = np.minimum(qv[:-1], qv[1:])
    for i in range(n_paths):
        if refine:
            path, cmax, cmin = sampler.sample_path_extrema(i)
        else:
            path, cmax, cmin = sampler.sample_path(i), None, None
            if path_transform is not None:
                path = path_transform(path)
        if cmax is None:
            val = _quotient_1d(spec.kind, qv, None, None, path, None, None, r_n)
        else:
            val = _quotient_1d(
                spec.kind, qv, qmax_cells, qmin_cells, path, cmax, cmin, r_n
            )
        out[i] = r_n * (val - phi_q)
    return LimitReplicates(out, spec.epsilon, mode, shortcut)


def _recenter(reps, kind, q, reference, r_n):
    """Re-center quotient replicates at an external (dense-grid) reference.

    The quotient is computed against phi(q) on the simulation grid; when the
    statistic is centered at a dense-grid constant instead, the replicates
    shift by r_n times the (tiny) difference.
    """
    if reference is None:
        return reps
    shift = r_n * (_phi_of_q(kind, q) - reference)
    return LimitReplicates(reps.values + shift, reps.epsilon, reps.mode, reps.shortcut)


def bj_limit(
    F: Cdf,
    G: Cdf,
    grid: GridDomain,
    n_paths: int,
    epsilon: float = 0.0,
    seed: int = 0,
    stream: int = 1,
    mode: str = "derivative",
    n: Optional[int] = None,
    reference: Optional[float] = None,
    **sampler_kw,
) -> LimitReplicates:
    """Limit of the Berk-Jones statistic under the alternative.

    q = K(F, G) on the (tail-truncated) grid and the paths follow the
    weighted bridge; the null configuration F = G is rejected.
    """
    sampler = WeightedBridgeSampler(F, G, grid, seed, stream, **sampler_kw)
    pts = sampler.grid.points
    fv = _safe_cdf(F, pts)
    gv = np.clip(_safe_cdf(G, pts), 1e-300, 1.0 - 1e-16)
    qvals = _kl_extended(fv, gv)
    if qvals.max() <= 0.0:
        raise ValueError("F = G: the alternative-limit theorem does not apply")
    q = GridFunction(sampler.grid, qvals)
    spec = LimitSpec(_K.SUP, q, sampler, epsilon)
    r_n = np.sqrt(n) if n is not None else None
    reps = simulate_limit(spec, n_paths, mode=mode, r_n=r_n)
    return _recenter(reps, _K.SUP, q, reference, r_n) if mode == "quotient" else reps


def _lattice_q(C: Cdf, D: Cdf, grid: GridDomain) -> GridFunction:
    mesh = np.stack(grid.meshgrid(), axis=-1)
    return GridFunction(grid, np.asarray(C.cdf(mesh), float) - np.asarray(D.cdf(mesh), float))


def copula_limit_Tn(
    C: Cdf,
    D: Cdf,
    grid: GridDomain,
    n_paths: int,
    epsilon: float = 0.0,
    seed: int = 0,
    stream: int = 1,
    bandwidth: Optional[float] = None,
    mode: str = "derivative",
    n: Optional[int] = None,
    reference: Optional[float] = None,
) -> LimitReplicates:
    """Limit of sqrt(n) (||C_n - D|| - ||C - D||) via the copula limit process."""
    q = _lattice_q(C, D, grid)
    if np.abs(q.values).max() == 0.0:
        raise ValueError("C = D on the lattice: limit degenerate")
    partials = copula_partials(C, grid, h=bandwidth)
    sampler = CopulaLimitSampler(C, grid, partials, seed, stream)
    spec = LimitSpec(_K.SUP_NORM, q, sampler, epsilon)
    r_n = np.sqrt(n) if n is not None else None
    reps = simulate_limit(spec, n_paths, mode=mode, r_n=r_n)
    return _recenter(reps, _K.SUP_NORM, q, reference, r_n) if mode == "quotient" else reps


class _ReflectedDifferenceSampler(PathSampler):
    """g*(u, v) = g(u, v) - g(1-u, 1-v) built on a copula-limit sampler."""

    def __init__(self, base: CopulaLimitSampler):
        super().__init__(base.grid, base.seed, base.stream)
        self.base = base
        shape = base.grid.shape
        for a in base.grid.axes:
            if not np.allclose(a + a[::-1], 1.0, atol=1e-12):
                raise ValueError("lattice not closed under reflection")
        flat = np.arange(base.grid.size).reshape(shape)
        self._reflect = flat[::-1, ::-1].ravel()

    def sample_path(self, index):
        p = self.base.sample_path(index)
        return p - p[self._reflect]

    def cov(self, i, j):
        r = self._reflect
        b = self.base.cov
        return b(i, j) - b(i, r[j]) - b(r[i], j) + b(r[i], r[j])


def copula_symmetry_limit(
    C: Cdf,
    grid: GridDomain,
    n_paths: int,
    epsilon: float = 0.0,
    seed: int = 0,
    stream: int = 1,
    bandwidth: Optional[float] = None,
    mode: str = "derivative",
    n: Optional[int] = None,
    reference: Optional[float] = None,
) -> LimitReplicates:
    """Limit of the radial-symmetry statistic for a bivariate copula.

    q = C - C_bar on the lattice; each path is reflected and differenced
    before the sup-norm derivative is taken.  Radially symmetric copulas
    (q identically zero) are rejected.
    """
    if grid.ndim != 2:
        raise ValueError("bivariate lattices only")
    mesh = np.stack(grid.meshgrid(), axis=-1)
    cvals = np.asarray(C.cdf(mesh), float)
    cbar = survival_copula(GridFunction(grid, cvals))
    q = GridFunction(grid, cvals - cbar.values)
    if np.abs(q.values).max() == 0.0:
        raise ValueError("copula is radially symmetric on the lattice")
    partials = copula_partials(C, grid, h=bandwidth)
    sampler = _ReflectedDifferenceSampler(CopulaLimitSampler(C, grid, partials, seed, stream))
    spec = LimitSpec(_K.SUP_NORM, q, sampler, epsilon)
    r_n = np.sqrt(n) if n is not None else None
    reps = simulate_limit(spec, n_paths, mode=mode, r_n=r_n)
    return _recenter(reps, _K.SUP_NORM, q, reference, r_n) if mode == "quotient" else reps


def mmd_limit(
    gaps: np.ndarray,
    sigma_p: np.ndarray,
    sigma_q: np.ndarray,
    lam: float,
    n_paths: int,
    tol: float = 0.0,
    symmetric: bool = False,
    seed: int = 0,
    stream: int = 1,
    mode: str = "derivative",
    r_n: Optional[float] = None,
) -> LimitReplicates:
    """Limit of the finite-class discrepancy statistic.

    The argmax set collects functions whose mean gap is within tol of the
    maximum (and, for symmetric classes, negated functions attaining the
    maximum of -gap); replicates are maxima of the mixture Gaussian vector
    over that set.
    """
    gaps = np.asarray(gaps, float)
    if gaps.size < 1:
        raise ValueError("empty function class")
    if not 0.0 < lam < 1.0:
        raise ValueError("lambda must lie in (0, 1)")
    if not np.all(np.isfinite(gaps)):
        raise ValueError("gaps must be finite")
    sigma = (1.0 - lam) * np.asarray(sigma_p, float) + lam * np.asarray(sigma_q, float)
    sampler = FiniteClassSampler(sigma, seed, stream)
    target = np.abs(gaps).max() if symmetric else gaps.max()
    pos = np.flatnonzero(gaps >= target - tol)
    neg = np.flatnonzero(-gaps >= target - tol) if symmetric else np.empty(0, np.intp)
    shortcut = None
    if pos.size + neg.size == 1:
        k = pos[0] if pos.size else neg[0]
        shortcut = Shortcut(variance=float(sigma[k, k]), witness=int(k))
    out = np.empty(n_paths)
    if mode == "derivative":
        for i in range(n_paths):
            g = sampler.sample_path(i)
            best = -np.inf
            if pos.size:
                best = max(best, g[pos].max())
            if neg.size:
                best = max(best, (-g[neg]).max())
            out[i] = best
        return LimitReplicates(out, tol, mode, shortcut)
    if r_n is None or r_n <= 0:
        raise ValueError("quotient mode needs the scaling r_n")
    base = target
    for i in range(n_paths):
        g = sampler.sample_path(i)
        v = gaps + g / r_n
        val = np.abs(v).max() if symmetric else v.max()
        out[i] = r_n * (val - base)
    return LimitReplicates(out, tol, "quotient", shortcut)


def compare_distributions(a: np.ndarray, b: np.ndarray) -> float:
    """Exact two-sample Kolmogorov distance between replicate sets."""
    a = np.sort(np.asarray(a, float).ravel())
    b = np.sort(np.asarray(b, float).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("both replicate sets must be nonempty")
    pooled = np.concatenate([a, b])
    pooled.sort(kind="mergesort")
    fa = np.searchsorted(a, pooled, side="right") / a.size
    fb = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.abs(fa - fb).max())
