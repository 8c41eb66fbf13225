"""Seeded Gaussian path samplers for the limit processes.

Kinds: 1-d F-Brownian bridges (exact time-change construction), d>=2
tied-down sheets (white-noise cell increments), copula limit processes,
weighted bridges, two-sample mixtures, and finite-class Gaussian vectors
(pivoted-Cholesky factorization with rank truncation).

Every sampler draws replicate `index` from its own counter-based substream,
so paths are pure functions of (seed, stream, index).
"""

import numpy as np
from scipy.linalg import lapack

from .dists import Cdf
from .empirical import _safe_cdf
from .grid import GridDomain, GridFunction
from .rng import substream

FACTOR_RESIDUAL_TOL = 1e-8
PIVOT_TRUNCATION = 1e-12


class PathSampler:
    """Zero-mean Gaussian path generator on a grid (or finite index set)."""

    def __init__(self, grid, seed, stream):
        self.grid = grid
        self.seed = int(seed)
        self.stream = int(stream)

    @property
    def n_nodes(self) -> int:
        return self.grid.size

    def _rng(self, index):
        return substream(self.seed, self.stream, index)

    def sample_path(self, index: int) -> np.ndarray:
        """Flat path values; deterministic in (seed, stream, index)."""
        raise NotImplementedError

    def sample_path_extrema(self, index: int):
        """(node values, per-cell maxima, per-cell minima) for 1-d kinds.

        Samplers without a cell-refinement scheme return (values, None, None);
        the node values are bit-identical to sample_path(index).
        """
        return self.sample_path(index), None, None

    def cov(self, i, j):
        """Covariance entries for flat node indices (broadcasting)."""
        raise NotImplementedError

    def cov_matrix(self) -> np.ndarray:
        idx = np.arange(self.n_nodes)
        return self.cov(idx[:, None], idx[None, :])

    def path_function(self, index: int) -> GridFunction:
        return GridFunction(self.grid, self.sample_path(index))


def _bridge_max(a, b, dt, u):
    """Exact conditional max of a Brownian bridge over one cell."""
    with np.errstate(invalid="ignore"):
        m = 0.5 * (a + b + np.sqrt((a - b) ** 2 - 2.0 * dt * np.log(u)))
    return np.where(dt > 0, m, np.maximum(a, b))


def _bridge_min(a, b, dt, u):
    with np.errstate(invalid="ignore"):
        m = 0.5 * (a + b - np.sqrt((a - b) ** 2 - 2.0 * dt * np.log(u)))
    return np.where(dt > 0, m, np.minimum(a, b))


class BridgeSampler1D(PathSampler):
    """B(F(x)) on a 1-d grid via the exact time-change of a standard bridge.

    The sequential conditional recursion for bridge values at sorted times
    has the closed form B(t) = (1-t) * cumsum(sqrt(diff(t/(1-t))) * z), which
    is O(N) per path and pins B to 0 exactly where F is 0 or 1.
    """

    def __init__(self, F, grid: GridDomain, seed: int, stream: int = 0):
        super().__init__(grid, seed, stream)
        if grid.ndim != 1:
            raise ValueError("BridgeSampler1D needs a 1-d grid")
        t = F if isinstance(F, np.ndarray) else _safe_cdf(F, grid.points)
        if np.any(np.diff(t) < 0) or np.any(t < 0) or np.any(t > 1):
            raise ValueError("F must be a nondecreasing cdf on the grid")
        self.t = t
        with np.errstate(divide="ignore", invalid="ignore"):
            tau = np.where(t < 1.0, t / (1.0 - t), np.inf)
        dtau = np.diff(np.concatenate([[0.0], tau]))
        dtau[~np.isfinite(dtau)] = 0.0
        self._sq_dtau = np.sqrt(np.clip(dtau, 0.0, None))
        self._one_minus_t = 1.0 - t
        # per-cell bridge time, exact for the conditional cell law
        self.cell_dt = np.diff(t)

    def sample_path(self, index):
        rng = self._rng(index)
        z = rng.standard_normal(self.n_nodes)
        return self._one_minus_t * np.cumsum(self._sq_dtau * z)

    def sample_path_extrema(self, index):
        rng = self._rng(index)
        z = rng.standard_normal(self.n_nodes)
        path = self._one_minus_t * np.cumsum(self._sq_dtau * z)
        u = rng.random(self.n_nodes - 1)
        v = rng.random(self.n_nodes - 1)
        a, b = path[:-1], path[1:]
        return path, _bridge_max(a, b, self.cell_dt, u), _bridge_min(a, b, self.cell_dt, v)

    def cov(self, i, j):
        t = self.t
        return t[np.minimum(i, j)] - t[i] * t[j]


class SheetBridgeSampler(PathSampler):
    """F-Brownian sheet bridge on a d>=2 lattice via white-noise increments.

    B(u) = W(R_u) - F(u) W(total) where W has independent cell increments
    with variance equal to the F-mass of each cell; the cumulative sums give
    the exact covariance F(u ^ v) - F(u) F(v) with no factorization.
    """

    def __init__(self, F, grid: GridDomain, seed: int, stream: int = 0):
        super().__init__(grid, seed, stream)
        if grid.ndim < 2:
            raise ValueError("SheetBridgeSampler needs a lattice")
        if isinstance(F, np.ndarray):
            fv = F
        else:
            mesh = np.stack(grid.meshgrid(), axis=-1)
            fv = np.asarray(F.cdf(mesh), float)
        if np.any(fv < -1e-12) or np.any(fv > 1 + 1e-12):
            raise ValueError("cdf values outside [0, 1]")
        self.fvals = np.clip(fv, 0.0, 1.0)
        # cell masses including the unbounded cells below the first abscissae
        padded = self.fvals
        for ax in range(grid.ndim):
            pad = [(0, 0)] * grid.ndim
            pad[ax] = (1, 0)
            padded = np.pad(padded, pad)
        mass = padded
        for ax in range(grid.ndim):
            mass = np.diff(mass, axis=ax)
        if np.any(mass < -1e-9):
            raise ValueError("cdf is not coordinatewise monotone (negative cell mass)")
        self._cell_sd = np.sqrt(np.clip(mass, 0.0, None))
        top = self.fvals.ravel()[-1]
        self._outside_sd = np.sqrt(max(0.0, 1.0 - top))

    def sample_path(self, index):
        rng = self._rng(index)
        z = rng.standard_normal(self._cell_sd.shape)
        z_out = rng.standard_normal()
        w = self._cell_sd * z
        for ax in range(self.grid.ndim):
            w = np.cumsum(w, axis=ax)
        total = w.ravel()[-1] + self._outside_sd * z_out
        return (w - self.fvals * total).ravel()

    def cov(self, i, j):
        shape = self.grid.shape
        ii = np.unravel_index(np.asarray(i), shape)
        jj = np.unravel_index(np.asarray(j), shape)
        mins = tuple(np.minimum(a, b) for a, b in zip(ii, jj))
        f = self.fvals
        return f[mins] - f[ii] * f[jj]


def bridge_sampler(F, grid: GridDomain, seed: int, stream: int = 0) -> PathSampler:
    """F-Brownian bridge sampler; 1-d time-change or d>=2 sheet construction."""
    if grid.ndim == 1:
        return BridgeSampler1D(F, grid, seed, stream)
    return SheetBridgeSampler(F, grid, seed, stream)


class CopulaLimitSampler(PathSampler):
    """Limit process of the empirical copula.

    Samples one C-Brownian bridge on the lattice and subtracts the partial
    derivatives times the bridge's own one-dimensional margins (the margins
    are read off the same path at (1, ..., u_i, ..., 1)).
    """

    def __init__(self, C, grid: GridDomain, partials, seed: int, stream: int = 0):
        super().__init__(grid, seed, stream)
        if grid.ndim < 2:
            raise ValueError("copula limit lives on a lattice")
        for a in grid.axes:
            if not np.isclose(a[-1], 1.0):
                raise ValueError("each lattice axis must end at 1 (margins live there)")
        if partials is None or len(partials) != grid.ndim:
            raise ValueError("need one partial-derivative field per coordinate")
        self._sheet = SheetBridgeSampler(C, grid, seed, stream)
        self.partials = tuple(np.asarray(p.values, float).ravel() for p in partials)
        shape = grid.shape
        flat_multi = np.unravel_index(np.arange(grid.size), shape)
        self._margin_idx = []
        for k in range(grid.ndim):
            coords = [np.full(grid.size, s - 1, dtype=np.intp) for s in shape]
            coords[k] = flat_multi[k]
            self._margin_idx.append(np.ravel_multi_index(tuple(coords), shape))

    def sample_path(self, index):
        b = self._sheet.sample_path(index)
        path = b.copy()
        for k in range(self.grid.ndim):
            path -= self.partials[k] * b[self._margin_idx[k]]
        return path

    def cov(self, i, j):
        i = np.asarray(i)
        j = np.asarray(j)
        sheet = self._sheet

        def terms(a):
            idx = [(None, a)]
            for k in range(self.grid.ndim):
                idx.append((k, self._margin_idx[k][a]))
            return idx

        total = np.zeros(np.broadcast(i, j).shape)
        for ki, ai in terms(i):
            for kj, aj in terms(j):
                w = np.ones_like(total)
                if ki is not None:
                    w = w * -self.partials[ki][i]
                if kj is not None:
                    w = w * -self.partials[kj][j]
                total = total + w * sheet.cov(ai, aj)
        return total


class WeightedBridgeSampler(PathSampler):
    """Bridge weighted by the log-odds ratio of two cdfs, tail-truncated.

    W = B_F * w with w = log(F (1-G) / (G (1-F))); nodes where the weight
    diverges are dropped (F(1-F) below `min_var` or |w| above `max_weight`),
    which leaves the interior where the divergence functional peaks.
    """

    def __init__(
        self,
        F: Cdf,
        G: Cdf,
        grid: GridDomain,
        seed: int,
        stream: int = 0,
        min_var: float = 1e-6,
        max_weight: float = 50.0,
    ):
        if grid.ndim != 1:
            raise ValueError("weighted bridge is univariate")
        pts = grid.points
        fv = _safe_cdf(F, pts)
        gv = _safe_cdf(G, pts)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.log(fv * (1.0 - gv)) - np.log(gv * (1.0 - fv))
        keep = (fv * (1.0 - fv) >= min_var) & np.isfinite(w) & (np.abs(w) <= max_weight)
        if not keep.any():
            raise ValueError("tail truncation removed every node")
        if not np.all(np.isfinite(w[keep])):
            raise ValueError("weight non-finite on an interior node")
        sub = GridDomain.line(pts[keep])
        super().__init__(sub, seed, stream)
        self.kept_mask = keep
        self.weights = w[keep]
        self._bridge = BridgeSampler1D(fv[keep], sub, seed, stream)
        wm = 0.5 * (self.weights[:-1] + self.weights[1:])
        self._w_pairs = (self.weights[:-1], self.weights[1:], wm)
        # within-cell weight variation treated as constant
        self.cell_dt = (wm**2) * self._bridge.cell_dt

    def sample_path(self, index):
        return self.weights * self._bridge.sample_path(index)

    def sample_path_extrema(self, index):
        b, bmax, bmin = self._bridge.sample_path_extrema(index)
        path = self.weights * b
        wl, wr, wm = self._w_pairs
        a, c = b[:-1], b[1:]
        cand = np.stack([wl * a, wr * c, wm * bmax, wm * bmin])
        return path, cand.max(axis=0), cand.min(axis=0)

    def cov(self, i, j):
        return self.weights[i] * self.weights[j] * self._bridge.cov(i, j)


class MixtureSampler(PathSampler):
    """Two-sample limit sqrt(1-lam) * A - sqrt(lam) * B from independent samplers."""

    def __init__(self, lam: float, a: PathSampler, b: PathSampler, seed: int, stream: int = 0):
        if not 0.0 < lam < 1.0:
            raise ValueError("lambda must lie in (0, 1)")
        if a.grid != b.grid:
            raise ValueError("component samplers must share a grid")
        if (a.seed, a.stream) == (b.seed, b.stream):
            raise ValueError("component samplers must use independent streams")
        super().__init__(a.grid, seed, stream)
        self.lam = float(lam)
        self.a, self.b = a, b
        self._wa = np.sqrt(1.0 - lam)
        self._wb = np.sqrt(lam)
        self.cell_dt = None
        if getattr(a, "cell_dt", None) is not None and getattr(b, "cell_dt", None) is not None:
            self.cell_dt = (1.0 - lam) * a.cell_dt + lam * b.cell_dt

    def sample_path(self, index):
        return self._wa * self.a.sample_path(index) - self._wb * self.b.sample_path(index)

    def sample_path_extrema(self, index):
        path = self.sample_path(index)
        if self.cell_dt is None:
            return path, None, None
        rng = self._rng(index)
        u = rng.random(path.size - 1)
        v = rng.random(path.size - 1)
        pa, pb = path[:-1], path[1:]
        return (
            path,
            _bridge_max(pa, pb, self.cell_dt, u),
            _bridge_min(pa, pb, self.cell_dt, v),
        )

    def cov(self, i, j):
        return (1.0 - self.lam) * self.a.cov(i, j) + self.lam * self.b.cov(i, j)


class FiniteClassSampler(PathSampler):
    """K-variate zero-mean Gaussian from a pivoted-Cholesky factor of Sigma.

    Pivots at or below PIVOT_TRUNCATION times the largest pivot are dropped;
    the retained factor must reproduce Sigma to FACTOR_RESIDUAL_TOL in
    relative Frobenius norm, otherwise Sigma is rejected as non-PSD.
    """

    def __init__(self, sigma: np.ndarray, seed: int, stream: int = 0):
        sigma = np.asarray(sigma, float)
        if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
            raise ValueError("Sigma must be square")
        if not np.allclose(sigma, sigma.T, atol=1e-10):
            raise ValueError("Sigma must be symmetric")
        self.sigma = sigma
        k = sigma.shape[0]
        self._k = k
        norm = np.linalg.norm(sigma)
        if norm == 0.0:
            self.factor = np.zeros((k, 0))
            self.rank = 0
        else:
            tol = PIVOT_TRUNCATION * max(np.max(np.diag(sigma)), 0.0)
            c, piv, rank, info = lapack.dpstrf(sigma, lower=1, tol=tol)
            if info < 0:
                raise ValueError("factorization failed")
            lower = np.tril(c)[:, :rank]
            inv = np.empty(k, dtype=np.intp)
            inv[piv - 1] = np.arange(k)
            self.factor = lower[inv]
            self.rank = int(rank)
            resid = np.linalg.norm(self.factor @ self.factor.T - sigma) / norm
            if resid > FACTOR_RESIDUAL_TOL:
                raise ValueError(
                    f"Sigma is not PSD within tolerance (factor residual {resid:.2e})"
                )
        PathSampler.__init__(self, None, seed, stream)

    @property
    def n_nodes(self):
        return self._k

    def sample_path(self, index):
        rng = self._rng(index)
        z = rng.standard_normal(self.rank)
        return self.factor @ z

    def cov(self, i, j):
        return self.sigma[i, j]

    def cov_matrix(self):
        return self.sigma


def finite_class_sampler(sigma, seed: int, stream: int = 0) -> FiniteClassSampler:
    return FiniteClassSampler(sigma, seed, stream)


def copula_limit_sampler(C, grid, partials, seed, stream=0) -> CopulaLimitSampler:
    return CopulaLimitSampler(C, grid, partials, seed, stream)


def weighted_bridge_sampler(F, G, grid, seed, stream=0, **kw) -> WeightedBridgeSampler:
    return WeightedBridgeSampler(F, G, grid, seed, stream, **kw)


def mixture_sampler(lam, a, b, seed, stream=0) -> MixtureSampler:
    return MixtureSampler(lam, a, b, seed, stream)
