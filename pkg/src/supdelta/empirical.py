"""Empirical distribution functions, processes, copulas and survival copulas."""

import io
from dataclasses import dataclass

import numpy as np

from .dists import Cdf
from .grid import GridDomain, GridFunction


@dataclass(frozen=True)
class Sample:
    """n observations of d real coordinates."""

    data: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.data, dtype=float)
        if d.ndim == 1:
            d = d[:, None]
        if d.ndim != 2 or d.shape[0] < 1:
            raise ValueError("sample must be a nonempty (n, d) array")
        if not np.all(np.isfinite(d)):
            raise ValueError("sample entries must be finite")
        object.__setattr__(self, "data", d)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    @property
    def x(self) -> np.ndarray:
        """1-d view (d=1 samples only)."""
        if self.dim != 1:
            raise ValueError("x is defined for univariate samples")
        return self.data[:, 0]

    @classmethod
    def from_csv(cls, path) -> "Sample":
        """One row per observation, d columns; a header line is skipped."""
        with open(path, "r") as fh:
            first = fh.readline()
            rest = fh.read()
        try:
            head = np.loadtxt(io.StringIO(first), delimiter=",", ndmin=2)
            body = first + rest
        except ValueError:
            body = rest
        data = np.loadtxt(io.StringIO(body), delimiter=",", ndmin=2)
        return cls(data)


def ecdf_at(sorted_x: np.ndarray, x, side: str = "right") -> np.ndarray:
    """F_n(x) (side='right') or its left limit F_n(x-) (side='left')."""
    return np.searchsorted(sorted_x, x, side=side) / sorted_x.size


def ecdf(sample: Sample) -> GridFunction:
    """Empirical cdf as a grid function.

    d=1: cadlag step function on the sorted distinct sample points, with the
    left-limit channel holding the value just below each jump.  d>=2: values
    of F_n on the lattice of per-axis sorted distinct coordinates.
    """
    if sample.dim == 1:
        xs = np.sort(sample.x)
        dom = GridDomain.compactified_line(np.unique(xs))
        pts = dom.points[1:-1]
        vals = np.concatenate([[0.0], ecdf_at(xs, pts, "right"), [1.0]])
        left = np.concatenate([[0.0], ecdf_at(xs, pts, "left"), [1.0]])
        return GridFunction(dom, vals, left_limits=left)
    axes = tuple(np.unique(sample.data[:, k]) for k in range(sample.dim))
    for a in axes:
        if a.size < 2:
            raise ValueError("each axis needs >= 2 distinct coordinates")
    dom = GridDomain.lattice(*axes)
    return GridFunction(dom, multivariate_ecdf_on_lattice(sample, axes))


def multivariate_ecdf_on_lattice(sample: Sample, axes) -> np.ndarray:
    """F_n evaluated on a lattice: cumulative cell counts divided by n."""
    shape = tuple(a.size for a in axes)
    counts = np.zeros(shape, dtype=np.int64)
    digits = []
    inside = np.ones(sample.n, dtype=bool)
    for k, a in enumerate(axes):
        d = np.searchsorted(a, sample.data[:, k], side="left")
        inside &= d < a.size
        digits.append(np.minimum(d, a.size - 1))
    if inside.any():
        np.add.at(counts, tuple(d[inside] for d in digits), 1)
    for k in range(len(axes)):
        counts = np.cumsum(counts, axis=k)
    return counts / sample.n


def empirical_process(sample: Sample, F: Cdf, grid: GridDomain) -> GridFunction:
    """sqrt(n) (F_n - F) on the grid, with both channels in d=1."""
    rn = np.sqrt(sample.n)
    if sample.dim == 1:
        if grid.ndim != 1:
            raise ValueError("grid dimension mismatch")
        xs = np.sort(sample.x)
        pts = grid.points
        vals = rn * (ecdf_at(xs, pts, "right") - _safe_cdf(F, pts))
        left = rn * (ecdf_at(xs, pts, "left") - _safe_cdf(F, pts, left=True))
        return GridFunction(grid, vals, left_limits=left)
    fn = multivariate_ecdf_on_lattice(sample, grid.axes)
    mesh = np.stack(grid.meshgrid(), axis=-1)
    fv = F.cdf(mesh)
    if not np.all(np.isfinite(fv)):
        raise ValueError("reference cdf not evaluable on the grid")
    return GridFunction(grid, rn * (fn - fv))


def _safe_cdf(F: Cdf, pts, left=False):
    vals = F.cdf_left(pts) if left else F.cdf(pts)
    vals = np.asarray(vals, float)
    # +-inf sentinels evaluate to the cdf limits
    vals = np.where(np.isneginf(pts), 0.0, vals)
    vals = np.where(np.isposinf(pts), 1.0, vals)
    if not np.all(np.isfinite(vals)):
        raise ValueError("reference cdf not evaluable on the grid")
    return vals


def max_ranks(sample: Sample) -> np.ndarray:
    """Per-coordinate ranks with ties taking the maximal rank, shape (n, d)."""
    out = np.empty_like(sample.data, dtype=np.intp)
    for k in range(sample.dim):
        col = sample.data[:, k]
        xs = np.sort(col)
        out[:, k] = np.searchsorted(xs, col, side="right")
    return out


def generalized_inverse_index(n: int, u) -> np.ndarray:
    """Index k with F_n^{-1}(u) = x_(k): the smallest k with k/n >= u."""
    u = np.asarray(u, float)
    k = np.ceil(n * u - 1e-12).astype(np.intp)
    return np.clip(k, 0, n)


def empirical_copula(sample: Sample, grid: GridDomain) -> GridFunction:
    """Empirical copula on a lattice in [0,1]^d via rank counts."""
    if sample.dim < 2:
        raise ValueError("empirical copula needs d >= 2")
    if grid.ndim != sample.dim:
        raise ValueError("grid dimension mismatch")
    ranks = max_ranks(sample)
    thresh = [generalized_inverse_index(sample.n, a) for a in grid.axes]
    shape = tuple(a.size for a in grid.axes)
    counts = np.zeros(shape, dtype=np.int64)
    digits = []
    inside = np.ones(sample.n, dtype=bool)
    for k, t in enumerate(thresh):
        d = np.searchsorted(t, ranks[:, k], side="left")
        inside &= d < t.size
        digits.append(np.minimum(d, t.size - 1))
    if inside.any():
        np.add.at(counts, tuple(d[inside] for d in digits), 1)
    for k in range(sample.dim):
        counts = np.cumsum(counts, axis=k)
    return GridFunction(grid, counts / sample.n)


def rank_lattice_copula(sample: Sample) -> np.ndarray:
    """C_n on the full rank lattice {0, 1/n, ..., 1}^2 (d=2 fast path)."""
    if sample.dim != 2:
        raise ValueError("rank-lattice fast path is for d = 2")
    n = sample.n
    r = max_ranks(sample)
    counts = np.zeros((n + 1, n + 1), dtype=np.int32)
    np.add.at(counts, (r[:, 0], r[:, 1]), 1)
    counts = counts.cumsum(axis=0).cumsum(axis=1)
    return counts / n


def survival_copula(C: GridFunction) -> GridFunction:
    """Survival copula on a reflection-closed square lattice.

    C_bar(u, v) = u + v - 1 + C(1-u, 1-v); the lattice must map onto itself
    under u -> 1-u so the reflected values exist at lattice nodes.
    """
    dom = C.domain
    if dom.ndim != 2:
        raise ValueError("survival copula is bivariate")
    for a in dom.axes:
        if not np.allclose(a + a[::-1], 1.0, atol=1e-12):
            raise ValueError("lattice not closed under u -> 1 - u")
    U, V = dom.meshgrid()
    vals = U + V - 1.0 + C.values[::-1, ::-1]
    return GridFunction(dom, vals)


def copula_partials(C, grid: GridDomain, h: float = None):
    """First-order partials of a copula by central finite differences.

    One-sided within h of the boundary, clamped to [0, 1].  `C` is either an
    evaluable Cdf or a GridFunction on `grid` (then h is one lattice cell).
    """
    if grid.ndim < 2:
        raise ValueError("partials need a lattice")
    mesh = grid.meshgrid()
    out = []
    if isinstance(C, GridFunction):
        if C.domain != grid:
            raise ValueError("grid mismatch")
        for k in range(grid.ndim):
            a = grid.axes[k]
            d = np.gradient(C.values, a, axis=k)
            out.append(GridFunction(grid, np.clip(d, 0.0, 1.0)))
        return tuple(out)
    for k in range(grid.ndim):
        a = grid.axes[k]
        hk = h if h is not None else float(np.min(np.diff(a)))
        hk = min(hk, float(np.min(np.diff(a))))
        if hk <= 0:
            raise ValueError("bandwidth must be > 0")
        up = [m.copy() for m in mesh]
        dn = [m.copy() for m in mesh]
        up[k] = np.clip(mesh[k] + hk, a[0], a[-1])
        dn[k] = np.clip(mesh[k] - hk, a[0], a[-1])
        num = C.cdf(np.stack(up, axis=-1)) - C.cdf(np.stack(dn, axis=-1))
        den = up[k] - dn[k]
        out.append(GridFunction(grid, np.clip(num / den, 0.0, 1.0)))
    return tuple(out)
