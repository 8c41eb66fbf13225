"""Discrete function spaces: grids, grid functions and level sets.

A GridFunction is the finite stand-in for a bounded function on an arbitrary
index set: values on a 1-d grid (optionally with a left-limit channel for
cadlag step functions) or on a d-dimensional lattice.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

# channel tags for cadlag functions in d=1
CH_VALUE = 0
CH_LEFT = 1


class FunctionalKind(Enum):
    """The four supremum-type functionals."""

    SUP_NORM = "norm"  # sup |f|
    SUP = "sup"
    INF = "inf"
    AMP = "amp"  # sup f - inf f


def extended_to_unit(x):
    """Order-preserving homeomorphism of the extended line onto [0, 1].

    Maps -inf -> 0 and +inf -> 1; used to give compactified grids a metric.
    """
    return 0.5 + np.arctan(x) / np.pi


@dataclass(frozen=True)
class GridDomain:
    """A finite 1-d grid or d-dimensional lattice of evaluation points.

    Parameters
    ----------
    axes : tuple of ndarray
        Strictly increasing abscissae per axis, each of length >= 2.
    compactified : bool
        True when the first/last abscissae of every axis are +-inf sentinels
        standing for the endpoints of the extended line.
    """

    axes: tuple
    compactified: bool = False

    def __post_init__(self):
        axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        if len(axes) == 0:
            raise ValueError("at least one axis required")
        for a in axes:
            if a.ndim != 1 or a.size < 2:
                raise ValueError("each axis needs >= 2 points")
            if not np.all(np.diff(a) > 0):
                raise ValueError("axis abscissae must be strictly increasing")
        if self.compactified:
            for a in axes:
                if not (np.isneginf(a[0]) and np.isposinf(a[-1])):
                    raise ValueError("compactified axes need -inf/+inf sentinels")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def line(cls, points, compactified=False):
        return cls(axes=(np.asarray(points, dtype=float),), compactified=compactified)

    @classmethod
    def compactified_line(cls, interior_points):
        pts = np.concatenate([[-np.inf], np.asarray(interior_points, float), [np.inf]])
        return cls(axes=(pts,), compactified=True)

    @classmethod
    def lattice(cls, *axes):
        return cls(axes=tuple(np.asarray(a, float) for a in axes))

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple:
        return tuple(a.size for a in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def points(self) -> np.ndarray:
        """1-d abscissae (d=1 only)."""
        if self.ndim != 1:
            raise ValueError("points is defined for d=1 grids")
        return self.axes[0]

    def node_coords(self, flat_index):
        """Coordinates of flat node index/indices, shape (..., ndim)."""
        idx = np.unravel_index(np.asarray(flat_index), self.shape)
        return np.stack([self.axes[k][idx[k]] for k in range(self.ndim)], axis=-1)

    def meshgrid(self):
        return np.meshgrid(*self.axes, indexing="ij")

    def __eq__(self, other):
        if not isinstance(other, GridDomain):
            return NotImplemented
        return (
            self.compactified == other.compactified
            and len(self.axes) == len(other.axes)
            and all(np.array_equal(a, b) for a, b in zip(self.axes, other.axes))
        )


@dataclass(frozen=True)
class GridFunction:
    """Real values on a grid, optionally with a left-limit channel (d=1).

    `values` has the lattice shape of the domain.  For cadlag 1-d functions
    the node value is the right limit and `left_limits` stores the limit from
    below at each node.
    """

    domain: GridDomain
    values: np.ndarray
    left_limits: Optional[np.ndarray] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.domain.shape:
            v = v.reshape(self.domain.shape)
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite")
        object.__setattr__(self, "values", v)
        if self.left_limits is not None:
            if self.domain.ndim != 1:
                raise ValueError("left-limit channel only supported for d=1")
            ll = np.asarray(self.left_limits, dtype=float).reshape(self.domain.shape)
            if not np.all(np.isfinite(ll)):
                raise ValueError("left limits must be finite")
            object.__setattr__(self, "left_limits", ll)

    @property
    def cadlag(self) -> bool:
        return self.left_limits is not None

    @classmethod
    def from_callable(cls, domain, fn):
        if domain.ndim == 1:
            return cls(domain, fn(domain.points))
        mesh = domain.meshgrid()
        return cls(domain, fn(*mesh))

    def channel(self, ch):
        return self.values if ch == CH_VALUE else self.left_limits

    def all_values(self) -> np.ndarray:
        """Both channels concatenated (value channel first)."""
        if self.cadlag:
            return np.concatenate([self.values.ravel(), self.left_limits.ravel()])
        return self.values.ravel()

    def _aligned_left(self, other_cadlag):
        # continuous functions have left limit == value at every node
        if self.cadlag:
            return self.left_limits
        return self.values if other_cadlag else None

    def __add__(self, other):
        if isinstance(other, GridFunction):
            if self.domain != other.domain:
                raise ValueError("grid mismatch")
            cad = self.cadlag or other.cadlag
            ll = None
            if cad:
                ll = self._aligned_left(True) + other._aligned_left(True)
            return GridFunction(self.domain, self.values + other.values, ll)
        return GridFunction(
            self.domain,
            self.values + other,
            None if not self.cadlag else self.left_limits + other,
        )

    def __sub__(self, other):
        return self + (other * -1.0 if isinstance(other, GridFunction) else -other)

    def __mul__(self, scalar):
        return GridFunction(
            self.domain,
            self.values * scalar,
            None if not self.cadlag else self.left_limits * scalar,
        )

    __rmul__ = __mul__

    def __abs__(self):
        return GridFunction(
            self.domain,
            np.abs(self.values),
            None if not self.cadlag else np.abs(self.left_limits),
        )

    def __neg__(self):
        return self * -1.0


@dataclass(frozen=True)
class LevelSet:
    """Grid nodes realizing a superlevel/sublevel or tolerance-argmax set.

    `indices` are flat node indices, `channels` tags each entry as the value
    or left-limit channel.  Clustered sets (from argmax_set/argmin_set) carry
    the number of one-cell-adjacency clusters and one representative node per
    cluster.
    """

    indices: np.ndarray
    channels: np.ndarray
    epsilon: float
    cluster_count: Optional[int] = None
    representatives: Optional[np.ndarray] = None

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.intp)
        ch = np.asarray(self.channels, dtype=np.int8)
        if idx.size == 0:
            raise ValueError("level set cannot be empty on a finite grid")
        if idx.shape != ch.shape:
            raise ValueError("indices/channels length mismatch")
        order = np.lexsort((ch, idx))
        idx, ch = idx[order], ch[order]
        keep = np.ones(idx.size, bool)
        keep[1:] = (np.diff(idx) != 0) | (np.diff(ch) != 0)
        object.__setattr__(self, "indices", idx[keep])
        object.__setattr__(self, "channels", ch[keep])

    @property
    def node_indices(self) -> np.ndarray:
        """Distinct flat node indices (channels merged)."""
        return np.unique(self.indices)

    def node_mask(self, shape) -> np.ndarray:
        mask = np.zeros(shape, dtype=bool)
        mask.ravel()[self.node_indices] = True
        return mask
