"""Supremum-type functionals and their directional derivatives.

Implements the four maps (sup-norm, sup, inf, amplitude) on grid functions,
their superlevel/sublevel sets, the directional derivative realized as an
extremum over an epsilon-level set, the finite-step difference quotient used
as its independent oracle, and tolerance-argmax sets with one-cell clustering.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import ndimage

from .grid import CH_LEFT, CH_VALUE, FunctionalKind, GridFunction, LevelSet

_K = FunctionalKind


def evaluate(kind: _K, f: GridFunction) -> float:
    """Value of the functional on a grid function (all channels)."""
    v = f.all_values()
    if kind is _K.SUP_NORM:
        return float(np.abs(v).max())
    if kind is _K.SUP:
        return float(v.max())
    if kind is _K.INF:
        return float(v.min())
    if kind is _K.AMP:
        return float(v.max() - v.min())
    raise ValueError(f"unknown kind {kind}")


def _channel_entries(f: GridFunction):
    """(flat indices, channel tags, values) over every populated channel."""
    n = f.values.size
    idx = np.arange(n, dtype=np.intp)
    if f.cadlag:
        indices = np.concatenate([idx, idx])
        channels = np.concatenate(
            [np.full(n, CH_VALUE, np.int8), np.full(n, CH_LEFT, np.int8)]
        )
        vals = np.concatenate([f.values.ravel(), f.left_limits.ravel()])
    else:
        indices, channels, vals = idx, np.full(n, CH_VALUE, np.int8), f.values.ravel()
    return indices, channels, vals


def superlevel_set(f: GridFunction, epsilon: float) -> LevelSet:
    """Nodes (and channels) where f >= sup f - epsilon."""
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    idx, ch, vals = _channel_entries(f)
    sel = vals >= vals.max() - epsilon
    return LevelSet(idx[sel], ch[sel], epsilon)


def sublevel_set(f: GridFunction, epsilon: float) -> LevelSet:
    """Nodes (and channels) where f <= inf f + epsilon."""
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    idx, ch, vals = _channel_entries(f)
    sel = vals <= vals.min() + epsilon
    return LevelSet(idx[sel], ch[sel], epsilon)


def _values_at(g: GridFunction, indices, channels):
    """Values of g at (node, channel) pairs; continuous g serves both channels."""
    out = g.values.ravel()[indices].copy()
    if g.cadlag:
        left = channels == CH_LEFT
        out[left] = g.left_limits.ravel()[indices[left]]
    return out


def _sign_at(f: GridFunction, indices, channels):
    s = np.where(_values_at(f, indices, channels) >= 0.0, 1.0, -1.0)
    return s


def directional_derivative(
    kind: _K, f: GridFunction, g: GridFunction, epsilon: float = 0.0
) -> float:
    """Directional derivative of the functional at f in direction g.

    Realized as the extremum of g over the epsilon-level set of f; for the
    sup-norm the level set is taken on |f| and g is multiplied by the sign of
    f on the matching channel.  epsilon=0 gives the exact-argmax limit on a
    finite grid.
    """
    if f.domain != g.domain:
        raise ValueError("f and g must share a grid")
    if kind is _K.SUP_NORM:
        if np.abs(f.all_values()).max() == 0.0:
            raise ValueError("sup-norm derivative undefined at f = 0")
        ls = superlevel_set(abs(f), epsilon)
        gv = _values_at(g, ls.indices, ls.channels)
        return float((gv * _sign_at(f, ls.indices, ls.channels)).max())
    if kind is _K.SUP:
        ls = superlevel_set(f, epsilon)
        return float(_values_at(g, ls.indices, ls.channels).max())
    if kind is _K.INF:
        ls = sublevel_set(f, epsilon)
        return float(_values_at(g, ls.indices, ls.channels).min())
    if kind is _K.AMP:
        return directional_derivative(_K.SUP, f, g, epsilon) - directional_derivative(
            _K.INF, f, g, epsilon
        )
    raise ValueError(f"unknown kind {kind}")


def difference_quotient(kind: _K, f: GridFunction, g: GridFunction, t: float) -> float:
    """(phi(f + t g) - phi(f)) / t, the independent derivative oracle."""
    if t <= 0:
        raise ValueError("t must be > 0")
    return (evaluate(kind, f + g * t) - evaluate(kind, f)) / t


def _cluster(mask: np.ndarray):
    """Connected components under one-cell (Chebyshev) adjacency."""
    structure = np.ones((3,) * mask.ndim, dtype=bool)
    labels, count = ndimage.label(mask, structure=structure)
    return labels, count


def _clustered_set(f: GridFunction, tol: float, largest: bool) -> LevelSet:
    ls = superlevel_set(f, tol) if largest else sublevel_set(f, tol)
    mask = ls.node_mask(f.domain.shape)
    labels, count = _cluster(mask)
    flat_labels = labels.ravel()
    vals = f.values.ravel()
    if f.cadlag:
        merge = np.maximum if largest else np.minimum
        vals = merge(vals, f.left_limits.ravel())
    reps = np.empty(count, dtype=np.intp)
    for k in range(1, count + 1):
        members = np.flatnonzero(flat_labels == k)
        best = np.argmax(vals[members]) if largest else np.argmin(vals[members])
        reps[k - 1] = members[best]
    return LevelSet(
        ls.indices,
        ls.channels,
        tol,
        cluster_count=count,
        representatives=np.sort(reps),
    )


def argmax_set(f: GridFunction, tol: float = 0.0) -> LevelSet:
    """Tolerance-argmax set, clustered by one-cell adjacency."""
    if tol < 0:
        raise ValueError("tol must be >= 0")
    return _clustered_set(f, tol, largest=True)


def argmin_set(f: GridFunction, tol: float = 0.0) -> LevelSet:
    if tol < 0:
        raise ValueError("tol must be >= 0")
    return _clustered_set(f, tol, largest=False)


def expand_node_mask(mask: np.ndarray, cells: int = 1) -> np.ndarray:
    """Dilate a node mask by whole grid cells (Chebyshev neighborhood)."""
    if cells <= 0:
        return mask
    structure = np.ones((3,) * mask.ndim, dtype=bool)
    return ndimage.binary_dilation(mask, structure=structure, iterations=cells)


@dataclass(frozen=True)
class Witness:
    """Evidence of full (linear) differentiability at f.

    For the sup-norm: the unique peak node and the constant sign c there.
    For sup/inf: the unique extremal node.  For the amplitude: both nodes.
    """

    kind: FunctionalKind
    node: Optional[int] = None
    sign: Optional[float] = None
    node_max: Optional[int] = None
    node_min: Optional[int] = None


def full_differentiability_witness(
    kind: _K, f: GridFunction, tol: float = 0.0
) -> Optional[Witness]:
    """Witness node(s) when the relevant extremal cluster count equals 1.

    Returns None when the argmax (or argmin) set splits into several
    clusters, i.e. when the derivative stays genuinely non-linear.
    """
    if kind is _K.SUP_NORM:
        if np.abs(f.all_values()).max() == 0.0:
            raise ValueError("sup-norm differentiability undefined at f = 0")
        ls = argmax_set(abs(f), tol)
        if ls.cluster_count != 1:
            return None
        signs = _sign_at(f, ls.indices, ls.channels)
        if not (np.all(signs > 0) or np.all(signs < 0)):
            return None
        return Witness(kind, node=int(ls.representatives[0]), sign=float(signs[0]))
    if kind is _K.SUP:
        ls = argmax_set(f, tol)
        if ls.cluster_count != 1:
            return None
        return Witness(kind, node=int(ls.representatives[0]))
    if kind is _K.INF:
        ls = argmin_set(f, tol)
        if ls.cluster_count != 1:
            return None
        return Witness(kind, node=int(ls.representatives[0]))
    if kind is _K.AMP:
        hi = argmax_set(f, tol)
        lo = argmin_set(f, tol)
        if hi.cluster_count != 1 or lo.cluster_count != 1:
            return None
        return Witness(
            kind,
            node_max=int(hi.representatives[0]),
            node_min=int(lo.representatives[0]),
        )
    raise ValueError(f"unknown kind {kind}")
