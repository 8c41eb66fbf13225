"""Reference constants for the experiments, with provenance.

Each constant records how it was obtained: "analytic" (closed form),
"dense-grid" (deterministic dense maximization) or "plug-in" (large seeded
Monte-Carlo).  Experiments echo these into their reports so acceptance
failures are attributable to a specific constant.
"""

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .dists import Cdf, ClaytonCopula, Normal, PowerLaw, Uniform
from .grid import GridDomain, GridFunction
from .empirical import survival_copula
from .stats import bj_divergence_reference


@dataclass(frozen=True)
class Reference:
    name: str
    value: float
    provenance: str  # analytic | dense-grid | plug-in
    detail: str = ""


def cdf_difference_reference(
    F: Cdf, G: Cdf, kind: str, lo: float, hi: float, points: int = 200001
) -> Reference:
    """phi(F - G) for phi in {norm, sup, amp} by dense-grid evaluation."""
    x = np.linspace(lo, hi, points)
    d = np.asarray(F.cdf(x), float) - np.asarray(G.cdf(x), float)
    sup = max(float(d.max()), 0.0)
    inf = min(float(d.min()), 0.0)
    val = {"norm": max(sup, -inf), "sup": sup, "amp": sup - inf}[kind]
    return Reference(
        f"cdf-difference-{kind}", val, "dense-grid", f"{points} nodes on [{lo}, {hi}]"
    )


def normal_shift_argmax(mu1: float, mu2: float, sigma: float = 1.0) -> Reference:
    """Argmax of |Phi(x) - Phi(x - shift)| for equal-variance normals."""
    return Reference(
        "normal-shift-argmax", 0.5 * (mu1 + mu2), "analytic", "equal densities midpoint"
    )


def normal_shift_limit_variance(mu1: float, mu2: float, sigma: float = 1.0) -> Reference:
    """p (1 - p) at the argmax of the normal-shift cdf difference."""
    xstar = 0.5 * (mu1 + mu2)
    p = stats.norm.cdf((xstar - mu1) / sigma)
    return Reference("normal-shift-limit-variance", float(p * (1 - p)), "analytic")


def clayton_radial_asymmetry(theta: float, grid_n: int = 400) -> Reference:
    """||C - C_bar||_inf for the Clayton copula on a dense grid."""
    ax = np.linspace(0.0, 1.0, grid_n)
    grid = GridDomain.lattice(ax, ax)
    mesh = np.stack(grid.meshgrid(), axis=-1)
    c = np.asarray(ClaytonCopula(theta).cdf(mesh), float)
    cbar = survival_copula(GridFunction(grid, c))
    val = float(np.abs(c - cbar.values).max())
    return Reference(
        f"clayton{theta:g}-radial-asymmetry", val, "dense-grid", f"{grid_n}x{grid_n} lattice"
    )


def bj_reference(F: Cdf, G: Cdf, points: int = 100001) -> Reference:
    """sup_x K(F(x), G(x)) by dense maximization over the F-quantile range."""
    return Reference(
        "berk-jones-divergence",
        bj_divergence_reference(F, G, points),
        "dense-grid",
        f"{points} quantile nodes",
    )


def bj_alternative_sd(points: int = 100001) -> Reference:
    """Closed-form limit sd for F = U[0,1] vs G(x) = x^2 at the unique argmax."""
    x = (np.arange(points) + 0.5) / points
    k = x * np.log(1.0 / x) - (1.0 - x) * np.log1p(x)
    xs = x[np.argmax(k)]
    w = np.log(xs * (1.0 - xs**2) / (xs**2 * (1.0 - xs)))
    return Reference(
        "bj-uniform-square-limit-sd",
        float(np.sqrt(xs * (1.0 - xs)) * abs(w)),
        "dense-grid",
        f"argmax x* = {xs:.6f}",
    )


def y4_median() -> Reference:
    """Median of the double-exponential extreme-value law exp(-4 e^-x)."""
    return Reference("y4-median", float(np.log(4.0 / np.log(2.0))), "analytic")


def max_two_normals_mean() -> Reference:
    """E max(Z1, Z2) for independent standard normals."""
    return Reference("max-two-normals-mean", float(1.0 / np.sqrt(np.pi)), "analytic")


def mmd_class_reference(cls, P: Cdf, Q: Cdf) -> Reference:
    """MMD[F, P, Q] over a finite class from the per-function means."""
    gaps = cls.means_under(P) - cls.means_under(Q)
    val = float(np.abs(gaps).max() if cls.symmetric else gaps.max())
    return Reference("mmd-class-discrepancy", val, "analytic", f"{cls.size} functions")


_NAMED = {
    "clayton1-radial-asymmetry": lambda: clayton_radial_asymmetry(1.0),
    "normal-shift-ks": lambda: cdf_difference_reference(
        Normal(0.0, 1.0), Normal(0.5, 1.0), "norm", -10.0, 10.5
    ),
    "normal-shift-limit-variance": lambda: normal_shift_limit_variance(0.0, 0.5),
    "bj-uniform-square": lambda: bj_reference(Uniform(), PowerLaw(2.0)),
    "bj-uniform-square-limit-sd": bj_alternative_sd,
    "y4-median": y4_median,
    "max-two-normals-mean": max_two_normals_mean,
}


def named_reference(name: str) -> Reference:
    """Look up a reference constant by CLI name."""
    if name not in _NAMED:
        raise KeyError(f"unknown reference '{name}'; known: {sorted(_NAMED)}")
    return _NAMED[name]()


def available_references():
    return sorted(_NAMED)
