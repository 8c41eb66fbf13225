"""Distribution and copula specifications with seeded sampling.

Families cover the experiment configurations: uniform, normal, beta, power
(x^theta on [0,1]), the independence and Clayton copulas, Sklar compositions
for multivariate laws with given margins, and tabulated step cdfs.
"""

import numpy as np
from scipy import stats


class Cdf:
    """Evaluable cumulative distribution function (d=1 or multivariate)."""

    dim = 1

    def cdf(self, x):
        raise NotImplementedError

    def cdf_left(self, x):
        """Left limit of the cdf; equals cdf for continuous families."""
        return self.cdf(x)

    def ppf(self, u):
        raise NotImplementedError(f"{type(self).__name__} has no quantile function")

    def sample(self, n, rng):
        raise NotImplementedError

    def jump_points(self):
        """Declared discontinuity points (empty for continuous families)."""
        return np.empty(0)


class Uniform(Cdf):
    def __init__(self, a=0.0, b=1.0):
        if not b > a:
            raise ValueError("need b > a")
        self.a, self.b = float(a), float(b)

    def cdf(self, x):
        return np.clip((np.asarray(x, float) - self.a) / (self.b - self.a), 0.0, 1.0)

    def ppf(self, u):
        return self.a + (self.b - self.a) * np.asarray(u, float)

    def sample(self, n, rng):
        return self.a + (self.b - self.a) * rng.random(n)


class Normal(Cdf):
    def __init__(self, mu=0.0, sigma=1.0):
        if sigma <= 0:
            raise ValueError("sigma must be > 0")
        self.mu, self.sigma = float(mu), float(sigma)

    def cdf(self, x):
        return stats.norm.cdf(x, loc=self.mu, scale=self.sigma)

    def ppf(self, u):
        return stats.norm.ppf(u, loc=self.mu, scale=self.sigma)

    def sample(self, n, rng):
        return self.mu + self.sigma * rng.standard_normal(n)


class Beta(Cdf):
    def __init__(self, a, b):
        if a <= 0 or b <= 0:
            raise ValueError("beta parameters must be > 0")
        self.a, self.b = float(a), float(b)

    def cdf(self, x):
        return stats.beta.cdf(x, self.a, self.b)

    def ppf(self, u):
        return stats.beta.ppf(u, self.a, self.b)

    def sample(self, n, rng):
        return rng.beta(self.a, self.b, size=n)


class PowerLaw(Cdf):
    """F(x) = x^theta on [0, 1]."""

    def __init__(self, theta):
        if theta <= 0:
            raise ValueError("theta must be > 0")
        self.theta = float(theta)

    def cdf(self, x):
        return np.clip(np.asarray(x, float), 0.0, 1.0) ** self.theta

    def ppf(self, u):
        return np.asarray(u, float) ** (1.0 / self.theta)

    def sample(self, n, rng):
        return rng.random(n) ** (1.0 / self.theta)


class TableCdf(Cdf):
    """Step cdf with atoms at given points (declared jump points)."""

    def __init__(self, points, probabilities):
        pts = np.asarray(points, float)
        p = np.asarray(probabilities, float)
        if pts.ndim != 1 or pts.size != p.size:
            raise ValueError("points/probabilities mismatch")
        if not np.all(np.diff(pts) > 0):
            raise ValueError("points must be strictly increasing")
        if np.any(p < 0) or not np.isclose(p.sum(), 1.0):
            raise ValueError("probabilities must be nonnegative and sum to 1")
        self.points = pts
        self.cum = np.cumsum(p)

    def cdf(self, x):
        i = np.searchsorted(self.points, np.asarray(x, float), side="right")
        return np.concatenate([[0.0], self.cum])[i]

    def cdf_left(self, x):
        i = np.searchsorted(self.points, np.asarray(x, float), side="left")
        return np.concatenate([[0.0], self.cum])[i]

    def sample(self, n, rng):
        u = rng.random(n)
        return self.points[np.searchsorted(self.cum, u, side="left")]

    def jump_points(self):
        return self.points


class Copula(Cdf):
    """Multivariate cdf with uniform marginals on [0,1]^d."""

    def __init__(self, dim=2):
        if dim < 2:
            raise ValueError("copulas need dim >= 2")
        self.dim = int(dim)

    def cdf(self, u):
        raise NotImplementedError


class IndependenceCopula(Copula):
    def cdf(self, u):
        u = np.clip(np.asarray(u, float), 0.0, 1.0)
        return np.prod(u, axis=-1)

    def sample(self, n, rng):
        return rng.random((n, self.dim))


class ClaytonCopula(Copula):
    """Clayton copula C(u, v) = (u^-theta + v^-theta - 1)^(-1/theta), d=2."""

    def __init__(self, theta):
        super().__init__(dim=2)
        if theta <= 0:
            raise ValueError("theta must be > 0")
        self.theta = float(theta)

    def cdf(self, u):
        u = np.clip(np.asarray(u, float), 0.0, 1.0)
        a, b = u[..., 0], u[..., 1]
        th = self.theta
        with np.errstate(over="ignore", divide="ignore"):
            inner = np.where(
                (a > 0) & (b > 0),
                np.maximum(a, 1e-300) ** (-th) + np.maximum(b, 1e-300) ** (-th) - 1.0,
                np.inf,
            )
            return inner ** (-1.0 / th)

    def sample(self, n, rng):
        # conditional-distribution method
        th = self.theta
        u = rng.random(n)
        w = rng.random(n)
        v = ((w ** (-th / (1.0 + th)) - 1.0) * u ** (-th) + 1.0) ** (-1.0 / th)
        return np.column_stack([u, v])


class SklarCdf(Cdf):
    """Joint cdf F(x) = C(F_1(x_1), ..., F_d(x_d))."""

    def __init__(self, copula, margins):
        if len(margins) != copula.dim:
            raise ValueError("need one margin per copula dimension")
        self.copula = copula
        self.margins = tuple(margins)
        self.dim = copula.dim

    def cdf(self, x):
        x = np.asarray(x, float)
        u = np.stack(
            [m.cdf(x[..., k]) for k, m in enumerate(self.margins)], axis=-1
        )
        return self.copula.cdf(u)

    def sample(self, n, rng):
        u = self.copula.sample(n, rng)
        return np.column_stack(
            [m.ppf(u[:, k]) for k, m in enumerate(self.margins)]
        )


_FAMILIES = {
    "uniform": lambda p: Uniform(p.get("a", 0.0), p.get("b", 1.0)),
    "normal": lambda p: Normal(p.get("mu", 0.0), p.get("sigma", 1.0)),
    "beta": lambda p: Beta(p["a"], p["b"]),
    "power": lambda p: PowerLaw(p["theta"]),
    "independence": lambda p: IndependenceCopula(p.get("dim", 2)),
    "clayton": lambda p: ClaytonCopula(p["theta"]),
}


def from_config(spec: dict) -> Cdf:
    """Build a distribution from a {'family': ..., params...} mapping."""
    if "family" not in spec:
        raise ValueError("distribution spec needs a 'family' field")
    family = spec["family"]
    if family not in _FAMILIES:
        raise ValueError(f"unknown distribution family '{family}'")
    params = {k: v for k, v in spec.items() if k != "family"}
    return _FAMILIES[family](params)
