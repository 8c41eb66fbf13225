"""Declarative experiment runner: statistic replicates vs simulated limits.

Each experiment draws R_stat independent samples, computes the exact
normalized statistic for each, simulates R_lim limit replicates from the
matching Gaussian process, and reports the Kolmogorov distance between the
two sets together with every reference constant used.

Everything is a pure function of the config (seed included), so reruns and
parallel runs produce byte-identical replicate files.
"""

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from . import __version__
from .dists import Cdf, from_config
from .empirical import Sample, empirical_copula, survival_copula, _safe_cdf
from .grid import FunctionalKind, GridDomain, GridFunction
from .limits import (
    LimitReplicates,
    LimitSpec,
    _recenter,
    bj_limit,
    compare_distributions,
    copula_limit_Tn,
    copula_symmetry_limit,
    gaussian_shortcut,
    mmd_limit,
    simulate_limit,
)
from .references import (
    Reference,
    bj_reference,
    cdf_difference_reference,
    clayton_radial_asymmetry,
    mmd_class_reference,
    y4_median,
)
from .rng import STREAM_LIMIT, STREAM_STAT, substream
from .samplers import BridgeSampler1D, MixtureSampler
from .stats import (
    FiniteFunctionClass,
    berk_jones_R,
    berk_jones_centering,
    berk_jones_null_centered,
    ks_one_sample,
    ks_two_sample,
    mmd_statistic,
)

EXPERIMENT_KINDS = (
    "ks1",
    "ks2",
    "kuiper",
    "copula-tn",
    "copula-symmetry",
    "berk-jones",
    "berk-jones-null",
    "mmd-finite",
)

_FUNCTIONALS = {
    "norm": FunctionalKind.SUP_NORM,
    "sup": FunctionalKind.SUP,
    "amp": FunctionalKind.AMP,
}

# component streams for two-sample mixtures
_STREAM_LIMIT_A = 11
_STREAM_LIMIT_B = 12


class ConfigError(ValueError):
    """Invalid experiment configuration; names the offending field."""


@dataclass
class ExperimentConfig:
    kind: str
    seed: int
    n: int
    r_stat: int
    r_lim: int
    m: Optional[int] = None
    dist_f: dict = field(default_factory=dict)
    dist_g: Optional[dict] = None
    functional: str = "norm"
    grid_size: int = 2000
    epsilon: Optional[float] = None
    tol: float = 1e-9
    limit_mode: str = "quotient"
    class_spec: Optional[dict] = None
    min_var: float = 1e-6
    max_weight: float = 50.0
    output_dir: Optional[str] = None
    workers: int = 1

    def validate(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ConfigError(f"kind: unknown experiment '{self.kind}'")
        if self.seed is None:
            raise ConfigError("seed: mandatory (runs are fully deterministic)")
        for name in ("n", "r_stat", "r_lim", "grid_size"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ConfigError(f"{name}: must be an integer >= 1")
        if self.m is not None and (not isinstance(self.m, (int, np.integer)) or self.m < 1):
            raise ConfigError("m: must be an integer >= 1")
        if self.kind in ("ks2", "mmd-finite") and self.m is None:
            raise ConfigError("m: required for two-sample experiments")
        if self.functional not in _FUNCTIONALS:
            raise ConfigError("functional: must be one of norm/sup/amp")
        if self.limit_mode not in ("quotient", "derivative"):
            raise ConfigError("limit_mode: must be 'quotient' or 'derivative'")
        if self.epsilon is not None and self.epsilon < 0:
            raise ConfigError("epsilon: must be >= 0")
        if self.kind == "berk-jones-null" and self.n < 16:
            raise ConfigError("n: berk-jones-null needs n >= 16")
        if self.workers < 1:
            raise ConfigError("workers: must be >= 1")
        if not self.dist_f:
            raise ConfigError("dist_f: required")
        if self.kind in ("ks1", "ks2", "kuiper", "copula-tn", "berk-jones", "mmd-finite"):
            if not self.dist_g:
                raise ConfigError("dist_g: required for this experiment")
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**d).validate()

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class ExperimentReport:
    config: dict
    references: dict
    stat_summary: dict
    limit_summary: dict
    ks_distance: float
    shortcut: Optional[dict]
    epsilon_used: float
    limit_mode: str
    version: str
    wall_clock_s: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)


@dataclass
class ExperimentResult:
    report: ExperimentReport
    stat_values: np.ndarray
    limit_values: np.ndarray


def _summary(values: np.ndarray) -> dict:
    qs = [1, 5, 25, 50, 75, 95, 99]
    return {
        "count": int(values.size),
        "mean": float(values.mean()),
        "sd": float(values.std(ddof=1)) if values.size > 1 else 0.0,
        "quantiles": {str(p): float(np.quantile(values, p / 100)) for p in qs},
    }


def _quantile_points(F: Cdf, count: int) -> np.ndarray:
    u = (np.arange(count) + 0.5) / count
    return np.asarray(F.ppf(u), float)


def _compactified_quantile_grid(dists, total_nodes: int) -> GridDomain:
    """Interior quantile nodes of the given laws plus +-inf sentinels."""
    interior = total_nodes - 2
    share = interior // len(dists)
    pts = [
        _quantile_points(d, share + (interior % len(dists) if k == 0 else 0))
        for k, d in enumerate(dists)
    ]
    merged = np.unique(np.concatenate(pts))
    return GridDomain.compactified_line(merged)


def _epsilon_default(config) -> float:
    return 0.0 if config.epsilon is None else float(config.epsilon)


class _Context:
    """Everything needed to compute one replicate of either side."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.references = []
        self.meta = {}

    def stat_replicate(self, r: int) -> float:
        raise NotImplementedError

    def limit_replicates(self, n_paths: int, mode: str) -> LimitReplicates:
        raise NotImplementedError


class _KsContext(_Context):
    def __init__(self, config):
        super().__init__(config)
        self.F = from_config(config.dist_f)
        self.G = from_config(config.dist_g)
        kind = "amp" if config.kind == "kuiper" else config.functional
        self.kind = _FUNCTIONALS[kind]
        self.two_sample = config.kind == "ks2" or (
            config.kind == "kuiper" and config.m is not None
        )
        lo = min(self.F.ppf(1e-10), self.G.ppf(1e-10))
        hi = max(self.F.ppf(1.0 - 1e-10), self.G.ppf(1.0 - 1e-10))
        self.ref = cdf_difference_reference(self.F, self.G, kind, lo, hi)
        self.references.append(self.ref)
        dists = [self.F, self.G] if self.two_sample else [self.F]
        self.grid = _compactified_quantile_grid(dists, config.grid_size)
        qvals = _safe_cdf(self.F, self.grid.points) - _safe_cdf(self.G, self.grid.points)
        self.q = GridFunction(self.grid, qvals)
        if self.two_sample:
            m = config.m
            self.lam = config.n / (config.n + m)
            self.r_n = np.sqrt(config.n * m / (config.n + m))
            a = BridgeSampler1D(self.F, self.grid, config.seed, _STREAM_LIMIT_A)
            b = BridgeSampler1D(self.G, self.grid, config.seed, _STREAM_LIMIT_B)
            self.sampler = MixtureSampler(self.lam, a, b, config.seed, STREAM_LIMIT)
            self.meta["lambda"] = self.lam
        else:
            self.r_n = np.sqrt(config.n)
            self.sampler = BridgeSampler1D(self.F, self.grid, config.seed, STREAM_LIMIT)
        self.spec = LimitSpec(self.kind, self.q, self.sampler, _epsilon_default(config))

    def stat_replicate(self, r):
        rng = substream(self.config.seed, STREAM_STAT, r)
        sx = Sample(self.F.sample(self.config.n, rng))
        if self.two_sample:
            sy = Sample(self.G.sample(self.config.m, rng))
            return ks_two_sample(sx, sy, self.kind, self.ref.value).centered
        return ks_one_sample(sx, self.G, self.kind, self.ref.value).centered

    def limit_replicates(self, n_paths, mode):
        reps = simulate_limit(self.spec, n_paths, mode=mode, r_n=self.r_n)
        if mode == "quotient":
            reps = _recenter(reps, self.kind, self.q, self.ref.value, self.r_n)
        return reps


class _CopulaContext(_Context):
    def __init__(self, config):
        super().__init__(config)
        self.C = from_config(config.dist_f)
        self.symmetry = config.kind == "copula-symmetry"
        ax = np.linspace(0.0, 1.0, config.grid_size)
        self.grid = GridDomain.lattice(ax, ax)
        self.r_n = np.sqrt(config.n)
        if self.symmetry:
            if config.dist_f.get("family") != "clayton":
                raise ConfigError("dist_f: copula-symmetry supports the clayton family")
            self.ref = clayton_radial_asymmetry(config.dist_f["theta"])
            self.references.append(self.ref)
        else:
            self.D = from_config(config.dist_g)
            mesh = np.stack(self.grid.meshgrid(), axis=-1)
            self._d_lattice = np.asarray(self.D.cdf(mesh), float)
            dense_ax = np.linspace(0.0, 1.0, 400)
            dense = np.stack(np.meshgrid(dense_ax, dense_ax, indexing="ij"), axis=-1)
            val = float(
                np.abs(
                    np.asarray(self.C.cdf(dense), float) - np.asarray(self.D.cdf(dense), float)
                ).max()
            )
            self.ref = Reference("copula-distance", val, "dense-grid", "400x400 lattice")
            self.references.append(self.ref)

    def stat_replicate(self, r):
        cfg = self.config
        rng = substream(cfg.seed, STREAM_STAT, r)
        s = Sample(self.C.sample(cfg.n, rng))
        cn = empirical_copula(s, self.grid)
        if self.symmetry:
            field_vals = cn.values - survival_copula(cn).values
        else:
            field_vals = cn.values - self._d_lattice
        raw = float(np.abs(field_vals).max())
        return self.r_n * (raw - self.ref.value)

    def limit_replicates(self, n_paths, mode):
        cfg = self.config
        eps = _epsilon_default(cfg)
        if self.symmetry:
            return copula_symmetry_limit(
                self.C,
                self.grid,
                n_paths,
                epsilon=eps,
                seed=cfg.seed,
                stream=STREAM_LIMIT,
                mode=mode,
                n=cfg.n,
                reference=self.ref.value,
            )
        return copula_limit_Tn(
            self.C,
            self.D,
            self.grid,
            n_paths,
            epsilon=eps,
            seed=cfg.seed,
            stream=STREAM_LIMIT,
            mode=mode,
            n=cfg.n,
            reference=self.ref.value,
        )


class _BerkJonesContext(_Context):
    def __init__(self, config):
        super().__init__(config)
        self.F = from_config(config.dist_f)
        self.G = from_config(config.dist_g)
        self.ref = bj_reference(self.F, self.G)
        if self.ref.value <= 0.0:
            raise ConfigError("dist_g: F = G gives a null Berk-Jones configuration")
        self.references.append(self.ref)
        interior = _quantile_points(self.F, config.grid_size)
        self.grid = GridDomain.line(np.unique(interior))
        self.r_n = np.sqrt(config.n)

    def stat_replicate(self, r):
        cfg = self.config
        rng = substream(cfg.seed, STREAM_STAT, r)
        s = Sample(self.F.sample(cfg.n, rng))
        return self.r_n * (berk_jones_R(s, self.G) - self.ref.value)

    def limit_replicates(self, n_paths, mode):
        cfg = self.config
        return bj_limit(
            self.F,
            self.G,
            self.grid,
            n_paths,
            epsilon=_epsilon_default(cfg),
            seed=cfg.seed,
            stream=STREAM_LIMIT,
            mode=mode,
            n=cfg.n,
            reference=self.ref.value,
            min_var=cfg.min_var,
            max_weight=cfg.max_weight,
        )


class _BerkJonesNullContext(_Context):
    def __init__(self, config):
        super().__init__(config)
        self.F = from_config(config.dist_f)
        self.references.append(y4_median())
        self.references.append(
            Reference("bj-null-centering", berk_jones_centering(config.n), "analytic")
        )

    def stat_replicate(self, r):
        cfg = self.config
        rng = substream(cfg.seed, STREAM_STAT, r)
        s = Sample(self.F.sample(cfg.n, rng))
        return berk_jones_null_centered(s, self.F)

    def limit_replicates(self, n_paths, mode):
        # the null limit has the closed form exp(-4 e^-x); sample it directly
        out = np.empty(n_paths)
        for i in range(n_paths):
            rng = substream(self.config.seed, STREAM_LIMIT, i)
            out[i] = -np.log(-np.log(rng.random()) / 4.0)
        return LimitReplicates(out, 0.0, "analytic")


def _build_class(spec: Optional[dict]) -> FiniteFunctionClass:
    spec = spec or {}
    ckind = spec.get("kind", "indicator-ramp")
    count = spec.get("count", 50)
    t_min = spec.get("t_min", 0.0)
    t_max = spec.get("t_max", 1.2)
    if ckind == "indicator-ramp":
        if count % 2:
            raise ConfigError("class_spec.count: must be even for indicator-ramp")
        ts = np.linspace(t_min, t_max, count // 2)
        return FiniteFunctionClass.indicators_and_ramps(
            ts, spec.get("ramp_width", 0.15), symmetric=spec.get("symmetric", False)
        )
    if ckind == "indicators":
        ts = np.linspace(t_min, t_max, count)
        return FiniteFunctionClass.indicators(ts, symmetric=spec.get("symmetric", True))
    raise ConfigError(f"class_spec.kind: unknown class '{ckind}'")


class _MmdContext(_Context):
    def __init__(self, config):
        super().__init__(config)
        self.P = from_config(config.dist_f)
        self.Q = from_config(config.dist_g)
        self.cls = _build_class(config.class_spec)
        self.ref = mmd_class_reference(self.cls, self.P, self.Q)
        self.references.append(self.ref)
        self.gaps = self.cls.means_under(self.P) - self.cls.means_under(self.Q)
        self.sigma_p = self.cls.cov_under(self.P)
        self.sigma_q = self.cls.cov_under(self.Q)
        m = config.m
        self.lam = config.n / (config.n + m)
        self.r_n = np.sqrt(config.n * m / (config.n + m))
        self.meta["lambda"] = self.lam

    def stat_replicate(self, r):
        cfg = self.config
        rng = substream(cfg.seed, STREAM_STAT, r)
        sx = Sample(self.P.sample(cfg.n, rng))
        sy = Sample(self.Q.sample(cfg.m, rng))
        return mmd_statistic(sx, sy, self.cls, self.ref.value).centered

    def limit_replicates(self, n_paths, mode):
        cfg = self.config
        return mmd_limit(
            self.gaps,
            self.sigma_p,
            self.sigma_q,
            self.lam,
            n_paths,
            tol=cfg.tol,
            symmetric=self.cls.symmetric,
            seed=cfg.seed,
            stream=STREAM_LIMIT,
            mode=mode,
            r_n=self.r_n,
        )


_CONTEXTS = {
    "ks1": _KsContext,
    "ks2": _KsContext,
    "kuiper": _KsContext,
    "copula-tn": _CopulaContext,
    "copula-symmetry": _CopulaContext,
    "berk-jones": _BerkJonesContext,
    "berk-jones-null": _BerkJonesNullContext,
    "mmd-finite": _MmdContext,
}


def build_context(config: ExperimentConfig) -> _Context:
    config.validate()
    return _CONTEXTS[config.kind](config)


def _stat_chunk(args):
    cfg_dict, start, stop = args
    ctx = build_context(ExperimentConfig.from_dict(cfg_dict))
    return [ctx.stat_replicate(r) for r in range(start, stop)]


def _compute_stats(ctx: _Context) -> np.ndarray:
    cfg = ctx.config
    if cfg.workers <= 1:
        return np.array([ctx.stat_replicate(r) for r in range(cfg.r_stat)])
    bounds = np.linspace(0, cfg.r_stat, cfg.workers + 1).astype(int)
    jobs = [
        (cfg.to_dict(), int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a
    ]
    out = np.empty(cfg.r_stat)
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        for (_, a, b), vals in zip(jobs, pool.map(_stat_chunk, jobs)):
            out[a:b] = vals
    return out


def run(config: ExperimentConfig, write: bool = True) -> ExperimentResult:
    """Run the experiment described by `config` and assemble the report."""
    t0 = time.perf_counter()
    ctx = build_context(config)
    stat_values = _compute_stats(ctx)
    limit = ctx.limit_replicates(config.r_lim, config.limit_mode)
    ks = compare_distributions(stat_values, limit.values)
    shortcut = None
    if limit.shortcut is not None:
        shortcut = {
            "variance": limit.shortcut.variance,
            "witness": repr(limit.shortcut.witness),
        }
    report = ExperimentReport(
        config=config.to_dict(),
        references={
            r.name: {"value": r.value, "provenance": r.provenance, "detail": r.detail}
            for r in ctx.references
        },
        stat_summary=_summary(stat_values),
        limit_summary=_summary(limit.values),
        ks_distance=ks,
        shortcut=shortcut,
        epsilon_used=limit.epsilon,
        limit_mode=limit.mode,
        version=__version__,
        wall_clock_s=time.perf_counter() - t0,
    )
    result = ExperimentResult(report, stat_values, limit.values)
    if write and config.output_dir:
        write_outputs(result, config.output_dir)
    return result


def _write_values(path, values):
    with open(path, "w") as fh:
        fh.write("value\n")
        for v in values:
            fh.write(f"{v:.17g}\n")


def emit_plot_data(stat_values, limit_values, path):
    """Sorted replicates vs ecdf level for both sets (overlayable)."""
    with open(path, "w") as fh:
        fh.write("set,value,level\n")
        for name, vals in (("stat", stat_values), ("limit", limit_values)):
            s = np.sort(np.asarray(vals))
            n = s.size
            for i, v in enumerate(s, start=1):
                fh.write(f"{name},{v:.17g},{i / n:.17g}\n")


def write_outputs(result: ExperimentResult, directory):
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, "report.json"), "w") as fh:
        fh.write(result.report.to_json())
        fh.write("\n")
    _write_values(os.path.join(directory, "stat_replicates.csv"), result.stat_values)
    _write_values(os.path.join(directory, "limit_replicates.csv"), result.limit_values)
    emit_plot_data(
        result.stat_values,
        result.limit_values,
        os.path.join(directory, "ecdf_overlay.csv"),
    )
