import numpy as np
import pytest

from supdelta import (
    GridDomain,
    GridFunction,
    Sample,
    copula_partials,
    ecdf,
    empirical_copula,
    empirical_process,
    survival_copula,
)
from supdelta.dists import (
    Beta,
    ClaytonCopula,
    IndependenceCopula,
    Normal,
    PowerLaw,
    SklarCdf,
    TableCdf,
    Uniform,
    from_config,
)
from supdelta.empirical import rank_lattice_copula


class TestDistributions:
    def test_uniform_cdf_ppf_roundtrip(self):
        F = Uniform(2.0, 5.0)
        u = np.linspace(0, 1, 11)
        assert np.allclose(F.cdf(F.ppf(u)), u)

    def test_power_law(self):
        F = PowerLaw(2.0)
        assert F.cdf(0.5) == 0.25
        assert F.ppf(0.25) == pytest.approx(0.5)

    def test_normal_sampling_moments(self):
        rng = np.random.default_rng(0)
        x = Normal(1.0, 2.0).sample(200_000, rng)
        assert x.mean() == pytest.approx(1.0, abs=0.02)
        assert x.std() == pytest.approx(2.0, abs=0.02)

    def test_beta_cdf_monotone(self):
        F = Beta(2.0, 3.0)
        x = np.linspace(0, 1, 101)
        assert np.all(np.diff(F.cdf(x)) >= 0)

    def test_clayton_cdf_margins(self):
        C = ClaytonCopula(1.0)
        u = np.linspace(0, 1, 21)
        pts = np.stack([u, np.ones_like(u)], axis=-1)
        assert np.allclose(C.cdf(pts), u, atol=1e-12)

    def test_clayton_sampled_law_matches_cdf(self):
        rng = np.random.default_rng(1)
        C = ClaytonCopula(1.0)
        xy = C.sample(100_000, rng)
        emp = np.mean((xy[:, 0] <= 0.3) & (xy[:, 1] <= 0.6))
        assert emp == pytest.approx(C.cdf(np.array([0.3, 0.6])), abs=0.005)

    def test_sklar_composition(self):
        F = SklarCdf(IndependenceCopula(2), [Normal(), Uniform()])
        pt = np.array([0.0, 0.5])
        assert F.cdf(pt) == pytest.approx(0.5 * 0.5)

    def test_table_cdf_jumps(self):
        F = TableCdf([0.0, 1.0], [0.25, 0.75])
        assert F.cdf(0.0) == 0.25
        assert F.cdf_left(0.0) == 0.0
        assert list(F.jump_points()) == [0.0, 1.0]

    def test_from_config_errors(self):
        with pytest.raises(ValueError):
            from_config({"family": "cauchy"})
        with pytest.raises(ValueError):
            from_config({})


class TestEcdf:
    def test_single_point_mass(self):
        g = ecdf(Sample(np.array([0.5])))
        i = np.searchsorted(g.domain.points, 0.5)
        assert g.values[i] == 1.0
        assert g.left_limits[i] == 0.0

    def test_counting(self):
        g = ecdf(Sample(np.array([0.1, 0.5, 0.9])))
        i = np.searchsorted(g.domain.points, 0.5)
        assert g.values[i] == pytest.approx(2 / 3)

    def test_two_dim_counting(self):
        s = Sample(np.array([[0.0, 0.0], [1.0, 1.0]]))
        g = ecdf(s)
        assert g.values[0, 0] == 0.5
        assert g.values[1, 1] == 1.0

    def test_valid_cdf_shape(self):
        rng = np.random.default_rng(2)
        g = ecdf(Sample(rng.standard_normal(500)))
        assert np.all(np.diff(g.values) >= 0)
        assert g.values[0] == 0.0 and g.values[-1] == 1.0
        jumps = g.values - g.left_limits
        assert np.allclose(jumps * 500, np.round(jumps * 500))

    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError):
            Sample(np.empty((0, 1)))

    def test_glivenko_cantelli_smoke(self):
        n = 10_000
        bound = 3.0 * np.sqrt(np.log(n) / n)
        ok = 0
        for seed in range(200):
            rng = np.random.default_rng(seed)
            xs = np.sort(rng.random(n))
            i = np.arange(1, n + 1)
            sup = max((i / n - xs).max(), (xs - (i - 1) / n).max())
            ok += sup <= bound
        assert ok >= 190

    def test_csv_roundtrip(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("a,b\n0.1,0.2\n0.3,0.4\n")
        s = Sample.from_csv(path)
        assert s.n == 2 and s.dim == 2
        path2 = tmp_path / "bare.csv"
        path2.write_text("0.1,0.2\n0.3,0.4\n")
        assert np.array_equal(Sample.from_csv(path2).data, s.data)


class TestEmpiricalProcess:
    def test_single_point_value_and_left_limit(self):
        s = Sample(np.array([0.5]))
        grid = GridDomain.line([0.25, 0.5, 0.75])
        g = empirical_process(s, Uniform(), grid)
        assert g.values[1] == pytest.approx(0.5)
        assert g.left_limits[1] == pytest.approx(-0.5)

    def test_centering_smoke(self):
        rng = np.random.default_rng(3)
        s = Sample(rng.random(5000))
        grid = GridDomain.line(np.linspace(0.01, 0.99, 99))
        g = empirical_process(s, Uniform(), grid)
        assert np.abs(g.values).max() < 3.0


class TestEmpiricalCopula:
    def grid(self, n=3):
        ax = np.linspace(0, 1, n)
        return GridDomain.lattice(ax, ax)

    def test_comonotone_half(self):
        s = Sample(np.array([[1.0, 1.0], [2.0, 2.0]]))
        c = empirical_copula(s, self.grid(3))
        assert c.values[1, 1] == 0.5  # C_n(1/2, 1/2)

    def test_countermonotone_zero(self):
        s = Sample(np.array([[1.0, 2.0], [2.0, 1.0]]))
        c = empirical_copula(s, self.grid(3))
        assert c.values[1, 1] == 0.0

    def test_full_mass(self):
        rng = np.random.default_rng(4)
        s = Sample(rng.random((50, 2)))
        c = empirical_copula(s, self.grid(5))
        assert c.values[-1, -1] == 1.0

    def test_rejects_univariate(self):
        with pytest.raises(ValueError):
            empirical_copula(Sample(np.array([1.0, 2.0])), self.grid(3))

    def test_uniform_discrete_marginals(self):
        rng = np.random.default_rng(5)
        s = Sample(rng.standard_normal((40, 2)))
        c = rank_lattice_copula(s)
        assert np.allclose(c[:, -1], np.arange(41) / 40)
        assert np.allclose(c[-1, :], np.arange(41) / 40)

    def test_rank_lattice_matches_generic(self):
        rng = np.random.default_rng(6)
        s = Sample(rng.standard_normal((25, 2)))
        full = rank_lattice_copula(s)
        u = np.arange(26) / 25
        g = empirical_copula(s, GridDomain.lattice(u, u))
        assert np.array_equal(g.values, full)


class TestSurvivalCopula:
    def lattice(self, n=41):
        ax = np.linspace(0, 1, n)
        return GridDomain.lattice(ax, ax)

    def test_independence_fixed_point(self):
        dom = self.lattice()
        U, V = dom.meshgrid()
        pi = GridFunction(dom, U * V)
        sc = survival_copula(pi)
        assert np.allclose(sc.values, pi.values, atol=1e-15)

    def test_min_copula_fixed_point(self):
        dom = self.lattice()
        U, V = dom.meshgrid()
        m = GridFunction(dom, np.minimum(U, V))
        assert np.allclose(survival_copula(m).values, m.values, atol=1e-15)

    def test_margin(self):
        dom = self.lattice()
        U, V = dom.meshgrid()
        sc = survival_copula(GridFunction(dom, U * V))
        assert np.allclose(sc.values[-1, :], dom.axes[1])

    def test_involution(self):
        dom = self.lattice(21)
        mesh = np.stack(dom.meshgrid(), axis=-1)
        c = GridFunction(dom, ClaytonCopula(1.5).cdf(mesh))
        back = survival_copula(survival_copula(c))
        assert np.allclose(back.values, c.values, atol=1e-14)

    def test_rejects_asymmetric_lattice(self):
        dom = GridDomain.lattice(np.array([0.0, 0.3, 1.0]), np.array([0.0, 0.3, 1.0]))
        U, V = dom.meshgrid()
        with pytest.raises(ValueError):
            survival_copula(GridFunction(dom, U * V))


class TestCopulaPartials:
    def lattice(self, n=21):
        ax = np.linspace(0, 1, n)
        return GridDomain.lattice(ax, ax)

    def test_independence_exact(self):
        dom = self.lattice()
        d1, d2 = copula_partials(IndependenceCopula(2), dom, h=0.01)
        U, V = dom.meshgrid()
        interior = (U > 0.02) & (U < 0.98) & (V > 0.02) & (V < 0.98)
        assert np.allclose(d1.values[interior], V[interior], atol=1e-12)
        assert np.allclose(d2.values[interior], U[interior], atol=1e-12)

    def test_clamped_to_unit_interval(self):
        dom = self.lattice()
        d1, d2 = copula_partials(ClaytonCopula(2.0), dom)
        for d in (d1, d2):
            assert d.values.min() >= 0.0 and d.values.max() <= 1.0

    def test_min_copula_below_diagonal(self):
        dom = self.lattice(41)
        U, V = dom.meshgrid()
        grid_fn = GridFunction(dom, np.minimum(U, V))
        d1, _ = copula_partials(grid_fn, dom)
        below = U < V - 0.1
        assert np.allclose(d1.values[below], 1.0)
