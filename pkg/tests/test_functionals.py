import numpy as np
import pytest

from supdelta import (
    FunctionalKind,
    GridDomain,
    GridFunction,
    argmax_set,
    argmin_set,
    difference_quotient,
    directional_derivative,
    evaluate,
    full_differentiability_witness,
    sublevel_set,
    superlevel_set,
)

K = FunctionalKind


def line(n=101, lo=0.0, hi=1.0):
    return GridDomain.line(np.linspace(lo, hi, n))


def fn(dom, f):
    return GridFunction.from_callable(dom, f)


def rand_piecewise_linear(rng, dom, knots=12):
    x = dom.points
    kx = np.sort(np.concatenate([[x[0], x[-1]], rng.uniform(x[0], x[-1], knots - 2)]))
    return GridFunction(dom, np.interp(x, kx, rng.uniform(-1.0, 1.0, knots)))


class TestEvaluate:
    def test_constant_sup(self):
        dom = line(101)
        assert evaluate(K.SUP, GridFunction(dom, np.ones(101))) == 1.0

    def test_identity_amp(self):
        assert evaluate(K.AMP, fn(line(), lambda x: x)) == 1.0

    def test_step_norm(self):
        dom = GridDomain.line([0.0, 1.0, 2.0])
        assert evaluate(K.SUP_NORM, GridFunction(dom, [-0.3, 0.7, -0.9])) == 0.9

    def test_cadlag_channels_participate(self):
        dom = GridDomain.line([0.0, 1.0])
        g = GridFunction(dom, [0.2, 0.1], left_limits=[0.0, 0.9])
        assert evaluate(K.SUP, g) == 0.9
        assert evaluate(K.INF, g) == 0.0


class TestLevelSets:
    def test_unique_max(self):
        dom = GridDomain.line([0.0, 0.5, 1.0])
        ls = superlevel_set(fn(dom, lambda x: x), 0.0)
        assert list(ls.indices) == [2]

    def test_threshold(self):
        dom = GridDomain.line([0.0, 0.5, 1.0])
        ls = superlevel_set(fn(dom, lambda x: x), 0.6)
        assert list(ls.indices) == [1, 2]

    def test_constant_all_nodes(self):
        dom = line(11)
        ls = superlevel_set(GridFunction(dom, np.full(11, 3.0)), 0.0)
        assert ls.indices.size == 11

    def test_sublevel_dual(self):
        dom = GridDomain.line([0.0, 0.5, 1.0])
        assert list(sublevel_set(fn(dom, lambda x: x), 0.0).indices) == [0]
        assert list(sublevel_set(fn(dom, lambda x: x), 0.6).indices) == [0, 1]

    def test_negative_epsilon_rejected(self):
        with pytest.raises(ValueError):
            superlevel_set(fn(line(), lambda x: x), -0.1)


class TestDirectionalDerivative:
    def test_constant_one_against_descending(self):
        # sup derivative at f = 1 picks the sup of g over the whole domain
        dom = line(101)
        f = GridFunction(dom, np.ones(101))
        g = fn(dom, lambda x: 1 - x)
        assert directional_derivative(K.SUP, f, g) == 1.0

    def test_zero_function_gives_plain_sup(self):
        dom = line(101)
        f = GridFunction(dom, np.zeros(101))
        g = fn(dom, lambda x: np.sin(7 * x))
        assert directional_derivative(K.SUP, f, g) == g.values.max()

    def test_bimodal_argmax_picks_larger_direction(self):
        # f has two exact peaks at 0.25 and 0.75; oracle: difference quotient
        dom = line(1001)
        f = fn(dom, lambda x: -((x - 0.25) ** 2) * (x - 0.75) ** 2)
        g = fn(dom, lambda x: x)
        d = directional_derivative(K.SUP, f, g, 0.0)
        assert d == pytest.approx(0.75, abs=1e-12)
        q = difference_quotient(K.SUP, f, g, 1e-6)
        assert abs(d - q) < 1e-4

    def test_norm_rejects_zero_f(self):
        dom = line(11)
        with pytest.raises(ValueError):
            directional_derivative(K.SUP_NORM, GridFunction(dom, np.zeros(11)), fn(dom, lambda x: x))

    def test_grid_mismatch_rejected(self):
        with pytest.raises(ValueError):
            directional_derivative(K.SUP, fn(line(11), lambda x: x), fn(line(21), lambda x: x))

    def test_cadlag_sign_taken_from_matching_channel(self):
        dom = GridDomain.line([0.0, 1.0])
        f = GridFunction(dom, [0.5, -1.0], left_limits=[0.5, 1.0])
        g = GridFunction(dom, [0.0, 0.3], left_limits=[0.0, -0.2])
        # |f| peaks at node 1 on both channels; g * sgn(f) = -0.3 (value), -0.2 (left)
        d = directional_derivative(K.SUP_NORM, f, g, 0.0)
        assert d == pytest.approx(-0.2)


class TestDifferenceQuotient:
    def test_paper_sequence_vanishes(self):
        # f_n = 1 + x/n against g = 1 - x at t = 1/n stays at zero
        dom = GridDomain.line([0.0, 1.0])
        g = fn(dom, lambda x: 1 - x)
        for n in range(1, 101):
            f = fn(dom, lambda x: 1 + x / n)
            assert difference_quotient(K.SUP, f, g, 1.0 / n) == 0.0

    def test_zero_f_homogeneity(self):
        dom = line(51)
        f = GridFunction(dom, np.zeros(51))
        g = fn(dom, lambda x: np.cos(3 * x))
        for t in (0.5, 0.1, 0.01):
            assert difference_quotient(K.SUP, f, g, t) == pytest.approx(g.values.max())

    def test_norm_of_identity_plus_constant(self):
        dom = line(101)
        q = difference_quotient(K.SUP_NORM, fn(dom, lambda x: x), GridFunction(dom, np.ones(101)), 0.01)
        assert q == pytest.approx(1.0)

    def test_rejects_nonpositive_t(self):
        dom = line(11)
        with pytest.raises(ValueError):
            difference_quotient(K.SUP, fn(dom, lambda x: x), fn(dom, lambda x: x), 0.0)


class TestArgmaxSets:
    def test_bimodal_two_clusters(self):
        dom = line(1001)
        f = fn(dom, lambda x: -((x - 0.25) ** 2) * (x - 0.75) ** 2)
        ls = argmax_set(f, 1e-12)
        assert ls.cluster_count == 2
        assert np.allclose(dom.points[ls.representatives], [0.25, 0.75])

    def test_identity_single_cluster(self):
        ls = argmax_set(fn(line(101), lambda x: x), 0.0)
        assert ls.cluster_count == 1
        assert ls.representatives[0] == 100

    def test_constant_one_cluster_spanning(self):
        dom = line(31)
        ls = argmax_set(GridFunction(dom, np.full(31, 2.0)), 0.0)
        assert ls.cluster_count == 1
        assert ls.indices.size == 31

    def test_argmin_dual(self):
        ls = argmin_set(fn(line(101), lambda x: x), 0.0)
        assert ls.cluster_count == 1
        assert ls.representatives[0] == 0

    def test_lattice_clusters(self):
        dom = GridDomain.lattice(np.linspace(0, 1, 21), np.linspace(0, 1, 21))
        f = GridFunction.from_callable(
            dom, lambda u, v: -((u - 0.25) ** 2 + (v - 0.25) ** 2) * ((u - 0.75) ** 2 + (v - 0.75) ** 2)
        )
        assert argmax_set(f, 1e-12).cluster_count == 2


class TestWitness:
    def test_peaking_function(self):
        dom = line(101)
        w = full_differentiability_witness(K.SUP_NORM, fn(dom, lambda x: x * (1 - x)), 1e-12)
        assert w is not None
        assert dom.points[w.node] == pytest.approx(0.5)
        assert w.sign == 1.0

    def test_bimodal_returns_none(self):
        dom = line(1001)
        f = fn(dom, lambda x: -((x - 0.25) ** 2) * (x - 0.75) ** 2)
        assert full_differentiability_witness(K.SUP, f, 1e-12) is None

    def test_amp_two_witnesses(self):
        dom = line(101)
        w = full_differentiability_witness(K.AMP, fn(dom, lambda x: x), 0.0)
        assert (w.node_max, w.node_min) == (100, 0)

    def test_norm_mixed_sign_cluster_rejected(self):
        dom = GridDomain.line([0.0, 0.5, 1.0])
        # |f| maximal at two adjacent nodes with opposite signs of f
        f = GridFunction(dom, [1.0, -1.0, 0.0])
        assert full_differentiability_witness(K.SUP_NORM, f, 0.0) is None


class TestProperties:
    def test_oracle_convergence_slope(self):
        # |derivative - quotient| <= K t, K fitted from the two largest steps
        rng = np.random.default_rng(20260810)
        dom = line(400)
        ts = (1e-2, 1e-3, 1e-4)
        errs = {t: [] for t in ts}
        for _ in range(500):
            f = rand_piecewise_linear(rng, dom)
            g = rand_piecewise_linear(rng, dom)
            for kind in K:
                d = directional_derivative(kind, f, g, 0.0)
                for t in ts:
                    errs[t].append(abs(d - difference_quotient(kind, f, g, t)))
        slope = max(max(errs[1e-2]) / 1e-2, max(errs[1e-3]) / 1e-3)
        assert max(errs[1e-4]) <= slope * 1e-4 + 1e-12

    def test_lipschitz(self):
        rng = np.random.default_rng(7)
        dom = line(200)
        for _ in range(100):
            f = rand_piecewise_linear(rng, dom)
            g = rand_piecewise_linear(rng, dom)
            gap = np.abs(f.values - g.values).max()
            for kind, c in ((K.SUP_NORM, 1), (K.SUP, 1), (K.INF, 1), (K.AMP, 2)):
                assert abs(evaluate(kind, f) - evaluate(kind, g)) <= c * gap + 1e-12

    def test_positive_homogeneity(self):
        rng = np.random.default_rng(8)
        dom = line(150)
        f = rand_piecewise_linear(rng, dom)
        g = rand_piecewise_linear(rng, dom)
        for lam in (0.25, 1.5, 10.0):
            for kind in K:
                assert directional_derivative(kind, f, g * lam, 0.0) == pytest.approx(
                    lam * directional_derivative(kind, f, g, 0.0), rel=1e-12
                )

    def test_epsilon_monotonicity(self):
        rng = np.random.default_rng(9)
        dom = line(150)
        f = rand_piecewise_linear(rng, dom)
        g = rand_piecewise_linear(rng, dom)
        eps = [0.0, 0.05, 0.1, 0.5, 1.0]
        sups = [directional_derivative(K.SUP, f, g, e) for e in eps]
        infs = [directional_derivative(K.INF, f, g, e) for e in eps]
        assert all(a <= b + 1e-15 for a, b in zip(sups, sups[1:]))
        assert all(a >= b - 1e-15 for a, b in zip(infs, infs[1:]))

    def test_duality(self):
        rng = np.random.default_rng(10)
        dom = line(150)
        for _ in range(20):
            f = rand_piecewise_linear(rng, dom)
            g = rand_piecewise_linear(rng, dom)
            for e in (0.0, 0.1):
                assert directional_derivative(K.INF, f, g, e) == pytest.approx(
                    -directional_derivative(K.SUP, -f, -g, e), abs=1e-14
                )
                assert directional_derivative(K.AMP, f, g, e) == pytest.approx(
                    directional_derivative(K.SUP, f, g, e)
                    - directional_derivative(K.INF, f, g, e),
                    abs=1e-14,
                )

    def test_limsup_bound_for_perturbed_sequences(self):
        # f_n -> f with ||f_n - f|| <= t_n^2 keeps the quotient below the
        # derivative up to a vanishing modulus term
        rng = np.random.default_rng(11)
        dom = line(300)
        f = rand_piecewise_linear(rng, dom)
        g = rand_piecewise_linear(rng, dom)
        d = directional_derivative(K.SUP, f, g, 0.0)
        n0 = 10
        for n in range(n0, 200):
            t = 1.0 / n
            bump = rng.uniform(-1.0, 1.0, dom.size)
            fn_ = GridFunction(dom, f.values + t * t * bump)
            q = (evaluate(K.SUP, fn_ + g * t) - evaluate(K.SUP, fn_)) / t
            assert q <= d + 1e-8 + 2.0 * t

    def test_non_uniformity_witness(self):
        # quotient stays 0 along the moving sequence while the derivative is 1
        dom = GridDomain.line([0.0, 1.0])
        g = fn(dom, lambda x: 1 - x)
        f = GridFunction(dom, np.ones(2))
        assert directional_derivative(K.SUP, f, g, 0.0) == 1.0
        for n in range(1, 101):
            fn_ = fn(dom, lambda x: 1 + x / n)
            assert difference_quotient(K.SUP, fn_, g, 1.0 / n) == 0.0
