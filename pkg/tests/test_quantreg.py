"""Solver tests: oracle equivalence, degenerate reductions, process fits."""

import numpy as np
import pytest

from qrcontrol import (
    CheckLossProblem,
    SolverConfig,
    check_loss,
    fit,
    fit_process,
)
from qrcontrol.exceptions import InvalidInputError, RankDeficiencyError

from oracles import lp_oracle_objective, quantile_minimizers, sample_quantile_type1


class TestCheckLoss:
    @pytest.mark.parametrize(
        "level, residual, expected",
        [(0.5, 2.0, 1.0), (0.25, -4.0, 3.0), (0.9, 0.0, 0.0)],
    )
    def test_known_values(self, level, residual, expected):
        assert check_loss(level, residual) == pytest.approx(expected, abs=0)

    def test_vectorized_nonnegative(self):
        rng = np.random.default_rng(0)
        r = rng.normal(size=200)
        out = check_loss(0.3, r)
        assert np.all(out >= 0.0)
        assert np.count_nonzero(out == 0.0) == np.count_nonzero(r == 0.0)

    def test_rejects_bad_level(self):
        with pytest.raises(InvalidInputError):
            check_loss(0.0, 1.0)
        with pytest.raises(InvalidInputError):
            check_loss(1.0, 1.0)

    def test_rejects_nonfinite_residual(self):
        with pytest.raises(InvalidInputError):
            check_loss(0.5, np.nan)
        with pytest.raises(InvalidInputError):
            check_loss(0.5, np.array([1.0, np.inf]))


class TestProblemValidation:
    def test_level_must_be_interior(self):
        with pytest.raises(InvalidInputError):
            CheckLossProblem(np.zeros(3), np.ones((3, 1)), 1.0)

    def test_shape_mismatch(self):
        with pytest.raises(InvalidInputError):
            CheckLossProblem(np.zeros(4), np.ones((3, 1)), 0.5)

    def test_n_must_cover_k(self):
        with pytest.raises(InvalidInputError):
            CheckLossProblem(np.zeros(2), np.ones((2, 3)), 0.5)

    def test_negative_weights_rejected(self):
        with pytest.raises(InvalidInputError):
            CheckLossProblem(np.zeros(3), np.ones((3, 1)), 0.5, weights=[1, -1, 1])

    def test_weights_rescaled_to_unit_mean(self):
        p = CheckLossProblem(np.zeros(4), np.ones((4, 1)), 0.5, weights=[2, 2, 2, 2])
        assert p.weights.mean() == pytest.approx(1.0, abs=0)

    def test_nonfinite_design_rejected(self):
        X = np.ones((3, 1))
        X[1, 0] = np.nan
        with pytest.raises(InvalidInputError):
            CheckLossProblem(np.zeros(3), X, 0.5)


class TestFitBasics:
    def test_median_of_odd_sample(self):
        p = CheckLossProblem(
            np.array([1.0, 2.0, 3.0, 4.0, 5.0]), np.ones((5, 1)), 0.5
        )
        res = fit(p)
        assert res.coefficients[0] == 3.0
        assert res.converged

    def test_flat_face_objective(self):
        # At level 0.2 the minimizer set is [1, 2]; the objective is 2.0.
        p = CheckLossProblem(
            np.array([1.0, 2.0, 3.0, 4.0, 5.0]), np.ones((5, 1)), 0.2
        )
        res = fit(p)
        assert res.objective == pytest.approx(2.0, abs=1e-10)
        assert 1.0 - 1e-9 <= res.coefficients[0] <= 2.0 + 1e-9

    def test_exact_interpolation(self):
        rng = np.random.default_rng(3)
        X = np.column_stack([np.ones(20), rng.normal(size=20)])
        beta = np.array([1.5, -2.0])
        y = X @ beta
        res = fit(CheckLossProblem(y, X, 0.7))
        assert res.objective == pytest.approx(0.0, abs=1e-9)
        np.testing.assert_allclose(res.coefficients, beta, atol=1e-7)

    def test_objective_matches_evaluated_loss(self):
        rng = np.random.default_rng(4)
        X = np.column_stack([np.ones(30), rng.normal(size=30)])
        y = rng.normal(size=30)
        p = CheckLossProblem(y, X, 0.4)
        res = fit(p)
        assert res.objective == pytest.approx(p.objective(res.coefficients), rel=1e-10)

    def test_rank_deficiency_names_columns(self):
        X = np.column_stack([np.ones(10), np.arange(10.0), np.arange(10.0)])
        with pytest.raises(RankDeficiencyError) as err:
            fit(CheckLossProblem(np.zeros(10), X, 0.5))
        assert len(err.value.columns) >= 1
        assert any("2" in c or "1" in c for c in err.value.columns)

    def test_named_columns_in_error(self):
        X = np.column_stack([np.ones(6), np.ones(6)])
        cfg = SolverConfig(column_names=("const", "const_dup"))
        with pytest.raises(RankDeficiencyError) as err:
            fit(CheckLossProblem(np.zeros(6), X, 0.5), cfg)
        assert "const" in str(err.value)


class TestOracleEquivalence:
    def test_small_random_instances(self):
        rng = np.random.default_rng(11)
        for _ in range(60):
            n = rng.integers(4, 31)
            k = rng.integers(1, 4)
            if k > n:
                continue
            X = rng.normal(size=(n, k))
            X[:, 0] = 1.0
            y = rng.normal(size=n)
            level = rng.choice([0.1, 0.25, 0.5, 0.75, 0.9])
            res = fit(CheckLossProblem(y, X, level))
            oracle, _ = lp_oracle_objective(X, y, level)
            assert res.objective == pytest.approx(oracle, abs=1e-8)

    def test_weighted_instances(self):
        rng = np.random.default_rng(12)
        for _ in range(25):
            n = int(rng.integers(5, 25))
            X = np.column_stack([np.ones(n), rng.normal(size=n)])
            y = rng.normal(size=n)
            w = rng.exponential(size=n)
            level = float(rng.uniform(0.15, 0.85))
            res = fit(CheckLossProblem(y, X, level, weights=w))
            oracle, _ = lp_oracle_objective(X, y, level, weights=w)
            assert res.objective == pytest.approx(oracle, abs=1e-8)

    def test_unit_weights_match_unweighted(self):
        rng = np.random.default_rng(13)
        X = np.column_stack([np.ones(40), rng.normal(size=40)])
        y = rng.normal(size=40)
        plain = fit(CheckLossProblem(y, X, 0.35))
        weighted = fit(CheckLossProblem(y, X, 0.35, weights=np.ones(40)))
        assert weighted.objective == plain.objective

    def test_zero_weight_rows_ignored(self):
        rng = np.random.default_rng(14)
        X = np.column_stack([np.ones(20), rng.normal(size=20)])
        y = rng.normal(size=20)
        w = np.ones(20)
        w[:5] = 0.0
        res = fit(CheckLossProblem(y, X, 0.5, weights=w))
        sub = fit(CheckLossProblem(y[5:], X[5:], 0.5))
        # Same minimizer set; active weights renormalize to 20/15.
        assert res.objective == pytest.approx(sub.objective * 20 / 15, rel=1e-8, abs=1e-10)


class TestLocalOptimality:
    def test_no_descent_direction(self):
        rng = np.random.default_rng(21)
        directions = rng.normal(size=(64, 3))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        for _ in range(20):
            n = int(rng.integers(6, 40))
            X = np.column_stack(
                [np.ones(n), rng.normal(size=n), rng.normal(size=n)]
            )
            y = rng.normal(size=n)
            level = float(rng.uniform(0.1, 0.9))
            p = CheckLossProblem(y, X, level)
            res = fit(p)
            for d in directions:
                perturbed = p.objective(res.coefficients + 1e-4 * d)
                assert perturbed >= res.objective - 1e-8


class TestQuantileReduction:
    @pytest.mark.parametrize("level", [0.1, 0.2, 0.5, 0.61, 0.9])
    def test_constant_design_returns_order_statistic(self, level):
        rng = np.random.default_rng(31)
        y = rng.normal(size=101)
        res = fit(CheckLossProblem(y, np.ones((101, 1)), level))
        minimizers, best = quantile_minimizers(y, level)
        assert float(res.coefficients[0]) in minimizers
        assert res.objective == pytest.approx(best, abs=1e-10)

    @pytest.mark.parametrize("level", [0.25, 0.5, 0.75])
    def test_cdf_position_brackets_level(self, level):
        rng = np.random.default_rng(32)
        y = rng.normal(size=200)
        res = fit(CheckLossProblem(y, np.ones((200, 1)), level))
        c = res.coefficients[0]
        below = np.mean(y < c)
        at_or_below = np.mean(y <= c)
        assert below <= level <= at_or_below


class TestFitProcess:
    def test_singleton_grid(self):
        rng = np.random.default_rng(41)
        X = np.column_stack([np.ones(30), rng.normal(size=30)])
        y = rng.normal(size=30)
        template = CheckLossProblem(y, X, 0.5)
        proc = fit_process(template, [0.5])
        single = fit(CheckLossProblem(y, X, 0.5))
        assert proc.size == 1
        np.testing.assert_allclose(proc.coefficients[0], single.coefficients)
        assert proc.objectives[0] == pytest.approx(single.objective, abs=1e-12)

    def test_constant_design_matches_sample_quantiles(self):
        rng = np.random.default_rng(42)
        y = rng.normal(size=81)
        template = CheckLossProblem(y, np.ones((81, 1)), 0.5)
        proc = fit_process(template, [0.25, 0.5, 0.75])
        for t, level in enumerate([0.25, 0.5, 0.75]):
            minimizers, _ = quantile_minimizers(y, level)
            assert float(proc.coefficients[t, 0]) in minimizers

    def test_deterministic(self):
        rng = np.random.default_rng(43)
        X = np.column_stack([np.ones(60), rng.normal(size=60)])
        y = rng.normal(size=60)
        grid = np.linspace(0.05, 0.95, 21)
        template = CheckLossProblem(y, X, 0.5)
        a = fit_process(template, grid)
        b = fit_process(template, grid)
        np.testing.assert_array_equal(a.coefficients, b.coefficients)

    def test_grid_must_increase(self):
        template = CheckLossProblem(np.zeros(5), np.ones((5, 1)), 0.5)
        with pytest.raises(InvalidInputError):
            fit_process(template, [0.5, 0.5])
        with pytest.raises(InvalidInputError):
            fit_process(template, [0.7, 0.3])

    def test_objectives_match_oracle_along_grid(self):
        rng = np.random.default_rng(44)
        X = np.column_stack([np.ones(18), rng.normal(size=18)])
        y = rng.normal(size=18)
        grid = np.linspace(0.1, 0.9, 9)
        proc = fit_process(CheckLossProblem(y, X, 0.5), grid)
        for t, level in enumerate(grid):
            oracle, _ = lp_oracle_objective(X, y, float(level))
            assert proc.objectives[t] == pytest.approx(oracle, abs=1e-8)

    def test_lp_method_agrees(self):
        rng = np.random.default_rng(45)
        X = np.column_stack([np.ones(25), rng.normal(size=25)])
        y = rng.normal(size=25)
        ip = fit(CheckLossProblem(y, X, 0.3))
        lp = fit(CheckLossProblem(y, X, 0.3), SolverConfig(method="lp"))
        assert ip.objective == pytest.approx(lp.objective, abs=1e-9)
