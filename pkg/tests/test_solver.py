"""
Tests for the fast certificate: worked values, degenerate budgets, zero-cost
and extreme costs, agreement with the LP oracle, marginal structure and timing.
"""

import dataclasses

import numpy as np
import pytest

from core.dto import SolveMethod
from core.game import (
    attacker_best_response_value,
    defender_best_response_value,
    normalize,
)
from core.oracle import oracle_certificate
from core.solver import LinearSaddleSolver, positive_part, solve_both, solve_linear


def _random_game(rng, m, k_a, k_d, dist="uniform"):
    costs = rng.random(m) + 0.05 if dist == "uniform" else rng.lognormal(size=m)
    return normalize(costs, k_a, k_d)


class TestWorkedInstances:
    """Hand-computed saddle points."""

    @pytest.mark.parametrize(
        "costs,k_a,k_d,value",
        [
            ([1.0, 2.0], 1, 1, 2 / 3),
            ([1.0, 2.0, 3.0], 1, 1, 6 / 5),
            ([1.0, 2.0, 3.0], 2, 1, 7 / 3),
            ([1.0, 2.0, 3.0], 2, 2, 1.0),
            ([1.0, 1.0], 1, 1, 0.5),
            ([2.0, 2.0, 2.0], 1, 1, 4 / 3),
        ],
    )
    def test_value(self, costs, k_a, k_d, value):
        cert = solve_linear(normalize(costs, k_a, k_d))

        assert cert.value == pytest.approx(value, rel=1e-12)
        assert cert.method is SolveMethod.LINEAR

    def test_bridge_instance_certificate(self):
        cert = solve_linear(normalize([1.0, 2.0, 3.0], 2, 1))

        assert (cert.s_star, cert.r_star) == (2, 1)
        np.testing.assert_allclose(cert.alpha.array, [1 / 3, 1.0, 2 / 3])
        np.testing.assert_allclose(cert.beta.array, [1.0, 2 / 3, 1 / 3])
        assert cert.attacker_active == frozenset({1, 2, 3})
        assert cert.defender_active == frozenset({2, 3})
        assert cert.defender_pure is False
        assert cert.stats.cells_u == 3
        assert cert.stats.cells_w == 5
        assert cert.stats.cells_uii == 2
        assert cert.stats.to_dict() == {
            "ui_cells": 3,
            "uii_cells": 2,
            "wa_cells": 3,
            "wb_cells": 2,
            "cells_u": 3,
            "cells_uii": 2,
            "cells_w": 5,
        }

    def test_pure_defender_instance(self):
        cert = solve_linear(normalize([1.0, 2.0, 3.0], 2, 2))

        assert cert.defender_pure is True
        assert cert.defender_active == frozenset({2, 3})
        np.testing.assert_allclose(cert.beta.array, [1.0, 0.0, 0.0])

    def test_results_in_original_order(self):
        cert = solve_linear(normalize([3.0, 1.0, 2.0], 2, 1))

        np.testing.assert_allclose(cert.alpha_original, [2 / 3, 1 / 3, 1.0])
        np.testing.assert_allclose(cert.beta_original, [1 / 3, 1.0, 2 / 3])
        assert cert.defender_active == frozenset({1, 3})


class TestDegenerateBudgets:
    """Closed forms when a budget is 0 or m."""

    def test_no_attack(self):
        cert = solve_linear(normalize([1.0, 2.0, 3.0], 0, 1))

        assert cert.value == 0.0
        assert cert.attacker_active == frozenset()
        np.testing.assert_allclose(cert.beta.array, [1.0, 1.0, 0.0])

    def test_full_protection(self):
        cert = solve_linear(normalize([1.0, 2.0, 3.0], 1, 3))

        assert cert.value == 0.0
        np.testing.assert_allclose(cert.alpha.array, [0.0, 0.0, 1.0])
        np.testing.assert_allclose(cert.beta.array, [0.0, 0.0, 0.0])

    def test_no_protection(self):
        cert = solve_linear(normalize([1.0, 2.0, 3.0], 2, 0))

        assert cert.value == pytest.approx(5.0)
        np.testing.assert_allclose(cert.alpha.array, [0.0, 1.0, 1.0])
        # no protection budget: every target stays in the defender's support
        assert cert.defender_active == frozenset({1, 2, 3})
        assert (cert.s_star, cert.r_star) == (3, 1)

    def test_attack_everything(self):
        cert = solve_linear(normalize([1.0, 2.0, 3.0], 3, 1))

        assert cert.value == pytest.approx(3.0)
        np.testing.assert_allclose(cert.alpha.array, [1.0, 1.0, 1.0])
        assert cert.defender_active == frozenset({3})
        assert cert.defender_pure is True

    @pytest.mark.parametrize("k_a,k_d", [(0, 0), (0, 3), (3, 0), (3, 3), (2, 0), (0, 2)])
    def test_marginals_feasible(self, k_a, k_d):
        cert = solve_linear(normalize([2.0, 1.0, 3.0], k_a, k_d))

        assert cert.alpha.is_feasible()
        assert cert.beta.is_feasible()
        assert cert.value == pytest.approx(oracle_certificate(cert.game).value, abs=1e-9)


class TestZeroCosts:
    """Zero-cost targets are stripped and absorb surplus budget."""

    def test_positive_part(self):
        reduced, z = positive_part(normalize([0.0, 2.0, 0.0, 1.0], 3, 3))

        assert z == 2
        assert reduced.costs == (1.0, 2.0)
        assert (reduced.k_a, reduced.k_d) == (2, 2)

    def test_zero_target_ignored(self):
        cert = solve_linear(normalize([0.0, 1.0, 2.0], 1, 1))

        assert cert.value == pytest.approx(2 / 3)
        np.testing.assert_allclose(cert.alpha.array, [0.0, 2 / 3, 1 / 3])
        np.testing.assert_allclose(cert.beta.array, [1.0, 2 / 3, 1 / 3])

    def test_surplus_attack_on_zero_targets(self):
        cert = solve_linear(normalize([0.0, 0.0, 1.0], 2, 1))

        assert cert.value == 0.0
        np.testing.assert_allclose(cert.alpha.array, [0.5, 0.5, 1.0])
        np.testing.assert_allclose(cert.beta.array, [1.0, 1.0, 0.0])
        assert cert.alpha.is_feasible() and cert.beta.is_feasible()

    def test_all_zero(self):
        cert = solve_linear(normalize([0.0, 0.0], 1, 1))

        assert cert.value == 0.0
        assert (cert.s_star, cert.r_star) == (1, 0)
        assert cert.alpha.is_feasible() and cert.beta.is_feasible()

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_oracle(self, seed):
        rng = np.random.default_rng(seed)
        costs = rng.random(6)
        costs[rng.choice(6, size=2, replace=False)] = 0.0
        g = normalize(costs, int(rng.integers(1, 6)), int(rng.integers(1, 6)))

        assert solve_linear(g).value == pytest.approx(oracle_certificate(g).value, abs=1e-9)


class TestExtremeCosts:
    """Cost ranges whose reciprocals leave the float range."""

    def test_subnormal_cost_is_negligible(self):
        g = normalize([1e-310, 1.0, 2.0], 1, 1)

        cert = solve_linear(g)

        assert cert.value == pytest.approx(2 / 3, rel=1e-12)
        assert cert.alpha.is_feasible() and cert.beta.is_feasible()
        assert defender_best_response_value(cert.alpha, g) == pytest.approx(2 / 3, rel=1e-9)

    def test_six_hundred_decades(self):
        g = normalize([1e-300, 1.0, 1e300], 1, 1)

        cert = solve_linear(g)

        assert cert.value == pytest.approx(1.0, rel=1e-9)
        assert cert.alpha.is_feasible() and cert.beta.is_feasible()
        assert attacker_best_response_value(cert.beta, g) == pytest.approx(1.0, rel=1e-9)
        assert defender_best_response_value(cert.alpha, g) == pytest.approx(1.0, rel=1e-9)

    def test_smallest_subnormal(self):
        cert = solve_linear(normalize([5e-324, 1.0], 1, 1))

        assert cert.value == pytest.approx(0.0, abs=1e-300)
        assert cert.alpha.total == pytest.approx(1.0)
        assert cert.beta.total == pytest.approx(1.0)
        assert cert.alpha.is_feasible() and cert.beta.is_feasible()

    def test_negligible_threshold(self):
        reduced, z = positive_part(normalize([1e-300, 1.0, 1e300], 1, 1))

        # the threshold is 1e-301 * 1e300 = 0.1
        assert z == 1
        assert reduced.costs == (1.0, 1e300)

    def test_value_scales_with_costs(self):
        rng = np.random.default_rng(23)
        costs = rng.lognormal(size=30)

        base = solve_linear(normalize(costs, 4, 6))
        scaled = solve_linear(normalize(costs * 1e200, 4, 6))

        assert scaled.value == pytest.approx(base.value * 1e200, rel=1e-12)
        np.testing.assert_allclose(scaled.alpha.array, base.alpha.array, atol=1e-12)

    def test_unscaled_table_reports_overflow(self):
        from core.attacker_solver import AttackerTable
        from core.errors import NumericalFailure

        with pytest.raises(NumericalFailure, match="overflows"):
            AttackerTable(normalize([1e-310, 1.0, 2.0], 1, 1))


class TestAgainstOracle:
    """The linear value equals the LP value on every small instance."""

    @pytest.mark.parametrize("seed", range(4))
    def test_small_sweep(self, seed):
        rng = np.random.default_rng(seed)
        for m in range(2, 7):
            costs = rng.random(m) + 0.05
            for k_a in range(m + 1):
                for k_d in range(m + 1):
                    g = normalize(costs, k_a, k_d)
                    expected = oracle_certificate(g).value
                    assert solve_linear(g).value == pytest.approx(
                        expected, rel=1e-8, abs=1e-9
                    ), (m, k_a, k_d)

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(40))
    def test_full_sweep(self, seed):
        rng = np.random.default_rng(1000 + seed)
        for m in range(2, 8):
            # integer costs exercise ties
            costs = rng.integers(1, 5, size=m).astype(float) if seed % 2 else rng.lognormal(size=m)
            for k_a in range(m + 1):
                for k_d in range(m + 1):
                    g = normalize(costs, k_a, k_d)
                    expected = oracle_certificate(g).value
                    assert solve_linear(g).value == pytest.approx(
                        expected, rel=1e-8, abs=1e-9
                    ), (costs.tolist(), k_a, k_d)

    def test_solve_both_reports_discrepancy(self):
        cert = solve_both(normalize([1.0, 2.0, 3.0, 4.0], 2, 2))

        assert cert.method is SolveMethod.LINEAR
        assert cert.discrepancy is not None
        assert cert.discrepancy < 1e-9


class TestInvariants:
    """Properties that hold at any scale."""

    @pytest.mark.parametrize("dist", ["uniform", "lognormal"])
    def test_primal_dual_at_scale(self, dist):
        rng = np.random.default_rng(42)
        g = _random_game(rng, 5000, 500, 500, dist)

        cert = solve_linear(g)

        secured = defender_best_response_value(cert.alpha, g)
        conceded = attacker_best_response_value(cert.beta, g)
        assert secured == pytest.approx(cert.value, rel=1e-9)
        assert conceded == pytest.approx(cert.value, rel=1e-9)

    @pytest.mark.parametrize("seed", range(10))
    def test_structure_and_budgets(self, seed):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(2, 300))
        g = _random_game(rng, m, int(rng.integers(1, m)), int(rng.integers(1, m)), "lognormal")

        cert = solve_linear(g)

        assert 1 <= cert.s_star <= g.k
        assert 0 <= cert.r_star <= cert.s_star - 1
        assert cert.alpha.is_feasible()
        assert cert.beta.is_feasible()
        assert cert.stats.cells_u <= 3 * g.k
        assert cert.stats.cells_w <= 2 * g.m

    def test_permutation_invariance(self):
        rng = np.random.default_rng(9)
        costs = rng.lognormal(size=40)
        order = rng.permutation(40)

        base = solve_linear(normalize(costs, 7, 12))
        shuffled = solve_linear(normalize(costs[order], 7, 12))

        assert shuffled.value == pytest.approx(base.value, rel=1e-12)
        np.testing.assert_allclose(
            np.asarray(shuffled.alpha_original), np.asarray(base.alpha_original)[order], atol=1e-12
        )

    def test_strategies_pass_verification(self):
        from core.strategy_lift import verify_saddle

        rng = np.random.default_rng(17)
        g = _random_game(rng, 9, 3, 4)

        cert = solve_linear(g, strategies=True)
        verdict = verify_saddle(cert.attacker_strategy, cert.defender_strategy, cert.value, g)

        assert verdict.passed


class TestCrossCheck:
    """Disagreeing searches are reported, not averaged."""

    def test_mismatch_raises(self, monkeypatch):
        import core.solver
        from core.defender_solver import solve_defender
        from core.errors import CrossCheckFailure

        def skewed(g, feas_eps=None):
            sol = solve_defender(g, feas_eps)
            return dataclasses.replace(sol, value=sol.value + 1.0)

        monkeypatch.setattr(core.solver, "solve_defender", skewed)

        with pytest.raises(CrossCheckFailure, match="differ"):
            solve_linear(normalize([1.0, 2.0, 3.0], 1, 1))

    def test_solver_port(self):
        from core.ports import SaddleSolver

        solver = LinearSaddleSolver(strategies=True)

        cert = solver.certify(normalize([1.0, 2.0], 1, 1))

        assert isinstance(solver, SaddleSolver)
        assert cert.attacker_strategy is not None
        assert cert.value == pytest.approx(2 / 3)


# ----------------------------------------------------------------------
# Structure of the optimal marginals
# ----------------------------------------------------------------------


def _tail_start(w, eps):
    """First index (1-based) of the run of products equal to the last one."""
    close = np.abs(w - w[-1]) <= eps
    run = close.size if close.all() else int(np.argmax(~close[::-1]))
    return close.size - run + 1


def assert_attacker_structure(cert, g):
    alpha = cert.alpha.array
    w = alpha * g.phi[1:]
    eps = 1e-9 * cert.value + 1e-12
    s, r = cert.s_star, cert.r_star

    # products never drop as the cost grows
    assert np.all(np.maximum.accumulate(w) - w <= eps)
    np.testing.assert_allclose(w[s - 1 :], w[-1], rtol=0, atol=eps)
    assert np.all(alpha[: s - r - 1] <= 1e-12)
    np.testing.assert_allclose(alpha[s - r : s - 1], 1.0, atol=1e-9)
    assert cert.alpha.is_feasible()


def assert_defender_structure(cert, g):
    beta = cert.beta.array
    s = _tail_start(beta * g.phi[1:], 1e-9 * max(1.0, cert.value))
    head = beta[: s - 1]
    off = np.flatnonzero(np.abs(head - 1.0) > 1e-9)

    # (a) all ones before the tail, or (b) a single bridge entry just below it
    assert off.size == 0 or off.tolist() == [s - 2], (s, beta.tolist())
    assert cert.beta.is_feasible()


def _uniform_sweep(seeds):
    for seed in seeds:
        rng = np.random.default_rng(seed)
        for m in range(2, 7):
            costs = 10.0 * (1.0 - rng.random(m))
            for k_a in range(1, m):
                for k_d in range(1, m):
                    yield normalize(costs, k_a, k_d)


def _large_instances(count, max_m, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        m = int(np.exp(rng.uniform(np.log(2), np.log(max_m))))
        m = max(m, 2)
        costs = rng.lognormal(size=m) if rng.random() < 0.5 else 10.0 * (1.0 - rng.random(m))
        yield normalize(costs, int(rng.integers(1, m)), int(rng.integers(1, m)))


def _check_small(g):
    from core.strategy_lift import verify_saddle

    cert = solve_linear(g, strategies=True)
    expected = oracle_certificate(g).value

    assert abs(cert.value - expected) <= 1e-8 * max(1.0, expected), (g, expected)
    assert_attacker_structure(cert, g)
    assert_defender_structure(cert, g)
    verdict = verify_saddle(cert.attacker_strategy, cert.defender_strategy, cert.value, g, tol=1e-8)
    assert verdict.passed, (g, verdict)


def _check_large(g):
    from core.attacker_solver import solve_attacker
    from core.defender_solver import solve_defender

    attacker = solve_attacker(g).value
    defender = solve_defender(g).value
    assert abs(attacker - defender) <= 1e-9 * max(1.0, attacker), (g.m, g.k_a, g.k_d)

    cert = solve_linear(g)
    assert_attacker_structure(cert, g)
    assert_defender_structure(cert, g)


class TestStructure:
    """Oracle agreement, marginal shapes and saddle closure."""

    def test_structure_of_worked_instances(self):
        for costs, k_a, k_d in (([1.0, 2.0, 3.0], 2, 1), ([1.0, 2.0, 3.0], 2, 2)):
            g = normalize(costs, k_a, k_d)
            cert = solve_linear(g)
            assert_attacker_structure(cert, g)
            assert_defender_structure(cert, g)

    @pytest.mark.parametrize("seed", range(5))
    def test_uniform_small_instances(self, seed):
        for g in _uniform_sweep([seed]):
            _check_small(g)

    @pytest.mark.slow
    @pytest.mark.parametrize("block", range(20))
    def test_uniform_small_instances_full(self, block):
        for g in _uniform_sweep(range(10 * block, 10 * block + 10)):
            _check_small(g)

    def test_large_instances(self):
        for g in _large_instances(40, 2000, seed=77):
            _check_large(g)

    @pytest.mark.slow
    def test_large_instances_full(self):
        for g in _large_instances(1000, 10_000, seed=2024):
            _check_large(g)


# ----------------------------------------------------------------------
# Running time
# ----------------------------------------------------------------------


def _best_runtime(m, repeats=3):
    rng = np.random.default_rng(m)
    g = normalize(1.0 - rng.random(m), m // 10, m // 10)
    runs = [solve_linear(g) for _ in range(repeats)]
    return g, min(cert.runtime_ns for cert in runs), runs[0].stats


@pytest.mark.slow
def test_million_targets_under_a_second():
    g, small, stats = _best_runtime(1_000_000)
    _, large, _ = _best_runtime(2_000_000)

    assert small <= 1_000_000_000
    assert large / small <= 2.5
    assert stats.cells_u <= 2 * g.k
    assert stats.cells_uii <= g.k
    assert stats.cells_w <= 4 * g.m
