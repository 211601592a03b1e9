"""
Tests for lifting marginals to mixed strategies and the saddle verifier.
"""

import numpy as np
import pytest


def _atoms(strategy):
    return {subset.members: prob for subset, prob in strategy.atoms}


class TestLiftMarginal:
    """Test the systematic sweep."""

    def test_bridge_marginal(self):
        from core.dto import MarginalVector
        from core.strategy_lift import lift_marginal

        alpha = MarginalVector.from_array([1 / 3, 1.0, 2 / 3], 2)

        strategy = lift_marginal(alpha, 2)

        atoms = _atoms(strategy)
        assert set(atoms) == {(1, 2), (2, 3)}
        assert atoms[(1, 2)] == pytest.approx(1 / 3)
        assert atoms[(2, 3)] == pytest.approx(2 / 3)
        assert strategy.subset_size == 2

    def test_integral_marginal_is_pure(self):
        from core.dto import MarginalVector
        from core.strategy_lift import lift_marginal

        strategy = lift_marginal(MarginalVector.from_array([1.0, 0.0, 1.0], 2), 2)

        assert _atoms(strategy) == {(1, 3): 1.0}

    def test_empty_subset(self):
        from core.dto import MarginalVector
        from core.strategy_lift import lift_marginal

        strategy = lift_marginal(MarginalVector.from_array([0.0, 0.0], 0), 0)

        assert _atoms(strategy) == {(): 1.0}

    def test_rejects_entries_above_one(self):
        from core.dto import MarginalVector
        from core.errors import InfeasibleMarginal
        from core.strategy_lift import lift_marginal

        with pytest.raises(InfeasibleMarginal):
            lift_marginal(MarginalVector.from_array([1.5, 0.5], 2), 2)

    def test_rejects_wrong_total(self):
        from core.dto import MarginalVector
        from core.errors import InfeasibleMarginal
        from core.strategy_lift import lift_marginal

        with pytest.raises(InfeasibleMarginal, match="expected 2"):
            lift_marginal(MarginalVector.from_array([0.5, 0.5, 0.5], 2), 2)

    @pytest.mark.parametrize("seed", range(10))
    def test_random_marginals_reproduced(self, seed):
        from core.attacker_solver import solve_attacker
        from core.game import marginal_of_strategy, normalize
        from core.strategy_lift import lift_marginal

        rng = np.random.default_rng(seed)
        m = int(rng.integers(4, 60))
        g = normalize(rng.lognormal(size=m), int(rng.integers(1, m)), int(rng.integers(1, m)))
        alpha = solve_attacker(g).alpha

        strategy = lift_marginal(alpha, g.k_a)

        assert len(strategy) <= g.m
        assert strategy.total_probability == pytest.approx(1.0)
        assert all(len(subset) == g.k_a for subset, _ in strategy.atoms)
        assert all(prob > 0 for _, prob in strategy.atoms)
        np.testing.assert_allclose(
            marginal_of_strategy(strategy, g.m).array, alpha.array, atol=1e-9
        )


    @staticmethod
    def _random_marginal(rng, max_m):
        from core.dto import SparseMixedStrategy, TargetSubset
        from core.game import marginal_of_strategy

        m = int(rng.integers(1, max_m + 1))
        k = int(rng.integers(0, m + 1))
        count = int(rng.integers(1, 6))
        weights = rng.dirichlet(np.ones(count))
        atoms = tuple(
            (TargetSubset.of(rng.choice(m, size=k, replace=False) + 1), float(w))
            for w in weights
        )
        return marginal_of_strategy(SparseMixedStrategy(atoms=atoms, subset_size=k), m), k

    def _check_round_trip(self, rng, count):
        from core.game import check_strategy, marginal_of_strategy
        from core.strategy_lift import lift_marginal

        for _ in range(count):
            alpha, k = self._random_marginal(rng, 64)

            strategy = lift_marginal(alpha, k)

            assert len(strategy) <= max(alpha.m, 1)
            check_strategy(strategy, k, alpha.m)
            np.testing.assert_allclose(
                marginal_of_strategy(strategy, alpha.m).array, alpha.array, rtol=0, atol=1e-12
            )

    def test_round_trip(self):
        self._check_round_trip(np.random.default_rng(64), 500)

    @pytest.mark.slow
    def test_round_trip_full(self):
        self._check_round_trip(np.random.default_rng(6464), 10_000)


class TestLiftDefender:
    """Test protection-set strategies built from β."""

    def test_complement_marginal(self):
        from core.dto import MarginalVector
        from core.strategy_lift import lift_defender

        beta = MarginalVector.from_array([1.0, 2 / 3, 1 / 3], 2)

        strategy = lift_defender(beta, 1, 3)

        atoms = _atoms(strategy)
        assert set(atoms) == {(2,), (3,)}
        assert atoms[(2,)] == pytest.approx(1 / 3)
        assert atoms[(3,)] == pytest.approx(2 / 3)

    def test_length_checked(self):
        from core.dto import MarginalVector
        from core.errors import CardinalityMismatch
        from core.strategy_lift import lift_defender

        with pytest.raises(CardinalityMismatch):
            lift_defender(MarginalVector.from_array([1.0, 0.0], 1), 1, 3)


class TestLiftRecursive:
    """Test the inductive decomposition used for cross-checks."""

    def test_matches_sweep_marginals(self):
        from core.dto import MarginalVector
        from core.game import marginal_of_strategy
        from core.strategy_lift import lift_marginal_recursive

        alpha = MarginalVector.from_array([1 / 3, 1.0, 2 / 3], 2)

        strategy = lift_marginal_recursive(alpha, 2)

        assert _atoms(strategy) == pytest.approx({(2, 3): 2 / 3, (1, 2): 1 / 3})
        np.testing.assert_allclose(marginal_of_strategy(strategy, 3).array, alpha.array)

    def test_general_split(self):
        from core.dto import MarginalVector
        from core.game import marginal_of_strategy
        from core.strategy_lift import lift_marginal_recursive

        alpha = MarginalVector.from_array([0.6] * 5, 3)

        strategy = lift_marginal_recursive(alpha, 3)

        assert strategy.total_probability == pytest.approx(1.0)
        assert all(len(subset) == 3 for subset, _ in strategy.atoms)
        np.testing.assert_allclose(marginal_of_strategy(strategy, 5).array, alpha.array)

    def test_proportional_rescale_can_overflow(self):
        from core.dto import MarginalVector
        from core.errors import InfeasibleMarginal
        from core.strategy_lift import lift_marginal, lift_marginal_recursive

        # dropping target 1 rescales the saturated last target to 1.2
        alpha = MarginalVector.from_array([0.5, 0.5, 0.5, 0.5, 1.0], 3)

        with pytest.raises(InfeasibleMarginal):
            lift_marginal_recursive(alpha, 3)
        assert lift_marginal(alpha, 3).total_probability == pytest.approx(1.0)


class TestVerifySaddle:
    """Test the enumeration verifier."""

    def _bridge_game(self):
        from core.dto import MarginalVector
        from core.game import normalize
        from core.strategy_lift import lift_defender, lift_marginal

        g = normalize([1.0, 2.0, 3.0], 2, 1)
        p = lift_marginal(MarginalVector.from_array([1 / 3, 1.0, 2 / 3], 2), 2)
        q = lift_defender(MarginalVector.from_array([1.0, 2 / 3, 1 / 3], 2), 1, 3)
        return g, p, q

    def test_optimal_pair_passes(self):
        from core.strategy_lift import verify_saddle

        g, p, q = self._bridge_game()

        verdict = verify_saddle(p, q, 7 / 3, g)

        assert verdict.passed
        assert verdict.attacker_guarantee == pytest.approx(7 / 3)
        assert verdict.defender_guarantee == pytest.approx(7 / 3)

    def test_overstated_value_fails_with_witness(self):
        from core.strategy_lift import verify_saddle

        g, p, q = self._bridge_game()

        verdict = verify_saddle(p, q, 3.0, g)

        assert not verdict.passed
        assert not verdict.attacker_ok
        assert verdict.defender_ok
        assert verdict.worst_defense.members == (2,)
        assert verdict.to_dict(g)["worst_defense"] == [2]

    def test_understated_value_fails_on_defender_side(self):
        from core.strategy_lift import verify_saddle

        g, p, q = self._bridge_game()

        verdict = verify_saddle(p, q, 2.0, g)

        assert not verdict.passed
        assert verdict.attacker_ok
        assert not verdict.defender_ok

    def test_scale_limit(self):
        from core.errors import ScaleLimit
        from core.strategy_lift import verify_saddle

        g, p, q = self._bridge_game()

        with pytest.raises(ScaleLimit) as exc:
            verify_saddle(p, q, 7 / 3, g, cap=2)
        assert exc.value.size == 3
        assert exc.value.cap == 2

    def test_cardinality_checked(self):
        from core.errors import CardinalityMismatch
        from core.strategy_lift import verify_saddle

        g, p, q = self._bridge_game()

        with pytest.raises(CardinalityMismatch):
            verify_saddle(q, p, 7 / 3, g)

    def test_forged_strategy_rejected(self):
        from core.dto import SparseMixedStrategy, TargetSubset
        from core.errors import InvalidStrategy
        from core.strategy_lift import verify_saddle

        g, _, q = self._bridge_game()
        forged = SparseMixedStrategy(atoms=((TargetSubset((2, 3, 3)), 50.0),), subset_size=2)

        with pytest.raises(InvalidStrategy):
            verify_saddle(forged, q, 100.0, g)

    def test_unnormalized_strategy_rejected(self):
        from core.dto import SparseMixedStrategy, TargetSubset
        from core.errors import InvalidStrategy
        from core.strategy_lift import verify_saddle

        g, p, _ = self._bridge_game()
        doubled = SparseMixedStrategy(atoms=((TargetSubset.of([3]), 2.0),), subset_size=1)

        with pytest.raises(InvalidStrategy, match="sum to"):
            verify_saddle(p, doubled, 14 / 3, g)
