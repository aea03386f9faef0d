"""Weight machinery, global action composition, baselines, option stepping."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairo import controller, fairness, qnet
from fairo.controller import Observation

TOL = 1e-9


class StubEnv:
    """Scalar-action environment with a scripted satisfaction rule."""

    action_type = 1

    def __init__(self, desired, tau=2.5, n=3):
        self.n = n
        self.desired = np.asarray(desired, dtype=float)
        self.tau = tau

    def begin_tick(self, tick):
        return Observation(desired=self.desired)

    def apply(self, tick, a_g):
        satisfied = np.abs(self.desired - a_g) <= self.tau
        return controller.Outcome(
            satisfied=satisfied,
            f_terms=np.where(satisfied, 1.0, -0.5),
        )


class TestAdjustWeights:
    def test_small_raise_renormalizes(self):
        w = controller.adjust_weights(np.full(3, 1 / 3), 0, +1, 0.01)
        expected = np.array([(1 / 3 + 0.01), 1 / 3, 1 / 3]) / (1.0 + 0.01)
        assert w == pytest.approx(expected, abs=TOL)
        assert w.sum() == pytest.approx(1.0, abs=TOL)

    def test_hold_returns_same_weights(self):
        start = np.array([0.2, 0.3, 0.5])
        w = controller.adjust_weights(start, 1, 0, 0.05)
        assert np.array_equal(w, start)

    def test_lower_clamps_at_floor(self):
        w = controller.adjust_weights(
            np.array([0.01, 0.495, 0.495]), 0, -1, 0.05, w_floor=0.01
        )
        assert w[0] == pytest.approx(0.01, abs=1e-12)
        assert w.sum() == pytest.approx(1.0, abs=TOL)

    def test_raise_near_one_keeps_floor_for_others(self):
        w = controller.adjust_weights(np.array([0.98, 0.01, 0.01]), 0, +1, 0.05)
        assert (w >= 0.01 - 1e-12).all()
        assert w.sum() == pytest.approx(1.0, abs=TOL)

    def test_bad_direction_rejected(self):
        with pytest.raises(ValueError):
            controller.adjust_weights(np.full(3, 1 / 3), 0, 2, 0.05)

    def test_infeasible_floor_rejected(self):
        with pytest.raises(ValueError):
            controller.adjust_weights(np.full(3, 1 / 3), 0, +1, 0.05, w_floor=0.5)

    @given(
        st.integers(2, 6),
        st.integers(0, 5),
        st.sampled_from([-1, 0, 1]),
        st.floats(0.001, 0.3),
        st.integers(0, 2 ** 32 - 1),
    )
    @settings(max_examples=300, deadline=None)
    def test_simplex_closure(self, n, i, direction, delta_w, seed):
        rng = np.random.default_rng(seed)
        w = 0.01 + (1.0 - n * 0.01) * rng.dirichlet(np.ones(n))
        out = controller.adjust_weights(w, i % n, direction, delta_w)
        assert out.sum() == pytest.approx(1.0, abs=1e-9)
        assert (out >= 0.01 - 1e-9).all()


class TestGlobalActions:
    def test_type1_degenerate_weight(self):
        assert controller.global_action_type1(
            np.array([1.0, 0.0, 0.0]), np.array([62.0, 77.0, 72.0])
        ) == 62.0

    def test_type1_uniform_average(self):
        value = controller.global_action_type1(
            np.full(3, 1 / 3), np.array([62.0, 77.0, 72.0])
        )
        assert value == pytest.approx(70.333333333333329, abs=1e-9)

    def test_type1_weighted(self):
        value = controller.global_action_type1(
            np.array([0.5, 0.25, 0.25]), np.array([60.0, 70.0, 80.0])
        )
        assert value == pytest.approx(67.5, abs=TOL)

    def test_type2_shares(self):
        alloc = controller.global_allocation_type2(np.array([0.5, 0.3, 0.2]), 100.0)
        assert alloc == pytest.approx([50.0, 30.0, 20.0], abs=TOL)

    def test_type2_zero_resource(self):
        alloc = controller.global_allocation_type2(np.full(3, 1 / 3), 0.0)
        assert np.array_equal(alloc, np.zeros(3))

    def test_type2_negative_resource_rejected(self):
        with pytest.raises(ValueError):
            controller.global_allocation_type2(np.full(3, 1 / 3), -1.0)

    def test_type3_uniform_reduces_to_argmax_effect(self):
        choice = controller.global_action_type3(
            np.full(3, 1 / 3), np.array([0.1, 0.9, 0.2]), np.array([0, 1, 2])
        )
        assert choice == 1

    def test_type3_weight_can_override_effect(self):
        choice = controller.global_action_type3(
            np.array([0.8, 0.1, 0.1]), np.array([0.5, 0.9, 0.9]), np.array([0, 1, 2])
        )
        assert choice == 0  # 0.4 beats 0.09

    def test_type3_tie_breaks_lowest(self):
        choice = controller.global_action_type3(
            np.full(3, 1 / 3), np.ones(3), np.array([2, 1, 0])
        )
        assert choice == 2  # human 0's preference

    @given(st.integers(2, 6), st.floats(0.1, 100.0), st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=300, deadline=None)
    def test_type3_scale_invariant(self, n, scale, seed):
        rng = np.random.default_rng(seed)
        w = rng.dirichlet(np.ones(n))
        k = rng.random(n) + 0.01
        d = np.arange(n)
        assert controller.global_action_type3(w, k, d) == \
            controller.global_action_type3(w, k * scale, d)


class TestOptionReward:
    def test_full_weight_on_fairness(self):
        assert controller.option_reward(0.5, 1.0, 1.0) == 1.0

    def test_cancellation(self):
        assert controller.option_reward(0.5, 1.0, -1.0) == 0.0

    def test_unbalanced_mix(self):
        assert controller.option_reward(0.3, 0.5, -0.5) == pytest.approx(-0.2, abs=TOL)

    def test_zeta_range_checked(self):
        with pytest.raises(ValueError):
            controller.option_reward(1.5, 0.0, 0.0)

    def test_term_range_checked(self):
        with pytest.raises(ValueError):
            controller.option_reward(0.5, 1.2, 0.0)


class TestStatelessBaselines:
    def test_average_type1(self):
        obs = Observation(desired=np.array([62.0, 77.0, 72.0]))
        value = controller.stateless_action("average", 1, obs, 0, 3)
        assert value == pytest.approx(70.333333333333329, abs=1e-9)

    def test_round_robin_cycles(self):
        obs = Observation(desired=np.array([62.0, 77.0, 72.0]))
        picks = [controller.stateless_action("round_robin", 1, obs, t, 3)
                 for t in range(6)]
        assert picks == [62.0, 77.0, 72.0, 62.0, 77.0, 72.0]

    def test_round_robin_type2_leftover_split(self):
        obs = Observation(desired=np.array([10.0, 20.0, 30.0]), resource=45.0)
        alloc = controller.stateless_action("round_robin", 2, obs, 0, 3)
        assert alloc == pytest.approx([10.0, 17.5, 17.5], abs=TOL)

    def test_weighted_average_proportional(self):
        obs = Observation(desired=np.array([10.0, 20.0, 30.0]), resource=30.0)
        alloc = controller.stateless_action("weighted_average", 2, obs, 0, 3)
        assert alloc == pytest.approx([5.0, 10.0, 15.0], abs=TOL)

    def test_weighted_average_zero_demand_splits_evenly(self):
        obs = Observation(desired=np.zeros(3), resource=30.0)
        alloc = controller.stateless_action("weighted_average", 2, obs, 0, 3)
        assert alloc == pytest.approx([10.0, 10.0, 10.0], abs=TOL)

    def test_weighted_rr_leftover_proportional(self):
        obs = Observation(desired=np.array([10.0, 20.0, 30.0]), resource=45.0)
        alloc = controller.stateless_action("weighted_rr", 2, obs, 0, 3)
        # chosen 0 takes its demand; leftover 35 splits 20:30 over the others
        assert alloc == pytest.approx([10.0, 14.0, 21.0], abs=TOL)

    def test_weighted_methods_need_type2(self):
        obs = Observation(desired=np.array([62.0, 77.0, 72.0]))
        with pytest.raises(ValueError):
            controller.stateless_action("weighted_average", 1, obs, 0, 3)

    def test_unknown_kind_rejected(self):
        obs = Observation(desired=np.zeros(3))
        with pytest.raises(ValueError):
            controller.stateless_action("fifo", 1, obs, 0, 3)

    @given(st.integers(2, 6), st.integers(0, 50), st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=300, deadline=None)
    def test_type2_conservation(self, n, t, seed):
        rng = np.random.default_rng(seed)
        d = rng.random(n) * 10.0
        resource = float(rng.random() * 20.0 + 0.1)
        obs = Observation(desired=d, resource=resource)
        for kind in ("average", "round_robin", "weighted_average", "weighted_rr"):
            alloc = controller.stateless_action(kind, 2, obs, t, n)
            assert float(np.sum(alloc)) == pytest.approx(resource, rel=1e-9)

    def test_round_robin_equal_counts(self):
        obs = Observation(desired=np.array([62.0, 77.0, 72.0]))
        picks = [controller.stateless_action("round_robin", 1, obs, t, 3)
                 for t in range(3000)]
        counts = [picks.count(v) for v in (62.0, 77.0, 72.0)]
        assert counts == [1000, 1000, 1000]


def _fresh_agent(seed=0, warmup=4, **kwargs):
    config = qnet.TrainConfig(alpha=1e-2, gamma=0.5, epsilon_start=0.2,
                              epsilon_end=0.01, epsilon_decay_steps=100)
    return controller.FairoAgent(3, 1, warmup=warmup, train_config=config,
                                 net_seeds=[seed, seed + 1, seed + 2], **kwargs)


class TestFairoStep:
    def test_warmup_matches_round_robin(self):
        env = StubEnv([62.0, 77.0, 72.0])
        agent = _fresh_agent(warmup=4)
        ledger = fairness.init_ledger(3)
        rng = np.random.default_rng(0)
        decision, _ = controller.fairo_step(agent, ledger, env, 2, rng)
        baseline, _ = controller.baseline_step("round_robin", ledger, env, 2)
        assert decision.phase == "warmup"
        assert decision.global_action == baseline.global_action
        assert decision.active_option == -1
        assert decision.dqn_action is None

    def test_post_warmup_activates_argmin(self):
        env = StubEnv([62.0, 77.0, 72.0])
        agent = _fresh_agent(warmup=0)
        ledger = fairness.init_ledger(3)
        # skew the ledger so human 1 is clearly the argmin
        for _ in range(10):
            ledger = fairness.update_ledger(ledger, [True, False, True])
        rng = np.random.default_rng(1)
        before = agent.weights.copy()
        decision, _ = controller.fairo_step(agent, ledger, env, 0, rng)
        assert decision.active_option == 1
        assert decision.dqn_action in controller.ACTION_NAMES
        moved = np.where(agent.weights != before)[0]
        if decision.dqn_action == "hold":
            assert moved.size == 0
        else:
            assert moved.size > 0  # renormalization moves everyone

    def test_option_persists_while_min(self):
        env = StubEnv([62.0, 77.0, 72.0])
        agent = _fresh_agent(warmup=0)
        ledger = fairness.init_ledger(3)
        for _ in range(10):
            ledger = fairness.update_ledger(ledger, [True, False, True])
        rng = np.random.default_rng(2)
        decision, ledger = controller.fairo_step(agent, ledger, env, 0, rng)
        first = decision.active_option
        # human 1 stays unsatisfied under every reachable action here, so
        # its closeness stays the minimum and the option must not switch
        decision, ledger = controller.fairo_step(agent, ledger, env, 1, rng)
        assert decision.active_option == first

    def test_weights_stay_on_simplex(self):
        env = StubEnv([62.0, 77.0, 72.0])
        agent = _fresh_agent(warmup=0)
        ledger = fairness.init_ledger(3)
        rng = np.random.default_rng(3)
        for tick in range(200):
            decision, ledger = controller.fairo_step(agent, ledger, env, tick, rng)
            assert decision.weights.sum() == pytest.approx(1.0, abs=1e-9)
            assert (decision.weights >= agent.w_floor - 1e-9).all()

    def test_reward_recorded_and_bounded(self):
        env = StubEnv([62.0, 77.0, 72.0])
        agent = _fresh_agent(warmup=0)
        ledger = fairness.init_ledger(3)
        rng = np.random.default_rng(4)
        for tick in range(50):
            decision, ledger = controller.fairo_step(agent, ledger, env, tick, rng)
            assert decision.reward is not None
            assert -1.0 <= decision.reward <= 1.0

    def test_deterministic_given_seed(self):
        def run():
            env = StubEnv([62.0, 77.0, 72.0])
            agent = _fresh_agent(seed=7, warmup=2)
            ledger = fairness.init_ledger(3)
            rng = np.random.default_rng(7)
            trace = []
            for tick in range(20):
                decision, ledger = controller.fairo_step(agent, ledger, env, tick, rng)
                trace.append((decision.global_action, decision.active_option,
                              decision.dqn_action, tuple(decision.weights)))
            return trace

        assert run() == run()


class TestMonoDqnStep:
    def test_variants_have_expected_inputs(self):
        three = controller.MonoDqnAgent(3, 1, variant="mono_dqn_3in")
        four = controller.MonoDqnAgent(3, 1, variant="mono_dqn_4in")
        assert three.net.input_dim == 3
        assert four.net.input_dim == 4
        x = four.input_vector(np.array([0.9, 0.8, 0.7]), 2)
        assert x[-1] == 1.0  # argmin index scaled by n-1

    def test_unknown_variant_rejected(self):
        with pytest.raises(ValueError):
            controller.MonoDqnAgent(3, 1, variant="mono_dqn_5in")

    def test_step_adjusts_argmin_weight(self):
        env = StubEnv([62.0, 77.0, 72.0])
        agent = controller.MonoDqnAgent(3, 1, warmup=0, net_seed=5)
        ledger = fairness.init_ledger(3)
        for _ in range(10):
            ledger = fairness.update_ledger(ledger, [True, False, True])
        rng = np.random.default_rng(5)
        decision, _ = controller.mono_dqn_step(agent, ledger, env, 0, rng)
        assert decision.phase == "main"
        assert decision.active_option == -1
        assert decision.weights.sum() == pytest.approx(1.0, abs=1e-9)
