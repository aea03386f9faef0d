"""Options controller: weight machinery, global actions, and baselines.

One option per human. The active option's network picks a weight adjustment
(raise/lower/hold) for that human, weights renormalize on the simplex, and
the weighted preferences compose into one global action per the application
type: 1 = weighted sum of scalar preferences, 2 = weighted split of a shared
resource, 3 = the categorical preference with the maximum weighted effect.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from fairo import fairness, qnet

W_FLOOR = 0.01
DIRECTIONS = (1, -1, 0)  # action index -> weight step sign
ACTION_NAMES = ("raise", "lower", "hold")

STATELESS_KINDS = ("average", "weighted_average", "round_robin", "weighted_rr")
MONO_KINDS = ("mono_dqn_3in", "mono_dqn_4in")


@dataclass
class Observation:
    """What an environment exposes at the start of a tick."""

    desired: np.ndarray  # scalar preferences (types 1-2) or action indices (type 3)
    resource: Optional[float] = None  # type 2 only
    effects: Optional[np.ndarray] = None  # type 3 only: k_i per proposing human


@dataclass
class Outcome:
    """What an environment reports after the global action is applied."""

    satisfied: np.ndarray  # bool per human
    f_terms: np.ndarray  # application f-value per human, in [-1, 1]
    extras: dict = field(default_factory=dict)


@dataclass
class StepDecision:
    """One tick's record: who acted, what was applied, what came back."""

    tick: int
    phase: str  # "warmup" or "main"
    desired: np.ndarray
    global_action: object  # scalar (type 1), allocation vector (2), action index (3)
    active_option: int  # -1 when no option drove the tick
    dqn_action: Optional[str]
    weights: np.ndarray
    closeness: np.ndarray  # fairness state after the ledger update
    satisfied: np.ndarray
    perf: np.ndarray  # per-human P_i
    sat_metric: np.ndarray  # per-human v/(u+v) after the update
    reward: Optional[float] = None
    extras: dict = field(default_factory=dict)


def init_weights(n):
    return np.full(n, 1.0 / n)


def adjust_weights(w, i, direction, delta_w, w_floor=W_FLOOR):
    """Step w_i by direction*delta_w, clamp to [w_floor, 1], renormalize.

    Renormalization can push other weights a hair under the floor, so any
    violators are pinned to the floor and the rest rescaled to keep the sum 1.
    """
    w = np.asarray(w, dtype=float).copy()
    n = w.size
    if n * w_floor > 1.0 + 1e-12:
        raise ValueError(f"floor {w_floor} infeasible for {n} weights")
    if direction not in (-1, 0, 1):
        raise ValueError(f"direction must be -1, 0, or +1, got {direction}")
    if direction == 0:
        return w
    w[i] = np.clip(w[i] + direction * delta_w, w_floor, 1.0)
    w /= w.sum()
    for _ in range(n):
        low = w < w_floor - 1e-12
        if not low.any():
            break
        free = ~low
        w[low] = w_floor
        w[free] *= (1.0 - low.sum() * w_floor) / w[free].sum()
    return w


def global_action_type1(w, d):
    """Weighted sum of the scalar preferences."""
    return float(np.dot(w, d))


def global_allocation_type2(w, resource):
    """Weighted shares of the resource; shares sum back to the resource."""
    if resource < 0:
        raise ValueError(f"resource must be nonnegative, got {resource}")
    return np.asarray(w, dtype=float) * float(resource)


def global_action_type3(w, k, d):
    """Preference of the human with the maximum weighted effect w_i * k_i."""
    j = int(np.argmax(np.asarray(w) * np.asarray(k)))
    return d[j]


def option_reward(zeta, fairness_term, performance_term):
    """zeta * F + (1 - zeta) * P; both terms must already lie in [-1, 1]."""
    if not 0.0 <= zeta <= 1.0:
        raise ValueError("zeta must be in [0, 1]")
    for name, term in (("fairness", fairness_term), ("performance", performance_term)):
        if not -1.0 <= term <= 1.0:
            raise ValueError(f"{name} term {term} outside [-1, 1]")
    return zeta * fairness_term + (1.0 - zeta) * performance_term


class FairoAgent:
    """One weight-adjusting Q-network per human plus the shared weights."""

    def __init__(self, n, action_type, delta_w=0.05, zeta=0.5, warmup=1200,
                 w_floor=W_FLOOR, hidden=(32,), train_config=None, net_seeds=None):
        self.n = n
        self.action_type = action_type
        self.delta_w = delta_w
        self.zeta = zeta
        self.warmup = warmup
        self.w_floor = w_floor
        self.config = train_config or qnet.TrainConfig()
        if net_seeds is None:
            net_seeds = range(n)
        self.nets = [qnet.QNetwork(n + 1, hidden=hidden, seed=s) for s in net_seeds]
        self.prev_l = [None] * n  # per-option L memory for the improvement term
        self.weights = init_weights(n)
        self.active = None
        # each option's epsilon decays over its own training steps, so options
        # that rarely activate early still get their full exploration budget
        self.train_steps = [0] * n


class MonoDqnAgent:
    """Single-network baseline: one net adjusts the current argmin human."""

    def __init__(self, n, action_type, variant="mono_dqn_3in", delta_w=0.05,
                 warmup=1200, w_floor=W_FLOOR, hidden=(32,), train_config=None,
                 net_seed=0):
        if variant not in MONO_KINDS:
            raise ValueError(f"unknown mono-DQN variant {variant!r}")
        self.n = n
        self.action_type = action_type
        self.variant = variant
        self.delta_w = delta_w
        self.warmup = warmup
        self.w_floor = w_floor
        self.config = train_config or qnet.TrainConfig()
        input_dim = n + 1 if variant == "mono_dqn_4in" else n
        self.net = qnet.QNetwork(input_dim, hidden=hidden, seed=net_seed)
        self.weights = init_weights(n)
        self.train_steps = 0

    def input_vector(self, state, j):
        if self.variant == "mono_dqn_4in":
            return np.append(state, j / (self.n - 1))
        return np.asarray(state, dtype=float)


def compose_global_action(action_type, w, obs):
    if action_type == 1:
        return global_action_type1(w, obs.desired)
    if action_type == 2:
        return global_allocation_type2(w, obs.resource)
    if action_type == 3:
        return global_action_type3(w, obs.effects, obs.desired)
    raise ValueError(f"unknown action type {action_type}")


def stateless_action(kind, action_type, obs, t, n):
    """Global action for the non-learning baselines at tick t."""
    d = obs.desired
    if kind == "average":
        if action_type == 1:
            return float(np.mean(d))
        if action_type == 2:
            return np.full(n, obs.resource / n)
        # type 3: the preference with the median effect
        order = np.argsort(obs.effects, kind="stable")
        return d[int(order[(n - 1) // 2])]
    if kind == "round_robin":
        chosen = t % n
        if action_type == 1 or action_type == 3:
            return d[chosen]
        supply = np.zeros(n)
        supply[chosen] = min(d[chosen], obs.resource)
        leftover = obs.resource - supply[chosen]
        others = np.arange(n) != chosen
        supply[others] = leftover / (n - 1)
        return supply
    if kind == "weighted_average":
        if action_type != 2:
            raise ValueError("weighted_average is a resource-split method")
        total = float(np.sum(d))
        if total <= 0.0:
            return np.full(n, obs.resource / n)
        return obs.resource * np.asarray(d, dtype=float) / total
    if kind == "weighted_rr":
        if action_type != 2:
            raise ValueError("weighted_rr is a resource-split method")
        chosen = t % n
        supply = np.zeros(n)
        supply[chosen] = min(d[chosen], obs.resource)
        leftover = obs.resource - supply[chosen]
        others = np.arange(n) != chosen
        other_total = float(np.sum(np.asarray(d)[others]))
        if other_total > 0.0:
            supply[others] = leftover * np.asarray(d, dtype=float)[others] / other_total
        else:
            supply[others] = leftover / (n - 1)
        return supply
    raise ValueError(f"unknown baseline kind {kind!r}")


def _implied_weights(kind, action_type, a_g, obs, n):
    # weight column bookkeeping: uniform unless the method splits a resource
    if action_type == 2 and kind in ("weighted_average", "weighted_rr"):
        if obs.resource and obs.resource > 0:
            return np.asarray(a_g, dtype=float) / obs.resource
    return init_weights(n)


def _finish_tick(ledger, outcome):
    """Ledger update plus the derived quantities every policy records."""
    new_ledger = fairness.update_ledger(ledger, outcome.satisfied)
    state = fairness.fairness_state(new_ledger)
    records = new_ledger.records
    sat_metric = records[:, 1] / records.sum(axis=1)
    perf = 0.2 * sat_metric + 0.8 * outcome.f_terms
    return new_ledger, state, sat_metric, perf


def baseline_step(kind, ledger, env, tick):
    """One tick of a stateless baseline; returns (decision, updated ledger)."""
    if kind not in STATELESS_KINDS:
        raise ValueError(f"unknown stateless baseline {kind!r}")
    obs = env.begin_tick(tick)
    a_g = stateless_action(kind, env.action_type, obs, tick, env.n)
    outcome = env.apply(tick, a_g)
    new_ledger, state, sat_metric, perf = _finish_tick(ledger, outcome)
    decision = StepDecision(
        tick=tick,
        phase="main",
        desired=np.asarray(obs.desired),
        global_action=a_g,
        active_option=-1,
        dqn_action=None,
        weights=_implied_weights(kind, env.action_type, a_g, obs, env.n),
        closeness=state,
        satisfied=np.asarray(outcome.satisfied, dtype=bool),
        perf=perf,
        sat_metric=sat_metric,
        extras=outcome.extras,
    )
    return decision, new_ledger


def fairo_step(agent, ledger, env, tick, rng):
    """One full controller iteration; returns (decision, updated ledger).

    Warmup ticks delegate to round-robin (no weight or network updates) so
    the ledger and fairness state are populated before options engage.
    """
    if tick < agent.warmup:
        decision, new_ledger = baseline_step("round_robin", ledger, env, tick)
        decision.phase = "warmup"
        decision.weights = agent.weights.copy()
        return decision, new_ledger

    obs = env.begin_tick(tick)
    state = fairness.fairness_state(ledger)
    if agent.active is None or fairness.is_terminated(agent.active, state):
        agent.active = fairness.active_option(state)
        agent.prev_l[agent.active] = state[agent.active]
    i = agent.active
    aug = fairness.augment_state(state, ledger, i)
    eps = qnet.epsilon_at(agent.config, agent.train_steps[i])
    action = qnet.select_action(agent.nets[i], aug.vector(), eps, rng)
    agent.weights = adjust_weights(
        agent.weights, i, DIRECTIONS[action], agent.delta_w, agent.w_floor
    )
    a_g = compose_global_action(agent.action_type, agent.weights, obs)
    outcome = env.apply(tick, a_g)
    new_ledger, new_state, sat_metric, perf = _finish_tick(ledger, outcome)

    f_term = fairness.fairness_reward_term(agent.prev_l[i], new_state[i])
    reward = option_reward(agent.zeta, f_term, float(perf[i]))
    if not np.isfinite(reward):
        raise RuntimeError(f"non-finite option reward at tick {tick}")
    next_aug = fairness.augment_state(new_state, new_ledger, i)
    qnet.td_update(
        agent.nets[i], aug.vector(), action, reward, next_aug.vector(), agent.config
    )
    agent.train_steps[i] += 1
    agent.prev_l[i] = new_state[i]

    decision = StepDecision(
        tick=tick,
        phase="main",
        desired=np.asarray(obs.desired),
        global_action=a_g,
        active_option=i,
        dqn_action=ACTION_NAMES[action],
        weights=agent.weights.copy(),
        closeness=new_state,
        satisfied=np.asarray(outcome.satisfied, dtype=bool),
        perf=perf,
        sat_metric=sat_metric,
        reward=reward,
        extras=outcome.extras,
    )
    return decision, new_ledger


def mono_dqn_step(agent, ledger, env, tick, rng):
    """One tick of the single-network baseline (3- or 4-input variant).

    The net adjusts the weight of the current argmin-L human; the reward is
    0.5 * mean-L fairness term + 0.5 * mean per-human performance.
    """
    if tick < agent.warmup:
        decision, new_ledger = baseline_step("round_robin", ledger, env, tick)
        decision.phase = "warmup"
        decision.weights = agent.weights.copy()
        return decision, new_ledger

    obs = env.begin_tick(tick)
    state = fairness.fairness_state(ledger)
    j = fairness.active_option(state)
    x = agent.input_vector(state, j)
    eps = qnet.epsilon_at(agent.config, agent.train_steps)
    action = qnet.select_action(agent.net, x, eps, rng)
    agent.weights = adjust_weights(
        agent.weights, j, DIRECTIONS[action], agent.delta_w, agent.w_floor
    )
    a_g = compose_global_action(agent.action_type, agent.weights, obs)
    outcome = env.apply(tick, a_g)
    new_ledger, new_state, sat_metric, perf = _finish_tick(ledger, outcome)

    mean_prev = float(np.mean(state))
    mean_cur = float(np.mean(new_state))
    bonus = float(np.sign(mean_cur - mean_prev)) * fairness.staircase(abs(mean_cur - mean_prev))
    f_bar = float(np.clip(mean_cur + bonus, -1.0, 1.0))
    reward = 0.5 * f_bar + 0.5 * float(np.mean(perf))
    if not np.isfinite(reward):
        raise RuntimeError(f"non-finite reward at tick {tick}")
    j_next = fairness.active_option(new_state)
    x_next = agent.input_vector(new_state, j_next)
    qnet.td_update(agent.net, x, action, reward, x_next, agent.config)
    agent.train_steps += 1

    decision = StepDecision(
        tick=tick,
        phase="main",
        desired=np.asarray(obs.desired),
        global_action=a_g,
        active_option=-1,
        dqn_action=ACTION_NAMES[action],
        weights=agent.weights.copy(),
        closeness=new_state,
        satisfied=np.asarray(outcome.satisfied, dtype=bool),
        perf=perf,
        sat_metric=sat_metric,
        reward=reward,
        extras=outcome.extras,
    )
    return decision, new_ledger
