"""Application type 3: VR learning sessions over 8-state learner models.

Each human is a small Markov chain over alertness states 1..8 (8 best) with
actions break / vr_on / vr_off; the three tolerance profiles differ in how VR
affects them. The controller applies one categorical action to everyone.
Performance rides on the learning experience LE = state-value improvement
plus the current state value; a human is satisfied when LE > 0. States reset
to 1 or 3 at every day boundary.
"""

from dataclasses import dataclass
from importlib import resources

import numpy as np

from fairo.controller import Observation, Outcome
from fairo.envs.activities import TICKS_PER_DAY

ACTIONS = ("break", "vr_on", "vr_off")
BREAK, VR_ON, VR_OFF = range(3)
PROFILE_NAMES = ("tolerant", "intermediate", "sensitive")

N_STATES = 8
VALUE_TOP = 0.5  # value(8); value(1) = 0, linear in between
RESET_STATES = (1, 3)


def state_value(state):
    """Linear state value: 0 at state 1 up to 0.5 at state 8."""
    if not 1 <= state <= N_STATES:
        raise ValueError(f"state must be in 1..{N_STATES}, got {state}")
    return VALUE_TOP * (state - 1) / (N_STATES - 1)


@dataclass
class LearnerMDP:
    """Transition tensor indexed [action, state-1, next_state-1]."""

    profile: str
    transition: np.ndarray

    def __post_init__(self):
        if self.transition.shape != (len(ACTIONS), N_STATES, N_STATES):
            raise ValueError(f"bad transition shape {self.transition.shape}")
        if (self.transition < 0).any():
            raise ValueError("negative transition probability")
        sums = self.transition.sum(axis=2)
        if not np.allclose(sums, 1.0, atol=1e-9):
            raise ValueError("transition rows must sum to 1")

    def row(self, action, state):
        return self.transition[action, state - 1]


def parse_mdps(text):
    """Parse 'profile NAME action ACT' blocks of 8x8 row-major matrices."""
    rows = {}
    header = None
    buffer = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("profile"):
            parts = line.split()
            if len(parts) != 4 or parts[2] != "action":
                raise ValueError(f"bad header line {line!r}")
            if header is not None and buffer:
                raise ValueError(f"matrix under {header} is incomplete")
            header = (parts[1], parts[3])
            buffer = []
            continue
        if header is None:
            raise ValueError(f"matrix data before any header: {line!r}")
        buffer.append([float(tok) for tok in line.split()])
        if len(buffer) == N_STATES:
            rows[header] = np.array(buffer)
            header = None
            buffer = []
    if header is not None:
        raise ValueError(f"matrix under {header} is incomplete")
    mdps = {}
    for profile in sorted({p for p, _ in rows}):
        tensor = np.empty((len(ACTIONS), N_STATES, N_STATES))
        for a, action in enumerate(ACTIONS):
            if (profile, action) not in rows:
                raise ValueError(f"profile {profile!r} is missing action {action!r}")
            tensor[a] = rows[(profile, action)]
        mdps[profile] = LearnerMDP(profile=profile, transition=tensor)
    return mdps


def load_mdps(path=None):
    """Load learner models from a matrix file; default models ship as data."""
    if path is None:
        text = resources.files("fairo.envs").joinpath("data/learner_mdps.txt").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    return parse_mdps(text)


@dataclass
class Learner:
    mdp: LearnerMDP
    state: int


def expected_next_value(mdp, state, action):
    row = mdp.row(action, state)
    values = np.array([state_value(s) for s in range(1, N_STATES + 1)])
    return float(row @ values)


def desired_action(learner):
    """Action maximizing the learner's own expected next-state value.

    Ties resolve in the order break < vr_on < vr_off.
    """
    evs = [expected_next_value(learner.mdp, learner.state, a) for a in range(len(ACTIONS))]
    return int(np.argmax(evs))


def effect(action, learners, proposer):
    """k_i: expected value gain of applying `action` to everyone else."""
    total = 0.0
    for j, other in enumerate(learners):
        if j == proposer:
            continue
        total += expected_next_value(other.mdp, other.state, action) - state_value(other.state)
    return total


def transition(learner, action, rng):
    """Sample the next state from the learner's transition row."""
    row = learner.mdp.row(action, learner.state)
    return int(rng.choice(N_STATES, p=row)) + 1


def learning_experience(prev_state, cur_state):
    """LE = (value(cur) - value(prev)) + value(cur), clamped to [-1, 1]."""
    le = (state_value(cur_state) - state_value(prev_state)) + state_value(cur_state)
    return float(np.clip(le, -1.0, 1.0))


class LearningEnv:
    """Three learners, one shared action, daily state resets."""

    action_type = 3

    def __init__(self, mdp_path=None, profiles=PROFILE_NAMES, day_length=TICKS_PER_DAY,
                 env_rng=None, reset_rng=None):
        mdps = load_mdps(mdp_path)
        missing = [p for p in profiles if p not in mdps]
        if missing:
            raise ValueError(f"profiles {missing} not in the model file")
        self.learners = [Learner(mdp=mdps[p], state=1) for p in profiles]
        self.n = len(self.learners)
        self.day_length = day_length
        self.env_rng = env_rng if env_rng is not None else np.random.default_rng(0)
        self.reset_rng = reset_rng if reset_rng is not None else np.random.default_rng(1)
        self._desired = None

    def begin_tick(self, tick):
        if tick % self.day_length == 0:
            for learner in self.learners:
                learner.state = RESET_STATES[int(self.reset_rng.integers(2))]
        self._desired = np.array([desired_action(h) for h in self.learners])
        effects = np.array([
            effect(self._desired[i], self.learners, i) for i in range(self.n)
        ])
        return Observation(desired=self._desired, effects=effects)

    def apply(self, tick, a_g):
        a_g = int(a_g)
        if not 0 <= a_g < len(ACTIONS):
            raise ValueError(f"bad action {a_g}")
        les = np.empty(self.n)
        states = np.empty(self.n, dtype=int)
        for i, learner in enumerate(self.learners):
            prev = learner.state
            learner.state = transition(learner, a_g, self.env_rng)
            les[i] = learning_experience(prev, learner.state)
            states[i] = learner.state
        satisfied = les > 0.0
        return Outcome(
            satisfied=satisfied,
            f_terms=les.copy(),
            extras={
                "le": les,
                "state": states,
                "desired_names": [ACTIONS[a] for a in self._desired],
            },
        )
