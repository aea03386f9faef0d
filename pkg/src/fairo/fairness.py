"""Satisfaction ledgers, the cosine fairness state, and option predicates.

Each human carries a unit vector c_i = (u_i, v_i) accumulating unsatisfied
and satisfied outcome mass. The fairness state L_i is the mean cosine
closeness of c_i to everyone else's record; the goal state is all ones.
Options activate for the human whose L_i is the minimum and terminate when
it no longer is.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# staircase levels for the improvement bonus: |dL| band upper edges -> bonus
STAIRCASE_EDGES = (0.001, 0.005, 0.01, 0.015)
STAIRCASE_LEVELS = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass
class SatisfactionLedger:
    """Per-human (u, v) records plus the increment delta."""

    records: np.ndarray  # shape (N, 2), rows are (u, v), unit length
    delta: float

    @property
    def n(self):
        return self.records.shape[0]

    def copy(self):
        return SatisfactionLedger(self.records.copy(), self.delta)


class AugmentedState(NamedTuple):
    """Fairness state plus the favored flag fed to an option's network."""

    closeness: np.ndarray
    favored_flag: int

    def vector(self):
        return np.append(self.closeness, float(self.favored_flag))


def init_ledger(n, delta=0.01):
    """Fresh ledger with every record at the neutral direction (1/√2, 1/√2)."""
    if n < 2:
        raise ValueError(f"need at least 2 humans, got {n}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    records = np.full((n, 2), 1.0 / np.sqrt(2.0))
    return SatisfactionLedger(records, float(delta))


def update_ledger(ledger, satisfied):
    """Add delta to v (satisfied) or u (not), then renormalize each record."""
    satisfied = np.asarray(satisfied, dtype=bool)
    if satisfied.shape != (ledger.n,):
        raise ValueError(
            f"expected {ledger.n} satisfaction flags, got shape {satisfied.shape}"
        )
    records = ledger.records.copy()
    records[satisfied, 1] += ledger.delta
    records[~satisfied, 0] += ledger.delta
    records /= np.linalg.norm(records, axis=1, keepdims=True)
    return SatisfactionLedger(records, ledger.delta)


def fairness_state(ledger):
    """L_i = mean cosine between record i and every other record.

    Averaged over the N-1 other records so identical records give exactly 1.
    """
    records = ledger.records
    unit = records / np.linalg.norm(records, axis=1, keepdims=True)
    cos = unit @ unit.T
    n = ledger.n
    # row sums minus the diagonal self-cosine, over N-1 neighbors
    return (cos.sum(axis=1) - np.diag(cos)) / (n - 1)


def active_option(state):
    """Index of the minimum L; ties go to the lowest index."""
    return int(np.argmin(state))


def is_terminated(i, state):
    """An option ends once its L_i is strictly above the minimum."""
    return bool(state[i] > np.min(state))


def augment_state(state, ledger, i):
    """Append whether human i currently holds the maximum satisfied mass v."""
    v = ledger.records[:, 1]
    flag = 1 if v[i] >= v.max() else 0
    return AugmentedState(np.asarray(state, dtype=float), flag)


def staircase(magnitude):
    """Improvement bonus Z(|dL|): 5 levels, 0 at zero change, 1 above 0.015."""
    if magnitude <= 0.0:
        return 0.0
    for edge, level in zip(STAIRCASE_EDGES, STAIRCASE_LEVELS):
        if magnitude <= edge:
            return level
    return STAIRCASE_LEVELS[-1]


def fairness_reward_term(l_prev, l_cur):
    """Absolute fairness plus signed improvement bonus, clamped to [-1, 1].

    F = clamp((2*l_cur - 1) + sign(l_cur - l_prev) * Z(|l_cur - l_prev|), -1, 1)
    """
    diff = l_cur - l_prev
    bonus = float(np.sign(diff)) * staircase(abs(diff))
    return float(np.clip((2.0 * l_cur - 1.0) + bonus, -1.0, 1.0))
