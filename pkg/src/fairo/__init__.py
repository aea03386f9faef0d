"""Fairness-aware sequential-decision controller for shared human environments.

A library of: satisfaction ledgers and the cosine fairness state, per-option
Q-networks over weight adjustments, the options controller plus baseline
policies, three simulated application environments (shared thermostat, water
allocation, VR learning sessions), fairness metrics, and a seeded experiment
harness.
"""

from fairo import controller, fairness, harness, metrics, qnet
from fairo.fairness import (
    AugmentedState,
    SatisfactionLedger,
    active_option,
    augment_state,
    fairness_reward_term,
    fairness_state,
    init_ledger,
    is_terminated,
    update_ledger,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentedState",
    "SatisfactionLedger",
    "active_option",
    "augment_state",
    "controller",
    "fairness",
    "fairness_reward_term",
    "fairness_state",
    "harness",
    "init_ledger",
    "is_terminated",
    "metrics",
    "qnet",
    "update_ledger",
]
