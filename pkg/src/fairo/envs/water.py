"""Application type 2: splitting an insufficient water supply.

Demand follows the same activity schedules as the thermostat app via a
gallons-per-tick table. The shared resource each tick is 1.5x the maximum
single demand (insufficient whenever demands overlap). Each household has a
reserve tank; satisfaction and performance ride on the balance rate
BR = (supply + reserve) / demand.
"""

import csv
from dataclasses import dataclass

import numpy as np

from fairo.controller import Observation, Outcome
from fairo.envs import activities
from fairo.envs.activities import ACTIVITIES

# gallons per tick by activity; magnitudes are close enough that concurrent
# demand usually exceeds the 1.5x-max supply, so the split genuinely matters
DEMAND_TABLE = {
    "sleeping": 1.5,
    "relaxing": 2.5,
    "domestic_work": 4.0,
    "work_from_home": 3.0,
}

RESOURCE_FACTOR = 1.5  # resource = factor * max demand
BR_SATISFIED = 0.8
BR_CAP = 2.0  # reporting ceiling


@dataclass
class Tank:
    level: float
    capacity: float


def resource_at(tick, demands):
    """Shared supply this tick: 1.5x the largest single demand."""
    d = np.asarray(demands, dtype=float)
    if (d < 0).any():
        raise ValueError("demands must be nonnegative")
    return RESOURCE_FACTOR * float(d.max())


def tank_step(tank, supply, demand):
    """Consume demand from supply plus reserve; store any surplus.

    Returns (new tank, shortfall).
    """
    if supply < 0 or demand < 0:
        raise ValueError("supply and demand must be nonnegative")
    available = supply + tank.level
    consumed = min(available, demand)
    new_level = min(available - consumed, tank.capacity)
    return Tank(level=new_level, capacity=tank.capacity), demand - consumed


def balance_rate(supply, reserve, demand):
    """BR = (supply + reserve)/demand, capped at 2; defined as 1 at no demand."""
    if demand <= 0.0:
        return 1.0
    return min((supply + reserve) / demand, BR_CAP)


def f_br(br):
    """Performance score: -1 at BR=0 rising linearly to +1 at BR>=1."""
    return min(br, 1.0) * 2.0 - 1.0


def default_tank_capacity(demand_table=None):
    """Two ticks of peak demand: smooths brief dips without hiding scarcity."""
    table = demand_table or DEMAND_TABLE
    return 2.0 * float(max(table.values()))


class WaterEnv:
    """Households draw demand from their schedules and share one supply."""

    action_type = 2

    def __init__(self, profiles=None, demand_table=None, tank_capacity=None,
                 initial_level=0.0):
        self.profiles = profiles if profiles is not None else activities.default_profiles()
        self.n = len(self.profiles)
        self.demand_table = dict(demand_table or DEMAND_TABLE)
        capacity = tank_capacity if tank_capacity is not None else default_tank_capacity(self.demand_table)
        self.tanks = [Tank(level=initial_level, capacity=capacity) for _ in range(self.n)]
        self._demands = None

    def demand_at(self, tick, human):
        activity = ACTIVITIES[self.profiles[human].activity_at(tick)]
        return self.demand_table[activity]

    def begin_tick(self, tick):
        self._demands = np.array([self.demand_at(tick, i) for i in range(self.n)])
        return Observation(
            desired=self._demands,
            resource=resource_at(tick, self._demands),
        )

    def apply(self, tick, allocation):
        supply = np.asarray(allocation, dtype=float)
        if supply.shape != (self.n,):
            raise ValueError(f"allocation must have shape ({self.n},)")
        resource = resource_at(tick, self._demands)
        if abs(supply.sum() - resource) > 1e-6 * max(resource, 1.0):
            raise ValueError(
                f"allocation {supply.sum():.6f} does not conserve the resource {resource:.6f}"
            )
        brs = np.empty(self.n)
        shortfalls = np.empty(self.n)
        levels = np.empty(self.n)
        for i in range(self.n):
            brs[i] = balance_rate(supply[i], self.tanks[i].level, self._demands[i])
            self.tanks[i], shortfalls[i] = tank_step(
                self.tanks[i], supply[i], self._demands[i]
            )
            levels[i] = self.tanks[i].level
        satisfied = brs >= BR_SATISFIED
        f_terms = np.array([f_br(b) for b in brs])
        return Outcome(
            satisfied=satisfied,
            f_terms=f_terms,
            extras={
                "br": brs,
                "demand": self._demands.copy(),
                "shortfall": shortfalls,
                "tank_level": levels,
            },
        )


def export_demands(env, ticks, path):
    """Write (tick, household, gallons) so demand traces can be pinned."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tick", "household", "gallons"])
        for tick in range(ticks):
            for household in range(env.n):
                writer.writerow([tick, household, env.demand_at(tick, household)])


def import_demands(path):
    """Read an exported demand trace back as per-household arrays."""
    per_household = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            per_household.setdefault(int(row["household"]), []).append(
                (int(row["tick"]), float(row["gallons"]))
            )
    out = []
    for household in sorted(per_household):
        rows = sorted(per_household[household])
        out.append(np.array([gallons for _, gallons in rows]))
    return out
