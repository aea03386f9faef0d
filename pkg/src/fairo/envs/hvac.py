"""Application type 1: a shared thermostat over a lumped-parameter house.

Each occupant's activity maps to a desired setpoint; the controller commands
one global setpoint. Rooms follow a first-order RC model with a bang-bang
heater/cooler, comfort is Fanger's steady-state PMV, and a human is satisfied
on a tick when the commanded setpoint is within tau of their desired one.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from fairo.controller import Observation, Outcome
from fairo.envs import activities
from fairo.envs.activities import ACTIVITIES, TICKS_PER_DAY

SETPOINTS_F = {
    "sleeping": 62.0,
    "relaxing": 77.0,
    "domestic_work": 72.0,
    "work_from_home": 67.0,
}

# Fanger inputs per activity, tuned so every desired setpoint sits inside the
# comfort band [-0.5, 0.5] (bedding counts as insulation while sleeping).
MET = {
    "sleeping": 0.8,
    "relaxing": 1.0,
    "domestic_work": 2.0,
    "work_from_home": 1.2,
}
CLO = {
    "sleeping": 3.5,
    "relaxing": 0.7,
    "domestic_work": 0.2,
    "work_from_home": 1.35,
}

# occupant heat injected into the room, degF per minute
OCCUPANT_HEAT = {
    "sleeping": 0.02,
    "relaxing": 0.05,
    "domestic_work": 0.15,
    "work_from_home": 0.08,
}

TAU_F = 2.5  # satisfaction threshold on |desired - commanded|
COMFORT_BAND = 0.5
PMV_LIMIT = 3.0


@dataclass
class ComfortParams:
    met: dict = field(default_factory=lambda: dict(MET))
    clo: dict = field(default_factory=lambda: dict(CLO))
    air_velocity: float = 0.1  # m/s
    rel_humidity: float = 50.0  # percent


@dataclass
class ThermalParams:
    """First-order room: T' = (T_out - T)/RC + hvac pull + occupant heat."""

    rc_minutes: float = 30.0 / math.log(9.0)  # 10-90% step response ~ 30 min
    heat_gain: float = 0.06  # fraction of (flow - T) per minute
    cool_gain: float = 0.15
    heat_flow_f: float = 122.0  # 50 degC supply
    cool_flow_f: float = 50.0  # 10 degC supply
    band_f: float = 2.5  # thermostat dead band around the setpoint
    dt_minutes: float = 6.0  # one tick
    substeps: int = 12


@dataclass
class RoomThermalState:
    indoor_temp: float
    hvac_mode: str = "idle"  # heat | cool | idle


def desired_setpoint(activity):
    """Desired setpoint in degF for an activity name or index."""
    if isinstance(activity, (int, np.integer)):
        activity = ACTIVITIES[activity]
    return SETPOINTS_F[activity]


def fanger_pmv(ta, tr, vel, rh, met, clo):
    """Steady-state PMV (ISO 7730 heat-balance form), temperatures in degC."""
    pa = rh * 10.0 * math.exp(16.6536 - 4030.183 / (ta + 235.0))
    icl = 0.155 * clo
    m = met * 58.15
    mw = m  # no external work
    fcl = 1.05 + 0.645 * icl if icl > 0.078 else 1.0 + 1.29 * icl
    hcf = 12.1 * math.sqrt(vel)
    taa = ta + 273.0
    tra = tr + 273.0
    tcla = taa + (35.5 - ta) / (3.5 * icl + 0.1)
    p1 = icl * fcl
    p2 = p1 * 3.96
    p3 = p1 * 100.0
    p4 = p1 * taa
    p5 = 308.7 - 0.028 * mw + p2 * (tra / 100.0) ** 4
    xn = tcla / 100.0
    xf = tcla / 50.0
    n = 0
    hc = hcf
    while abs(xn - xf) > 0.00015:
        xf = (xf + xn) / 2.0
        hcn = 2.38 * abs(100.0 * xf - taa) ** 0.25
        hc = max(hcf, hcn)
        xn = (p5 + p4 * hc - p2 * xf ** 4) / (100.0 + p3 * hc)
        n += 1
        if n > 150:
            raise FloatingPointError("clothing-temperature loop did not converge")
    tcl = 100.0 * xn - 273.0
    hl1 = 3.05e-3 * (5733.0 - 6.99 * mw - pa)  # skin diffusion
    hl2 = 0.42 * (mw - 58.15) if mw > 58.15 else 0.0  # sweating
    hl3 = 1.7e-5 * m * (5867.0 - pa)  # latent respiration
    hl4 = 0.0014 * m * (34.0 - ta)  # dry respiration
    hl5 = 3.96 * fcl * (xn ** 4 - (tra / 100.0) ** 4)  # radiation
    hl6 = fcl * hc * (tcl - ta)  # convection
    ts = 0.303 * math.exp(-0.036 * m) + 0.028
    return ts * (mw - hl1 - hl2 - hl3 - hl4 - hl5 - hl6)


def _f_to_c(temp_f):
    return (temp_f - 32.0) * 5.0 / 9.0


def pmv(indoor_temp_f, activity, params=None):
    """PMV at a room temperature for an activity, clamped to [-3, 3]."""
    params = params or ComfortParams()
    if isinstance(activity, (int, np.integer)):
        activity = ACTIVITIES[activity]
    tc = _f_to_c(indoor_temp_f)
    raw = fanger_pmv(tc, tc, params.air_velocity, params.rel_humidity,
                     params.met[activity], params.clo[activity])
    return float(np.clip(raw, -PMV_LIMIT, PMV_LIMIT))


def f_pmv(pmv_value):
    """Comfort score: 1 inside [-0.5, 0.5], linear down to -1 at |PMV| = 3."""
    excess = max(abs(pmv_value) - COMFORT_BAND, 0.0)
    return 1.0 - 2.0 * excess / (PMV_LIMIT - COMFORT_BAND)


def setpoint_satisfied(desired, commanded, tau=TAU_F):
    """Boundary-inclusive agreement: |d - a_g| <= tau."""
    return abs(desired - commanded) <= tau


def thermal_step(room, setpoint, outdoor_temp, occupant_heat, params=None):
    """Advance one tick; the thermostat re-decides every substep."""
    params = params or ThermalParams()
    temp = room.indoor_temp
    mode = "idle"
    h = params.dt_minutes / params.substeps
    for _ in range(params.substeps):
        if temp < setpoint - params.band_f:
            mode = "heat"
        elif temp > setpoint + params.band_f:
            mode = "cool"
        else:
            mode = "idle"
        rate = (outdoor_temp - temp) / params.rc_minutes + occupant_heat
        if mode == "heat":
            rate += params.heat_gain * (params.heat_flow_f - temp)
        elif mode == "cool":
            rate += params.cool_gain * (params.cool_flow_f - temp)
        temp += h * rate
    return RoomThermalState(indoor_temp=temp, hvac_mode=mode)


class HvacEnv:
    """Three occupants, one commanded setpoint, per-room thermal state."""

    action_type = 1

    def __init__(self, profiles=None, tau=TAU_F, comfort=None, thermal=None,
                 outdoor_mean=68.0, outdoor_amplitude=15.0, initial_temp=70.0):
        self.profiles = profiles if profiles is not None else activities.default_profiles()
        self.n = len(self.profiles)
        self.tau = tau
        self.comfort = comfort or ComfortParams()
        self.thermal = thermal or ThermalParams()
        self.outdoor_mean = outdoor_mean
        self.outdoor_amplitude = outdoor_amplitude
        self.rooms = [RoomThermalState(initial_temp) for _ in range(self.n)]
        self._activities = None
        self._desired = None
        self._self_check()

    def _self_check(self):
        # every activity must be comfortable at its own setpoint
        for name, sp in SETPOINTS_F.items():
            value = pmv(sp, name, self.comfort)
            if abs(value) > COMFORT_BAND:
                raise ValueError(
                    f"comfort params miscalibrated: PMV({name} @ {sp}F) = {value:.3f}"
                )

    def outdoor_at(self, tick):
        """Daily sinusoid: coldest around 05:00, warmest around 17:00."""
        hour = (tick % TICKS_PER_DAY) / TICKS_PER_DAY * 24.0
        return self.outdoor_mean - self.outdoor_amplitude * math.cos(
            2.0 * math.pi * (hour - 5.0) / 24.0
        )

    def begin_tick(self, tick):
        self._activities = [p.activity_at(tick) for p in self.profiles]
        self._desired = np.array([desired_setpoint(a) for a in self._activities])
        return Observation(desired=self._desired)

    def apply(self, tick, a_g):
        outdoor = self.outdoor_at(tick)
        pmvs = np.empty(self.n)
        temps = np.empty(self.n)
        for i, activity in enumerate(self._activities):
            name = ACTIVITIES[activity]
            self.rooms[i] = thermal_step(
                self.rooms[i], a_g, outdoor, OCCUPANT_HEAT[name], self.thermal
            )
            temps[i] = self.rooms[i].indoor_temp
            pmvs[i] = pmv(temps[i], activity, self.comfort)
        satisfied = np.array([setpoint_satisfied(d, a_g, self.tau) for d in self._desired])
        f_terms = np.array([f_pmv(p) for p in pmvs])
        return Outcome(
            satisfied=satisfied,
            f_terms=f_terms,
            extras={
                "pmv": pmvs,
                "indoor_temp": temps,
                "outdoor_temp": outdoor,
                "activity": list(self._activities),
            },
        )
