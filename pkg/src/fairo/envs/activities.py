"""Seeded daily activity schedules shared by the thermostat and water apps.

Three behavioral patterns: an organized person whose week repeats exactly,
a random person whose days are drawn fresh from a seeded distribution, and
an intermediate person who mixes both. Ticks are 6 simulated minutes, so a
day is 240 ticks and a week 1680.
"""

import csv

import numpy as np

ACTIVITIES = ("sleeping", "relaxing", "domestic_work", "work_from_home")
SLEEPING, RELAXING, DOMESTIC_WORK, WORK_FROM_HOME = range(4)

TICKS_PER_DAY = 240
TICKS_PER_WEEK = 7 * TICKS_PER_DAY


def _fill(day, start, stop, activity):
    day[start:stop] = activity


def _organized_template(seed):
    """A fixed 7-day template; block boundaries jitter a little per seed."""
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x0A11]))
    wake = int(rng.integers(62, 74))  # around 6:12-7:24
    work_start = wake + int(rng.integers(8, 16))
    work_end = int(rng.integers(148, 162))
    bed = int(rng.integers(226, 236))
    week = np.empty(TICKS_PER_WEEK, dtype=np.int64)
    weekday = np.empty(TICKS_PER_DAY, dtype=np.int64)
    _fill(weekday, 0, wake, SLEEPING)
    _fill(weekday, wake, work_start, DOMESTIC_WORK)
    _fill(weekday, work_start, work_end, WORK_FROM_HOME)
    _fill(weekday, work_end, work_end + 15, DOMESTIC_WORK)
    _fill(weekday, work_end + 15, bed - 10, RELAXING)
    _fill(weekday, bed - 10, bed, DOMESTIC_WORK)
    _fill(weekday, bed, TICKS_PER_DAY, SLEEPING)
    late = int(rng.integers(84, 96))
    weekend = np.empty(TICKS_PER_DAY, dtype=np.int64)
    _fill(weekend, 0, late, SLEEPING)
    _fill(weekend, late, late + 25, DOMESTIC_WORK)
    _fill(weekend, late + 25, late + 55, WORK_FROM_HOME)
    _fill(weekend, late + 55, bed, RELAXING)
    _fill(weekend, bed, TICKS_PER_DAY, SLEEPING)
    for day in range(5):
        week[day * TICKS_PER_DAY:(day + 1) * TICKS_PER_DAY] = weekday
    for day in (5, 6):
        week[day * TICKS_PER_DAY:(day + 1) * TICKS_PER_DAY] = weekend
    return week


# block activity mixes; relaxing stays out of hours when anyone may be
# asleep and overnight/morning blocks lean work-from-home, so co-occurring
# comfort setpoints are mostly one 5 F band apart
_NIGHT_WORK_MIX = ((WORK_FROM_HOME, 0.8), (DOMESTIC_WORK, 0.2))
_MORNING_MIX = ((WORK_FROM_HOME, 0.75), (DOMESTIC_WORK, 0.25))
_AFTERNOON_MIX = ((WORK_FROM_HOME, 0.35), (DOMESTIC_WORK, 0.35), (RELAXING, 0.3))
_EVENING_MIX = ((RELAXING, 0.6), (DOMESTIC_WORK, 0.2), (WORK_FROM_HOME, 0.2))


def _pick(rng, mix):
    r = rng.random()
    acc = 0.0
    for activity, p in mix:
        acc += p
        if r < acc:
            return activity
    return mix[-1][0]


def _blocks(day, rng, start, stop, mix):
    cursor = start
    while cursor < stop:
        duration = int(rng.integers(10, 31))
        _fill(day, cursor, min(cursor + duration, stop), _pick(rng, mix))
        cursor += duration


def _random_day(rng):
    """Night-shift day: working through the night, asleep all morning."""
    day = np.empty(TICKS_PER_DAY, dtype=np.int64)
    sleep_start = int(rng.integers(40, 56))  # 04:00-05:36
    wake = int(rng.integers(108, 124))  # 10:48-12:24
    _blocks(day, rng, 0, sleep_start, _NIGHT_WORK_MIX)
    _fill(day, sleep_start, wake, SLEEPING)
    _blocks(day, rng, wake, 150, _MORNING_MIX)
    _blocks(day, rng, 150, 222, _AFTERNOON_MIX)
    _blocks(day, rng, 222, TICKS_PER_DAY, _NIGHT_WORK_MIX)
    return day


def _crowd_day(rng):
    """Fresh day on the common daytime pattern, block boundaries randomized."""
    day = np.empty(TICKS_PER_DAY, dtype=np.int64)
    wake = int(rng.integers(60, 78))
    bed = int(rng.integers(224, 238))
    _fill(day, 0, wake, SLEEPING)
    _blocks(day, rng, wake, 150, _MORNING_MIX)
    _blocks(day, rng, 150, 200, _AFTERNOON_MIX)
    _blocks(day, rng, 200, bed, _EVENING_MIX)
    _fill(day, bed, TICKS_PER_DAY, SLEEPING)
    return day


class OrganizedProfile:
    """Weekly-periodic schedule: activity_at(t) == activity_at(t + one week)."""

    kind = "organized"

    def __init__(self, seed=0):
        self.seed = int(seed)
        self._week = _organized_template(seed)

    def activity_at(self, tick):
        return int(self._week[tick % TICKS_PER_WEEK])


class RandomProfile:
    """Night-shift worker; every day drawn fresh, day d depends on (seed, d)."""

    kind = "random"

    def __init__(self, seed=0):
        self.seed = int(seed)
        self._days = {}

    def _day(self, day):
        if day not in self._days:
            rng = np.random.default_rng(np.random.SeedSequence([self.seed, day]))
            self._days[day] = _random_day(rng)
        return self._days[day]

    def activity_at(self, tick):
        day, offset = divmod(tick, TICKS_PER_DAY)
        return int(self._day(day)[offset])


class IntermediateProfile:
    """Mix: each day is either the organized template or a randomized day."""

    kind = "intermediate"

    def __init__(self, seed=0):
        self.seed = int(seed)
        self._week = _organized_template(seed)
        self._days = {}

    def _day(self, day):
        if day not in self._days:
            rng = np.random.default_rng(np.random.SeedSequence([self.seed, day, 7]))
            if rng.random() < 0.5:
                start = (day % 7) * TICKS_PER_DAY
                self._days[day] = self._week[start:start + TICKS_PER_DAY]
            else:
                self._days[day] = _crowd_day(rng)
        return self._days[day]

    def activity_at(self, tick):
        day, offset = divmod(tick, TICKS_PER_DAY)
        return int(self._day(day)[offset])


class FixedSchedule:
    """Schedule pinned from an imported table of per-tick activities."""

    kind = "fixed"

    def __init__(self, activities):
        self._activities = np.asarray(activities, dtype=np.int64)
        if self._activities.ndim != 1 or self._activities.size == 0:
            raise ValueError("schedule must be a nonempty 1-d activity array")

    def activity_at(self, tick):
        # hold the last known activity past the end of the pinned range
        return int(self._activities[min(tick, self._activities.size - 1)])


def make_profile(kind, seed=0):
    table = {
        "organized": OrganizedProfile,
        "random": RandomProfile,
        "intermediate": IntermediateProfile,
    }
    if kind not in table:
        raise ValueError(f"unknown profile kind {kind!r}")
    return table[kind](seed)


def default_profiles(base_seed=0):
    """The three-person household: organized, random, intermediate."""
    return [
        OrganizedProfile(base_seed),
        RandomProfile(base_seed + 1),
        IntermediateProfile(base_seed + 2),
    ]


def activity_at(profile, tick):
    """Activity index for a profile at a tick (deterministic per seed)."""
    if tick < 0:
        raise ValueError("tick must be nonnegative")
    return profile.activity_at(tick)


def export_schedule(profiles, ticks, path):
    """Write (tick, human, activity) rows so a run's schedule can be pinned."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tick", "human", "activity"])
        for tick in range(ticks):
            for human, profile in enumerate(profiles):
                writer.writerow([tick, human, ACTIVITIES[profile.activity_at(tick)]])


def import_schedule(path):
    """Read an exported schedule back as FixedSchedule profiles."""
    per_human = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            per_human.setdefault(int(row["human"]), []).append(
                (int(row["tick"]), ACTIVITIES.index(row["activity"]))
            )
    profiles = []
    for human in sorted(per_human):
        rows = sorted(per_human[human])
        profiles.append(FixedSchedule([activity for _, activity in rows]))
    return profiles
