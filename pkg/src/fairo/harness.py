"""Experiment orchestration: seeded runs, traces, metrics, comparisons.

A run is fully determined by (config, seed): the master seed splits into
named streams (env, exploration, resets) so changing one knob never perturbs
the others. Each run writes a per-(tick, human) trace CSV, an application
value CSV, a metrics report CSV, and an echo of the effective config with
code/config hashes. compare() and sweep() work from those artifacts.
"""

import csv
import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from fairo import controller, fairness, metrics, qnet
from fairo.envs import activities, hvac, learning, water

APP_TYPES = ("hvac", "water", "learning")
METHODS_BY_APP = {
    "hvac": ("fairo", "average", "round_robin", "mono_dqn_3in", "mono_dqn_4in"),
    "water": ("fairo", "average", "weighted_average", "round_robin", "weighted_rr",
              "mono_dqn_3in", "mono_dqn_4in"),
    "learning": ("fairo", "average", "round_robin", "mono_dqn_3in", "mono_dqn_4in"),
}

TRACE_HEADER = "tick,phase,human,desired,global_action,weight,L,satisfied,perf,active_option,dqn_action"
APP_VALUE_NAMES = {"hvac": "pmv", "water": "br", "learning": "le"}

OUT_ROOT_ENV = "FAIRO_OUT"

# comparison metrics where smaller means fairer
LOWER_BETTER = ("satisfaction_jsd_avg", "opportunity_diff_avg", "odds_diff_avg",
                "pmv_jsd_avg", "fairiot_cv")


@dataclass
class QnetConfig:
    hidden: tuple = (32,)
    alpha: float = 1e-3
    gamma: float = 0.9
    epsilon_start: float = 0.2
    epsilon_end: float = 0.01
    epsilon_decay_steps: int = 10_000
    grad_clip: float = 1.0

    def train_config(self):
        return qnet.TrainConfig(
            alpha=self.alpha, gamma=self.gamma, epsilon_start=self.epsilon_start,
            epsilon_end=self.epsilon_end, epsilon_decay_steps=self.epsilon_decay_steps,
            grad_clip=self.grad_clip,
        )


@dataclass
class ExperimentConfig:
    app_type: str
    method: str
    n_humans: int = 3
    ticks: int = 15_000
    warmup: int = 1200
    seed: int = 0
    zeta: float = 0.5
    delta: float = 0.01
    delta_w: float = 0.05
    w_floor: float = 0.01
    window: int = 3000
    qnet: QnetConfig = field(default_factory=QnetConfig)
    env: dict = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.qnet, dict):
            self.qnet = QnetConfig(**{**self.qnet, "hidden": tuple(self.qnet.get("hidden", (32,)))})
        if self.app_type not in APP_TYPES:
            raise ValueError(f"unknown app_type {self.app_type!r}")
        if self.method not in METHODS_BY_APP[self.app_type]:
            raise ValueError(
                f"method {self.method!r} is not valid for app_type {self.app_type!r}"
            )
        if self.ticks <= self.warmup:
            raise ValueError(f"ticks ({self.ticks}) must exceed warmup ({self.warmup})")
        if self.n_humans < 2:
            raise ValueError("need at least 2 humans")

    def to_dict(self):
        out = asdict(self)
        out["qnet"]["hidden"] = list(self.qnet.hidden)
        return out

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def load_config(path, seed=None):
    with open(path) as fh:
        data = json.load(fh)
    if seed is not None:
        data["seed"] = seed
    return ExperimentConfig.from_dict(data)


@dataclass
class TraceData:
    """Columnar per-tick arrays; desired/global_action hold names for type 3."""

    tick: np.ndarray  # (T,)
    phase: list  # (T,) str
    desired: np.ndarray  # (T, N)
    global_action: np.ndarray  # (T, N) per-human view of the global action
    weights: np.ndarray  # (T, N)
    closeness: np.ndarray  # (T, N)
    satisfied: np.ndarray  # (T, N) bool
    perf: np.ndarray  # (T, N)
    active_option: np.ndarray  # (T,)
    dqn_action: list  # (T,) str ('' when not a network tick)
    sat_metric: np.ndarray  # (T, N) v/(u+v)
    app_value: np.ndarray  # (T, N) pmv / br / le


@dataclass
class RunArtifact:
    config: ExperimentConfig
    trace: TraceData
    metrics_rows: list  # (metric, scope, key, value)
    out_dir: object = None

    def metric(self, name, key=""):
        for metric, _, k, value in self.metrics_rows:
            if metric == name and k == key:
                return value
        raise KeyError(f"metric {name!r} key {key!r} not in report")


def _make_streams(config):
    ss = np.random.SeedSequence(config.seed)
    env_ss, explore_ss, reset_ss = ss.spawn(3)
    return env_ss, np.random.default_rng(explore_ss), np.random.default_rng(reset_ss)


def _profile_kinds():
    return ("organized", "random", "intermediate")


def build_env(config, env_ss, reset_rng):
    params = dict(config.env)
    n = config.n_humans
    if config.app_type in ("hvac", "water"):
        seeds = np.random.default_rng(env_ss).integers(2 ** 31, size=n)
        kinds = _profile_kinds()
        profiles = [activities.make_profile(kinds[i % 3], int(seeds[i])) for i in range(n)]
        if config.app_type == "hvac":
            return hvac.HvacEnv(profiles=profiles, **params)
        return water.WaterEnv(profiles=profiles, **params)
    env_rng = np.random.default_rng(env_ss)
    names = [learning.PROFILE_NAMES[i % 3] for i in range(n)]
    return learning.LearningEnv(profiles=names, env_rng=env_rng, reset_rng=reset_rng,
                                **params)


def build_agent(config, explore_rng):
    env_to_type = {"hvac": 1, "water": 2, "learning": 3}
    action_type = env_to_type[config.app_type]
    train = config.qnet.train_config()
    if config.method == "fairo":
        net_seeds = [int(explore_rng.integers(2 ** 63)) for _ in range(config.n_humans)]
        return controller.FairoAgent(
            config.n_humans, action_type, delta_w=config.delta_w, zeta=config.zeta,
            warmup=config.warmup, w_floor=config.w_floor, hidden=config.qnet.hidden,
            train_config=train, net_seeds=net_seeds,
        )
    if config.method in controller.MONO_KINDS:
        return controller.MonoDqnAgent(
            config.n_humans, action_type, variant=config.method, delta_w=config.delta_w,
            warmup=config.warmup, w_floor=config.w_floor, hidden=config.qnet.hidden,
            train_config=train, net_seed=int(explore_rng.integers(2 ** 63)),
        )
    return None  # stateless baseline


def _decision_global_per_human(decision, n, app_type):
    a_g = decision.global_action
    if app_type == "water":
        return np.asarray(a_g, dtype=float)
    if app_type == "learning":
        return np.full(n, float(a_g))
    return np.full(n, float(a_g))


def run(config, out_dir=None):
    """Execute one experiment; optionally persist its artifact files."""
    env_ss, explore_rng, reset_rng = _make_streams(config)
    env = build_env(config, env_ss, reset_rng)
    agent = build_agent(config, explore_rng)
    ledger = fairness.init_ledger(config.n_humans, config.delta)

    T, n = config.ticks, config.n_humans
    app_name = APP_VALUE_NAMES[config.app_type]
    trace = TraceData(
        tick=np.arange(T),
        phase=[""] * T,
        desired=np.empty((T, n)),
        global_action=np.empty((T, n)),
        weights=np.empty((T, n)),
        closeness=np.empty((T, n)),
        satisfied=np.empty((T, n), dtype=bool),
        perf=np.empty((T, n)),
        active_option=np.empty(T, dtype=int),
        dqn_action=[""] * T,
        sat_metric=np.empty((T, n)),
        app_value=np.empty((T, n)),
    )

    for tick in range(T):
        if config.method == "fairo":
            decision, ledger = controller.fairo_step(agent, ledger, env, tick, explore_rng)
        elif config.method in controller.MONO_KINDS:
            decision, ledger = controller.mono_dqn_step(agent, ledger, env, tick, explore_rng)
        else:
            decision, ledger = controller.baseline_step(config.method, ledger, env, tick)
            decision.phase = "warmup" if tick < config.warmup else "main"
        if not (np.all(np.isfinite(decision.closeness)) and np.all(np.isfinite(decision.perf))):
            raise RuntimeError(f"non-finite trace values at tick {tick}")
        trace.phase[tick] = decision.phase
        trace.desired[tick] = np.asarray(decision.desired, dtype=float)
        trace.global_action[tick] = _decision_global_per_human(decision, n, config.app_type)
        trace.weights[tick] = decision.weights
        trace.closeness[tick] = decision.closeness
        trace.satisfied[tick] = decision.satisfied
        trace.perf[tick] = decision.perf
        trace.active_option[tick] = decision.active_option
        trace.dqn_action[tick] = decision.dqn_action or ""
        trace.sat_metric[tick] = decision.sat_metric
        trace.app_value[tick] = np.asarray(decision.extras[app_name], dtype=float)

    rows = compute_metrics(trace, config.app_type, config.window)
    artifact = RunArtifact(config=config, trace=trace, metrics_rows=rows, out_dir=out_dir)
    if out_dir is not None:
        write_artifact(artifact, Path(out_dir))
    return artifact


def compute_metrics(trace, app_type, window):
    """Metric rows (metric, scope, human/pair, value) over the last `window` ticks."""
    n = trace.closeness.shape[1]
    L = trace.closeness[-window:]
    sat = trace.sat_metric[-window:]
    app = trace.app_value[-window:]
    w = trace.weights[-window:]
    rows = []

    opp = metrics.opportunity_probs(trace.closeness, window)
    odds = metrics.odds_probs(trace.closeness, window)
    for i in range(n):
        rows.append(("opportunity_prob", "human", str(i), float(opp[i])))
    rows.append(("opportunity_diff_avg", "run", "", metrics.avg_abs_pairwise_diff(opp)))
    for i in range(n):
        rows.append(("odds_prob", "human", str(i), float(odds[i])))
    rows.append(("odds_diff_avg", "run", "", metrics.avg_abs_pairwise_diff(odds)))

    for i in range(n):
        rows.append(("l_mean", "human", str(i), float(L[:, i].mean())))
    rows.append(("min_l_mean", "run", "", float(L.min(axis=1).mean())))

    sat_hists = []
    for i in range(n):
        mu, var = metrics.gaussian_fit(sat[:, i])
        rows.append(("satisfaction_mean", "human", str(i), mu))
        rows.append(("satisfaction_var", "human", str(i), var))
        sat_hists.append(metrics.histogram(
            sat[:, i], *metrics.SATISFACTION_RANGE, smoothing=metrics.JSD_SMOOTHING
        ))
    jsd_values = []
    for i in range(n):
        for j in range(i + 1, n):
            value = metrics.jsd(sat_hists[i], sat_hists[j])
            rows.append(("satisfaction_jsd", "pair", f"{i}-{j}", value))
            jsd_values.append(value)
    rows.append(("satisfaction_jsd_avg", "run", "", float(np.mean(jsd_values))))

    utilities = [metrics.fairiot_utility(w[:, i]) for i in range(n)]
    for i in range(n):
        rows.append(("fairiot_utility", "human", str(i), utilities[i]))
    rows.append(("fairiot_cv", "run", "", metrics.coefficient_of_variation(utilities)))
    # same utility dispersion over the whole post-warmup weight trace
    main = np.array([p != "warmup" for p in trace.phase], dtype=bool)
    w_main = trace.weights[main] if main.any() else trace.weights
    trace_utils = [metrics.fairiot_utility(w_main[:, i]) for i in range(n)]
    rows.append(("fairiot_cv_trace", "run", "",
                 metrics.coefficient_of_variation(trace_utils)))

    if app_type == "hvac":
        hists = []
        for i in range(n):
            mu, var = metrics.gaussian_fit(app[:, i])
            rows.append(("pmv_mean", "human", str(i), mu))
            rows.append(("pmv_var", "human", str(i), var))
            hists.append(metrics.histogram(
                app[:, i], *metrics.PMV_RANGE, smoothing=metrics.JSD_SMOOTHING
            ))
        values = []
        for i in range(n):
            for j in range(i + 1, n):
                value = metrics.jsd(hists[i], hists[j])
                rows.append(("pmv_jsd", "pair", f"{i}-{j}", value))
                values.append(value)
        rows.append(("pmv_jsd_avg", "run", "", float(np.mean(values))))
    elif app_type == "water":
        fractions = [float((app[:, i] > 0.8).mean()) for i in range(n)]
        for i in range(n):
            rows.append(("br_gt80_fraction", "human", str(i), fractions[i]))
        rows.append(("br_gt80_fraction_avg", "run", "", float(np.mean(fractions))))
    else:
        fractions = [float((app[:, i] > 0.0).mean()) for i in range(n)]
        for i in range(n):
            rows.append(("positive_le_fraction", "human", str(i), fractions[i]))
        rows.append(("positive_le_fraction_avg", "run", "", float(np.mean(fractions))))
    return rows


def _fmt(x):
    return repr(float(x))


def _learning_names(values):
    return [learning.ACTIONS[int(v)] for v in values]


def write_artifact(artifact, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config, trace = artifact.config, artifact.trace
    n = config.n_humans
    categorical = config.app_type == "learning"

    with open(out_dir / "trace.csv", "w", newline="") as fh:
        fh.write(TRACE_HEADER + "\n")
        writer = csv.writer(fh)
        for t in range(trace.tick.size):
            desired = (_learning_names(trace.desired[t]) if categorical
                       else [_fmt(v) for v in trace.desired[t]])
            if categorical:
                action = learning.ACTIONS[int(trace.global_action[t, 0])]
                global_per_human = [action] * n
            else:
                global_per_human = [_fmt(v) for v in trace.global_action[t]]
            for i in range(n):
                writer.writerow([
                    int(trace.tick[t]), trace.phase[t], i, desired[i],
                    global_per_human[i], _fmt(trace.weights[t, i]),
                    _fmt(trace.closeness[t, i]), int(trace.satisfied[t, i]),
                    _fmt(trace.perf[t, i]), int(trace.active_option[t]),
                    trace.dqn_action[t],
                ])

    app_name = APP_VALUE_NAMES[config.app_type]
    with open(out_dir / "app.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tick", "human", app_name])
        for t in range(trace.tick.size):
            for i in range(n):
                writer.writerow([int(trace.tick[t]), i, _fmt(trace.app_value[t, i])])

    write_metrics_csv(artifact.metrics_rows, out_dir / "metrics.csv")

    config_dict = artifact.config.to_dict()
    canonical = json.dumps(config_dict, sort_keys=True).encode()
    echo = {
        "config": config_dict,
        "config_sha256": hashlib.sha256(canonical).hexdigest(),
        "code_sha256": _code_hash(),
    }
    with open(out_dir / "config.json", "w") as fh:
        json.dump(echo, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_metrics_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "scope", "human", "value"])
        for metric, scope, key, value in rows:
            writer.writerow([metric, scope, key, _fmt(value)])


def _code_hash():
    root = Path(__file__).parent
    digest = hashlib.sha256()
    for path in sorted(root.rglob("*.py")) + sorted(root.rglob("*.txt")):
        digest.update(path.relative_to(root).as_posix().encode())
        digest.update(path.read_bytes())
    return digest.hexdigest()


def load_artifact(out_dir):
    """Rebuild a RunArtifact from its files; sat_metric replays the ledger."""
    out_dir = Path(out_dir)
    with open(out_dir / "config.json") as fh:
        echo = json.load(fh)
    config = ExperimentConfig.from_dict(echo["config"])
    n = config.n_humans
    categorical = config.app_type == "learning"

    columns = {name: [] for name in TRACE_HEADER.split(",")}
    with open(out_dir / "trace.csv", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != TRACE_HEADER.split(","):
            raise ValueError(f"unexpected trace header {reader.fieldnames}")
        for row in reader:
            for name in columns:
                columns[name].append(row[name])

    T = len(columns["tick"]) // n

    def grid(name, conv):
        values = [conv(v) for v in columns[name]]
        return np.array(values).reshape(T, n)

    act_index = {name: i for i, name in enumerate(learning.ACTIONS)}
    num = act_index.__getitem__ if categorical else float
    trace = TraceData(
        tick=np.array([int(v) for v in columns["tick"][::n]]),
        phase=columns["phase"][::n],
        desired=grid("desired", num).astype(float),
        global_action=grid("global_action", num).astype(float),
        weights=grid("weight", float),
        closeness=grid("L", float),
        satisfied=grid("satisfied", int).astype(bool),
        perf=grid("perf", float),
        active_option=np.array([int(v) for v in columns["active_option"][::n]]),
        dqn_action=columns["dqn_action"][::n],
        sat_metric=np.empty((T, n)),
        app_value=np.empty((T, n)),
    )

    ledger = fairness.init_ledger(n, config.delta)
    for t in range(T):
        ledger = fairness.update_ledger(ledger, trace.satisfied[t])
        trace.sat_metric[t] = ledger.records[:, 1] / ledger.records.sum(axis=1)

    with open(out_dir / "app.csv", newline="") as fh:
        reader = csv.DictReader(fh)
        name = APP_VALUE_NAMES[config.app_type]
        for idx, row in enumerate(reader):
            trace.app_value[idx // n, idx % n] = float(row[name])

    rows = []
    with open(out_dir / "metrics.csv", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            rows.append((row["metric"], row["scope"], row["human"], float(row["value"])))
    return RunArtifact(config=config, trace=trace, metrics_rows=rows, out_dir=out_dir)


def compare(artifacts, window=3000):
    """Side-by-side metrics plus FAIRO's percentage reductions.

    Accepts RunArtifacts or run directories. Returns (rows, text) where rows
    are (metric, scope, human, method, value) recomputed at `window`.
    """
    loaded = [a if isinstance(a, RunArtifact) else load_artifact(a) for a in artifacts]
    if not loaded:
        raise ValueError("nothing to compare")
    app_type = loaded[0].config.app_type
    n = loaded[0].config.n_humans
    for a in loaded:
        if a.config.app_type != app_type or a.config.n_humans != n:
            raise ValueError("compared runs must share app_type and n_humans")
    methods = [a.config.method for a in loaded]
    if len(set(methods)) != len(methods):
        raise ValueError(f"duplicate methods in comparison: {methods}")

    per_method = {}
    for a in loaded:
        per_method[a.config.method] = compute_metrics(a.trace, app_type, window)

    rows = []
    for method in methods:
        for metric, scope, key, value in per_method[method]:
            rows.append((metric, scope, key, method, value))

    if "fairo" in per_method:
        fairo_vals = {(m, k): v for m, _, k, v in per_method["fairo"]}
        for method in methods:
            if method == "fairo":
                continue
            base_vals = {(m, k): v for m, _, k, v in per_method[method]}
            for name in LOWER_BETTER:
                if (name, "") not in base_vals:
                    continue
                base = base_vals[(name, "")]
                ours = fairo_vals[(name, "")]
                reduction = 0.0 if base == 0.0 else (base - ours) / base * 100.0
                rows.append((f"reduction_pct_{name}", "run", "", method, reduction))

    return rows, _comparison_text(rows, methods)


def _comparison_text(rows, methods):
    keys = []
    table = {}
    for metric, scope, key, method, value in rows:
        k = (metric, scope, key)
        if k not in table:
            keys.append(k)
            table[k] = {}
        table[k][method] = value
    col_methods = list(methods) + [m for k in keys for m in table[k] if m not in methods]
    col_methods = list(dict.fromkeys(col_methods))
    width = max(len(m) for m in col_methods) + 2
    name_width = max(len(f"{m} {s} {k}".strip()) for m, s, k in keys) + 2
    lines = ["".ljust(name_width) + "".join(m.rjust(width) for m in col_methods)]
    for k in keys:
        label = f"{k[0]} {k[1]} {k[2]}".strip()
        cells = []
        for m in col_methods:
            v = table[k].get(m)
            cells.append(("-" if v is None else f"{v:.4f}").rjust(width))
        lines.append(label.ljust(name_width) + "".join(cells))
    return "\n".join(lines)


def write_comparison(rows, text, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "comparison.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "scope", "human", "method", "value"])
        for metric, scope, key, method, value in rows:
            writer.writerow([metric, scope, key, method, _fmt(value)])
    (out_dir / "comparison.txt").write_text(text + "\n")


def sweep(config, seeds, out_root=None):
    """Run every seed independently and aggregate mean/min/max per metric."""
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed")
    artifacts = []
    for seed in seeds:
        cfg = ExperimentConfig.from_dict({**config.to_dict(), "seed": seed})
        out_dir = None if out_root is None else Path(out_root) / f"seed_{seed}"
        artifacts.append(run(cfg, out_dir=out_dir))

    by_key = {}
    order = []
    for artifact in artifacts:
        for metric, scope, key, value in artifact.metrics_rows:
            k = (metric, scope, key)
            if k not in by_key:
                by_key[k] = []
                order.append(k)
            by_key[k].append(value)
    agg_rows = [
        (metric, scope, key,
         float(np.mean(by_key[(metric, scope, key)])),
         float(np.min(by_key[(metric, scope, key)])),
         float(np.max(by_key[(metric, scope, key)])))
        for metric, scope, key in order
    ]
    if out_root is not None:
        with open(Path(out_root) / "aggregate.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["metric", "scope", "human", "mean", "min", "max"])
            for metric, scope, key, mean, lo, hi in agg_rows:
                writer.writerow([metric, scope, key, _fmt(mean), _fmt(lo), _fmt(hi)])
    return artifacts, agg_rows


def default_out_root():
    return Path(os.environ.get(OUT_ROOT_ENV, "runs"))
