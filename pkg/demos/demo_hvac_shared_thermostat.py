"""Three occupants, one thermostat: the fairness controller vs two baselines.

Runs short seeded experiments (same seed, same house, same schedules) and
compares who actually got their comfort. The interesting occupant is the
night-shift worker whose preferred setpoint disagrees with the other two for
most of the day; averaging splits the difference forever, round-robin thrashes,
and the option controller learns to rotate attention.

Takes about a minute. Writes run artifacts under ./runs/demo_hvac/.
"""

import numpy as np

from fairo.harness import ExperimentConfig, QnetConfig, compare, run, write_artifact

TICKS, WARMUP, WINDOW = 6000, 1200, 1500
QNET = QnetConfig(alpha=1e-2, gamma=0.5, epsilon_start=1.0,
                  epsilon_end=0.01, epsilon_decay_steps=3000, hidden=(32, 32))


def main():
    arts = []
    for method in ("fairo", "average", "round_robin"):
        cfg = ExperimentConfig(app_type="hvac", method=method, seed=3,
                               ticks=TICKS, warmup=WARMUP, window=WINDOW,
                               delta_w=0.15, qnet=QNET)
        art = run(cfg)
        write_artifact(art, f"runs/demo_hvac/{method}")
        arts.append(art)
        L = art.trace.closeness[-WINDOW:]
        print(f"{method:12s}  min-L {art.metric('min_l_mean'):.3f}  "
              f"satisfaction JSD {art.metric('satisfaction_jsd_avg'):.3f}  "
              f"comfort spread {art.metric('pmv_jsd_avg'):.3f}  "
              f"(worst tick min L {L.min(axis=1).min():.3f})")

    fairo = arts[0]
    print("\nlast-window option activity (which occupant the controller served):")
    active = fairo.trace.active_option[-WINDOW:]
    for i in range(3):
        share = float(np.mean(active == i))
        print(f"  occupant {i}: active {share:.0%} of ticks")

    print("\npairwise comparison table:")
    _, text = compare(arts, window=WINDOW)
    print(text)


if __name__ == "__main__":
    main()
