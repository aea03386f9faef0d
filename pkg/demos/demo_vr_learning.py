"""One VR headset, three learners, one shared session policy.

Each learner is a small 8-state chain with their own tolerance for VR time;
the desired action of each is whatever maximizes their own expected next
state value. The global action is categorical (break / vr_on / vr_off), so
the controller picks the desire of the human with the largest weighted
effect. Learning experience LE rewards climbing the chain.

Takes about a minute. Writes run artifacts under ./runs/demo_learning/.
"""

import numpy as np

from fairo.harness import ExperimentConfig, QnetConfig, run, write_artifact

TICKS, WARMUP, WINDOW = 6000, 1200, 1500
QNET = QnetConfig(alpha=1e-2, gamma=0.5, epsilon_start=1.0,
                  epsilon_end=0.01, epsilon_decay_steps=3000)


def main():
    fairo_art = None
    for method in ("fairo", "average", "round_robin"):
        cfg = ExperimentConfig(app_type="learning", method=method, seed=5,
                               ticks=TICKS, warmup=WARMUP, window=WINDOW,
                               qnet=QNET)
        art = run(cfg)
        write_artifact(art, f"runs/demo_learning/{method}")
        if method == "fairo":
            fairo_art = art
        le = art.trace.app_value[-WINDOW:]
        print(f"{method:12s}  positive-LE {art.metric('positive_le_fraction_avg'):.3f}  "
              f"satisfaction JSD {art.metric('satisfaction_jsd_avg'):.3f}  "
              f"min-L {art.metric('min_l_mean'):.3f}  "
              f"mean LE per learner [{', '.join(f'{v:+.3f}' for v in le.mean(axis=0))}]")

    print("\nwhose desire won each tick (fairo, last window) - note satisfaction")
    print("tracks LE > 0, not preference match, so this can stay lopsided while")
    print("learning outcomes stay fair:")
    desired = fairo_art.trace.desired[-WINDOW:]
    chosen = fairo_art.trace.global_action[-WINDOW:]
    for i in range(desired.shape[1]):
        share = float(np.mean(desired[:, i] == chosen[:, i]))
        print(f"  learner {i}: got their preferred action {share:.0%} of ticks")


if __name__ == "__main__":
    main()
