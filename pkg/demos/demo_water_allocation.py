"""Shared water line with per-household tanks, three allocation policies.

Each tick the line delivers 1.5x the peak activity demand, split by weight.
Households whose share beats their demand bank the leftover in a tank; the
balance rate BR = (supply + reserve)/demand says how close each household is
to whole. Weighted-average locks shares to demand ratios (the thirstiest
household always wins), round-robin rotates blindly, and the option controller
moves weight toward whoever's record has drifted.

Takes about a minute. Writes run artifacts under ./runs/demo_water/.
"""

import numpy as np

from fairo.harness import ExperimentConfig, QnetConfig, run, write_artifact

TICKS, WARMUP, WINDOW = 6000, 1200, 1500
QNET = QnetConfig(alpha=2e-2, gamma=0.9, epsilon_start=1.0,
                  epsilon_end=0.20, epsilon_decay_steps=3000)


def main():
    for method in ("fairo", "weighted_average", "round_robin"):
        cfg = ExperimentConfig(app_type="water", method=method, seed=2,
                               ticks=TICKS, warmup=WARMUP, window=WINDOW,
                               delta_w=0.5, qnet=QNET)
        art = run(cfg)
        write_artifact(art, f"runs/demo_water/{method}")
        br = art.trace.app_value[-WINDOW:]
        per_house = (br > 0.8).mean(axis=0)
        print(f"{method:17s}  BR>80% per household "
              f"[{', '.join(f'{v:.2f}' for v in per_house)}]  "
              f"avg {art.metric('br_gt80_fraction_avg'):.3f}  "
              f"min-L {art.metric('min_l_mean'):.3f}")
        if method == "fairo":
            w = art.trace.weights[-WINDOW:]
            print(f"{'':17s}  weight ranges " +
                  " ".join(f"h{i}:[{w[:, i].min():.2f},{w[:, i].max():.2f}]"
                           for i in range(w.shape[1])))

    print("\nweighted-average never lets the low-demand household bank a reserve;")
    print("rotating weight does, at the cost of brief lean ticks for the others.")
    print("note weighted-average's perfect min-L: closeness measures EQUAL")
    print("treatment, and equally starved households are perfectly equal.")


if __name__ == "__main__":
    main()
