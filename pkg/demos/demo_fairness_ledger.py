"""Walk through the fairness bookkeeping with no environment at all.

Three humans share one decision. Every tick each one is either satisfied or
not, and their (u, v) record rotates accordingly. The script favors human 0
for a while, then hands the decision to whoever has the lowest closeness, so
you can watch L collapse and recover.
"""

import numpy as np

from fairo import fairness


def show(tick, ledger, note):
    L = fairness.fairness_state(ledger)
    sat = [rec[1] / rec.sum() for rec in ledger.records]
    print(f"t={tick:3d}  L = [{', '.join(f'{v:.3f}' for v in L)}]  "
          f"satisfaction = [{', '.join(f'{v:.2f}' for v in sat)}]  {note}")


def main():
    ledger = fairness.init_ledger(3)
    show(0, ledger, "everyone starts at the neutral record")

    # 40 ticks of favoritism: only human 0 is ever satisfied
    for t in range(1, 41):
        ledger = fairness.update_ledger(ledger, [True, False, False])
        if t % 10 == 0:
            show(t, ledger, "human 0 hogging the decision")

    L = fairness.fairness_state(ledger)
    active = fairness.active_option(L)
    state = fairness.augment_state(L, ledger, active)
    print(f"\nafter the favoritism, argmin L = {active}: the favored human is the")
    print("odd one out (the other two rotated together), so their option activates.")
    print(f"the favored flag for that option is {state.favored_flag}: human {active} "
          f"holds the most satisfied mass,")
    print("so balance means lowering their weight and letting the others win.\n")

    # do what a trained option does: while the active human is the favored
    # one, serve everyone else
    for t in range(41, 121):
        L = fairness.fairness_state(ledger)
        active = fairness.active_option(L)
        favored = fairness.augment_state(L, ledger, active).favored_flag
        win = [(i != active) if favored else (i == active) for i in range(3)]
        ledger = fairness.update_ledger(ledger, win)
        if t % 20 == 0:
            show(t, ledger, f"option {active} active, favored={favored}")

    print("\nnote the one-sided repair would overshoot; the option hands off as")
    print("soon as its human leaves the argmin, so attention keeps rotating.")

    print("\nreward shaping for a single option, mid-range closeness moves:")
    for l_prev, l_cur in ((0.50, 0.51), (0.50, 0.502), (0.60, 0.55), (0.75, 0.75)):
        f = fairness.fairness_reward_term(l_prev, l_cur)
        print(f"  L {l_prev:.3f} -> {l_cur:.3f}   F = {f:+.3f}")
    print("the staircase makes even a 0.002 improvement worth +0.25 beyond the")
    print("level term, while a 0.05 slide costs the full -1 bonus.")


if __name__ == "__main__":
    main()
