"""
Stepping through the gap-based policy
=====================================

The policy alternates between forced exploration (any arm with too few pulls)
and exploitation (pull the wider of the empirical leader and its most
ambiguous rival). It may stop only once t >= ceil(K T) and the two intervals
no longer overlap.
"""

# %%
import math

from cbai import BanditInstance, ContaminationModel, ExperimentConfig, exploration_floor, run_trial

inst = BanditInstance.gaussian([2.5, 2.3, 2.0, 0.6])
cont = ContaminationModel(epsilon=0.1, adversary="fixed_shift", shift=5.0)
cfg = ExperimentConfig(inst, cont, policy="gcbai", delta=0.1, n_trials=1, master_seed=2024)

T = exploration_floor(0.05, 0.1)
print(f"per-arm floor T = {T:.2f}, earliest stop = {math.ceil(4 * T)}")

# %%
records = []
result = run_trial(cfg, 0, trace=records.append)
print(f"tau={result.tau}  recommended={result.recommended}  pulls per arm={result.pulls}")

# %%
# overlap is inf on forced rounds; print it every few thousand pulls once it is live
for rec in records[::2500]:
    print(f"t={rec['t']:>6}  arm={rec['arm']}  overlap={rec['overlap']:.4f}")
print(f"final overlap {records[-1]['overlap']:.4f}")

# %%
# uniform arm choice with the same stopping rule; compare tau over many trials, not one
rnd = run_trial(cfg.replace(policy="random_gap"), 0)
print(f"random_gap tau={rnd.tau}  pulls={rnd.pulls}")
