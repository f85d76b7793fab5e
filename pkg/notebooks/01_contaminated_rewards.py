"""
Contaminated rewards and robust estimates
=========================================

Each pull flips a coin with probability epsilon. Heads: the learner sees a
sample from the adversary instead of the arm. Below we watch what that does to
a plain average and to the trimmed mean and median.
"""

# %%
import numpy as np

from cbai import ArmStatistics, BanditInstance, ContaminationModel, RewardTape

inst = BanditInstance.gaussian([0.0, -1.0], sigma=1.0)
adversary = ContaminationModel(epsilon=0.1, adversary="fixed_shift", shift=10.0)
tape = RewardTape(inst, adversary, master_seed=2024, trial_index=0)

# %%
# the tape is a pure function of (seed, trial, round): pulling in any order gives the same values
obs = [tape.reward(0, t) for t in range(1, 5001)]
values = np.array([v for v, _ in obs])
flags = np.array([f for _, f in obs])
print(f"corrupted fraction: {flags.mean():.3f}")
print(f"clean mean {values[~flags].mean():+.3f}   corrupted mean {values[flags].mean():+.3f}")

# %%
stats = ArmStatistics(alpha=0.05, samples=values)
print(f"sample mean      {stats.mean():+.3f}")
print(f"trimmed (5%)     {stats.trimmed_mean():+.3f}")
print(f"trimmed (10%)    {stats.trimmed_mean(0.10):+.3f}")
print(f"median           {stats.median():+.3f}")

# %%
# A one-sided shift puts all outliers in the top tail. Trimming 5% per side
# removes only about half of them. At 10% nearly all are gone; what is left is
# the smaller bias from cutting the clean lower tail without its upper twin.
for alpha in (0.0, 0.05, 0.1, 0.15):
    print(f"alpha={alpha:.2f}  estimate={stats.trimmed_mean(alpha):+.3f}")
