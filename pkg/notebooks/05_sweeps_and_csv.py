"""
Sweeps and reproducible CSV output
==================================

A sweep runs one experiment per grid value. Trial i always uses the same
random streams, so the CSV depends only on the configuration and the seed.
"""

# %%
import sys

from cbai import BanditInstance, ContaminationModel, ExperimentConfig, sweep

cfg = ExperimentConfig(
    BanditInstance.gaussian([2.5, 2.3, 2.0, 0.6]),
    ContaminationModel(epsilon=0.1, adversary="fixed_shift", shift=5.0),
    policy="secbai",
    delta=0.1,
    n_trials=20,
    master_seed=2024,
)

# %%
table = sweep(cfg, "delta", [0.2, 0.05, 0.1])
sys.stdout.write(table.to_csv())

# %%
again = sweep(cfg, "delta", [0.1, 0.2, 0.05], workers=2)
print("identical bytes:", again.to_csv() == table.to_csv())
