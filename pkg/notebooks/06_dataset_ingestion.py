"""
From dataset rows to bandit instances
=====================================

Ratings become Gaussian arms at each item's mean rating. Inhibition values are
min-max normalised, turned into percentage control and logged.
"""

# %%
from cbai import ingest_pkis2, ingest_ratings
from cbai.config import instance_section

ratings = [("cap-1", 3), ("cap-1", 3), ("cap-1", 2), ("cap-2", 1), ("cap-2", 1), ("cap-3", 2)]
inst = ingest_ratings(ratings, sigma=1.0)
print(inst.means.round(4), "best:", inst.best_arm())

# %%
inhibition = [("A", 0), ("B", 50), ("C", 100), ("D", 20)]
kin = ingest_pkis2(inhibition)
print(kin.means.round(4), "best:", kin.best_arm())

# %%
# the same [instance] block `cbai ingest` writes
print(instance_section(kin, "four compounds"))
