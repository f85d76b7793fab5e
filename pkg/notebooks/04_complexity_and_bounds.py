"""
Problem complexity and the bound formulas
=========================================
"""

# %%
import numpy as np

from cbai import lower_bound_report, problem_complexity, true_gaps, upper_bound_report

mu = [2.5, 2.3, 2.0, 0.6]
print("gaps", true_gaps(mu))
H = problem_complexity(mu)
print(f"H = {H:.3f}")

# %%
for eps in (0.05, 0.1, 0.2):
    lb = lower_bound_report(H, 0.1, eps, 1.0, mu, c1=0.2)
    ub = upper_bound_report(mu, 1.0, eps, 0.1, c1=0.2)
    print(f"eps={eps:.2f}  lower slope {lb.asymptotic_slope_cbai:9.2f}  gap-policy slope {ub.gap_slope:9.1f}"
          f"  elimination bound {ub.se_bound:9.1f}")

# %%
# the contamination term 8K/eps^2 dominates for small eps
eps = np.array([0.02, 0.05, 0.1, 0.2, 0.3])
print(np.c_[eps, 8 * 4 / eps**2])
