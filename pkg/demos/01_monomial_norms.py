"""How big is z**j in the log-Bloch norm?

Run:  python3 demos/01_monomial_norms.py
"""
# %%
import math

import numpy as np

from blochlab import monomials as mono

# The norm is a 1-D maximization.  For j >= 11 it reduces to the single root
# of an increasing function of s = 1 - t; below that we scan.
for j in (1, 2, 5, 11, 100, 10**4, 10**8):
    rec = mono.monomial_log_norm(j)
    print(f"j={j:>9}  s_j={rec.s_j:.6e}  norm={rec.norm:.12f}  [{rec.method}]")

# %%
# Growth is logarithmic: e*norm/log(j+1) creeps down towards 1.
for k in (4, 8, 16, 24, 30):
    j = 2**k
    print(f"2^{k:<2}  e*norm/log(j+1) = {math.e * mono.monomial_log_norm(j).norm / math.log(j + 1):.6f}")

# %%
# The maximizer crowds the circle at rate 1/j, and t_j**(j-1) approaches 1/e.
for j in (10**2, 10**4, 10**6):
    s, _ = mono.solve_tj(j)
    print(f"j={j:>7}  j*s_j={j * s:.5f}  t_j^(j-1)={math.exp((j - 1) * math.log1p(-s)):.5f}")
print(f"1/e = {1 / math.e:.5f}")

# %%
# From which index on does norm/log(m+1) stay under 3/(2e)?
th = mono.find_threshold_N()
print(f"N = {th.N}; worst ratio on the next {th.window} indices = {th.max_ratio_in_window:.5f}"
      f" < {mono.CONSTANTS.ratio_cap:.5f}")

# %%
# The table is plot-ready CSV.
print(mono.norm_table_csv(mono.norm_table(np.arange(1, 6))))
