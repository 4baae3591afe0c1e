"""Comparing log-type weights near the boundary.

Run:  python3 demos/02_weight_equivalence.py
"""
# %%
import math

from blochlab.weights import VLOG, LogWeight, check_square_equivalence, equivalence_constants, eval_weight

print("v_log at r = 0, 0.9, 0.999999:", [round(eval_weight(VLOG, r), 8) for r in (0, 0.9, 0.999999)])

# %%
# 1 - r and 1 - r^2 differ by at most a factor 2, and the log factor follows.
for theta in (math.e, 3.0, 10.0):
    rep = equivalence_constants(LogWeight(1, theta), LogWeight(2, theta))
    print(f"theta={theta:6.3f}  v1/v2 in [{rep.ratio_min:.6f}, {rep.ratio_max:.6f}]")

# %%
# Changing theta moves the band but keeps it finite.
rep = equivalence_constants(LogWeight(2, math.e), LogWeight(2, 10.0))
print(f"logk(2,e)/logk(2,10): [{rep.ratio_min:.6f} at r={rep.argmin_r}, "
      f"{rep.ratio_max:.6f} at r={rep.argmax_r:.6f}]")
print(rep.to_json(w1="logk:2,e", w2="logk:2,10"))

# %%
# The sandwich mu(1-t^2)/2 <= mu(1-t) <= mu(1-t^2) needs theta >= e.
print(check_square_equivalence(3.0))
