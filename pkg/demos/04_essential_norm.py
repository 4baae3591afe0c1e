"""Essential-norm bands and the A_j annuli.

Run:  python3 demos/04_essential_norm.py
"""
# %%
from blochlab import CONSTANTS, annuli_diagnostic, essential_norm_band, parse_symbol_spec, quotient_sequence
from blochlab.weights import VLOG

print(f"band constant (2L + 6e^(L-1))/L = {CONSTANTS.c_upper_band:.12f}")

# %%
# The tail maximum of q_j stands in for the limsup; the band is [E, c*E].
for spec in ("id", "mobius:0.3,0.0", "dilate:0.9", "const:0.5,0.0"):
    series = quotient_sequence(parse_symbol_spec(spec), VLOG, 200)
    band = essential_norm_band(series)
    print(f"{spec:<16} E={band.E_est:.6g}  band=[{band.lower:.6g}, {band.upper:.6g}]")

# %%
# Where does phi send a boundary-clustered sample of the disk?  Counts per
# band r_{j-1} <= |phi(z)| < r_j; the overflow bucket is everything past j_max.
for spec in ("id", "dilate:0.5", "mobius:0.3,0.0"):
    h = annuli_diagnostic(parse_symbol_spec(spec), 8)
    print(f"{spec:<16} {h.counts}  overflow={h.overflow}  total={h.total}")
