"""Reading boundedness and compactness off q_j = ||phi^j||_mu / ||z^j||_log.

Run:  python3 demos/03_quotient_sequences.py
"""
# %%
from blochlab import classify, parse_symbol_spec, parse_weight_spec, quotient_sequence

vlog = parse_weight_spec("vlog")


def report(spec, weight=vlog, j_max=60):
    series = quotient_sequence(parse_symbol_spec(spec), weight, j_max)
    c = classify(series)
    q = series.q
    print(f"{spec:<32} {weight.spec:<12} q_1={q[0]:.4g}  q_{j_max}={q[-1]:.4g}  "
          f"bounded={c.bounded_evidence:<12} compact={c.compact_evidence}")


# %%
# Identity: q_j is exactly 1 (bounded, never compact).
report("id")
# A dilation shrinks every power geometrically: q_j = a^j.
report("dilate:0.9")
report("dilate:0.5")
# Automorphisms and finite Blaschke products touch the circle.
report("mobius:0.3,0.0")
report("blaschke:0.5,0.0;-0.3,0.4")
report("compose(power:2,mobius:0.3,0.0)", j_max=40)

# %%
# Into the space with weight 1 (bounded functions' derivatives), even the
# identity fails: q_j grows like j / log j.
report("id", parse_weight_spec("alpha:0"))

# %%
# Polynomials are checked numerically before anything runs.
try:
    quotient_sequence(parse_symbol_spec("poly:0.6,0.6"), vlog, 5)
except Exception as exc:
    print(type(exc).__name__, "->", exc)
