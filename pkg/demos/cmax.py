"""The concentration that maximizes prior uncertainty about the entropy."""

from bayesent import c_max, prior_entropy_variance

for m in (2, 5, 20, 100, "infinite"):
    c = c_max(m)
    mm = 10**6 if m == "infinite" else m
    print(f"m = {m!s:>8}  c_max = {c:.4f}  prior Var(H) = {prior_entropy_variance(c, mm):.4f}")
