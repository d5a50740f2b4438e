"""How many bins produced a sample? Posterior over the number of bins m.

Eight distinct values were seen in 1000 draws. Under a Dirichlet prior the
counts themselves say the alphabet is probably not much larger than what was
seen, and the posterior mean moves with the concentration c.
"""

from importlib.resources import files

from bayesent import LogUniformC, UniformSize, read_counts, size_posterior

counts = read_counts(files("bayesent") / "data" / "fig1_counts.txt")
print(f"N = {counts.N} draws, M = {counts.M} distinct values")

for label, c in [("c = 0.01", 0.01), ("c = 1", 1.0), ("c = 100", 100.0),
                 ("c log-uniform on [1e-3, 1e3]", LogUniformC())]:
    post = size_posterior(counts, c, UniformSize(100))
    top = ", ".join(f"P(m={m})={p:.3f}" for m, p in post.rows()[:3])
    print(f"{label:30s} E(m|n) = {post.mean:.3f}  MAP = {post.map}  {top}")
