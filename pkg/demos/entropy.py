"""Entropy estimates with c and m known, then with both integrated out."""

import math

from bayesent import (
    EstimatorConfig,
    LogUniformC,
    UniformSize,
    entropy_mean_fixed,
    entropy_moments_full,
    entropy_variance_fixed,
    plugin_entropy,
    tsallis_mean_fixed,
)

counts = [4, 2, 1, 1, 0, 0]
print("counts:", counts)
print(f"plug-in entropy            {plugin_entropy(counts):.4f}")

for c in (0.1, 1.0, 10.0):
    mean, var = entropy_variance_fixed(counts, c, len(counts))
    print(f"c = {c:<5g} m = 6          E(H) = {mean:.4f}  sd = {math.sqrt(var):.4f}")

# with no data the posterior mean is the prior mean, a harmonic sum when c = m
print(f"prior mean, m = c = 10     {entropy_mean_fixed([0], 10.0, 10):.6f}"
      f"  vs sum 1/q = {sum(1 / q for q in range(2, 11)):.6f}")

print(f"Tsallis q = 2, c = 1       {tsallis_mean_fixed(counts, 1.0, 6, 2.0):.4f}")

est = entropy_moments_full(counts, EstimatorConfig(LogUniformC(1e-3, 1e3), UniformSize(50)))
print(f"c log-uniform, m uniform on [4, 50]: E(H) = {est.mean:.4f}  sd = {math.sqrt(est.variance):.4f}"
      f"  ({est.n_size_terms} size terms, {est.n_c_nodes} c nodes)")
