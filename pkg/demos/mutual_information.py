"""Mutual information from a small contingency table.

Each of the three entropies gets its own hyperpriors, so adding a never
observed category to Y cannot change the estimate of H(X).
"""

from bayesent import (
    EstimatorConfig,
    JointCountTable,
    LogUniformC,
    UniformSize,
    entropy_moments_full,
    marginalize,
    mi_mean_fixed,
    mi_mean_full,
)

table = JointCountTable([[6, 1, 0], [0, 2, 5]])
print("table dims:", table.dims)
print(f"E(I | c = 1)                  {mi_mean_fixed(table, 1.0):.4f}")

lu = LogUniformC()
cfg_x = EstimatorConfig(lu, UniformSize(4))
cfg_y = EstimatorConfig(lu, UniformSize(6))
cfg_xy = EstimatorConfig(lu, UniformSize(24))
print(f"E(I), hyperpriors on c and m  {mi_mean_full(table, cfg_xy, cfg_x, cfg_y).mean:.4f}")

h_x = entropy_moments_full(marginalize(table, 0), cfg_x).mean
wider = JointCountTable([[6, 1, 0, 0], [0, 2, 5, 0]])
h_x_wider = entropy_moments_full(marginalize(wider, 0), cfg_x).mean
print(f"E(H_X) before / after appending an empty Y column: {h_x!r} / {h_x_wider!r}")
