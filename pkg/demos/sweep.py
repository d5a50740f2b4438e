"""A short estimator comparison on Dirichlet-drawn distributions.

The shipped fig3.cfg runs 200 replicates per point; this uses 20 so it
finishes in a few seconds. Set BAYESENT_THREADS to control parallelism.
"""

from bayesent import SweepSpec, run_sweep

spec = SweepSpec("dirichlet", (0.01, 0.1, 1.0, 10.0, 100.0), m=100, N=10,
                 replicates=20, seed=1, roster=("wd", "ansb", "cae", "plugin"))
res = run_sweep(spec)
names = spec.roster
print("c".rjust(8) + "".join(n.rjust(9) for n in names))
for c in spec.grid:
    print(f"{c:8g}" + "".join(f"{res.rms(n, c):9.3f}" for n in names))
