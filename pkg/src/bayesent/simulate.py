"""Generative models, a Monte Carlo posterior oracle and the RMS-error sweep."""

from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import dataclass, field
from functools import lru_cache
import io
import math
import os

import numpy as np
from scipy.special import logsumexp

from . import baselines
from .estimators import EstimatorConfig, entropy_moments_full
from .model import CountVector, LogUniformC, UniformSize, as_counts

THREADS_ENV = "BAYESENT_THREADS"


@dataclass(frozen=True)
class DirichletGen:
    c: float
    m: int

    def sample(self, rng):
        return sample_dirichlet(self.c, self.m, rng)

    @property
    def param(self):
        return self.c


@dataclass(frozen=True)
class PowerLawGen:
    """P(i) proportional to 1/S[i]**alpha for a seeded random permutation S of 1..m."""

    alpha: float
    m: int
    permutation_seed: int = 0

    def probabilities(self):
        ranks = np.random.default_rng(self.permutation_seed).permutation(self.m) + 1
        logp = -self.alpha * np.log(ranks)
        return np.exp(logp - logsumexp(logp))

    def sample(self, rng):
        return self.probabilities()

    @property
    def param(self):
        return self.alpha


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def sample_dirichlet_log(alpha, size, rng):
    """Log of Dirichlet draws; shape ``size + (len(alpha),)``.

    Gamma(a) = Gamma(a + 1) * U**(1/a), taken in logs, so that shape parameters
    far below one do not underflow to exact zeros before normalization.
    """
    alpha = np.asarray(alpha, dtype=float)
    shape = tuple(np.atleast_1d(size)) + alpha.shape if size is not None else alpha.shape
    g = rng.standard_gamma(alpha + 1.0, size=shape)
    u = rng.random(size=shape)
    logg = np.log(g) + np.log(u) / alpha
    return logg - logsumexp(logg, axis=-1, keepdims=True)


def sample_dirichlet(c, m, seed=None):
    """One draw from the symmetric Dirichlet with per-bin parameter c/m."""
    if not c > 0 or m < 1:
        raise ValueError("need c > 0 and m >= 1")
    if m == 1:
        return np.ones(1)
    rng = _rng(seed)
    p = np.exp(sample_dirichlet_log(np.full(m, c / m), None, rng))
    return p / p.sum()


def sample_counts(p, N, seed=None):
    p = np.asarray(p, dtype=float)
    if np.any(p < 0) or not math.isclose(p.sum(), 1.0, abs_tol=1e-9):
        raise ValueError("p must be a probability vector")
    rng = _rng(seed)
    return CountVector(rng.multinomial(N, p / p.sum()))


# ------------------------------------------------------------ functionals


def entropy_of(p, axis=-1):
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(p > 0, p * np.log(p), 0.0)
    return -np.sum(t, axis=axis)


def tsallis_of(q):
    def f(p):
        return (1.0 - np.sum(np.asarray(p) ** q, axis=-1)) / (q - 1.0)
    return f


def marginal_entropy_of(shape, axis):
    """Entropy of the marginal on ``axis`` of draws over a flattened table."""
    def f(p):
        t = p.reshape(p.shape[:-1] + tuple(shape))
        drop = tuple(i + p.ndim - 1 for i in range(len(shape)) if i != axis)
        return entropy_of(t.sum(axis=drop))
    return f


def mutual_information_of(shape):
    """sum_xy p(x,y) ln[p(x,y) / (p(x) p(y))] on flattened 2-way tables."""
    def f(p):
        t = p.reshape(p.shape[:-1] + tuple(shape))
        px = t.sum(axis=-1, keepdims=True)
        py = t.sum(axis=-2, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            # logs taken separately: px * py underflows for very peaked rho
            r = np.where(t > 0, t * (np.log(t) - np.log(px) - np.log(py)), 0.0)
        return r.sum(axis=(-1, -2))
    return f


def true_mi(p, shape):
    return float(mutual_information_of(shape)(np.asarray(p)[None, :])[0])


_FUNCTIONALS = {"entropy": entropy_of, "constant": lambda p: np.ones(p.shape[:-1])}


def _resolve_functional(functional):
    if callable(functional):
        return functional
    if isinstance(functional, str):
        if functional in _FUNCTIONALS:
            return _FUNCTIONALS[functional]
        if functional.startswith("tsallis:"):
            return tsallis_of(float(functional.split(":", 1)[1]))
    if isinstance(functional, tuple) and functional[0] == "tsallis":
        return tsallis_of(float(functional[1]))
    raise ValueError(f"unknown functional {functional!r}")


def _posterior_alpha(n, c, m):
    n = as_counts(n)
    if m < max(n.M, 1):
        raise ValueError(f"m={m} is smaller than the observed support M={n.M}")
    if len(n) == m:
        counts = np.asarray(n.counts, dtype=float)
    else:
        counts = np.zeros(m)
        counts[:n.M] = n.positive
    return counts + c / m


def mc_posterior_oracle(n, c, m, functional="entropy", draws=10 ** 6, seed=0, chunk=None):
    """Monte Carlo mean and standard error of a functional under the Dirichlet posterior.

    If ``n`` has exactly ``m`` entries they keep their positions (needed for
    table functionals); otherwise the positive counts are padded with empty
    bins up to m.
    """
    if draws < 100:
        raise ValueError("draws must be at least 100")
    f = _resolve_functional(functional)
    alpha = _posterior_alpha(n, c, m)
    rng = _rng(seed)
    chunk = chunk or max(1000, 2_000_000 // len(alpha))
    total = total2 = 0.0
    done = 0
    while done < draws:
        k = min(chunk, draws - done)
        logp = sample_dirichlet_log(alpha, k, rng)
        vals = np.asarray(f(np.exp(logp)), dtype=float)
        total += vals.sum()
        total2 += np.sum(vals * vals)
        done += k
    mean = total / draws
    var = max(total2 / draws - mean * mean, 0.0)
    return mean, math.sqrt(var / (draws - 1))


# ------------------------------------------------------------------ sweeps

ROSTER = ("wd", "ansb", "cae", "nsb", "plugin")


@dataclass(frozen=True)
class SweepSpec:
    """One benchmark: a grid of generators, sample size, replicates and estimators.

    ``target`` is "entropy" or "mi"; for "mi" the m = side**2 bins are read
    row-major as a side x side joint space.
    """

    family: str
    grid: tuple
    m: int = 100
    N: int = 10
    replicates: int = 200
    seed: int = 0
    roster: tuple = ("wd", "ansb", "cae", "nsb")
    target: str = "entropy"
    c_min: float = 1e-3
    c_max: float = 1e3
    m_max: int = 10_000
    marginal_m_max: int = 100
    nsb_k_max: int = 10_000
    nsb_marginal_k_max: int = 100
    n_nodes: int = 200

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if not self.roster:
            raise ValueError("roster must be non-empty")
        unknown = set(self.roster) - set(ROSTER)
        if unknown:
            raise ValueError(f"unknown estimators {sorted(unknown)}")
        if self.family not in ("dirichlet", "powerlaw"):
            raise ValueError(f"unknown generator family {self.family!r}")
        if self.target not in ("entropy", "mi"):
            raise ValueError(f"unknown target {self.target!r}")
        if self.target == "mi" and math.isqrt(self.m) ** 2 != self.m:
            raise ValueError("mutual-information sweeps need a square m")

    @property
    def side(self):
        return math.isqrt(self.m)

    def generator(self, param, replicate_seed):
        if self.family == "dirichlet":
            return DirichletGen(float(param), self.m)
        return PowerLawGen(float(param), self.m, permutation_seed=replicate_seed)

    def wd_config(self, m_max):
        return EstimatorConfig(LogUniformC(self.c_min, self.c_max), UniformSize(m_max), self.n_nodes)


@lru_cache(maxsize=None)
def _wd_entropy(pattern, config):
    return entropy_moments_full(CountVector(pattern), config, second=False).mean


@lru_cache(maxsize=None)
def _nsb_entropy(pattern, k_max):
    return baselines.nsb_large_z_entropy(CountVector(pattern), k_max)


def _entropy_estimate(name, counts, spec, joint):
    """One entropy estimate; ``joint`` selects the joint-space cutoffs in MI sweeps."""
    if name == "plugin":
        return baselines.plugin_entropy(counts)
    if name == "cae":
        return baselines.cae_entropy(counts)
    if name == "ansb":
        return baselines.asymptotic_nsb_entropy(counts)
    pattern = counts.pattern()
    if name == "nsb":
        return _nsb_entropy(pattern, spec.nsb_k_max if joint else spec.nsb_marginal_k_max)
    if name == "wd":
        return _wd_entropy(pattern, spec.wd_config(spec.m_max if joint else spec.marginal_m_max))
    raise ValueError(name)


def _estimate(name, counts, spec):
    if spec.target == "entropy":
        return _entropy_estimate(name, counts, spec, joint=True)
    table = np.asarray(counts.counts).reshape(spec.side, spec.side)
    hx = _entropy_estimate(name, CountVector(table.sum(axis=1)), spec, joint=False)
    hy = _entropy_estimate(name, CountVector(table.sum(axis=0)), spec, joint=False)
    hxy = _entropy_estimate(name, counts, spec, joint=True)
    return hx + hy - hxy


def run_replicate(spec, param, r):
    """Draw rho and counts for replicate r; return (truth, {estimator: value or None})."""
    seed = spec.seed + r
    rng = np.random.default_rng(seed)
    p = spec.generator(param, seed).sample(rng)
    counts = sample_counts(p, spec.N, rng)
    truth = float(entropy_of(p)) if spec.target == "entropy" else true_mi(p, (spec.side, spec.side))
    out = {}
    for name in spec.roster:
        try:
            out[name] = _estimate(name, counts, spec)
        except baselines.NoCoincidencesError:
            out[name] = None
    return truth, out


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list = field(default_factory=list)
    replicates: dict = field(default_factory=dict)  # param -> list of (truth, estimates)

    COLUMNS = ("sweep_param", "estimator", "rms", "n_success", "n_miss", "replicates", "base_seed")

    def rms(self, estimator, param):
        for row in self.rows:
            if row["estimator"] == estimator and row["sweep_param"] == param:
                return row["rms"]
        raise KeyError((estimator, param))

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.COLUMNS)
        for row in self.rows:
            writer.writerow([repr(row[k]) if isinstance(row[k], float) else row[k]
                             for k in self.COLUMNS])
        return buf.getvalue()


def _threads():
    raw = os.environ.get(THREADS_ENV)
    if raw:
        return max(1, int(raw))
    return os.cpu_count() or 1


def _grid_point(spec, param):
    return [run_replicate(spec, param, r) for r in range(spec.replicates)]


def run_sweep(spec):
    """RMS error of every rostered estimator at every grid point.

    An estimator that is undefined on a replicate (no coincidences) is counted
    as a miss and left out of that estimator's RMS.
    """
    params = list(spec.grid)
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(lambda prm: _grid_point(spec, prm), params))
    out = SweepResult(spec)
    for param, reps in zip(params, results):
        out.replicates[param] = reps
        for name in spec.roster:
            errs = [est[name] - truth for truth, est in reps if est[name] is not None]
            n_ok = len(errs)
            rms = math.sqrt(sum(e * e for e in errs) / n_ok) if n_ok else float("nan")
            out.rows.append({
                "sweep_param": param,
                "estimator": name,
                "rms": rms,
                "n_success": n_ok,
                "n_miss": spec.replicates - n_ok,
                "replicates": spec.replicates,
                "base_seed": spec.seed,
            })
    return out
