"""Count data, hyperprior types and the Dirichlet normalizer."""

from dataclasses import dataclass, field
import math
from pathlib import Path

import numpy as np

from .specfun import ln_gamma


class InfeasibleModelError(ValueError):
    """No admissible space size can explain the observed support."""


def _as_int_array(values, ndim=None):
    arr = np.asarray(values)
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)):
            raise ValueError("counts must be integers")
        arr = arr.astype(np.int64)
    elif arr.dtype.kind not in "iub":
        raise ValueError("counts must be integers")
    arr = arr.astype(np.int64)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"expected {ndim}-dimensional counts, got {arr.ndim}")
    if np.any(arr < 0):
        raise ValueError("counts must be non-negative")
    return arr


@dataclass(frozen=True)
class CountVector:
    """Histogram over labelled bins. Zeros are kept but do not count toward M."""

    counts: tuple

    def __init__(self, counts):
        arr = _as_int_array(counts, ndim=1)
        object.__setattr__(self, "counts", tuple(int(v) for v in arr))

    @property
    def N(self):
        return sum(self.counts)

    @property
    def M(self):
        return sum(1 for v in self.counts if v > 0)

    @property
    def positive(self):
        """The strictly positive counts as a float array."""
        return np.array([v for v in self.counts if v > 0], dtype=float)

    def pattern(self):
        """Sorted positive counts; every estimator depends on n only through this."""
        return tuple(sorted((v for v in self.counts if v > 0), reverse=True))

    def __len__(self):
        return len(self.counts)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.counts, dtype=dtype if dtype is not None else np.int64)


def as_counts(n):
    return n if isinstance(n, CountVector) else CountVector(n)


@dataclass(frozen=True, eq=False)
class JointCountTable:
    """Dense k-way (k >= 2) table of counts; ``counts[x, y, ...]``."""

    counts: np.ndarray

    def __init__(self, counts):
        arr = _as_int_array(counts)
        if arr.ndim < 2:
            raise ValueError("a joint table needs at least two axes")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "counts", arr)

    @property
    def dims(self):
        return tuple(self.counts.shape)

    @property
    def N(self):
        return int(self.counts.sum())

    @property
    def size(self):
        return int(self.counts.size)

    def flat(self):
        """The joint counts as one CountVector over prod(dims) bins."""
        return CountVector(self.counts.ravel())

    def __eq__(self, other):
        return isinstance(other, JointCountTable) and np.array_equal(self.counts, other.counts)

    __hash__ = None


def marginalize(table, axes):
    """Keep ``axes`` and sum out the rest.

    Returns a CountVector when one axis is kept, otherwise a JointCountTable
    whose axes appear in the order given.
    """
    if isinstance(axes, (int, np.integer)):
        axes = (int(axes),)
    axes = tuple(int(a) for a in axes)
    k = table.counts.ndim
    if not axes:
        raise ValueError("axes must be non-empty")
    if len(set(axes)) != len(axes) or any(a < 0 or a >= k for a in axes):
        raise ValueError(f"invalid axes {axes} for a {k}-way table")
    drop = tuple(a for a in range(k) if a not in axes)
    summed = table.counts.sum(axis=drop) if drop else table.counts
    kept = sorted(axes)
    summed = np.transpose(summed, [kept.index(a) for a in axes])
    if len(axes) == 1:
        return CountVector(summed)
    return JointCountTable(summed)


# ---------------------------------------------------------------- priors on c


@dataclass(frozen=True)
class PointMassC:
    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("concentration must be positive")


@dataclass(frozen=True)
class LogUniformC:
    """Density proportional to 1/c on [c_min, c_max]."""

    c_min: float = 1e-3
    c_max: float = 1e3

    def __post_init__(self):
        if not 0 < self.c_min < self.c_max:
            raise ValueError("need 0 < c_min < c_max")

    def pdf(self, c):
        c = np.asarray(c, dtype=float)
        inside = (c >= self.c_min) & (c <= self.c_max)
        with np.errstate(divide="ignore"):
            dens = 1.0 / (c * math.log(self.c_max / self.c_min))
        return np.where(inside, dens, 0.0)


# ------------------------------------------------------------ priors on |Z|


class _SizePrior:
    """Shared interface: ``log_pmf(m)`` over integer m >= 1 and ``upper`` bound."""

    upper = None  # None means unbounded support

    def log_pmf(self, m):
        raise NotImplementedError

    def pmf(self, m):
        return np.exp(self.log_pmf(m))

    def tail(self, m):
        """P(|Z| > m)."""
        raise NotImplementedError


@dataclass(frozen=True)
class PointMassSize(_SizePrior):
    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError("m must be a positive integer")

    @property
    def lower(self):
        return self.m

    @property
    def upper(self):
        return self.m

    def log_pmf(self, m):
        m = np.asarray(m)
        return np.where(m == self.m, 0.0, -np.inf)

    def tail(self, m):
        return 1.0 if m < self.m else 0.0


@dataclass(frozen=True)
class UniformSize(_SizePrior):
    """Uniform on 1..m_max."""

    m_max: int

    def __post_init__(self):
        if int(self.m_max) != self.m_max or self.m_max < 1:
            raise ValueError("m_max must be a positive integer")

    lower = 1

    @property
    def upper(self):
        return self.m_max

    def log_pmf(self, m):
        m = np.asarray(m)
        inside = (m >= 1) & (m <= self.m_max)
        return np.where(inside, -math.log(self.m_max), -np.inf)

    def tail(self, m):
        return max(0.0, (self.m_max - max(m, 0)) / self.m_max)


@dataclass(frozen=True)
class GeometricSize(_SizePrior):
    """P(m) proportional to gamma**m on 1..m_max."""

    gamma: float
    m_max: int

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if int(self.m_max) != self.m_max or self.m_max < 1:
            raise ValueError("m_max must be a positive integer")

    lower = 1

    @property
    def upper(self):
        return self.m_max

    @property
    def _log_norm(self):
        # sum_{m=1}^{K} g^m = g (1 - g^K) / (1 - g)
        lg = math.log(self.gamma)
        return lg + math.log(-math.expm1(self.m_max * lg)) - math.log1p(-self.gamma)

    def log_pmf(self, m):
        m = np.asarray(m)
        inside = (m >= 1) & (m <= self.m_max)
        return np.where(inside, m * math.log(self.gamma) - self._log_norm, -np.inf)

    def tail(self, m):
        if m >= self.m_max:
            return 0.0
        m = max(m, 0)
        g = self.gamma
        return (g ** m - g ** self.m_max) / (1.0 - g ** self.m_max)


@dataclass(frozen=True)
class ExponentialSize(_SizePrior):
    """P(m) proportional to exp(-alpha m) for m >= 1 (unbounded)."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    lower = 1
    upper = None

    def log_pmf(self, m):
        m = np.asarray(m)
        logp = math.log(-math.expm1(-self.alpha)) - self.alpha * (m - 1)
        return np.where(m >= 1, logp, -np.inf)

    def tail(self, m):
        return math.exp(-self.alpha * max(m, 0))


SIZE_PRIORS = (PointMassSize, UniformSize, GeometricSize, ExponentialSize)
C_PRIORS = (PointMassC, LogUniformC)


@dataclass(frozen=True)
class DirichletSpec:
    """Symmetric Dirichlet over m bins with total concentration c."""

    c: float
    m: int

    def __post_init__(self):
        if not self.c > 0 or self.m < 1:
            raise ValueError("need c > 0 and m >= 1")

    @property
    def per_bin(self):
        return self.c / self.m


@dataclass
class MomentEstimate:
    mean: float
    second_moment: float = None
    variance: float = None
    tail_bound: float = 0.0
    n_size_terms: int = 0
    n_c_nodes: int = 0
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.second_moment is not None and self.variance is None:
            self.variance = clamp_variance(self.second_moment - self.mean ** 2)


def clamp_variance(v, tol=1e-9):
    if v < 0:
        if v < -tol * max(1.0, abs(v)):
            raise ArithmeticError(f"negative variance {v:g}")
        return 0.0
    return v


def log_G(n, c, m):
    """ln of prod_z Gamma(n_z + c/m) / Gamma(N + c) over all m bins."""
    n = as_counts(n)
    M = n.M
    if m < max(M, 1):
        raise ValueError(f"m={m} is smaller than the observed support M={M}")
    a = c / m
    out = float(np.sum(ln_gamma(n.positive + a))) if M else 0.0
    if m > M:
        out += (m - M) * ln_gamma(a)
    return out - ln_gamma(n.N + c)


# -------------------------------------------------------------------- files


def _parse_int_token(tok, where):
    try:
        return int(tok)
    except ValueError:
        raise ValueError(f"{where}: not a non-negative integer: {tok!r}") from None


def read_counts(path):
    """Whitespace-separated non-negative integers."""
    text = Path(path).read_text(encoding="utf-8")
    vals = [_parse_int_token(t, path) for t in text.split()]
    if not vals:
        raise ValueError(f"{path}: no counts")
    return CountVector(vals)


def read_table(path):
    """CSV of non-negative integers, rows along the first axis."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        rows.append([_parse_int_token(t.strip(), f"{path}:{lineno}") for t in line.split(",")])
    if not rows:
        raise ValueError(f"{path}: empty table")
    if len({len(r) for r in rows}) != 1:
        raise ValueError(f"{path}: ragged rows")
    return JointCountTable(np.array(rows, dtype=np.int64))
