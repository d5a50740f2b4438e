"""Likelihood of the space size |Z|, its posterior, and the prior-variance maximizer."""

from dataclasses import dataclass
import math

import numpy as np

from .model import PointMassC, as_counts, log_G, InfeasibleModelError
from .quad import DEFAULT_NODES, TAIL_TOL, c_grid, size_chunks
from .specfun import ln_gamma, trigamma


def _pattern(n):
    """Distinct positive count values with multiplicities, plus N and M."""
    n = as_counts(n)
    vals, mult = np.unique(n.positive, return_counts=True)
    return vals, mult.astype(float), float(n.N), n.M


def loglik_kernel(vals, mult, N, M, c, m):
    """ln P(n | c, m) broadcast over arrays ``c`` and ``m``.

    Depends on the data only through the occupied counts, so bins that are
    empty contribute nothing beyond the total concentration.
    """
    c = np.asarray(c, dtype=float)
    a = c / np.asarray(m, dtype=float)
    out = ln_gamma(c) - ln_gamma(N + c)
    if M:
        out = out - M * ln_gamma(a)
        for v, k in zip(vals, mult):
            out = out + k * ln_gamma(v + a)
    return out


def log_likelihood_size(n, c, m):
    """ln[Gamma(c) / Gamma(c/m)^M * prod_i Gamma(n_i + c/m) / Gamma(N + c)]."""
    vals, mult, N, M = _pattern(n)
    m_arr = np.asarray(m)
    if np.any(m_arr < max(M, 1)):
        raise ValueError(f"m must be at least the observed support M={M}")
    if not c > 0:
        raise ValueError("c must be positive")
    out = loglik_kernel(vals, mult, N, M, c, m_arr)
    return float(out) if np.ndim(out) == 0 else out


def log_likelihood_size_marginal_c(n, m, c_prior, n_nodes=DEFAULT_NODES):
    """ln of the likelihood of m with c integrated against its prior."""
    vals, mult, N, M = _pattern(n)
    m_arr = np.atleast_1d(np.asarray(m))
    if np.any(m_arr < max(M, 1)):
        raise ValueError(f"m must be at least the observed support M={M}")
    grid = c_grid(c_prior, n_nodes)
    ll = loglik_kernel(vals, mult, N, M, grid.c[:, None], m_arr[None, :])
    out = _lse_cols(ll + grid.log_w[:, None])
    return float(out[0]) if np.ndim(m) == 0 else out


def _lse_cols(x):
    top = np.max(x, axis=0)
    return top + np.log(np.sum(np.exp(x - top), axis=0))


@dataclass
class SizePosterior:
    m: np.ndarray
    prob: np.ndarray
    mean: float
    map: int
    tail_bound: float = 0.0

    def rows(self):
        return list(zip(self.m.tolist(), self.prob.tolist()))


def size_posterior(n, c_spec, size_prior, n_nodes=DEFAULT_NODES, tol=TAIL_TOL):
    """Posterior over m given the counts, a c prior (or point mass) and a size prior."""
    vals, mult, N, M = _pattern(n)
    if not isinstance(c_spec, PointMassC) and not hasattr(c_spec, "c_min"):
        c_spec = PointMassC(float(c_spec))
    grid = c_grid(c_spec, n_nodes)
    ms_all, lp_all = [], []
    tail = 0.0
    for ms in size_chunks(size_prior, M):
        ll = loglik_kernel(vals, mult, N, M, grid.c[:, None], ms[None, :])
        ll = _lse_cols(ll + grid.log_w[:, None])
        lp = ll + size_prior.log_pmf(ms)
        ms_all.append(ms)
        lp_all.append(lp)
        if size_prior.upper is None:
            lp_cat = np.concatenate(lp_all)
            top = np.max(lp_cat)
            mass = np.sum(np.exp(lp_cat - top))
            tail = size_prior.tail(int(ms[-1])) * math.exp(np.max(ll) - top) / mass
            if tail < tol:
                break
    m = np.concatenate(ms_all)
    lp = np.concatenate(lp_all)
    if not np.any(np.isfinite(lp)):
        raise InfeasibleModelError("posterior over m has no mass")
    p = np.exp(lp - np.max(lp))
    p /= p.sum()
    return SizePosterior(m, p, float(np.dot(m, p)), int(m[np.argmax(p)]), tail)


def subset_log_likelihood(n, m, zhat_size, c):
    """Unnormalized ln P(n | m, Zhat) when Z is a uniformly random m-subset of Zhat."""
    n = as_counts(n)
    M = n.M
    if m < max(M, 1) or m > zhat_size:
        raise ValueError(f"need M={M} <= m <= |Zhat|={zhat_size}, got m={m}")
    top, k = zhat_size - M, m - M
    log_binom = (ln_gamma(top + 1.0) - ln_gamma(k + 1.0) - ln_gamma(top - k + 1.0))
    return float(log_binom) + log_G(n, c, m)


def subset_log_likelihood_normalized(n, m, zhat_size, c):
    """ln P(n | m, Zhat), normalized over datasets so it can be compared across m.

    The sum over datasets of binom(|Zhat| - M', m - M') G(n', c, m) equals
    binom(|Zhat|, m) G(0, c, m), so this is the unnormalized form minus both.
    """
    top = float(zhat_size)
    log_binom_all = ln_gamma(top + 1.0) - ln_gamma(m + 1.0) - ln_gamma(top - m + 1.0)
    log_g0 = m * ln_gamma(c / m) - ln_gamma(c)
    return subset_log_likelihood(n, m, zhat_size, c) - float(log_binom_all) - float(log_g0)


def prior_entropy_variance(c, m):
    """Prior variance of the entropy under a symmetric Dirichlet(c/m, ..., c/m)."""
    if m == 1:
        return 0.0
    a = c / m
    return (a + 1.0) / (c + 1.0) * trigamma(a + 1.0) - trigamma(c + 1.0)


_INFINITE_PROXY = 10 ** 6
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def c_max(m, lo=1e-4, hi=1e2, xtol=1e-7):
    """Concentration maximizing the prior entropy variance for m bins.

    ``m="infinite"`` is evaluated at m = 10**6.
    """
    if isinstance(m, str):
        if m.lower() not in ("inf", "infinite", "infinity"):
            raise ValueError(f"unrecognized m {m!r}")
        m = _INFINITE_PROXY
    if m < 2:
        raise ValueError("c_max needs m >= 2; the variance is identically zero otherwise")

    def f(u):
        return prior_entropy_variance(math.exp(u), m)

    # coarse scan in ln c to bracket the mode before golden-section refinement
    us = np.linspace(math.log(lo), math.log(hi), 121)
    vals = [f(u) for u in us]
    i = int(np.argmax(vals))
    a, b = us[max(i - 1, 0)], us[min(i + 1, len(us) - 1)]
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while math.exp(b) - math.exp(a) > xtol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
    return math.exp(0.5 * (a + b))
