"""Reference entropy estimators used in the benchmark sweeps."""

import math

import numpy as np

from .likelihood import _pattern, loglik_kernel
from .estimators import _entropy_grid
from .model import as_counts
from .specfun import digamma, trigamma


class NoCoincidencesError(ValueError):
    """The coincidence-based estimator is undefined when every sample is distinct."""


def _require_data(n):
    n = as_counts(n)
    if n.N < 1:
        raise ValueError("estimator needs at least one sample")
    return n


def plugin_entropy(n):
    """Maximum-likelihood (plug-in) entropy in nats."""
    n = _require_data(n)
    p = n.positive / n.N
    return float(-np.sum(p * np.log(p)))


def cae_entropy(n):
    """Coverage-adjusted (Chao-Shen) entropy.

    Coverage is estimated as ``1 - f1/(N+1)`` so that an all-singleton sample
    still has positive coverage; each term is Horvitz-Thompson weighted by the
    probability that its bin was seen at all.
    """
    n = _require_data(n)
    N = n.N
    counts = n.positive
    f1 = float(np.sum(counts == 1))
    coverage = 1.0 - f1 / (N + 1.0)
    p = coverage * counts / N
    with np.errstate(divide="ignore"):
        # p == 1 (one bin holding every count) gives log1p(-1) = -inf, seen = 1
        seen = -np.expm1(N * np.log1p(-p))
    return float(-np.sum(p * np.log(p) / seen))


_NSB_LO = 1e-8
_NSB_DECADES_ABOVE_K = 4
_NSB_NODES = 400


def nsb_large_z_entropy(n, k_max, n_nodes=_NSB_NODES):
    """NSB estimate with the bin number fixed at a large ``k_max``.

    The mixing density over c makes the prior on entropy flat: it is the
    derivative of the prior mean entropy xi(c) = psi(c+1) - psi(c/K+1).
    """
    vals, mult, N, M = _pattern(n)
    if k_max < max(M, 1):
        raise ValueError(f"k_max={k_max} is below the observed support M={M}")
    if k_max == 1:
        return 0.0
    lo = math.log(_NSB_LO)
    hi = math.log(k_max) + _NSB_DECADES_ABOVE_K * math.log(10.0)
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    u = 0.5 * (hi + lo) + 0.5 * (hi - lo) * x
    c = np.exp(u)
    dxi = trigamma(c + 1.0) - trigamma(c / k_max + 1.0) / k_max
    logw = (np.log(w) + np.log(dxi * c)
            + loglik_kernel(vals, mult, float(N), M, c, float(k_max)))
    weights = np.exp(logw - np.max(logw))
    h = _entropy_grid(vals, mult, float(N), M, c, float(k_max))
    return float(np.dot(weights, h) / np.sum(weights))


def asymptotic_nsb_entropy(n):
    """Coincidence-based asymptotic NSB estimate.

    S = (C_gamma - ln 2) + 2 ln N - psi(Delta), with Delta = N - M the number
    of coincidences and C_gamma the Euler-Mascheroni constant. Valid to zeroth
    order in 1/N, for samples far from the well-sampled regime.
    """
    n = _require_data(n)
    delta = n.N - n.M
    if delta < 1:
        raise NoCoincidencesError("no coincidences in the sample")
    return float(np.euler_gamma - math.log(2.0) + 2.0 * math.log(n.N) - digamma(float(delta)))
