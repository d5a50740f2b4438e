"""Quadrature over the concentration c and truncated sums over the space size m."""

from dataclasses import dataclass
import math
from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp

from .model import InfeasibleModelError, LogUniformC, PointMassC

DEFAULT_NODES = 200
TAIL_TOL = 1e-12
CHUNK = 2048
MAX_M = 10 ** 9


@dataclass(frozen=True, eq=False)
class LogGrid:
    """Quadrature nodes in c with log-weights that sum (in linear space) to 1."""

    c: np.ndarray
    log_w: np.ndarray

    def __len__(self):
        return len(self.c)


def c_grid(prior, n_nodes=DEFAULT_NODES):
    """Gauss-Legendre nodes in u = ln c for a normalized prior on c."""
    if n_nodes < 1:
        raise ValueError("n_nodes must be >= 1")
    if isinstance(prior, PointMassC):
        return LogGrid(np.array([float(prior.c)]), np.array([0.0]))
    if not isinstance(prior, LogUniformC):
        raise TypeError(f"unsupported concentration prior {prior!r}")
    if n_nodes < 2:
        raise ValueError("a log-uniform prior needs at least 2 nodes")
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    lo, hi = math.log(prior.c_min), math.log(prior.c_max)
    u = 0.5 * (hi + lo) + 0.5 * (hi - lo) * x
    # density in u is flat, 1/(hi - lo); the Jacobian cancels it
    return LogGrid(np.exp(u), np.log(0.5 * w))


def log_sum_exp(terms):
    terms = np.asarray(terms, dtype=float)
    if terms.size == 0:
        raise ValueError("log_sum_exp of an empty sequence")
    return float(logsumexp(terms))


class SizeSum(NamedTuple):
    value: object  # float, or array when the payload is vector-valued
    tail_bound: float
    n_terms: int
    log_mass: float


def size_chunks(prior, M, chunk=CHUNK):
    """Yield consecutive integer arrays covering the admissible support of m."""
    lo = max(int(M), 1, int(getattr(prior, "lower", 1)))
    hi = prior.upper
    if hi is not None and hi < lo:
        raise InfeasibleModelError(
            f"size prior support ends at {hi}, below the {M} occupied bins")
    start = lo
    size = chunk
    while True:
        stop = start + size if hi is None else min(start + size, hi + 1)
        if stop > MAX_M:
            raise RuntimeError("size series failed to converge")
        yield np.arange(start, stop)
        if hi is not None and stop > hi:
            return
        start = stop
        if hi is None:
            size = min(size * 2, 1 << 20)


def size_sum(prior, M, term, tol=TAIL_TOL):
    """Normalized mixture over m of ``payload(m)`` with weights P(m) exp(logw(m)).

    ``term(m)`` receives an integer array and returns ``(logw, payload)``;
    payload may carry trailing dimensions. Unbounded priors are summed until
    the prior tail past the last term, scaled by the largest weight in the last
    chunk, falls below ``tol`` of the accumulated mass.
    """
    ref = -np.inf
    mass = 0.0
    acc = None
    n_terms = 0
    tail = 0.0
    for ms in size_chunks(prior, M):
        logw, payload = term(ms)
        logw = np.asarray(logw, dtype=float) + prior.log_pmf(ms)
        payload = np.asarray(payload, dtype=float)
        n_terms += len(ms)
        top = np.max(logw)
        if top > ref:
            if np.isfinite(ref):
                scale = math.exp(ref - top)
                mass *= scale
                acc = acc * scale
            ref = top
        if np.isfinite(ref):
            w = np.exp(logw - ref)
            w_b = w.reshape(w.shape + (1,) * (payload.ndim - 1))
            chunk_acc = np.sum(w_b * np.where(w_b > 0, payload, 0.0), axis=0)
            mass += float(np.sum(w))
            acc = chunk_acc if acc is None else acc + chunk_acc
        if prior.upper is None and mass > 0:
            # weights are non-increasing in m past the support, so the last
            # chunk's largest weight bounds every term beyond it
            last = int(ms[-1])
            lw_tail = float(np.max(logw - prior.log_pmf(ms)))
            tail = prior.tail(last) * math.exp(lw_tail - ref) / mass
            if tail < tol:
                break
    if acc is None or mass == 0:
        raise InfeasibleModelError("no admissible space size has positive weight")
    value = acc / mass
    if np.ndim(value) == 0:
        value = float(value)
    return SizeSum(value, tail, n_terms, ref + math.log(mass))
