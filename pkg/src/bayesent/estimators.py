"""Posterior moments of entropy, Tsallis entropy, mutual and multi-information.

Every estimator depends on the counts only through the multiset of positive
entries, the total N and the number M of occupied bins; empty bins of an
m-bin space are handled in closed form as one group of ``m - M`` identical
Dirichlet parameters ``c/m``.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .likelihood import _pattern, loglik_kernel
from .model import (
    JointCountTable,
    MomentEstimate,
    PointMassC,
    PointMassSize,
    UniformSize,
    LogUniformC,
    as_counts,
    clamp_variance,
    marginalize,
)
from .quad import DEFAULT_NODES, c_grid, size_sum
from .specfun import digamma, ln_gamma, trigamma


@dataclass(frozen=True)
class EstimatorConfig:
    """Independent priors on c and |Z|; the product form is what makes them IUV-safe."""

    c_prior: object = field(default_factory=LogUniformC)
    size_prior: object = field(default_factory=lambda: UniformSize(10_000))
    n_nodes: int = DEFAULT_NODES


def _check_m(M, m):
    if m < max(M, 1):
        raise ValueError(f"m={m} is smaller than the observed support M={M}")


def _groups(vals, mult, M, a, m):
    """(alpha, multiplicity) pairs: occupied count values, then the empty bins."""
    out = [(v + a, k) for v, k in zip(vals, mult)]
    out.append((a, np.asarray(m, dtype=float) - M))
    return out


def _entropy_grid(vals, mult, N, M, c, m, second=False):
    """E(H) and optionally E(H^2) for fixed (c, m), broadcast over c and m."""
    c = np.asarray(c, dtype=float)
    a = c / np.asarray(m, dtype=float)
    A = N + c
    psi_A1 = digamma(A + 1.0)
    groups = _groups(vals, mult, M, a, m)
    mean = 0.0
    for alpha, k in groups:
        mean = mean + k * alpha * (psi_A1 - digamma(alpha + 1.0))
    mean = mean / A
    if not second:
        return mean
    psi_A2 = digamma(A + 2.0)
    t = trigamma(A + 2.0)
    s1 = s2 = p2 = d = 0.0
    for alpha, k in groups:
        ga = digamma(alpha + 1.0) - psi_A2
        g2 = digamma(alpha + 2.0) - psi_A2
        b = g2 * g2 + trigamma(alpha + 2.0) - t
        s1 = s1 + k * alpha * ga
        s2 = s2 + k * (alpha * ga) ** 2
        p2 = p2 + k * alpha * alpha
        d = d + k * alpha * (alpha + 1.0) * b
    m2 = (s1 * s1 - s2 - t * (A * A - p2) + d) / (A * (A + 1.0))
    return mean, m2


def _tsallis_grid(vals, mult, N, M, c, m, q):
    """E[(1 - sum_i p_i^q) / (q - 1)] for fixed (c, m)."""
    c = np.asarray(c, dtype=float)
    a = c / np.asarray(m, dtype=float)
    A = N + c
    base = ln_gamma(A) - ln_gamma(A + q)
    total = 0.0
    for alpha, k in _groups(vals, mult, M, a, m):
        total = total + k * np.exp(ln_gamma(alpha + q) - ln_gamma(alpha) + base)
    return (1.0 - total) / (q - 1.0)


def _check_q(q):
    if not q > 0 or q == 1:
        raise ValueError("Tsallis index must satisfy q > 0, q != 1 (use Shannon entropy at q = 1)")


# ---------------------------------------------------------------- fixed (c, m)


def entropy_mean_fixed(n, c, m):
    """Posterior mean entropy (nats) for a symmetric Dirichlet(c/m) prior on m bins."""
    vals, mult, N, M = _pattern(n)
    _check_m(M, m)
    if m == 1:
        return 0.0
    return float(_entropy_grid(vals, mult, N, M, c, m))


def entropy_second_moment_fixed(n, c, m):
    vals, mult, N, M = _pattern(n)
    _check_m(M, m)
    if m == 1:
        return 0.0, 0.0
    mean, m2 = _entropy_grid(vals, mult, N, M, c, m, second=True)
    return float(mean), float(m2)


def entropy_variance_fixed(n, c, m):
    """(mean, variance) of the posterior entropy at fixed (c, m)."""
    mean, m2 = entropy_second_moment_fixed(n, c, m)
    return mean, clamp_variance(m2 - mean * mean)


def tsallis_mean_fixed(n, c, m, q):
    _check_q(q)
    vals, mult, N, M = _pattern(n)
    _check_m(M, m)
    if m == 1:
        return 0.0
    return float(_tsallis_grid(vals, mult, N, M, c, m, q))


# --------------------------------------------------------------- mixtures


def _payload_fn(functional, second):
    if functional in (None, "entropy"):
        if second:
            def payload(vals, mult, N, M, c, m):
                mean, m2 = _entropy_grid(vals, mult, N, M, c, m, second=True)
                return np.stack(np.broadcast_arrays(mean, m2), axis=-1)
        else:
            def payload(vals, mult, N, M, c, m):
                return _entropy_grid(vals, mult, N, M, c, m)[..., None]
        return payload
    kind, q = _parse_functional(functional)
    _check_q(q)

    def payload(vals, mult, N, M, c, m):
        return _tsallis_grid(vals, mult, N, M, c, m, q)[..., None]
    return payload


def _parse_functional(functional):
    if isinstance(functional, tuple) and functional[0] == "tsallis":
        return "tsallis", float(functional[1])
    if isinstance(functional, str) and functional.startswith("tsallis"):
        return "tsallis", float(functional.split(":", 1)[1])
    raise ValueError(f"unknown functional {functional!r}")


def _mixture(n, c_prior, size_prior, n_nodes, payload):
    """Average ``payload`` over the joint posterior of (c, m)."""
    vals, mult, N, M = _pattern(n)
    grid = c_grid(c_prior, n_nodes)
    cc = grid.c[:, None]
    lw_c = grid.log_w[:, None]

    def term(ms):
        mm = ms[None, :].astype(float)
        ll = loglik_kernel(vals, mult, N, M, cc, mm) + lw_c
        top = np.max(ll, axis=0)
        w = np.exp(ll - top)
        norm = w.sum(axis=0)
        pay = payload(vals, mult, N, M, cc, mm)
        pay = np.where((mm == 1)[..., None], 0.0, pay)
        avg = np.einsum("cm,cmp->mp", w, pay) / norm[:, None]
        return top + np.log(norm), avg

    res = size_sum(size_prior, M, term)
    return res, len(grid)


def entropy_mean_unknown_size(n, c, size_prior):
    """Posterior entropy moments at fixed c with the space size m marginalized."""
    n = as_counts(n)
    res, _ = _mixture(n, PointMassC(c), size_prior, 1, _payload_fn("entropy", True))
    mean, m2 = res.value
    return MomentEstimate(mean, m2, tail_bound=res.tail_bound, n_size_terms=res.n_terms,
                          n_c_nodes=1)


def entropy_moments_full(n, config, functional="entropy", second=True):
    """Posterior moments with both c and m integrated against ``config``'s priors.

    ``functional`` is ``"entropy"`` or ``("tsallis", q)``; the second moment is
    only available for Shannon entropy.
    """
    n = as_counts(n)
    shannon = functional in (None, "entropy")
    second = second and shannon
    res, nodes = _mixture(n, config.c_prior, config.size_prior, config.n_nodes,
                          _payload_fn(functional, second))
    if second:
        mean, m2 = res.value
    else:
        mean, m2 = res.value[0], None
    return MomentEstimate(float(mean), None if m2 is None else float(m2),
                          tail_bound=res.tail_bound, n_size_terms=res.n_terms, n_c_nodes=nodes)


def fixed_size_marginal_c(n, m, c_prior, functional="entropy", n_nodes=DEFAULT_NODES):
    """E(Q | n, |Z| = m) with c integrated against ``c_prior``."""
    n = as_counts(n)
    _check_m(n.M, m)
    if m == 1:
        return 0.0
    res, _ = _mixture(n, c_prior, PointMassSize(m), n_nodes, _payload_fn(functional, False))
    return float(res.value[0])


# ----------------------------------------------------------- information


def _as_table(table):
    return table if isinstance(table, JointCountTable) else JointCountTable(table)


def mi_mean_fixed(table, c):
    """E(I(X;Y) | n, c) from three fixed-c entropies over |X|, |Y| and |X||Y| bins."""
    table = _as_table(table)
    if table.counts.ndim != 2:
        raise ValueError("mutual information needs a 2-way table")
    nx, ny = table.dims
    hx = entropy_mean_fixed(marginalize(table, 0), c, nx)
    hy = entropy_mean_fixed(marginalize(table, 1), c, ny)
    hxy = entropy_mean_fixed(table.flat(), c, nx * ny)
    return hx + hy - hxy


def mi_mean_full(table, config_joint, config_x, config_y):
    """E(I(X;Y) | n) under independent hyperpriors for the three spaces.

    Only the first moment: the cross terms of the second moment do not reduce
    to single-space entropies.
    """
    table = _as_table(table)
    if table.counts.ndim != 2:
        raise ValueError("mutual information needs a 2-way table")
    return multi_information(table, [config_x, config_y], config_joint)


def multi_information(table, axis_configs, joint_config):
    """sum_i E(H(X_i)) - E(H(X_1, ..., X_k)), each term a full mixture estimate."""
    table = _as_table(table)
    k = table.counts.ndim
    if len(axis_configs) != k:
        raise ValueError(f"need {k} per-axis configs, got {len(axis_configs)}")
    terms = [entropy_moments_full(marginalize(table, i), cfg, second=False).mean
             for i, cfg in enumerate(axis_configs)]
    joint = entropy_moments_full(table.flat(), joint_config, second=False)
    est = MomentEstimate(sum(terms) - joint.mean, tail_bound=joint.tail_bound,
                         n_size_terms=joint.n_size_terms, n_c_nodes=joint.n_c_nodes)
    est.extras.update(marginals=terms, joint=joint.mean)
    return est
