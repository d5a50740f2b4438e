import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import digamma as sp_digamma, gammaln, polygamma

from bayesent.estimators import (
    EstimatorConfig,
    entropy_mean_fixed,
    entropy_mean_unknown_size,
    entropy_moments_full,
    entropy_second_moment_fixed,
    entropy_variance_fixed,
    fixed_size_marginal_c,
    mi_mean_fixed,
    mi_mean_full,
    multi_information,
    tsallis_mean_fixed,
)
from bayesent.likelihood import prior_entropy_variance
from bayesent.model import (
    ExponentialSize,
    GeometricSize,
    InfeasibleModelError,
    JointCountTable,
    LogUniformC,
    PointMassC,
    PointMassSize,
    UniformSize,
    marginalize,
)
from bayesent.simulate import (
    entropy_of,
    mc_posterior_oracle,
    mutual_information_of,
    sample_dirichlet_log,
)

FIG1 = [691, 232, 24, 17, 14, 10, 6, 6] + [0] * 92


def _harmonic_tail(m):
    return sum(1.0 / q for q in range(2, m + 1))


# ------------------------------------------------------------ fixed (c, m)


def test_entropy_single_bin():
    assert entropy_mean_fixed([7], 2.0, 1) == 0.0
    assert entropy_variance_fixed([7], 2.0, 1) == (0.0, 0.0)
    assert tsallis_mean_fixed([7], 2.0, 1, 2.0) == 0.0


@pytest.mark.parametrize("m", [2, 3, 10, 100, 1000])
def test_prior_mean_at_c_equals_m(m):
    assert entropy_mean_fixed([0] * 3, float(m), m) == pytest.approx(_harmonic_tail(m), abs=1e-10)


def test_entropy_small_example():
    assert entropy_mean_fixed([1], 1.0, 2) == pytest.approx(0.3862943611198906, abs=1e-13)
    # bins given explicitly or left implicit give the same answer
    assert entropy_mean_fixed([1, 0], 1.0, 2) == entropy_mean_fixed([1], 1.0, 2)


def test_entropy_mean_against_scipy_formula():
    n = np.array([5, 2, 2, 1, 0, 0, 0])
    c, m = 0.7, 7
    alpha = n + c / m
    A = alpha.sum()
    ref = np.sum(alpha / A * (sp_digamma(A + 1) - sp_digamma(alpha + 1)))
    assert entropy_mean_fixed(n, c, m) == pytest.approx(ref, abs=1e-13)


def _second_moment_reference(alpha):
    # independent double sum over bin pairs using scipy polygammas
    A = alpha.sum()
    t = polygamma(1, A + 2)
    total = 0.0
    for i, ai in enumerate(alpha):
        for j, aj in enumerate(alpha):
            if i == j:
                d = sp_digamma(ai + 2) - sp_digamma(A + 2)
                total += ai * (ai + 1) * (d * d + polygamma(1, ai + 2) - t)
            else:
                di = sp_digamma(ai + 1) - sp_digamma(A + 2)
                dj = sp_digamma(aj + 1) - sp_digamma(A + 2)
                total += ai * aj * (di * dj - t)
    return total / (A * (A + 1))


@pytest.mark.parametrize("n, c, m", [([3, 1], 2.0, 2), ([0, 0, 0], 0.5, 3),
                                     ([4, 0, 1, 1, 0], 10.0, 5), ([2, 1], 0.1, 6)])
def test_second_moment_against_pairwise_sum(n, c, m):
    counts = np.zeros(m)
    counts[:len(n)] = n
    _, m2 = entropy_second_moment_fixed(n, c, m)
    assert m2 == pytest.approx(_second_moment_reference(counts + c / m), abs=1e-12)


@pytest.mark.parametrize("c, m", [(1.0, 2), (0.3, 5), (5.0, 5), (2.0, 100), (1e3, 10)])
def test_variance_at_no_data_matches_prior_formula(c, m):
    _, var = entropy_variance_fixed([0], c, m)
    assert var == pytest.approx(prior_entropy_variance(c, m), abs=1e-10)


def test_variance_monte_carlo_example():
    mean, var = entropy_variance_fixed([3, 1], 2.0, 2)
    assert var == pytest.approx(0.019068, abs=5e-6)
    rng = np.random.default_rng(21)
    h = entropy_of(np.exp(sample_dirichlet_log(np.array([4.0, 2.0]), 1_000_000, rng)))
    dev2 = (h - h.mean()) ** 2
    assert abs(dev2.mean() - var) < 4 * dev2.std() / math.sqrt(len(h))
    assert abs(h.mean() - mean) < 4 * h.std() / math.sqrt(len(h))


def test_tsallis_examples():
    # q = 2 with no data: 1 - m E[p^2]
    for c, m in ((1.0, 4), (3.0, 2), (0.2, 10)):
        a = c / m
        expected = 1.0 - m * a * (a + 1) / (c * (c + 1))
        assert tsallis_mean_fixed([0], c, m, 2.0) == pytest.approx(expected, abs=1e-13)
    assert tsallis_mean_fixed([3, 1], 2.0, 2, 1.5) == pytest.approx(0.45487845487845486, abs=1e-13)


def test_tsallis_monte_carlo():
    mean, se = mc_posterior_oracle([3, 1], 2.0, 2, "tsallis:1.5", draws=400_000, seed=4)
    assert abs(tsallis_mean_fixed([3, 1], 2.0, 2, 1.5) - mean) < 4 * se


def test_tsallis_rejects_q_one():
    with pytest.raises(ValueError):
        tsallis_mean_fixed([1, 2], 1.0, 2, 1.0)
    with pytest.raises(ValueError):
        tsallis_mean_fixed([1, 2], 1.0, 2, -0.5)


def test_tsallis_approaches_shannon():
    n, c, m = [4, 1, 0], 1.5, 3
    assert tsallis_mean_fixed(n, c, m, 1.0 + 1e-6) == pytest.approx(entropy_mean_fixed(n, c, m), abs=1e-5)


def test_fixed_m_below_support():
    with pytest.raises(ValueError):
        entropy_mean_fixed([1, 1, 1], 1.0, 2)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(0, 40), min_size=1, max_size=12), st.floats(1e-3, 1e3),
       st.integers(0, 200), st.randoms(use_true_random=False))
def test_entropy_bounds_and_permutation(vals, c, extra, rnd):
    m = len(vals) + extra
    h = entropy_mean_fixed(vals, c, m)
    assert -1e-12 <= h <= math.log(m) + 1e-12
    shuffled = list(vals)
    rnd.shuffle(shuffled)
    assert entropy_mean_fixed(shuffled, c, m) == pytest.approx(h, abs=1e-12)
    mean, var = entropy_variance_fixed(vals, c, m)
    assert var >= 0.0


# ---------------------------------------------------------------- mixtures


def test_unknown_size_point_mass_exact():
    n = [5, 2, 1]
    est = entropy_mean_unknown_size(n, 1.3, PointMassSize(9))
    assert est.mean == entropy_mean_fixed(n, 1.3, 9)
    mean, m2 = entropy_second_moment_fixed(n, 1.3, 9)
    assert est.second_moment == m2


def test_unknown_size_convex_hull_fig1():
    est = entropy_mean_unknown_size(FIG1, 1.0, UniformSize(100))
    fixed = [entropy_mean_fixed(FIG1, 1.0, m) for m in range(8, 101)]
    assert min(fixed) <= est.mean <= max(fixed)
    assert est.n_size_terms == 93


def test_unknown_size_only_m_one():
    assert entropy_mean_unknown_size([1], 1.0, UniformSize(1)).mean == 0.0


def test_unknown_size_infeasible():
    with pytest.raises(InfeasibleModelError):
        entropy_mean_unknown_size([1, 1, 1], 1.0, UniformSize(2))


def test_unknown_size_exponential_matches_long_uniform_sum():
    n = [3, 2, 1]
    alpha = 0.05
    est = entropy_mean_unknown_size(n, 1.0, ExponentialSize(alpha))
    ms = np.arange(3, 3000)
    ll = np.array([gammaln(1.0) - 3 * gammaln(1.0 / m) + sum(gammaln(v + 1.0 / m) for v in n)
                   - gammaln(7.0) for m in ms]) - alpha * ms
    w = np.exp(ll - ll.max())
    h = np.array([entropy_mean_fixed(n, 1.0, m) for m in ms])
    assert est.mean == pytest.approx(np.dot(w, h) / w.sum(), abs=1e-10)
    assert est.tail_bound < 1e-12


def test_full_point_masses_reduce_exactly():
    n = [4, 0, 2, 1]
    cfg = EstimatorConfig(PointMassC(2.0), PointMassSize(6))
    est = entropy_moments_full(n, cfg)
    mean, var = entropy_variance_fixed(n, 2.0, 6)
    assert est.mean == mean
    assert est.variance == pytest.approx(var, abs=1e-15)
    assert est.n_c_nodes == 1 and est.n_size_terms == 1


def test_full_uniform_data_near_log8():
    n = [125] * 8 + [0] * 92
    est = entropy_moments_full(n, EstimatorConfig(LogUniformC(), UniformSize(100)))
    assert est.mean == pytest.approx(math.log(8), abs=0.35)
    assert est.variance >= 0


def test_full_single_fig3_case_in_range():
    rng = np.random.default_rng(0)
    p = np.exp(sample_dirichlet_log(np.full(100, 0.01), None, rng))
    counts = rng.multinomial(10, p / p.sum())
    est = entropy_moments_full(counts, EstimatorConfig())
    assert 0 <= est.mean <= math.log(10_000)


def test_full_tsallis_point_masses():
    cfg = EstimatorConfig(PointMassC(2.0), PointMassSize(2))
    est = entropy_moments_full([3, 1], cfg, functional=("tsallis", 1.5))
    assert est.mean == pytest.approx(tsallis_mean_fixed([3, 1], 2.0, 2, 1.5), abs=1e-15)
    assert est.second_moment is None


def test_full_geometric_prior_runs():
    est = entropy_moments_full([4, 3, 1], EstimatorConfig(LogUniformC(0.01, 100), GeometricSize(0.9, 500)))
    assert 0 < est.mean < math.log(500)


def _abc_oracle(n, c_lo, c_hi, m_max, proposals, seed):
    """Exact rejection sampler for E[H | n] and E[H^2 | n] under the (c, m) hyperprior.

    Data are simulated under the generative model and kept only when the count
    vector (positives in the first bins, zeros after) matches exactly.
    """
    rng = np.random.default_rng(seed)
    n = np.asarray(n)
    N, M = int(n.sum()), len(n)
    hs = []
    for m in range(max(M, 1), m_max + 1):
        c = np.exp(rng.uniform(math.log(c_lo), math.log(c_hi), proposals))
        alpha = np.repeat((c / m)[:, None], m, axis=1)
        p = np.exp(sample_dirichlet_log(alpha, None, rng))
        p /= p.sum(axis=1, keepdims=True)
        draws = rng.multinomial(N, p)
        target = np.zeros(m, dtype=int)
        target[:M] = n
        keep = np.all(draws == target, axis=1)
        hs.append(entropy_of(p[keep]))
    h = np.concatenate(hs)
    return h


def test_mixture_against_exact_rejection_sampling():
    n = [2, 1]
    h = _abc_oracle(n, 0.1, 10.0, 5, 600_000, seed=8)
    assert len(h) > 20_000
    est = entropy_moments_full(n, EstimatorConfig(LogUniformC(0.1, 10.0), UniformSize(5)))
    se = h.std() / math.sqrt(len(h))
    assert abs(h.mean() - est.mean) < 4 * se
    h2 = h * h
    assert abs(h2.mean() - est.second_moment) < 4 * h2.std() / math.sqrt(len(h))


def test_fixed_size_marginal_c_reductions():
    assert fixed_size_marginal_c([3, 1], 2, PointMassC(2.0)) == entropy_mean_fixed([3, 1], 2.0, 2)
    assert fixed_size_marginal_c([5], 1, LogUniformC()) == 0.0
    with pytest.raises(ValueError):
        fixed_size_marginal_c([1, 1, 1], 2, LogUniformC())


def test_fixed_size_marginal_c_fig1_monte_carlo():
    m = 100
    est = fixed_size_marginal_c(FIG1, m, LogUniformC(1e-3, 1e3))
    # oracle: posterior over c on a fine ln-c grid (scipy), then Dirichlet posterior draws
    pos = np.array([v for v in FIG1 if v > 0], dtype=float)
    u = np.linspace(math.log(1e-3), math.log(1e3), 20_001)
    c = np.exp(u)
    a = c / m
    ll = gammaln(c) - 8 * gammaln(a) + sum(gammaln(v + a) for v in pos) - gammaln(1000 + c)
    w = np.exp(ll - ll.max())
    w /= w.sum()
    rng = np.random.default_rng(17)
    idx = rng.choice(len(c), size=200_000, p=w)
    counts = np.array(FIG1, dtype=float)
    hs = []
    for chunk in np.array_split(idx, 20):
        alpha = counts[None, :] + a[chunk][:, None]
        hs.append(entropy_of(np.exp(sample_dirichlet_log(alpha, None, rng))))
    h = np.concatenate(hs)
    assert abs(h.mean() - est) < 4 * h.std() / math.sqrt(len(h))


def test_fixed_size_marginal_c_tsallis():
    v = fixed_size_marginal_c([3, 1], 2, PointMassC(2.0), functional=("tsallis", 1.5))
    assert v == pytest.approx(tsallis_mean_fixed([3, 1], 2.0, 2, 1.5), abs=1e-15)


# ----------------------------------------------------------- information


def test_mi_trivial_tables():
    assert mi_mean_fixed([[7]], 1.0) == 0.0
    # size priors confined to the declared 1 x 1 axes; c prior arbitrary
    for c_prior in (LogUniformC(), PointMassC(0.3)):
        cfg = EstimatorConfig(c_prior, UniformSize(1))
        assert mi_mean_full([[7]], cfg, cfg, cfg).mean == 0.0


def test_mi_independent_uniform_vanishes():
    vals = [abs(mi_mean_fixed([[k, k], [k, k]], 1.0)) for k in (10, 100, 1000, 10_000)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-4


def test_mi_diagonal_monte_carlo():
    table = np.array([[3, 0], [0, 3]])
    mean, se = mc_posterior_oracle(table.ravel(), 1.0, 4, mutual_information_of((2, 2)),
                                   draws=400_000, seed=2)
    assert abs(mi_mean_fixed(table, 1.0) - mean) < 4 * se


def test_mi_full_point_masses_equal_fixed():
    table = [[3, 1, 0], [0, 2, 4]]
    pc = PointMassC(1.5)
    est = mi_mean_full(table, EstimatorConfig(pc, PointMassSize(6)),
                       EstimatorConfig(pc, PointMassSize(2)), EstimatorConfig(pc, PointMassSize(3)))
    assert est.mean == pytest.approx(mi_mean_fixed(table, 1.5), abs=1e-14)


def test_mi_full_fig4_replicate_range():
    rng = np.random.default_rng(9)
    p = np.exp(sample_dirichlet_log(np.full(100, 0.01), None, rng))
    table = rng.multinomial(10, p / p.sum()).reshape(10, 10)
    marg = EstimatorConfig(LogUniformC(), UniformSize(100))
    est = mi_mean_full(table, EstimatorConfig(LogUniformC(), UniformSize(10_000)), marg, marg)
    assert math.isfinite(est.mean)
    assert abs(est.mean) < math.log(100)


def test_multi_information_two_way_matches_mi():
    table = [[3, 1], [0, 5]]
    cx = EstimatorConfig(LogUniformC(), UniformSize(4))
    cy = EstimatorConfig(LogUniformC(), UniformSize(5))
    cj = EstimatorConfig(LogUniformC(), UniformSize(30))
    assert multi_information(table, [cx, cy], cj).mean == mi_mean_full(table, cj, cx, cy).mean


def test_multi_information_concentrated_termwise():
    t = np.zeros((2, 3, 2), dtype=int)
    t[1, 2, 0] = 9
    table = JointCountTable(t)
    pc = PointMassC(1.0)
    cfgs = [EstimatorConfig(pc, PointMassSize(k)) for k in (2, 3, 2)]
    joint = EstimatorConfig(pc, PointMassSize(12))
    est = multi_information(table, cfgs, joint)
    terms = [entropy_mean_fixed(marginalize(table, i), 1.0, k) for i, k in enumerate((2, 3, 2))]
    assert est.extras["marginals"] == pytest.approx(terms, abs=1e-14)
    assert est.extras["joint"] == pytest.approx(entropy_mean_fixed(table.flat(), 1.0, 12), abs=1e-14)
    assert est.mean == pytest.approx(sum(terms) - est.extras["joint"], abs=1e-14)


def test_multi_information_three_way_independent_vanishes():
    pc = PointMassC(1.0)
    cfgs = [EstimatorConfig(pc, PointMassSize(2))] * 3
    joint = EstimatorConfig(pc, PointMassSize(8))
    vals = [abs(multi_information(np.full((2, 2, 2), k), cfgs, joint).mean) for k in (10, 1000, 100_000)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[-1] < 1e-5


def test_multi_information_config_count():
    with pytest.raises(ValueError):
        multi_information([[1, 2], [3, 4]], [EstimatorConfig()], EstimatorConfig())


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=4, max_size=4), st.integers(1, 5),
       st.integers(0, 2 ** 31 - 1))
def test_marginal_estimate_ignores_unseen_dimension(row_totals, ny, seed):
    # appending Y of any size, with counts spread arbitrarily, leaves E(H_X) unchanged
    n_x = np.array(row_totals)
    rng = np.random.default_rng(seed)
    table = np.array([rng.multinomial(t, np.full(ny, 1.0 / ny)) for t in n_x])
    cfg = EstimatorConfig(LogUniformC(0.01, 100), UniformSize(12), n_nodes=40)
    direct = entropy_moments_full(n_x, cfg)
    via_table = entropy_moments_full(marginalize(JointCountTable(table.reshape(4, ny)), 0), cfg)
    assert via_table.mean == direct.mean
    assert via_table.second_moment == direct.second_moment
