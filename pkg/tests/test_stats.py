import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special, stats

from mvspectest.stats import (ProcessGrid, _cvm_ks_from_grid, adj_mdj, bai_chen_combos, cvm_d2,
                              cvm_pairwise, d1_stats, d2_stats, dp_stats, ks_d2, lag_pairs, patton_s,
                              statistic_set, v2_eval)

pit_lists = st.lists(st.floats(0.0, 1.0), min_size=3, max_size=25)


def ks_bruteforce(a, b):
    """Exact sup of |N(r) - m r1 r2| / sqrt(m) over the unit square, by enumeration.

    The count function is piecewise constant on a rectangular grid, so the
    supremum is a limit at a grid vertex; all four one-sided limits of the
    count are evaluated at every vertex.
    """
    a, b = np.asarray(a), np.asarray(b)
    m = a.size
    best = 0.0
    for x in np.unique(np.r_[0.0, 1.0, a]):
        for y in np.unique(np.r_[0.0, 1.0, b]):
            for ca, cb in itertools.product((a <= x, a < x), (b <= y, b < y)):
                best = max(best, abs(np.count_nonzero(ca & cb) - m * x * y))
    return best / np.sqrt(m)


def v2_on_grid(u, j, k):
    cur, lag = lag_pairs(u, j)
    g = np.linspace(0, 1, k)
    n1 = (cur[None, :] <= g[:, None]).astype(float)
    n2 = (lag[None, :] <= g[:, None]).astype(float)
    counts = n1 @ n2.T
    m = cur.size
    return (counts - m * np.outer(g, g)) / np.sqrt(m)


# --- v2_eval --------------------------------------------------------------------------------

def test_v2_example():
    assert v2_eval([0.2, 0.4, 0.6, 0.8], 1, (0.5, 0.5)) == pytest.approx((1 - 3 * 0.25) / np.sqrt(3), abs=1e-12)
    assert v2_eval([0.2, 0.4, 0.6, 0.8], 1, (0.5, 0.5)) == pytest.approx(0.14434, abs=1e-5)


@given(pit_lists)
def test_v2_vanishes_at_corners(u):
    assert v2_eval(u, 1, (0.0, 0.0)) == pytest.approx(0.0, abs=1e-12) or min(u) == 0.0
    assert v2_eval(u, 1, (1.0, 1.0)) == pytest.approx(0.0, abs=1e-12)


def test_v2_mean_zero_under_uniform():
    rng = np.random.default_rng(7)
    vals = np.array([v2_eval(rng.random(40), 2, (0.3, 0.7)) for _ in range(10_000)])
    assert abs(vals.mean()) <= 3 * vals.std() / 100


def test_v2_errors():
    with pytest.raises(ValueError):
        v2_eval([0.5], 1, (0.5, 0.5))
    with pytest.raises(ValueError):
        v2_eval([0.5, 0.2], 0, (0.5, 0.5))


# --- two-parameter functionals ---------------------------------------------------------------

def test_single_pair_examples():
    assert cvm_d2([0.5, 0.5], 1) == pytest.approx(0.25 - 2 * 9 / 64 + 1 / 9, abs=1e-12)
    assert cvm_d2([0.5, 0.5], 1) == pytest.approx(0.079861, abs=1e-6)
    assert ks_d2([0.5, 0.5], 1) == pytest.approx(0.75, abs=1e-12)


def test_cvm_single_pair_against_pairwise_form():
    assert cvm_pairwise([[0.5, 0.5]]) == pytest.approx(0.25 - 2 * 9 / 64 + 1 / 9, abs=1e-12)


def test_degenerate_inputs_are_finite():
    for u in ([1.0] * 6, [0.0] * 6, [0.0, 1.0] * 3):
        c, k = d2_stats(u, 1)
        assert np.isfinite(c) and np.isfinite(k) and c >= 0 and k >= 0


@settings(max_examples=150, deadline=None)
@given(pit_lists, st.integers(1, 2))
def test_ks_matches_bruteforce(u, j):
    if len(u) <= j:
        return
    cur, lag = lag_pairs(u, j)
    assert ks_d2(u, j) == pytest.approx(ks_bruteforce(cur, lag), abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.sampled_from([0.0, 0.1, 0.25, 0.5, 0.75, 1.0]), min_size=3, max_size=20))
def test_ks_matches_bruteforce_with_ties(u):
    cur, lag = lag_pairs(u, 1)
    assert ks_d2(u, 1) == pytest.approx(ks_bruteforce(cur, lag), abs=1e-12)
    assert cvm_d2(u, 1) == pytest.approx(cvm_pairwise(np.column_stack([cur, lag])), abs=1e-10)


@settings(max_examples=150, deadline=None)
@given(pit_lists, st.integers(1, 2))
def test_cvm_matches_pairwise_closed_form(u, j):
    if len(u) <= j:
        return
    cur, lag = lag_pairs(u, j)
    assert cvm_d2(u, j) == pytest.approx(cvm_pairwise(np.column_stack([cur, lag])), rel=1e-9, abs=1e-12)


def test_ks_dominates_grid_and_probes(rng):
    u = (np.arange(1, 61) - 0.5) / 60
    assert ks_d2(u, 1) >= np.abs(v2_on_grid(u, 1, 200)).max()
    for _ in range(5):
        u = rng.random(80)
        ks = ks_d2(u, 1)
        assert ks >= np.abs(v2_on_grid(u, 1, 200)).max() - 1e-12
        for r in rng.random((200, 2)):
            assert ks >= abs(v2_eval(u, 1, r)) - 1e-12


def test_cvm_matches_monte_carlo_integration():
    rng = np.random.default_rng(123)
    for _ in range(20):
        u = rng.random(30)
        cur, lag = lag_pairs(u, 1)
        r = rng.random((100_000, 2))
        counts = ((cur[None, :] <= r[:, :1]) & (lag[None, :] <= r[:, 1:])).sum(axis=1)
        v2 = (counts - cur.size * r[:, 0] * r[:, 1]) ** 2 / cur.size
        se = v2.std(ddof=1) / np.sqrt(v2.size)
        assert abs(cvm_d2(u, 1) - v2.mean()) <= 3 * se + 1e-12


def test_grid_invariants(rng):
    a, b = rng.random(50), rng.random(50)
    a[:5] = b[:5] = 1.0
    g = ProcessGrid(a, b)
    assert g.cell_counts().sum() == 50
    assert np.all(np.diff(g.r1_breaks) > 0) and np.all(np.diff(g.r2_breaks) > 0)
    assert g.r1_breaks[0] == 0.0 and g.r1_breaks[-1] == 1.0


def test_blocked_evaluation_matches_single_block(monkeypatch, rng):
    import mvspectest.stats as s
    u = rng.random(300)
    full = d2_stats(u, 1)
    monkeypatch.setattr(s, "_BLOCK_CELLS", 1000)
    assert d2_stats(u, 1) == pytest.approx(full, rel=1e-12)


def test_duplicated_points_scale_as_predicted(rng):
    a, b = rng.random(40), rng.random(40)
    c1, k1 = _cvm_ks_from_grid(ProcessGrid(a, b))
    c2, k2 = _cvm_ks_from_grid(ProcessGrid(np.tile(a, 2), np.tile(b, 2)))
    assert c2 == pytest.approx(2 * c1, rel=1e-10)
    assert k2 == pytest.approx(np.sqrt(2) * k1, rel=1e-10)
    u = rng.random(40)
    assert d1_stats(np.repeat(u, 2))[0] == pytest.approx(2 * d1_stats(u)[0], rel=1e-10)
    assert d1_stats(np.repeat(u, 2))[1] == pytest.approx(np.sqrt(2) * d1_stats(u)[1], rel=1e-10)


@pytest.mark.slow
def test_null_percentile_reproducible_across_seeds():
    q = []
    for seed in (1, 2):
        rng = np.random.default_rng(seed)
        q.append(np.quantile([cvm_d2(rng.random(200), 1) for _ in range(5000)], 0.95))
    assert abs(q[0] - q[1]) / np.mean(q) <= 0.02


# --- one-parameter process ------------------------------------------------------------------

def test_d1_examples():
    assert d1_stats([0.5])[1] == pytest.approx(0.5)
    n = 10
    u = (2 * np.arange(1, n + 1) - 1) / (2 * n)
    assert d1_stats(u)[0] == pytest.approx(1 / (12 * n))
    with pytest.raises(ValueError):
        d1_stats([])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.001, 0.999), min_size=2, max_size=40))
def test_d1_matches_scipy(u):
    n = len(u)
    cvm, ks = d1_stats(u)
    assert ks == pytest.approx(np.sqrt(n) * stats.kstest(u, "uniform").statistic, abs=1e-12)
    assert cvm == pytest.approx(stats.cramervonmises(u, "uniform").statistic, abs=1e-10)


def test_d1_kolmogorov_percentile():
    rng = np.random.default_rng(99)
    ks = [d1_stats(rng.random(500))[1] for _ in range(2000)]
    assert abs(np.quantile(ks, 0.95) - 1.36) <= 0.05


def test_shuffle_invariance_of_d1_only(rng):
    x = np.zeros(300)
    for t in range(1, 300):
        x[t] = 0.8 * x[t - 1] + rng.standard_normal()
    u = special.ndtr(x / x.std())
    base_d1 = d1_stats(u)
    base_d2 = d2_stats(u, 1)
    changed = False
    for _ in range(10):
        v = rng.permutation(u)
        assert d1_stats(v) == base_d1
        changed |= d2_stats(v, 1) != base_d2
    assert changed


# --- p-parameter and aggregates -------------------------------------------------------------

def test_dp_stats_reduces_and_matches_pairwise(rng):
    u = rng.random(30)
    assert dp_stats(u, 1) == d1_stats(u)
    assert dp_stats(u, 2) == d2_stats(u, 1)
    c3, k3 = dp_stats(u, 3)
    tuples = np.column_stack([u[2:], u[1:-1], u[:-2]])
    assert c3 == pytest.approx(cvm_pairwise(tuples))
    assert k3 >= 0


def test_adj_mdj_composition():
    u = [0.2, 0.4, 0.6, 0.8, 0.1]
    out = adj_mdj(u, 2)
    assert out["ADJ_1"] == cvm_d2(u, 1)
    assert out["ADJ_2"] == pytest.approx(cvm_d2(u, 1) + cvm_d2(u, 2))
    assert out["MDJ_2"] == max(ks_d2(u, 1), ks_d2(u, 2))
    d1c, d1k = d1_stats(u)
    assert out["ADJ0_2"] == pytest.approx(d1c + out["ADJ_2"])
    assert out["MDJ0_2"] == max(d1k, out["MDJ_2"]) >= d1k
    with pytest.raises(ValueError):
        adj_mdj(u, 5)


def test_bai_chen_examples(rng):
    mx, sm, pool = bai_chen_combos([0.1, 0.9, 0.1, 0.9], 2)
    # each coordinate subsequence has two points, sup |V_1| = sqrt(2) * 0.9
    assert mx == pytest.approx(np.sqrt(2) * 0.9, abs=1e-12)
    assert mx == pytest.approx(1.2728, abs=1e-4)
    assert sm == pytest.approx(d1_stats([0.1, 0.1])[1] + d1_stats([0.9, 0.9])[1])
    assert pool == d1_stats([0.1, 0.9, 0.1, 0.9])[1]
    u = rng.random(20)
    assert bai_chen_combos(u, 1) == (d1_stats(u)[1],) * 3
    with pytest.raises(ValueError):
        bai_chen_combos(rng.random(5), 2)


@given(st.lists(st.floats(0, 1), min_size=2, max_size=30).filter(lambda v: len(v) % 2 == 0))
def test_bai_chen_pool_is_d1_ks(u):
    assert bai_chen_combos(u, 2)[2] == d1_stats(u)[1]


def test_patton_examples(rng):
    u = rng.random(12)
    assert patton_s(u, 1) == d1_stats(u)
    c, k = patton_s([0.5, 0.5], 2)
    assert c == pytest.approx(0.079861, abs=1e-6) and k == pytest.approx(0.75)
    rows = rng.random((15, 2))
    c, k = patton_s(rows.ravel(), 2)
    assert c == pytest.approx(cvm_pairwise(rows))
    assert k == pytest.approx(ks_bruteforce(rows[:, 0], rows[:, 1]), abs=1e-12)
    rows3 = rng.random((10, 3))
    assert patton_s(rows3.ravel(), 3)[0] == pytest.approx(cvm_pairwise(rows3))


def test_patton_cvm_matches_monte_carlo():
    rng = np.random.default_rng(5)
    rows = rng.random((25, 2))
    r = rng.random((100_000, 2))
    counts = ((rows[None, :, 0] <= r[:, :1]) & (rows[None, :, 1] <= r[:, 1:])).sum(axis=1)
    v = (counts - 25 * r[:, 0] * r[:, 1]) ** 2 / 25
    assert abs(patton_s(rows.ravel(), 2)[0] - v.mean()) <= 3 * v.std(ddof=1) / np.sqrt(v.size)


# --- statistic_set ---------------------------------------------------------------------------

def test_statistic_set_contents_and_invariants(rng):
    u = rng.random(200)
    s = statistic_set(u, 2, k_max=2)
    for key in ("D1_CvM", "D1_KS", "D2_1_CvM", "D2_2_KS", "ADJ_2", "MDJ0_2", "LBQ_1", "LBQ_25",
                "JB", "BC_max", "BC_sum", "BC_pool", "S_CvM", "S_KS"):
        assert key in s
    assert all(v >= 0 for v in s.values())
    assert s["ADJ0_2"] == pytest.approx(s["D1_CvM"] + s["ADJ_2"])
    assert s["MDJ0_2"] == max(s["D1_KS"], s["MDJ_2"])
    assert s["BC_pool"] == s["D1_KS"]


def test_statistic_set_name_filter(rng):
    u = rng.random(50)
    s = statistic_set(u, 2, names=["D2_1_CvM", "JB"])
    assert set(s) == {"D2_1_CvM", "JB"}
    assert s["D2_1_CvM"] == cvm_d2(u, 1)
    with pytest.raises(ValueError):
        statistic_set(u, 2, names=["nonsense"])
