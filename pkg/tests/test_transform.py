import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from mvspectest.transform import (ConditionalFactor, FactorArray, NotPositiveDefiniteError,
                                  bivariate_normal_factors, factor_arrays, multivariate_normal_factors,
                                  multivariate_t_factors, normal_scores, pit_step, rosenblatt)


def t_density(x, nu):
    """Student-t density written out by hand, for the quadrature oracle."""
    c = math.exp(math.lgamma((nu + 1) / 2) - math.lgamma(nu / 2)) / math.sqrt(nu * math.pi)
    return c * (1 + x * x / nu) ** (-(nu + 1) / 2)


def bivariate_t_density(y1, y2, nu, sigma):
    inv = np.linalg.inv(sigma)
    y = np.array([y1, y2])
    return (1 + y @ inv @ y / nu) ** (-(nu + 2) / 2)


# --- pit_step -------------------------------------------------------------------------------

def test_pit_at_location_is_half():
    assert pit_step(3.2, ConditionalFactor("normal", 3.2, 0.7)) == 0.5
    for nu in (1.0, 2.5, 30.0):
        assert pit_step(-1.0, ConditionalFactor("student_t", -1.0, 2.0, nu)) == pytest.approx(0.5, abs=1e-15)


def test_normal_cdf_matches_erf_oracle():
    oracle = 0.5 * (1 + math.erf(1 / math.sqrt(2)))
    assert oracle == pytest.approx(0.841345, abs=1e-6)
    got = pit_step(2.5 + 1.0, ConditionalFactor("normal", 2.5, 1.0))
    assert abs(got - oracle) <= 1e-12
    for x in np.linspace(-6, 6, 25):
        assert abs(pit_step(x, ConditionalFactor("normal", 0.0, 1.0))
                   - 0.5 * (1 + math.erf(x / math.sqrt(2)))) <= 1e-12


@pytest.mark.parametrize("nu", [1.0, 3.0, 5.0, 7.5, 40.0])
@pytest.mark.parametrize("x", [-4.0, -1.3, 0.2, 2.0, 6.0])
def test_t_cdf_matches_quadrature_of_density(nu, x):
    tail, _ = integrate.quad(t_density, -np.inf, x, args=(nu,), epsabs=1e-14, epsrel=1e-13)
    assert abs(pit_step(x, ConditionalFactor("student_t", 0.0, 1.0, nu)) - tail) <= 1e-10


def test_pit_is_clamped_and_rejects_nonfinite():
    f = ConditionalFactor("normal", 0.0, 1.0)
    assert pit_step(-50.0, f) == 1e-15
    assert pit_step(50.0, f) == 1 - 1e-15
    with pytest.raises(ValueError):
        pit_step(np.nan, f)
    with pytest.raises(ValueError):
        pit_step(np.inf, f)


def test_invalid_factors_rejected():
    with pytest.raises(ValueError):
        ConditionalFactor("normal", 0.0, 0.0)
    with pytest.raises(ValueError):
        ConditionalFactor("student_t", 0.0, 1.0, None)
    with pytest.raises(ValueError):
        ConditionalFactor("student_t", 0.0, 1.0, -2.0)
    with pytest.raises(ValueError):
        ConditionalFactor("laplace", 0.0, 1.0)


finite = st.floats(-20, 20, allow_nan=False)
scales = st.floats(0.05, 20)
families = st.one_of(st.just(None), st.floats(0.5, 60))


@given(finite, finite, finite, scales, families)
def test_pit_monotone(z1, z2, loc, scale, nu):
    f = ConditionalFactor("normal" if nu is None else "student_t", loc, scale, nu)
    lo, hi = sorted((z1, z2))
    assert pit_step(lo, f) <= pit_step(hi, f)


@given(st.floats(-3, 3), st.floats(-5, 5), st.floats(0.1, 5), st.floats(0.1, 10),
       st.floats(-10, 10), families)
def test_pit_affine_invariant(z, loc, scale, a, b, nu):
    fam = "normal" if nu is None else "student_t"
    u = pit_step(z, ConditionalFactor(fam, loc, scale, nu))
    v = pit_step(a * z + b, ConditionalFactor(fam, a * loc + b, a * scale, nu))
    assert v == pytest.approx(u, abs=1e-9)


# --- bivariate normal --------------------------------------------------------------------------

def test_bivariate_normal_example():
    f1, f2 = bivariate_normal_factors([1.0, 0.5], [0.0, 0.0], [[1.0, 0.5], [0.5, 1.0]])
    assert pit_step(1.0, f1) == pytest.approx(0.841345, abs=1e-6)
    assert f2.location == pytest.approx(0.5) and f2.scale == pytest.approx(math.sqrt(0.75))
    assert pit_step(0.5, f2) == pytest.approx(0.5, abs=1e-15)


def test_bivariate_normal_identity_and_zero_correlation():
    f1, f2 = bivariate_normal_factors([0.0, 0.0], [0.0, 0.0], np.eye(2))
    assert (pit_step(0.0, f1), pit_step(0.0, f2)) == (0.5, 0.5)
    sigma = [[2.0, 0.0], [0.0, 3.0]]
    for y1 in (-4.0, 0.0, 9.0):
        _, f2 = bivariate_normal_factors([y1, 1.0], [0.5, -1.0], sigma)
        assert pit_step(1.0, f2) == pytest.approx(stats.norm.cdf((1.0 + 1.0) / math.sqrt(3.0)), abs=1e-12)


def test_bivariate_normal_matches_regression_oracle(rng):
    # conditional law from scipy's joint normal via numerical conditioning of the density
    sigma = np.array([[2.0, 0.7], [0.7, 1.0]])
    mu = np.array([0.3, -0.2])
    y = np.array([1.1, 0.4])
    _, f2 = bivariate_normal_factors(y, mu, sigma)
    joint = stats.multivariate_normal(mu, sigma)
    num, _ = integrate.quad(lambda s: joint.pdf([y[0], s]), -np.inf, y[1])
    den, _ = integrate.quad(lambda s: joint.pdf([y[0], s]), -np.inf, np.inf)
    assert pit_step(y[1], f2) == pytest.approx(num / den, abs=1e-9)


def test_bivariate_normal_rejects_non_spd():
    with pytest.raises(NotPositiveDefiniteError):
        bivariate_normal_factors([0, 0], [0, 0], [[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(NotPositiveDefiniteError):
        bivariate_normal_factors([0, 0], [0, 0], [[1.0, 0.2], [0.3, 1.0]])


def test_general_normal_factors_agree_with_bivariate():
    sigma = np.array([[1.5, -0.4], [-0.4, 0.8]])
    y, mu = np.array([0.2, 1.4]), np.array([-0.1, 0.3])
    a = bivariate_normal_factors(y, mu, sigma)
    b = multivariate_normal_factors(y, mu, sigma)
    for fa, fb in zip(a, b):
        assert fa.location == pytest.approx(fb.location, abs=1e-12)
        assert fa.scale == pytest.approx(fb.scale, abs=1e-12)


# --- multivariate t ----------------------------------------------------------------------------

def test_t_factors_d1():
    for y in (-3.0, 0.0, 8.0):
        (f,) = multivariate_t_factors([y], [1.0], [[4.0]], 5.0)
        assert (f.family, f.location, f.scale, f.dof) == ("student_t", 1.0, 2.0, 5.0)


def test_t_factors_at_mean():
    sigma = np.array([[1.0, 0.3], [0.3, 2.0]])
    f1, f2 = multivariate_t_factors([0.5, -1.0], [0.5, -1.0], sigma, 4.0)
    assert f1.location == 0.5 and f2.location == pytest.approx(-1.0)
    schur = 2.0 - 0.09
    assert f2.scale ** 2 == pytest.approx(4.0 / 5.0 * schur)
    assert f2.dof == 5.0


def test_t_factors_example():
    f1, f2 = multivariate_t_factors([1.0, 0.0], [0.0, 0.0], np.eye(2), 5.0)
    assert (f1.location, f1.scale, f1.dof) == (0.0, 1.0, 5.0)
    assert f2.location == pytest.approx(0.0, abs=1e-15)
    assert f2.scale == pytest.approx(1.0, abs=1e-15)
    assert f2.dof == 6.0


@pytest.mark.parametrize("y1, y2", [(1.0, 0.0), (-0.7, 1.3), (2.5, -2.0)])
def test_t_factor_matches_numerical_conditioning(y1, y2):
    nu = 5.0
    sigma = np.array([[1.0, 0.4], [0.4, 1.5]])
    _, f2 = multivariate_t_factors([y1, y2], [0.0, 0.0], sigma, nu)
    g = lambda s: bivariate_t_density(y1, s, nu, sigma)
    num, _ = integrate.quad(g, -np.inf, y2, epsabs=1e-13)
    den, _ = integrate.quad(g, -np.inf, np.inf, epsabs=1e-13)
    assert pit_step(y2, f2) == pytest.approx(num / den, abs=1e-9)


def test_t_factors_three_dims_match_numerical_conditioning():
    nu = 4.0
    sigma = np.array([[1.0, 0.3, -0.2], [0.3, 1.2, 0.4], [-0.2, 0.4, 0.9]])
    y = np.array([0.4, -0.6, 0.9])
    inv = np.linalg.inv(sigma)
    dens = lambda s: (1 + np.array([y[0], y[1], s]) @ inv @ np.array([y[0], y[1], s]) / nu) ** (-(nu + 3) / 2)
    num, _ = integrate.quad(dens, -np.inf, y[2])
    den, _ = integrate.quad(dens, -np.inf, np.inf)
    f = multivariate_t_factors(y, np.zeros(3), sigma, nu)
    assert [fk.dof for fk in f] == [4.0, 5.0, 6.0]
    assert pit_step(y[2], f[2]) == pytest.approx(num / den, abs=1e-9)


def test_t_factors_errors():
    with pytest.raises(ValueError):
        multivariate_t_factors([0, 0], [0, 0], np.eye(2), 0.0)
    with pytest.raises(NotPositiveDefiniteError):
        multivariate_t_factors([0, 0], [0, 0], -np.eye(2), 5.0)


# --- rosenblatt --------------------------------------------------------------------------------

def test_rosenblatt_medians_and_empty():
    factors = [ConditionalFactor("normal", 1.0, 2.0), ConditionalFactor("student_t", -3.0, 0.5, 4.0)]
    assert rosenblatt(factors, [1.0, -3.0]).tolist() == pytest.approx([0.5, 0.5])
    fa = FactorArray.from_factors([ConditionalFactor("student_t", 1.0, 2.0, 3.0), factors[1]])
    assert rosenblatt(fa, [1.0, -3.0]).tolist() == pytest.approx([0.5, 0.5])
    with pytest.raises(ValueError):
        FactorArray.from_factors(factors)
    assert rosenblatt([], []).size == 0


def test_rosenblatt_length_mismatch():
    with pytest.raises(ValueError):
        rosenblatt([ConditionalFactor("normal", 0.0, 1.0)], [0.0, 1.0])


def test_factor_array_matches_scalar_path(rng):
    y = rng.standard_normal((6, 3))
    mean = rng.standard_normal((6, 3)) * 0.1
    sigma = np.array([[1.0, 0.3, 0.1], [0.3, 1.0, 0.2], [0.1, 0.2, 1.0]])
    for dof in (None, 6.0):
        fa = factor_arrays(y, mean, sigma, dof)
        u_vec = rosenblatt(fa, y.ravel())
        u_sc = rosenblatt([fa[k] for k in range(len(fa))], y.ravel())
        assert np.allclose(u_vec, u_sc, atol=1e-14)
        for t in range(6):
            ref = (multivariate_normal_factors(y[t], mean[t], sigma) if dof is None
                   else multivariate_t_factors(y[t], mean[t], sigma, dof))
            for l in range(3):
                assert fa[3 * t + l].location == pytest.approx(ref[l].location)


@pytest.mark.parametrize("dof", [None, 5.0])
def test_uniform_under_true_law(rng, dof):
    sigma = np.array([[1.0, 0.5], [0.5, 1.0]])
    L = np.linalg.cholesky(sigma)
    n = 4000
    e = rng.standard_normal((n, 2))
    if dof is not None:
        e /= np.sqrt(rng.chisquare(dof, n) / dof)[:, None]
    y = e @ L.T
    u = rosenblatt(factor_arrays(y, np.zeros(2), sigma, dof), y.ravel())
    assert stats.kstest(u, "uniform").pvalue > 1e-3
    assert abs(np.corrcoef(u[:-1], u[1:])[0, 1]) < 3 / math.sqrt(u.size)


def test_normal_scores_are_finite():
    z = normal_scores([0.0, 0.5, 1.0])
    assert np.all(np.isfinite(z)) and z[1] == 0.0
