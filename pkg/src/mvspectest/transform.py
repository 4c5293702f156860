"""Dynamic Rosenblatt transform.

A fitted conditional law for Y_t given the past is factorized, for every
time step, into d univariate conditionals in the stacking order. Each
stacked observation Z_k is then mapped through its own conditional CDF.
Under a correctly specified model with the true parameter, the resulting
sequence is i.i.d. Uniform(0, 1).

Two representations of the conditionals are provided:

* :class:`ConditionalFactor` - one law, convenient for inspection and tests.
* :class:`FactorArray` - the same information as parallel arrays, used on
  the hot path (bootstrap and Monte Carlo loops).
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg, special

from .core import clamp_pit

FAMILIES = ("normal", "student_t")
PIT_EPS = 1e-15


class NotPositiveDefiniteError(ValueError):
    pass


@dataclass(frozen=True)
class ConditionalFactor:
    """Univariate location-scale law: normal, or Student-t with ``dof`` degrees of freedom."""

    family: str
    location: float
    scale: float
    dof: float = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if not (np.isfinite(self.location) and np.isfinite(self.scale)) or self.scale <= 0:
            raise ValueError(f"invalid location/scale ({self.location}, {self.scale})")
        if self.family == "student_t" and (self.dof is None or not self.dof > 0):
            raise ValueError("student_t factor needs dof > 0")

    def cdf(self, z):
        return pit_step(z, self)


@dataclass(frozen=True)
class FactorArray:
    """n conditional laws of one family stored as arrays (``dof`` is None for normal)."""

    family: str
    location: np.ndarray
    scale: np.ndarray
    dof: np.ndarray = None

    def __len__(self):
        return len(self.location)

    def __getitem__(self, k):
        dof = None if self.dof is None else float(self.dof[k])
        return ConditionalFactor(self.family, float(self.location[k]), float(self.scale[k]), dof)

    def standardized(self, z):
        return (np.asarray(z, dtype=float) - self.location) / self.scale

    def cdf(self, z):
        x = self.standardized(z)
        if self.family == "normal":
            u = special.ndtr(x)
        else:
            u = special.stdtr(self.dof, x)
        return clamp_pit(u, PIT_EPS)

    @classmethod
    def from_factors(cls, factors):
        factors = list(factors)
        if not factors:
            return cls("normal", np.empty(0), np.empty(0))
        fams = {f.family for f in factors}
        if len(fams) > 1:
            raise ValueError("mixed factor families are not supported in a FactorArray")
        fam = fams.pop()
        loc = np.array([f.location for f in factors])
        scale = np.array([f.scale for f in factors])
        dof = np.array([f.dof for f in factors], dtype=float) if fam == "student_t" else None
        return cls(fam, loc, scale, dof)


def pit_step(z, factor):
    """CDF of ``factor`` at ``z``, clamped to [1e-15, 1 - 1e-15]."""
    z = float(z)
    if not np.isfinite(z):
        raise ValueError(f"non-finite observation {z}")
    x = (z - factor.location) / factor.scale
    if factor.family == "normal":
        u = special.ndtr(x)
    else:
        u = special.stdtr(factor.dof, x)
    return float(clamp_pit(u, PIT_EPS))


def cholesky_lower(sigma):
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise NotPositiveDefiniteError(f"expected a square matrix, got shape {sigma.shape}")
    if not np.allclose(sigma, sigma.T, rtol=1e-10, atol=1e-12):
        raise NotPositiveDefiniteError("matrix is not symmetric")
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError("matrix is not positive definite") from None


def bivariate_normal_factors(y, mu, sigma):
    """Conditional factorization of a bivariate normal at the point ``y``.

    Returns the marginal law of the first coordinate and the law of the
    second coordinate given the first (regression on y1 with Schur
    complement variance ``s22 - s12**2 / s11``).
    """
    y = np.asarray(y, dtype=float)
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if y.shape != (2,) or mu.shape != (2,) or sigma.shape != (2, 2):
        raise ValueError("bivariate_normal_factors expects 2-vectors and a 2x2 matrix")
    cholesky_lower(sigma)
    s11, s12, s22 = sigma[0, 0], sigma[0, 1], sigma[1, 1]
    beta = s12 / s11
    first = ConditionalFactor("normal", mu[0], np.sqrt(s11))
    second = ConditionalFactor("normal", mu[1] + beta * (y[0] - mu[0]), np.sqrt(s22 - s12 * beta))
    return first, second


def multivariate_t_factors(y, mu, sigma, dof):
    """Sequential conditionals of a d-variate t law with scale matrix ``sigma``.

    Factor l (1-based) is a location-scale t with ``dof + l - 1`` degrees of
    freedom. Its location is the Gaussian regression of y_l on y_1..y_{l-1};
    its squared scale is the Schur complement at position l inflated by
    ``(dof + q) / (dof + l - 1)``, q being the Mahalanobis form of the
    conditioning subvector.
    """
    if not dof > 0:
        raise ValueError(f"degrees of freedom must be positive, got {dof}")
    y = np.asarray(y, dtype=float).ravel()
    mu = np.asarray(mu, dtype=float).ravel()
    fa = factor_arrays(y[None, :], mu[None, :], sigma, dof)
    return [fa[k] for k in range(len(fa))]


def multivariate_normal_factors(y, mu, sigma):
    """Sequential normal conditionals of a d-variate normal law at ``y``."""
    y = np.asarray(y, dtype=float).ravel()
    mu = np.asarray(mu, dtype=float).ravel()
    fa = factor_arrays(y[None, :], mu[None, :], sigma)
    return [fa[k] for k in range(len(fa))]


def factor_arrays(y, mean, sigma, dof=None, chol=None):
    """Vectorized conditional factors for T observations in column order.

    Parameters
    ----------
    y, mean : array, shape (T, d)
        Observations and conditional means, already in stacking order.
    sigma : array, shape (d, d)
        Covariance (normal) or scale matrix (t), in stacking order.
    dof : float, optional
        Degrees of freedom; ``None`` means normal.

    Returns
    -------
    FactorArray of length T*d, in stacked order.
    """
    y = np.atleast_2d(np.asarray(y, dtype=float))
    mean = np.broadcast_to(np.asarray(mean, dtype=float), y.shape)
    T, d = y.shape
    L = cholesky_lower(sigma) if chol is None else chol
    resid = y - mean
    # e[t] = L^{-1} (y_t - mean_t): standardized innovations in sequence
    e = linalg.solve_triangular(L, resid.T, lower=True).T
    diag = np.diag(L)
    # conditional location = y - L_ll * e_l
    loc = y - e * diag
    scale = np.broadcast_to(diag, (T, d)).copy()
    if dof is None:
        return FactorArray("normal", loc.reshape(-1), scale.reshape(-1))
    if not dof > 0:
        raise ValueError(f"degrees of freedom must be positive, got {dof}")
    q = np.zeros((T, d))
    q[:, 1:] = np.cumsum(e[:, :-1] ** 2, axis=1)
    ell = np.arange(d)
    scale *= np.sqrt((dof + q) / (dof + ell))
    dofs = np.broadcast_to(dof + ell, (T, d)).astype(float)
    return FactorArray("student_t", loc.reshape(-1), scale.reshape(-1), dofs.reshape(-1))


def rosenblatt(factors, z):
    """Map each stacked observation through its conditional CDF.

    ``factors`` is a :class:`FactorArray` or a sequence of
    :class:`ConditionalFactor`, one per element of ``z``.
    """
    z = np.asarray(z, dtype=float).ravel()
    if not isinstance(factors, FactorArray):
        factors = list(factors)
        if len(factors) != z.size:
            raise ValueError(f"{len(factors)} factors for {z.size} observations")
        return np.array([pit_step(zk, f) for zk, f in zip(z, factors)])
    if len(factors) != z.size:
        raise ValueError(f"{len(factors)} factors for {z.size} observations")
    if not np.all(np.isfinite(z)):
        raise ValueError("non-finite observation")
    return factors.cdf(z)


def normal_scores(u):
    """Inverse-normal transform of PIT values."""
    return special.ndtri(clamp_pit(np.asarray(u, dtype=float), PIT_EPS))
