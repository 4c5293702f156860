"""Model zoo: simulation, estimation and conditional factorization.

Every family describes the law of Y_t given its past as a location/scale
law with a time-varying mean and a constant covariance (or t scale)
matrix. This is all :mod:`mvspectest.transform` needs to build the
dynamic Rosenblatt transform, and all the bootstrap needs to resample
under the fitted null.

Families
--------
iid_normal_diag  N(mu, Sigma), Sigma diagonal
iid_normal_full  N(mu, Sigma)
iid_t            t_nu(mu, Sigma), Sigma a scale matrix
var1_normal      N(c + A y_{t-1}, Sigma)
lstar2_normal    bivariate logistic smooth transition AR(3) mean, N errors
lstar2_t         same mean, t_nu errors
"""

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize, special

from .core import as_series, check_order
from .transform import FactorArray, NotPositiveDefiniteError, cholesky_lower, factor_arrays

KINDS = ("iid_normal_diag", "iid_normal_full", "iid_t", "var1_normal", "lstar2_normal", "lstar2_t")
_LAGS = {"iid_normal_diag": 0, "iid_normal_full": 0, "iid_t": 0, "var1_normal": 1,
         "lstar2_normal": 3, "lstar2_t": 3}
N_LSTAR = 11

# Reported estimates for the UK output growth / spread model.
LSTAR_B_UK = np.array([0.35, 0.21, 0.15, 0.32, -0.52, 2.56, 0.68, 0.20, -0.14, 1.14, -0.26])
LSTAR_SIGMA_UK = np.array([[0.95, -0.02], [-0.02, 0.45]])

MAX_ITER = 2000
REL_TOL = 1e-9


class EstimationError(RuntimeError):
    """Estimation could not produce a valid parameter (singular design or covariance)."""


@dataclass(frozen=True)
class ModelFamily:
    kind: str
    d: int = 2
    fixed_dof: float = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown model family {self.kind!r}; choose from {', '.join(KINDS)}")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if self.kind.startswith("lstar2") and self.d != 2:
            raise ValueError("LSTAR families are bivariate (d = 2)")
        if self.fixed_dof is not None and not self.fixed_dof > 0:
            raise ValueError("fixed_dof must be positive")

    @property
    def lags(self):
        return _LAGS[self.kind]

    @property
    def is_t(self):
        return self.kind.endswith("_t")

    @property
    def min_rows(self):
        if self.lags == 0:
            return self.d + 1
        return self.lags + 10


@dataclass(frozen=True)
class InitPolicy:
    """Start-up of recursive simulation: presample values and discarded burn-in.

    ``start=None`` fills the presample lags with zeros. For i.i.d. families
    both settings are ignored.
    """

    start: np.ndarray = None
    burn_in: int = 50


@dataclass(frozen=True)
class Params:
    """Parameter vector of a family.

    ``mu`` is the mean (i.i.d. families) or intercept (VAR); ``a`` the VAR
    coefficient matrix; ``b`` the eleven LSTAR coefficients; ``sigma`` the
    covariance or t scale matrix; ``dof`` the t degrees of freedom.
    """

    sigma: np.ndarray
    mu: np.ndarray = None
    a: np.ndarray = None
    b: np.ndarray = None
    dof: float = None

    def to_dict(self):
        out = {}
        d = self.sigma.shape[0]
        sep = "_" if d > 9 else ""
        if self.b is not None:
            out.update({f"b{i + 1}": float(v) for i, v in enumerate(self.b)})
        if self.mu is not None:
            prefix = "c" if self.a is not None else "mu"
            out.update({f"{prefix}{i + 1}": float(v) for i, v in enumerate(self.mu)})
        if self.a is not None:
            out.update({f"a{i + 1}{sep}{j + 1}": float(self.a[i, j]) for i in range(d) for j in range(d)})
        out.update({f"sigma{i + 1}{sep}{j + 1}": float(self.sigma[i, j])
                    for i in range(d) for j in range(i, d)})
        if self.dof is not None:
            out["dof"] = float(self.dof)
        return out

    @classmethod
    def from_dict(cls, family, values):
        """Rebuild parameters for ``family`` from the flat names of :meth:`to_dict`."""
        d = family.d
        sep = "_" if d > 9 else ""
        try:
            sigma = np.empty((d, d))
            for i in range(d):
                for j in range(i, d):
                    sigma[i, j] = sigma[j, i] = float(values[f"sigma{i + 1}{sep}{j + 1}"])
            mu = a = b = dof = None
            if family.kind.startswith("iid"):
                mu = np.array([float(values[f"mu{i + 1}"]) for i in range(d)])
            elif family.kind == "var1_normal":
                mu = np.array([float(values[f"c{i + 1}"]) for i in range(d)])
                a = np.array([[float(values[f"a{i + 1}{sep}{j + 1}"]) for j in range(d)] for i in range(d)])
            else:
                b = np.array([float(values[f"b{i + 1}"]) for i in range(N_LSTAR)])
            if family.is_t:
                dof = float(values["dof"]) if "dof" in values else family.fixed_dof
        except KeyError as exc:
            raise ValueError(f"missing parameter {exc.args[0]!r} for family {family.kind}") from None
        return cls(sigma=sigma, mu=mu, a=a, b=b, dof=dof)


def validate_params(family, params):
    d = family.d
    if params.sigma.shape != (d, d):
        raise ValueError(f"sigma must be {d}x{d}")
    cholesky_lower(params.sigma)
    if family.kind == "iid_normal_diag" and np.any(params.sigma[~np.eye(d, dtype=bool)] != 0):
        raise ValueError("iid_normal_diag requires a diagonal sigma")
    if family.kind.startswith("iid") or family.kind == "var1_normal":
        if params.mu is None or params.mu.shape != (d,):
            raise ValueError("mean/intercept vector missing or of wrong length")
    if family.kind == "var1_normal" and (params.a is None or params.a.shape != (d, d)):
        raise ValueError("var1_normal needs a d x d coefficient matrix")
    if family.kind.startswith("lstar2"):
        if params.b is None or params.b.shape != (N_LSTAR,):
            raise ValueError("LSTAR families need 11 coefficients b1..b11")
        if not params.b[5] > 0:
            raise ValueError("LSTAR transition slope b6 must be positive")
    if family.is_t and (params.dof is None or not params.dof > 0):
        raise ValueError("t families need dof > 0")


@dataclass
class FittedModel:
    family: ModelFamily
    params: Params
    loglik: float
    converged: bool = True
    iterations: int = 0
    notes: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# conditional means


def lstar_mean(b, lag1, lag2, lag3, extra=0.0):
    """Conditional mean of the bivariate LSTAR model at one time step.

    ``lag1``, ``lag2``, ``lag3`` are Y_{t-1}, Y_{t-2}, Y_{t-3}. ``extra``
    adds ``extra * Y_{t-2,2}`` to the first equation (a dynamic
    misspecification used by some simulation designs).
    """
    b = np.asarray(b, dtype=float)
    l1, l2, l3 = (np.asarray(v, dtype=float) for v in (lag1, lag2, lag3))
    w = special.expit(b[5] * (l2[..., 0] - b[6]))
    m1 = b[0] + b[1] * l2[..., 0] + b[2] * l3[..., 1] + b[3] * l1[..., 1] - w * b[4] * l1[..., 1]
    m1 = m1 + extra * l2[..., 1]
    m2 = b[7] + b[8] * l3[..., 0] + b[9] * l1[..., 1] + b[10] * l2[..., 1]
    return np.stack([m1, m2], axis=-1)


def conditional_means(family, params, data):
    """Means of Y_t given the past for the effective rows t = lags..T-1."""
    y = as_series(data)
    p = family.lags
    T = y.shape[0]
    if T <= p:
        raise ValueError(f"need more than {p} rows, got {T}")
    if family.kind.startswith("iid"):
        return np.broadcast_to(params.mu, y.shape).copy()
    if family.kind == "var1_normal":
        return params.mu + y[:-1] @ params.a.T
    return lstar_mean(params.b, y[2:-1], y[1:-2], y[:-3])


def _permuted(family, params, data, order):
    idx = check_order(order, family.d)
    y = as_series(data)
    if y.shape[1] != family.d:
        raise ValueError(f"data has {y.shape[1]} columns, family expects d={family.d}")
    mean = conditional_means(family, params, y)
    y_eff = y[family.lags:]
    return y_eff[:, idx], mean[:, idx], params.sigma[np.ix_(idx, idx)]


def conditional_factors(family, params, data, order=None):
    """Univariate conditional laws of the stacked effective observations."""
    y, mean, sigma = _permuted(family, params, data, order)
    return factor_arrays(y, mean, sigma, params.dof if family.is_t else None)


def effective_stack(family, data, order=None):
    """Stacked observations that carry a PIT (presample rows dropped)."""
    y = as_series(data)
    idx = check_order(order, y.shape[1])
    return y[family.lags:, idx].reshape(-1)


def pit_sequence(family, params, data, order=None):
    """PIT values of the stacked effective sample under ``params``."""
    factors = conditional_factors(family, params, data, order)
    return factors.cdf(effective_stack(family, data, order))


def _factor_logpdf(factors, z):
    x = factors.standardized(z)
    if factors.family == "normal":
        lp = -0.5 * (np.log(2 * np.pi) + x * x)
    else:
        nu = factors.dof
        lp = (special.gammaln((nu + 1) / 2) - special.gammaln(nu / 2) - 0.5 * np.log(nu * np.pi)
              - (nu + 1) / 2 * np.log1p(x * x / nu))
    return lp - np.log(factors.scale)


def loglik(family, params, data):
    """Conditional log-likelihood of the effective sample.

    Computed as the sum of log densities of the sequential univariate
    conditionals, which factorizes the joint conditional density exactly.
    """
    f = conditional_factors(family, params, data)
    return float(np.sum(_factor_logpdf(f, effective_stack(family, data))))


# ---------------------------------------------------------------------------
# simulation


def _draw_innovations(rng, n, chol, dof):
    z = rng.standard_normal((n, chol.shape[0])) @ chol.T
    if dof is not None:
        z /= np.sqrt(rng.chisquare(dof, n) / dof)[:, None]
    return z


def simulate_lstar(b, sigma, T, rng, dof=None, extra=0.0, init=InitPolicy()):
    """Simulate the bivariate LSTAR recursion with normal (``dof=None``) or t errors.

    Returns the ``T`` rows following the burn-in.
    """
    L = cholesky_lower(sigma)
    burn = int(init.burn_in)
    start = np.zeros(2) if init.start is None else np.asarray(init.start, dtype=float)
    n = T + burn
    eps = _draw_innovations(rng, n, L, dof)
    y = np.empty((n + 3, 2))
    y[:3] = start
    b = np.asarray(b, dtype=float)
    b1, b2, b3, b4, b5, b6, b7, b8, b9, b10, b11 = (float(v) for v in b)
    for t in range(3, n + 3):
        l1, l2, l3 = y[t - 1], y[t - 2], y[t - 3]
        w = 1.0 / (1.0 + np.exp(-b6 * (l2[0] - b7)))
        y[t, 0] = (b1 + b2 * l2[0] + b3 * l3[1] + b4 * l1[1] + w * (-b5 * l1[1]) + extra * l2[1]
                   + eps[t - 3, 0])
        y[t, 1] = b8 + b9 * l3[0] + b10 * l1[1] + b11 * l2[1] + eps[t - 3, 1]
    return y[3 + burn:]


def simulate_var1(c, a, sigma, T, rng, init=InitPolicy()):
    L = cholesky_lower(sigma)
    d = L.shape[0]
    burn = int(init.burn_in)
    n = T + burn
    eps = _draw_innovations(rng, n, L, None)
    y = np.empty((n + 1, d))
    y[0] = np.zeros(d) if init.start is None else init.start
    for t in range(1, n + 1):
        y[t] = c + a @ y[t - 1] + eps[t - 1]
    return y[1 + burn:]


def simulate(family, params, T, rng, init=InitPolicy()):
    """Draw a T x d series from the family's conditional law under ``params``.

    Dynamic families run the recursion from ``init.start`` and discard
    ``init.burn_in`` steps. ``rng`` is a ``numpy.random.Generator``.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    validate_params(family, params)
    if family.kind.startswith("iid"):
        L = cholesky_lower(params.sigma)
        return params.mu + _draw_innovations(rng, T, L, params.dof if family.is_t else None)
    if family.kind == "var1_normal":
        return simulate_var1(params.mu, params.a, params.sigma, T, rng, init)
    return simulate_lstar(params.b, params.sigma, T, rng, params.dof if family.is_t else None, init=init)


# ---------------------------------------------------------------------------
# estimation


def _cov(resid, weights=None):
    if weights is None:
        return resid.T @ resid / resid.shape[0]
    return (resid * weights[:, None]).T @ resid / resid.shape[0]


def _check_cov(sigma):
    try:
        cholesky_lower(sigma)
    except NotPositiveDefiniteError:
        raise EstimationError("estimated covariance matrix is singular") from None
    if np.linalg.cond(sigma) > 1e12:
        raise EstimationError("estimated covariance matrix is ill-conditioned")


def _t_mahalanobis(resid, sigma):
    L = np.linalg.cholesky(sigma)
    e = np.linalg.solve(L, resid.T)
    return np.sum(e * e, axis=0)


def _t_loglik_resid(resid, sigma, nu):
    T, d = resid.shape
    delta = _t_mahalanobis(resid, sigma)
    logdet = 2 * np.sum(np.log(np.diag(np.linalg.cholesky(sigma))))
    c = special.gammaln((nu + d) / 2) - special.gammaln(nu / 2) - d / 2 * np.log(nu * np.pi)
    return float(T * (c - 0.5 * logdet) - (nu + d) / 2 * np.sum(np.log1p(delta / nu)))


def _em_t_location_scale(y, nu, max_iter=MAX_ITER, tol=1e-12):
    """ML for i.i.d. multivariate t with fixed dof (EM iterations)."""
    T, d = y.shape
    mu = y.mean(axis=0)
    sigma = _cov(y - mu) * (nu - 2) / nu if nu > 2 else _cov(y - mu)
    _check_cov(sigma)
    ll_old = -np.inf
    for it in range(1, max_iter + 1):
        delta = _t_mahalanobis(y - mu, sigma)
        w = (nu + d) / (nu + delta)
        mu = (w @ y) / w.sum()
        sigma = _cov(y - mu, w)
        _check_cov(sigma)
        ll = _t_loglik_resid(y - mu, sigma, nu)
        if abs(ll - ll_old) <= tol * max(1.0, abs(ll)):
            return mu, sigma, ll, True, it
        ll_old = ll
    return mu, sigma, ll, False, max_iter


def _profile_dof(fit_given_dof, lo=2.05, hi=200.0):
    """Maximize a profile likelihood over the degrees of freedom (log scale)."""
    res = optimize.minimize_scalar(lambda s: -fit_given_dof(np.exp(s))[2],
                                   bounds=(np.log(lo), np.log(hi)), method="bounded",
                                   options={"xatol": 1e-6})
    nu = float(np.exp(res.x))
    return nu, fit_given_dof(nu), bool(res.success), int(res.nfev)


def _estimate_iid(family, y):
    d = y.shape[1]
    if family.kind == "iid_t":
        if family.fixed_dof is not None:
            nu = float(family.fixed_dof)
            mu, sigma, ll, conv, it = _em_t_location_scale(y, nu)
        else:
            nu, (mu, sigma, ll, conv, it), ok, nfev = _profile_dof(lambda v: _em_t_location_scale(y, v))
            conv = conv and ok
        return FittedModel(family, Params(sigma=sigma, mu=mu, dof=nu), ll, conv, it)
    mu = y.mean(axis=0)
    sigma = _cov(y - mu)
    if family.kind == "iid_normal_diag":
        sigma = np.diag(np.diag(sigma))
    _check_cov(sigma)
    params = Params(sigma=sigma, mu=mu)
    return FittedModel(family, params, loglik(family, params, y), True, 0)


def _estimate_var1(family, y):
    x = np.column_stack([np.ones(len(y) - 1), y[:-1]])
    target = y[1:]
    if np.linalg.cond(x) > 1e12:
        raise EstimationError("VAR design matrix is singular")
    coef, *_ = np.linalg.lstsq(x, target, rcond=None)
    resid = target - x @ coef
    sigma = _cov(resid)
    _check_cov(sigma)
    params = Params(sigma=sigma, mu=coef[0], a=coef[1:].T)
    return FittedModel(family, params, loglik(family, params, y), True, 0)


class _LstarDesign:
    """Regressors of the two LSTAR equations on the effective sample."""

    def __init__(self, y):
        self.y1 = y[3:, 0]
        self.y2 = y[3:, 1]
        l1, l2, l3 = y[2:-1], y[1:-2], y[:-3]
        self.trans = l2[:, 0]
        self.l1_2 = l1[:, 1]
        one = np.ones(len(self.y1))
        self.x1_base = np.column_stack([one, l2[:, 0], l3[:, 1], l1[:, 1]])
        self.x2 = np.column_stack([one, l3[:, 0], l1[:, 1], l2[:, 1]])
        self.n = len(self.y1)

    def x1(self, slope, loc):
        w = special.expit(slope * (self.trans - loc))
        return np.column_stack([self.x1_base, -w * self.l1_2])


def _sur_fit(design, slope, loc, nu=None, max_iter=500, tol=1e-12):
    """Exact (conditional) ML of the linear LSTAR coefficients for fixed transition.

    Normal errors: iterated feasible GLS on the two-equation system.
    t errors: the same GLS inside EM reweighting. Returns
    (b_lin1, b_lin2, sigma, loglik, converged).
    """
    x1 = design.x1(slope, loc)
    x2 = design.x2
    y1, y2 = design.y1, design.y2
    k1 = x1.shape[1]
    n = design.n
    c1, *_ = np.linalg.lstsq(x1, y1, rcond=None)
    c2, *_ = np.linalg.lstsq(x2, y2, rcond=None)
    resid = np.column_stack([y1 - x1 @ c1, y2 - x2 @ c2])
    sigma = _cov(resid)
    w = np.ones(n)
    ll_old = -np.inf
    for _ in range(max_iter):
        if nu is not None:
            delta = _t_mahalanobis(resid, sigma)
            w = (nu + 2) / (nu + delta)
        try:
            p = np.linalg.inv(sigma)
        except np.linalg.LinAlgError:
            raise EstimationError("singular residual covariance") from None
        xw1 = x1 * w[:, None]
        xw2 = x2 * w[:, None]
        g11, g12, g22 = xw1.T @ x1, xw1.T @ x2, xw2.T @ x2
        lhs = np.block([[p[0, 0] * g11, p[0, 1] * g12], [p[0, 1] * g12.T, p[1, 1] * g22]])
        rhs = np.concatenate([xw1.T @ (p[0, 0] * y1 + p[0, 1] * y2), xw2.T @ (p[0, 1] * y1 + p[1, 1] * y2)])
        try:
            beta = np.linalg.solve(lhs, rhs)
        except np.linalg.LinAlgError:
            raise EstimationError("singular LSTAR design") from None
        c1, c2 = beta[:k1], beta[k1:]
        resid = np.column_stack([y1 - x1 @ c1, y2 - x2 @ c2])
        sigma = _cov(resid, w if nu is not None else None)
        if not np.all(np.isfinite(sigma)) or np.linalg.det(sigma) <= 0:
            raise EstimationError("singular residual covariance")
        if nu is None:
            ll = -0.5 * n * (np.log(np.linalg.det(sigma)) + 2 * (1 + np.log(2 * np.pi)))
        else:
            ll = _t_loglik_resid(resid, sigma, nu)
        if abs(ll - ll_old) <= tol * max(1.0, abs(ll)):
            return c1, c2, sigma, float(ll), True
        ll_old = ll
    return c1, c2, sigma, float(ll), False


def _estimate_lstar(family, y):
    design = _LstarDesign(y)
    spread = np.std(design.trans)
    if not spread > 0:
        raise EstimationError("transition variable is constant")
    lo_b6, hi_b6 = np.log(1e-2 / spread), np.log(1e3 / spread)
    lo_b7, hi_b7 = design.trans.min(), design.trans.max()
    estimate_dof = family.is_t and family.fixed_dof is None

    def fit(theta):
        s, loc = theta[0], theta[1]
        nu = float(np.exp(theta[2])) if estimate_dof else (family.fixed_dof if family.is_t else None)
        return _sur_fit(design, float(np.exp(s)), float(loc), nu)

    def objective(theta):
        try:
            return -fit(theta)[3]
        except EstimationError:
            return np.inf

    dof0 = [np.log(8.0)] if estimate_dof else []
    grid = [[np.log(g / spread), q] + dof0
            for g in (0.5, 1.0, 2.0, 4.0, 8.0)
            for q in np.quantile(design.trans, np.linspace(0.1, 0.9, 9))]
    values = [objective(np.array(g)) for g in grid]
    best = int(np.argmin(values))
    if not np.isfinite(values[best]):
        raise EstimationError("LSTAR likelihood is not finite on the start-up grid")
    x0 = np.array(grid[best])

    bounds = [(lo_b6, hi_b6), (lo_b7, hi_b7)] + ([(np.log(2.05), np.log(200.0))] if estimate_dof else [])
    step = np.array([0.25, 0.25 * spread] + ([0.25] if estimate_dof else []))
    simplex = np.vstack([x0] + [x0 + np.diag(step)[i] for i in range(len(x0))])
    res = optimize.minimize(objective, x0, method="Nelder-Mead", bounds=bounds,
                            options={"maxiter": MAX_ITER, "initial_simplex": simplex,
                                     "xatol": 1e-7, "fatol": REL_TOL * max(1.0, abs(values[best]))})
    c1, c2, sigma, ll, inner_ok = fit(res.x)
    _check_cov(sigma)
    b = np.empty(N_LSTAR)
    b[:5] = c1
    b[5] = np.exp(res.x[0])
    b[6] = res.x[1]
    b[7:] = c2
    dof = None
    if family.is_t:
        dof = float(np.exp(res.x[2])) if estimate_dof else float(family.fixed_dof)
    params = Params(sigma=sigma, b=b, dof=dof)
    converged = bool(res.success) and inner_ok
    notes = {"at_bound": bool(np.any(np.isclose(res.x, [bd[0] for bd in bounds]))
                              or np.any(np.isclose(res.x, [bd[1] for bd in bounds])))}
    return FittedModel(family, params, loglik(family, params, y), converged, int(res.nit), notes)


# numeric route for the closed-form families: same likelihood, generic optimizer


def _pack(family, params):
    d = family.d
    L = np.linalg.cholesky(params.sigma)
    parts = [params.mu]
    if family.kind == "var1_normal":
        parts.append(params.a.ravel())
    parts.append(np.log(np.diag(L)))
    if family.kind != "iid_normal_diag":
        parts.append(L[np.tril_indices(d, -1)])
    return np.concatenate(parts)


def _unpack(family, vec):
    d = family.d
    mu = vec[:d]
    pos = d
    a = None
    if family.kind == "var1_normal":
        a = vec[pos:pos + d * d].reshape(d, d)
        pos += d * d
    L = np.diag(np.exp(vec[pos:pos + d]))
    pos += d
    if family.kind != "iid_normal_diag":
        L[np.tril_indices(d, -1)] = vec[pos:]
    return Params(sigma=L @ L.T, mu=mu, a=a)


def _estimate_numeric(family, y):
    if family.kind not in ("iid_normal_diag", "iid_normal_full", "var1_normal"):
        raise ValueError(f"numeric route not available for {family.kind}")
    d = family.d
    start = Params(sigma=np.diag(np.var(y, axis=0)), mu=np.zeros(d),
                   a=np.zeros((d, d)) if family.kind == "var1_normal" else None)

    def negll(vec):
        return -loglik(family, _unpack(family, vec), y)

    res = optimize.minimize(negll, _pack(family, start), method="BFGS",
                            options={"gtol": 1e-8, "maxiter": MAX_ITER})
    if res.nit < MAX_ITER:
        res = optimize.minimize(negll, res.x, method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 20 * MAX_ITER})
    params = _unpack(family, res.x)
    return FittedModel(family, params, -float(res.fun), bool(res.success), int(res.nit))


def estimate(family, data, method="auto"):
    """Maximum likelihood fit of ``family`` to a T x d series.

    Parameters
    ----------
    family : ModelFamily
    data : array, shape (T, d)
    method : {"auto", "numeric"}
        ``"auto"`` uses closed forms where they exist (i.i.d. normal, VAR(1)),
        EM for t laws and a profiled simplex search for LSTAR models.
        ``"numeric"`` maximizes the same likelihood with a generic quasi-Newton
        optimizer (closed-form families only), mainly as a cross-check.

    Raises
    ------
    EstimationError
        Singular design or covariance. Optimizer non-convergence is *not* an
        error; it is reported on the returned :class:`FittedModel`.
    """
    y = as_series(data)
    if y.shape[1] != family.d:
        raise ValueError(f"data has {y.shape[1]} columns, family expects d={family.d}")
    if y.shape[0] < family.min_rows:
        raise ValueError(f"{family.kind} needs at least {family.min_rows} rows, got {y.shape[0]}")
    if method == "numeric":
        return _estimate_numeric(family, y)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        if family.kind.startswith("iid"):
            return _estimate_iid(family, y)
        if family.kind == "var1_normal":
            return _estimate_var1(family, y)
        return _estimate_lstar(family, y)


def uk_lstar_params(dof=None):
    """The LSTAR parameter values reported for the UK growth/spread data."""
    return Params(sigma=LSTAR_SIGMA_UK.copy(), b=LSTAR_B_UK.copy(), dof=dof)


def with_dof(params, dof):
    return replace(params, dof=dof)
