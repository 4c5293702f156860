"""Classical comparison statistics applied to normal scores of the PITs."""

import numpy as np


def autocorrelations(x, lags):
    x = np.asarray(x, dtype=float).ravel()
    xc = x - x.mean()
    denom = xc @ xc
    if denom <= 0:
        raise ValueError("series has zero variance")
    return np.array([xc[j:] @ xc[:-j] / denom for j in range(1, lags + 1)])


def ljung_box(x, lags):
    """Ljung-Box Q = n(n+2) sum_{j<=lags} rho_j^2 / (n-j)."""
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    lags = int(lags)
    if lags < 1 or n <= lags:
        raise ValueError(f"need more than {lags} observations, got {n}")
    rho = autocorrelations(x, lags)
    j = np.arange(1, lags + 1)
    return float(n * (n + 2) * np.sum(rho ** 2 / (n - j)))


def jarque_bera(x):
    """Jarque-Bera statistic n/6 (S^2 + (K-3)^2/4) with biased moment estimators."""
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    if n < 4:
        raise ValueError("Jarque-Bera needs at least 4 observations")
    xc = x - x.mean()
    m2 = np.mean(xc ** 2)
    if m2 <= 0:
        raise ValueError("series has zero variance")
    skew = np.mean(xc ** 3) / m2 ** 1.5
    kurt = np.mean(xc ** 4) / m2 ** 2
    return float(n / 6 * (skew ** 2 + (kurt - 3) ** 2 / 4))
