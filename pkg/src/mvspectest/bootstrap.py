"""Parametric bootstrap of the test statistics under the fitted null model.

1. fit the null family to the data, compute the observed statistics;
2. simulate a series of the same length from the fitted law, recursively;
3. refit on the simulated series and recompute the statistics with the
   refitted parameter (so estimation noise is part of the reference law);
4. repeat B times;
5. p-value = (1 + #{replicate >= observed}) / (B + 1).

Replicate i draws from its own stream ``SeedSequence(seed, spawn_key=(i,))``
(stream 0 is reserved), so any replicate can be rerun in isolation and the
result does not depend on how replicates are scheduled across workers.
"""

import logging
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import as_series
from .models import EstimationError, InitPolicy, estimate, pit_sequence, simulate
from .stats import DEFAULT_LBQ_LAGS, statistic_set

log = logging.getLogger(__name__)

FAILURE_WARN_RATE = 0.02


@dataclass(frozen=True)
class BootstrapConfig:
    """Bootstrap settings.

    ``statistics=None`` computes every available statistic. ``order`` is the
    1-based stacking order (``None`` = natural). ``burn_in`` is discarded
    from each simulated path of dynamic families, which start at the column
    means of the original data.
    """

    B: int = 999
    seed: int = 0
    max_redraws: int = 5
    alpha_levels: tuple = (0.10, 0.05, 0.01)
    statistics: tuple = None
    k_max: int = 2
    lbq_lags: tuple = DEFAULT_LBQ_LAGS
    order: tuple = None
    burn_in: int = 50
    workers: int = 1

    def __post_init__(self):
        if self.B < 1:
            raise ValueError("B must be >= 1")
        if self.max_redraws < 0:
            raise ValueError("max_redraws must be >= 0")
        if not all(0 < a < 1 for a in self.alpha_levels):
            raise ValueError("significance levels must lie in (0, 1)")
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")

    def to_dict(self):
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items()}


@dataclass
class BootstrapResult:
    observed: dict
    replicates: np.ndarray
    names: list
    p_values: dict
    n_failures: int
    redraw_log: dict
    fit: object
    config: BootstrapConfig
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def B(self):
        return self.replicates.shape[0]

    def rejects(self, alpha):
        return {k: p <= alpha for k, p in self.p_values.items()}

    def replicate_column(self, name):
        return self.replicates[:, self.names.index(name)]


def p_value(observed, replicates):
    """(1 + #{replicates >= observed}) / (len(replicates) + 1)."""
    r = np.asarray(replicates, dtype=float).ravel()
    if r.size == 0:
        raise ValueError("no bootstrap replicates")
    return float((1 + np.count_nonzero(r >= observed)) / (r.size + 1))


def compute_statistics(family, params, data, cfg):
    u = pit_sequence(family, params, data, cfg.order)
    return statistic_set(u, family.d, cfg.k_max, cfg.lbq_lags, cfg.statistics)


def replicate_stream(root, i):
    """Generator for replicate ``i`` (1-based) of a bootstrap rooted at ``root``."""
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(root.entropy, spawn_key=tuple(root.spawn_key) + (i,))))


def _one_replicate(family, theta, T, init, cfg, root, i):
    """Simulate/refit/recompute for replicate i; returns (stats or None, redraws used)."""
    rng = replicate_stream(root, i)
    for attempt in range(cfg.max_redraws + 1):
        y = simulate(family, theta, T, rng, init)
        try:
            fit = estimate(family, y)
        except EstimationError:
            continue
        if not fit.converged:
            continue
        try:
            return compute_statistics(family, fit.params, y, cfg), attempt
        except (ValueError, FloatingPointError):
            continue
    return None, cfg.max_redraws


def _replicate_batch(args):
    family, theta, T, init, cfg, root, indices = args
    return [_one_replicate(family, theta, T, init, cfg, root, i) for i in indices]


def run_bootstrap(family, data, cfg=BootstrapConfig(), root=None, fit=None):
    """Bootstrap p-values of the configured statistics for ``data`` under ``family``.

    Parameters
    ----------
    family : ModelFamily
    data : array, shape (T, d)
    cfg : BootstrapConfig
    root : numpy.random.SeedSequence, optional
        Root of the replicate streams; defaults to ``SeedSequence(cfg.seed)``.
    fit : FittedModel, optional
        Reuse an existing fit of ``data`` (step 1).

    Raises
    ------
    EstimationError
        If the null model cannot be fitted to the original data.
    """
    start = time.perf_counter()
    y = as_series(data)
    root = np.random.SeedSequence(cfg.seed) if root is None else root
    if fit is None:
        fit = estimate(family, y)
    if not fit.converged:
        log.warning("estimation on the original data did not converge; continuing with the last iterate")
    observed = compute_statistics(family, fit.params, y, cfg)
    names = list(observed)
    init = InitPolicy(start=y.mean(axis=0), burn_in=cfg.burn_in)
    T = y.shape[0]

    indices = list(range(1, cfg.B + 1))
    if cfg.workers > 1 and cfg.B > 1:
        chunks = [indices[i::cfg.workers] for i in range(cfg.workers)]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(_replicate_batch,
                                  [(family, fit.params, T, init, cfg, root, c) for c in chunks]))
        by_index = {}
        for c, part in zip(chunks, parts):
            by_index.update(zip(c, part))
        outcomes = [by_index[i] for i in indices]
    else:
        outcomes = _replicate_batch((family, fit.params, T, init, cfg, root, indices))

    rows, redraws, failed = [], [], []
    for i, (stats, used) in zip(indices, outcomes):
        redraws.append(used)
        if stats is None:
            failed.append(i)
        else:
            rows.append([stats.get(k, np.nan) for k in names])
    replicates = np.array(rows, dtype=float).reshape(len(rows), len(names))
    n_failures = len(failed)
    if n_failures / cfg.B > FAILURE_WARN_RATE:
        warnings.warn(f"{n_failures} of {cfg.B} bootstrap replicates failed after "
                      f"{cfg.max_redraws} redraws; consider a larger B", RuntimeWarning, stacklevel=2)
    if replicates.shape[0] == 0:
        raise EstimationError("every bootstrap replicate failed")
    p_values = {k: p_value(observed[k], replicates[:, j]) for j, k in enumerate(names)}
    redraw_log = {"total_redraws": int(sum(redraws)),
                  "replicates_redrawn": int(sum(1 for r in redraws if r > 0)),
                  "failed_replicates": failed}
    return BootstrapResult(observed, replicates, names, p_values, n_failures, redraw_log,
                           fit, cfg, time.perf_counter() - start)
