"""Simulation designs and the rejection-rate experiment runner.

Designs
-------
A1  N(0, (2, a; a, 1)) i.i.d.                 A2  t_5 with the same scale matrix
A3  VAR(1): N(A y_{t-1}, I), A = (a, 0; 0, 0)
B1  N(0, (1, .5; .5, 1))   B2  N(0, (1, .5; .5, 2))   B3  N(0, (2, .5; .5, 1))
B4-B6  t_5 with the scale matrices of B1-B3
C1  LSTAR model at the UK estimates, normal errors
C2-C4  C1 with t_7, t_5, t_3 errors (Sigma used as the t scale matrix)
C5, C6  C1 with a * Y_{t-2,2} added to the first mean equation, a = 0.5, 0.9

Seeds form a two-level hierarchy: ``(seed, rep, 0)`` drives the data of
rep ``rep`` and ``(seed, rep, 1)`` roots its bootstrap, so a single rep can
be re-run on its own.
"""

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .bootstrap import BootstrapConfig, run_bootstrap
from .models import (LSTAR_B_UK, LSTAR_SIGMA_UK, EstimationError, InitPolicy, ModelFamily,
                     _draw_innovations, simulate_lstar, simulate_var1)
from .transform import cholesky_lower

DGP_IDS = ("A1", "A2", "A3", "B1", "B2", "B3", "B4", "B5", "B6", "C1", "C2", "C3", "C4", "C5", "C6")
ALPHA_GRID = tuple(round(0.1 * i, 1) for i in range(10))

_B_SIGMA = {
    "B1": [[1.0, 0.5], [0.5, 1.0]],
    "B2": [[1.0, 0.5], [0.5, 2.0]],
    "B3": [[2.0, 0.5], [0.5, 1.0]],
}
_C_DOF = {"C1": None, "C2": 7.0, "C3": 5.0, "C4": 3.0, "C5": None, "C6": None}
_C_EXTRA = {"C5": 0.5, "C6": 0.9}

NULLS = {
    "h0a": ModelFamily("iid_normal_diag", 2),
    "h0b": ModelFamily("iid_normal_full", 2),
    "h0nar": ModelFamily("lstar2_normal", 2),
}

D_STATISTICS = ("D1_CvM", "D2_1_CvM", "D2_2_CvM", "D1_KS", "D2_1_KS", "D2_2_KS")
TABLE_STATISTICS = D_STATISTICS + ("LBQ_1", "LBQ_2", "LBQ_3", "LBQ_20", "LBQ_25", "JB")


class ExperimentError(RuntimeError):
    pass


@dataclass(frozen=True)
class DgpSpec:
    """A simulation design. ``alpha`` applies to A1-A3 (grid 0, 0.1, ..., 0.9) and C5/C6."""

    id: str
    alpha: float = None
    T: int = 100

    def __post_init__(self):
        if self.id not in DGP_IDS:
            raise ValueError(f"unknown DGP {self.id!r}; choose from {', '.join(DGP_IDS)}")
        if self.T < 1:
            raise ValueError("T must be >= 1")
        if self.id.startswith("A"):
            if self.alpha is None:
                raise ValueError(f"{self.id} needs alpha")
            if not any(abs(self.alpha - a) < 1e-9 for a in ALPHA_GRID):
                raise ValueError(f"alpha for {self.id} must be one of {ALPHA_GRID}")
        if self.id in _C_EXTRA and self.alpha is None:
            object.__setattr__(self, "alpha", _C_EXTRA[self.id])

    @property
    def label(self):
        return self.id if self.alpha is None else f"{self.id}(alpha={self.alpha:g})"


def dgp_simulate(spec, rng):
    """Draw a T x 2 series from the design ``spec`` using generator ``rng``."""
    T = spec.T
    if spec.id in ("A1", "A2"):
        sigma = np.array([[2.0, spec.alpha], [spec.alpha, 1.0]])
        return _draw_innovations(rng, T, cholesky_lower(sigma), 5.0 if spec.id == "A2" else None)
    if spec.id == "A3":
        a = np.array([[spec.alpha, 0.0], [0.0, 0.0]])
        return simulate_var1(np.zeros(2), a, np.eye(2), T, rng, InitPolicy())
    if spec.id.startswith("B"):
        k = int(spec.id[1])
        base = f"B{k - 3}" if k > 3 else spec.id
        return _draw_innovations(rng, T, cholesky_lower(np.array(_B_SIGMA[base])), 5.0 if k > 3 else None)
    extra = spec.alpha if spec.id in _C_EXTRA else 0.0
    return simulate_lstar(LSTAR_B_UK, LSTAR_SIGMA_UK, T, rng, dof=_C_DOF[spec.id], extra=extra)


def data_stream(seed, rep):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(rep, 0))))


def bootstrap_root(seed, rep):
    return np.random.SeedSequence(seed, spawn_key=(rep, 1))


@dataclass
class ExperimentResult:
    dgp: str
    alpha: float
    T: int
    null: str
    reps: int
    B: int
    seed: int
    levels: tuple
    names: list
    p_values: np.ndarray
    n_failures: int = 0
    wall_time: float = 0.0
    meta: dict = field(default_factory=dict)

    def rate(self, statistic, level):
        col = self.p_values[:, self.names.index(statistic)]
        return float(np.mean(col <= level + 1e-12))

    @property
    def rates(self):
        return {(s, lvl): self.rate(s, lvl) for s in self.names for lvl in self.levels}

    def to_csv(self, dest=None):
        """Tidy rows ``dgp, alpha, T, null, statistic, level, rate, reps, B, seed``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["dgp", "alpha", "T", "null", "statistic", "level", "rate", "reps", "B", "seed"])
        for s in self.names:
            for lvl in self.levels:
                w.writerow([self.dgp, "" if self.alpha is None else self.alpha, self.T, self.null,
                            s, lvl, f"{self.rate(s, lvl):.4f}", self.reps, self.B, self.seed])
        text = buf.getvalue()
        if dest is None:
            return text
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        return text

    def format_table(self, statistics=None):
        """Rejection rates in percent, one line per level, in the layout of the published tables."""
        cols = [s for s in (statistics or TABLE_STATISTICS) if s in self.names]
        width = max(8, max(len(c) for c in cols) + 1)
        head = f"{'':>4} {'level':>6} " + "".join(f"{c:>{width}}" for c in cols)
        lines = [head, "-" * len(head)]
        for i, lvl in enumerate(sorted(self.levels, reverse=True)):
            tag = self.dgp if i == 0 else ""
            lines.append(f"{tag:>4} {lvl * 100:>5g}% " +
                         "".join(f"{100 * self.rate(c, lvl):>{width}.1f}" for c in cols))
        return "\n".join(lines)


def _one_rep(args):
    spec, family, cfg, seed, rep = args
    y = dgp_simulate(spec, data_stream(seed, rep))
    try:
        res = run_bootstrap(family, y, cfg, root=bootstrap_root(seed, rep))
    except EstimationError as exc:
        raise ExperimentError(f"rep {rep} (seed {seed}): estimation failed on simulated data: {exc}") from exc
    return res.p_values, res.n_failures


def run_experiment(spec, null_family, reps=200, cfg=BootstrapConfig(B=99), seed=None, workers=None):
    """Monte Carlo rejection rates of the bootstrap tests for one design.

    Parameters
    ----------
    spec : DgpSpec
    null_family : ModelFamily or str
        A family, or one of ``"h0a"``, ``"h0b"``, ``"h0nar"``.
    reps : int
    cfg : BootstrapConfig
        Bootstrap settings for every rep. Its ``seed`` is the master seed
        unless ``seed`` is given.
    workers : int, optional
        Processes across reps (defaults to ``cfg.workers``); the bootstrap
        inside each rep runs serially.
    """
    family = NULLS[null_family] if isinstance(null_family, str) else null_family
    null_name = null_family if isinstance(null_family, str) else family.kind
    seed = cfg.seed if seed is None else seed
    workers = cfg.workers if workers is None else workers
    inner = replace(cfg, workers=1)
    start = time.perf_counter()
    jobs = [(spec, family, inner, seed, rep) for rep in range(reps)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one_rep, jobs, chunksize=max(1, reps // (4 * workers))))
    else:
        results = [_one_rep(j) for j in jobs]
    names = list(results[0][0])
    pv = np.array([[r[0].get(k, np.nan) for k in names] for r in results])
    return ExperimentResult(spec.id, spec.alpha, spec.T, null_name, reps, cfg.B, seed,
                            tuple(cfg.alpha_levels), names, pv,
                            n_failures=int(sum(r[1] for r in results)),
                            wall_time=time.perf_counter() - start)


def power_curve(dgp_id, null_family, alphas=ALPHA_GRID, T=100, reps=200, cfg=BootstrapConfig(B=99)):
    """Run an A-design over a grid of alpha values; returns a list of ExperimentResult."""
    return [run_experiment(DgpSpec(dgp_id, a, T), null_family, reps, cfg) for a in alphas]


def curve_csv(results, level=0.05, statistics=D_STATISTICS):
    """Plot-ready CSV: one row per alpha with the rejection rate of each statistic."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    stats = [s for s in statistics if s in results[0].names]
    w.writerow(["dgp", "alpha", "level"] + list(stats))
    for r in results:
        w.writerow([r.dgp, r.alpha, level] + [f"{r.rate(s, level):.4f}" for s in stats])
    return buf.getvalue()
