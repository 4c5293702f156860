"""Empirical processes of PIT sequences and their exact CvM / KS functionals.

For a lag j the two-parameter process is

    V_j(r) = m^{-1/2} sum_k [ 1{u_k <= r1} 1{u_{k-j} <= r2} - r1 r2 ],   m = n - j,

r1 indexing the current value and r2 the lagged one. Between consecutive
distinct data values in each coordinate the count term is constant, so
the plane splits into rectangular cells. On a cell the squared process
integrates to a polynomial in the cell corners, and |V| attains its
supremum at (or approaching) a corner. Both functionals are therefore
computed exactly from a table of cumulative cell counts, built from the
ranks of the pairs with a 2-d prefix sum. The table is processed in row
blocks so memory stays bounded for long series.
"""

import numpy as np

_BLOCK_CELLS = 1 << 21


def _check_u(u):
    u = np.asarray(u, dtype=float).ravel()
    if np.any(np.isnan(u)):
        raise ValueError("PIT sequence contains NaN")
    return np.clip(u, 0.0, 1.0)


def lag_pairs(u, j):
    """Pairs (u_k, u_{k-j}) for k = j+1..n."""
    u = _check_u(u)
    j = int(j)
    if j < 1:
        raise ValueError("lag must be >= 1")
    if u.size <= j:
        raise ValueError(f"need more than {j} values for lag {j}, got {u.size}")
    return u[j:], u[:-j]


# ---------------------------------------------------------------------------
# one-parameter process


def d1_stats(u):
    """CvM and KS functionals of V_1(r) = n^{-1/2} sum [1{u_k <= r} - r].

    Returns
    -------
    (cvm, ks) : tuple of float
        ``cvm`` is the integral of V_1^2 over [0, 1],
        ``sum (u_(k) - (2k-1)/(2n))^2 + 1/(12n)``; ``ks`` is sup |V_1|.
    """
    u = _check_u(u)
    n = u.size
    if n == 0:
        raise ValueError("empty PIT sequence")
    s = np.sort(u)
    k = np.arange(1, n + 1)
    cvm = float(np.sum((s - (2 * k - 1) / (2 * n)) ** 2) + 1 / (12 * n))
    dplus = np.max(k / n - s)
    dminus = np.max(s - (k - 1) / n)
    ks = float(np.sqrt(n) * max(dplus, dminus))
    return cvm, ks


# ---------------------------------------------------------------------------
# two-parameter process


def v2_eval(u, j, r):
    """Evaluate V_j at a point r = (r1, r2) of the unit square."""
    cur, lag = lag_pairs(u, j)
    r1, r2 = float(r[0]), float(r[1])
    m = cur.size
    count = np.count_nonzero((cur <= r1) & (lag <= r2))
    return (count - m * r1 * r2) / np.sqrt(m)


class ProcessGrid:
    """Cell decomposition of the count function of a set of points in [0, 1]^2.

    ``r1_breaks`` / ``r2_breaks`` are the sorted distinct coordinates with 0
    and 1 added. :meth:`blocks` yields the cumulative counts
    ``N(r1_breaks[p], r2_breaks[q]) = #{a <= r1_breaks[p], b <= r2_breaks[q]}``
    a block of rows p at a time.
    """

    def __init__(self, a, b):
        a = np.clip(np.asarray(a, dtype=float), 0.0, 1.0)
        b = np.clip(np.asarray(b, dtype=float), 0.0, 1.0)
        self.m = a.size
        self.r1_breaks = np.unique(np.concatenate([[0.0, 1.0], a]))
        self.r2_breaks = np.unique(np.concatenate([[0.0, 1.0], b]))
        self._ia = np.searchsorted(self.r1_breaks, a)
        self._ib = np.searchsorted(self.r2_breaks, b)
        order = np.argsort(self._ia, kind="stable")
        self._ia = self._ia[order]
        self._ib = self._ib[order]

    @property
    def shape(self):
        return self.r1_breaks.size, self.r2_breaks.size

    def cell_counts(self):
        """Points per half-open cell [x_p, x_{p+1}) x [y_q, y_{q+1}) (full table)."""
        P, Q = self.shape
        h = np.bincount(self._ia * Q + self._ib, minlength=P * Q).reshape(P, Q)
        # points on r = 1 sit in the last break row/col; fold into the last cell
        h[-2, :] += h[-1, :]
        h[:, -2] += h[:, -1]
        return h[:-1, :-1]

    def blocks(self):
        """Yield (row_start, cumulative count block) covering all breakpoint rows."""
        P, Q = self.shape
        step = max(1, _BLOCK_CELLS // Q)
        running = np.zeros(Q, dtype=np.int64)
        lo_pt = 0
        for i0 in range(0, P, step):
            i1 = min(P, i0 + step)
            hi_pt = np.searchsorted(self._ia, i1, side="left")
            flat = (self._ia[lo_pt:hi_pt] - i0) * Q + self._ib[lo_pt:hi_pt]
            h = np.bincount(flat, minlength=(i1 - i0) * Q).reshape(i1 - i0, Q)
            lo_pt = hi_pt
            c = np.cumsum(np.cumsum(h, axis=1), axis=0) + running
            running = c[-1].copy()
            yield i0, c


def _cvm_ks_from_grid(grid):
    m = grid.m
    x, y = grid.r1_breaks, grid.r2_breaks
    # per-cell integrals in r2 direction (length Q-1)
    dy = np.diff(y)
    py = np.diff(y ** 2) / 2
    qy = np.diff(y ** 3) / 3
    cvm = 0.0
    ks = 0.0
    P = x.size
    for i0, c in grid.blocks():
        rows = np.arange(i0, i0 + c.shape[0])
        # lower-left corners at every breakpoint pair (includes the r = 1 edges)
        ll = np.abs(c - m * np.outer(x[rows], y))
        ks = max(ks, float(ll.max()))
        inner = rows < P - 1
        if not np.any(inner):
            continue
        cc = c[inner, :-1].astype(float)
        r = rows[inner]
        # upper-right corners: same count as the cell (left limit of N)
        ur = np.abs(cc - m * np.outer(x[r + 1], y[1:]))
        ks = max(ks, float(ur.max()))
        dx = x[r + 1] - x[r]
        px = (x[r + 1] ** 2 - x[r] ** 2) / 2
        qx = (x[r + 1] ** 3 - x[r] ** 3) / 3
        # cell integral: c^2/m * area - 2 c * P1 P2 + m * Q1 Q2
        cvm += (float(np.sum(cc * cc * np.outer(dx, dy))) / m
                - 2 * float(np.sum(cc * np.outer(px, py)))
                + m * float(np.sum(qx)) * float(np.sum(qy)))
    return cvm, float(ks / np.sqrt(m))


def d2_stats(u, j):
    """Exact (CvM, KS) functionals of the lag-j two-parameter process."""
    cur, lag = lag_pairs(u, j)
    return _cvm_ks_from_grid(ProcessGrid(cur, lag))


def cvm_d2(u, j):
    """Integral of V_j(r)^2 over the unit square."""
    return d2_stats(u, j)[0]


def ks_d2(u, j):
    """Supremum of |V_j(r)| over the unit square."""
    return d2_stats(u, j)[1]


def cvm_pairwise(points):
    """Integral of the squared empirical process of points in [0,1]^p, O(m^2 p).

    Uses the closed form
    ``m^{-1} sum_{i,l} prod_c (1 - max(x_ic, x_lc)) - 2 sum_i prod_c (1 - x_ic^2)/2 + m 3^{-p}``.
    Independent of the cell decomposition; also exact for p > 2.
    """
    x = np.clip(np.atleast_2d(np.asarray(points, dtype=float)), 0.0, 1.0)
    m, p = x.shape
    gram = np.ones((m, m))
    for c in range(p):
        gram *= 1.0 - np.maximum.outer(x[:, c], x[:, c])
    cross = np.sum(np.prod((1.0 - x ** 2) / 2, axis=1))
    return float(gram.sum() / m - 2 * cross + m / 3 ** p)


def _ks_sample_grid(points):
    """sup |V| evaluated at data-coordinate corners and their left limits (approximate for p > 2)."""
    x = np.clip(np.atleast_2d(np.asarray(points, dtype=float)), 0.0, 1.0)
    m, p = x.shape
    axes = [np.unique(np.concatenate([[1.0], x[:, c]])) for c in range(p)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    best = 0.0
    for start in range(0, len(pts), 4096):
        chunk = pts[start:start + 4096]
        le = np.all(x[None, :, :] <= chunk[:, None, :], axis=2).sum(axis=1)
        lt = np.all(x[None, :, :] < chunk[:, None, :], axis=2).sum(axis=1)
        prod = np.prod(chunk, axis=1)
        best = max(best, float(np.max(np.abs(le - m * prod))), float(np.max(np.abs(lt - m * prod))))
    return best / np.sqrt(m)


def dp_stats(u, p):
    """(CvM, KS) of the p-parameter process on consecutive p-tuples.

    The process uses ``prod_j 1{u_{k-j+1} <= r_j}`` over the ``n - p + 1``
    complete tuples. CvM is exact for every p; KS is exact for p <= 2 and
    evaluated on the sample grid (a lower bound) for p > 2.
    """
    u = _check_u(u)
    p = int(p)
    if p < 1 or u.size < p:
        raise ValueError(f"need at least p={p} values")
    if p == 1:
        return d1_stats(u)
    if p == 2:
        return d2_stats(u, 1)
    m = u.size - p + 1
    tuples = np.column_stack([u[p - 1 - c: p - 1 - c + m] for c in range(p)])
    return cvm_pairwise(tuples), _ks_sample_grid(tuples)


# ---------------------------------------------------------------------------
# aggregates and comparison statistics


def adj_mdj(u, k_max):
    """Lag-aggregated statistics ADJ_k, MDJ_k and their marginal-augmented versions."""
    u = _check_u(u)
    k_max = int(k_max)
    if k_max < 1 or u.size <= k_max:
        raise ValueError(f"need k_max >= 1 and more than k_max values (n={u.size})")
    d1_cvm, d1_ks = d1_stats(u)
    out = {}
    adj, mdj = 0.0, 0.0
    for j in range(1, k_max + 1):
        c, k = d2_stats(u, j)
        adj += c
        mdj = max(mdj, k)
        out[f"ADJ_{j}"] = adj
        out[f"MDJ_{j}"] = mdj
        out[f"ADJ0_{j}"] = d1_cvm + adj
        out[f"MDJ0_{j}"] = max(d1_ks, mdj)
    return out


def _rows(u, d):
    u = _check_u(u)
    d = int(d)
    if d < 1 or u.size % d:
        raise ValueError(f"length {u.size} is not divisible by d={d}")
    return u.reshape(-1, d)


def bai_chen_combos(u, d):
    """Max, sum and pooled sup-norms of the per-coordinate processes J_l.

    J_l(r) = T^{-1/2} sum_t [1{u_{(t-1)d+l} <= r} - r]; the pooled
    combination equals the one-parameter KS statistic of the whole sequence.
    """
    rows = _rows(u, d)
    sups = [d1_stats(rows[:, l])[1] for l in range(rows.shape[1])]
    pooled = d1_stats(rows.ravel())[1]
    return float(max(sups)), float(sum(sups)), pooled


def patton_s(u, d):
    """(CvM, KS) of the row-wise process S(r) = T^{-1/2} sum_t [prod_l 1{U_tl <= r_l} - prod r].

    d = 1 reduces to the one-parameter process and d = 2 is computed exactly
    with the cell decomposition. For d > 2 CvM is exact and KS is a sample-grid
    evaluation.
    """
    rows = _rows(u, d)
    if rows.shape[1] == 1:
        return d1_stats(rows[:, 0])
    if rows.shape[1] == 2:
        return _cvm_ks_from_grid(ProcessGrid(rows[:, 0], rows[:, 1]))
    return cvm_pairwise(rows), _ks_sample_grid(rows)


DEFAULT_LBQ_LAGS = (1, 2, 3, 20, 25)


def statistic_set(u, d, k_max=2, lbq_lags=DEFAULT_LBQ_LAGS, names=None):
    """All test statistics of one PIT sequence, keyed by name.

    Names: ``D1_CvM``, ``D1_KS``, ``D2_j_CvM``, ``D2_j_KS`` (j <= k_max),
    ``ADJ_j``, ``MDJ_j``, ``ADJ0_j``, ``MDJ0_j``, ``LBQ_j`` (on normal scores),
    ``JB``, ``BC_max``, ``BC_sum``, ``BC_pool``, ``S_CvM``, ``S_KS``.
    Lags that the sample is too short for are omitted. ``names`` restricts
    the output (and skips work that no requested statistic needs).
    """
    from .reference import jarque_bera, ljung_box
    from .transform import normal_scores

    u = _check_u(u)
    n = u.size
    want = None if names is None else set(names)

    def wanted(*keys):
        return want is None or any(k in want for k in keys)

    out = {}
    d1_cvm, d1_ks = d1_stats(u)
    out["D1_CvM"], out["D1_KS"] = d1_cvm, d1_ks
    adj, mdj = 0.0, 0.0
    k_top = min(int(k_max), n - 1)
    if want is not None:
        needed = [int(k.split("_")[1]) for k in want
                  if k.startswith(("D2_", "ADJ_", "MDJ_", "ADJ0_", "MDJ0_"))]
        k_top = min(k_top, max(needed, default=0))
    for j in range(1, k_top + 1):
        c, k = d2_stats(u, j)
        out[f"D2_{j}_CvM"], out[f"D2_{j}_KS"] = c, k
        adj += c
        mdj = max(mdj, k)
        out[f"ADJ_{j}"], out[f"MDJ_{j}"] = adj, mdj
        out[f"ADJ0_{j}"], out[f"MDJ0_{j}"] = d1_cvm + adj, max(d1_ks, mdj)
    scores = None
    for lag in lbq_lags:
        if lag < n and wanted(f"LBQ_{lag}"):
            scores = normal_scores(u) if scores is None else scores
            out[f"LBQ_{lag}"] = ljung_box(scores, lag)
    if n >= 4 and wanted("JB"):
        scores = normal_scores(u) if scores is None else scores
        out["JB"] = jarque_bera(scores)
    if d >= 1 and n % d == 0:
        if wanted("BC_max", "BC_sum", "BC_pool"):
            out["BC_max"], out["BC_sum"], out["BC_pool"] = bai_chen_combos(u, d)
        if wanted("S_CvM", "S_KS"):
            out["S_CvM"], out["S_KS"] = patton_s(u, d)
    if want is not None:
        missing = want - out.keys()
        if missing:
            raise ValueError(f"statistics not available for this sample: {sorted(missing)}")
        out = {k: v for k, v in out.items() if k in want}
    return out
