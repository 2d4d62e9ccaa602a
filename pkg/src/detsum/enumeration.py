"""Streaming enumeration of lattice points in a Frobenius-norm ball.

Points are never stored. The ball is split into partitions by the value of
the outermost coefficient, each partition is walked by a compiled
Fincke-Pohst kernel, and per-partition partial results are combined in
partition order so that floating-point totals do not depend on the number
of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import numpy as np

from . import _kernels as K
from .errors import RadiusTooLarge
from .lattice import LatticePoint, MatrixLattice, point_from_coeffs

DEFAULT_NODE_BUDGET = 2e10
PRUNE_SLACK = 1e-9
BATCH = 1 << 15
_INT64_SAFE = 2**31 - 1


def ball_volume(k: int, M: float) -> float:
    return math.pi ** (k / 2) / math.gamma(k / 2 + 1) * M**k


def estimate_points(L: MatrixLattice, M: float) -> float:
    """Ball volume over covolume; a rough count of ``|L(M)|``."""
    return ball_volume(L.k, M) / L.covolume


@dataclass(frozen=True)
class _Plan:
    lattice: MatrixLattice
    M: float
    m2: float
    tol: float
    rd2: np.ndarray
    mu: np.ndarray
    exact: bool
    thr: int
    values: range


def _plan(L: MatrixLattice, M: float, node_budget: float = DEFAULT_NODE_BUDGET) -> _Plan:
    M = float(M)
    if not M > 0:
        raise ValueError(f"radius must be positive, got {M}")
    est = estimate_points(L, M)
    if est > node_budget:
        raise RadiusTooLarge(est, node_budget)
    R = np.linalg.cholesky(L.gram).T
    d = np.diag(R).copy()
    rd2 = d * d
    mu = R / d[:, None]
    m2 = M * M
    tol = PRUNE_SLACK * m2
    exact = L.gram2 is not None
    thr = math.floor(2 * Fraction(M) ** 2) if exact else 0
    b = math.floor(math.sqrt((m2 + tol) / rd2[-1]))
    return _Plan(L, M, m2, tol, np.ascontiguousarray(rd2), np.ascontiguousarray(mu), exact, thr, range(-b, b + 1))


def _gram2(L: MatrixLattice) -> np.ndarray:
    if L.gram2 is not None:
        return L.gram2
    return np.zeros((L.k, L.k), dtype=np.int64)


def _iter_partition(plan: _Plan, v: int, batch: int = BATCH) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    L = plan.lattice
    k = L.k
    z = np.zeros(k, dtype=np.int64)
    hi = np.zeros(k, dtype=np.int64)
    ctr = np.zeros(k)
    acc = np.zeros(k + 1)
    st = np.zeros(3, dtype=np.int64)
    zbuf = np.empty((batch, k), dtype=np.int64)
    qbuf = np.empty(batch)
    g2 = _gram2(L)
    K.start_partition(v, z, hi, ctr, acc, st)
    while st[2] == 0:
        nb = K.collect(
            plan.rd2, plan.mu, plan.m2, plan.tol, L.gram, g2, plan.exact, plan.thr,
            z, hi, ctr, acc, st, zbuf, qbuf,
        )
        if nb:
            q = qbuf[:nb] * (0.5 if plan.exact else 1.0)
            yield zbuf[:nb].copy(), q


def iter_ball(
    L: MatrixLattice, M: float, batch: int = BATCH, node_budget: float = DEFAULT_NODE_BUDGET
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield ``(coeffs, squared_norms)`` batches in the deterministic visit order."""
    plan = _plan(L, M, node_budget)
    for v in plan.values:
        yield from _iter_partition(plan, v, batch)


def enumerate_ball(
    L: MatrixLattice,
    M: float,
    visit: Callable[[LatticePoint], object] | None = None,
    node_budget: float = DEFAULT_NODE_BUDGET,
) -> int:
    """Call ``visit`` once per nonzero point of ``L(M)``; returns ``|L(M)|``.

    Building a ``LatticePoint`` per point is slow; use :func:`fold_ball` or
    :func:`ball_statistics` for large balls.
    """
    count = 0
    for zb, _ in iter_ball(L, M, node_budget=node_budget):
        count += len(zb)
        if visit is not None:
            for z in zb:
                visit(point_from_coeffs(L, z))
    return count


def fold_ball(
    L: MatrixLattice,
    M: float,
    init: Callable[[], object],
    step: Callable[[object, np.ndarray, np.ndarray], object],
    merge: Callable[[object, object], object],
    threads: int = 1,
    node_budget: float = DEFAULT_NODE_BUDGET,
):
    """Fold batches of ``(coeffs, squared_norms)`` per partition, then merge in order.

    ``merge`` must be associative; partitions are merged left to right in
    increasing outermost-coefficient order regardless of ``threads``.
    """
    plan = _plan(L, M, node_budget)

    def one(v):
        acc = init()
        for zb, qb in _iter_partition(plan, v):
            acc = step(acc, zb, qb)
        return acc

    parts = _map(one, plan.values, threads)
    out = init()
    for p in parts:
        out = merge(out, p)
    return out


def _map(fn, items, threads: int):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


# --- bucketed statistics ----------------------------------------------------


@dataclass(frozen=True)
class BallStats:
    """Cumulative per-radius statistics of one streaming pass.

    ``inv_det_sum[j]`` is the sum of ``|det|^-m`` over nonzero-determinant
    points with norm at most ``radii[j]``, ``norm_power_sum[j]`` the sum of
    ``||X||^s``. Counters are cumulative in the same way.
    """

    radii: tuple
    counts: tuple
    units: tuple
    zeros: tuple
    inv_det_sum: tuple
    norm_power_sum: tuple
    min_abs2: float
    hadamard_violations: int
    first_zero: tuple | None
    det_mode: str


def _det_arrays(L: MatrixLattice, M: float):
    """Monomial arrays for the int64 path, or ``None`` when values could overflow."""
    idx, cre, cim, deg = L.det_poly.to_arrays()
    ginv = np.linalg.inv(L.gram)
    zmax = [math.floor(M * math.sqrt(max(ginv[i, i], 0.0)) * (1 + 1e-6)) + 1 for i in range(L.k)]
    bound = 0
    for t in range(len(cre)):
        p = abs(int(cre[t])) + abs(int(cim[t]))
        for j in idx[t, :deg]:
            p *= zmax[int(j)]
        bound += p
    if bound > _INT64_SAFE:
        return None
    return idx, cre, cim


def _fold_batch_python(L, zb, qk, thresholds, qscale, m_half, s_half, ist, fst, misc_f, misc_i, first_zero):
    """Big-integer twin of the compiled fold, used when int64 could overflow."""
    n = L.n
    poly = L.det_poly
    for p in range(len(zb)):
        j = int(np.searchsorted(thresholds, qk[p]))
        qt = float(qk[p]) * qscale
        ist[j, K.I_COUNT] += 1
        K._kahan(fst, j, K.F_NPS, math.exp(s_half * math.log(qt)) if s_half else 1.0)
        a2 = poly.evaluate(zb[p]).norm()
        rhs = (qt / n) ** (n / 2)
        if math.sqrt(a2) > rhs + 1e-9 * max(1.0, rhs):
            misc_i[0] += 1
        if a2 == 0:
            ist[j, K.I_ZEROS] += 1
            if misc_i[1] == 0:
                misc_i[1] = 1
                first_zero[:] = zb[p]
            continue
        if a2 == 1:
            ist[j, K.I_UNITS] += 1
        misc_f[0] = min(misc_f[0], float(a2))
        K._kahan(fst, j, K.F_SUM, math.exp(-m_half * math.log(a2)))


def ball_statistics(
    L: MatrixLattice,
    radii: Sequence[float],
    m: float = 0.0,
    s: float = 0.0,
    det: str = "auto",
    threads: int = 1,
    node_budget: float = DEFAULT_NODE_BUDGET,
    batch: int = BATCH,
) -> BallStats:
    """One pass at ``max(radii)`` with points bucketed by shell.

    ``det`` is ``"none"``, ``"exact"``, ``"float"`` or ``"auto"`` (exact when
    the lattice carries a reduced-norm polynomial).
    """
    radii = tuple(float(r) for r in radii)
    if not radii or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be a nonempty strictly increasing list")
    plan = _plan(L, radii[-1], node_budget)
    if det == "auto":
        det = "exact" if L.det_poly is not None else "float"
    if det == "exact" and L.det_poly is None:
        raise ValueError("lattice has no exact determinant evaluator")
    if plan.exact:
        thresholds = np.array([float(math.floor(2 * Fraction(r) ** 2)) for r in radii])
        qscale = 0.5
    else:
        thresholds = np.array([r * r for r in radii])
        qscale = 1.0
    mode = {"none": 0, "exact": 1, "float": 2}[det]
    arrays = None
    python_fold = False
    if mode == 1:
        arrays = _det_arrays(L, radii[-1])
        python_fold = arrays is None
    if arrays is None:
        arrays = (np.zeros((1, 1), dtype=np.int64), np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64))
    mono, cre, cim = arrays
    nbk = len(radii)
    k = L.k
    g2 = _gram2(L)
    basis = np.ascontiguousarray(L.basis)
    m_half, s_half = 0.5 * float(m), 0.5 * float(s)

    def one(v):
        ist = np.zeros((nbk, 3), dtype=np.int64)
        fst = np.zeros((nbk, 4))
        misc_f = np.array([np.inf])
        misc_i = np.zeros(2, dtype=np.int64)
        first_zero = np.zeros(k, dtype=np.int64)
        if python_fold:
            for zb, q in _iter_partition(plan, v, batch):
                _fold_batch_python(L, zb, q / qscale, thresholds, qscale, m_half, s_half, ist, fst, misc_f, misc_i, first_zero)
        else:
            zbuf = np.empty((batch, k), dtype=np.int64)
            qbuf = np.empty(batch)
            K.run_partition(
                v, plan.rd2, plan.mu, plan.m2, plan.tol, L.gram, g2, plan.exact, plan.thr,
                zbuf, qbuf, thresholds, qscale, L.n, mode, mono, cre, cim, basis,
                m_half, s_half, ist, fst, misc_f, misc_i, first_zero,
            )
        return ist, fst, misc_f[0], misc_i.copy(), first_zero

    parts = _map(one, plan.values, threads)
    ist = sum(p[0] for p in parts)
    cum_i = np.cumsum(ist, axis=0)

    def cumulative(col):
        terms: list[float] = []
        out = []
        for j in range(nbk):
            for p in parts:
                terms.append(float(p[1][j, col]))
                terms.append(-float(p[1][j, col + 1]))
            out.append(math.fsum(terms))
        return tuple(out)

    first = None
    for p in parts:
        if p[3][1]:
            first = tuple(int(x) for x in p[4])
            break
    return BallStats(
        radii=radii,
        counts=tuple(int(x) for x in cum_i[:, K.I_COUNT]),
        units=tuple(int(x) for x in cum_i[:, K.I_UNITS]),
        zeros=tuple(int(x) for x in cum_i[:, K.I_ZEROS]),
        inv_det_sum=cumulative(K.F_SUM),
        norm_power_sum=cumulative(K.F_NPS),
        min_abs2=min(p[2] for p in parts) if parts else math.inf,
        hadamard_violations=int(sum(p[3][0] for p in parts)),
        first_zero=first,
        det_mode=det,
    )


# --- shell counts and norm power sums ---------------------------------------


@dataclass(frozen=True)
class ShellCountTable:
    radii: tuple
    counts: tuple

    def to_csv(self) -> str:
        lines = ["M,count"]
        lines += [f"{r:.6g},{c}" for r, c in zip(self.radii, self.counts)]
        return "\n".join(lines) + "\n"


def shell_counts(
    L: MatrixLattice, radii: Sequence[float], threads: int = 1, node_budget: float = DEFAULT_NODE_BUDGET
) -> ShellCountTable:
    st = ball_statistics(L, radii, det="none", threads=threads, node_budget=node_budget)
    return ShellCountTable(st.radii, st.counts)


def norm_power_sum(
    L: MatrixLattice, s: float, M: float, threads: int = 1, node_budget: float = DEFAULT_NODE_BUDGET
) -> float:
    """Sum of ``||X||_F^s`` over the nonzero points of ``L(M)``."""
    st = ball_statistics(L, [M], s=s, det="none", threads=threads, node_budget=node_budget)
    return st.norm_power_sum[0]
