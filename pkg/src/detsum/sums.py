"""Inverse determinant sums, unit counts, unit orbits and the truncated zeta of Q(i)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .enumeration import DEFAULT_NODE_BUDGET, ball_statistics, iter_ball
from .errors import NotANumberFieldLattice, ZeroDeterminantEncountered
from .lattice import MatrixLattice

UNIT_SEARCH_RADIUS = 16.0


@dataclass(frozen=True)
class DetSumRow:
    M: float
    count: int
    sum: float
    unit_count: int
    normalized: float


@dataclass(frozen=True)
class DetSumTable:
    rows: tuple
    m: float
    tag: str | None
    covolume: float
    n: int
    k: int
    skipped_zero: int = 0
    min_abs_det: float = math.inf
    det_mode: str = "exact"

    @property
    def radii(self) -> np.ndarray:
        return np.array([r.M for r in self.rows])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def to_csv(self) -> str:
        lines = ["M,count,sum,unit_count,normalized"]
        for r in self.rows:
            lines.append(f"{r.M:.6g},{r.count},{r.sum:.10g},{r.unit_count},{r.normalized:.10g}")
        return "\n".join(lines) + "\n"


def inverse_det_sum(
    L: MatrixLattice,
    m: float,
    radii: Sequence[float],
    zero_policy: str = "reject",
    threads: int = 1,
    det: str = "auto",
    node_budget: float = DEFAULT_NODE_BUDGET,
) -> DetSumTable:
    """``S_L^m(M) = sum 1/|det X|^m`` over ``L(M)`` for every radius, in one pass.

    With ``zero_policy="skip"`` points of zero determinant are left out and
    counted in ``skipped_zero``; the default raises on the first one.
    """
    if zero_policy not in ("reject", "skip"):
        raise ValueError("zero_policy must be 'reject' or 'skip'")
    if m <= 0:
        raise ValueError("exponent m must be positive")
    st = ball_statistics(L, radii, m=m, det=det, threads=threads, node_budget=node_budget)
    if st.zeros[-1] and zero_policy == "reject":
        raise ZeroDeterminantEncountered(st.first_zero)
    scale = L.covolume ** (m * L.n / L.k)
    rows = tuple(
        DetSumRow(M, c, s, u, scale * s)
        for M, c, s, u in zip(st.radii, st.counts, st.inv_det_sum, st.units)
    )
    return DetSumTable(
        rows=rows,
        m=m,
        tag=L.tag,
        covolume=L.covolume,
        n=L.n,
        k=L.k,
        skipped_zero=st.zeros[-1],
        min_abs_det=math.sqrt(st.min_abs2),
        det_mode=st.det_mode,
    )


def unit_count(L: MatrixLattice, radii: Sequence[float], threads: int = 1) -> tuple:
    """Exact counts of points with ``|det|^2 == 1`` inside each radius."""
    if L.det_poly is None:
        raise ValueError("unit counting needs an exact determinant evaluator")
    return ball_statistics(L, radii, det="exact", threads=threads).units


# --- unit orbits in quadratic number-field codes ----------------------------


@dataclass(frozen=True)
class UnitData:
    torsion: tuple
    fundamental: tuple
    fundamental_inverse: tuple


def _nf_descriptor(L: MatrixLattice):
    d = L.descriptor
    if d is None or d.kind != "number_field" or L.det_poly is None:
        raise NotANumberFieldLattice(f"{L.tag!r} is not a diagonal number-field code")
    if d.n != 2:
        raise NotANumberFieldLattice("unit orbits are implemented for relative degree 2")
    return d


@lru_cache(maxsize=None)
def _units_cached(L: MatrixLattice) -> UnitData:
    d = _nf_descriptor(L)
    units = []
    for zb, qb in iter_ball(L, UNIT_SEARCH_RADIUS):
        for z, q in zip(zb, qb):
            if L.det_poly.evaluate(z).norm() == 1:
                units.append((float(q), tuple(int(v) for v in z)))
    units.sort()
    torsion = tuple(z for q, z in units if L.sqnorm(z) == L.n)
    nontorsion = [z for q, z in units if L.sqnorm(z) != L.n]
    if not nontorsion:
        raise NotANumberFieldLattice(f"no nontorsion unit within radius {UNIT_SEARCH_RADIUS}")
    fund = nontorsion[0]
    F = d.field
    x = d.to_element(fund)
    nrm = F.norm(x)[0]
    conj_part = F.sigma(x, 1)
    inv = [c * nrm.conj() for c in conj_part]
    return UnitData(torsion, fund, d.from_element(inv))


def fundamental_unit(L: MatrixLattice) -> tuple:
    """Smallest-norm nontorsion unit found by exhaustive search (cached per lattice)."""
    return _units_cached(L).fundamental


def torsion_units(L: MatrixLattice) -> tuple:
    return _units_cached(L).torsion


def unit_orbit_count(L: MatrixLattice, x: Sequence[int], M: float) -> int:
    """``A_x(M)``: number of units ``u`` with ``||psi(x u)||_F <= M``.

    Units are ``tau * eps^t`` for torsion ``tau`` and the fundamental unit
    ``eps``. For fixed ``tau`` the squared norm is a sum of exponentials in
    ``t``, hence convex, so each direction stops once the norm exceeds ``M``
    while increasing.
    """
    d = _nf_descriptor(L)
    if not any(int(v) for v in x):
        raise ValueError("x must be nonzero")
    ud = _units_cached(L)
    F = d.field
    limit = math.floor(2 * Fraction(float(M)) ** 2)

    def q2(el) -> int:
        return round(2 * L.sqnorm(d.from_element(el)))

    count = 0
    x_el = d.to_element(x)
    for tau in ud.torsion:
        start = F.mul(x_el, d.to_element(tau))
        for forward, step in ((True, ud.fundamental), (False, ud.fundamental_inverse)):
            e = d.to_element(step)
            cur = start if forward else F.mul(start, e)
            prev = None
            while True:
                v = q2(cur)
                if v <= limit:
                    count += 1
                elif prev is not None and v > prev:
                    break
                prev = v
                cur = F.mul(cur, e)
    return count


# --- truncated Dedekind zeta of Q(i) ----------------------------------------


def gaussian_ideal_counts(N: int) -> np.ndarray:
    """``a[j]`` = number of ideals of Z[i] of norm ``j`` for ``j <= N``."""
    N = int(N)
    r = np.zeros(N + 1, dtype=np.int64)
    R = math.isqrt(N)
    for a in range(-R, R + 1):
        B = math.isqrt(N - a * a)
        b = np.arange(-B, B + 1, dtype=np.int64)
        r += np.bincount(a * a + b * b, minlength=N + 1)
    r[0] = 0
    return r // 4


def dedekind_zeta_qi_truncated(s: float, N: int) -> float:
    """Partial sum of the Dedekind zeta of Q(i) over ideals of norm at most ``N``."""
    if not s > 1:
        raise ValueError("s must exceed 1")
    if N < 1:
        raise ValueError("N must be at least 1")
    a = gaussian_ideal_counts(N)
    j = np.nonzero(a)[0]
    return math.fsum((a[j] * np.power(j.astype(float), -float(s))).tolist())
