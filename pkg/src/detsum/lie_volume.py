"""Ball-volume growth exponents of SL_n(C), SL_n(R) and SL_m(H) from restricted root data.

Everything is exact rational arithmetic. Linear forms act on real diagonal
trace-zero matrices and are stored modulo the all-ones form by making the
last coefficient zero.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import NonUniqueMinimum, OddIndexRamified, RankTooSmall


@dataclass(frozen=True)
class LinearForm:
    coefficients: tuple

    def __post_init__(self):
        c = [Fraction(x) for x in self.coefficients]
        if not c:
            raise ValueError("empty linear form")
        last = c[-1]
        object.__setattr__(self, "coefficients", tuple(x - last for x in c))

    @classmethod
    def basis_form(cls, N: int, i: int) -> "LinearForm":
        c = [0] * N
        c[i] = 1
        return cls(tuple(c))

    @property
    def N(self) -> int:
        return len(self.coefficients)

    def __call__(self, diag: Sequence) -> Fraction:
        if len(diag) != self.N:
            raise ValueError("dimension mismatch")
        return sum((c * Fraction(d) for c, d in zip(self.coefficients, diag)), Fraction(0))

    def __add__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(tuple(a - b for a, b in zip(self.coefficients, other.coefficients)))

    def scale(self, s) -> "LinearForm":
        s = Fraction(s)
        return LinearForm(tuple(s * a for a in self.coefficients))

    def shifted(self, t) -> "LinearForm":
        """Same form with ``t`` added to every raw coefficient (canonicalizes back)."""
        return LinearForm(tuple(a + Fraction(t) for a in self.coefficients))

    def __repr__(self):
        return "LinearForm(" + ", ".join(str(c) for c in self.coefficients) + ")"


class Family(enum.Enum):
    COMPLEX = "complex"
    REAL = "real"
    QUATERNION = "quaternion"


_MULT = {Family.COMPLEX: 2, Family.REAL: 1, Family.QUATERNION: 4}


@dataclass(frozen=True)
class RestrictedRootData:
    family: Family
    rank: int
    N: int
    positive_roots: tuple  # (LinearForm, multiplicity)
    simple_roots: tuple
    highest_weight: LinearForm
    dual_basis_raw: tuple  # diagonal vectors of length N
    integral_coweights: tuple = ()


def _solve(A: list, b: list) -> list:
    """Exact solution of the square system ``A x = b`` by Gauss-Jordan."""
    n = len(A)
    M = [[Fraction(v) for v in row] + [Fraction(bv)] for row, bv in zip(A, b)]
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [v / piv for v in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * bb for a, bb in zip(M[r], M[c])]
    return [M[r][n] for r in range(n)]


def build_root_data(family: Family | str, n: int) -> RestrictedRootData:
    """Root data of SL_n(C), SL_n(R) or, for ``QUATERNION``, SL_m(H) with ``m = n``."""
    family = Family(family) if isinstance(family, str) else family
    if n < 2:
        raise RankTooSmall(f"{family.value} family needs n >= 2, got {n}")
    m = n
    if family is Family.QUATERNION:
        N = 2 * m

        def lift(v):
            return list(v) + list(v)
    else:
        N = n

        def lift(v):
            return list(v)

    r = m - 1
    e = [LinearForm.basis_form(N, i) for i in range(N)]
    mult = _MULT[family]
    positive = tuple((e[i] - e[j], mult) for i in range(m) for j in range(i + 1, m))
    simple = tuple(e[i] - e[i + 1] for i in range(r))
    # coordinates on the maximal abelian subspace: H_l = E_l - E_{l+1} (lifted)
    H = []
    for l in range(r):
        v = [0] * m
        v[l], v[l + 1] = 1, -1
        H.append(lift(v))
    A = [[simple[i](H[l]) for l in range(r)] for i in range(r)]
    dual = []
    for j in range(r):
        c = _solve(A, [1 if i == j else 0 for i in range(r)])
        vec = [sum((c[l] * H[l][p] for l in range(r)), Fraction(0)) for p in range(N)]
        dual.append(tuple(vec))
    # E_1 + .. + E_j - j E_m (lifted): integral multiples of the dual vectors
    # only for j = r, but commonly quoted for all j
    integral = []
    for j in range(1, r + 1):
        v = [Fraction(1) if p < j else Fraction(0) for p in range(m)]
        v[m - 1] -= j
        integral.append(tuple(lift(v)))
    return RestrictedRootData(family, r, N, positive, simple, e[0], tuple(dual), tuple(integral))


def half_sum(data: RestrictedRootData) -> LinearForm:
    """``psi = 1/2 * sum m_gamma * gamma`` over positive restricted roots."""
    total = LinearForm((0,) * data.N)
    for root, mult in data.positive_roots:
        total = total + root.scale(mult)
    return total.scale(Fraction(1, 2))


@dataclass(frozen=True)
class VolumeReport:
    T: Fraction
    argmin: int
    two_psi: tuple
    lambda_values: tuple


def volume_report(data: RestrictedRootData, vectors: Sequence | None = None) -> VolumeReport:
    """Intermediate values of the exponent pipeline.

    ``vectors`` defaults to the exact dual basis; passing
    ``data.integral_coweights`` runs the same pipeline on those instead.
    """
    vectors = data.dual_basis_raw if vectors is None else vectors
    psi = half_sum(data)
    two_psi = tuple(2 * psi(b) for b in vectors)
    lam = tuple(data.highest_weight(b) / tp for b, tp in zip(vectors, two_psi))
    m1 = min(lam)
    hits = [j for j, v in enumerate(lam) if v == m1]
    if len(hits) != 1:
        raise NonUniqueMinimum(f"minimum {m1} attained at dual vectors {[h + 1 for h in hits]}")
    return VolumeReport(1 / m1, hits[0] + 1, two_psi, lam)


def volume_exponent(data: RestrictedRootData) -> Fraction:
    """Exact growth exponent ``T`` with ``Vol(B(M)) ~ M^T``."""
    return volume_report(data).T


_REGIMES = {
    "complex": "complex",
    "complex_center": "complex",
    "unramified": "unramified",
    "q_unramified": "unramified",
    "ramified": "ramified",
    "q_ramified": "ramified",
}


def unit_growth_prediction(regime: str, n: int) -> Fraction:
    """Growth exponent of ``|psi(units) in B(M)|`` for an index-``n`` algebra.

    A ramified algebra of index 2 has a compact norm-one group (SL_1(H)), so
    the exponent is 0 without any root data.
    """
    kind = _REGIMES.get(str(getattr(regime, "kind", regime)).lower())
    if kind is None:
        raise ValueError(f"unknown regime {regime!r}")
    if kind == "complex":
        return volume_exponent(build_root_data(Family.COMPLEX, n))
    if kind == "unramified":
        return volume_exponent(build_root_data(Family.REAL, n))
    if n % 2:
        raise OddIndexRamified(f"ramified algebras have even index, got {n}")
    if n == 2:
        return Fraction(0)
    return volume_exponent(build_root_data(Family.QUATERNION, n // 2))
