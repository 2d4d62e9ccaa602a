"""Growth-exponent fits, predicted exponents, DMT curves and the union bound."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import InsufficientRange, OutOfRegime

DEFAULT_TRIM = 0.25
MIN_POINTS = 4
MIN_DECADES = 0.5

# tolerances of the acceptance suite, reused by report verdicts
POWER_TOL = 0.35
FLAT_TOL = 0.15
POLYLOG_MAX_SLOPE = 0.2


@dataclass(frozen=True)
class GrowthFit:
    slope: float
    intercept: float
    stderr: float
    r2: float
    points_used: tuple
    min_points: int = MIN_POINTS
    excluded_zero: int = 0

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "stderr": self.stderr,
            "r2": self.r2,
            "points_used": len(self.points_used),
            "excluded_zero": self.excluded_zero,
        }


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, float]:
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    intercept = float(ym - slope * xm)
    resid = y - (intercept + slope * x)
    ssr = float(np.sum(resid**2))
    sst = float(np.sum((y - ym) ** 2))
    stderr = math.sqrt(ssr / (len(x) - 2) / sxx) if len(x) > 2 else math.inf
    r2 = 1.0 - ssr / sst if sst > 0 else 1.0
    return slope, intercept, stderr, r2


def fit_growth(
    M,
    values=None,
    window: tuple[float, float] | None = None,
    trim: float = DEFAULT_TRIM,
    min_points: int = MIN_POINTS,
    min_decades: float = MIN_DECADES,
) -> GrowthFit:
    """OLS slope of ``log(value)`` against ``log(M)``.

    Accepts two sequences or one sequence of ``(M, value)`` pairs. Without a
    ``window`` the smallest ``trim`` fraction of radii is dropped; with one,
    exactly the radii inside it are used. Zero values are excluded and
    counted. ``min_decades`` lowers the span check for fixed narrow windows.
    """
    if values is None:
        pairs = [(float(a), float(b)) for a, b in M]
    else:
        pairs = [(float(a), float(b)) for a, b in zip(M, values)]
    pairs.sort()
    if window is not None:
        lo, hi = window
        pairs = [p for p in pairs if lo <= p[0] <= hi]
    else:
        pairs = pairs[int(math.floor(trim * len(pairs))):]
    zero = sum(1 for _, v in pairs if v == 0)
    if any(v < 0 for _, v in pairs):
        raise ValueError("growth fits need nonnegative values")
    pts = [(a, v) for a, v in pairs if v > 0 and a > 0]
    if len(pts) < min_points:
        raise InsufficientRange(f"{len(pts)} usable points, need {min_points}")
    span = math.log10(pts[-1][0] / pts[0][0])
    if span < min_decades:
        raise InsufficientRange(f"radii span {span:.3f} decades, need {min_decades}")
    x = np.log([a for a, _ in pts])
    y = np.log([v for _, v in pts])
    slope, intercept, stderr, r2 = _ols(x, y)
    used = tuple((float(a), float(b)) for a, b in zip(x, y))
    return GrowthFit(slope, intercept, stderr, r2, used, min_points, zero)


# --- regimes and predicted exponents ----------------------------------------

NUMBER_FIELD = "number_field"
COMPLEX_CENTER = "complex_center"
Q_UNRAMIFIED = "q_unramified"
Q_RAMIFIED = "q_ramified"

_LABELS = {
    NUMBER_FIELD: "number field",
    COMPLEX_CENTER: "division algebra, imaginary quadratic center",
    Q_UNRAMIFIED: "division algebra, center Q, unramified at infinity",
    Q_RAMIFIED: "division algebra, center Q, ramified at infinity",
}


@dataclass(frozen=True)
class Regime:
    kind: str
    n: int
    label: str = ""

    def __post_init__(self):
        if self.kind not in _LABELS:
            raise ValueError(f"unknown regime {self.kind!r}")
        if not self.label:
            object.__setattr__(self, "label", _LABELS[self.kind])

    @property
    def k(self) -> int:
        """Lattice rank of the natural construction in this regime."""
        return {NUMBER_FIELD: 2 * self.n, COMPLEX_CENTER: 2 * self.n**2}.get(self.kind, self.n**2)


def regime_of(obj) -> Regime:
    """Regime of a lattice, descriptor, built-in name or ready-made ``Regime``."""
    if isinstance(obj, Regime):
        return obj
    from .constructions import builtin, infinite_place_ramified
    from .lattice import MatrixLattice

    if isinstance(obj, str) or obj.__class__.__name__ == "BuiltinCode":
        obj = builtin(obj)
    desc = obj.descriptor if isinstance(obj, MatrixLattice) else obj
    if desc is None:
        raise OutOfRegime("lattice carries no algebraic description")
    if desc.kind == "number_field":
        label = "number field (trivial)" if desc.n == 1 else ""
        return Regime(NUMBER_FIELD, desc.n, label)
    if desc.center == "Qi":
        return Regime(COMPLEX_CENTER, desc.n)
    if desc.spec.field.radicand is not None and desc.n == 2:
        ram = infinite_place_ramified(desc.spec)
        return Regime(Q_RAMIFIED if ram else Q_UNRAMIFIED, desc.n)
    raise OutOfRegime("ramification at infinity undetermined for this algebra")


@dataclass(frozen=True)
class Prediction:
    exponent: Fraction
    tag: str
    regime: Regime
    polylog: bool = False

    def to_dict(self) -> dict:
        return {
            "exponent": float(self.exponent),
            "tag": self.tag,
            "regime": self.regime.kind,
            "regime_label": self.regime.label,
            "polylog": self.polylog,
        }


def min_receive_antennas(reg: Regime) -> Fraction:
    if reg.kind == COMPLEX_CENTER:
        return Fraction(reg.n)
    if reg.kind in (Q_UNRAMIFIED, Q_RAMIFIED):
        return Fraction(reg.n, 2)
    return Fraction(1)


def predicted_exponent(spec, n_r: int) -> Prediction:
    """Exponent of ``S^{2 n_r}`` growth in the regime of the given code.

    Number fields grow polylogarithmically; that is reported as exponent 0
    with ``polylog=True``.
    """
    reg = regime_of(spec)
    n = reg.n
    if n_r < 1:
        raise OutOfRegime("n_r must be positive")
    if n_r < min_receive_antennas(reg):
        raise OutOfRegime(f"n_r={n_r} below {min_receive_antennas(reg)} for {reg.label}")
    if reg.kind == NUMBER_FIELD:
        return Prediction(Fraction(0), "number-field-polylog", reg, polylog=True)
    if reg.kind == COMPLEX_CENTER:
        return Prediction(Fraction(2 * n * n - 2 * n), "complex-center-unit-growth", reg)
    if reg.kind == Q_UNRAMIFIED:
        return Prediction(Fraction(n * n - n), "q-central-unramified", reg)
    if n % 2:
        raise OutOfRegime("ramified prediction needs even index")
    return Prediction(Fraction(n * n - 2 * n), "q-central-ramified", reg)


def dmt_sum_lower_exponent(n: int, k: int, n_r: int) -> Fraction:
    """Information-theoretic lower exponent ``n_r k/n + k - k/n - 2 n n_r``."""
    if n < 1 or n_r < 1 or not 1 <= k <= 2 * n * n:
        raise ValueError("need n >= 1, n_r >= 1 and 1 <= k <= 2n^2")
    return Fraction(n_r * k, n) + k - Fraction(k, n) - 2 * n * n_r


# --- DMT curves -------------------------------------------------------------


@dataclass(frozen=True)
class DmtCurve:
    vertices: tuple
    label: str = ""
    unclipped: tuple | None = None
    meets_optimal: bool | None = None

    def __post_init__(self):
        v = tuple((Fraction(r), Fraction(d)) for r, d in self.vertices)
        object.__setattr__(self, "vertices", v)
        if any(b[0] <= a[0] for a, b in zip(v, v[1:])):
            raise ValueError("r must be strictly increasing")
        if any(b[1] > a[1] for a, b in zip(v, v[1:])):
            raise ValueError("d must be nonincreasing")
        if any(d < 0 for _, d in v):
            raise ValueError("d must be nonnegative")

    def __call__(self, r) -> Fraction:
        r = Fraction(r)
        v = self.vertices
        if not v[0][0] <= r <= v[-1][0]:
            raise ValueError(f"r={r} outside the curve's range")
        for (r0, d0), (r1, d1) in zip(v, v[1:]):
            if r0 <= r <= r1:
                return d0 + (d1 - d0) * (r - r0) / (r1 - r0)
        return v[0][1]

    def to_dict(self) -> dict:
        out = {"label": self.label, "vertices": [[float(r), float(d)] for r, d in self.vertices]}
        if self.unclipped is not None:
            out["unclipped"] = [[float(r), float(d)] for r, d in self.unclipped]
        if self.meets_optimal is not None:
            out["meets_optimal"] = self.meets_optimal
        return out


def optimal_dmt(n_t: int, n_r: int) -> DmtCurve:
    if n_t < 1 or n_r < 1:
        raise ValueError("antenna counts must be positive")
    return DmtCurve(
        tuple((r, (n_t - r) * (n_r - r)) for r in range(min(n_t, n_r) + 1)),
        label=f"optimal {n_t}x{n_r}",
    )


def _clip(p0, p1) -> tuple:
    (r0, d0), (r1, d1) = p0, p1
    if d1 >= 0:
        return (p0, p1)
    if d0 <= 0:
        return ((r0, Fraction(0)), (r1, Fraction(0)))
    rc = r0 + (r1 - r0) * d0 / (d0 - d1)
    return ((r0, d0), (rc, Fraction(0)), (r1, Fraction(0)))


def code_dmt_segment(spec, n_r: int) -> DmtCurve:
    """Straight-line DMT lower bound on ``r in [0, 1]`` for the regime of the given code."""
    reg = regime_of(spec)
    n = reg.n
    if n_r < min_receive_antennas(reg):
        raise OutOfRegime(f"n_r={n_r} below {min_receive_antennas(reg)} for {reg.label}")
    d0 = Fraction(n * n_r)
    if reg.kind == NUMBER_FIELD:
        d1 = Fraction(0)
    elif reg.kind == COMPLEX_CENTER:
        d1 = Fraction(n * n_r - n - n_r + 1)
    elif reg.kind == Q_UNRAMIFIED:
        d1 = Fraction(n * n_r - 2 * n_r - n + 1)
    else:
        if n % 2:
            raise OutOfRegime("ramified segment needs even index")
        d1 = Fraction(n * n_r - 2 * n_r - n + 2)
    raw = ((Fraction(0), d0), (Fraction(1), d1))
    opt = optimal_dmt(n, n_r)
    meets = d0 == opt(0) and d1 == opt(1)
    return DmtCurve(_clip(*raw), label=f"{reg.label}, n={n}, n_r={n_r}", unclipped=raw, meets_optimal=meets)


# --- union bound ------------------------------------------------------------


@dataclass(frozen=True)
class UnionBoundRow:
    rho: float
    radius_target: float
    radius_used: float
    bound: float
    extrapolated: bool


def union_bound_eval(table, n: int, k: int, n_r: int, rho_grid: Iterable[float], r: float) -> tuple:
    """``rho^{-n n_r (1 - 2 n r / k)} * S(2 rho^{r n / k})`` using the nearest table radius.

    Nearness is measured in ``log M``; rows whose target radius lies outside
    the table's range are flagged as extrapolated.
    """
    radii = np.asarray(table.radii, dtype=float)
    sums = table.column("sum") if hasattr(table, "column") else np.asarray([row[1] for row in table.rows])
    lr = np.log(radii)
    out = []
    for rho in rho_grid:
        rho = float(rho)
        target = 2.0 * rho ** (r * n / k)
        j = int(np.argmin(np.abs(lr - math.log(target))))
        extrap = target < radii[0] or target > radii[-1]
        bound = rho ** (-n * n_r * (1 - 2 * n * r / k)) * float(sums[j])
        out.append(UnionBoundRow(rho, target, float(radii[j]), bound, bool(extrap)))
    return tuple(out)


# --- verdicts ---------------------------------------------------------------

MATCHES = "MATCHES_PREDICTION"
INCONCLUSIVE = "INCONCLUSIVE"
MISMATCH = "MISMATCH"


def tolerance_for(pred: Prediction) -> float:
    if pred.polylog:
        return POLYLOG_MAX_SLOPE
    return POWER_TOL if pred.exponent > 0 else FLAT_TOL


def verdict(measured: float | None, pred: Prediction | None) -> str:
    """Compare a fitted slope with a prediction using the acceptance tolerances."""
    if measured is None or pred is None:
        return INCONCLUSIVE
    if pred.polylog:
        return MATCHES if measured <= POLYLOG_MAX_SLOPE else MISMATCH
    return MATCHES if abs(measured - float(pred.exponent)) <= tolerance_for(pred) else MISMATCH
