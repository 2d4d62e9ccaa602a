"""Code lattices with exact reduced-norm evaluators.

Fields are described by an integral basis ``w_0 = 1, w_1, ...`` over the
base ring (Z or Z[i]), a multiplication table, the matrix of the generator
``sigma`` of the cyclic Galois group on coordinates, and the complex values
``emb[s, j] = sigma^s(w_j)`` under a fixed embedding.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import InvalidFieldData, NvdViolation, UnsupportedIndex
from .exact import ONE, ZERO, GaussInt, I, Poly
from .lattice import MatrixLattice, build_lattice


def _gi(x) -> GaussInt:
    return GaussInt.coerce(x)


@dataclass(frozen=True, eq=False)
class CyclicFieldData:
    degree: int
    base: str
    mult: tuple
    galois: tuple
    embeddings: np.ndarray
    disc_tag: str = ""
    radicand: int | None = None

    def __post_init__(self):
        if self.base not in ("Q", "Qi"):
            raise InvalidFieldData(f"base must be 'Q' or 'Qi', got {self.base!r}")
        n = self.degree
        if np.shape(self.embeddings) != (n, n):
            raise InvalidFieldData("embeddings must be a degree x degree array")
        if len(self.mult) != n or any(len(r) != n or any(len(c) != n for c in r) for r in self.mult):
            raise InvalidFieldData("multiplication table must be degree^3")

    @property
    def base_basis(self) -> tuple:
        return (ONE,) if self.base == "Q" else (ONE, I)

    # exact element arithmetic on coordinate lists (GaussInt or Poly entries)

    def mul(self, x: Sequence, y: Sequence) -> list:
        n = self.degree
        out = [ZERO] * n
        for a in range(n):
            if not x[a]:
                continue
            for b in range(n):
                if not y[b]:
                    continue
                xy = x[a] * y[b]
                for c in range(n):
                    t = self.mult[a][b][c]
                    if t:
                        out[c] = out[c] + xy * t
        return out

    def sigma(self, x: Sequence, power: int = 1) -> list:
        n = self.degree
        x = list(x)
        for _ in range(power % n):
            x = [sum((self.galois[a][b] * x[b] for b in range(n) if x[b] and self.galois[a][b]), ZERO) for a in range(n)]
        return x

    def embed(self, x: Sequence, s: int) -> complex:
        return complex(sum(complex(x[j]) * self.embeddings[s % self.degree, j] for j in range(self.degree)))

    def one(self) -> list:
        return [ONE] + [ZERO] * (self.degree - 1)

    def norm(self, x: Sequence) -> list:
        out = self.one()
        for s in range(self.degree):
            out = self.mul(out, self.sigma(x, s))
        return out

    def random_element(self, rng: random.Random, bound: int = 5) -> list:
        if self.base == "Q":
            return [GaussInt(rng.randint(-bound, bound)) for _ in range(self.degree)]
        return [GaussInt(rng.randint(-bound, bound), rng.randint(-bound, bound)) for _ in range(self.degree)]

    def validate(self, trials: int = 100, seed: int = 0) -> None:
        """Raise ``InvalidFieldData`` unless the tables define a cyclic extension."""
        n = self.degree
        e = [[ONE if a == b else ZERO for b in range(n)] for a in range(n)]
        for b in range(n):
            if self.mul(e[0], e[b]) != e[b]:
                raise InvalidFieldData("first basis element must be the identity")
        if self.sigma(e[0]) != e[0]:
            raise InvalidFieldData("sigma must fix 1")
        for b in range(n):
            if self.sigma(e[b], n) != e[b]:
                raise InvalidFieldData("sigma^n is not the identity")
        if n > 1 and all(self.sigma(e[b]) == e[b] for b in range(n)):
            raise InvalidFieldData("sigma is trivial")
        if abs(self.embeddings[0, 0] - 1) > 1e-10:
            raise InvalidFieldData("embedding of 1 must be 1")
        rng = random.Random(seed)
        for _ in range(trials):
            x, y, z = (self.random_element(rng) for _ in range(3))
            xy = self.mul(x, y)
            if xy != self.mul(y, x):
                raise InvalidFieldData("multiplication is not commutative")
            if self.mul(xy, z) != self.mul(x, self.mul(y, z)):
                raise InvalidFieldData("multiplication is not associative")
            if self.sigma(xy) != self.mul(self.sigma(x), self.sigma(y)):
                raise InvalidFieldData("sigma is not multiplicative")
            for s in range(n):
                ex, ey, exy = self.embed(x, s), self.embed(y, s), self.embed(xy, s)
                if abs(exy - ex * ey) > 1e-10 * max(1.0, abs(ex * ey)):
                    raise InvalidFieldData("embeddings are not multiplicative")
                if abs(self.embed(self.sigma(x), s) - self.embed(x, s + 1)) > 1e-10 * max(1.0, abs(ex)):
                    raise InvalidFieldData("embeddings are not compatible with sigma")


def quadratic_field(a: int, base: str = "Q") -> CyclicFieldData:
    """``F(sqrt a)/F`` with basis ``{1, sqrt a}`` or ``{1, (1+sqrt a)/2}`` when a = 1 mod 4."""
    a = int(a)
    if a in (0, 1) or any(a % (p * p) == 0 for p in range(2, int(abs(a) ** 0.5) + 1)):
        raise InvalidFieldData(f"radicand {a} is not a squarefree integer != 0, 1")
    if base == "Qi" and a == -1:
        raise InvalidFieldData("sqrt(-1) already lies in Q(i)")
    r = complex(np.sqrt(complex(a)))
    if a % 4 == 1:
        w = (1 + r) / 2
        mult = (((ONE, ZERO), (ZERO, ONE)), ((ZERO, ONE), (_gi((a - 1) // 4), ONE)))
        gal = ((ONE, ONE), (ZERO, -ONE))
        emb = np.array([[1, w], [1, 1 - w]], dtype=complex)
    else:
        mult = (((ONE, ZERO), (ZERO, ONE)), ((ZERO, ONE), (_gi(a), ZERO)))
        gal = ((ONE, ZERO), (ZERO, -ONE))
        emb = np.array([[1, r], [1, -r]], dtype=complex)
    f = CyclicFieldData(2, base, mult, gal, emb, disc_tag=f"{base}(sqrt({a}))", radicand=a)
    f.validate()
    return f


def trivial_field() -> CyclicFieldData:
    return CyclicFieldData(1, "Qi", (((ONE,),),), ((ONE,),), np.ones((1, 1), dtype=complex), "Q(i)/Q(i)")


@dataclass(frozen=True, eq=False)
class CyclicAlgebraSpec:
    field: CyclicFieldData
    gamma: GaussInt
    center: str

    def __post_init__(self):
        object.__setattr__(self, "gamma", _gi(self.gamma))
        if not self.gamma:
            raise InvalidFieldData("gamma must be nonzero")
        if self.center != self.field.base:
            raise InvalidFieldData("center tag must match the field's base")
        if self.center == "Q" and self.gamma.im:
            raise InvalidFieldData("gamma must be rational for center Q")

    @property
    def n(self) -> int:
        return self.field.degree

    # exact algebra arithmetic on lists [x_0, ..., x_{n-1}] with x = sum u^t x_t

    def mul(self, x: Sequence[Sequence], y: Sequence[Sequence]) -> list:
        n, F = self.n, self.field
        out = [[ZERO] * n for _ in range(n)]
        for t in range(n):
            for s in range(n):
                term = F.mul(F.sigma(x[t], s), y[s])
                e = t + s
                if e >= n:
                    term = [c * self.gamma for c in term]
                    e -= n
                out[e] = [p + q for p, q in zip(out[e], term)]
        return out

    def matrix(self, x: Sequence[Sequence]) -> np.ndarray:
        """Left-regular representation with entries ``sigma^c(x_{r-c})`` (times gamma above the diagonal)."""
        n, F = self.n, self.field
        g = complex(self.gamma)
        out = np.zeros((n, n), dtype=complex)
        for r in range(n):
            for c in range(n):
                if r >= c:
                    out[r, c] = F.embed(x[r - c], c)
                else:
                    out[r, c] = g * F.embed(x[n + r - c], c)
        return out

    def reduced_norm(self, x: Sequence[Sequence]) -> list:
        """Exact determinant of the left-regular matrix, as field coordinates."""
        n, F = self.n, self.field

        def entry(r, c):
            if r >= c:
                return F.sigma(x[r - c], c)
            return [v * self.gamma for v in F.sigma(x[n + r - c], c)]

        total = [ZERO] * n
        for perm in itertools.permutations(range(n)):
            sign = _perm_sign(perm)
            term = F.one()
            for r in range(n):
                term = F.mul(term, entry(r, perm[r]))
            total = [a + b if sign > 0 else a - b for a, b in zip(total, term)]
        return total


def _perm_sign(perm) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


@dataclass(frozen=True, eq=False)
class CodeDescriptor:
    """What a lattice is, algebraically; drives predictions and unit searches."""

    name: str
    kind: str  # "number_field" or "cyclic"
    field: CyclicFieldData
    spec: CyclicAlgebraSpec | None = None
    extras: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.field.degree

    @property
    def center(self) -> str:
        return self.field.base

    @property
    def algebra_block(self) -> dict | None:
        if self.spec is None or self.field.radicand is None:
            return None
        g = self.spec.gamma
        return {"a": self.field.radicand, "gamma": g.re if self.center == "Q" else [g.re, g.im], "center": self.center}

    # coordinate maps between lattice coefficients and exact elements

    def _elements(self, z: Sequence) -> list:
        F = self.field
        bb = F.base_basis
        nb = len(bb)
        return [
            [sum((bb[e] * z[(t * F.degree + j) * nb + e] for e in range(nb)), ZERO) for j in range(F.degree)]
            for t in range(self.n if self.kind == "cyclic" else 1)
        ]

    def to_element(self, z: Sequence):
        """Lattice coefficients to field coordinates (number field) or [x_0, .., x_{n-1}] (algebra)."""
        els = self._elements(list(z))
        return els if self.kind == "cyclic" else els[0]

    def from_element(self, x) -> tuple:
        parts = x if self.kind == "cyclic" else [x]
        out = []
        for xt in parts:
            for c in xt:
                c = _gi(c)
                out.extend([c.re] if self.center == "Q" else [c.re, c.im])
        return tuple(out)

    def multiply(self, zx: Sequence, zy: Sequence) -> tuple:
        x, y = self.to_element(zx), self.to_element(zy)
        if self.kind == "cyclic":
            return self.from_element(self.spec.mul(x, y))
        return self.from_element(self.field.mul(x, y))


def _coeff_polys(F: CyclicFieldData, offset: int) -> list:
    """Field coordinates of a generic element whose lattice variables start at ``offset``."""
    bb = F.base_basis
    nb = len(bb)
    return [sum((Poly.var(offset + j * nb + e, bb[e]) for e in range(nb)), Poly()) for j in range(F.degree)]


def _central_part(coords: list, what: str) -> Poly:
    if any(bool(c) for c in coords[1:]):
        raise InvalidFieldData(f"{what} does not lie in the base field")
    c0 = coords[0]
    return c0 if isinstance(c0, Poly) else Poly.const(c0)


def diagonal_nf_lattice(F: CyclicFieldData, name: str | None = None) -> MatrixLattice:
    """``psi(O_K) = {diag(sigma_0(x), .., sigma_{n-1}(x))}`` with exact relative norm."""
    if F.base != "Qi":
        raise InvalidFieldData("diagonal number-field codes require base Q(i)")
    F.validate()
    n = F.degree
    basis = []
    for j in range(n):
        for e in F.base_basis:
            x = [ZERO] * n
            x[j] = e
            basis.append(np.diag([F.embed(x, s) for s in range(n)]))
    det = _central_part(F.norm(_coeff_polys(F, 0)), "relative norm")
    desc = CodeDescriptor(name or F.disc_tag, "number_field", F)
    return build_lattice(basis, det, tag=name or F.disc_tag, descriptor=desc)


def cyclic_algebra_lattice(spec: CyclicAlgebraSpec, name: str | None = None) -> MatrixLattice:
    """Natural order ``O_E + u O_E + ...`` under the left-regular representation."""
    n, F = spec.n, spec.field
    try:
        F.validate()
    except InvalidFieldData as exc:
        if n > 2:
            raise UnsupportedIndex(f"index {n} requires complete field data: {exc}") from exc
        raise
    nb = len(F.base_basis)
    basis = []
    for t in range(n):
        for j in range(n):
            for e in F.base_basis:
                x = [[ZERO] * n for _ in range(n)]
                x[t][j] = e
                basis.append(spec.matrix(x))
    generic = [_coeff_polys(F, t * n * nb) for t in range(n)]
    det = _central_part(spec.reduced_norm(generic), "reduced norm")
    tag = name or f"({F.disc_tag},gamma={spec.gamma})"
    desc = CodeDescriptor(tag, "cyclic", F, spec)
    return build_lattice(basis, det, tag=tag, descriptor=desc)


def infinite_place_ramified(spec: CyclicAlgebraSpec) -> bool:
    """True when ``(a, gamma)_Q`` tensored with R is the Hamilton quaternions."""
    if spec.center != "Q" or spec.n != 2 or spec.field.radicand is None:
        raise UnsupportedIndex("ramification test covers quaternion algebras over Q only")
    return spec.field.radicand < 0 and spec.gamma.re < 0


@dataclass(frozen=True)
class NvdReport:
    radius: float
    points: int
    min_abs_det: float
    passed: bool


def nvd_check(L: MatrixLattice, M: float, threads: int = 1) -> NvdReport:
    """Exhaustive exact check that no nonzero point of ``L(M)`` has zero determinant."""
    from .enumeration import ball_statistics

    if L.det_poly is None:
        raise ValueError("nvd_check needs an exact determinant evaluator")
    st = ball_statistics(L, [M], det="exact", threads=threads)
    if st.zeros[0]:
        raise NvdViolation(st.first_zero)
    return NvdReport(float(M), st.counts[0], float(np.sqrt(st.min_abs2)), True)


# --- built-in constructions -------------------------------------------------


class BuiltinCode(enum.Enum):
    GAUSSIAN = "gaussian"
    NF_QI_SQRT5 = "nf-sqrt5"
    NF_QI_SQRT2 = "nf-sqrt2"
    ALAMOUTI = "alamouti"
    L1 = "l1"
    L2 = "l2"
    GOLDEN_ORDER = "golden-order"


CLI_NAMES = tuple(c.value for c in BuiltinCode)


@lru_cache(maxsize=None)
def _builtin(code: BuiltinCode) -> MatrixLattice:
    name = code.value
    if code is BuiltinCode.GAUSSIAN:
        return diagonal_nf_lattice(trivial_field(), name)
    if code is BuiltinCode.NF_QI_SQRT5:
        return diagonal_nf_lattice(quadratic_field(5, "Qi"), name)
    if code is BuiltinCode.NF_QI_SQRT2:
        return diagonal_nf_lattice(quadratic_field(2, "Qi"), name)
    if code is BuiltinCode.GOLDEN_ORDER:
        return cyclic_algebra_lattice(CyclicAlgebraSpec(quadratic_field(5, "Qi"), I, "Qi"), name)
    gamma = {BuiltinCode.ALAMOUTI: -1, BuiltinCode.L1: 3, BuiltinCode.L2: -3}[code]
    return cyclic_algebra_lattice(CyclicAlgebraSpec(quadratic_field(-1, "Q"), gamma, "Q"), name)


def builtin(code: BuiltinCode | str) -> MatrixLattice:
    if isinstance(code, str):
        try:
            code = BuiltinCode(code.lower())
        except ValueError:
            code = BuiltinCode[code.upper()]
    return _builtin(code)


def lattice_from_algebra_block(block: dict) -> MatrixLattice:
    """Quaternion-type code from ``{"a": int, "gamma": int | [re, im], "center": "Q" | "Qi"}``."""
    center = block.get("center", "Q")
    F = quadratic_field(int(block["a"]), center)
    return cyclic_algebra_lattice(CyclicAlgebraSpec(F, _gi(block["gamma"]), center))
