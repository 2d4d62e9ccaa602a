"""Exact Gaussian-integer scalars and integer polynomials over them.

Coordinates of every built-in construction live in Z or Z[i]; reduced norms
are homogeneous polynomials in the lattice coefficients with coefficients in
the same ring. Both are represented here with Python integers, so nothing
ever overflows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np


@dataclass(frozen=True, slots=True)
class GaussInt:
    """The value ``re + im*i`` with arbitrary-precision parts."""

    re: int
    im: int = 0

    @staticmethod
    def coerce(x) -> "GaussInt":
        if isinstance(x, GaussInt):
            return x
        if isinstance(x, (int, np.integer)):
            return GaussInt(int(x), 0)
        if isinstance(x, complex):
            if x.real != int(x.real) or x.imag != int(x.imag):
                raise ValueError(f"{x!r} is not a Gaussian integer")
            return GaussInt(int(x.real), int(x.imag))
        if isinstance(x, (tuple, list)) and len(x) == 2:
            return GaussInt(int(x[0]), int(x[1]))
        raise TypeError(f"cannot interpret {x!r} as a Gaussian integer")

    def __add__(self, other):
        if isinstance(other, (GaussInt, int, np.integer)):
            o = GaussInt.coerce(other)
            return GaussInt(self.re + o.re, self.im + o.im)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return GaussInt(-self.re, -self.im)

    def __sub__(self, other):
        if isinstance(other, (GaussInt, int, np.integer)):
            o = GaussInt.coerce(other)
            return GaussInt(self.re - o.re, self.im - o.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (GaussInt, int, np.integer)):
            return GaussInt.coerce(other) - self
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (GaussInt, int, np.integer)):
            o = GaussInt.coerce(other)
            return GaussInt(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = GaussInt(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            return self.im == 0 and self.re == int(other)
        if isinstance(other, GaussInt):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re or self.im)

    def conj(self) -> "GaussInt":
        return GaussInt(self.re, -self.im)

    def norm(self) -> int:
        """``|x|^2 = re^2 + im^2``."""
        return self.re * self.re + self.im * self.im

    def __complex__(self):
        return complex(self.re, self.im)

    def __abs__(self) -> float:
        return abs(complex(self.re, self.im))

    def __repr__(self):
        if self.im == 0:
            return f"GaussInt({self.re})"
        return f"GaussInt({self.re}, {self.im})"


ZERO = GaussInt(0)
ONE = GaussInt(1)
I = GaussInt(0, 1)


class Poly:
    """Polynomial in integer variables ``z_0..z_{k-1}`` with Gaussian-integer coefficients.

    Monomials are sorted tuples of variable indices, so ``(0, 0, 3)`` is
    ``z_0^2 z_3``. Only the ring operations needed to expand reduced norms are
    provided.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, GaussInt] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def var(cls, index: int, coeff=ONE) -> "Poly":
        return cls({(index,): GaussInt.coerce(coeff)})

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(): GaussInt.coerce(c)})

    @staticmethod
    def _lift(x) -> "Poly":
        if isinstance(x, Poly):
            return x
        return Poly.const(x)

    def __add__(self, other):
        o = self._lift(other)
        out = dict(self.terms)
        for m, c in o.terms.items():
            out[m] = out.get(m, ZERO) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        out: dict[tuple, GaussInt] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = tuple(sorted(m1 + m2))
                out[m] = out.get(m, ZERO) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return not bool(self - other)

    __hash__ = None

    def __repr__(self):
        return f"Poly({self.terms!r})"

    def degrees(self) -> set[int]:
        return {len(m) for m in self.terms}

    def evaluate(self, z: Iterable[int]) -> GaussInt:
        z = [int(v) for v in z]
        re = im = 0
        for m, c in self.terms.items():
            p = 1
            for j in m:
                p *= z[j]
            re += c.re * p
            im += c.im * p
        return GaussInt(re, im)

    def to_arrays(self):
        """Dense ``(index, re, im)`` arrays for the compiled kernels.

        Requires a homogeneous polynomial; monomial index rows have length
        equal to the degree.
        """
        degs = self.degrees()
        if len(degs) > 1:
            raise ValueError("polynomial is not homogeneous")
        d = degs.pop() if degs else 0
        items = sorted(self.terms.items())
        idx = np.zeros((len(items), max(d, 1)), dtype=np.int64)
        cre = np.zeros(len(items), dtype=np.int64)
        cim = np.zeros(len(items), dtype=np.int64)
        for t, (m, c) in enumerate(items):
            if d:
                idx[t, :] = m
            cre[t] = c.re
            cim[t] = c.im
        return idx, cre, cim, d
