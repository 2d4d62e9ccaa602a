"""Matrix lattices in M_n(C): flattening, Gram data, covolume and single points."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import DependentBasis
from .exact import GaussInt, Poly

DEPENDENCE_RTOL = 1e-10
INTEGRALITY_TOL = 1e-9


def flatten(X) -> np.ndarray:
    """Real vector ``(Re x_11, Im x_11, Re x_12, ...)`` of length ``2 n^2``.

    The map is R-linear and sends the Frobenius norm to the Euclidean norm.
    Leading batch axes are kept, so a ``(k, n, n)`` stack flattens to
    ``(k, 2 n^2)``.
    """
    X = np.asarray(X, dtype=complex)
    if X.ndim < 2 or X.shape[-1] != X.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {X.shape}")
    lead = X.shape[:-2]
    return np.stack([X.real, X.imag], axis=-1).reshape(lead + (-1,))


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MatrixLattice:
    """A rank-k lattice spanned by ``basis[0..k-1]`` inside M_n(C).

    ``det_poly`` is the exact reduced-norm polynomial in the integer
    coordinates when the lattice comes from a known algebraic construction.
    ``gram2`` holds ``2*gram`` as int64 when that matrix is integral, which
    lets the enumerator decide ball membership exactly.
    """

    n: int
    k: int
    basis: np.ndarray
    gram: np.ndarray
    covolume: float
    det_poly: Poly | None = None
    tag: str | None = None
    descriptor: Any = None
    gram2: np.ndarray | None = field(default=None, repr=False)

    @property
    def has_exact_det(self) -> bool:
        return self.det_poly is not None

    @property
    def exact_det(self) -> str | None:
        """Tag of the exact evaluator, ``None`` for raw float lattices."""
        if self.det_poly is None:
            return None
        return f"nrd:{self.tag or 'user'}"

    def matrix(self, z) -> np.ndarray:
        z = np.asarray([float(v) for v in z])
        return np.tensordot(z, self.basis, axes=1)

    def sqnorm(self, z) -> float:
        if self.gram2 is not None:
            zi = [int(v) for v in z]
            g = self.gram2
            q = 0
            for a in range(self.k):
                if zi[a]:
                    q += zi[a] * sum(int(g[a, b]) * zi[b] for b in range(self.k))
            return q / 2
        zf = np.asarray(z, dtype=float)
        return float(zf @ self.gram @ zf)

    def scaled(self, c: float) -> "MatrixLattice":
        """The lattice ``c*L`` with float determinants only."""
        return build_lattice(self.basis * c, tag=f"{self.tag}*{c:g}" if self.tag else None)

    def left_multiplied(self, A) -> "MatrixLattice":
        """The lattice ``A*L`` (float determinants only)."""
        A = np.asarray(A, dtype=complex)
        return build_lattice(np.einsum("ij,kjl->kil", A, self.basis), tag=f"A*{self.tag}")


def _integral_double(gram: np.ndarray) -> np.ndarray | None:
    g2 = 2.0 * gram
    r = np.rint(g2)
    scale = max(1.0, float(np.max(np.abs(g2))))
    if np.all(np.abs(g2 - r) <= INTEGRALITY_TOL * scale) and np.max(np.abs(r)) < 2**31:
        return r.astype(np.int64)
    return None


def build_lattice(
    basis: Sequence,
    exact_det: Poly | None = None,
    *,
    tag: str | None = None,
    descriptor: Any = None,
) -> MatrixLattice:
    B = np.asarray(basis, dtype=complex)
    if B.ndim == 2 and B.shape[0] == B.shape[1]:
        B = B[None]
    if B.ndim != 3 or B.shape[1] != B.shape[2]:
        raise ValueError(f"basis must be a list of square matrices, got shape {B.shape}")
    k, n = B.shape[0], B.shape[1]
    if not 1 <= k <= 2 * n * n:
        raise ValueError(f"rank {k} outside 1..{2 * n * n}")
    F = flatten(B)
    gram = F @ F.T
    gram = 0.5 * (gram + gram.T)
    d = float(np.linalg.det(gram))
    gmax = float(np.max(np.abs(gram)))
    if not d > DEPENDENCE_RTOL * gmax**k:
        raise DependentBasis(f"Gram determinant {d:.3g} too small for rank {k}")
    if exact_det is not None and exact_det.degrees() - {n}:
        raise ValueError(f"exact determinant must be homogeneous of degree {n}")
    return MatrixLattice(
        n=n,
        k=k,
        basis=_readonly(B),
        gram=_readonly(gram),
        covolume=math.sqrt(d),
        det_poly=exact_det,
        tag=tag,
        descriptor=descriptor,
        gram2=None if (g2 := _integral_double(gram)) is None else _readonly(g2),
    )


@dataclass(frozen=True, eq=False)
class LatticePoint:
    coeffs: tuple
    matrix: np.ndarray
    frobenius: float
    det_exact: GaussInt | None
    det_abs: float


def float_det(X: np.ndarray) -> complex:
    return complex(np.linalg.det(np.asarray(X, dtype=complex)))


def point_from_coeffs(L: MatrixLattice, z) -> LatticePoint:
    z = tuple(int(v) for v in z)
    if len(z) != L.k:
        raise ValueError(f"expected {L.k} coefficients, got {len(z)}")
    X = L.matrix(z)
    X.setflags(write=False)
    frob = math.sqrt(max(L.sqnorm(z), 0.0))
    if L.det_poly is not None:
        det = L.det_poly.evaluate(z)
        det_abs = math.sqrt(det.norm())
    else:
        det = None
        det_abs = abs(float_det(X)) if any(z) else 0.0
    return LatticePoint(coeffs=z, matrix=X, frobenius=frob, det_exact=det, det_abs=det_abs)


# --- JSON descriptors -------------------------------------------------------


def lattice_to_json(L: MatrixLattice) -> dict:
    out = {
        "n": L.n,
        "k": L.k,
        "basis": [[[float(x.real) + 0.0, float(x.imag) + 0.0] for x in B.reshape(-1)] for B in L.basis],
    }
    if L.tag:
        out["construction"] = L.tag
    desc = L.descriptor
    if desc is not None and getattr(desc, "algebra_block", None):
        out["algebra"] = desc.algebra_block
    return out


def _parse_basis(obj: dict) -> np.ndarray:
    n, k = int(obj["n"]), int(obj["k"])
    raw = obj["basis"]
    if len(raw) != k:
        raise ValueError(f"descriptor declares k={k} but lists {len(raw)} matrices")
    mats = []
    for entry in raw:
        arr = np.asarray(entry, dtype=float)
        if arr.shape == (n * n, 2):
            arr = arr.reshape(n, n, 2)
        if arr.shape != (n, n, 2):
            raise ValueError(f"matrix entry has shape {arr.shape}, expected ({n},{n},2)")
        mats.append(arr[..., 0] + 1j * arr[..., 1])
    return np.asarray(mats)


def lattice_from_json(obj: dict | str) -> MatrixLattice:
    """Load a descriptor; known construction tags and algebra blocks rebuild exactly."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    from . import constructions

    lat = None
    if "algebra" in obj:
        lat = constructions.lattice_from_algebra_block(obj["algebra"])
    elif obj.get("construction") in constructions.CLI_NAMES:
        lat = constructions.builtin(obj["construction"])
    if lat is None:
        return build_lattice(_parse_basis(obj), tag=obj.get("construction"))
    if obj.get("basis"):
        given = _parse_basis(obj)
        if given.shape != lat.basis.shape or not np.allclose(given, lat.basis, atol=1e-9):
            raise ValueError("descriptor basis does not match its declared construction")
    return lat
