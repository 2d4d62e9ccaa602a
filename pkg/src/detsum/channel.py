"""Quasi-static Rayleigh MIMO simulation with exhaustive ML decoding.

Randomness comes from a Philox counter-based generator keyed by
``(seed, snr_index)``. Block ``b`` always reads the same fixed-size window of
the stream (its counter offset is ``b * words_per_block``), so results do not
depend on how blocks are chunked or spread over threads.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Sequence

import numpy as np
from numba import njit

from .errors import UnsupportedLattice
from .lattice import MatrixLattice

QAM16 = (-3, -1, 1, 3)
Z95 = NormalDist().inv_cdf(0.975)
MIN_BLOCKS = 10_000


@dataclass(frozen=True, eq=False)
class Codebook:
    codewords: np.ndarray  # (C, n, T) complex
    coeffs: np.ndarray  # (C, k) integer lattice coefficients
    scale: float
    source: str

    @property
    def size(self) -> int:
        return self.codewords.shape[0]

    @property
    def n(self) -> int:
        return self.codewords.shape[1]

    @property
    def T(self) -> int:
        return self.codewords.shape[2]

    @property
    def rate(self) -> float:
        """Bits per channel use."""
        return math.log2(self.size) / self.T

    def mean_energy(self) -> float:
        return float(np.mean(np.sum(np.abs(self.codewords) ** 2, axis=(1, 2))))


def qam_codebook(L: MatrixLattice, constellation: Sequence[int] = QAM16) -> Codebook:
    """All coefficient vectors with entries in ``constellation``, power-normalized.

    Consecutive coefficient pairs form one complex QAM symbol, so a rank
    ``2n`` lattice gives ``len(constellation)^(2n)`` codewords.
    """
    if L.k != 2 * L.n:
        raise UnsupportedLattice(f"need rank 2n for complex-pair coordinates, got k={L.k}, n={L.n}")
    coeffs = np.array(list(itertools.product(constellation, repeat=L.k)), dtype=np.int64)
    X = np.tensordot(coeffs.astype(float), L.basis, axes=1)
    energy = np.mean(np.sum(np.abs(X) ** 2, axis=(1, 2)))
    scale = math.sqrt(L.n * L.n / energy)
    X = np.ascontiguousarray(X * scale)
    X.setflags(write=False)
    coeffs.setflags(write=False)
    return Codebook(X, coeffs, scale, f"{L.tag}/qam{len(constellation) ** 2}")


@dataclass(frozen=True)
class SimConfig:
    n_t: int
    n_r: int
    T: int
    snr_db_grid: tuple
    blocks_per_point: int
    seed: int
    decoder: str = "EXHAUSTIVE"
    noiseless: bool = False
    chunk_blocks: int = 1 << 14
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "snr_db_grid", tuple(float(s) for s in self.snr_db_grid))
        if self.n_t != self.T:
            raise ValueError("simulation requires n_t == T")
        if self.decoder != "EXHAUSTIVE":
            raise ValueError("only the exhaustive decoder is available")
        if self.blocks_per_point < MIN_BLOCKS:
            raise ValueError(f"blocks_per_point must be at least {MIN_BLOCKS}")
        if self.chunk_blocks < 1:
            raise ValueError("chunk_blocks must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


def wilson_interval(errors: int, blocks: int, z: float = Z95) -> tuple[float, float]:
    p = errors / blocks
    z2n = z * z / blocks
    center = (p + z2n / 2) / (1 + z2n)
    half = z / (1 + z2n) * math.sqrt(p * (1 - p) / blocks + z * z / (4 * blocks * blocks))
    return center - half, center + half


@dataclass(frozen=True)
class BlerRow:
    snr_db: float
    blocks: int
    block_errors: int
    bler: float = field(init=False)
    ci95: float = field(init=False)
    ci_low: float = field(init=False)
    ci_high: float = field(init=False)

    def __post_init__(self):
        lo, hi = wilson_interval(self.block_errors, self.blocks)
        object.__setattr__(self, "bler", self.block_errors / self.blocks)
        object.__setattr__(self, "ci_low", lo)
        object.__setattr__(self, "ci_high", hi)
        object.__setattr__(self, "ci95", (hi - lo) / 2)


def bler_csv(rows: Sequence[BlerRow]) -> str:
    lines = ["snr_db,blocks,errors,bler,ci95"]
    lines += [f"{r.snr_db:g},{r.blocks},{r.block_errors},{r.bler:.10g},{r.ci95:.10g}" for r in rows]
    return "\n".join(lines) + "\n"


# --- kernels ----------------------------------------------------------------

_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True, nogil=True)
def _u01(w):
    """Uniform on (0, 1] from the top 53 bits."""
    return ((w >> np.uint64(11)) + np.uint64(1)) * _INV53


@njit(cache=True, nogil=True)
def _fill_gauss(raw, off, out):
    """Box-Muller: two words per complex entry of unit variance."""
    m = out.size
    flat = out.reshape(-1)
    for p in range(m):
        u1 = _u01(raw[off + 2 * p])
        u2 = _u01(raw[off + 2 * p + 1])
        r = np.sqrt(-np.log(u1))  # scale 1/sqrt(2) per real component
        t = 2.0 * np.pi * u2
        flat[p] = complex(r * np.cos(t), r * np.sin(t))
    return off + 2 * m


@njit(cache=True, nogil=True)
def decode(Y, H, codewords, amp):
    """Index minimizing ``||Y - amp * H X||_F``; ties go to the lowest index."""
    C = codewords.shape[0]
    best = np.inf
    arg = -1
    n_r, T = Y.shape
    n_t = H.shape[1]
    for c in range(C):
        d = 0.0
        for i in range(n_r):
            for t in range(T):
                s = 0.0 + 0.0j
                for j in range(n_t):
                    s += H[i, j] * codewords[c, j, t]
                e = Y[i, t] - amp * s
                d += e.real * e.real + e.imag * e.imag
        if d < best:
            best = d
            arg = c
    return arg


@njit(cache=True, nogil=True)
def _run_blocks(raw, words, codewords, amp, n_r, noiseless):
    nb = raw.shape[0] // words
    C, n_t, T = codewords.shape
    H = np.empty((n_r, n_t), dtype=np.complex128)
    N = np.empty((n_r, T), dtype=np.complex128)
    Y = np.empty((n_r, T), dtype=np.complex128)
    errors = 0
    for b in range(nb):
        off = b * words
        idx = np.int64((raw[off] >> np.uint64(32)) * np.uint64(C) >> np.uint64(32))
        off = _fill_gauss(raw, off + 1, H)
        off = _fill_gauss(raw, off, N)
        for i in range(n_r):
            for t in range(T):
                s = 0.0 + 0.0j
                for j in range(n_t):
                    s += H[i, j] * codewords[idx, j, t]
                Y[i, t] = amp * s
                if not noiseless:
                    Y[i, t] += N[i, t]
        if decode(Y, H, codewords, amp) != idx:
            errors += 1
    return errors


def words_per_block(n_r: int, n_t: int, T: int) -> int:
    """64-bit words per block, rounded up to whole Philox counter steps."""
    need = 1 + 2 * n_r * n_t + 2 * n_r * T
    return 4 * math.ceil(need / 4)


def _stream(seed: int, point: int, first_block: int, nblocks: int, words: int) -> np.ndarray:
    bg = np.random.Philox(key=np.array([seed, point], dtype=np.uint64), counter=(first_block * words) // 4)
    return bg.random_raw(nblocks * words)


def simulate(codebook: Codebook, cfg: SimConfig) -> list[BlerRow]:
    if codebook.n != cfg.n_t or codebook.T != cfg.T:
        raise ValueError("codebook shape does not match n_t x T")
    words = words_per_block(cfg.n_r, cfg.n_t, cfg.T)
    X = np.ascontiguousarray(codebook.codewords)
    rows = []
    for point, snr_db in enumerate(cfg.snr_db_grid):
        amp = math.sqrt(10 ** (snr_db / 10) / cfg.n_t)
        starts = range(0, cfg.blocks_per_point, cfg.chunk_blocks)

        def chunk(b0, point=point, amp=amp):
            nb = min(cfg.chunk_blocks, cfg.blocks_per_point - b0)
            raw = _stream(cfg.seed, point, b0, nb, words)
            return _run_blocks(raw, words, X, amp, cfg.n_r, cfg.noiseless)

        if cfg.threads > 1:
            with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
                errors = sum(ex.map(chunk, starts))
        else:
            errors = sum(chunk(b0) for b0 in starts)
        rows.append(BlerRow(snr_db, cfg.blocks_per_point, int(errors)))
    return rows
