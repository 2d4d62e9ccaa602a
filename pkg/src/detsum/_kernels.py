"""Compiled Fincke-Pohst walker and per-batch statistics folds.

The walker works on one partition at a time: the outermost coefficient
``z[k-1]`` is fixed to a value ``v`` and levels ``k-2 .. 0`` are explored in
ascending order, so the emitted sequence is lexicographic in
``(z[k-1], ..., z[0])``. It is resumable: when the output buffer fills up the
state arrays hold everything needed to continue.
"""

import numpy as np
from numba import njit

# state layout: st[0] = level, st[1] = phase, st[2] = done
PHASE_ENTER = 0
PHASE_ADVANCE = 1
PHASE_VALUE = 2

I_COUNT, I_UNITS, I_ZEROS = 0, 1, 2
F_SUM, F_SUMC, F_NPS, F_NPSC = 0, 1, 2, 3


@njit(cache=True, nogil=True)
def start_partition(v, z, hi, ctr, acc, st):
    k = z.shape[0]
    for j in range(k):
        z[j] = 0
        hi[j] = 0
        ctr[j] = 0.0
        acc[j] = 0.0
    acc[k] = 0.0
    z[k - 1] = v
    hi[k - 1] = v
    st[0] = k - 1
    st[1] = PHASE_VALUE
    st[2] = 0


@njit(cache=True, nogil=True)
def collect(rd2, mu, m2, tol, g, g2, exact, thr, z, hi, ctr, acc, st, zbuf, qbuf):
    """Fill ``zbuf``/``qbuf`` with ball points; returns the number written.

    ``qbuf`` receives ``z^T (2G) z`` as an exact integer when ``exact`` is
    set (membership then means ``q <= thr``), otherwise the float ``z^T G z``
    compared against ``m2``.
    """
    k = z.shape[0]
    cap = zbuf.shape[0]
    top = k - 1
    nout = 0
    if st[2] == 1:
        return 0
    level = st[0]
    phase = st[1]
    while True:
        if phase == PHASE_ENTER:
            c = 0.0
            for j in range(level + 1, k):
                c -= mu[level, j] * z[j]
            ctr[level] = c
            r = m2 + tol - acc[level + 1]
            if r < 0.0:
                level += 1
                phase = PHASE_ADVANCE
                continue
            h = np.sqrt(r / rd2[level])
            lo = np.ceil(c - h)
            up = np.floor(c + h)
            if lo > up:
                level += 1
                phase = PHASE_ADVANCE
                continue
            z[level] = np.int64(lo)
            hi[level] = np.int64(up)
            phase = PHASE_VALUE
        elif phase == PHASE_VALUE:
            t = z[level] - ctr[level]
            acc[level] = acc[level + 1] + rd2[level] * t * t
            if level > 0:
                level -= 1
                phase = PHASE_ENTER
                continue
            phase = PHASE_ADVANCE
            if acc[0] > m2 + tol:
                continue
            nonzero = False
            for j in range(k):
                if z[j] != 0:
                    nonzero = True
                    break
            if not nonzero:
                continue
            if exact:
                q = np.int64(0)
                for a in range(k):
                    if z[a] != 0:
                        s = np.int64(0)
                        for b in range(k):
                            s += g2[a, b] * z[b]
                        q += z[a] * s
                if q > thr:
                    continue
                qv = np.float64(q)
            else:
                qf = 0.0
                for a in range(k):
                    if z[a] != 0:
                        s = 0.0
                        for b in range(k):
                            s += g[a, b] * z[b]
                        qf += z[a] * s
                if qf > m2:
                    continue
                qv = qf
            for j in range(k):
                zbuf[nout, j] = z[j]
            qbuf[nout] = qv
            nout += 1
            if nout == cap:
                st[0] = 0
                st[1] = PHASE_ADVANCE
                return nout
        else:
            if level == top:
                st[2] = 1
                return nout
            z[level] += 1
            if z[level] > hi[level]:
                level += 1
            else:
                phase = PHASE_VALUE


@njit(cache=True, nogil=True)
def lu_det(X):
    """Determinant of a small complex matrix by partial-pivot elimination."""
    n = X.shape[0]
    A = X.copy()
    det = 1.0 + 0.0j
    for c in range(n):
        p = c
        best = abs(A[c, c])
        for r in range(c + 1, n):
            if abs(A[r, c]) > best:
                best = abs(A[r, c])
                p = r
        if best == 0.0:
            return 0.0 + 0.0j
        if p != c:
            for j in range(n):
                tmp = A[c, j]
                A[c, j] = A[p, j]
                A[p, j] = tmp
            det = -det
        piv = A[c, c]
        det *= piv
        for r in range(c + 1, n):
            f = A[r, c] / piv
            if f != 0:
                for j in range(c, n):
                    A[r, j] -= f * A[c, j]
    return det


@njit(cache=True, nogil=True)
def _kahan(fs, j, col, x):
    y = x - fs[j, col + 1]
    t = fs[j, col] + y
    fs[j, col + 1] = (t - fs[j, col]) - y
    fs[j, col] = t


@njit(cache=True, nogil=True)
def fold_batch(
    zbuf, qbuf, nb, thresholds, qscale, n, det_mode, mono, cre, cim, basis,
    m_half, s_half, ist, fst, misc_f, misc_i, first_zero,
):
    """Accumulate per-bucket statistics for ``nb`` buffered points.

    det_mode 0 skips determinants, 1 evaluates the exact polynomial in int64,
    2 uses float elimination on ``sum z_i B_i``.
    """
    k = zbuf.shape[1]
    nterm = mono.shape[0]
    deg = mono.shape[1]
    X = np.zeros((n, n), dtype=np.complex128)
    for p in range(nb):
        qk = qbuf[p]
        j = np.searchsorted(thresholds, qk)
        qt = qk * qscale
        ist[j, I_COUNT] += 1
        if s_half != 0.0:
            _kahan(fst, j, F_NPS, np.exp(s_half * np.log(qt)))
        else:
            _kahan(fst, j, F_NPS, 1.0)
        if det_mode == 0:
            continue
        if det_mode == 1:
            re = np.int64(0)
            im = np.int64(0)
            for t in range(nterm):
                pr = np.int64(1)
                for d in range(deg):
                    pr *= zbuf[p, mono[t, d]]
                re += cre[t] * pr
                im += cim[t] * pr
            a2i = re * re + im * im
            is_zero = a2i == 0
            is_unit = a2i == 1
            abs2 = np.float64(a2i)
        else:
            for r in range(n):
                for c in range(n):
                    X[r, c] = 0.0
            for i in range(k):
                zi = zbuf[p, i]
                if zi != 0:
                    for r in range(n):
                        for c in range(n):
                            X[r, c] += zi * basis[i, r, c]
            d = lu_det(X)
            abs2 = d.real * d.real + d.imag * d.imag
            dabs = np.sqrt(abs2)
            is_zero = dabs <= 1e-9 * (qt / n) ** (n / 2.0)
            is_unit = (not is_zero) and abs(dabs - 1.0) <= 1e-9
        rhs = (qt / n) ** (n / 2.0)
        if np.sqrt(abs2) > rhs + 1e-9 * max(1.0, rhs):
            misc_i[0] += 1
        if is_zero:
            ist[j, I_ZEROS] += 1
            if misc_i[1] == 0:
                misc_i[1] = 1
                for i in range(k):
                    first_zero[i] = zbuf[p, i]
            continue
        if is_unit:
            ist[j, I_UNITS] += 1
        if abs2 < misc_f[0]:
            misc_f[0] = abs2
        _kahan(fst, j, F_SUM, np.exp(-m_half * np.log(abs2)))


@njit(cache=True, nogil=True)
def run_partition(
    v, rd2, mu, m2, tol, g, g2, exact, thr, zbuf, qbuf,
    thresholds, qscale, n, det_mode, mono, cre, cim, basis,
    m_half, s_half, ist, fst, misc_f, misc_i, first_zero,
):
    k = rd2.shape[0]
    z = np.zeros(k, dtype=np.int64)
    hi = np.zeros(k, dtype=np.int64)
    ctr = np.zeros(k)
    acc = np.zeros(k + 1)
    st = np.zeros(3, dtype=np.int64)
    start_partition(v, z, hi, ctr, acc, st)
    while st[2] == 0:
        nb = collect(rd2, mu, m2, tol, g, g2, exact, thr, z, hi, ctr, acc, st, zbuf, qbuf)
        fold_batch(
            zbuf, qbuf, nb, thresholds, qscale, n, det_mode, mono, cre, cim, basis,
            m_half, s_half, ist, fst, misc_f, misc_i, first_zero,
        )
