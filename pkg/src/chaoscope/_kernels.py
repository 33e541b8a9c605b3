"""Hot loops for orbit statistics.

Every kernel exists twice: a loop version compiled with numba (``_nb_*``) and
a vectorized numpy version (``_np_*``).  The public names dispatch on the
backend chosen in :mod:`chaoscope._backend`.

Conventions shared by all kernels:

* sequence coordinates are 1-based; ``idx`` is a sorted int64 array of
  support indices and ``la`` the matching ``log2|x_s|`` values;
* ``lam[s] = sum_{i<s, w_i != 0} log2|w_i|`` and ``zc[s]`` counts zero
  weights among ``w_1 .. w_{s-1}``, so that for a weighted backward shift
  ``log2|(B_w^n x)_{s-n}| = la_s + lam[s] - lam[s-n]`` unless a zero weight
  lies in between;
* norms are returned as ``log2`` values, ``-inf`` for the zero vector.
"""
import math

import numpy as np

from ._backend import USE_NUMBA, njit

NEG_INF = -np.inf
_CHUNK = 512
RESCALE_AT = 2.0 ** 1000
STEP_DOWN = 2.0 ** -64
STEP_UP = 2.0 ** 64


# ---------------------------------------------------------------- numba --

@njit
def _nb_shift_norm_log(idx, la, lam, zc, nmax, p):
    out = np.full(nmax, -np.inf)
    S = idx.shape[0]
    start = 0
    for n in range(1, nmax + 1):
        while start < S and idx[start] <= n:
            start += 1
        if start == S:
            break
        m = -np.inf
        for k in range(start, S):
            s = idx[k]
            j = s - n
            if zc[s] - zc[j] > 0:
                continue
            t = la[k] + lam[s] - lam[j]
            if t > m:
                m = t
        if m == -np.inf:
            continue
        if p == np.inf:
            out[n - 1] = m
            continue
        acc = 0.0
        for k in range(start, S):
            s = idx[k]
            j = s - n
            if zc[s] - zc[j] > 0:
                continue
            acc += 2.0 ** (p * (la[k] + lam[s] - lam[j] - m))
        out[n - 1] = m + math.log2(acc) / p
    return out


@njit
def _nb_diag_norm_log(la, ld, dz, nmax, p):
    out = np.full(nmax, -np.inf)
    S = la.shape[0]
    for n in range(1, nmax + 1):
        m = -np.inf
        for k in range(S):
            if dz[k]:
                continue
            t = la[k] + n * ld[k]
            if t > m:
                m = t
        if m == -np.inf:
            continue
        if p == np.inf:
            out[n - 1] = m
            continue
        acc = 0.0
        for k in range(S):
            if dz[k]:
                continue
            acc += 2.0 ** (p * (la[k] + n * ld[k] - m))
        out[n - 1] = m + math.log2(acc) / p
    return out


@njit
def _nb_shift_window_log(idx, la, lam, zc, nmax, J):
    out = np.full((nmax, J), -np.inf)
    S = idx.shape[0]
    start = 0
    for n in range(1, nmax + 1):
        while start < S and idx[start] <= n:
            start += 1
        k = start
        while k < S and idx[k] <= n + J:
            s = idx[k]
            j = s - n
            if zc[s] - zc[j] == 0:
                out[n - 1, j - 1] = la[k] + lam[s] - lam[j]
            k += 1
    return out


@njit
def _nb_diag_window_log(idx, la, ld, dz, nmax, J):
    out = np.full((nmax, J), -np.inf)
    S = idx.shape[0]
    for k in range(S):
        j = idx[k]
        if j > J or dz[k]:
            continue
        for n in range(1, nmax + 1):
            out[n - 1, j - 1] = la[k] + n * ld[k]
    return out


@njit
def _nb_shift_iterate(idx, coef, ex, w, nmax):
    S = idx.shape[0]
    oc = np.zeros((nmax, S), dtype=coef.dtype)
    oe = np.zeros((nmax, S), dtype=np.int64)
    c = coef.copy()
    e = ex.copy()
    for n in range(1, nmax + 1):
        for k in range(S):
            pos = idx[k] - n
            if pos < 1 or c[k] == 0:
                c[k] = 0
                e[k] = 0
                continue
            c[k] = c[k] * w[pos]
            mant, sh = math.frexp(abs(c[k]))
            if mant != 0.0:
                c[k] = c[k] * math.ldexp(1.0, -sh)
                e[k] += sh
            oc[n - 1, k] = c[k]
            oe[n - 1, k] = e[k]
    return oc, oe


@njit
def _nb_diag_iterate(coef, ex, d, nmax):
    S = coef.shape[0]
    oc = np.zeros((nmax, S), dtype=coef.dtype)
    oe = np.zeros((nmax, S), dtype=np.int64)
    c = coef.copy()
    e = ex.copy()
    for n in range(1, nmax + 1):
        for k in range(S):
            if c[k] == 0:
                e[k] = 0
                continue
            c[k] = c[k] * d[k]
            mant, sh = math.frexp(abs(c[k]))
            if mant != 0.0:
                c[k] = c[k] * math.ldexp(1.0, -sh)
                e[k] += sh
            else:
                e[k] = 0
            oc[n - 1, k] = c[k]
            oe[n - 1, k] = e[k]
    return oc, oe


@njit
def _nb_cesaro(s):
    # Neumaier-compensated running mean; +inf saturates.  The running sum is
    # kept in units of 2**(64 j) so it cannot overflow before the mean does.
    N = s.shape[0]
    out = np.empty(N)
    total = 0.0
    comp = 0.0
    down = 1.0
    up = 1.0
    saturated = False
    for i in range(N):
        if saturated or s[i] == np.inf:
            saturated = True
            out[i] = np.inf
            continue
        v = s[i] * down
        t = total + v
        if abs(t) > RESCALE_AT:
            total *= STEP_DOWN
            comp *= STEP_DOWN
            down *= STEP_DOWN
            up *= STEP_UP
            v = s[i] * down
            t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
        out[i] = ((total + comp) / (i + 1)) * up
    return out


# ---------------------------------------------------------------- numpy --

def _logsumexp2_rows(t, p):
    # t: (rows, cols) log2 magnitudes with -inf holes
    m = t.max(axis=1)
    out = np.full(t.shape[0], NEG_INF)
    ok = m > NEG_INF
    if not ok.any():
        return out
    if p == np.inf:
        out[ok] = m[ok]
        return out
    with np.errstate(invalid="ignore"):
        acc = np.exp2(p * (t[ok] - m[ok, None])).sum(axis=1)
    out[ok] = m[ok] + np.log2(acc) / p
    return out


def _np_shift_norm_log(idx, la, lam, zc, nmax, p):
    out = np.full(nmax, NEG_INF)
    if idx.size == 0:
        return out
    last = min(nmax, int(idx[-1]) - 1)
    for n0 in range(1, last + 1, _CHUNK):
        n = np.arange(n0, min(n0 + _CHUNK, last + 1))[:, None]
        j = idx[None, :] - n
        valid = j >= 1
        jc = np.where(valid, j, 0)
        valid &= (zc[idx][None, :] - zc[jc]) == 0
        t = np.where(valid, la[None, :] + lam[idx][None, :] - lam[jc], NEG_INF)
        out[n0 - 1:n0 - 1 + t.shape[0]] = _logsumexp2_rows(t, p)
    return out


def _np_diag_norm_log(la, ld, dz, nmax, p):
    out = np.full(nmax, NEG_INF)
    if la.size == 0:
        return out
    for n0 in range(1, nmax + 1, _CHUNK):
        n = np.arange(n0, min(n0 + _CHUNK, nmax + 1))[:, None]
        t = np.where(dz[None, :], NEG_INF, la[None, :] + n * ld[None, :])
        out[n0 - 1:n0 - 1 + t.shape[0]] = _logsumexp2_rows(t, p)
    return out


def _np_shift_window_log(idx, la, lam, zc, nmax, J):
    out = np.full((nmax, J), NEG_INF)
    n = np.arange(1, nmax + 1)[:, None]
    j = idx[None, :] - n
    rows, cols = np.nonzero((j >= 1) & (j <= J))
    if rows.size == 0:
        return out
    s = idx[cols]
    jj = j[rows, cols]
    good = (zc[s] - zc[jj]) == 0
    rows, cols, s, jj = rows[good], cols[good], s[good], jj[good]
    out[rows, jj - 1] = la[cols] + lam[s] - lam[jj]
    return out


def _np_diag_window_log(idx, la, ld, dz, nmax, J):
    out = np.full((nmax, J), NEG_INF)
    keep = (idx <= J) & ~dz
    n = np.arange(1, nmax + 1)[:, None]
    out[:, idx[keep] - 1] = la[keep][None, :] + n * ld[keep][None, :]
    return out


def _renormalize(c, e):
    mag = np.abs(c)
    _, sh = np.frexp(mag)
    sh = np.where(mag > 0, sh, 0).astype(np.int64)
    return c * np.ldexp(1.0, -sh), e + sh


def _np_shift_iterate(idx, coef, ex, w, nmax):
    S = idx.shape[0]
    oc = np.zeros((nmax, S), dtype=coef.dtype)
    oe = np.zeros((nmax, S), dtype=np.int64)
    c = coef.copy()
    e = ex.copy()
    for n in range(1, nmax + 1):
        pos = idx - n
        alive = (pos >= 1) & (c != 0)
        c = np.where(alive, c * w[np.where(alive, pos, 0)], 0)
        c, e = _renormalize(c, np.where(alive, e, 0))
        oc[n - 1] = c
        oe[n - 1] = e
    return oc, oe


def _np_diag_iterate(coef, ex, d, nmax):
    S = coef.shape[0]
    oc = np.zeros((nmax, S), dtype=coef.dtype)
    oe = np.zeros((nmax, S), dtype=np.int64)
    c = coef.copy()
    e = ex.copy()
    for n in range(1, nmax + 1):
        c, e = _renormalize(c * d, e)
        oc[n - 1] = c
        oe[n - 1] = e
    return oc, oe


def _np_cesaro(s):
    # Sequential by nature; compensated summation in plain Python.
    N = s.shape[0]
    out = np.empty(N)
    total = comp = 0.0
    down = up = 1.0
    for i, x in enumerate(s.tolist()):
        if x == math.inf:
            out[i:] = np.inf
            break
        v = x * down
        t = total + v
        if abs(t) > RESCALE_AT:
            total, comp = total * STEP_DOWN, comp * STEP_DOWN
            down, up = down * STEP_DOWN, up * STEP_UP
            v = x * down
            t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
        out[i] = ((total + comp) / (i + 1)) * up
    return out


# ------------------------------------------------------------- dispatch --

NUMBA_KERNELS = {
    "shift_norm_log": _nb_shift_norm_log,
    "diag_norm_log": _nb_diag_norm_log,
    "shift_window_log": _nb_shift_window_log,
    "diag_window_log": _nb_diag_window_log,
    "shift_iterate": _nb_shift_iterate,
    "diag_iterate": _nb_diag_iterate,
    "cesaro": _nb_cesaro,
}
NUMPY_KERNELS = {
    "shift_norm_log": _np_shift_norm_log,
    "diag_norm_log": _np_diag_norm_log,
    "shift_window_log": _np_shift_window_log,
    "diag_window_log": _np_diag_window_log,
    "shift_iterate": _np_shift_iterate,
    "diag_iterate": _np_diag_iterate,
    "cesaro": _np_cesaro,
}
_ACTIVE = NUMBA_KERNELS if USE_NUMBA else NUMPY_KERNELS


def shift_norm_log(idx, la, lam, zc, nmax, p):
    return _ACTIVE["shift_norm_log"](idx, la, lam, zc, int(nmax), float(p))


def diag_norm_log(la, ld, dz, nmax, p):
    return _ACTIVE["diag_norm_log"](la, ld, dz, int(nmax), float(p))


def shift_window_log(idx, la, lam, zc, nmax, J):
    return _ACTIVE["shift_window_log"](idx, la, lam, zc, int(nmax), int(J))


def diag_window_log(idx, la, ld, dz, nmax, J):
    return _ACTIVE["diag_window_log"](idx, la, ld, dz, int(nmax), int(J))


def shift_iterate(idx, coef, ex, w, nmax):
    return _ACTIVE["shift_iterate"](idx, coef, ex, w, int(nmax))


def diag_iterate(coef, ex, d, nmax):
    return _ACTIVE["diag_iterate"](coef, ex, d, int(nmax))


def cesaro(s):
    return _ACTIVE["cesaro"](np.ascontiguousarray(s, dtype=np.float64))
