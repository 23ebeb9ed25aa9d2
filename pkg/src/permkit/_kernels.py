"""Hot numeric kernels with a numba path and a pure-numpy path.

Two loops dominate the run time of batch screening:

* eigenvalues of many 3x3 matrices (row-scaled Perron test, dichotomy runs),
* enumeration of cyclic index sequences for the log-det series.

Each has a ``*_numba`` version (plain loops, compiled when numba is present)
and a ``*_numpy`` version (vectorised numpy). The undecorated dispatchers pick
the numba version unless ``PERMKIT_NO_JIT`` is set.
"""
import math

import numpy as np

from ._accel import jit_enabled, njit

EPS = 2.220446049250313e-16
_SQRT3_2 = 0.8660254037844386


@njit
def _peval(c2, c1, c0, z):
    return ((z + c2) * z + c1) * z + c0


@njit
def _pderiv(c2, c1, z):
    return (3.0 * z + 2.0 * c2) * z + c1


@njit
def _newton_polish(c2, c1, c0, z, steps):
    # accept a step only while it lowers |p|
    best = abs(_peval(c2, c1, c0, z))
    for _ in range(steps):
        d = _pderiv(c2, c1, z)
        if d == 0:
            break
        znew = z - _peval(c2, c1, c0, z) / d
        val = abs(_peval(c2, c1, c0, znew))
        if val < best:
            z = znew
            best = val
        else:
            break
    return z


@njit
def _critical_point_near(c2, c1, target):
    # roots of p'(x) = 3x^2 + 2 c2 x + c1, stable quadratic formula
    disc = c2 * c2 - 3.0 * c1
    if disc < 0.0:
        disc = 0.0
    sq = math.sqrt(disc)
    q = -(c2 + math.copysign(sq, c2))
    if q == 0.0:
        return -c2 / 3.0
    x1 = q / 3.0
    x2 = c1 / q
    if abs(x1 - target) <= abs(x2 - target):
        return x1
    return x2


@njit
def cubic_roots(c2, c1, c0, n2=-1.0, n1=-1.0, n0=-1.0):
    """Roots of x^3 + c2 x^2 + c1 x + c0 (unsorted, complex128).

    ``n2, n1, n0`` bound the absolute terms that were summed to form each
    coefficient; they size the rounding noise used to decide that two roots
    are a numerically exact double root. Negative means "use |c_i|".
    """
    if n2 < 0.0:
        n2 = abs(c2)
    if n1 < 0.0:
        n1 = abs(c1)
    if n0 < 0.0:
        n0 = abs(c0)
    out = np.empty(3, dtype=np.complex128)
    shift = c2 / 3.0
    p = c1 - c2 * shift
    q = (2.0 * shift * shift - c1) * shift + c0
    hq = 0.5 * q
    tp = p / 3.0
    disc = hq * hq + tp * tp * tp
    if disc > 0.0:
        sd = math.sqrt(disc)
        s = abs(hq) + sd
        big = -math.copysign(s ** (1.0 / 3.0), hq)
        small = -tp / big if big != 0.0 else 0.0
        t1 = big + small
        out[0] = t1 - shift
        re = -0.5 * t1 - shift
        im = _SQRT3_2 * abs(big - small)
        out[1] = complex(re, im)
        out[2] = complex(re, -im)
    else:
        r = math.sqrt(-tp)
        if r == 0.0:
            out[0] = -shift
            out[1] = -shift
            out[2] = -shift
        else:
            arg = -hq / (r * r * r)
            if arg > 1.0:
                arg = 1.0
            elif arg < -1.0:
                arg = -1.0
            th = math.acos(arg) / 3.0
            for k in range(3):
                out[k] = 2.0 * r * math.cos(th - 2.0 * math.pi * k / 3.0) - shift

    for k in range(3):
        out[k] = _newton_polish(c2, c1, c0, out[k], 4)

    # Near-double roots: a pair straddles a critical point of p. Newton is
    # slow there, so rebuild the pair from the local quadratic model instead.
    scale = 1.0 + max(abs(out[0]), max(abs(out[1]), abs(out[2])))
    bi = -1
    bj = -1
    best = np.inf
    for i in range(3):
        for j in range(i + 1, 3):
            d = abs(out[i] - out[j])
            if d < best:
                best = d
                bi = i
                bj = j
    third = 3 - bi - bj
    if best <= 1e-5 * scale and abs(out[third] - out[bi]) > 1e-3 * scale:
        center = 0.5 * (out[bi].real + out[bj].real)
        xc = _critical_point_near(c2, c1, center)
        pc = _peval(c2, c1, c0, xc)
        curv = 6.0 * xc + 2.0 * c2
        if curv != 0.0:
            ax = abs(xc)
            noise = 16.0 * EPS * (ax * ax * ax + n2 * ax * ax + n1 * ax + n0)
            off2 = -2.0 * pc / curv
            if abs(off2) <= 2.0 * noise / abs(curv):
                off2 = 0.0
            if off2 >= 0.0:
                h = math.sqrt(off2)
                zi = complex(xc + h, 0.0)
                zj = complex(xc - h, 0.0)
                if h > 0.0:
                    zi = _newton_polish(c2, c1, c0, zi, 2)
                    zj = _newton_polish(c2, c1, c0, zj, 2)
            else:
                h = math.sqrt(-off2)
                zi = _newton_polish(c2, c1, c0, complex(xc, h), 2)
                zj = complex(zi.real, -zi.imag)
            out[bi] = zi
            out[bj] = zj
    return out


@njit
def char_coeffs3(m):
    """(c2, c1, c0) with det(xI - m) = x^3 + c2 x^2 + c1 x + c0."""
    tr = m[0, 0] + m[1, 1] + m[2, 2]
    e2 = (m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
          + m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
          + m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
    return -tr, e2, -det3(m)


@njit
def char_magnitudes3(m):
    """Sums of absolute terms behind each coefficient of :func:`char_coeffs3`."""
    a = np.abs(m)
    n2 = a[0, 0] + a[1, 1] + a[2, 2]
    n1 = (a[0, 0] * a[1, 1] + a[0, 1] * a[1, 0] + a[0, 0] * a[2, 2]
          + a[0, 2] * a[2, 0] + a[1, 1] * a[2, 2] + a[1, 2] * a[2, 1])
    n0 = (a[0, 0] * (a[1, 1] * a[2, 2] + a[1, 2] * a[2, 1])
          + a[0, 1] * (a[1, 0] * a[2, 2] + a[1, 2] * a[2, 0])
          + a[0, 2] * (a[1, 0] * a[2, 1] + a[1, 1] * a[2, 0]))
    return n2, n1, n0


@njit
def det3(m):
    return (m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
            - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
            + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0]))


@njit
def eig3(m):
    c2, c1, c0 = char_coeffs3(m)
    n2, n1, n0 = char_magnitudes3(m)
    return cubic_roots(c2, c1, c0, n2, n1, n0)


@njit
def eig3_batch_numba(mats):
    n = mats.shape[0]
    out = np.empty((n, 3), dtype=np.complex128)
    for i in range(n):
        out[i, :] = eig3(mats[i])
    return out


def eig3_batch_numpy(mats):
    return np.linalg.eigvals(np.asarray(mats, dtype=float)).astype(np.complex128)


def eig3_batch(mats):
    """Eigenvalues of a stack of 3x3 matrices, shape (N, 3), unsorted."""
    mats = np.ascontiguousarray(mats, dtype=np.float64)
    if jit_enabled():
        return eig3_batch_numba(mats)
    return eig3_batch_numpy(mats)


# ---------------------------------------------------------------- series


@njit
def cycle_series_numba(g, max_degree):
    """Coefficients of sum_k tr((Z g)^k)/k, indexed by base-(K+1) exponent code.

    Walks every index sequence of length k <= K with an odometer that keeps
    prefix products, so each step costs O(1) amortised.
    """
    n = g.shape[0]
    base = max_degree + 1
    size = base ** n
    coef = np.zeros(size)
    powers = np.empty(n, dtype=np.int64)
    acc = 1
    for i in range(n):
        powers[i] = acc
        acc *= base
    seq = np.zeros(max_degree + 1, dtype=np.int64)
    pw = np.ones(max_degree + 1)
    pc = np.zeros(max_degree + 1, dtype=np.int64)
    for k in range(1, max_degree + 1):
        inv_k = 1.0 / k
        for j in range(k):
            seq[j] = 0
        # pw[j] = product of edges seq[0]->...->seq[j], pc[j] = code of seq[0..j]
        pw[0] = 1.0
        pc[0] = powers[seq[0]]
        for j in range(1, k):
            pw[j] = pw[j - 1] * g[seq[j - 1], seq[j]]
            pc[j] = pc[j - 1] + powers[seq[j]]
        while True:
            w = pw[k - 1] * g[seq[k - 1], seq[0]]
            coef[pc[k - 1]] += w * inv_k
            pos = k - 1
            while pos >= 0:
                seq[pos] += 1
                if seq[pos] < n:
                    break
                seq[pos] = 0
                pos -= 1
            if pos < 0:
                break
            for j in range(pos, k):
                if j == 0:
                    pw[0] = 1.0
                    pc[0] = powers[seq[0]]
                else:
                    pw[j] = pw[j - 1] * g[seq[j - 1], seq[j]]
                    pc[j] = pc[j - 1] + powers[seq[j]]
    return coef


def cycle_series_numpy(g, max_degree, chunk=1 << 18):
    """Vectorised twin of :func:`cycle_series_numba`."""
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    base = max_degree + 1
    powers = base ** np.arange(n, dtype=np.int64)
    size = int(base ** n)
    coef = np.zeros(size)
    for k in range(1, max_degree + 1):
        total = n ** k
        place = n ** np.arange(k - 1, -1, -1, dtype=np.int64)
        for start in range(0, total, chunk):
            idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
            digits = (idx[:, None] // place[None, :]) % n
            w = np.prod(g[digits, np.roll(digits, -1, axis=1)], axis=1)
            code = powers[digits].sum(axis=1)
            coef += np.bincount(code, weights=w, minlength=size) / k
    return coef


def cycle_series(g, max_degree):
    g = np.ascontiguousarray(g, dtype=np.float64)
    if jit_enabled():
        return cycle_series_numba(g, int(max_degree))
    return cycle_series_numpy(g, int(max_degree))
