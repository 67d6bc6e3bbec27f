"""Hot numeric kernels with a numba path and a pure-numpy path.

The numba path is used when numba imports cleanly and the environment
variable ``ZETASIZE_DISABLE_NUMBA`` is unset (or ``0``).  Both paths are
always importable so tests and the benchmark can compare them directly.
"""
from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba as nb

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    nb = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("ZETASIZE_DISABLE_NUMBA", "0") in ("", "0")


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def horner_numpy(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Evaluate ascending-order ``coeffs`` at every entry of ``z``."""
    z = np.asarray(z, dtype=np.complex128)
    out = np.zeros_like(z)
    for c in coeffs[::-1]:
        out = out * z + c
    return out


def abs_product_numpy(z: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """prod_i |z - roots[i]|, accumulated in log space to dodge underflow."""
    z = np.asarray(z, dtype=np.complex128)
    if len(roots) == 0:
        return np.ones(z.shape)
    acc = np.zeros(z.shape)
    with np.errstate(divide="ignore"):
        for r in roots:
            acc += np.log(np.abs(z - r))
    return np.exp(acc)


def scale_table_numpy(points: np.ndarray) -> np.ndarray:
    """Exact cluster-scale table for a batch of point multisets.

    ``points`` has shape (m, N).  Returns (m, N, N) where entry [s, a, k] is
    the smallest diameter of an (N-k)-element sub-multiset containing point a.
    Subset diameters follow from diam(S) = max(diam(S - lo), diam(S - hi),
    |p_lo - p_hi|) with lo, hi the lowest and highest members of S.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.complex128))
    m, n = points.shape
    full = 1 << n
    diam = np.zeros((m, full))
    size = np.zeros(full, dtype=np.int64)
    for mask in range(1, full):
        size[mask] = size[mask >> 1] + (mask & 1)
        if size[mask] < 2:
            continue
        lo = (mask & -mask).bit_length() - 1
        hi = mask.bit_length() - 1
        d = np.abs(points[:, lo] - points[:, hi])
        diam[:, mask] = np.maximum(np.maximum(diam[:, mask ^ (1 << lo)], diam[:, mask ^ (1 << hi)]), d)
    masks = np.arange(full)
    table = np.full((m, n, n), np.inf)
    for a in range(n):
        has_a = ((masks >> a) & 1).astype(bool)
        for k in range(n):
            sel = has_a & (size == n - k)
            table[:, a, k] = diam[:, sel].min(axis=1)
    return table


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @nb.njit(cache=True)
    def horner_numba(coeffs, z):
        out = np.empty(z.size, dtype=np.complex128)
        zf = z.ravel()
        for t in range(zf.size):
            acc = 0j
            w = zf[t]
            for c in range(coeffs.size - 1, -1, -1):
                acc = acc * w + coeffs[c]
            out[t] = acc
        return out.reshape(z.shape)

    @nb.njit(cache=True)
    def abs_product_numba(z, roots):
        # product of squared moduli, renormalized now and then against under/overflow
        zf = z.ravel()
        out = np.empty(zf.size)
        for t in range(zf.size):
            acc = 1.0
            logs = 0.0
            for r in roots:
                dr = zf[t].real - r.real
                di = zf[t].imag - r.imag
                acc *= dr * dr + di * di
                if acc < 1e-250 or acc > 1e250:
                    if acc == 0.0:
                        break
                    logs += np.log(acc)
                    acc = 1.0
            out[t] = np.sqrt(acc) * np.exp(0.5 * logs) if logs != 0.0 else np.sqrt(acc)
        return out.reshape(z.shape)

    @nb.njit(cache=True)
    def _mask_tables(n):
        full = 1 << n
        size = np.zeros(full, dtype=np.int64)
        lo = np.zeros(full, dtype=np.int64)
        hi = np.zeros(full, dtype=np.int64)
        for mask in range(1, full):
            size[mask] = size[mask >> 1] + (mask & 1)
            b = 0
            while not (mask >> b) & 1:
                b += 1
            lo[mask] = b
            b = n - 1
            while not (mask >> b) & 1:
                b -= 1
            hi[mask] = b
        return size, lo, hi

    @nb.njit(cache=True)
    def scale_table_numba(points):
        m, n = points.shape
        full = 1 << n
        size, lo, hi = _mask_tables(n)
        table = np.empty((m, n, n))
        dist = np.empty((n, n))
        diam = np.zeros(full)
        for s in range(m):
            for i in range(n):
                for j in range(n):
                    dist[i, j] = abs(points[s, i] - points[s, j])
            tab = table[s]
            tab[:, :] = np.inf
            for mask in range(1, full):
                d = 0.0
                if size[mask] >= 2:
                    l, h = lo[mask], hi[mask]
                    d = max(dist[l, h], diam[mask ^ (1 << l)], diam[mask ^ (1 << h)])
                    diam[mask] = d
                k = n - size[mask]
                rest = mask
                while rest:
                    a = lo[rest]
                    if d < tab[a, k]:
                        tab[a, k] = d
                    rest &= rest - 1
        return table

else:  # pragma: no cover
    horner_numba = horner_numpy
    abs_product_numba = abs_product_numpy
    scale_table_numba = scale_table_numpy


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def horner(coeffs, z):
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    if USE_NUMBA:
        return horner_numba(coeffs, np.ascontiguousarray(z))
    return horner_numpy(coeffs, z)


def abs_product(z, roots):
    roots = np.ascontiguousarray(roots, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    if USE_NUMBA:
        return abs_product_numba(np.ascontiguousarray(z), roots)
    return abs_product_numpy(z, roots)


def scale_table(points):
    points = np.ascontiguousarray(np.atleast_2d(points), dtype=np.complex128)
    if USE_NUMBA:
        return scale_table_numba(points)
    return scale_table_numpy(points)
