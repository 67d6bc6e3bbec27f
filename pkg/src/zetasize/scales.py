"""Cluster scales of a root multiset, r-discriminants, and the numeric
symmetric-function sizes that re-express them through coefficients."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import TooLarge
from .polynomial import ComplexPoly, RootSet

EXACT_GUARD = 12
DISCRIMINANT_GUARD = 10
SYMMETRIC_GUARD = 8
SYMMETRIZED_GUARD = 6


def _points(S) -> np.ndarray:
    if isinstance(S, RootSet):
        return S.expanded()
    return np.asarray(S, dtype=np.complex128).ravel()


def _alpha_index(points: np.ndarray, alpha: complex) -> int:
    d = np.abs(points - alpha)
    i = int(np.argmin(d))
    if d[i] > 1e-9 * (1.0 + abs(alpha)):
        raise KeyError(f"{alpha} is not in the root set")
    return i


@dataclass
class ScaleTable:
    roots: np.ndarray           # distinct root locations
    scales: np.ndarray          # (len(roots), N): L_0(alpha) >= ... >= L_{N-1}(alpha) = 0
    method: str                 # "exact" | "greedy"
    multiplicities: np.ndarray = field(default=None)

    def row(self, alpha: complex) -> np.ndarray:
        return self.scales[_alpha_index(self.roots, alpha)]

    def to_json_obj(self):
        return {"roots": [[float(z.real), float(z.imag)] for z in self.roots],
                "scales": [[float(x) for x in r] for r in self.scales],
                "method": self.method}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())


@dataclass
class AbsoluteScales:
    values: np.ndarray

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return len(self.values)


def local_scales_exact(S, alpha: complex) -> np.ndarray:
    """L_k(alpha) for k = 0..N-1 by exhaustive search over sub-multisets."""
    pts = _points(S)
    n = pts.size
    if n > EXACT_GUARD:
        raise TooLarge(f"exact scales need N <= {EXACT_GUARD}, got {n}")
    a = _alpha_index(pts, alpha)
    return _kernels.scale_table(pts[None, :])[0, a]


def local_scales_greedy(S, alpha: complex) -> np.ndarray:
    """|beta_i - alpha| for the farthest-first ordering of the other roots.

    Ties are broken lexicographically on (re, im) so the output is
    deterministic.  The final entry is 0.
    """
    pts = _points(S)
    a = _alpha_index(pts, alpha)
    others = np.delete(pts, a)
    d = np.abs(others - pts[a])
    order = np.lexsort((others.imag, others.real, -d))
    out = np.zeros(pts.size)
    out[: others.size] = d[order]
    return out


def scale_table(S: RootSet, method: str = "auto") -> ScaleTable:
    pts = S.expanded()
    n = pts.size
    if method == "auto":
        method = "exact" if n <= EXACT_GUARD else "greedy"
    locs = S.locations
    if method == "exact":
        if n > EXACT_GUARD:
            raise TooLarge(f"exact scales need N <= {EXACT_GUARD}, got {n}")
        full = _kernels.scale_table(pts[None, :])[0]
        rows = np.array([full[_alpha_index(pts, z)] for z in locs])
    elif method == "greedy":
        rows = np.array([local_scales_greedy(pts, z) for z in locs])
    else:
        raise ValueError(f"unknown method {method!r}")
    return ScaleTable(locs, rows.reshape(len(locs), n), method, S.multiplicities)


def absolute_scales(S, method: str = "auto") -> AbsoluteScales:
    """L_k = min over roots of L_k(alpha)."""
    if not isinstance(S, RootSet):
        S = RootSet.from_points(_points(S))
    return AbsoluteScales(scale_table(S, method).scales.min(axis=0))


# ---------------------------------------------------------------------------
# r-discriminants
# ---------------------------------------------------------------------------

def _matchings(n: int, r: int):
    """Yield every set of r disjoint unordered pairs drawn from range(n)."""

    def rec(start, used, left, acc):
        if left == 0:
            yield tuple(acc)
            return
        # need 2*left unused indices at or after start
        for i in range(start, n):
            if used >> i & 1:
                continue
            if n - i < 2 * left:  # pruning: not enough room for the rest
                return
            for j in range(i + 1, n):
                if used >> j & 1:
                    continue
                acc.append((i, j))
                yield from rec(i + 1, used | (1 << i) | (1 << j), left - 1, acc)
                acc.pop()

    yield from rec(0, 0, r, [])


def r_discriminant(S, r: int) -> float:
    """Largest product of r root distances over disjoint index pairs."""
    pts = _points(S)
    n = pts.size
    if r < 1 or 2 * r > n:
        raise ValueError("need 1 <= r and 2r <= N")
    if n > DISCRIMINANT_GUARD:
        raise TooLarge(f"r-discriminant needs N <= {DISCRIMINANT_GUARD}, got {n}")
    dist = np.abs(pts[:, None] - pts[None, :])
    best = 0.0
    for m in _matchings(n, r):
        prod = 1.0
        for i, j in m:
            prod *= dist[i, j]
        if prod > best:
            best = prod
    return float(best)


def admissible_tuple_products(S, r: int) -> np.ndarray:
    """prod_nu (alpha_{i_nu} - alpha_{j_nu}) over all ordered admissible 2r-tuples."""
    pts = _points(S)
    n = pts.size
    out = []
    for idx in itertools.permutations(range(n), 2 * r):
        prod = 1.0 + 0j
        for nu in range(r):
            prod *= pts[idx[nu]] - pts[idx[r + nu]]
        out.append(prod)
    return np.array(out, dtype=np.complex128)


def f_r_poly(S, r: int) -> ComplexPoly:
    """The polynomial whose roots are the admissible tuple products."""
    pts = _points(S)
    n = pts.size
    if 2 * r > n or r < 1:
        raise ValueError("need 1 <= r and 2r <= N")
    if n > SYMMETRIC_GUARD:
        raise TooLarge(f"F_r needs N <= {SYMMETRIC_GUARD}, got {n}")
    return ComplexPoly.from_roots(admissible_tuple_products(pts, r))


# ---------------------------------------------------------------------------
# symmetric-function sizes
# ---------------------------------------------------------------------------

def power_sum_size(gamma) -> float:
    """sum_{r=1}^n |sum_i gamma_i^r|^(1/r)."""
    g = np.asarray(gamma, dtype=np.complex128).ravel()
    total = 0.0
    pw = np.ones_like(g)
    for r in range(1, g.size + 1):
        pw = pw * g
        total += abs(pw.sum()) ** (1.0 / r)
    return float(total)


def power_sums_from_coeffs(p: ComplexPoly, count: int | None = None) -> np.ndarray:
    """Power sums of the roots of p via Newton's identities on its coefficients."""
    c = p.monic().coeffs
    n = c.size - 1
    count = n if count is None else count
    # monic x^n + a_1 x^{n-1} + ... + a_n with a_k = c[n-k]
    a = np.array([c[n - k] for k in range(n + 1)])
    ps = np.zeros(count + 1, dtype=np.complex128)
    for k in range(1, count + 1):
        s = -k * a[k] if k <= n else 0j
        for i in range(1, k):
            if i <= n:
                s -= a[i] * ps[k - i]
        ps[k] = s
    return ps[1:]


def coefficient_size_of_largest_root(p: ComplexPoly) -> float:
    """Size of the largest root of p computed from coefficients alone."""
    ps = power_sums_from_coeffs(p)
    return float(sum(abs(s) ** (1.0 / r) for r, s in enumerate(ps, start=1)))


def _injective_tuples(n: int, length: int):
    return itertools.permutations(range(n), length)


def sigma_scale_product(S, alpha: complex, k: int, form: str = "sup") -> float:
    """sup (or sum) over injective (k+1)-tuples of prod |alpha - alpha_i|."""
    pts = _points(S)
    n = pts.size
    if not 0 <= k <= n - 2:
        raise ValueError("need 0 <= k <= N-2")
    if n > SYMMETRIC_GUARD:
        raise TooLarge(f"tuple enumeration needs N <= {SYMMETRIC_GUARD}, got {n}")
    _alpha_index(pts, alpha)
    d = np.abs(alpha - pts)
    if form == "sup":
        # the sup is attained by the k+1 largest distances
        return float(np.prod(np.sort(d)[::-1][: k + 1]))
    if form == "sum":
        total = 0.0
        for idx in _injective_tuples(n, k + 1):
            total += float(np.prod(d[list(idx)]))
        return total
    raise ValueError(f"unknown form {form!r}")


def symmetrized_scale_product(S, alpha: complex, k: int) -> float:
    """sum_i |sigma_{k,i}(alpha)|^(1/i), sigma_{k,i} = sum_lambda G_lambda(alpha)^i.

    G_lambda(T) = prod_{nu} (T - alpha_{i_nu}) over injective (k+1)-tuples.
    Evaluated numerically; tracks prod_{i<=k} L_i(alpha) up to N-constants.
    """
    pts = _points(S)
    n = pts.size
    if n > SYMMETRIZED_GUARD:
        raise TooLarge(f"symmetrized products need N <= {SYMMETRIZED_GUARD}, got {n}")
    diffs = alpha - pts
    g = np.array([np.prod(diffs[list(idx)]) for idx in _injective_tuples(n, k + 1)])
    return power_sum_size(g)
