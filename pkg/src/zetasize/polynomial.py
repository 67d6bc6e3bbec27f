"""Univariate complex polynomials, root extraction with multiplicity
clustering, the coefficient norm, and vanishing orders."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import NonConvergence, ZeroPolynomial


class ComplexPoly:
    """Polynomial with complex coefficients stored in ascending degree.

    Trailing zero coefficients are trimmed on construction, so the zero
    polynomial has an empty coefficient array and ``degree`` is ``None``.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[complex] = ()):
        c = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                     dtype=np.complex128).ravel()
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:0]
        c.setflags(write=False)
        self._c = c

    # construction helpers -------------------------------------------------
    @classmethod
    def from_roots(cls, roots: Iterable[complex], lead: complex = 1.0) -> "ComplexPoly":
        c = np.array([1.0 + 0j])
        for r in roots:
            c = np.convolve(c, np.array([-r, 1.0], dtype=np.complex128))
        return cls(lead * c)

    @classmethod
    def monomial(cls, n: int, coef: complex = 1.0) -> "ComplexPoly":
        c = np.zeros(n + 1, dtype=np.complex128)
        c[n] = coef
        return cls(c)

    @classmethod
    def constant(cls, c: complex) -> "ComplexPoly":
        return cls([c])

    # basic properties -----------------------------------------------------
    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int | None:
        return None if self._c.size == 0 else self._c.size - 1

    @property
    def is_zero(self) -> bool:
        return self._c.size == 0

    @property
    def leading(self) -> complex:
        if self.is_zero:
            raise ZeroPolynomial("zero polynomial has no leading coefficient")
        return complex(self._c[-1])

    def monic(self) -> "ComplexPoly":
        return ComplexPoly(self._c / self.leading)

    def __call__(self, z):
        return eval_poly(self, z)

    # arithmetic -----------------------------------------------------------
    def _pad(self, other: "ComplexPoly"):
        n = max(self._c.size, other._c.size)
        a = np.zeros(n, dtype=np.complex128)
        b = np.zeros(n, dtype=np.complex128)
        a[: self._c.size] = self._c
        b[: other._c.size] = other._c
        return a, b

    def __add__(self, other):
        other = _as_poly(other)
        a, b = self._pad(other)
        return ComplexPoly(a + b)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_poly(other)
        a, b = self._pad(other)
        return ComplexPoly(a - b)

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __neg__(self):
        return ComplexPoly(-self._c)

    def __mul__(self, other):
        other = _as_poly(other)
        if self.is_zero or other.is_zero:
            return ComplexPoly()
        return ComplexPoly(np.convolve(self._c, other._c))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = ComplexPoly([1.0])
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, ComplexPoly):
            return NotImplemented
        return self._c.size == other._c.size and bool(np.all(self._c == other._c))

    def __hash__(self):
        return hash(tuple(self._c.tolist()))

    def __repr__(self):
        return f"ComplexPoly({self._c.tolist()!r})"

    # serialization --------------------------------------------------------
    def to_json_obj(self) -> list[list[float]]:
        return [[float(c.real), float(c.imag)] for c in self._c]

    @classmethod
    def from_json_obj(cls, obj) -> "ComplexPoly":
        out = []
        for item in obj:
            if isinstance(item, (list, tuple)):
                re = float(item[0])
                im = float(item[1]) if len(item) > 1 else 0.0
                out.append(complex(re, im))
            else:
                out.append(complex(item))
        return cls(out)

    @classmethod
    def parse(cls, text: str) -> "ComplexPoly":
        return cls.from_json_obj(json.loads(text))


def _as_poly(x) -> ComplexPoly:
    if isinstance(x, ComplexPoly):
        return x
    return ComplexPoly([complex(x)])


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def eval_poly(p: ComplexPoly, z):
    """Nested (Horner) evaluation; scalars in, scalars out."""
    if np.isscalar(z):
        acc = 0j
        for c in p.coeffs[::-1]:
            acc = acc * z + c
        return complex(acc)
    return _kernels.horner(p.coeffs, np.asarray(z))


def derivative(p: ComplexPoly, order: int = 1) -> ComplexPoly:
    if order < 0:
        raise ValueError("order must be nonnegative")
    c = p.coeffs
    for _ in range(order):
        if c.size <= 1:
            return ComplexPoly()
        c = c[1:] * np.arange(1, c.size)
    return ComplexPoly(c)


def coeff_norm(q: ComplexPoly) -> float:
    """|||q|||: the sum of the absolute values of the coefficients."""
    return float(np.sum(np.abs(q.coeffs)))


def taylor_coefficients(p: ComplexPoly, alpha: complex) -> np.ndarray:
    """Coefficients c_mu = p^(mu)(alpha)/mu! of p(alpha + h) in powers of h.

    Repeated synthetic division; exact for the shift up to rounding.
    """
    c = np.array(p.coeffs, dtype=np.complex128)
    n = c.size
    out = np.zeros(n, dtype=np.complex128)
    for k in range(n):
        # divide c (ascending, length n-k) by (z - alpha); remainder is c_k
        acc = 0j
        quot = np.zeros(n - k - 1, dtype=np.complex128)
        for i in range(n - k - 1, -1, -1):
            acc = acc * alpha + c[i]
            if i > 0:
                quot[i - 1] = acc
        out[k] = acc
        c = quot
    return out


def derivatives_at(p: ComplexPoly, alpha: complex) -> np.ndarray:
    """p^(nu)(alpha) for nu = 0..deg p."""
    t = taylor_coefficients(p, alpha)
    fact = np.array([math.factorial(k) for k in range(t.size)], dtype=float)
    return t * fact


def vanishing_order(p: ComplexPoly, alpha: complex, tol: float = 1e-8) -> int:
    """Smallest nu whose Taylor coefficient at alpha clears ``tol`` relative
    to the largest Taylor coefficient there."""
    if p.is_zero:
        raise ZeroPolynomial("vanishing order of the zero polynomial is undefined")
    t = np.abs(taylor_coefficients(p, alpha))
    scale = t.max()
    return int(np.flatnonzero(t > tol * scale)[0])


def nonvanishing_derivatives(p: ComplexPoly, alpha: complex, tol: float = 1e-8) -> np.ndarray:
    """Boolean mask over nu = 0..deg p of 'P^(nu)(alpha) != 0' at threshold tol."""
    t = np.abs(taylor_coefficients(p, alpha))
    return t > tol * t.max()


# ---------------------------------------------------------------------------
# roots
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RootSet:
    """Distinct root locations with multiplicities, plus the merge radius."""

    entries: tuple[tuple[complex, int], ...]
    tol: float
    residual: float = 0.0

    @property
    def locations(self) -> np.ndarray:
        return np.array([e[0] for e in self.entries], dtype=np.complex128)

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([e[1] for e in self.entries], dtype=np.int64)

    @property
    def degree(self) -> int:
        return int(sum(m for _, m in self.entries))

    def expanded(self) -> np.ndarray:
        """The multiset S with every root repeated by its multiplicity."""
        return np.array([z for z, m in self.entries for _ in range(m)], dtype=np.complex128)

    def index_of(self, alpha: complex) -> int:
        locs = self.locations
        i = int(np.argmin(np.abs(locs - alpha)))
        if abs(locs[i] - alpha) > max(self.tol, 1e-12 * (1 + abs(alpha))):
            raise KeyError(f"{alpha} is not a root of this set")
        return i

    def to_json_obj(self):
        return {"roots": [[z.real, z.imag] for z, _ in self.entries],
                "multiplicities": [m for _, m in self.entries], "tol": self.tol}

    @classmethod
    def from_points(cls, points: Sequence[complex], tol: float = 0.0) -> "RootSet":
        return _cluster(np.asarray(points, dtype=np.complex128), tol)


def default_tol(q: ComplexPoly) -> float:
    return 1e-7 * (1.0 + coeff_norm(q))


def _cluster(z: np.ndarray, tol: float, residual: float = 0.0) -> RootSet:
    n = z.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(z[i] - z[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    entries = []
    for idx in groups.values():
        c = complex(np.mean(z[idx]))
        entries.append((c, len(idx)))
    # deterministic order: lexicographic on (re, im)
    entries.sort(key=lambda e: (e[0].real, e[0].imag))
    return RootSet(tuple(entries), float(tol), residual)


def _root_scale_exponent(c: np.ndarray) -> int:
    """e with every |c_j| / 2^(e (n - j)) at most 1 for the monic ascending
    coefficients c: a power-of-two bound on the root radius read off the
    binary exponents, so a dilation by 2^k shifts it by exactly k."""
    n = c.size - 1
    e = None
    for j in range(n):
        a = abs(c[j])
        if a == 0 or not math.isfinite(a):
            continue
        ej = -((-math.frexp(a)[1]) // (n - j))      # ceil(exp_j / (n - j))
        e = ej if e is None else max(e, ej)
    return 0 if e is None else e


def roots(q: ComplexPoly, tol: float | None = None, refine: bool = True) -> RootSet:
    """All roots of q, merged into clusters of radius ``tol``.

    Eigenvalues of the companion matrix of the monic normalization, solved
    after rescaling z = 2^e w so the roots have modulus about one.  The
    rescaling is exact, which makes the result equivariant under power-of-two
    dilations.  Roots closer than ``tol`` are merged at their centroid with
    the cluster size as multiplicity; the default ``tol`` is the default for
    the rescaled polynomial, mapped back.  With ``refine`` a second pass
    merges the wider eps**(1/m) splitting of an m-fold root when the merged
    centroid passes a Taylor test of order m.
    """
    if q.is_zero or q.degree < 1:
        raise ValueError("roots() needs a polynomial of degree >= 1")
    monic = q.monic()
    c = monic.coeffs
    n = c.size - 1
    e = _root_scale_exponent(c)
    shift = -e * (n - np.arange(n + 1))
    w_poly = ComplexPoly(np.ldexp(c.real, shift) + 1j * np.ldexp(c.imag, shift))
    rho = math.ldexp(1.0, e)
    tol_w = default_tol(w_poly) if tol is None else tol / rho
    wc = w_poly.coeffs
    comp = np.zeros((n, n), dtype=np.complex128)
    comp[0, :] = -wc[-2::-1]
    if n > 1:
        comp[np.arange(1, n), np.arange(n - 1)] = 1.0
    try:
        w = np.linalg.eigvals(comp)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NonConvergence(str(exc)) from exc
    if not np.all(np.isfinite(w)):
        raise NonConvergence("companion eigenvalues are not finite")
    rs = _cluster(w, tol_w)
    if refine:
        rs = _refine_multiplicities(w_poly, rs)
    entries = tuple((complex(math.ldexp(z.real, e), math.ldexp(z.imag, e)), m) for z, m in rs.entries)
    recon = ComplexPoly.from_roots([z for z, m in entries for _ in range(m)])
    residual = coeff_norm(recon - monic)
    return RootSet(entries, tol_w * rho, residual)


_MULT_EPS = 1e-16
_MULT_TAYLOR_TOL = 1e-13


def _refine_multiplicities(monic: ComplexPoly, rs: RootSet) -> RootSet:
    entries = [(complex(c), int(m)) for c, m in rs.entries]
    scale = 1.0 + coeff_norm(monic)
    out: list[tuple[complex, int]] = []
    used = [False] * len(entries)
    total = sum(m for _, m in entries)
    for m in range(total, 1, -1):
        for i, (ci, mi) in enumerate(entries):
            if used[i] or mi >= m:
                continue
            order = sorted(
                (j for j in range(len(entries)) if not used[j] and j != i),
                key=lambda j: abs(entries[j][0] - ci),
            )
            group, size = [i], mi
            for j in order:
                if size >= m:
                    break
                group.append(j)
                size += entries[j][1]
            if size != m:
                continue
            c = sum(entries[j][0] * entries[j][1] for j in group) / m
            radius = 4.0 * (_MULT_EPS * scale) ** (1.0 / m) * (1.0 + abs(c))
            if max(abs(entries[j][0] - c) for j in group) > radius:
                continue
            t = np.abs(taylor_coefficients(monic, c))
            # order j may carry eps**((m-j)/m) of backward error
            allow = _MULT_TAYLOR_TOL ** ((m - np.arange(m)) / m)
            if np.all(t[:m] <= allow * t.max()):
                for j in group:
                    used[j] = True
                out.append((c, m))
    out.extend(e for e, u in zip(entries, used) if not u)
    out.sort(key=lambda e: (e[0].real, e[0].imag))
    return RootSet(tuple(out), rs.tol, rs.residual)


def residual_bound(q: ComplexPoly) -> float:
    """Reconstruction budget for roots(): 1e-8 * |||q / leading|||."""
    return 1e-8 * coeff_norm(q.monic())


def polydiv(num: ComplexPoly, den: ComplexPoly) -> tuple[ComplexPoly, ComplexPoly]:
    """Quotient and remainder of polynomial long division."""
    if den.is_zero:
        raise ZeroPolynomial("division by the zero polynomial")
    n = num.coeffs.astype(np.complex128).copy()
    d = den.coeffs
    if n.size < d.size:
        return ComplexPoly(), num
    q = np.zeros(n.size - d.size + 1, dtype=np.complex128)
    for i in range(q.size - 1, -1, -1):
        q[i] = n[i + d.size - 1] / d[-1]
        n[i: i + d.size] -= q[i] * d
    return ComplexPoly(q), ComplexPoly(n[: d.size - 1])
