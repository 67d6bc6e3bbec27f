"""Algebraic size formulas for integrals of |P|^eps / |Q|^delta over a disk.

Every value here is a size: it matches the true integral up to a factor
bounded in terms of the degrees and the exponents alone.  Exponents are
exact rationals so the finiteness and degeneracy decisions are exact.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateExponents,
    MultipleRoots,
    RangeViolation,
    RootsOutsideHalfDisk,
    ScaleOrderViolation,
    ZeroNumerator,
)
from .polynomial import (
    ComplexPoly,
    RootSet,
    derivatives_at,
    nonvanishing_derivatives,
    roots,
    vanishing_order,
)
from .scales import scale_table

VANISH_TOL = 1e-8


# ---------------------------------------------------------------------------
# exponents
# ---------------------------------------------------------------------------

def as_fraction(x) -> Fraction:
    """Parse ``x`` exactly: ints, Fractions and "p/q" strings stay exact;
    floats go through their shortest decimal repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(str(x).strip())


@dataclass(frozen=True)
class ExponentPair:
    eps: Fraction
    delta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "eps", as_fraction(self.eps))
        object.__setattr__(self, "delta", as_fraction(self.delta))
        if self.eps < 0 or self.delta < 0:
            raise ValueError("exponents must be nonnegative")

    @classmethod
    def parse(cls, eps, delta) -> "ExponentPair":
        return cls(as_fraction(eps), as_fraction(delta))

    def to_json_obj(self):
        return {"eps": str(self.eps), "delta": str(self.delta)}


def degeneracy_witness(pair: ExponentPair, M: int, N: int):
    """First (nu, k) with nu*eps + 2 == (N-k)*delta, or None."""
    for nu in range(M + 1):
        lhs = nu * pair.eps + 2
        for k in range(N + 1):
            if lhs == (N - k) * pair.delta:
                return nu, k
    return None


def nondegenerate(pair: ExponentPair, M: int, N: int) -> bool:
    return degeneracy_witness(pair, M, N) is None


def degeneracy_margin(pair: ExponentPair, M: int, N: int) -> Fraction:
    """min over (nu, k) of |nu*eps + 2 - (N-k)*delta|."""
    return min(abs(nu * pair.eps + 2 - (N - k) * pair.delta)
               for nu in range(M + 1) for k in range(N + 1))


def _require_nondegenerate(pair: ExponentPair, M: int, N: int) -> None:
    w = degeneracy_witness(pair, M, N)
    if w is not None:
        nu, k = w
        raise DegenerateExponents(
            f"degenerate exponents eps={pair.eps}, delta={pair.delta}: "
            f"nu*eps + 2 = (N-k)*delta at (nu, k) = ({nu}, {k})", nu=nu, k=k)


def k_index(nu: int, pair: ExponentPair, N: int) -> int:
    """-1 if nu*eps + 2 > N*delta, else the k with
    (N-k-1)*delta < nu*eps + 2 < (N-k)*delta."""
    x = nu * pair.eps + 2
    if x > N * pair.delta:
        return -1
    for k in range(N):
        lo, hi = (N - k - 1) * pair.delta, (N - k) * pair.delta
        if x == hi:
            raise DegenerateExponents(
                f"nu*eps + 2 = (N-k)*delta at (nu, k) = ({nu}, {k})", nu=nu, k=k)
        if lo < x < hi:
            return k
    # x == 0 * delta is impossible since x >= 2
    raise DegenerateExponents(f"no admissible k for nu={nu}", nu=nu)  # pragma: no cover


def _pow(base: float, exp: float) -> float:
    """base**exp with 0**positive = 0, 0**0 = 1 and 0**negative = inf."""
    if base == 0.0:
        if exp > 0:
            return 0.0
        return 1.0 if exp == 0 else math.inf
    return base ** exp


def phi(nu: int, k: int, row: Sequence[float], lam: float, pair: ExponentPair) -> float:
    """Phi_{nu,k}(alpha) for one row L_0(alpha) >= ... >= L_{N-1}(alpha)."""
    N = len(row)
    x = nu * float(pair.eps) + 2.0
    d = float(pair.delta)
    if k == -1:
        return _pow(lam, N * d - x)
    out = _pow(float(row[k]), (N - k) * d - x)
    for i in range(k):
        out *= _pow(float(row[i]), d)
    return out


def _contribution(pnu_abs: float, eps: float, ph: float) -> float:
    num = _pow(pnu_abs, eps)
    if ph == 0.0:
        return math.inf if num > 0 else 0.0
    return num / ph


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------

def _num(x: float):
    return "inf" if math.isinf(x) else float(x)


@dataclass
class Contribution:
    root: complex | None
    nu: int
    k: int
    phi: float
    contribution: float

    def to_json_obj(self):
        root = None if self.root is None else [self.root.real, self.root.imag]
        return {"root": root, "nu": self.nu, "k": self.k,
                "phi": _num(self.phi), "contribution": _num(self.contribution)}


@dataclass
class SizeEstimate:
    value: float
    lam: float
    breakdown: list[Contribution] = field(default_factory=list)
    scales_method: str = "exact"

    @property
    def finite(self) -> bool:
        return not math.isinf(self.value)

    def to_json_obj(self):
        return {"value": _num(self.value), "lambda": float(self.lam),
                "breakdown": [c.to_json_obj() for c in self.breakdown],
                "scales_method": self.scales_method}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())


def _total(parts: list[Contribution]) -> float:
    # fixed order: roots are already sorted lexicographically
    return float(math.fsum(c.contribution for c in parts)) if not any(
        math.isinf(c.contribution) for c in parts) else math.inf


# ---------------------------------------------------------------------------
# shared preparation
# ---------------------------------------------------------------------------

@dataclass
class _Prepared:
    rs: RootSet
    table: np.ndarray
    method: str
    lead_factor: float   # |lead Q|^(-delta)


def _prepare(Q: ComplexPoly, pair: ExponentPair, lam: float, tol, check_disk=True,
             radius_factor=0.5) -> _Prepared:
    rs = roots(Q, tol)
    if check_disk:
        bad = [z for z in rs.locations if abs(z) >= radius_factor * lam]
        if bad:
            raise RootsOutsideHalfDisk(
                f"roots {bad} of Q are not inside the disk of radius {radius_factor * lam}")
    st = scale_table(rs)
    lead = abs(Q.leading)
    return _Prepared(rs, st.scales, st.method, lead ** (-float(pair.delta)))


def _degree(P: ComplexPoly) -> int:
    return 0 if P.is_zero else P.degree


# ---------------------------------------------------------------------------
# the main estimate
# ---------------------------------------------------------------------------

def estimate(P: ComplexPoly, Q: ComplexPoly, pair: ExponentPair, lam: float = 1.0,
             tol: float | None = None, vanish_tol: float = VANISH_TOL) -> SizeEstimate:
    """Size of the integral of |P|^eps / |Q|^delta over the disk of radius lam.

    Sums |P^(nu)(alpha)|^eps / Phi_{nu,k_nu}(alpha) over the distinct roots
    alpha of Q and the nu with P^(nu)(alpha) != 0.  A zero Phi yields +inf.
    """
    lam = float(lam)
    eps = float(pair.eps)
    if P.is_zero:
        return SizeEstimate(0.0, lam)
    M = P.degree
    if Q.is_zero:
        raise ZeroNumerator("Q is identically zero")  # integrand is +inf everywhere
    if Q.degree == 0:
        return _constant_denominator(P, Q, pair, lam)
    N = Q.degree
    _require_nondegenerate(pair, M, N)
    prep = _prepare(Q, pair, lam, tol)
    ks = [k_index(nu, pair, N) for nu in range(M + 1)]
    parts: list[Contribution] = []
    for alpha, row in zip(prep.rs.locations, prep.table):
        mask = nonvanishing_derivatives(P, alpha, vanish_tol)
        ders = np.abs(derivatives_at(P, alpha))
        for nu in np.flatnonzero(mask):
            nu = int(nu)
            ph = phi(nu, ks[nu], row, lam, pair)
            c = prep.lead_factor * _contribution(ders[nu], eps, ph)
            parts.append(Contribution(complex(alpha), nu, ks[nu], ph, c))
    return SizeEstimate(_total(parts), lam, parts, prep.method)


def _constant_denominator(P, Q, pair, lam) -> SizeEstimate:
    # no roots: the integrand is bounded; size is sum_nu |P^(nu)(0)|^eps lam^(nu eps + 2)
    eps = float(pair.eps)
    c0 = abs(Q.leading) ** (-float(pair.delta))
    ders = np.abs(derivatives_at(P, 0.0))
    parts = []
    for nu, d in enumerate(ders):
        if d == 0:
            continue
        ph = lam ** (-(nu * eps + 2.0))
        parts.append(Contribution(None, nu, -1, ph, c0 * _contribution(d, eps, ph)))
    return SizeEstimate(_total(parts), lam, parts, "none")


def is_finite(P: ComplexPoly, Q: ComplexPoly, pair: ExponentPair,
              tol: float | None = None, vanish_tol: float = VANISH_TOL) -> bool:
    """Exact finiteness: m(alpha)*delta - nu(alpha)*eps < 2 at every root."""
    if P.is_zero:
        raise ZeroNumerator("P is identically zero")
    if Q.is_zero:
        return False
    if Q.degree == 0:
        return True
    rs = roots(Q, tol)
    N = Q.degree
    finite = True
    for alpha, m in rs.entries:
        nu = vanishing_order(P, alpha, vanish_tol)
        s = m * pair.delta - nu * pair.eps
        if s == 2:
            raise DegenerateExponents(
                f"boundary case at root {alpha}: m*delta - nu*eps = 2 "
                f"(m={m}, nu={nu})", nu=nu, k=N - m)
        if s > 2:
            finite = False
    return finite


def openness_sigma(P: ComplexPoly, Q: ComplexPoly, pair: ExponentPair,
                   tol: float | None = None, vanish_tol: float = VANISH_TOL) -> Fraction:
    """Half the smallest slack min_alpha (2 - m*delta + nu*eps)/m, exactly.

    Raising delta by this amount keeps every finite instance finite.
    """
    if Q.degree is None or Q.degree == 0:
        return Fraction(1)
    rs = roots(Q, tol)
    slacks = []
    for alpha, m in rs.entries:
        nu = vanishing_order(P, alpha, vanish_tol)
        slacks.append((2 - m * pair.delta + nu * pair.eps) / m)
    return min(slacks) / 2


# ---------------------------------------------------------------------------
# special forms
# ---------------------------------------------------------------------------

def estimate_pure(Q: ComplexPoly, delta, lam: float = 1.0,
                  tol: float | None = None) -> SizeEstimate:
    """P = 1: lam^(2 - N delta) when N delta < 2, otherwise
    sum_alpha 1 / (L_k0^((N-k0) delta - 2) prod_{i<k0} L_i^delta)."""
    d = as_fraction(delta)
    pair = ExponentPair(0, d)
    lam = float(lam)
    if Q.is_zero:
        raise ZeroNumerator("Q is identically zero")
    if Q.degree == 0:
        return _constant_denominator(ComplexPoly([1.0]), Q, pair, lam)
    N = Q.degree
    _require_nondegenerate(pair, 0, N)
    prep = _prepare(Q, pair, lam, tol)
    if N * d < 2:
        v = prep.lead_factor * lam ** (2.0 - N * float(d))
        return SizeEstimate(v, lam, [Contribution(None, 0, -1, 1.0 / v, v)], prep.method)
    k0 = next(k for k in range(N) if (N - k - 1) * d < 2 < (N - k) * d)
    df = float(d)
    parts = []
    for alpha, row in zip(prep.rs.locations, prep.table):
        den = _pow(float(row[k0]), (N - k0) * df - 2.0)
        for i in range(k0):
            den *= _pow(float(row[i]), df)
        c = prep.lead_factor * (math.inf if den == 0 else 1.0 / den)
        parts.append(Contribution(complex(alpha), 0, k0, den, c))
    return SizeEstimate(_total(parts), lam, parts, prep.method)


def estimate_symmetric(P: ComplexPoly, Q: ComplexPoly, pair: ExponentPair, lam: float = 1.0,
                       tol: float | None = None, vanish_tol: float = VANISH_TOL,
                       check_disk: bool = True, radius_factor: float = 0.5) -> SizeEstimate:
    """Sum over every nu = 0..M and every k = -1..N-2 (simple roots only)."""
    lam = float(lam)
    eps = float(pair.eps)
    if P.is_zero:
        return SizeEstimate(0.0, lam)
    M, N = P.degree, Q.degree
    if N is None or N == 0:
        return estimate(P, Q, pair, lam)
    _require_nondegenerate(pair, M, N)
    prep = _prepare(Q, pair, lam, tol, check_disk, radius_factor)
    if np.any(prep.rs.multiplicities > 1):
        raise MultipleRoots("the symmetric form needs simple roots")
    parts = []
    for alpha, row in zip(prep.rs.locations, prep.table):
        mask = nonvanishing_derivatives(P, alpha, vanish_tol)
        ders = np.abs(derivatives_at(P, alpha))
        for nu in np.flatnonzero(mask):
            nu = int(nu)
            for k in range(-1, N - 1):
                ph = phi(nu, k, row, lam, pair)
                c = prep.lead_factor * _contribution(ders[nu], eps, ph)
                parts.append(Contribution(complex(alpha), nu, k, ph, c))
    return SizeEstimate(_total(parts), lam, parts, prep.method)


def estimate_supform(P: ComplexPoly, Q: ComplexPoly, pair: ExponentPair, lam: float = 1.0,
                     circle_samples: int = 64, tol: float | None = None) -> SizeEstimate:
    """Sum over roots and k = -1..N-1 of sup_{|z-alpha| = L_k} |P|^eps over
    L_k^((N-k) delta - 2) prod_{i<k} L_i^delta, with L_{-1} read as lam."""
    lam = float(lam)
    eps, d = float(pair.eps), float(pair.delta)
    M = _degree(P)
    N = Q.degree
    if N is None or N == 0:
        raise RangeViolation("the sup form needs a nonconstant Q")
    if not M * pair.eps + 2 < N * pair.delta:
        raise RangeViolation(
            f"the sup form needs M*eps + 2 < N*delta; got {M}*{pair.eps} + 2 >= {N}*{pair.delta}")
    _require_nondegenerate(pair, M, N)
    prep = _prepare(Q, pair, lam, tol)
    if np.any(prep.rs.multiplicities > 1):
        raise MultipleRoots("the sup form needs simple roots")
    theta = 2 * np.pi * np.arange(circle_samples) / circle_samples
    unit = np.exp(1j * theta)
    parts = []
    for alpha, row in zip(prep.rs.locations, prep.table):
        for k in range(-1, N):
            radius = lam if k == -1 else float(row[k])
            sup = float(np.max(np.abs(P(alpha + radius * unit)))) if not P.is_zero else 0.0
            num = _pow(sup, eps)
            if k == -1:
                den = _pow(lam, N * d - 2.0)
            else:
                den = _pow(radius, (N - k) * d - 2.0)
                for i in range(k):
                    den *= _pow(float(row[i]), d)
            c = prep.lead_factor * _contribution(sup, eps, den) if num > 0 else 0.0
            parts.append(Contribution(complex(alpha), -1, k, den, c))
    return SizeEstimate(_total(parts), lam, parts, prep.method)


# ---------------------------------------------------------------------------
# scalar lemmas
# ---------------------------------------------------------------------------

def radial_size(p, delta, lam: float, L: Sequence[float], c: float = 0.5) -> float:
    """Closed-form size of int_0^lam r^p / prod_i (r + L_i)^delta dr/r."""
    p_f, d_f = float(p), float(delta)
    L = [float(x) for x in L]
    N = len(L)
    if N == 0 or L[-1] != 0.0:
        raise ScaleOrderViolation("the scale list must end with 0")
    if any(L[i] < L[i + 1] for i in range(N - 1)):
        raise ScaleOrderViolation("scales must be nonincreasing")
    if not 0 < c < 1 or L[0] > c * lam:
        raise ScaleOrderViolation(f"need L_0 <= c*lam with c < 1 (c={c})")
    pe, de = as_fraction(p), as_fraction(delta)
    for k in range(N + 1):
        if pe == (N - k) * de:
            raise DegenerateExponents(f"p = (N-k)*delta at k = {k}", k=k)
    if pe > N * de:
        return lam ** (p_f - N * d_f)
    for k in range(N):
        if (N - k - 1) * de < pe < (N - k) * de:
            den = _pow(L[k], (N - k) * d_f - p_f)
            for i in range(k):
                den *= _pow(L[i], d_f)
            return math.inf if den == 0 else 1.0 / den
    return math.inf  # p <= 0: the r^(p-1) endpoint is not integrable


def circle_size(P: ComplexPoly, eps, interval_length: float, lam_min: float = 0.1) -> float:
    """sum_nu |a_nu|^eps, the size of int_I |P(e^{i theta})|^eps d theta."""
    if interval_length < lam_min:
        raise RangeViolation(f"interval length {interval_length} is below {lam_min}")
    e = float(eps)
    return float(sum(_pow(abs(a), e) for a in P.coeffs))


# ---------------------------------------------------------------------------
# regularized formula (experimental)
# ---------------------------------------------------------------------------

def regularized_estimate(P: ComplexPoly, Q: ComplexPoly, pair: ExponentPair, mu: float,
                         lam: float = 1.0, tol: float | None = None,
                         vanish_tol: float = VANISH_TOL) -> float:
    """Experimental.  Sum_alpha sum_nu |P^(nu)(alpha)|^eps
    prod_k [mu^N + L_k(alpha)^(N-k)]^(-kappa_k) with
    kappa_k = (nu eps + 2)/((N-k-1)(N-k)) for k <= N-2 and
    kappa_{N-1} = delta - nu, taken literally.  The intended regime is
    M*nu + 2 < delta*N for every nu in the sum.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    if P.is_zero:
        return 0.0
    M, N = P.degree, Q.degree
    if N is None or N == 0:
        raise RangeViolation("the regularized formula needs a nonconstant Q")
    lead = abs(Q.leading)
    Qm = Q.monic()
    for nu in range(M + 1):
        if not M * nu + 2 < pair.delta * N:
            raise RangeViolation(
                f"regime M*nu + 2 < delta*N fails at nu={nu} (M={M}, N={N}, delta={pair.delta})")
    rs = roots(Qm, tol)
    table = scale_table(rs).scales
    eps, d = float(pair.eps), float(pair.delta)
    total = 0.0
    for alpha, row in zip(rs.locations, table):
        mask = nonvanishing_derivatives(P, alpha, vanish_tol)
        ders = np.abs(derivatives_at(P, alpha))
        for nu in np.flatnonzero(mask):
            nu = int(nu)
            term = _pow(float(ders[nu]), eps)
            for k in range(N):
                kappa = (nu * eps + 2.0) / ((N - k - 1) * (N - k)) if k <= N - 2 else d - nu
                term *= (mu ** N + float(row[k]) ** (N - k)) ** (-kappa)
            total += term
    return total * lead ** (-d)


# ---------------------------------------------------------------------------
# dilation
# ---------------------------------------------------------------------------

def dilate(P: ComplexPoly, Q: ComplexPoly, lam: float, s: float):
    """(s^-M P(s z), s^-N Q(s z), lam / s): roots and scales shrink by 1/s."""
    def scaled(p: ComplexPoly) -> ComplexPoly:
        if p.is_zero:
            return p
        n = p.degree
        return ComplexPoly(p.coeffs * s ** (np.arange(n + 1) - n))
    return scaled(P), scaled(Q), lam / s


def dilation_exponent(pair: ExponentPair, M: int, N: int) -> Fraction:
    """Every breakdown term of the dilated problem is s to this power times
    the original term."""
    return N * pair.delta - M * pair.eps - 2
