"""Absolute rational powers and the vectorized integrands built from them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .errors import ZeroNumerator
from .estimator import ExponentPair, VANISH_TOL
from .polynomial import ComplexPoly, RootSet, roots, vanishing_order


@dataclass(frozen=True)
class ARPExpr:
    """(sum_i |P_i|^2)^(eps/2) / (sum_j |Q_j|^2)^(delta/2)."""

    numerator_terms: tuple[ComplexPoly, ...]
    denominator_terms: tuple[ComplexPoly, ...]
    pair: ExponentPair

    def __post_init__(self):
        object.__setattr__(self, "numerator_terms", tuple(self.numerator_terms))
        object.__setattr__(self, "denominator_terms", tuple(self.denominator_terms))
        if not self.numerator_terms or all(p.is_zero for p in self.numerator_terms):
            raise ZeroNumerator("at least one numerator term must be nonzero")

    @classmethod
    def ratio(cls, P: ComplexPoly, Q: ComplexPoly, pair: ExponentPair) -> "ARPExpr":
        return cls((P,), (Q,), pair)

    def __call__(self, z):
        num = sum(np.abs(p(z)) ** 2 for p in self.numerator_terms)
        den = sum(np.abs(q(z)) ** 2 for q in self.denominator_terms) if self.denominator_terms else 1.0
        e, d = float(self.pair.eps), float(self.pair.delta)
        with np.errstate(divide="ignore", invalid="ignore"):
            return num ** (e / 2) / den ** (d / 2)


# ---------------------------------------------------------------------------
# integrands
# ---------------------------------------------------------------------------

@dataclass
class Integrand:
    """A nonnegative function on the plane with its known singular points.

    ``exponents[i]`` is the local blowup exponent a with f ~ |z - c_i|^(-a).
    """

    fn: Callable[[np.ndarray], np.ndarray]
    centers: list[complex] = field(default_factory=list)
    exponents: list[float] = field(default_factory=list)

    def __call__(self, z):
        return self.fn(np.asarray(z, dtype=np.complex128))


class _Factored:
    """|lead| * prod |z - r|^m from a RootSet, robust near clustered roots."""

    def __init__(self, p: ComplexPoly, tol=None):
        self.const = p.is_zero or p.degree == 0
        self.lead = abs(p.leading) if not p.is_zero else 0.0
        if not self.const:
            self.rs: RootSet | None = roots(p, tol)
            self.pts = self.rs.expanded()
        else:
            self.rs = None
            self.pts = np.zeros(0, dtype=np.complex128)

    def __call__(self, z):
        if self.const:
            return np.full(np.shape(z), self.lead)
        return self.lead * _kernels.abs_product(z, self.pts)


def _horner_abs(p: ComplexPoly):
    return lambda z: np.abs(p(z))


def ratio_integrand(P: ComplexPoly, Q: ComplexPoly, pair: ExponentPair, mu: float | None = None,
                    factored: bool = True, tol=None) -> Integrand:
    """|P|^eps / |Q|^delta, or / (|Q| + mu)^delta when ``mu`` is given."""
    e, d = float(pair.eps), float(pair.delta)
    fp = _Factored(P) if factored else _horner_abs(P)
    fq = _Factored(Q, tol) if factored else _horner_abs(Q)
    add = 0.0 if mu is None else float(mu)

    def fn(z):
        num = fp(z) ** e if e else 1.0
        with np.errstate(divide="ignore"):
            return num / (fq(z) + add) ** d

    centers, exps = [], []
    if Q.degree:
        rs = fq.rs if factored else roots(Q, tol)
        for c, m in rs.entries:
            nu = vanishing_order(P, c, VANISH_TOL) if not P.is_zero else 0
            centers.append(c)
            exps.append(0.0 if mu is not None else m * d - nu * e)
    return Integrand(fn, centers, exps)


def arp_integrand(R: ARPExpr, mu: float | None = None, l1_denominator: bool = False,
                  factored: bool = True) -> Integrand:
    """The integrand of an ARP.

    ``l1_denominator`` replaces (sum |Q_j|^2)^(1/2) by sum |Q_j|, and ``mu``
    adds a constant to that denominator before the power is taken.
    """
    e, d = float(R.pair.eps), float(R.pair.delta)
    nums = [_Factored(p) if factored else _horner_abs(p) for p in R.numerator_terms]
    dens = [_Factored(q) if factored else _horner_abs(q) for q in R.denominator_terms]
    add = 0.0 if mu is None else float(mu)

    def fn(z):
        if len(nums) == 1:
            num = nums[0](z) ** e if e else 1.0
        else:
            num = sum(f(z) ** 2 for f in nums) ** (e / 2) if e else 1.0
        if not dens:
            den = np.ones(np.shape(z))
        elif len(dens) == 1:
            den = dens[0](z)
        elif l1_denominator:
            den = sum(f(z) for f in dens)
        else:
            den = np.sqrt(sum(f(z) ** 2 for f in dens))
        with np.errstate(divide="ignore"):
            return num / (den + add) ** d

    # singular candidates: every root of every denominator term
    centers: list[complex] = []
    for q in R.denominator_terms:
        if q.degree:
            for c, _ in roots(q).entries:
                if all(abs(c - o) > 1e-12 for o in centers):
                    centers.append(c)
    exps = []
    for c in centers:
        if mu is not None:
            exps.append(0.0)
            continue
        qo = min(vanishing_order(q, c, VANISH_TOL) for q in R.denominator_terms if not q.is_zero)
        po = min(vanishing_order(p, c, VANISH_TOL) for p in R.numerator_terms if not p.is_zero)
        exps.append(qo * d - po * e)
    return Integrand(fn, centers, exps)


def power_integrand(delta: float, center: complex = 0.0) -> Integrand:
    """|z - center|^(-delta)."""
    d = float(delta)

    def fn(z):
        with np.errstate(divide="ignore"):
            return np.abs(z - center) ** (-d)

    return Integrand(fn, [complex(center)], [d])


def as_integrand(obj) -> Integrand:
    if isinstance(obj, Integrand):
        return obj
    if isinstance(obj, ARPExpr):
        return arp_integrand(obj)
    if callable(obj):
        return Integrand(obj)
    raise TypeError(f"cannot integrate {type(obj).__name__}")
