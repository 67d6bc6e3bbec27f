"""Multivariate layer: germs, orders of vanishing, numeric Weierstrass
preparation, the iterated two-variable reduction, critical exponents,
continuity and perturbation probes, and sublevel-set volumes."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.stats import unitary_group

from . import _kernels
from .errors import (
    AllZero,
    BaseDiverges,
    BracketInvalid,
    CaseNotCovered,
    NoFiniteOrder,
    RootCountMismatch,
    ZeroGerm,
)
from .estimator import ExponentPair, as_fraction, nondegenerate
from .expr import Integrand, power_integrand, ratio_integrand
from .oracle import OracleResult, integrate_disk, integrate_polydisk_mc
from .polynomial import ComplexPoly, coeff_norm, polydiv, vanishing_order

ABSTAIN_BAND = 0.05
DEFAULT_RADII = (0.3, 0.3)


# ---------------------------------------------------------------------------
# germs
# ---------------------------------------------------------------------------

def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0j) + ca * cb
    return out


class Germ:
    """A polynomial in n <= 3 variables, read as a truncated power series at 0."""

    def __init__(self, n: int, terms):
        self.n = int(n)
        acc: dict[tuple[int, ...], complex] = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for exp, coef in items:
            exp = tuple(int(x) for x in exp)
            if len(exp) != self.n:
                raise ValueError(f"exponent {exp} does not have {self.n} entries")
            acc[exp] = acc.get(exp, 0j) + complex(coef)
        self.terms = {e: c for e, c in acc.items() if c != 0}
        self._exps = np.array(list(self.terms), dtype=np.int64).reshape(-1, self.n)
        self._coefs = np.array(list(self.terms.values()), dtype=np.complex128)

    # --- construction and I/O -------------------------------------------------
    @classmethod
    def from_json_obj(cls, obj) -> "Germ":
        terms = []
        for t in obj["terms"]:
            c = t["coef"]
            coef = complex(c[0], c[1] if len(c) > 1 else 0.0) if isinstance(c, (list, tuple)) else complex(c)
            terms.append((tuple(t["exp"]), coef))
        return cls(obj["n"], terms)

    @classmethod
    def parse(cls, text: str) -> "Germ":
        return cls.from_json_obj(json.loads(text))

    def to_json_obj(self):
        return {"n": self.n, "terms": [{"exp": list(e), "coef": [c.real, c.imag]}
                                       for e, c in sorted(self.terms.items())]}

    def __repr__(self):
        return f"Germ({self.n}, {self.terms!r})"

    # --- algebra ----------------------------------------------------------------
    def __add__(self, other: "Germ") -> "Germ":
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0j) + c
        return Germ(self.n, t)

    def __mul__(self, other: "Germ") -> "Germ":
        return Germ(self.n, _poly_mul(self.terms, other.terms))

    def scale(self, s: complex) -> "Germ":
        return Germ(self.n, {e: s * c for e, c in self.terms.items()})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, k: int) -> int:
        return max((e[k] for e in self.terms), default=0)

    def rotate(self, U: np.ndarray) -> "Germ":
        """The germ w -> f(U w)."""
        n = self.n
        linear = []
        for i in range(n):
            lin = {}
            for j in range(n):
                e = [0] * n
                e[j] = 1
                if U[i, j] != 0:
                    lin[tuple(e)] = complex(U[i, j])
            linear.append(lin)
        out: dict = {}
        for exp, c in self.terms.items():
            acc = {tuple([0] * n): c}
            for i, k in enumerate(exp):
                for _ in range(k):
                    acc = _poly_mul(acc, linear[i])
            for e, v in acc.items():
                out[e] = out.get(e, 0j) + v
        return Germ(n, {e: v for e, v in out.items() if abs(v) > 1e-15})

    # --- evaluation -------------------------------------------------------------
    def __call__(self, Z) -> np.ndarray:
        """Values at the rows of Z, shape (K, n)."""
        Z = np.asarray(Z, dtype=np.complex128)
        if Z.ndim == 1:
            Z = Z[:, None] if self.n == 1 else Z[None, :]
        out = np.zeros(Z.shape[0], dtype=np.complex128)
        for e, c in zip(self._exps, self._coefs):
            term = np.full(Z.shape[0], c)
            for k in range(self.n):
                if e[k]:
                    term = term * Z[:, k] ** e[k]
            out += term
        return out

    def slice_coeffs(self, Zp) -> np.ndarray:
        """Ascending coefficients in the last variable at the rows of Zp,
        shape (K, deg_last + 1)."""
        Zp = np.asarray(Zp, dtype=np.complex128).reshape(-1, self.n - 1) if self.n > 1 else \
            np.zeros((np.size(Zp) if np.ndim(Zp) else 1, 0), dtype=np.complex128)
        K = Zp.shape[0]
        dn = self.degree_in(self.n - 1)
        C = np.zeros((K, dn + 1), dtype=np.complex128)
        for e, c in zip(self._exps, self._coefs):
            term = np.full(K, c)
            for k in range(self.n - 1):
                if e[k]:
                    term = term * Zp[:, k] ** e[k]
            C[:, e[-1]] += term
        return C

    def slice_poly(self, zp: Sequence[complex]) -> ComplexPoly:
        return ComplexPoly(self.slice_coeffs(np.array([list(zp)], dtype=np.complex128))[0])


class GermFamily:
    """Terms in (z_1..z_n, c); specialization at c gives a Germ."""

    def __init__(self, n: int, terms, d: int = 1):
        if d != 1:
            raise ValueError("only one-parameter families are supported")
        self.n = int(n)
        self.d = d
        self.terms = {tuple(int(x) for x in e): complex(c) for e, c in
                      (terms.items() if isinstance(terms, dict) else terms)}

    def at(self, c: complex) -> Germ:
        out = {}
        for e, coef in self.terms.items():
            z_exp, c_exp = e[: self.n], e[self.n]
            out[z_exp] = out.get(z_exp, 0j) + coef * complex(c) ** c_exp
        return Germ(self.n, out)

    @classmethod
    def from_json_obj(cls, obj) -> "GermFamily":
        return cls(obj["n"], [(tuple(t["exp"]), complex(*t["coef"])) for t in obj["terms"]])

    def to_json_obj(self):
        return {"n": self.n, "d": self.d, "terms": [{"exp": list(e), "coef": [c.real, c.imag]}
                                                    for e, c in sorted(self.terms.items())]}


# ---------------------------------------------------------------------------
# orders of vanishing
# ---------------------------------------------------------------------------

def vanishing_order_multi(f: Germ) -> int:
    """Lowest total degree carrying a nonzero coefficient."""
    if f.is_zero:
        raise ZeroGerm("the zero germ has no order of vanishing")
    return min(sum(e) for e in f.terms)


def delta_upper_bound(fs: Sequence[Germ], n: int | None = None) -> Fraction:
    """2n/N with N the lowest order of vanishing among the f_j; any finite
    integral has delta strictly below this."""
    nonzero = [f for f in fs if not f.is_zero]
    if not nonzero:
        raise AllZero("every germ is identically zero")
    n = nonzero[0].n if n is None else n
    return Fraction(2 * n, min(vanishing_order_multi(f) for f in nonzero))


# ---------------------------------------------------------------------------
# Weierstrass preparation
# ---------------------------------------------------------------------------

@dataclass
class WeierstrassData:
    N: int
    grid: np.ndarray              # (K, n-1) sample points z'
    coeffs: np.ndarray            # (K, N+1) monic Q(z', Z), ascending
    roots: np.ndarray             # (K, N) tracked roots
    residuals: np.ndarray         # remainder norm of f(z', .) / Q(z', .), relative
    norms: np.ndarray             # |||Q(z', Z) - Z^N|||
    jumps: np.ndarray             # coefficient jumps between consecutive grid points
    unit_min: float               # min |u| over test points / max |u|
    radii: tuple[float, float]
    germ: Germ                    # the (possibly rotated) germ actually prepared
    rotation: np.ndarray | None = None
    refinements: int = 0

    def gate(self, s: float) -> np.ndarray:
        return self.norms < s

    def to_json_obj(self):
        return {"N": self.N, "radii": list(self.radii), "max_residual": float(self.residuals.max()),
                "max_norm": float(self.norms.max()), "max_jump": float(self.jumps.max(initial=0.0)),
                "unit_min": self.unit_min, "rotated": self.rotation is not None,
                "grid_points": int(self.grid.shape[0]), "refinements": self.refinements}


def _batched_roots(C: np.ndarray) -> np.ndarray:
    """Roots of each row's polynomial (ascending coefficients, common degree)."""
    K, m = C.shape
    deg = m - 1
    comp = np.zeros((K, deg, deg), dtype=np.complex128)
    comp[:, 0, :] = -C[:, deg - 1::-1][:, :deg] / C[:, deg][:, None]
    if deg > 1:
        comp[:, np.arange(1, deg), np.arange(deg - 1)] = 1.0
    return np.linalg.eigvals(comp)


def _trim_degree(C: np.ndarray) -> np.ndarray:
    deg = C.shape[1] - 1
    scale = np.abs(C).max()
    while deg > 0 and np.all(np.abs(C[:, deg]) <= 1e-14 * scale):
        deg -= 1
    return C[:, : deg + 1]


def _inner_roots(f: Germ, Zp: np.ndarray, N: int, r_n: float, with_unit: bool = False):
    """The N smallest slice roots at each row of Zp, and whether exactly N
    lie inside r_n/2 with the rest outside r_n.

    With ``with_unit`` also returns |u(z', 0)| = |lead| * prod |outer roots|,
    the size of the unit factor f / Q at the slice centre.
    """
    C = _trim_degree(f.slice_coeffs(Zp))
    deg = C.shape[1] - 1
    if deg < N or np.any(C[:, deg] == 0):
        return (None, False, None) if with_unit else (None, False)
    R = _batched_roots(C)
    order = np.argsort(np.abs(R), axis=1)
    R = np.take_along_axis(R, order, axis=1)
    inside = R[:, :N]
    ok = bool(np.all(np.abs(inside) < r_n / 2))
    if deg > N:
        ok &= bool(np.all(np.abs(R[:, N:]) > r_n))
    if not with_unit:
        return inside, ok
    unit = np.abs(C[:, deg]) * np.prod(np.abs(R[:, N:]), axis=1)
    return inside, ok, unit


def _grid_points(n: int, r: float, g: int) -> np.ndarray:
    """Polar grid in each of the first n-1 variables, ordered so that
    consecutive points are neighbours (rays swept outward in turn)."""
    radii = np.linspace(0, r, g)
    angles = 2 * np.pi * np.arange(g) / g
    ring = [0j] + [rad * np.exp(1j * a) for a in angles for rad in
                   (radii[1:] if int(a * g / (2 * np.pi)) % 2 == 0 else radii[1:][::-1])]
    ring = np.array(ring)
    if n == 2:
        return ring[:, None]
    if n == 3:
        a, b = np.meshgrid(ring, ring, indexing="ij")
        return np.stack([a.ravel(), b.ravel()], axis=1)
    raise ValueError("only n <= 3 is supported")


def _random_unitary(n: int, seed: int) -> np.ndarray:
    return unitary_group.rvs(n, random_state=np.random.default_rng(seed))


def weierstrass_prepare(f: Germ, radii: tuple[float, float] = DEFAULT_RADII, grid_size: int = 9,
                        seed: int = 0, jump_bound: float = 0.5, max_shrink: int = 8,
                        max_rotations: int = 5) -> WeierstrassData:
    """Numeric Weierstrass polynomial of f in the last variable.

    If f(0, z_n) vanishes identically the coordinates are rotated by a seeded
    random unitary.  The radius in z' is halved until every slice has exactly
    N roots inside r_n/2 and none in the annulus up to r_n.
    """
    if f.n < 2:
        raise ValueError("Weierstrass preparation needs n >= 2")
    g = f
    U = None
    for attempt in range(max_rotations + 1):
        sl = g.slice_poly([0.0] * (g.n - 1))
        if not sl.is_zero:
            break
        if attempt == max_rotations:
            raise NoFiniteOrder("f(0, z_n) vanishes identically after every rotation")
        U = _random_unitary(f.n, seed + attempt)
        g = f.rotate(U)
    N = vanishing_order(sl, 0.0, 1e-12)
    if N == 0:
        raise NoFiniteOrder("f does not vanish at the origin")
    r_p, r_n = float(radii[0]), float(radii[1])
    for _ in range(max_shrink + 1):
        Zp = _grid_points(g.n, r_p, grid_size)
        inner, ok = _inner_roots(g, Zp, N, r_n)
        if ok:
            break
        r_p /= 2
    else:
        raise RootCountMismatch(f"slice roots keep escaping |z_n| < {r_n}/2 after {max_shrink} shrinks")

    # track roots along the grid ordering by minimal-distance assignment
    refinements = 0
    tracked = [inner[0]]
    for i in range(1, inner.shape[0]):
        prev = tracked[-1]
        cur = inner[i]
        cost = np.abs(prev[:, None] - cur[None, :])
        _, col = linear_sum_assignment(cost)
        tracked.append(cur[col])
    tracked = np.array(tracked)
    coeffs = np.array([ComplexPoly.from_roots(r).coeffs for r in tracked])
    jumps = np.array([np.sum(np.abs(coeffs[i + 1] - coeffs[i])) for i in range(len(coeffs) - 1)])
    # refine where the jump is large: bisect the offending step once
    big = np.flatnonzero(jumps > jump_bound)
    if big.size:
        mids = (Zp[big] + Zp[big + 1]) / 2
        mid_inner, ok = _inner_roots(g, mids, N, r_n)
        if ok:
            refinements = int(big.size)
            mid_coeffs = np.array([ComplexPoly.from_roots(r).coeffs for r in mid_inner])
            for k, i in enumerate(big):
                jumps[i] = max(np.sum(np.abs(mid_coeffs[k] - coeffs[i])),
                               np.sum(np.abs(coeffs[i + 1] - mid_coeffs[k])))

    residuals = np.empty(len(Zp))
    unit_vals = []
    test = r_n * np.exp(2j * np.pi * np.arange(8) / 8)
    test = np.concatenate([test, test / 2, [0.0]])
    for i, zp in enumerate(Zp):
        sl = g.slice_poly(zp)
        Q = ComplexPoly(coeffs[i])
        quo, rem = polydiv(sl, Q)
        residuals[i] = coeff_norm(rem) / max(coeff_norm(sl), 1e-300)
        unit_vals.append(np.abs(quo(test)))
    unit_vals = np.concatenate(unit_vals)
    unit_min = float(unit_vals.min() / unit_vals.max()) if unit_vals.max() > 0 else 0.0
    norms = np.array([coeff_norm(ComplexPoly(c) - ComplexPoly.monomial(N)) for c in coeffs])
    return WeierstrassData(N, Zp, coeffs, tracked, residuals, norms, jumps, unit_min,
                           (r_p, r_n), g, U, refinements)


# ---------------------------------------------------------------------------
# iterated two-variable reduction
# ---------------------------------------------------------------------------

def _pure_size_batch(R: np.ndarray, delta: float, lam: float) -> np.ndarray:
    """The P = 1 size formula evaluated for every row of roots R, shape (K, N)."""
    K, N = R.shape
    if N * delta < 2:
        return np.full(K, lam ** (2 - N * delta))
    k0 = next(k for k in range(N) if (N - k - 1) * delta < 2 < (N - k) * delta)
    table = _kernels.scale_table(R)          # (K, N, N): [s, a, k]
    Lk = table[:, :, k0]
    with np.errstate(divide="ignore"):
        den = Lk ** ((N - k0) * delta - 2)
        for i in range(k0):
            den = den * table[:, :, i] ** delta
        return np.sum(1.0 / den, axis=1)


@dataclass
class IteratedResult:
    value: float
    verdict: str                      # "finite" | "infinite" | "abstain"
    exponents: dict                   # center -> fitted profile exponent a
    N: int
    radii: tuple[float, float]
    delta_used: float
    oracle: OracleResult | None = None

    @property
    def max_exponent(self) -> float:
        return max(self.exponents.values())

    def to_json_obj(self):
        return {"value": "inf" if math.isinf(self.value) else self.value, "verdict": self.verdict,
                "exponents": {str(k): v for k, v in self.exponents.items()}, "N": self.N,
                "radii": list(self.radii), "delta_used": self.delta_used}


def _discriminant_points(g: Germ, r: float) -> list[complex]:
    """Points z_1 in |z_1| < r where the slice in z_2 has a repeated root."""
    import sympy as sp

    z1, z2 = sp.symbols("z1 z2")
    expr = sp.Integer(0)
    for (a, b), c in g.terms.items():
        expr += (sp.Float(c.real, 30) + sp.I * sp.Float(c.imag, 30)) * z1 ** a * z2 ** b
    poly = sp.Poly(sp.expand(expr), z2)
    if poly.degree() < 2:
        return []
    disc = sp.Poly(sp.discriminant(poly), z1)
    if disc.is_zero or disc.degree() < 1:
        return []
    pts = []
    for rt in disc.nroots(n=15, maxsteps=200):
        w = complex(rt)
        if abs(w) < r and all(abs(w - p) > 1e-9 for p in pts):
            pts.append(w)
    return pts


def _profile_exponent(profile, center: complex, r: float, kmin: int = 6, kmax: int = 18,
                      n_angles: int = 8) -> float:
    """Fitted a in profile(z) ~ |z - center|^(-a) as z -> center."""
    ks = np.arange(kmin, kmax + 1)
    rad = r * 2.0 ** (-ks)
    ang = np.exp(2j * np.pi * (np.arange(n_angles) + 0.37) / n_angles)
    z = center + rad[:, None] * ang[None, :]
    vals = profile(z.ravel()).reshape(z.shape).mean(axis=1)
    if not np.all(np.isfinite(vals)):
        return math.inf   # the inner slice integrals already diverge
    tail = slice(-6, None)
    slope = np.polyfit(np.log(rad[tail]), np.log(vals[tail]), 1)[0]
    return float(-slope)


def _perturb_if_degenerate(delta: float, N: int, step: float) -> float:
    d = as_fraction(delta)
    while not nondegenerate(ExponentPair(0, d), 0, N):
        d += as_fraction(step)
    return float(d)


def iterated_estimate_2d(f: Germ, delta, radii: tuple[float, float] = DEFAULT_RADII,
                         grid_size: int = 9, seed: int = 0, integrate: bool = True,
                         degenerate_step: float = 1e-3, rel_target: float = 2e-2) -> IteratedResult:
    """Size of int |f|^(-delta) over a bidisk by the iterated reduction.

    For each z_1 the inner integral over z_2 is sized by the univariate P = 1
    formula applied to the Weierstrass polynomial Q(z_1, .), weighted by
    |u(z_1, 0)|^(-delta) for the unit factor u = f / Q; the resulting
    profile is integrated over z_1 with the disk oracle.  The finiteness
    verdict comes from the fitted power law of the profile at its poles:
    finite below 2 - band, infinite above 2 + band, abstain in between.
    """
    if f.n != 2:
        raise ValueError("the iterated reduction is implemented for n = 2")
    wd = weierstrass_prepare(f, radii, grid_size, seed)
    g, N = wd.germ, wd.N
    r1, r2 = wd.radii
    d = _perturb_if_degenerate(float(as_fraction(delta)), N, degenerate_step)

    def profile(z1):
        z1 = np.asarray(z1, dtype=np.complex128)
        shape = z1.shape
        zf = z1.ravel()
        out = np.empty(zf.size)
        for s in range(0, zf.size, 20000):
            inner, _, unit = _inner_roots(g, zf[s:s + 20000, None], N, r2, with_unit=True)
            if inner is None:
                out[s:s + 20000] = np.inf
                continue
            out[s:s + 20000] = unit ** -d * _pure_size_batch(np.ascontiguousarray(inner), d, r2)
        return out.reshape(shape)

    centers = [0j] + [c for c in _discriminant_points(g, r1) if abs(c) > 1e-9]
    exps = {c: _profile_exponent(profile, c, r1) for c in centers}
    amax = max(exps.values())
    if amax > 2 + ABSTAIN_BAND:
        verdict = "infinite"
    elif amax < 2 - ABSTAIN_BAND:
        verdict = "finite"
    else:
        verdict = "abstain"
    value = math.inf if verdict == "infinite" else math.nan
    orc = None
    if integrate and verdict != "infinite":
        orc = integrate_disk(Integrand(profile, centers, [exps[c] for c in centers]), r1,
                             rel_target=rel_target)
        value = orc.value
    if verdict == "finite":
        # finite verdicts must respect the order-of-vanishing bound
        assert d < float(delta_upper_bound([f])), "finite verdict above 2n/N"
    return IteratedResult(value, verdict, {complex(k): v for k, v in exps.items()}, N,
                          (r1, r2), d, orc)


# ---------------------------------------------------------------------------
# critical exponents
# ---------------------------------------------------------------------------

def critical_exponent(f: Germ, bracket: tuple[float, float] | None = None, tol_delta: float = 0.01,
                      radii: tuple[float, float] = DEFAULT_RADII, seed: int = 0):
    """The supremum delta_0 of exponents with int |f|^(-delta) finite near 0.

    n = 1 returns 2/m exactly.  n = 2 bisects on the sign of (a - 2) where a
    is the fitted profile exponent of the iterated reduction.
    """
    if f.n == 1:
        return Fraction(2, vanishing_order_multi(f))
    if f.n != 2:
        raise ValueError("critical exponents are implemented for n <= 2")
    ub = float(delta_upper_bound([f]))
    lo, hi = bracket if bracket is not None else (0.1, ub + 0.25)

    def excess(dl):
        r = iterated_estimate_2d(f, dl, radii, seed=seed, integrate=False,
                                 degenerate_step=tol_delta / 10)
        return r.max_exponent - 2.0

    if not excess(lo) < 0:
        raise BracketInvalid(f"lower end {lo} is not a finite case")
    if not excess(hi) > 0:
        raise BracketInvalid(f"upper end {hi} is not an infinite case")
    while hi - lo > tol_delta:
        mid = (lo + hi) / 2
        if excess(mid) < 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


# ---------------------------------------------------------------------------
# integrals of germs
# ---------------------------------------------------------------------------

def _germ_poly_1d(f: Germ) -> ComplexPoly:
    deg = f.degree_in(0)
    c = np.zeros(deg + 1, dtype=np.complex128)
    for (k,), v in f.terms.items():
        c[k] += v
    return ComplexPoly(c)


def germ_integral(f: Germ, delta, radii: Sequence[float], n_samples: int = 200_000, seed: int = 0) -> OracleResult:
    """int over the polydisk of |f|^(-delta): the disk oracle when n = 1,
    importance-sampled Monte Carlo otherwise."""
    d = float(delta)
    if f.n == 1:
        P = _germ_poly_1d(f)
        if P.degree == 0:
            return OracleResult(math.pi * radii[0] ** 2 * abs(P.leading) ** (-d), scheme="tensor")
        integ = ratio_integrand(ComplexPoly([1.0]), P, ExponentPair(0, as_fraction(d)))
        return integrate_disk(integ, radii[0])
    use_slice = f.degree_in(f.n - 1) > 0

    def f2(Z):
        return np.abs(f(Z)) ** 2

    return integrate_polydisk_mc(f2, d, radii, n_samples, seed,
                                 slice_coeffs=f.slice_coeffs if use_slice else None)


# ---------------------------------------------------------------------------
# probes
# ---------------------------------------------------------------------------

@dataclass
class ProbeReport:
    kind: str
    rows: list        # (param, value, stderr, verdict) per level
    verdict: str
    details: dict = field(default_factory=dict)

    def to_json_obj(self):
        return {"kind": self.kind, "verdict": self.verdict, "rows": self.rows, "details": self.details}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["param", "value", "stderr", "verdict"])
        for r in self.rows:
            w.writerow(r)
        return buf.getvalue()


def _adjacent_variation(values: np.ndarray) -> float:
    return float(np.max(np.abs(np.diff(values)) / values[:-1]))


def continuity_probe(family: GermFamily, delta, radii: Sequence[float] = DEFAULT_RADII,
                     c_grid: Sequence[complex] = tuple(np.linspace(0, 0.2, 5)),
                     n_samples: int = 100_000, seed: int = 0) -> ProbeReport:
    """I(c) along the grid and along its midpoint refinement; PASS when every
    value is finite and the largest relative jump between neighbours shrinks
    under refinement.  Monte Carlo draws reuse one seed (common random
    numbers) so the jumps reflect I rather than sampling noise."""
    radii = list(radii)[: family.n]
    base = germ_integral(family.at(0.0), delta, radii, n_samples, seed)
    if base.diverging:
        raise BaseDiverges("I(0) diverges; stability is not in question")
    coarse = np.asarray(c_grid, dtype=np.complex128)
    fine = np.empty(2 * coarse.size - 1, dtype=np.complex128)
    fine[0::2] = coarse
    fine[1::2] = (coarse[:-1] + coarse[1:]) / 2
    cache = {}

    def I(c):
        key = complex(c)
        if key not in cache:
            cache[key] = germ_integral(family.at(c), delta, radii, n_samples, seed)
        return cache[key]

    levels = []
    rows = []
    for grid in (coarse, fine):
        res = [I(c) for c in grid]
        vals = np.array([r.value for r in res])
        finite = all(not r.diverging for r in res)
        levels.append((finite, _adjacent_variation(vals) if finite else math.inf))
        for c, r in zip(grid, res):
            rows.append([complex(c).real, r.value, r.stderr, "finite" if not r.diverging else "diverging"])
    ok = levels[0][0] and levels[1][0] and levels[1][1] < levels[0][1]
    return ProbeReport("continuity", rows, "PASS" if ok else "FAIL",
                       {"variation_coarse": levels[0][1], "variation_fine": levels[1][1],
                        "I0": base.value})


def _random_perturbation(n: int, rho: float, degree: int, rng) -> Germ:
    """Random polynomial whose coefficient l1 norm is rho (so its sup on the
    unit polydisk is at most rho)."""
    import itertools

    exps = [e for e in itertools.product(range(degree + 1), repeat=n) if sum(e) <= degree]
    c = rng.normal(size=len(exps)) + 1j * rng.normal(size=len(exps))
    c *= rho / np.sum(np.abs(c))
    return Germ(n, dict(zip(exps, c)))


def perturbation_probe(fs: Sequence[Germ], delta, rho_grid: Sequence[float] = (0.1, 0.03, 0.01, 0.003),
                       n_perturbations: int = 4, seed: int = 0, radii: Sequence[float] | None = None,
                       n_samples: int = 100_000, degree: int = 3) -> ProbeReport:
    """sup over random perturbations g with sup-norm <= rho of |I(f+g) - I(f)|/I(f),
    per rho.  PASS when the deviation shrinks with rho down to the noise floor."""
    f = fs[0]
    n = f.n
    N = min(vanishing_order_multi(g) for g in fs if not g.is_zero)
    d = float(as_fraction(delta))
    if n >= 4:
        raise CaseNotCovered("uniform stability for n >= 4 is open; refusing")
    if n == 3 and not d < 4 / N:
        raise CaseNotCovered(f"n = 3 needs delta < 4/N = {4 / N:.4g}; the case delta >= 4/N is open")
    if len(fs) != 1:
        raise CaseNotCovered("the probe handles a single germ")
    radii = list(radii) if radii is not None else [0.5] * n
    rng = np.random.default_rng(seed)
    base = germ_integral(f, d, radii, n_samples, seed)
    if base.diverging:
        raise BaseDiverges("I(f) diverges")
    rows = []
    devs = []
    noise = []
    for rho in rho_grid:
        worst = 0.0
        se = 0.0
        for _ in range(n_perturbations):
            g = _random_perturbation(n, rho, degree, rng)
            r = germ_integral(f + g, d, radii, n_samples, seed)
            dev = abs(r.value - base.value) / base.value if not r.diverging else math.inf
            worst = max(worst, dev)
            se = max(se, math.hypot(r.sigma(), base.sigma()) / base.value)
        devs.append(worst)
        noise.append(se)
        rows.append([rho, worst, se, "ok" if math.isfinite(worst) else "diverging"])
    floor = 3 * max(noise)
    ok = all(math.isfinite(x) for x in devs)
    rate = math.nan
    if ok:
        # near the critical exponent the decay is a small power of rho, so
        # ask for monotone decrease and a significant overall drop
        monotone = all(b <= a + floor for a, b in zip(devs, devs[1:]))
        ok = monotone and (devs[-1] < devs[0] - floor or devs[0] <= floor)
        if min(devs) > 0:
            rate = float(np.polyfit(np.log(rho_grid), np.log(devs), 1)[0])
            ok = ok and (rate > 0 or devs[0] <= floor)
    return ProbeReport("perturbation", rows, "PASS" if ok else "FAIL",
                       {"I": base.value, "noise_floor": floor, "rate": rate})


def distribution_mu(fs: Sequence[Germ], alphas: Sequence[float], r: float = 1.0,
                    n_samples: int = 200_000, seed: int = 0, delta=None,
                    integral: float | None = None, integral_stderr: float = 0.0) -> list[dict]:
    """Vol{|z_i| < r, |f(z)| < alpha} by uniform Monte Carlo, with the bound
    alpha^delta * I whenever a finite integral I of |f|^(-delta) is given."""
    n = fs[0].n
    rng = np.random.default_rng(seed)
    Z = r * np.sqrt(rng.random((n_samples, n))) * np.exp(2j * np.pi * rng.random((n_samples, n)))
    absf = np.sqrt(sum(np.abs(f(Z)) ** 2 for f in fs))
    vol = (math.pi * r * r) ** n
    out = []
    for a in alphas:
        p = float(np.mean(absf < a))
        mu = vol * p
        se = vol * math.sqrt(max(p * (1 - p), 0.0) / n_samples)
        row = {"alpha": float(a), "mu": mu, "stderr": se}
        if integral is not None and delta is not None:
            bound = float(a) ** float(delta) * integral
            bse = float(a) ** float(delta) * integral_stderr
            row.update(bound=bound, holds=bool(mu <= bound + 3 * math.hypot(se, bse)))
        out.append(row)
    return out
