"""Numerical ground truth for singular integrals.

Deterministic schemes (disk, radial, circle, torus) grade their nodes
geometrically toward the singular points and extrapolate the remaining
geometric tail; Monte Carlo schemes use mixture proposals with power-law
components matched to the local singularity.  Divergence is reported as a
flag plus a fitted growth exponent, never as a huge float.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as sp_integrate
from scipy import special

from .errors import MixedFinitenessDisagreement, RangeViolation
from .expr import Integrand, as_integrand
from .polynomial import ComplexPoly, roots

DEFAULT_REL_TARGET = 1e-2
DEFAULT_MC_SAMPLES = 200_000
DIVERGENCE_SLACK = 0.01   # fitted a - 2 above -slack counts as blowup


@dataclass
class OracleResult:
    value: float
    stderr: float = 0.0
    diverging: bool = False
    growth_exponent: float = 0.0
    scheme: str = "voronoi-polar"
    seed: int = 0
    abs_error: float = 0.0
    cells: list = field(default_factory=list)
    n_evals: int = 0

    def to_json_obj(self):
        d = asdict(self)
        d["value"] = "inf" if math.isinf(self.value) else float(self.value)
        d["cells"] = [float(c) if math.isfinite(c) else "inf" for c in self.cells]
        return d

    def sigma(self) -> float:
        """Uncertainty used for agreement tests: stderr for Monte Carlo,
        the last refinement change for deterministic schemes."""
        return self.stderr if self.stderr > 0 else self.abs_error


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl(n: int):
    if n not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(n)
        _GL_CACHE[n] = ((x + 1) / 2, w / 2)
    return _GL_CACHE[n]


def _geometric_tail(panel_sums: np.ndarray, q: float, n_fit: int = 4):
    """Fit the last panel sums to a geometric law S_j ~ rho^j.

    Returns (tail, rho, exponent a) where each panel is a factor q closer
    to the singularity and the integrand behaves like r^(-a) r dr, so
    rho = q^(2 - a).
    """
    tail_sums = panel_sums[-n_fit:]
    if np.any(tail_sums <= 0):
        return 0.0, 0.0, -math.inf
    j = np.arange(tail_sums.size)
    slope = np.polyfit(j, np.log(tail_sums), 1)[0]
    rho = math.exp(slope)
    a = 2.0 - math.log(rho) / math.log(q)
    if rho >= 1.0:
        return math.inf, rho, a
    return float(tail_sums[-1] * rho / (1.0 - rho)), rho, a


# ---------------------------------------------------------------------------
# disk quadrature on Voronoi cells
# ---------------------------------------------------------------------------

@dataclass
class QuadratureRule:
    """Nodes and positive weights of one refinement level (tails excluded)."""

    nodes: np.ndarray
    weights: np.ndarray

    def apply(self, f) -> float:
        return float(np.sum(self.weights * f(self.nodes)))


def _disk_centers(integrand: Integrand, lam: float):
    centers, exps = [], []
    for c, a in zip(integrand.centers, integrand.exponents or [0.0] * len(integrand.centers)):
        c = complex(c)
        r = abs(c)
        if r < lam:
            centers.append(c)
            exps.append(a)
        elif r < 3 * lam:
            # outside but close: grade toward the nearest boundary point
            centers.append(0.999999 * lam * c / r)
            exps.append(0.0)
    # merge coincident centers
    out, oexp = [], []
    for c, a in zip(centers, exps):
        for i, o in enumerate(out):
            if abs(c - o) < 1e-14 * (1 + abs(c)):
                oexp[i] = max(oexp[i], a)
                break
        else:
            out.append(c)
            oexp.append(a)
    return out, oexp


def _ray_extent(alpha: complex, others: np.ndarray, u: np.ndarray, lam: float) -> np.ndarray:
    """Distance from alpha along direction u to the boundary of its cell."""
    re = (np.conj(alpha) * u).real
    ext = -re + np.sqrt(re * re + lam * lam - abs(alpha) ** 2)
    for beta in others:
        v = beta - alpha
        proj = (v * np.conj(u)).real
        with np.errstate(divide="ignore", invalid="ignore"):
            bis = np.where(proj > 0, abs(v) ** 2 / (2 * proj), np.inf)
        ext = np.minimum(ext, bis)
    return ext


def _disk_level(f, centers, lam, n_theta, n_gl, q, n_panels, want_rule):
    xg, wg = _gl(n_gl)
    cells, tails, growth, rules = [], [], [], []
    ctr = np.array(centers, dtype=np.complex128)
    diverging = False
    n_evals = 0
    theta = (np.arange(n_theta) + 0.5) * (2 * np.pi / n_theta)
    u = np.exp(1j * theta)
    for i, alpha in enumerate(centers):
        others = np.delete(ctr, i)
        R = _ray_extent(alpha, others, u, lam)                        # (T,)
        jpan = n_panels[i]
        edges_hi = q ** np.arange(jpan)                               # panel j: [q^(j+1), q^j]
        lens = edges_hi * (1 - q)
        t = (edges_hi[:, None] * q + lens[:, None] * xg[None, :]).ravel()   # (J*G,)
        wt = (lens[:, None] * wg[None, :]).ravel()
        r = R[:, None] * t[None, :]                                    # (T, J*G)
        z = alpha + r * u[:, None]
        vals = f(z)
        n_evals += vals.size
        w = (2 * np.pi / n_theta) * (R[:, None] ** 2) * (t * wt)[None, :]
        contrib = vals * w
        panel = contrib.reshape(n_theta, jpan, n_gl).sum(axis=(0, 2))
        tail, rho, a = _geometric_tail(panel, q)
        total = float(panel.sum())
        if math.isinf(tail) or a - 2.0 > -DIVERGENCE_SLACK:
            diverging = True
            growth.append(a - 2.0)
            cells.append(math.inf)
        else:
            cells.append(total + tail)
        tails.append(tail)
        if want_rule:
            rules.append((z.ravel(), w.ravel()))
    rule = None
    if want_rule:
        rule = QuadratureRule(np.concatenate([r[0] for r in rules]),
                              np.concatenate([r[1] for r in rules]))
    return cells, diverging, (max(growth) if growth else 0.0), n_evals, rule


def _panel_counts(centers, lam, q, min_panels=24, max_panels=90):
    counts = []
    for i, c in enumerate(centers):
        d = min([abs(c - o) for j, o in enumerate(centers) if j != i] + [lam])
        # reach well below the nearest-neighbour distance so the tail is in
        # the single-root regime
        need = math.log(max(d * 1e-3, 1e-300) / (2 * lam)) / math.log(q)
        counts.append(int(min(max_panels, max(min_panels, math.ceil(need)))))
    return counts


def integrate_disk(R, lam: float = 1.0, rel_target: float = DEFAULT_REL_TARGET,
                   max_level: int = 4, return_rule: bool = False):
    """Integral of R over the disk of radius ``lam`` on Voronoi cells.

    Each cell around a singular point is swept by rays; along a ray the
    radius is split into geometric panels (ratio 1/2) with Gauss-Legendre
    nodes, and the sum of the missing innermost panels is extrapolated from
    the fitted geometric decay.  Angular and radial resolution double until
    the relative change drops below ``rel_target``.
    """
    integrand = as_integrand(R)
    lam = float(lam)
    centers, _ = _disk_centers(integrand, lam)
    scheme = "voronoi-polar"
    if not centers:
        centers = [0j]
        scheme = "tensor"
    q = 0.5
    panels = _panel_counts(centers, lam, q)
    prev = None
    result = None
    for level in range(max_level + 1):
        n_theta = 32 * 2 ** level
        n_gl = 6 + 2 * level
        cells, div, growth, n_ev, rule = _disk_level(
            integrand, centers, lam, n_theta, n_gl, q, panels, return_rule)
        if div:
            result = OracleResult(math.inf, 0.0, True, max(growth, 1e-3), scheme, 0, math.inf,
                                  cells, n_ev)
            break
        val = float(math.fsum(cells))
        if prev is not None:
            change = abs(val - prev)
            result = OracleResult(val, 0.0, False, 0.0, scheme, 0, change, cells, n_ev)
            if change <= rel_target * abs(val):
                break
        else:
            result = OracleResult(val, 0.0, False, 0.0, scheme, 0, abs(val), cells, n_ev)
        prev = val
    if return_rule:
        return result, rule
    return result


# ---------------------------------------------------------------------------
# disk Monte Carlo
# ---------------------------------------------------------------------------

def _powerlaw_radius(rng, n, beta, rmax):
    """Radii with planar density proportional to r^(-beta) on [0, rmax]."""
    u = rng.random(n)
    return rmax * u ** (1.0 / (2.0 - beta))


def _powerlaw_density(r, beta, rmax):
    # planar density (per unit area), zero outside the disk
    c = (2.0 - beta) / (2 * np.pi * rmax ** (2.0 - beta))
    with np.errstate(divide="ignore"):
        return np.where(r <= rmax, c * r ** (-beta), 0.0)


def _loguniform_density(r, lo, hi):
    c = 1.0 / (2 * np.pi * math.log(hi / lo))
    with np.errstate(divide="ignore"):
        return np.where((r >= lo) & (r <= hi), c / r ** 2, 0.0)


def integrate_disk_mc(R, lam: float = 1.0, n_samples: int = DEFAULT_MC_SAMPLES, seed: int = 0,
                      batch: int = 50_000) -> OracleResult:
    """Importance-sampled Monte Carlo over the disk of radius ``lam``.

    The proposal mixes the uniform law on the disk with, per singular
    point, a log-uniform radial layer on [l, lam] and a power-law core
    r^(-beta) on [0, l] whose beta follows the local exponent; l is half
    the distance to the nearest other singular point.
    """
    integrand = as_integrand(R)
    lam = float(lam)
    centers, exps = _disk_centers(integrand, lam)
    rng = np.random.default_rng(seed)
    comps = []  # (kind, center, params)
    for i, (c, a) in enumerate(zip(centers, exps)):
        d = min([abs(c - o) for j, o in enumerate(centers) if j != i] + [2 * lam])
        ell = min(d / 2, lam)
        beta = float(np.clip(a, 0.0, 1.9))
        comps.append(("core", c, (beta, ell)))
        if ell < lam * 0.99:
            comps.append(("log", c, (ell, 2 * lam)))
    k = len(comps)
    w_uniform = 0.3 if k else 1.0
    w_comp = (1.0 - w_uniform) / k if k else 0.0

    def density(z):
        dens = np.where(np.abs(z) <= lam, w_uniform / (math.pi * lam * lam), 0.0)
        for kind, c, p in comps:
            r = np.abs(z - c)
            if kind == "core":
                dens = dens + w_comp * _powerlaw_density(r, p[0], p[1])
            else:
                dens = dens + w_comp * _loguniform_density(r, p[0], p[1])
        return dens

    sums = []
    remaining = n_samples
    total_n = 0
    while remaining > 0:
        n = min(batch, remaining)
        remaining -= n
        choice = rng.choice(k + 1, size=n, p=[w_uniform] + [w_comp] * k) if k else np.zeros(n, int)
        z = np.empty(n, dtype=np.complex128)
        ang = np.exp(2j * np.pi * rng.random(n))
        sel = choice == 0
        z[sel] = lam * np.sqrt(rng.random(sel.sum())) * ang[sel]
        for ci, (kind, c, p) in enumerate(comps, start=1):
            sel = choice == ci
            m = int(sel.sum())
            if not m:
                continue
            if kind == "core":
                r = _powerlaw_radius(rng, m, p[0], p[1])
            else:
                r = p[0] * (p[1] / p[0]) ** rng.random(m)
            z[sel] = c + r * ang[sel]
        inside = np.abs(z) <= lam
        vals = np.zeros(n)
        if inside.any():
            vals[inside] = integrand(z[inside]) / density(z[inside])
        sums.append(vals)
        total_n += n
    x = np.concatenate(sums)
    mean = float(x.mean())
    se = float(x.std(ddof=1) / math.sqrt(x.size))
    diverging = bool(np.isinf(mean)) or any(a >= 2.0 for a in exps)
    growth = max([a - 2.0 for a in exps], default=0.0)
    if diverging:
        return OracleResult(math.inf, 0.0, True, max(growth, 1e-3), "qmc", seed, math.inf, [], total_n)
    return OracleResult(mean, se, False, 0.0, "qmc", seed, 0.0, [], total_n)


# ---------------------------------------------------------------------------
# radial integrals
# ---------------------------------------------------------------------------

def integrate_radial(p, delta, L: Sequence[float], lam: float = 1.0,
                     rel_target: float = DEFAULT_REL_TARGET, q: float = 0.5) -> OracleResult:
    """int_0^lam r^p / prod_i (r + L_i)^delta dr / r with geometric panels
    toward 0 and a fitted geometric tail."""
    p, d = float(p), float(delta)
    L = np.asarray(L, dtype=float)
    lam = float(lam)
    pos = L[L > 0]
    floor = pos.min() if pos.size else lam
    n_panels = int(max(30, math.ceil(math.log(floor * 1e-4 / lam) / math.log(q))))

    def f(r):
        return r ** (p - 1.0) / np.prod((r[..., None] + L) ** d, axis=-1)

    prev = None
    res = None
    for level in range(4):
        xg, wg = _gl(8 + 4 * level)
        hi = lam * q ** np.arange(n_panels)
        lo = hi * q
        r = lo[:, None] + (hi - lo)[:, None] * xg[None, :]
        panel = ((hi - lo)[:, None] * wg[None, :] * f(r)).sum(axis=1)
        # here the panel law is S_j ~ q^(j * b) with b = p - delta * #zeros
        tail_sums = panel[-4:]
        slope = np.polyfit(np.arange(4), np.log(np.maximum(tail_sums, 1e-300)), 1)[0]
        rho = math.exp(slope)
        b = math.log(rho) / math.log(q)
        if rho >= 1.0 or b < DIVERGENCE_SLACK:
            return OracleResult(math.inf, 0.0, True, max(-b, 1e-3), "radial", 0, math.inf)
        val = float(panel.sum() + panel[-1] * rho / (1 - rho))
        if prev is not None:
            res = OracleResult(val, 0.0, False, 0.0, "radial", 0, abs(val - prev))
            if abs(val - prev) <= rel_target * val:
                break
        prev = val
        n_panels += 4
    return res


def integrate_radial_quad(p, delta, L: Sequence[float], lam: float = 1.0) -> OracleResult:
    """Second integrator: scipy adaptive quadrature in log r."""
    p, d = float(p), float(delta)
    L = np.asarray(L, dtype=float)
    zeros = int(np.sum(L == 0))
    b = p - d * zeros
    if b <= 0:
        return OracleResult(math.inf, 0.0, True, max(-b, 1e-3), "radial", 0, math.inf)

    def g(s):
        r = math.exp(s)
        return r ** p / float(np.prod((r + L) ** d))

    pos = L[L > 0]
    pts = sorted(set(math.log(x) for x in pos if x < lam))
    lo = math.log(lam) - 60.0 / max(b, 1e-3) - 10
    val, err = sp_integrate.quad(g, lo, math.log(lam), points=pts or None, limit=400,
                                 epsabs=0, epsrel=1e-10)
    return OracleResult(val, 0.0, False, 0.0, "radial", 0, err)


# ---------------------------------------------------------------------------
# circle integrals
# ---------------------------------------------------------------------------

def _graded_segment(a, b, grade_a, grade_b, n_levels=14, n_mid=8):
    """Panel edges on [a, b], geometrically refined toward flagged ends."""
    mid_lo = a + (b - a) * (0.5 ** n_levels if grade_a else 0.0)
    mid_hi = b - (b - a) * (0.5 ** n_levels if grade_b else 0.0)
    edges = [a]
    if grade_a:
        edges += [a + (b - a) * 0.5 ** k for k in range(n_levels, 0, -1)][:-1]
    edges += list(np.linspace(a + (b - a) * (0.25 if grade_a else 0.0),
                              b - (b - a) * (0.25 if grade_b else 0.0), n_mid + 1))
    if grade_b:
        edges += [b - (b - a) * 0.5 ** k for k in range(2, n_levels + 1)]
    edges.append(b)
    e = np.unique(np.array(edges))
    return e[(e >= a) & (e <= b)]


def integrate_circle(P: ComplexPoly, eps, interval=(0.0, 2 * math.pi),
                     rel_target: float = 1e-6) -> OracleResult:
    """int_I |P(e^{i theta})|^eps d theta, with breakpoints at the arguments
    of roots of P lying near the unit circle."""
    e = float(eps)
    start, length = float(interval[0]), float(interval[1])
    stop = start + length
    breaks = []
    if P.degree:
        for rt, _ in roots(P).entries:
            if abs(abs(rt) - 1.0) < 0.05:
                ang = math.atan2(rt.imag, rt.real)
                for k in range(-2, 3):
                    t = ang + 2 * math.pi * k
                    if start < t < stop:
                        breaks.append(t)
    pts = sorted(set([start, stop] + breaks))
    flagged = set(breaks)

    def f(th):
        return np.abs(P(np.exp(1j * th))) ** e if e else np.ones_like(th)

    prev = None
    res = None
    for level in range(6):
        xg, wg = _gl(8 + 2 * level)
        total = 0.0
        for a, b in zip(pts[:-1], pts[1:]):
            edges = _graded_segment(a, b, a in flagged, b in flagged, n_mid=8 * 2 ** level)
            lo, hi = edges[:-1], edges[1:]
            th = lo[:, None] + (hi - lo)[:, None] * xg[None, :]
            total += float(((hi - lo)[:, None] * wg[None, :] * f(th)).sum())
        if prev is not None:
            res = OracleResult(total, 0.0, False, 0.0, "circle", 0, abs(total - prev))
            if abs(total - prev) <= rel_target * max(abs(total), 1e-300):
                break
        prev = total
    return res


# ---------------------------------------------------------------------------
# torus integrals
# ---------------------------------------------------------------------------

def _ring_average(w, b, delta):
    """int_0^1 |w + b e^{2 pi i t}|^(-delta) dt in closed form."""
    w = np.abs(np.asarray(w, dtype=np.complex128))
    b = abs(b)
    hi = np.maximum(w, b)
    lo = np.minimum(w, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.where(hi > 0, (lo / hi) ** 2, 0.0)
        out = hi ** (-delta) * special.hyp2f1(delta / 2, delta / 2, 1.0, x)
    return np.where(hi > 0, out, np.inf)


def _kinks(w_of_phi, target, n_scan=4096):
    """Angles phi in [0, 2 pi) where |w(phi)| crosses ``target``."""
    phi = np.linspace(0, 2 * np.pi, n_scan + 1)
    g = np.abs(w_of_phi(phi)) - target
    out = []
    for i in range(n_scan):
        if g[i] == 0:
            out.append(phi[i])
        elif g[i] * g[i + 1] < 0:
            from scipy.optimize import brentq
            out.append(brentq(lambda x: abs(w_of_phi(x)) - target, phi[i], phi[i + 1]))
    return out


def integrate_torus(a: Sequence[complex], delta, rel_target: float = 1e-4,
                    method: str = "auto", n_samples: int = DEFAULT_MC_SAMPLES,
                    seed: int = 0) -> OracleResult:
    """int over (R/Z)^J of |sum_j a_j e^{2 pi i theta_j}|^(-delta).

    One angle can be absorbed by rotation; for J = 2 the remaining angle is
    done in closed form via a hypergeometric function, for J = 3 the outer
    angle is integrated numerically around that closed form.  Larger J (or
    ``method="mc"``) uses plain Monte Carlo.
    """
    d = float(delta)
    if d >= 1:
        raise RangeViolation("the torus integral needs delta < 1")
    a = np.asarray(a, dtype=np.complex128)
    J = a.size
    if J == 0 or np.all(a == 0):
        return OracleResult(math.inf, 0.0, True, 1.0, "torus", seed, math.inf)
    if method == "auto":
        method = "tensor" if J <= 3 else "mc"
    if method == "mc":
        rng = np.random.default_rng(seed)
        th = rng.random((n_samples, J))
        s = np.abs((a[None, :] * np.exp(2j * np.pi * th)).sum(axis=1))
        with np.errstate(divide="ignore"):
            x = s ** (-d)
        return OracleResult(float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size)),
                            False, 0.0, "torus", seed, 0.0, [], n_samples)
    if J == 1:
        return OracleResult(float(abs(a[0]) ** (-d)), 0.0, False, 0.0, "torus", seed, 0.0)
    if J == 2:
        v = float(_ring_average(a[0], a[1], d))
        return OracleResult(v, 0.0, not math.isfinite(v), 0.0, "torus", seed, 0.0)
    if J != 3:
        raise RangeViolation("tensor torus quadrature supports J <= 3")

    def w_of(phi):
        return a[0] + a[1] * np.exp(1j * phi)

    def inner(phi):
        return _ring_average(w_of(phi), a[2], d)

    kinks = sorted(_kinks(w_of, abs(a[2])))
    # the inner average is continuous but not smooth at the kinks; grade there
    pts = sorted(set([0.0, 2 * np.pi] + kinks))
    flagged = set(kinks)
    prev = None
    res = None
    for level in range(6):
        xg, wg = _gl(8 + 2 * level)
        total = 0.0
        for lo_, hi_ in zip(pts[:-1], pts[1:]):
            edges = _graded_segment(lo_, hi_, lo_ in flagged, hi_ in flagged, n_levels=20,
                                    n_mid=4 * 2 ** level)
            lo, hi = edges[:-1], edges[1:]
            ph = lo[:, None] + (hi - lo)[:, None] * xg[None, :]
            total += float(((hi - lo)[:, None] * wg[None, :] * inner(ph)).sum())
        total /= 2 * np.pi
        if prev is not None:
            res = OracleResult(total, 0.0, False, 0.0, "torus", seed, abs(total - prev))
            if abs(total - prev) <= rel_target * total:
                break
        prev = total
    return res


def torus_direct_2(a1: complex, a2: complex, delta, n: int = 200_000) -> float:
    """Brute-force midpoint rule for J = 2, independent of the closed form."""
    th = (np.arange(n) + 0.5) / n
    return float(np.mean(np.abs(a1 + a2 * np.exp(2j * np.pi * th)) ** (-float(delta))))


# ---------------------------------------------------------------------------
# polydisk Monte Carlo
# ---------------------------------------------------------------------------

_POLY_BETAS = (0.5, 1.0, 1.5, 1.9)


def _slice_roots(coef_fn, zp: np.ndarray) -> list[np.ndarray]:
    """Batched companion-matrix roots of the last-variable slice polynomials.

    ``coef_fn(zp)`` returns ascending coefficients, shape (n, deg + 1).
    """
    C = coef_fn(zp)
    n, m = C.shape
    out = [np.zeros(0, dtype=np.complex128)] * n
    deg = m - 1
    while deg > 0 and np.all(C[:, deg] == 0):
        deg -= 1
    if deg < 1:
        return out
    lead = C[:, deg]
    ok = np.abs(lead) > 0
    if not ok.any():
        return out
    comp = np.zeros((int(ok.sum()), deg, deg), dtype=np.complex128)
    comp[:, 0, :] = -C[ok, deg - 1::-1][:, :deg] / lead[ok, None]
    if deg > 1:
        comp[:, np.arange(1, deg), np.arange(deg - 1)] = 1.0
    ev = np.linalg.eigvals(comp)
    idx = np.flatnonzero(ok)
    for i, e in zip(idx, ev):
        out[i] = e[np.isfinite(e)]
    return out


def integrate_polydisk_mc(f, delta, radii: Sequence[float], n_samples: int = DEFAULT_MC_SAMPLES,
                          seed: int = 0, slice_coeffs: Callable | None = None,
                          batch: int = 20_000, fit_divergence: bool = True) -> OracleResult:
    """int over a polydisk of (sum_j |f_j|^2)^(-delta/2) by importance sampling.

    ``f(z)`` takes an (n, dim) array and returns sum_j |f_j|^2.  The first
    dim-1 coordinates are drawn from a mixture of uniform and power-law
    laws around 0; when ``slice_coeffs`` is given the last coordinate is
    drawn around the roots of the slice polynomial in that variable, whose
    density is evaluated exactly.  Divergence is judged by fitting the
    sublevel volume Vol{|f| < s} ~ s^gamma at small s: the integral is
    finite when gamma > delta.
    """
    d = float(delta)
    radii = [float(r) for r in radii]
    n = len(radii)
    rng = np.random.default_rng(seed)
    betas = _POLY_BETAS
    w_u = 0.2
    w_b = (1 - w_u) / len(betas)

    def draw_coord(m, R):
        kind = rng.choice(len(betas) + 1, size=m, p=[w_u] + [w_b] * len(betas))
        r = np.empty(m)
        sel = kind == 0
        r[sel] = R * np.sqrt(rng.random(sel.sum()))
        for bi, b in enumerate(betas, start=1):
            sel = kind == bi
            r[sel] = _powerlaw_radius(rng, int(sel.sum()), b, R)
        return r * np.exp(2j * np.pi * rng.random(m))

    def coord_density(z, R):
        r = np.abs(z)
        dens = w_u / (math.pi * R * R) * np.ones_like(r)
        for b in betas:
            dens = dens + w_b * _powerlaw_density(r, b, R)
        return dens

    beta_n = float(np.clip(d, 0.2, 1.9))

    vals_all, fvals_all, w_all = [], [], []
    remaining = n_samples
    while remaining > 0:
        m = min(batch, remaining)
        remaining -= m
        head = n - 1 if slice_coeffs is not None else n
        Z = np.empty((m, n), dtype=np.complex128)
        dens = np.ones(m)
        for k in range(head):
            Z[:, k] = draw_coord(m, radii[k])
            dens *= coord_density(Z[:, k], radii[k])
        if slice_coeffs is not None:
            Rn = radii[-1]
            rts = _slice_roots(slice_coeffs, Z[:, : n - 1])
            last = np.empty(m, dtype=np.complex128)
            dn = np.empty(m)
            for i in range(m):
                rt = rts[i]
                rt = rt[np.abs(rt) < 2 * Rn]
                kcomp = rt.size
                wu = 0.3 if kcomp else 1.0
                wc = (1 - wu) / kcomp if kcomp else 0.0
                pick = rng.random()
                if pick < wu or not kcomp:
                    zn = Rn * math.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
                else:
                    j = min(int((pick - wu) / wc), kcomp - 1)
                    rr = _powerlaw_radius(rng, 1, beta_n, Rn)[0]
                    zn = rt[j] + rr * np.exp(2j * np.pi * rng.random())
                last[i] = zn
                if abs(zn) > Rn:
                    dn[i] = math.inf  # outside the support: weight 0
                    continue
                dd = wu / (math.pi * Rn * Rn)
                if kcomp:
                    dd += wc * float(np.sum(_powerlaw_density(np.abs(zn - rt), beta_n, Rn)))
                dn[i] = dd
            Z[:, n - 1] = last
            dens = dens * dn
        inside = np.all(np.abs(Z) <= np.array(radii)[None, :], axis=1) & np.isfinite(dens)
        F = np.full(m, np.inf)
        F[inside] = f(Z[inside])
        with np.errstate(divide="ignore", invalid="ignore"):
            wts = np.where(inside, 1.0 / dens, 0.0)
            v = np.where(inside, F ** (-d / 2) * wts, 0.0)
        vals_all.append(v)
        fvals_all.append(np.sqrt(F))
        w_all.append(wts)
    x = np.concatenate(vals_all)
    absf = np.concatenate(fvals_all)
    wts = np.concatenate(w_all)
    mean = float(np.mean(x))
    se = float(np.std(x, ddof=1) / math.sqrt(x.size))
    diverging = not math.isfinite(mean)
    growth = 0.0
    if fit_divergence and not diverging:
        gamma = sublevel_exponent(absf, wts)
        if gamma is not None and gamma <= d:
            diverging = True
            growth = max(d - gamma, 1e-3)
    if diverging:
        return OracleResult(math.inf, 0.0, True, growth or 1e-3, "polydisk-mc", seed, math.inf,
                            [], x.size)
    return OracleResult(mean, se, False, 0.0, "polydisk-mc", seed, 0.0, [], x.size)


def sublevel_exponent(absf: np.ndarray, wts: np.ndarray, n_levels: int = 8):
    """Fit Vol{|f| < s} ~ s^gamma from weighted samples over the smallest
    decades of |f| that still hold enough samples."""
    finite = np.isfinite(absf) & (wts > 0)
    a, w = absf[finite], wts[finite]
    if a.size < 1000:
        return None
    order = np.sort(a)
    # s ranges from the 0.2% quantile to the 5% quantile
    s_lo, s_hi = order[int(0.002 * a.size)], order[int(0.05 * a.size)]
    if not (s_lo > 0 and s_hi > s_lo * 1.5):
        return None
    s = np.geomspace(s_lo, s_hi, n_levels)
    vol = np.array([np.sum(w * (a < x)) for x in s]) / a.size
    if np.any(vol <= 0):
        return None
    return float(np.polyfit(np.log(s), np.log(vol), 1)[0])


# ---------------------------------------------------------------------------
# comparison reports
# ---------------------------------------------------------------------------

@dataclass
class EquivalenceReport:
    samples: list  # (instance id, algebraic, oracle, ratio, sweep)
    ratio_min: float
    ratio_max: float
    trend_stat: float
    joint_infinite: int
    joint_finite: int

    @property
    def spread(self) -> float:
        return self.ratio_max / self.ratio_min if self.ratio_min > 0 else math.inf

    def to_json_obj(self):
        def num(x):
            return "inf" if isinstance(x, float) and math.isinf(x) else x
        return {"samples": [[i, num(a), num(o), num(r), s] for i, a, o, r, s in self.samples],
                "ratio_min": self.ratio_min, "ratio_max": self.ratio_max,
                "trend_stat": self.trend_stat, "joint_infinite": self.joint_infinite,
                "joint_finite": self.joint_finite}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf)
        wr.writerow(["instance_id", "algebraic", "oracle", "ratio", "sweep_param"])
        for row in self.samples:
            wr.writerow(row)
        return buf.getvalue()


def compare(family: Sequence, sweep: Sequence[float] | None = None) -> EquivalenceReport:
    """Ratio statistics oracle/algebraic over a family.

    ``family`` holds (algebraic value, OracleResult or float) pairs.  Any
    sample with exactly one side infinite raises MixedFinitenessDisagreement.
    """
    if not family:
        raise ValueError("empty family")
    samples, bad, ratios, logs = [], [], [], []
    jinf = jfin = 0
    for i, (alg, orc) in enumerate(family):
        ov = orc.value if isinstance(orc, OracleResult) else float(orc)
        odiv = orc.diverging if isinstance(orc, OracleResult) else math.isinf(ov)
        ainf = math.isinf(alg)
        sw = None if sweep is None else float(sweep[i])
        if ainf and odiv:
            jinf += 1
            samples.append((i, alg, math.inf, math.nan, sw))
            continue
        if ainf != odiv:
            bad.append(i)
            continue
        jfin += 1
        r = ov / alg if alg > 0 else (1.0 if ov == 0 else math.inf)
        ratios.append(r)
        if sw is not None:
            logs.append((math.log(sw), math.log(r)))
        samples.append((i, alg, ov, r, sw))
    if bad:
        raise MixedFinitenessDisagreement(
            f"finiteness disagrees on instances {bad}", instances=bad)
    trend = 0.0
    if len(logs) >= 3:
        xs, ys = np.array(logs).T
        if np.std(xs) > 0 and np.std(ys) > 0:
            trend = float(np.corrcoef(xs, ys)[0, 1])
    rmin = min(ratios) if ratios else math.nan
    rmax = max(ratios) if ratios else math.nan
    return EquivalenceReport(samples, rmin, rmax, trend, jinf, jfin)
