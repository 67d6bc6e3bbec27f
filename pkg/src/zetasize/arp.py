"""Absolute rational powers: evaluation with removable-singularity
extension, exponent normalization, mu-regularization, theta sampling,
the simple-root size, and the closed form of a two-root example."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    MultipleRoots,
    NoStabilization,
    NormGateViolated,
    OracleBudgetExhausted,
    RangeViolation,
    ZeroNumerator,
)
from .estimator import (
    VANISH_TOL,
    ExponentPair,
    as_fraction,
    estimate,
    estimate_symmetric,
    regularized_estimate,
)
from .expr import ARPExpr, Integrand, arp_integrand, ratio_integrand
from .oracle import OracleResult, integrate_disk
from .polynomial import ComplexPoly, coeff_norm, roots, taylor_coefficients

__all__ = [
    "ARPExpr", "ThetaGrid", "arp_eval", "normalize_sharp", "theta_denominator_size",
    "regularize_integral", "sample_theta_integral", "simple_root_size",
    "example_closed_form", "example_integrand", "regularized_gate_report",
    "gate_report_markdown", "default_gate_regimes", "GateRegime",
]

S_GATE = 0.5
D_CAP = 2 ** 12
LEMMA47_K = 10.0


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _order_and_weight(terms: Sequence[ComplexPoly], z0: complex, tol: float):
    """Common vanishing order p at z0 and sum_i |c_{i,p}|^2 of the order-p
    Taylor coefficients, so that sum_i |P_i(z0+h)|^2 ~ weight * |h|^(2p)."""
    coeffs = [np.abs(taylor_coefficients(p, z0)) for p in terms if not p.is_zero]
    scale = max(float(c.max()) for c in coeffs)
    orders = []
    for c in coeffs:
        nz = np.flatnonzero(c > tol * scale)
        orders.append(int(nz[0]) if nz.size else math.inf)
    p = min(orders)
    weight = sum(float(c[p]) ** 2 for c, o in zip(coeffs, orders) if o == p)
    return p, weight


def arp_eval(R: ARPExpr, z: complex, tol: float = VANISH_TOL) -> float:
    """R(z), extended continuously across common zeros (value may be +inf)."""
    e, d = R.pair.eps, R.pair.delta
    num = sum(abs(p(z)) ** 2 for p in R.numerator_terms)
    den = sum(abs(q(z)) ** 2 for q in R.denominator_terms) if R.denominator_terms else 1.0
    scale_n = sum(coeff_norm(p) for p in R.numerator_terms) * (1 + abs(z)) ** 8
    scale_d = sum(coeff_norm(q) for q in R.denominator_terms) * (1 + abs(z)) ** 8 if R.denominator_terms else 1.0
    num_zero = num <= (tol * scale_n) ** 2
    den_zero = den <= (tol * scale_d) ** 2
    if not den_zero:
        return float(num ** (float(e) / 2) / den ** (float(d) / 2)) if e or not num_zero else \
            float(1.0 / den ** (float(d) / 2))
    if not num_zero or e == 0:
        return math.inf if d > 0 else 1.0
    p, wp = _order_and_weight(R.numerator_terms, z, tol)
    q, wq = _order_and_weight(R.denominator_terms, z, tol)
    power = e * p - d * q
    if power > 0:
        return 0.0
    if power < 0:
        return math.inf
    return float(wp ** (float(e) / 2) / wq ** (float(d) / 2))


def normalize_sharp(R: ARPExpr) -> tuple[ARPExpr, dict]:
    """Rewrite eps = A/D, delta = B/D and raise the terms to A and B.

    The result has both exponents equal to 1/D; its size matches R up to
    constants depending on the term counts and (A, B).
    """
    e, d = R.pair.eps, R.pair.delta
    D = math.lcm(e.denominator, d.denominator)
    A, B = int(e * D), int(d * D)
    nums = tuple(p ** A for p in R.numerator_terms)
    dens = tuple(q ** B for q in R.denominator_terms)
    out = ARPExpr(nums, dens, ExponentPair(Fraction(1, D), Fraction(1, D)))
    return out, {"A": A, "B": B, "D": D}


def theta_denominator_size(a: Sequence[complex], delta) -> float:
    """(sum_j |a_j|)^(-delta), the size of the torus average of
    |sum_j a_j e^{2 pi i theta_j}|^(-delta)."""
    d = float(delta)
    if not 0 < d < 1:
        raise RangeViolation("the theta reduction needs 0 < delta < 1")
    s = float(np.sum(np.abs(np.asarray(a, dtype=np.complex128))))
    return math.inf if s == 0 else s ** (-d)


# ---------------------------------------------------------------------------
# regularization
# ---------------------------------------------------------------------------

@dataclass
class RegularizationResult:
    limit: float
    diverging: bool
    trace: list[tuple[float, float, float]]   # (mu, value, abs_error)
    monotone: bool
    slope: float                               # d log value / d log mu at the end

    def to_json_obj(self):
        return {"limit": "inf" if math.isinf(self.limit) else self.limit,
                "diverging": self.diverging, "monotone": self.monotone, "slope": self.slope,
                "trace": [list(t) for t in self.trace]}


def regularized_integrand(R: ARPExpr, mu: float) -> Integrand:
    """(sum |P_i|^2)^(eps/2) / (sum |Q_j| + mu)^delta."""
    return arp_integrand(R, mu=mu, l1_denominator=True)


def regularize_integral(R: ARPExpr, mu_schedule: Sequence[float], lam: float = 1.0,
                        oracle_budget: int = 50_000_000, rel_target: float = 1e-3,
                        slope_tol: float = 0.05) -> RegularizationResult:
    """Values of the mu-regularized integral along a decreasing schedule,
    with the monotone limit extrapolated or flagged as diverging."""
    mus = [float(m) for m in mu_schedule]
    if any(b >= a for a, b in zip(mus, mus[1:])) or mus[-1] <= 0:
        raise ValueError("mu_schedule must be strictly decreasing and positive")
    used = 0
    trace = []
    for mu in mus:
        res = integrate_disk(regularized_integrand(R, mu), lam, rel_target=rel_target)
        used += res.n_evals
        if used > oracle_budget:
            raise OracleBudgetExhausted(f"oracle budget {oracle_budget} exhausted at mu={mu}")
        trace.append((mu, res.value, res.abs_error))
    vals = np.array([t[1] for t in trace])
    errs = np.array([t[2] for t in trace])
    # nondecreasing up to three times the quadrature uncertainty
    monotone = bool(np.all(np.diff(vals) >= -3 * (errs[1:] + errs[:-1]) - 1e-12 * vals[1:]))
    slope = 0.0
    if len(mus) >= 2:
        slope = float(np.polyfit(np.log(mus[-3:]), np.log(vals[-3:]), 1)[0])
    diverging = False
    limit = float(vals[-1])
    if len(mus) >= 3:
        d1, d2 = vals[-2] - vals[-3], vals[-1] - vals[-2]
        ratio = d2 / d1 if d1 > 0 else 0.0
        if -slope > slope_tol or ratio >= 0.9:
            diverging = True
            limit = math.inf
        elif 0 < ratio < 1:
            limit = float(vals[-1] + d2 * ratio / (1 - ratio))
    return RegularizationResult(limit, diverging, trace, monotone, slope)


# ---------------------------------------------------------------------------
# theta sampling
# ---------------------------------------------------------------------------

@dataclass
class ThetaGrid:
    d: int
    dims: int
    history: list[tuple[int, float]] = field(default_factory=list)   # (d, inf)

    @property
    def points(self) -> np.ndarray:
        """The lattice {k/d}^dims with theta_1 pinned to 0 (rotation)."""
        if self.dims == 1:
            return np.zeros((1, 1))
        axes = [np.zeros(1)] + [np.arange(self.d) / self.d] * (self.dims - 1)
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    @property
    def size(self) -> int:
        return self.d ** (self.dims - 1) if self.dims > 1 else 1


@dataclass
class ThetaSampleResult:
    inf: float
    grid: ThetaGrid
    profile: list[tuple[list[float], float]]
    stabilized: bool
    sum_denominator: float
    lower_bound_holds: bool
    measure_fraction: float | None
    reduction: dict

    def to_json_obj(self):
        return {"d": self.grid.d, "inf": self.inf,
                "profile": [[list(t), v] for t, v in self.profile],
                "stabilized": self.stabilized, "sum_denominator": self.sum_denominator,
                "lower_bound_holds": self.lower_bound_holds,
                "measure_fraction": self.measure_fraction, "reduction": self.reduction,
                "history": self.grid.history}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())


def _check_gates(Qs: Sequence[ComplexPoly], s: float) -> None:
    J = len(Qs)
    N1 = Qs[0].degree
    bound = s / (2 * J)
    g1 = coeff_norm(Qs[0] - ComplexPoly.monomial(N1))
    if not g1 < bound:
        raise NormGateViolated(f"|||Q_1 - Z^{N1}||| = {g1:.4g} is not below s/(2J) = {bound:.4g}")
    for j, q in enumerate(Qs[1:], start=2):
        g = coeff_norm(q)
        if not g < bound:
            raise NormGateViolated(f"|||Q_{j}||| = {g:.4g} is not below s/(2J) = {bound:.4g}")


def _theta_poly(Qs: Sequence[ComplexPoly], theta: np.ndarray) -> ComplexPoly:
    out = ComplexPoly()
    for q, t in zip(Qs, theta):
        out = out + q * complex(np.exp(2j * np.pi * t))
    return out


def sample_theta_integral(P: ComplexPoly, Qs: Sequence[ComplexPoly], pair: ExponentPair,
                          lam: float = 1.0, d_init: int = 4, s_gate: float = S_GATE,
                          d_cap: int = D_CAP, rel_change: float = 0.10,
                          inner: str = "oracle", profile_points: int = 32,
                          measure_K: float = LEMMA47_K, rel_target: float = 1e-2,
                          check_gates: bool = True) -> ThetaSampleResult:
    """inf over the lattice {d theta = 0} of the integral of
    |P|^eps / |sum_j Q_j e^{2 pi i theta_j}|^delta over the disk of radius lam.

    delta >= 1 is first reduced by Q_j -> Q_j^A, delta -> delta/A with
    A = ceil(delta) + 1.  d doubles from ``d_init`` until the inf moves by
    less than ``rel_change``.  Alongside the inf the result reports the
    sum-denominator integral, whether it lower-bounds every grid value on a
    shared quadrature rule, and the fraction of a fine theta profile lying
    within ``measure_K`` times its minimum.
    """
    Qs = list(Qs)
    if not Qs:
        raise ValueError("need at least one denominator term")
    if P.is_zero:
        raise ZeroNumerator("P is identically zero")
    if check_gates:
        _check_gates(Qs, s_gate)
    delta = pair.delta
    A = 1
    if delta >= 1:
        A = math.ceil(delta) + 1
    red_Qs = [q ** A for q in Qs]
    red_pair = ExponentPair(pair.eps, delta / A)
    J = len(Qs)
    e, dr = float(red_pair.eps), float(red_pair.delta)

    # sum-denominator integrand in the original exponents
    orig = ARPExpr((P,), tuple(Qs), pair)
    sum_int = arp_integrand(orig, l1_denominator=True)
    sigma = integrate_disk(sum_int, lam, rel_target=rel_target)

    cache: dict[tuple, tuple[float, bool]] = {}

    def inner_value(theta):
        key = tuple(np.round(np.asarray(theta) % 1.0, 12))
        if key in cache:
            return cache[key]
        Qt = _theta_poly(red_Qs, theta)
        ok = True
        if inner == "estimator":
            rs = roots(Qt)
            if np.all(rs.multiplicities == 1) and np.all(np.abs(rs.locations) < lam / 2):
                v = estimate(P, Qt, red_pair, lam).value
                cache[key] = (v, True)
                return cache[key]
        integ = ratio_integrand(P, Qt, red_pair)
        res, rule = integrate_disk(integ, lam, rel_target=rel_target, return_rule=True)
        # sum-denominator lower bound, checked on the shared rule
        lhs = rule.apply(sum_int)
        rhs = rule.apply(integ)
        ok = lhs <= rhs
        cache[key] = (res.value, ok)
        return cache[key]

    grid = ThetaGrid(d_init, J)
    all_ok = True
    prev = None
    stabilized = J == 1
    profile = []
    while True:
        vals = []
        for th in grid.points:
            v, ok = inner_value(th)
            all_ok &= ok
            vals.append(v)
        cur = float(min(vals))
        grid.history.append((grid.d, cur))
        profile = [(list(map(float, th)), float(v)) for th, v in zip(grid.points, vals)]
        if J == 1:
            break
        if prev is not None and abs(cur - prev) <= rel_change * abs(prev):
            stabilized = True
            break
        if grid.d * 2 > d_cap:
            raise NoStabilization(f"grid inf did not stabilize up to d = {grid.d}")
        prev = cur
        grid = ThetaGrid(grid.d * 2, J, grid.history)

    frac = None
    if J == 2 and profile_points:
        fine = [inner_value(np.array([0.0, k / profile_points]))[0] for k in range(profile_points)]
        fine = np.array(fine)
        frac = float(np.mean(fine <= measure_K * fine.min()))
    return ThetaSampleResult(cur, grid, profile, stabilized, sigma.value, bool(all_ok), frac,
                             {"A": A, "delta_reduced": str(red_pair.delta)})


# ---------------------------------------------------------------------------
# simple roots and the two-root closed form
# ---------------------------------------------------------------------------

def simple_root_size(P: ComplexPoly, Q: ComplexPoly, pair: ExponentPair,
                     s_gate: float = S_GATE) -> float:
    """The symmetric size on the unit disk, valid while |||Q - Z^N||| < s_gate."""
    N = Q.degree
    if N is None or N < 1:
        raise RangeViolation("Q must have degree >= 1")
    gap = coeff_norm(Q - ComplexPoly.monomial(N))
    if not gap < s_gate:
        raise NormGateViolated(f"|||Q - Z^{N}||| = {gap:.4g} is not below {s_gate}")
    rs = roots(Q)
    if np.any(rs.multiplicities > 1):
        raise MultipleRoots("the simple-root size needs simple roots")
    return estimate_symmetric(P, Q, pair, 1.0, radius_factor=1.0).value


def example_closed_form(a: complex, b: complex, c: complex, eps, delta, lam: float = 1.0) -> float:
    """Size of int |z - c|^eps / |a z^2 - b z|^delta over the disk of radius lam."""
    e, d = as_fraction(eps), as_fraction(delta)
    if not (d > 1 and 2 * d - e < 2):
        raise RangeViolation("need 1 < delta and 2*delta - eps < 2")
    if a == 0 and b == 0 and c == 0:
        raise RangeViolation("(a, b, c) must not all vanish")
    ef, df = float(e), float(d)
    A, B, C = abs(a), abs(b), abs(c)
    if B == 0:
        if C != 0:
            return math.inf
        return A ** (-df) * lam ** (-2 * df + 2 + ef)
    s = lam * A + B
    return s ** (-df) * lam ** (-df + 2 + ef) + (lam / s) ** (2 - df) * B ** (-2 * df + 2) * C ** ef


def example_integrand(a: complex, b: complex, c: complex, eps, delta) -> Integrand:
    P = ComplexPoly([-c, 1.0])
    Q = ComplexPoly([0.0, -b, a])
    return ratio_integrand(P, Q, ExponentPair(eps, delta))


# ---------------------------------------------------------------------------
# validation gate for the regularized formula
# ---------------------------------------------------------------------------

@dataclass
class GateRegime:
    name: str
    P: ComplexPoly
    Q: ComplexPoly
    pair: ExponentPair
    lam: float = 1.0


def default_gate_regimes() -> list[GateRegime]:
    F = Fraction
    one = ComplexPoly([1.0])
    return [
        GateRegime("single root, P=1, delta=5/2", one, ComplexPoly([0, 1]), ExponentPair(0, F(5, 2))),
        GateRegime("double root, P=1, delta=3/2", one, ComplexPoly.from_roots([0, 0]), ExponentPair(0, F(3, 2))),
        GateRegime("three spread roots, P=1, delta=3/2", one,
                   ComplexPoly.from_roots([0.3, -0.2 + 0.2j, -0.1 - 0.3j]), ExponentPair(0, F(3, 2))),
        GateRegime("cluster z(z-t)(z-1/4), P=1, delta=3/2", one,
                   ComplexPoly.from_roots([0, 0.01, 0.25]), ExponentPair(0, F(3, 2))),
        GateRegime("P=z+1/5, triple root, eps=1/2, delta=3/2", ComplexPoly([0.2, 1]),
                   ComplexPoly.from_roots([0.1, 0.1, 0.1]), ExponentPair(F(1, 2), F(3, 2))),
    ]


def regularized_gate_report(regimes: Sequence[GateRegime] | None = None,
                            mus: Sequence[float] = (0.3, 0.1, 0.03, 0.01, 0.003),
                            spread_bound: float = 100.0, trend_bound: float = 0.3,
                            rel_target: float = 1e-2) -> dict:
    """Track the experimental regularized formula against the oracle of
    int |P|^eps / (|Q| + mu^N)^delta along a mu sweep.

    A regime passes when the oracle/formula ratio stays within a factor
    ``spread_bound`` and its log shows no drift in log mu beyond
    ``trend_bound`` in fitted slope.
    """
    regimes = list(regimes or default_gate_regimes())
    rows = []
    for g in regimes:
        N = g.Q.degree
        entry = {"regime": g.name, "eps": str(g.pair.eps), "delta": str(g.pair.delta),
                 "M": g.P.degree, "N": N, "samples": []}
        try:
            for mu in mus:
                f = regularized_estimate(g.P, g.Q, g.pair, mu, g.lam)
                o = integrate_disk(ratio_integrand(g.P, g.Q, g.pair, mu=mu ** N), g.lam,
                                   rel_target=rel_target)
                entry["samples"].append({"mu": mu, "formula": f, "oracle": o.value,
                                         "ratio": o.value / f})
            r = np.array([s["ratio"] for s in entry["samples"]])
            slope = float(np.polyfit(np.log(mus), np.log(r), 1)[0])
            spread = float(r.max() / r.min())
            entry.update(spread=spread, log_slope=slope,
                         passed=bool(spread <= spread_bound and abs(slope) <= trend_bound))
        except RangeViolation as exc:
            entry.update(passed=False, error=f"outside the stated regime: {exc}")
        rows.append(entry)
    return {"mus": list(mus), "spread_bound": spread_bound, "trend_bound": trend_bound,
            "regimes": rows, "passed": sum(r["passed"] for r in rows), "total": len(rows)}


def gate_report_markdown(report: dict) -> str:
    lines = ["# Regularized formula validation gate", "",
             f"mu sweep: {report['mus']}; pass = ratio spread <= {report['spread_bound']} "
             f"and |d log ratio / d log mu| <= {report['trend_bound']}", "",
             "| regime | eps | delta | spread | log slope | verdict |",
             "|---|---|---|---|---|---|"]
    for r in report["regimes"]:
        if "error" in r:
            lines.append(f"| {r['regime']} | {r['eps']} | {r['delta']} | - | - | FAIL ({r['error']}) |")
        else:
            lines.append(f"| {r['regime']} | {r['eps']} | {r['delta']} | {r['spread']:.3g} | "
                         f"{r['log_slope']:.3f} | {'PASS' if r['passed'] else 'FAIL'} |")
    lines += ["", f"{report['passed']} of {report['total']} regimes pass."]
    return "\n".join(lines) + "\n"
