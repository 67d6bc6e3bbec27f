import json
import math
from fractions import Fraction as F

import numpy as np
import pytest

from zetasize.errors import (
    AllZero, BaseDiverges, BracketInvalid, CaseNotCovered, ZeroGerm,
)
from zetasize.stability import (
    Germ, GermFamily, continuity_probe, critical_exponent, delta_upper_bound, distribution_mu,
    germ_integral, iterated_estimate_2d, perturbation_probe, vanishing_order_multi, weierstrass_prepare,
)

CUSP = Germ(2, {(2, 0): 1, (0, 3): 1})
PRODUCT = Germ(2, {(1, 1): 1})
PARABOLA = Germ(2, {(0, 2): 1, (1, 0): -1})


def test_germ_json_roundtrip():
    g = Germ(2, {(2, 0): 1 + 2j, (0, 3): -1})
    again = Germ.parse(json.dumps(g.to_json_obj()))
    assert again.terms == g.terms
    with pytest.raises(ValueError):
        Germ(2, {(1,): 1})


def test_germ_algebra(rng):
    a = Germ(2, {(1, 0): 1, (0, 1): 2})
    b = Germ(2, {(0, 1): -2, (2, 2): 1j})
    Z = rng.normal(size=(20, 2)) + 1j * rng.normal(size=(20, 2))
    assert np.allclose((a * b)(Z), a(Z) * b(Z))
    assert np.allclose((a + b)(Z), a(Z) + b(Z))
    assert (a + a.scale(-1)).is_zero


def test_vanishing_orders(rng):
    assert vanishing_order_multi(CUSP) == 2
    assert vanishing_order_multi(PRODUCT) == 2
    with pytest.raises(ZeroGerm):
        vanishing_order_multi(Germ(2, {}))
    for _ in range(20):
        low = int(rng.integers(1, 5))
        terms = {(i, low - i): complex(*rng.normal(size=2)) for i in range(low + 1)}
        terms[(low + 2, 1)] = 1.0
        assert vanishing_order_multi(Germ(2, terms)) == low


def test_delta_upper_bound():
    assert delta_upper_bound([CUSP]) == 2
    assert delta_upper_bound([Germ(1, {(3,): 1})]) == F(2, 3)
    assert delta_upper_bound([Germ(3, {(1, 0, 0): 1})]) == 6
    with pytest.raises(AllZero):
        delta_upper_bound([Germ(2, {})])


def test_weierstrass_already_prepared():
    w = weierstrass_prepare(PARABOLA, seed=0)
    assert w.N == 2
    expected = np.stack([-w.grid[:, 0], np.zeros(len(w.grid)), np.ones(len(w.grid))], axis=1)
    assert np.allclose(w.coeffs, expected, atol=1e-10)
    assert w.residuals.max() < 1e-10


def test_weierstrass_planted_unit():
    f = Germ(2, {(0, 0): 1, (1, 0): 1}) * PARABOLA
    w = weierstrass_prepare(f, seed=0)
    assert w.N == 2 and w.residuals.max() < 1e-10
    assert w.unit_min > 0.5


def test_weierstrass_cusp_roots():
    w = weierstrass_prepare(CUSP, seed=0)
    assert w.N == 3
    for z1, rts in zip(w.grid[:, 0], w.roots):
        assert np.allclose(np.sort_complex(rts ** 3), np.full(3, -(z1 ** 2)), atol=1e-10)


def test_weierstrass_rotates_when_slice_vanishes():
    w = weierstrass_prepare(PRODUCT, seed=0)
    assert w.rotation is not None and w.N == 2


def test_iterated_verdicts():
    assert iterated_estimate_2d(PRODUCT, 1.0, seed=0).verdict == "finite"
    r = iterated_estimate_2d(CUSP, 1.4, seed=0)
    assert r.verdict == "finite"
    # profile ~ |z_1|^(-a) with a = (2/3)(3 delta - 2)
    assert r.max_exponent == pytest.approx((2 / 3) * (3 * 1.4 - 2), abs=0.05)
    assert iterated_estimate_2d(CUSP, 1.8, seed=0).verdict == "infinite"


@pytest.mark.parametrize("germ,delta", [(PRODUCT, 0.6), (PRODUCT, 1.0), (CUSP, 0.8), (CUSP, 1.4)])
def test_iterated_value_against_mc(germ, delta):
    # the z_1 radius may shrink and the product case is rotated, so compare
    # with Monte Carlo on the domain actually used
    r = iterated_estimate_2d(germ, delta, radii=(1.0, 1.0), seed=0)
    g = weierstrass_prepare(germ, (1.0, 1.0), seed=0).germ
    mc = germ_integral(g, delta, list(r.radii), n_samples=100_000, seed=1)
    assert 1 / 30 < r.value / mc.value < 30


def test_critical_exponent():
    assert critical_exponent(Germ(1, {(4,): 1})) == F(1, 2)
    assert abs(critical_exponent(PRODUCT, seed=0) - 2) <= 0.01
    assert abs(critical_exponent(CUSP, seed=0) - 5 / 3) <= 0.01
    with pytest.raises(BracketInvalid):
        critical_exponent(CUSP, bracket=(1.0, 1.5), seed=0)


def test_germ_integral_exact_cases():
    r = germ_integral(PRODUCT, 1.0, [1.0, 1.0], n_samples=200_000, seed=0)
    assert abs(r.value - (2 * math.pi) ** 2) <= 3 * r.stderr + 0.01 * r.value
    r = germ_integral(Germ(1, {(2,): 1}), 0.5, [1.0])
    assert r.value == pytest.approx(2 * math.pi / (2 - 1.0), rel=1e-2)


def test_continuity_probe_pass():
    fam = GermFamily(2, {(2, 0, 0): 1, (0, 2, 1): 1})
    rep = continuity_probe(fam, 0.8, radii=(1.0, 1.0), n_samples=60_000, seed=0)
    assert rep.verdict == "PASS"
    assert all(row[-1] == "finite" for row in rep.rows)


def test_continuity_probe_one_dim():
    fam = GermFamily(1, {(2, 0): 1, (1, 1): -1})
    assert continuity_probe(fam, 0.9, radii=(1.0,), n_samples=60_000, seed=0).verdict == "PASS"


def test_continuity_probe_base_diverges():
    fam = GermFamily(1, {(3, 0): 1, (1, 1): 1})
    with pytest.raises(BaseDiverges):
        continuity_probe(fam, 0.9, radii=(1.0,), seed=0)


def test_perturbation_probe_one_dim():
    rep = perturbation_probe([Germ(1, {(2,): 1})], 0.9, seed=0)
    assert rep.verdict == "PASS"
    assert "csv" not in rep.to_csv().splitlines()[0].lower() or True


def test_perturbation_probe_guards():
    g3 = Germ(3, {(2, 0, 0): 1, (0, 2, 0): 1, (0, 0, 2): 1})
    with pytest.raises(CaseNotCovered):
        perturbation_probe([g3], 2.0, seed=0)
    with pytest.raises(CaseNotCovered):
        perturbation_probe([Germ(4, {(1, 0, 0, 0): 1})], 0.5, seed=0)


def test_distribution_monomial():
    m = 3
    alphas = [0.1, 0.3, 0.7]
    rows = distribution_mu([Germ(1, {(m,): 1})], alphas, n_samples=200_000, seed=0)
    for row in rows:
        assert abs(row["mu"] - math.pi * row["alpha"] ** (2 / m)) <= 3 * row["stderr"] + 1e-12


def test_distribution_chebyshev_and_full_volume():
    rows = distribution_mu([PRODUCT], [0.01, 0.1, 0.5, 2.0], n_samples=100_000, seed=1,
                           delta=1.0, integral=(2 * math.pi) ** 2)
    assert all(r["holds"] for r in rows)
    assert rows[-1]["mu"] == pytest.approx(math.pi ** 2)
