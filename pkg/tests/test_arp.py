import math
from fractions import Fraction as F

import numpy as np
import pytest

from zetasize.arp import (
    arp_eval, example_closed_form, example_integrand, gate_report_markdown, normalize_sharp,
    regularize_integral, regularized_gate_report, sample_theta_integral, simple_root_size,
    theta_denominator_size,
)
from zetasize.errors import NormGateViolated, ZeroNumerator
from zetasize.estimator import ExponentPair, estimate, estimate_pure
from zetasize.expr import ARPExpr
from zetasize.oracle import integrate_disk, integrate_torus
from zetasize.polynomial import ComplexPoly

Z = ComplexPoly([0, 1])
ONE = ComplexPoly([1.0])


def test_arp_requires_numerator():
    with pytest.raises(ZeroNumerator):
        ARPExpr((ComplexPoly(),), (Z,), ExponentPair(0, 1))


def test_arp_eval_examples():
    assert arp_eval(ARPExpr((Z,), (Z,), ExponentPair(1, 1)), 0) == 1
    assert math.isinf(arp_eval(ARPExpr((ONE,), (Z,), ExponentPair(0, F(1, 2))), 0))
    R = ARPExpr((ComplexPoly.monomial(2),), (Z,), ExponentPair(F(1, 2), 1))
    assert arp_eval(R, 0) == pytest.approx(1)
    assert arp_eval(R, 1e-4) == pytest.approx(1)


def test_normalize_sharp_examples():
    R = ARPExpr((Z,), (Z,), ExponentPair(1, 1))
    out, info = normalize_sharp(R)
    assert info == {"A": 1, "B": 1, "D": 1}
    _, info = normalize_sharp(ARPExpr((Z,), (Z,), ExponentPair(F(1, 2), 1)))
    assert info == {"A": 1, "B": 2, "D": 2}


def test_normalize_sharp_pointwise(rng):
    P = ComplexPoly([0.3, 1j, 1])
    Q = ComplexPoly([0.1, -1, 0, 2])
    R = ARPExpr((P,), (Q,), ExponentPair(F(1, 2), F(3, 4)))
    S, info = normalize_sharp(R)
    assert info == {"A": 2, "B": 3, "D": 4}
    z = rng.normal(size=50) + 1j * rng.normal(size=50)
    # a single term on each side: the rewrite is exact pointwise
    assert np.allclose(R(z), S(z), rtol=1e-9)


def test_normalize_sharp_two_terms(rng):
    Ps = (ComplexPoly([0.3, 1]), ComplexPoly([0, 0, 1j]))
    Qs = (ComplexPoly([0.1, -1, 0, 2]), ComplexPoly([0.5, 1]))
    R = ARPExpr(Ps, Qs, ExponentPair(F(1, 2), F(3, 4)))
    S, _ = normalize_sharp(R)
    z = rng.normal(size=200) + 1j * rng.normal(size=200)
    ratio = R(z) / S(z)
    assert 1 / 8 < ratio.min() and ratio.max() < 8


def test_theta_size_examples():
    assert theta_denominator_size([3.0], 0.5) == pytest.approx(3 ** -0.5)
    assert theta_denominator_size([1, 1], 0.5) == pytest.approx(2 ** -0.5)
    assert math.isinf(theta_denominator_size([0, 0], 0.5))
    assert integrate_torus([3.0], 0.5).value == pytest.approx(3 ** -0.5)


def test_regularization_examples():
    conv = regularize_integral(ARPExpr((ONE,), (Z,), ExponentPair(0, F(1, 2))), [10.0 ** -k for k in range(1, 7)])
    assert not conv.diverging and conv.monotone
    assert conv.limit == pytest.approx(4 * math.pi / 3, rel=1e-2)
    div = regularize_integral(ARPExpr((ONE,), (Z,), ExponentPair(0, F(5, 2))), [10.0 ** -k for k in range(1, 7)])
    assert div.diverging and div.monotone


def test_theta_sample_single_term():
    res = sample_theta_integral(ONE, [ComplexPoly([0.05, 0, 1])], ExponentPair(0, F(1, 2)))
    direct = integrate_disk(__import__("zetasize.expr", fromlist=["x"]).ratio_integrand(
        ONE, ComplexPoly([0.05, 0, 1]), ExponentPair(0, F(1, 4) * 2)), 1.0).value
    assert res.stabilized and res.grid.d == 4
    assert res.inf == pytest.approx(direct, rel=1e-6)


def test_theta_sample_two_terms():
    c = 0.05
    res = sample_theta_integral(ONE, [ComplexPoly.monomial(2), ComplexPoly([c])], ExponentPair(0, F(1, 2)))
    assert 0.1 < res.inf / res.sum_denominator < 10
    assert res.lower_bound_holds
    assert res.measure_fraction >= 0.5


def test_theta_gate():
    with pytest.raises(NormGateViolated):
        sample_theta_integral(ONE, [ComplexPoly([2, 0, 1]), ComplexPoly([0.01])], ExponentPair(0, F(1, 2)))


def test_simple_root_size():
    Q = ComplexPoly([0.01j, 0.02, 0, 1])
    pair = ExponentPair(0, F(3, 2))
    v = simple_root_size(ONE, Q, pair)
    assert 0.1 < v / estimate_pure(Q, F(3, 2), 1.0).value < 10
    Q1 = ComplexPoly([-0.1, 1])
    o = integrate_disk(__import__("zetasize.expr", fromlist=["x"]).ratio_integrand(ONE, Q1, pair), 1.0).value
    assert 0.1 < o / simple_root_size(ONE, Q1, pair) < 100
    with pytest.raises(NormGateViolated):
        simple_root_size(ONE, ComplexPoly([2, 0, 1]), pair)


def test_example_closed_form():
    eps, delta = F(1), F(5, 4)
    assert example_closed_form(0, 1, 0, eps, delta) == pytest.approx(1)
    o = integrate_disk(example_integrand(0, 1, 0, eps, delta), 1.0).value
    assert o == pytest.approx(2 * math.pi / (2 + float(eps - delta)), rel=1e-2)
    assert math.isinf(example_closed_form(1, 0, 1, eps, delta))
    assert integrate_disk(example_integrand(1, 0, 1, eps, delta), 1.0).diverging


def test_gate_report_renders():
    rep = regularized_gate_report(mus=(0.1, 0.03, 0.01))
    md = gate_report_markdown(rep)
    assert "| regime |" in md and f"of {rep['total']} regimes pass" in md
