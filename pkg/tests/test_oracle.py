import math
from fractions import Fraction as F

import numpy as np
import pytest

from zetasize.errors import MixedFinitenessDisagreement
from zetasize.estimator import ExponentPair
from zetasize.expr import Integrand, power_integrand, ratio_integrand
from zetasize.oracle import (
    OracleResult, compare, integrate_circle, integrate_disk, integrate_disk_mc, integrate_polydisk_mc,
    integrate_radial, integrate_radial_quad, integrate_torus, torus_direct_2,
)
from zetasize.polynomial import ComplexPoly


@pytest.mark.parametrize("d", [0.5, 1.0, 1.5])
def test_disk_anchor(d):
    res = integrate_disk(power_integrand(d), 1.0)
    assert res.value == pytest.approx(2 * math.pi / (2 - d), rel=1e-2)
    assert not res.diverging


def test_disk_divergent():
    assert integrate_disk(power_integrand(2.0), 1.0).diverging
    assert integrate_disk(power_integrand(2.5), 1.0).diverging


def test_disk_vs_mc(rng):
    pair = ExponentPair(F(1, 2), F(5, 4))
    for i in range(4):
        Q = ComplexPoly.from_roots(0.45 * np.sqrt(rng.random(3)) * np.exp(2j * np.pi * rng.random(3)))
        P = ComplexPoly.from_roots([0.2])
        integ = ratio_integrand(P, Q, pair)
        det = integrate_disk(integ, 1.0, rel_target=1e-3)
        mc = integrate_disk_mc(integ, 1.0, n_samples=200_000, seed=i)
        assert abs(det.value - mc.value) <= 3 * math.hypot(mc.stderr, det.abs_error) + 1e-3 * det.value


def test_mc_anchors():
    one = Integrand(lambda z: np.ones(np.shape(z)))
    r = integrate_disk_mc(one, 2.0, n_samples=50_000, seed=1)
    assert abs(r.value - 4 * math.pi) <= 3 * r.stderr + 1e-9
    r = integrate_disk_mc(power_integrand(1.0), 1.0, n_samples=100_000, seed=2)
    assert abs(r.value - 2 * math.pi) <= 3 * r.stderr


def test_mc_near_double_root_sweep():
    pair = ExponentPair(0, F(3, 4))
    for t in (1e-1, 1e-3, 1e-5):
        integ = ratio_integrand(ComplexPoly([1.0]), ComplexPoly.from_roots([0, t]), pair)
        det = integrate_disk(integ, 1.0, rel_target=1e-3)
        mc = integrate_disk_mc(integ, 1.0, n_samples=200_000, seed=3)
        assert abs(det.value - mc.value) <= 3 * math.hypot(mc.stderr, det.abs_error) + 2e-3 * det.value


def test_mc_reproducible():
    a = integrate_disk_mc(power_integrand(0.7), 1.0, n_samples=10_000, seed=9)
    b = integrate_disk_mc(power_integrand(0.7), 1.0, n_samples=10_000, seed=9)
    assert a.value == b.value


def test_radial_examples():
    assert integrate_radial(2, 1, [0.0]).value == pytest.approx(1, rel=1e-6)
    a = integrate_radial(2, 1.5, [0.01, 0.0]).value
    b = integrate_radial_quad(2, 1.5, [0.01, 0.0]).value
    assert a == pytest.approx(b, rel=1e-3)
    assert integrate_radial(1, 1.5, [0.01, 0.0]).diverging


def test_circle_examples():
    assert integrate_circle(ComplexPoly([1.0]), 1).value == pytest.approx(2 * math.pi)
    assert integrate_circle(ComplexPoly([0, 1]), 2).value == pytest.approx(2 * math.pi)
    P = ComplexPoly([0.3, -1, 0.5j])
    a = integrate_circle(P, 0.7, rel_target=1e-4).value
    b = integrate_circle(P, 0.7, rel_target=1e-8).value
    assert a == pytest.approx(b, rel=1e-4)


def test_torus_examples():
    assert integrate_torus([2.0], 0.5).value == pytest.approx(2 ** -0.5)
    v = integrate_torus([1, 1], 0.5).value
    assert v == pytest.approx(torus_direct_2(1, 1, 0.5, 400_000), rel=1e-2)
    assert 0.1 < v / 2 ** -0.5 < 10
    assert integrate_torus([0, 0], 0.5).diverging
    det = integrate_torus([1, 1, 1], 0.3)
    mc = integrate_torus([1, 1, 1], 0.3, method="mc", n_samples=400_000, seed=4)
    assert abs(det.value - mc.value) <= 3 * mc.stderr + det.abs_error


def test_polydisk_examples():
    z1z2 = lambda Z: np.abs(Z[:, 0] * Z[:, 1]) ** 2
    r = integrate_polydisk_mc(z1z2, 1.0, [1, 1], n_samples=200_000, seed=0)
    assert abs(r.value - (2 * math.pi) ** 2) <= 3 * r.stderr + 0.01 * r.value
    cusp = lambda Z: np.abs(Z[:, 0] ** 2 + Z[:, 1] ** 3) ** 2
    coeffs = lambda zp: np.stack([zp[:, 0] ** 2, 0 * zp[:, 0], 0 * zp[:, 0], 1 + 0 * zp[:, 0]], axis=1)
    assert integrate_polydisk_mc(cusp, 1.8, [0.3, 0.3], 100_000, 0, slice_coeffs=coeffs).diverging
    assert not integrate_polydisk_mc(cusp, 1.4, [0.3, 0.3], 100_000, 0, slice_coeffs=coeffs).diverging


def test_compare_examples():
    rep = compare([(2.0, 2.0), (3.0, 3.0)])
    assert rep.ratio_min == rep.ratio_max == 1
    with pytest.raises(MixedFinitenessDisagreement):
        compare([(1.0, OracleResult(1.0)), (math.inf, OracleResult(4.0))])
    rep = compare([(math.inf, OracleResult(math.inf, diverging=True)), (1.0, 2.0)])
    assert rep.joint_infinite == 1 and rep.joint_finite == 1
    assert "instance_id" in rep.to_csv()
