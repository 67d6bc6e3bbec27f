import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zetasize.polynomial import (
    ComplexPoly, coeff_norm, derivative, eval_poly, polydiv, residual_bound, roots, vanishing_order,
)


def test_eval_examples():
    p = ComplexPoly([-1, 0, 1])
    assert p(2) == 3
    assert p(1j) == -2


def test_eval_matches_naive_sum(rng):
    for _ in range(100):
        deg = int(rng.integers(0, 9))
        c = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        z = 2 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        naive = sum(ck * z ** k for k, ck in enumerate(c))
        assert abs(eval_poly(ComplexPoly(c), z) - naive) <= 1e-10 * max(1.0, abs(naive))


def test_trailing_zeros_trimmed_and_zero_poly():
    assert ComplexPoly([1, 2, 0, 0]).degree == 1
    z = ComplexPoly([0, 0])
    assert z.is_zero and z.degree is None


def test_derivative_examples():
    assert np.allclose(derivative(ComplexPoly([0, 0, 0, 1]), 2).coeffs, [0, 6])
    assert derivative(ComplexPoly([5]), 1).is_zero


@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=8), st.integers(0, 4))
def test_derivative_composition(c, nu):
    p = ComplexPoly(c)
    a = derivative(derivative(p, nu), 1)
    b = derivative(p, nu + 1)
    assert a.is_zero == b.is_zero
    if not a.is_zero:
        assert np.allclose(a.coeffs, b.coeffs)


def test_roots_examples():
    rs = roots(ComplexPoly([-1, 0, 1]))
    assert sorted((round(a.real, 12), m) for a, m in rs.entries) == [(-1.0, 1), (1.0, 1)]
    rs = roots(ComplexPoly.from_roots([1, 1]), tol=1e-6)
    assert len(rs.entries) == 1 and rs.entries[0][1] == 2
    assert abs(rs.entries[0][0] - 1) < 1e-6


def test_triple_root_merges_at_default_tol():
    rs = roots(ComplexPoly.from_roots([0.1, 0.1, 0.1]))
    assert list(rs.multiplicities) == [3]


def test_close_roots_stay_apart():
    rs = roots(ComplexPoly.from_roots([0, 1e-6, 0.5]))
    assert rs.degree == 3 and len(rs.entries) == 3


def test_planted_clusters_residual(rng):
    for _ in range(30):
        deg = int(rng.integers(2, 11))
        r = rng.normal(size=deg) + 1j * rng.normal(size=deg)
        r[1] = r[0] + 10 ** rng.uniform(-5, -2)
        q = ComplexPoly.from_roots(r)
        rs = roots(q)
        assert int(rs.multiplicities.sum()) == deg
        locs = rs.locations
        if len(locs) > 1:
            d = np.abs(locs[:, None] - locs[None, :])
            assert d[~np.eye(len(locs), dtype=bool)].min() > rs.tol
        bound = residual_bound(q)
        for a in locs:
            # a cluster centroid leaves a residual of order tol^m times the coefficients
            assert abs(q(a)) <= max(bound, coeff_norm(q) * rs.tol)


def test_coeff_norm_examples():
    assert coeff_norm(ComplexPoly.monomial(5)) == 1
    assert coeff_norm(ComplexPoly([-4j, 0, 3])) == 7


@given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False), min_size=1, max_size=6),
       st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False), min_size=1, max_size=6))
def test_coeff_norm_triangle(a, b):
    p, q = ComplexPoly(a), ComplexPoly(b)
    assert coeff_norm(p + q) <= coeff_norm(p) + coeff_norm(q) + 1e-12


def test_vanishing_order_examples():
    assert vanishing_order(ComplexPoly([0, 0, 1]), 0) == 2
    assert vanishing_order(ComplexPoly([1]), 0.3 + 1j) == 0
    assert vanishing_order(ComplexPoly.from_roots([1, 1, 1]), 1, 1e-8) == 3


def test_polydiv_roundtrip(rng):
    a = ComplexPoly(rng.normal(size=6) + 1j * rng.normal(size=6))
    b = ComplexPoly(rng.normal(size=3) + 1j * rng.normal(size=3))
    quo, rem = polydiv(a, b)
    back = quo * b + rem
    assert np.allclose(back.coeffs, a.coeffs)
    assert rem.is_zero or rem.degree < b.degree


def test_json_roundtrip():
    p = ComplexPoly([1 + 2j, 0, -3])
    assert np.allclose(ComplexPoly.from_json_obj(p.to_json_obj()).coeffs, p.coeffs)
    assert np.allclose(ComplexPoly.parse("[[1,0],[0,1]]").coeffs, [1, 1j])
