import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zetasize.errors import (
    DegenerateExponents, NormGateViolated, RangeViolation, RootsOutsideHalfDisk, ScaleOrderViolation,
)
from zetasize.estimator import (
    ExponentPair, circle_size, degeneracy_witness, dilate, dilation_exponent, estimate,
    estimate_pure, estimate_supform, estimate_symmetric, is_finite, k_index, nondegenerate,
    openness_sigma, phi, radial_size, regularized_estimate,
)
from zetasize.expr import ratio_integrand
from zetasize.oracle import integrate_disk, integrate_radial
from zetasize.polynomial import ComplexPoly

ONE = ComplexPoly([1.0])
Z = ComplexPoly([0, 1])


def test_nondegenerate_examples():
    assert not nondegenerate(ExponentPair(0, 1), 0, 2)
    for N in range(1, 11):
        assert nondegenerate(ExponentPair(0, F(9, 10)), 0, N)


@given(st.integers(0, 6), st.integers(1, 6), st.integers(0, 12), st.integers(1, 6),
       st.integers(1, 30), st.integers(1, 8))
def test_nondegenerate_brute_force(M, N, ep, eq, dp, dq):
    pair = ExponentPair(F(ep, eq), F(dp, dq))
    brute = all(nu * pair.eps + 2 != (N - k) * pair.delta for nu in range(M + 1) for k in range(N))
    assert nondegenerate(pair, M, N) == brute
    assert (degeneracy_witness(pair, M, N) is None) == brute


def test_k_index_examples():
    assert k_index(0, ExponentPair(0, F(9, 10)), 3) == 0
    assert k_index(0, ExponentPair(0, F(3, 2)), 3) == 1
    assert k_index(0, ExponentPair(0, F(1, 2)), 3) == -1


def test_phi_examples():
    t = 1e-3
    assert phi(0, 0, [t, 0], 1.0, ExponentPair(0, F(3, 2))) == pytest.approx(t)
    assert phi(0, -1, [0.3, 0], 1.0, ExponentPair(0, F(1, 2))) == 1
    assert phi(0, 0, [0, 0], 1.0, ExponentPair(0, F(3, 2))) == 0


def test_estimate_examples():
    assert estimate(ONE, Z, ExponentPair(0, F(3, 2))).value == pytest.approx(1)
    for t in (1e-2, 1e-3, 1e-4):
        v = estimate(ONE, ComplexPoly.from_roots([0, t]), ExponentPair(0, F(3, 2))).value
        assert v == pytest.approx(2 / t, rel=1e-6)
    assert math.isinf(estimate(ONE, ComplexPoly.from_roots([0.2, 0.2]), ExponentPair(0, F(3, 2))).value)


def test_estimate_preconditions():
    with pytest.raises(RootsOutsideHalfDisk):
        estimate(ONE, ComplexPoly.from_roots([0.9]), ExponentPair(0, F(1, 2)))
    with pytest.raises(DegenerateExponents) as exc:
        estimate(ONE, Z, ExponentPair(0, 2))
    assert exc.value.nu == 0 and exc.value.k == 0


def test_is_finite_examples():
    Q = ComplexPoly.from_roots([0, 1, 1])
    assert is_finite(ONE, Q, ExponentPair(0, F(9, 10)))
    assert not is_finite(ONE, Q, ExponentPair(0, F(3, 2)))
    with pytest.raises(DegenerateExponents):
        is_finite(ComplexPoly([-1, 1]), ComplexPoly.from_roots([1, 1]), ExponentPair(1, F(3, 2)))


def test_estimate_pure_examples():
    for N in (1, 2, 3):
        d = F(1, N + 1)
        assert estimate_pure(ComplexPoly.monomial(N), d).value == pytest.approx(1)
    assert math.isinf(estimate_pure(ComplexPoly.monomial(2), F(3, 2)).value)
    Q = ComplexPoly.from_roots([0, 1e-3, 1])
    assert estimate_pure(Q, F(3, 2), 4).value == pytest.approx(estimate(ONE, Q, ExponentPair(0, F(3, 2)), 4).value)


def test_estimate_pure_matches_estimate(rng):
    for _ in range(50):
        N = int(rng.integers(1, 6))
        r = 0.45 * np.sqrt(rng.random(N)) * np.exp(2j * np.pi * rng.random(N))
        Q = ComplexPoly.from_roots(r, 2.0)
        d = F(int(rng.integers(1, 30)), 7)
        if not nondegenerate(ExponentPair(0, d), 0, N):
            continue
        a = estimate_pure(Q, d).value
        b = estimate(ONE, Q, ExponentPair(0, d)).value
        if N * d < 2:
            # one global term against one term per root
            assert b / a == pytest.approx(len(set(np.round(r, 12))), rel=1e-12)
        else:
            assert a == pytest.approx(b, rel=1e-12) or (math.isinf(a) and math.isinf(b))


def test_symmetric_bounds(rng):
    pair = ExponentPair(F(1, 3), F(6, 5))
    for _ in range(30):
        r = 0.45 * np.sqrt(rng.random(3)) * np.exp(2j * np.pi * rng.random(3))
        P = ComplexPoly.from_roots([0.1 + 0.2j])
        Q = ComplexPoly.from_roots(r)
        ratio = estimate_symmetric(P, Q, pair).value / estimate(P, Q, pair).value
        assert 1 - 1e-12 <= ratio <= 4 * 2 * 4
    c = 0.2
    for d in (F(1, 2), F(3, 2)):
        pr = ExponentPair(0, d)
        Q = ComplexPoly.from_roots([c])
        assert estimate_symmetric(ONE, Q, pr).value == pytest.approx(float(1 ** (2 - d)))
        assert estimate(ONE, Q, pr).value == pytest.approx(1.0)


def test_symmetric_against_oracle():
    Q = ComplexPoly.from_roots([0, 1])
    pair = ExponentPair(0, F(3, 2))
    v = estimate_symmetric(ONE, Q, pair, 4).value
    o = integrate_disk(ratio_integrand(ONE, Q, pair), 4).value
    assert 1 / 100 < o / v < 100


def test_supform():
    Q = ComplexPoly.from_roots([0, 0.2, -0.1j])
    pair = ExponentPair(0, F(3, 2))
    assert estimate_supform(ONE, Q, pair).value == pytest.approx(estimate_symmetric(ONE, Q, pair).value)
    with pytest.raises(RangeViolation):
        estimate_supform(ComplexPoly.monomial(2), ComplexPoly.from_roots([0.1]), ExponentPair(1, F(3, 2)))


def test_supform_ratio(rng):
    pair = ExponentPair(F(1, 3), F(3, 2))
    for _ in range(20):
        r = 0.45 * np.sqrt(rng.random(3)) * np.exp(2j * np.pi * rng.random(3))
        P = ComplexPoly.from_roots([0.3])
        Q = ComplexPoly.from_roots(r)
        ratio = estimate_supform(P, Q, pair).value / estimate(P, Q, pair).value
        assert 0.1 < ratio < 100


def test_radial_examples():
    assert radial_size(2, 1, 1.0, [0.0]) == 1
    for L in (1e-2, 1e-3):
        assert radial_size(2, F(3, 2), 1.0, [L, 0.0]) == pytest.approx(1 / L)
        o = integrate_radial(2, 1.5, [L, 0.0]).value
        assert 0.1 < o * L < 10
    with pytest.raises(ScaleOrderViolation):
        radial_size(2, 1, 1.0, [0.1, 0.2, 0.0])


def test_circle_examples():
    assert circle_size(Z, 2, 2 * math.pi) == 1
    assert circle_size(ComplexPoly([3 - 4j]), F(1, 2), 1.0) == pytest.approx(5 ** 0.5)
    with pytest.raises(RangeViolation):
        circle_size(Z, 1, 0.01)


def test_regularized_single_root():
    mu = 0.01
    v = regularized_estimate(ONE, Z, ExponentPair(0, F(5, 2)), mu)
    assert v == pytest.approx(mu ** -2.5)
    with pytest.raises(RangeViolation):
        regularized_estimate(ONE, Z, ExponentPair(0, F(1, 2)), mu)


def test_dilation_law(rng):
    for _ in range(40):
        N, M = int(rng.integers(1, 5)), int(rng.integers(0, 3))
        pair = ExponentPair(F(int(rng.integers(0, 4)), 3) if M else 0, F(int(rng.integers(1, 20)), 7))
        if not nondegenerate(pair, M, N):
            continue
        r = 0.3 * np.sqrt(rng.random(N)) * np.exp(2j * np.pi * rng.random(N))
        P = ComplexPoly.from_roots(0.3 * np.exp(2j * np.pi * rng.random(M))) if M else ONE
        Q = ComplexPoly.from_roots(r)
        s = 2.0 ** int(rng.integers(-2, 3))
        base = estimate(P, Q, pair).value
        Ps, Qs, lam = dilate(P, Q, 1.0, s)
        scaled = estimate(Ps, Qs, pair, lam).value
        assert scaled == pytest.approx(base * s ** float(dilation_exponent(pair, M, N)), rel=1e-10)


def test_openness_exact(rng):
    checked = 0
    while checked < 50:
        N = int(rng.integers(1, 5))
        r = 0.4 * np.sqrt(rng.random(N)) * np.exp(2j * np.pi * rng.random(N))
        if N > 1 and rng.random() < 0.5:
            r[1] = r[0]
        Q = ComplexPoly.from_roots(r)
        pair = ExponentPair(0, F(int(rng.integers(1, 12)), 5))
        try:
            if not is_finite(ONE, Q, pair):
                continue
        except DegenerateExponents:
            continue
        checked += 1
        s = openness_sigma(ONE, Q, pair)
        assert s > 0
        assert is_finite(ONE, Q, ExponentPair(0, pair.delta + s))
        with pytest.raises(DegenerateExponents):
            is_finite(ONE, Q, ExponentPair(0, pair.delta + 2 * s))


def test_json_shape():
    e = estimate(ONE, ComplexPoly.from_roots([0.1, 0.1]), ExponentPair(0, F(3, 2)))
    obj = e.to_json_obj()
    assert obj["value"] == "inf" and set(obj) == {"value", "lambda", "breakdown", "scales_method"}
