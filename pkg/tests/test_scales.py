import itertools

import numpy as np
import pytest

from zetasize.errors import TooLarge
from zetasize.polynomial import RootSet
from zetasize.scales import (
    absolute_scales, coefficient_size_of_largest_root, f_r_poly, local_scales_exact,
    local_scales_greedy, power_sum_size, power_sums_from_coeffs, r_discriminant, scale_table,
    sigma_scale_product, symmetrized_scale_product,
)
from zetasize.polynomial import ComplexPoly


def brute_scales(pts, alpha):
    """L_k(alpha): smallest diameter of an (N-k)-subset containing alpha."""
    pts = list(pts)
    n = len(pts)
    ia = int(np.argmin(np.abs(np.array(pts) - alpha)))
    out = []
    for k in range(n):
        best = np.inf
        others = [i for i in range(n) if i != ia]
        for sub in itertools.combinations(others, n - k - 1):
            s = [pts[ia]] + [pts[i] for i in sub]
            diam = max((abs(a - b) for a in s for b in s), default=0.0)
            best = min(best, diam)
        out.append(best)
    return np.array(out)


def test_exact_examples():
    S = [0, 1, 1]
    assert np.allclose(local_scales_exact(S, 0), [1, 1, 0])
    assert np.allclose(local_scales_exact(S, 1), [1, 0, 0])
    assert np.allclose(local_scales_exact([0.3] * 4, 0.3), [0, 0, 0, 0])


def test_greedy_examples():
    assert np.allclose(local_scales_greedy([0, 1, 1], 1), [1, 0, 0])
    assert np.allclose(local_scales_greedy([0, 0.01, 1], 0), [1, 0.01, 0])


def test_exact_matches_brute_force(rng):
    for _ in range(50):
        n = int(rng.integers(1, 7))
        pts = rng.normal(size=n) + 1j * rng.normal(size=n)
        a = pts[int(rng.integers(n))]
        assert np.allclose(local_scales_exact(pts, a), brute_scales(pts, a))


def test_greedy_within_factor_two(rng):
    for _ in range(100):
        n = int(rng.integers(2, 9))
        pts = rng.normal(size=n) + 1j * rng.normal(size=n)
        pts[1] = pts[0] + 10 ** rng.uniform(-4, 0)
        a = pts[int(rng.integers(n))]
        ex, gr = local_scales_exact(pts, a), local_scales_greedy(pts, a)
        pos = ex > 0
        r = gr[pos] / ex[pos]
        assert np.all((r >= 0.5 - 1e-12) & (r <= 2 + 1e-12))


def test_table_invariants(rng):
    for _ in range(30):
        n = int(rng.integers(1, 7))
        pts = rng.normal(size=n) + 1j * rng.normal(size=n)
        if n > 2:
            pts[2] = pts[1]
        rs = RootSet.from_points(pts)
        t = scale_table(rs)
        assert np.all(np.diff(t.scales, axis=1) <= 1e-15)
        assert np.all(t.scales[:, -1] == 0)
        for row, m in zip(t.scales, rs.multiplicities):
            zero_from = n - m
            assert np.all(row[zero_from:] == 0) and np.all(row[:zero_from] > 0)


def test_absolute_examples():
    assert list(absolute_scales([0, 0, 1, 1]).values) == [1, 1, 0, 0]
    assert np.all(absolute_scales([2j] * 3).values == 0)
    circ = np.exp(2j * np.pi * np.arange(6) / 6)
    ex = np.min([brute_scales(circ, a) for a in circ], axis=0)
    assert np.allclose(absolute_scales(circ).values, ex)


def test_r_discriminant_examples():
    assert r_discriminant([0, 0, 1, 1], 2) == pytest.approx(1)
    assert r_discriminant([0, 1], 1) == pytest.approx(1)


def test_power_sum_size_examples():
    assert power_sum_size([1, -1]) == pytest.approx(np.sqrt(2))
    assert power_sum_size([3 - 4j]) == pytest.approx(5)


def test_power_sum_size_comparable_to_l1(rng):
    for n in range(1, 7):
        ratios = []
        for _ in range(50):
            g = rng.normal(size=n) + 1j * rng.normal(size=n)
            ratios.append(power_sum_size(g) / np.abs(g).sum())
        assert min(ratios) > 0.05 and max(ratios) < n + 1


def test_power_sums_from_coeffs():
    p = ComplexPoly.from_roots([1, 2, 3j])
    s = power_sums_from_coeffs(p, 3)
    r = np.array([1, 2, 3j])
    assert np.allclose(s, [np.sum(r ** k) for k in (1, 2, 3)])
    assert coefficient_size_of_largest_root(ComplexPoly.from_roots([0.1, 5])) == pytest.approx(5, rel=2)


def test_f_r_poly_examples():
    assert np.allclose(f_r_poly([0, 1], 1).coeffs, [-1, 0, 1])
    assert np.allclose(f_r_poly([0.3, 0.3], 1).coeffs, [0, 0, 1])


def test_f_r_poly_tracks_discriminant(rng):
    for _ in range(10):
        pts = rng.normal(size=4) + 1j * rng.normal(size=4)
        F = f_r_poly(pts, 2)
        size = power_sum_size(np.roots(F.coeffs[::-1]))
        assert 1e-3 < size / r_discriminant(pts, 2) < 1e3


def test_sigma_forms():
    assert sigma_scale_product([0, 1, 1], 0, 1) == pytest.approx(1)
    with pytest.raises(TooLarge):
        symmetrized_scale_product(list(range(7)), 0, 1)
    val = symmetrized_scale_product([0, 1, 2], 0, 0)
    assert val > 0
