import numpy as np
import pytest

from monodromy_kit.poly_kit import ComplexPoly, NonConvergence, all_roots, derivative, evaluate, min_separation


def _same_multiset(actual, expected, tol=1e-10):
    actual = sorted(np.asarray(actual, dtype=complex), key=lambda z: (round(z.real, 6), round(z.imag, 6)))
    expected = sorted(np.asarray(expected, dtype=complex), key=lambda z: (round(z.real, 6), round(z.imag, 6)))
    return len(actual) == len(expected) and all(abs(x - y) <= tol for x, y in zip(actual, expected))


@pytest.mark.parametrize('coeffs, z', [
    ((0, -2, 1), 0),
    ((2, -3, 0, 1), 1),
    ((4, -5, 0, 0, 0, 1), 1),
])
def test_evaluate_at_known_roots(coeffs, z):
    assert evaluate(ComplexPoly.from_coeffs(coeffs), z) == 0


def test_evaluate_is_vectorized():
    p = ComplexPoly.from_coeffs((-1, 0, 1))
    np.testing.assert_allclose(p(np.array([1, -1, 2j])), [0, 0, -5])


def test_from_coeffs_trims_trailing_zeros_and_rejects_nan():
    assert ComplexPoly.from_coeffs((1, 2, 0, 0)).degree == 1
    assert ComplexPoly.from_coeffs((0, 0)).is_zero
    with pytest.raises(ValueError):
        ComplexPoly.from_coeffs((1, float('nan')))


def test_derivative():
    assert derivative(ComplexPoly.from_coeffs((0.5, -3, 0, 1))).coeffs == (-3, 0, 3)
    assert derivative(ComplexPoly.from_coeffs((7,))).is_zero
    assert derivative(ComplexPoly.from_coeffs((0, -5, 0, 0, 0, 1))).coeffs == (-5, 0, 0, 0, 5)


def test_derivative_matches_difference_quotient():
    rng = np.random.default_rng(7)
    h = 1e-6
    for _ in range(20):
        p = ComplexPoly.from_coeffs(rng.normal(size=6) + 1j * rng.normal(size=6))
        z = complex(rng.normal(), rng.normal())
        quotient = (p(z + h) - p(z)) / h
        assert abs(quotient - evaluate(derivative(p), z)) <= 1e-3 * max(1.0, abs(quotient))


@pytest.mark.parametrize('coeffs, expected', [
    ((-1, 0, 1), (1, -1)),
    ((0, -3, 0, 1), (0, 3 ** 0.5, -3 ** 0.5)),
    ((0, -5, 0, 0, 0, 1), (0, 5 ** 0.25, -5 ** 0.25, 1j * 5 ** 0.25, -1j * 5 ** 0.25)),
])
def test_all_roots(coeffs, expected):
    assert _same_multiset(all_roots(ComplexPoly.from_coeffs(coeffs)), expected)


def test_all_roots_rebuilds_random_polynomials():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        degree = int(rng.integers(1, 9))
        radius = np.sqrt(rng.uniform(0, 1, degree))
        lower = radius * np.exp(2j * np.pi * rng.uniform(0, 1, degree))
        p = ComplexPoly.from_coeffs(list(lower) + [1])
        rebuilt = ComplexPoly.from_roots(all_roots(p))
        error = np.max(np.abs(np.array(rebuilt.coeffs) - p.array))
        assert error <= 1e-8 * np.max(np.abs(p.array))


def test_all_roots_normalizes_leading_coefficient():
    assert _same_multiset(all_roots(ComplexPoly.from_coeffs((-4j, 0, 4j))), (1, -1))


def test_all_roots_is_deterministic():
    p = ComplexPoly.from_coeffs((1 + 2j, -3, 0.5j, 0, 2, 1))
    np.testing.assert_array_equal(all_roots(p), all_roots(p))


def test_all_roots_multiple_root():
    roots = all_roots(ComplexPoly.from_roots((1, 1, -2)))
    assert _same_multiset(roots, (1, 1, -2), tol=1e-5)


def test_all_roots_errors():
    with pytest.raises(ValueError):
        all_roots(ComplexPoly.from_coeffs((3,)))
    with pytest.raises(NonConvergence) as e:
        all_roots(ComplexPoly.from_coeffs((1, -5, 0, 0, 0, 1)), max_iterations=1)
    assert e.value.error_name == 'NonConvergence'


def test_min_separation():
    assert min_separation((0, 1)) == 1
    assert min_separation((0, 3 ** 0.5, -3 ** 0.5)) == pytest.approx(3 ** 0.5)
    assert min_separation((1, 1)) == 0
    with pytest.raises(ValueError):
        min_separation((1,))
