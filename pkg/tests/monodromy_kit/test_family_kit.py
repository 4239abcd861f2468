import cmath
import logging

import numpy as np
import pytest

from monodromy_kit.family_kit import (
    DegenerateLeadingCoeff, InterpolationIllConditioned, PolyFamily, SingularPoint, at_parameter, branch_points,
    discriminant_in_a, format_family, implicit_velocity, multiple_root_residual, parse_family, quartic_alpha_check,
)
from monodromy_kit.poly_kit import ComplexPoly, all_roots, min_separation

OMEGA = cmath.exp(2j * cmath.pi / 3)
GOLDEN = (5 ** 0.5 - 1) / 2


def assert_points(actual, expected, tol=1e-8):
    assert len(actual) == len(expected), f"{actual} != {expected}"
    for x, y in zip(actual, expected):
        assert abs(x - y) <= tol, f"{actual} != {expected}"


class TestAtParameter:

    def test_specializes_coefficients(self):
        assert at_parameter(parse_family("z^3 - 3*z + a"), 0).coeffs == (0, -3, 0, 1)
        assert at_parameter(parse_family("z^4 - a"), 1).coeffs == (-1, 0, 0, 0, 1)
        assert at_parameter(parse_family("z^4 + 2*(1 - 2*a)*z^2 + 1"), 0).coeffs == (1, 0, 2, 0, 1)

    def test_degree_drop_is_an_error(self):
        f = parse_family("a*z^2 + z + 1")
        with pytest.raises(DegenerateLeadingCoeff):
            at_parameter(f, 0)


class TestDiscriminant:

    def test_square_root_family(self):
        disc = discriminant_in_a(parse_family("z^2 - a"))
        assert_points(all_roots(disc), [0])

    def test_quadratic(self):
        assert_points(all_roots(discriminant_in_a(parse_family("z^2 - 2*z + a"))), [1])

    def test_cubic_is_proportional_to_a2_minus_4(self):
        disc = discriminant_in_a(parse_family("z^3 - 3*z + a"))
        assert disc.degree == 2
        c0, c1, c2 = disc.coeffs
        assert abs(c0 / c2 + 4) <= 1e-8
        assert abs(c1 / c2) <= 1e-8

    def test_needs_degree_two(self):
        with pytest.raises(ValueError):
            discriminant_in_a(parse_family("z - a"))

    @pytest.mark.parametrize('family, leading', [
        ("(z - 4)^4 - a", -256),
        ("(z - 3)^3 - a", 27),
        ("(z - 100)^2 - a", -4),
    ])
    def test_roots_far_from_the_origin(self, family, leading):
        f = parse_family(family)
        disc = discriminant_in_a(f)
        padded = np.zeros(f.n * 2, dtype=complex)
        padded[:len(disc.coeffs)] = disc.coeffs
        expected = np.zeros_like(padded)
        expected[f.n - 1] = leading
        np.testing.assert_allclose(padded, expected, atol=1e-8 * abs(leading))

    def test_vanishes_identically(self):
        with pytest.raises(InterpolationIllConditioned):
            discriminant_in_a(parse_family("(z - a)^2*(z + 1)"))


class TestBranchPoints:

    @pytest.mark.parametrize('family, expected', [
        ("z^2 - 2*z + a", [1]),
        ("z^3 - 3*z + a", [-2, 2]),
        ("z^5 - 5*z + a", [-4, -4j, 4j, 4]),
        ("z^4 - 4*z + a", [3 * OMEGA ** 2, 3 * OMEGA, 3]),
        ("z^4 + 2*(1 - 2*a)*z^2 + 1", [0, 1]),
    ])
    def test_known_families(self, family, expected):
        assert_points(branch_points(parse_family(family)).points, expected)

    @pytest.mark.parametrize('n', [2, 3, 4])
    def test_power_family_branches_only_at_zero(self, n):
        found = branch_points(parse_family(f"z^{n} - a"))
        assert_points(found.points, [0])
        assert found.excluded == ()

    def test_points_are_multiple_roots(self):
        f = parse_family("z^5 - 5*z + a")
        for b in branch_points(f).points:
            assert min_separation(all_roots(at_parameter(f, b))) < 1e-4
        regular = 0.5 * (1 + 1j) / abs(1 + 1j) + 4
        assert min_separation(all_roots(at_parameter(f, regular))) > 1e-4

    def test_triple_root_collisions(self):
        # a = 1 gives (z^3 - 1)^3; at a^2 + a = 1 the root z = 0 is triple
        f = parse_family("(z^3 - a)^3 - a*(a - 1)")
        found = branch_points(f)
        assert_points(found.points, [-1 - GOLDEN, 0, GOLDEN, 1], tol=1e-7)
        for b in found.points:
            assert multiple_root_residual(at_parameter(f, b)) <= 1e-6

    @pytest.mark.parametrize('family, expected', [
        ("(z - 4)^4 - a", [0]),
        ("((z - 3)^3 - a)*((z - 4)^3 - a)", [-1j * 3 ** 0.5 / 9, 0, 1j * 3 ** 0.5 / 9]),
    ])
    def test_roots_far_from_the_origin(self, family, expected):
        assert_points(branch_points(parse_family(family)).points, expected, tol=1e-7)

    def test_vanishing_leading_coefficient(self):
        found = branch_points(parse_family("(a - 1)*z^2 + z + a"))
        assert_points(found.points, [(1 - 2 ** 0.5) / 2, (1 + 2 ** 0.5) / 2])
        assert_points(found.excluded, [1])

    def test_invariant_under_scaling(self):
        f = parse_family("z^4 - 4*z + a")
        assert_points(branch_points(f.scaled(2 - 3j)).points, branch_points(f).points)

    def test_cleared_denominator_is_excluded(self):
        found = branch_points(parse_family("z^2 - 1/a"))
        assert found.points == ()
        assert_points(found.excluded, [0])

    def test_residual_is_small(self):
        assert branch_points(parse_family("z^3 - 3*z + a")).residual <= 1e-8


class TestImplicitVelocity:

    @pytest.mark.parametrize('family, a, z, expected', [
        ("z^2 - a", 1, 1, 0.5),
        ("z^3 - 3*z + a", 0, 0, 1 / 3),
        ("z^3 - 3*z + a", 0, 3 ** 0.5, -1 / 6),
    ])
    def test_values(self, family, a, z, expected):
        assert implicit_velocity(parse_family(family), a, z) == pytest.approx(expected)

    def test_vectorized(self):
        f = parse_family("z^3 - 3*z + a")
        np.testing.assert_allclose(implicit_velocity(f, 0, np.array([0, 3 ** 0.5])), [1 / 3, -1 / 6])

    def test_singular_at_double_root(self):
        with pytest.raises(SingularPoint):
            implicit_velocity(parse_family("z^3 - 3*z + a"), 2, 1)


class TestLiteral:

    @pytest.mark.parametrize('text', [
        "z^5 - 5*z + a",
        "z^4 + 2*(1 - 2*a)*z^2 + 1",
        "(z^3 - a)^3 - a*(a - 1)",
        "z^3 - (a^2 + 1)",
        "i*z^2 + (1/2)*z - a",
    ])
    def test_round_trip(self, text):
        f = parse_family(text)
        assert parse_family(format_family(f)) == f

    def test_rows(self):
        assert parse_family("z^2 - 2*z + a") == PolyFamily.from_rows([[0, 1], [-2], [1]])
        assert parse_family("(z^3 - a)^3 - a*(a - 1)").n == 9

    def test_denominator_in_a_is_cleared(self):
        assert parse_family("z^3 - 1/a") == parse_family("a*z^3 - 1")

    @pytest.mark.parametrize('text', ["z^3 +", "z^2 - b", "1/z + a", "a + 1"])
    def test_rejects(self, text):
        with pytest.raises(ValueError):
            parse_family(text)


def test_quartic_alpha_check_logs_the_discrepancy(caplog):
    with caplog.at_level(logging.WARNING, logger='monodromy_kit.family_kit'):
        report = quartic_alpha_check()
    assert not report['quoted_is_branch_point']
    assert report['corrected_is_branch_point']
    assert 'alpha' in caplog.text


class TestMultipleRootResidual:

    def test_triple_root(self):
        assert multiple_root_residual(ComplexPoly.from_roots([1, 1, 1, -2])) <= 1e-6

    def test_simple_roots(self):
        assert multiple_root_residual(ComplexPoly.from_roots([0, 1, 2])) == pytest.approx(0.25)

    def test_does_not_depend_on_position(self):
        near = multiple_root_residual(ComplexPoly.from_roots([-0.5, 0, 0.5]))
        far = multiple_root_residual(ComplexPoly.from_roots([100, 100.5, 101]))
        assert far == pytest.approx(near, rel=1e-6)
