import pytest

from abel_lab.certify import (
    BaseIsBranchPoint, LassoObstructed, Verdict, abel_certificate, certificate_to_json, monodromy_report,
    product_family, product_family_loop, report_to_json,
)
from abel_lab.perm_group import commutator, cycle_type, inverse
from abel_lab.radical_formula import CUBIC_VARIANTS, RadicalFormula
from abel_lab.tracker import monodromy_perm
from monodromy_kit.family_kit import parse_family
from monodromy_kit.path_spec import Lasso, commutator_path, compile_lasso, power

QUADRATIC = parse_family("z^2 - 2*z + a")
CUBIC = parse_family("z^3 - 3*z + a")
QUARTIC = parse_family("z^4 - 4*z + a")
QUINTIC = parse_family("z^5 - 5*z + a")
PALINDROMIC_QUARTIC = parse_family("z^4 + 2*(1 - 2*a)*z^2 + 1")
NESTED_CUBE_ROOTS = parse_family("(z^3 - a)^3 - a*(a - 1)")


@pytest.fixture(scope='module')
def quintic_certificate():
    return abel_certificate(QUINTIC)


class TestMonodromyReport:

    @pytest.mark.parametrize('family, order, tag', [
        (CUBIC, 6, 'symmetric'),
        (QUARTIC, 24, 'symmetric'),
        (QUINTIC, 120, 'symmetric'),
    ])
    def test_group_orders(self, family, order, tag):
        report = monodromy_report(family)
        assert report.group_order == order
        assert report.group_tag == tag

    def test_quintic_lassos_are_transpositions(self, quintic_certificate):
        lassos = quintic_certificate.report.lassos
        assert len(lassos) == 4
        assert all(lp.kind == 'branch' for lp in lassos)
        assert all(cycle_type(lp.perm) == (2,) for lp in lassos)

    @pytest.mark.parametrize('base', [0.5j, -1 + 1j])
    def test_group_does_not_depend_on_base(self, base):
        report = monodromy_report(QUINTIC, base)
        assert report.group_order == 120
        assert all(cycle_type(lp.perm) == (2,) for lp in report.lassos)

    @pytest.mark.parametrize('family', [CUBIC, QUARTIC, QUINTIC])
    def test_closure_orders_do_not_depend_on_base(self, family):
        orders = {abel_certificate(family, base=base).closure_orders for base in (0j, 0.5j, -1 + 1j)}
        assert len(orders) == 1

    def test_palindromic_quartic(self):
        # roots are +-sqrt(a) +- sqrt(a - 1), so each lasso flips one sign
        report = monodromy_report(PALINDROMIC_QUARTIC, 0.5 + 0.5j)
        assert list(report.branch_points) == pytest.approx([0, 1], abs=1e-8)
        assert [cycle_type(lp.perm) for lp in report.lassos] == [(2, 2), (2, 2)]
        assert report.group_order == 4
        assert report.group_tag == 'other'

    def test_nested_cube_roots(self):
        report = monodromy_report(NESTED_CUBE_ROOTS, 0.3 + 1j)
        assert len(report.lassos) == 4
        assert all(not lp.perm.is_identity for lp in report.lassos)
        certificate = abel_certificate(NESTED_CUBE_ROOTS, base=0.3 + 1j)
        assert certificate.verdict.kind == 'MinDepthLowerBound'
        assert certificate.verdict.depth <= 2

    def test_commutator_of_lassos(self):
        around_two = compile_lasso(Lasso(0, 2, 0.5))
        around_minus_two = compile_lasso(Lasso(0, -2, 0.5))
        p = monodromy_perm(CUBIC, around_two)
        q = monodromy_perm(CUBIC, around_minus_two)
        both = monodromy_perm(CUBIC, commutator_path(around_two, around_minus_two))
        assert both == commutator(inverse(q), inverse(p))
        assert both == commutator(q, p)
        assert cycle_type(both) == (3,)

    def test_base_at_branch_point(self):
        with pytest.raises(BaseIsBranchPoint):
            monodromy_report(CUBIC, 2)

    def test_obstructed_lasso(self):
        with pytest.raises(LassoObstructed):
            monodromy_report(QUINTIC, -8)

    def test_pole_lasso(self):
        report = monodromy_report(parse_family("z^2 - 1/a"), 1)
        assert report.branch_points == ()
        assert [lp.kind for lp in report.lassos] == ['pole']
        assert report.group_order == 2

    def test_linear_family(self):
        report = monodromy_report(parse_family("z - a"))
        assert report.lassos == ()
        assert report.group_order == 1


class TestCertificate:

    def test_quintic_is_unsolvable(self, quintic_certificate):
        assert quintic_certificate.closure_orders == (120, 60, 60)
        assert quintic_certificate.verdict == Verdict.unsolvable()
        assert str(quintic_certificate.verdict) == 'Unsolvable-at-all-depths'
        assert len(quintic_certificate.stable_group_certificate) == 60
        assert quintic_certificate.certificate_verified

    def test_quartic_needs_three_levels(self):
        certificate = abel_certificate(QUARTIC)
        assert certificate.closure_orders == (24, 12, 4, 1)
        assert str(certificate.verdict) == 'MinDepthLowerBound(3)'
        assert certificate.stable_group_certificate is None

    def test_cubic_needs_two_levels(self):
        certificate = abel_certificate(CUBIC)
        assert certificate.closure_orders == (6, 3, 1)
        assert certificate.verdict == Verdict.lower_bound(2)
        assert certificate.stable_group_certificate is None

    def test_cubic_bound_is_met_by_the_cubic_formula(self):
        formula = RadicalFormula.parse(CUBIC_VARIANTS['corrected'])
        assert abel_certificate(CUBIC).verdict.depth <= formula.depth == 2

    def test_quadratic_needs_one_level(self):
        certificate = abel_certificate(QUADRATIC)
        assert certificate.closure_orders == (2, 1)
        assert certificate.verdict == Verdict.lower_bound(1)

    def test_max_depth_cut(self):
        certificate = abel_certificate(QUARTIC, max_depth=1)
        assert certificate.closure_orders == (24, 12)
        assert certificate.verdict == Verdict.lower_bound(2)

    def test_trivial_group(self):
        assert abel_certificate(parse_family("z - a")).verdict == Verdict.no_obstruction()


class TestProductFamilies:

    def test_single_four_cycle_twice(self):
        perm = monodromy_perm(product_family((4,)), power(product_family_loop((4,)), 2))
        assert cycle_type(perm) == (2, 2)

    def test_single_four_cycle(self):
        assert cycle_type(monodromy_perm(product_family((4,)), product_family_loop((4,)))) == (4,)

    def test_linear_factor(self):
        assert monodromy_perm(product_family((1,)), product_family_loop((1,))).is_identity

    @pytest.mark.parametrize('lengths, expected', [
        ((2, 3), (3, 2)),
        ((2, 2), (2, 2)),
        ((3, 1, 2), (3, 2)),
    ])
    def test_cycle_types(self, lengths, expected):
        perm = monodromy_perm(product_family(lengths), product_family_loop(lengths))
        assert cycle_type(perm) == expected

    @pytest.mark.parametrize('lengths, base, expected_points', [
        ((4,), 0.01, [0]),
        ((3, 3), 0.3, [-1j * 3 ** 0.5 / 9, 0, 1j * 3 ** 0.5 / 9]),
    ])
    def test_monodromy_report(self, lengths, base, expected_points):
        report = monodromy_report(product_family(lengths), base)
        assert list(report.branch_points) == pytest.approx(expected_points, abs=1e-7)
        around_zero = [lp for lp in report.lassos if abs(lp.target) <= 1e-7]
        assert len(around_zero) == 1
        assert cycle_type(around_zero[0].perm) == tuple(sorted(lengths, reverse=True))
        assert all(cycle_type(lp.perm) == (2,) for lp in report.lassos if lp not in around_zero)

    def test_monodromy_report_with_collisions_away_from_zero(self):
        # the factors share a root at three values of a besides the triple point a = 0
        report = monodromy_report(product_family((2, 3)), 5 + 5j)
        assert len(report.branch_points) == 4
        assert min(abs(b) for b in report.branch_points) <= 1e-7
        assert sorted(cycle_type(lp.perm) for lp in report.lassos) == [(2,), (2,), (2,), (3, 2)]

    def test_four_cycle_certificate(self):
        certificate = abel_certificate(product_family((4,)), base=0.01)
        assert certificate.report.group_tag == 'cyclic'
        assert certificate.closure_orders == (4, 1)
        assert certificate.verdict == Verdict.lower_bound(1)

    def test_repeated_lengths_keep_distinct_roots(self):
        assert product_family((2, 2)).n == 4

    @pytest.mark.parametrize('lengths', [(), (0,), (5, 5)])
    def test_rejects(self, lengths):
        with pytest.raises(ValueError):
            product_family(lengths)


class TestJson:

    def test_report_keys(self):
        data = report_to_json(monodromy_report(CUBIC))
        assert data['schema_version'] == 1
        assert data['base'] == '0+0i'
        assert data['branch_points'] == ['-2+0i', '2+0i']
        assert data['group_order'] == 6
        assert {lp['kind'] for lp in data['lassos']} == {'branch'}
        assert all(lp['permutation_cycles'].count(' ') == 1 for lp in data['lassos'])

    def test_certificate_keys(self, quintic_certificate):
        data = certificate_to_json(quintic_certificate)
        assert data['closure_orders'] == [120, 60, 60]
        assert data['verdict'] == 'Unsolvable-at-all-depths'
        assert data['stable_group_certificate']['elements'] == 60
        assert data['stable_group_certificate']['verified'] is True
        assert data['stable_group_certificate']['longest_product'] >= 1
