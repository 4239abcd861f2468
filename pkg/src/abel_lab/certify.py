"""
This module assembles the unsolvability pipeline: lasso generators around every
branch point, the monodromy group they generate, its iterated commutator closures,
and a verdict on how many nested root extractions a radical formula would need.

A radical formula with s root levels forces the s-fold commutator closure of the
monodromy group to be trivial. So a closure that stabilizes at a nontrivial group
rules out every formula, and a closure that first becomes trivial at depth d only
gives the lower bound d.
"""

import logging
import math
from collections.abc import Sequence
from typing import NamedTuple

import sympy

from monodromy_kit.family_kit import (
    CLUSTER_TOL, A, Z, PolyFamily, at_parameter, branch_points, family_from_expr, format_family,
)
from monodromy_kit.lab_error import MonodromyLabError
from monodromy_kit.number_kit import format_complex
from monodromy_kit.path_spec import Lasso, LineSegment, ParamPath, circle, compile_lasso, default_lasso_radius
from monodromy_kit.poly_kit import all_roots, min_separation

from .perm_group import (
    CommutatorCertificate, PermSet, Permutation, commutator_product_certificate, derived_series,
    format_cycles, generate, group_tag, verify_commutator_certificate,
)
from .tracker import TrackOptions, canonical_numbering, monodromy_perm

_log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
MAX_DEPTH = 10
MAX_PRODUCT_DEGREE = 9


class BaseIsBranchPoint(MonodromyLabError):
    pass


class LassoObstructed(MonodromyLabError):
    pass


class LassoPermutation(NamedTuple):
    """
    A lasso generator and the permutation it induces.

    Attributes:
        target (complex): the encircled point.
        radius (float): circle radius.
        perm (Permutation): the path permutation in the report's numbering.
        kind (str): 'branch' for a branch point, 'pole' for a point where the degree drops.
    """
    target: complex
    radius: float
    perm: Permutation
    kind: str = 'branch'


class MonodromyReport(NamedTuple):
    """
    Monodromy generators of a family at a base point.

    Attributes:
        family (PolyFamily): the family.
        base (complex): the base point.
        branch_points (tuple[complex, ...]): verified branch points.
        numbering (tuple[complex, ...]): the numbered roots at the base point.
        lassos (tuple[LassoPermutation, ...]): one generator per branch point and pole.
        group (PermSet): the group generated by the lasso permutations.
    """
    family: PolyFamily
    base: complex
    branch_points: tuple[complex, ...]
    numbering: tuple[complex, ...]
    lassos: tuple[LassoPermutation, ...]
    group: PermSet

    @property
    def group_order(self) -> int:
        return self.group.order

    @property
    def group_tag(self) -> str:
        return group_tag(self.group)


class Verdict(NamedTuple):
    """
    Conclusion of a certificate.

    Attributes:
        kind (str): 'Unsolvable-at-all-depths', 'MinDepthLowerBound' or 'NoObstruction'.
        depth (int | None): the lower bound for 'MinDepthLowerBound'.
    """
    kind: str
    depth: int | None = None

    @classmethod
    def unsolvable(cls) -> 'Verdict':
        return cls('Unsolvable-at-all-depths')

    @classmethod
    def lower_bound(cls, depth: int) -> 'Verdict':
        return cls('MinDepthLowerBound', depth)

    @classmethod
    def no_obstruction(cls) -> 'Verdict':
        return cls('NoObstruction')

    def __str__(self):
        return f"{self.kind}({self.depth})" if self.depth is not None else self.kind


class AbelCertificate(NamedTuple):
    """
    Closure orders of the monodromy group and the resulting verdict.

    Attributes:
        report (MonodromyReport): the monodromy generators used.
        closure_orders (tuple[int, ...]): orders of G, G', G'', ... (non-increasing).
        verdict (Verdict): consistent with `closure_orders`.
        stable_group_certificate (CommutatorCertificate | None): for a nontrivial stable
            closure, every element of it as a product of commutators of its elements.
        certificate_verified (bool | None): machine check of `stable_group_certificate`.
    """
    report: MonodromyReport
    closure_orders: tuple[int, ...]
    verdict: Verdict
    stable_group_certificate: CommutatorCertificate | None = None
    certificate_verified: bool | None = None

    @property
    def family(self) -> PolyFamily:
        return self.report.family


def _check_base(f: PolyFamily, base: complex, obstacles: Sequence[complex], opts: TrackOptions):
    for b in obstacles:
        if abs(base - b) <= math.sqrt(CLUSTER_TOL) * max(1.0, abs(b)):
            raise BaseIsBranchPoint("Base point coincides with a branch point", base=base, branch_point=b)
    roots = all_roots(at_parameter(f, base))
    if f.n > 1 and min_separation(roots) <= 10 * opts.newton_tol:
        raise BaseIsBranchPoint("Base point has a multiple root", base=base)


def _lasso_for(base: complex, target: complex, obstacles: Sequence[complex]) -> tuple[ParamPath, float]:
    others = [b for b in obstacles if b != target]
    radius = default_lasso_radius(base, target, others)
    approach = LineSegment(base, target)
    for other in others:
        if approach.distance_to(other) <= radius:
            raise LassoObstructed(
                "Another branch point lies on the way to the lasso target; choose another base",
                base=base, target=target, obstacle=other,
            )
    return compile_lasso(Lasso(base, target, radius, 1)), radius


def monodromy_report(f: PolyFamily, base: complex = 0j, opts: TrackOptions | None = None) -> MonodromyReport:
    """
    Track one counterclockwise lasso from `base` around every branch point (and every
    point where the leading coefficient vanishes) and generate the monodromy group.

    Raises:
        BaseIsBranchPoint: if `base` is a branch point.
        DegenerateLeadingCoeff: if the degree drops at `base`.
        LassoObstructed: if a straight approach passes another branch point.
    """
    opts = opts or TrackOptions.default()
    base = complex(base)
    if f.n >= 2:
        found = branch_points(f)
        points, poles = found.points, found.excluded
    else:
        points, poles = (), ()
    obstacles = list(points) + list(poles)
    _check_base(f, base, obstacles, opts)
    numbering = canonical_numbering(all_roots(at_parameter(f, base)))

    lassos = []
    for kind, targets in (('branch', points), ('pole', poles)):
        for target in targets:
            loop, radius = _lasso_for(base, target, obstacles)
            perm = monodromy_perm(f, loop, numbering, opts)
            _log.info(f"[monodromy_report] lasso around {format_complex(target)}: {format_cycles(perm)}")
            lassos.append(LassoPermutation(complex(target), radius, perm, kind))

    generators = [lp.perm for lp in lassos] or [Permutation.identity(f.n)]
    group = generate(PermSet.of(generators, f.n))
    _log.info(f"[monodromy_report] group order {group.order} ({group_tag(group)})")
    return MonodromyReport(f, base, tuple(points), numbering, tuple(lassos), group)


def certificate_from_report(report: MonodromyReport, max_depth: int = MAX_DEPTH) -> AbelCertificate:
    """Iterate commutator closures of the report's group and decide the verdict."""
    series = derived_series(report.group, max_depth)
    orders = tuple(g.order for g in series)
    stable = None
    verified = None
    if orders[-1] == 1:
        depth = len(orders) - 1
        verdict = Verdict.no_obstruction() if depth == 0 else Verdict.lower_bound(depth)
    elif len(orders) >= 2 and orders[-1] == orders[-2]:
        verdict = Verdict.unsolvable()
        stable = commutator_product_certificate(series[-1])
        verified = len(stable) == series[-1].order and verify_commutator_certificate(series[-1], stable)
    else:
        verdict = Verdict.lower_bound(max_depth + 1)
    _log.info(f"[abel_certificate] closure orders {list(orders)}: {verdict}")
    return AbelCertificate(report, orders, verdict, stable, verified)


def abel_certificate(
    f: PolyFamily, max_depth: int = MAX_DEPTH, base: complex = 0j, opts: TrackOptions | None = None
) -> AbelCertificate:
    """
    Monodromy report at `base`, then the commutator-closure verdict.

    - closure reaches the trivial group at depth d: MinDepthLowerBound(d), any radical
      formula needs at least d nested root levels (NoObstruction when d = 0);
    - two equal consecutive nontrivial orders: Unsolvable-at-all-depths;
    - neither within `max_depth` steps: MinDepthLowerBound(max_depth + 1).
    """
    return certificate_from_report(monodromy_report(f, base, opts), max_depth)


def _product_centers(cycle_type: Sequence[int]) -> list[int]:
    used: set[int] = set()
    centers = []
    for length in cycle_type:
        center = length
        while center in used:
            center += 1
        used.add(center)
        centers.append(center)
    return centers


def _check_cycle_type(cycle_type: Sequence[int]):
    if not cycle_type or any(length < 1 for length in cycle_type):
        raise ValueError(f"Cycle lengths must be positive (got {tuple(cycle_type)})")
    if sum(cycle_type) > MAX_PRODUCT_DEGREE:
        raise ValueError(f"Total degree {sum(cycle_type)} exceeds {MAX_PRODUCT_DEGREE}")


def product_family(cycle_type: Sequence[int]) -> PolyFamily:
    """
    The family prod_s ((z - c_s)^(n_s) - a), whose small loop around a = 0 rotates the
    n_s roots near c_s cyclically.

    c_s = n_s, except that repeated lengths move to the next unused positive integer so
    the factors keep distinct roots.

    Raises:
        ValueError: on lengths below 1 or a total degree above 9.
    """
    _check_cycle_type(cycle_type)
    expr = sympy.Integer(1)
    for length, center in zip(cycle_type, _product_centers(cycle_type)):
        expr *= (Z - center) ** length - A
    return family_from_expr(expr)


def product_family_loop(cycle_type: Sequence[int]) -> ParamPath:
    """
    Counterclockwise circle around a = 0 based at a point of the circle itself.

    The radius 2^-(max n_s + 1) keeps every other branch point of `product_family` outside,
    since two factors sharing a root need |a| >= 2^-(max n_s).
    """
    _check_cycle_type(cycle_type)
    return circle(0j, 2.0 ** -(max(cycle_type) + 1))


def report_to_json(report: MonodromyReport) -> dict:
    return {
        'schema_version': SCHEMA_VERSION,
        'family': format_family(report.family),
        'base': format_complex(report.base),
        'branch_points': [format_complex(b) for b in report.branch_points],
        'numbering': [format_complex(z) for z in report.numbering],
        'lassos': [
            {
                'target': format_complex(lp.target),
                'kind': lp.kind,
                'radius': float(f"{lp.radius:.12g}"),
                'permutation_cycles': format_cycles(lp.perm),
            }
            for lp in report.lassos
        ],
        'group_order': report.group_order,
        'group_tag': report.group_tag,
    }


def certificate_to_json(certificate: AbelCertificate) -> dict:
    result = report_to_json(certificate.report)
    result['closure_orders'] = list(certificate.closure_orders)
    result['verdict'] = str(certificate.verdict)
    if certificate.stable_group_certificate is not None:
        result['stable_group_certificate'] = {
            'elements': len(certificate.stable_group_certificate),
            'longest_product': max(len(p) for p in certificate.stable_group_certificate.values()),
            'verified': certificate.certificate_verified,
        }
    return result
