"""
This module provides one-parameter polynomial families p_a(z) and their branch points.

A family is a polynomial in z whose coefficients are polynomials in the parameter a.
Branch points (values of a where p_a has a multiple root) are located through the
discriminant D(a) = Res_z(p_a, dp_a/dz), computed numerically by evaluating Sylvester
determinants on scaled roots of unity and interpolating with an FFT.

Key components:
- PolyFamily: the family, with `at_parameter` specializing it to a ComplexPoly.
- discriminant_in_a / branch_points: the discriminant and its verified roots.
- multiple_root_residual: how close p_a is to having a multiple root, at a given a.
- implicit_velocity: dz/da of a simple root, the predictor used by the tracker.
- parse_family / format_family: the ``z^5 - 5*z + a`` literal syntax.
"""

import cmath
import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.polynomial import Polynomial
import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from .lab_error import MonodromyLabError
from .poly_kit import ComplexPoly, all_roots, derivative, evaluate

_log = logging.getLogger(__name__)

CLUSTER_TOL = 1e-7
# Relative |dp/dz| at a computed root below which the root counts as multiple.
MULTIPLE_ROOT_TOL = math.sqrt(CLUSTER_TOL)
# Relative size below which a leading coefficient counts as vanished.
LEADING_COEFF_TOL = 1e-14
SINGULAR_TOL = 1e-12
# Interpolated discriminant coefficients below this fraction of the largest are noise.
DISCRIMINANT_CLEAN_TOL = 1e-12
# Keeps the interpolation nodes off the real axis, where integer families put their special points.
NODE_ANGLE = 0.4

Z, A = sympy.symbols('z a')
_TRANSFORMATIONS = standard_transformations + (convert_xor,)


class DegenerateLeadingCoeff(MonodromyLabError):
    pass


class InterpolationIllConditioned(MonodromyLabError):
    pass


class SingularPoint(MonodromyLabError):
    pass


@dataclass(frozen=True)
class PolyFamily:
    """
    Polynomial in z whose z-coefficients are polynomials in a.

    Attributes:
        coeffs_in_a (tuple[ComplexPoly, ...]): entry k is the coefficient of z^k, as a polynomial in a.
    """
    coeffs_in_a: tuple[ComplexPoly, ...]

    def __post_init__(self):
        if len(self.coeffs_in_a) < 2:
            raise ValueError("A family needs degree >= 1 in z")
        if self.coeffs_in_a[-1].is_zero:
            raise ValueError("The leading z-coefficient is identically zero")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[complex]]) -> 'PolyFamily':
        """Build from nested coefficient lists: rows[k][j] is the coefficient of z^k a^j."""
        return cls(tuple(ComplexPoly.from_coeffs(row) for row in rows))

    @property
    def n(self) -> int:
        return len(self.coeffs_in_a) - 1

    @property
    def degree_in_a(self) -> int:
        return max(0, max(c.degree for c in self.coeffs_in_a))

    def scaled(self, factor: complex) -> 'PolyFamily':
        return PolyFamily(tuple(ComplexPoly.from_coeffs(factor * c.array) for c in self.coeffs_in_a))

    def __str__(self):
        return format_family(self)


class BranchSet(NamedTuple):
    """
    Verified branch points of a family.

    Attributes:
        points (tuple[complex, ...]): values of a where p_a has a multiple root, sorted by (re, im).
        residual (float): largest relative |D(b)| over the reported points.
        excluded (tuple[complex, ...]): values of a where the leading z-coefficient vanishes.
    """
    points: tuple[complex, ...]
    residual: float
    excluded: tuple[complex, ...] = ()


def at_parameter(f: PolyFamily, a: complex) -> ComplexPoly:
    """
    Specialize the family at `a`.

    Raises:
        DegenerateLeadingCoeff: if the leading z-coefficient vanishes at `a`
        (the degree of a family is fixed, so this is never a silent reduction).
    """
    values = tuple(complex(evaluate(c, a)) for c in f.coeffs_in_a)
    scale = max(abs(v) for v in values)
    if abs(values[-1]) <= LEADING_COEFF_TOL * max(1.0, scale):
        raise DegenerateLeadingCoeff("Leading coefficient vanishes", a=complex(a))
    return ComplexPoly(values)


def partial_z(f: PolyFamily, a: complex, z):
    return evaluate(derivative(at_parameter(f, a)), z)


def partial_a(f: PolyFamily, a: complex, z):
    result = 0j
    for c in reversed(f.coeffs_in_a):
        result = result * z + evaluate(derivative(c), a)
    return result


def implicit_velocity(f: PolyFamily, a: complex, z):
    """
    Velocity dz/da = -(dp/da)/(dp/dz) of a root z of p_a (vectorized over `z`).

    Raises:
        SingularPoint: if dp/dz vanishes (|dp/dz| <= 1e-12) at any of the given points.
    """
    dz = np.asarray(partial_z(f, a, z))
    if np.any(np.abs(dz) <= SINGULAR_TOL):
        raise SingularPoint("dp/dz vanishes", a=complex(a))
    velocity = -np.asarray(partial_a(f, a, z)) / dz
    return complex(velocity) if velocity.ndim == 0 else velocity


def _centered_monic(p: ComplexPoly) -> tuple[ComplexPoly, float]:
    """
    Monic q(w) = p(s + lam*w) / (c_n lam^n), with s the mean of the roots of p and lam a
    power of two near their spread, so the roots of q lie in about the unit disk.

    Returns:
        tuple[ComplexPoly, float]: q and lam.
    """
    n = p.degree
    monic = p.array / p.leading
    shift = -monic[n - 1] / n
    centered = Polynomial(monic)(Polynomial([shift, 1.0])).coef
    bound = max(abs(centered[k]) ** (1 / (n - k)) for k in range(n))
    lam = 2.0 ** round(math.log2(bound)) if bound > 0 else 1.0
    return ComplexPoly.from_coeffs(centered * lam ** (np.arange(n + 1) - n)), lam


def multiple_root_residual(p: ComplexPoly) -> float:
    """
    Smallest relative |q'(w)| over the roots w of the centered monic form q of `p`.

    It is of the order of the closest root pair when p has simple roots only, and it
    drops to round-off level at a k-fold root even though the root finder resolves
    such a root only to about eps^(1/k).
    """
    q, _ = _centered_monic(p)
    roots = all_roots(q)
    dq = derivative(q)
    scale = sum(abs(c) * np.maximum(1.0, np.abs(roots)) ** k for k, c in enumerate(dq.coeffs))
    return float(np.min(np.abs(evaluate(dq, roots)) / scale))


def _sylvester_resultant(p_high_first: np.ndarray) -> complex:
    """Res(p, p') from highest-first coefficients of p."""
    n = len(p_high_first) - 1
    q_high_first = np.polyder(p_high_first)
    m = n - 1
    size = n + m
    sylvester = np.zeros((size, size), dtype=complex)
    for i in range(m):
        sylvester[i, i:i + n + 1] = p_high_first
    for i in range(n):
        sylvester[m + i, i:i + m + 1] = q_high_first
    return complex(np.linalg.det(sylvester))


def discriminant_in_a(f: PolyFamily, radius: float = 1.0) -> ComplexPoly:
    """
    Polynomial D(a) vanishing exactly where p_a and dp_a/dz share a root.

    D is the Sylvester resultant of p_a and its z-derivative, evaluated at the d + 1
    nodes radius * exp(i (2 pi j / (d + 1) + NODE_ANGLE)) with d = deg_a * (2n - 1), then
    interpolated by an inverse DFT. At each node the resultant is taken of the centered
    monic form q of p_a and scaled back with Res(p, p') = c_n^(2n-1) lam^(n(n-1)) Res(q, q'),
    which keeps the Sylvester matrix well scaled when the roots sit far from the origin.
    Coefficients below DISCRIMINANT_CLEAN_TOL of the largest one are zeroed.

    Raises:
        ValueError: if n < 2.
        InterpolationIllConditioned: if the leading coefficient vanishes at a node, the
        samples are not finite, or p_a has a multiple root at every node (D vanishes
        identically).
    """
    n = f.n
    if n < 2:
        raise ValueError("The discriminant needs degree >= 2 in z")
    d = f.degree_in_a * (2 * n - 1)
    rotated = radius * cmath.exp(1j * NODE_ANGLE)
    nodes = rotated * np.exp(2j * np.pi * np.arange(d + 1) / (d + 1))

    values = np.empty(d + 1, dtype=complex)
    samples = []
    for j, node in enumerate(nodes):
        try:
            p = at_parameter(f, node)
        except DegenerateLeadingCoeff as e:
            raise InterpolationIllConditioned("Leading coefficient vanishes at a sample node", radius=radius) from e
        q, lam = _centered_monic(p)
        values[j] = p.leading ** (2 * n - 1) * lam ** (n * (n - 1)) * _sylvester_resultant(q.array[::-1])
        samples.append(p)

    if not np.all(np.isfinite(values)):
        raise InterpolationIllConditioned("Non-finite resultant samples", radius=radius)
    if all(multiple_root_residual(p) <= MULTIPLE_ROOT_TOL for p in samples):
        raise InterpolationIllConditioned("Discriminant vanishes identically", samples=d + 1)
    coeffs = np.fft.fft(values) / (d + 1) / rotated ** np.arange(d + 1)
    scale = float(np.max(np.abs(coeffs)))
    coeffs[np.abs(coeffs) <= DISCRIMINANT_CLEAN_TOL * scale] = 0
    return ComplexPoly.from_coeffs(coeffs)


def _multiple_root_clusters(points: np.ndarray, tol: float) -> list[tuple[complex, int]]:
    """
    Group computed roots into multiple roots, each reduced to (centroid, multiplicity).

    Round-off smears an m-fold root into m points about tol^(1/m) apart (relative), so
    each remaining point is grouped with the largest set of its nearest neighbours whose
    distance to their common centroid stays within that radius.
    """
    remaining = [complex(x) for x in points]
    clusters = []
    while remaining:
        seed = remaining[0]
        nearest = sorted(remaining, key=lambda x: abs(x - seed))
        group = nearest[:1]
        for m in range(len(nearest), 1, -1):
            center = sum(nearest[:m]) / m
            if max(abs(x - center) for x in nearest[:m]) <= tol ** (1 / m) * max(1.0, abs(center)):
                group = nearest[:m]
                break
        for x in group:
            remaining.remove(x)
        clusters.append((sum(group) / len(group), len(group)))
    return clusters


def _polish_multiple_root(
        disc: ComplexPoly, b: complex, multiplicity: int, tol: float, max_iterations: int = 20
) -> complex:
    """
    Newton on the (m-1)-th derivative of D, where an m-fold root of D is simple.

    The centroid is kept if Newton leaves the cluster radius.
    """
    start = b
    q = disc
    for _ in range(multiplicity - 1):
        q = derivative(q)
    dq = derivative(q)
    for _ in range(max_iterations):
        slope = evaluate(dq, b)
        if slope == 0:
            break
        step = evaluate(q, b) / slope
        b -= step
        if abs(step) <= 1e-15 * max(1.0, abs(b)):
            break
    if not abs(b - start) <= tol ** (1 / multiplicity) * max(1.0, abs(start)):
        return complex(start)
    return complex(b)


def canonical_key(z: complex) -> tuple[float, float]:
    """Sort key ordering complex numbers by (re, im) after rounding to 1e-9."""
    return round(z.real, 9) + 0.0, round(z.imag, 9) + 0.0


def branch_points(f: PolyFamily, tol: float = CLUSTER_TOL) -> BranchSet:
    """
    Values of a where p_a has a multiple root.

    Roots of the discriminant are grouped into multiple roots: an m-fold root of D is
    smeared by round-off to a ring of relative radius about eps^(1/m), so a group of m
    is accepted within tol^(1/m). Each group is replaced by its centroid, then polished
    by Newton on D^(m-1). A point is reported only if p_a there has a multiple root,
    i.e. `multiple_root_residual` is at most sqrt(tol); points where the leading
    coefficient vanishes go to `excluded`. Reported points are pairwise farther apart
    than `tol`.

    Returns:
        BranchSet: verified points sorted by (re, im).
    """
    disc = discriminant_in_a(f)
    if disc.degree < 1:
        return BranchSet((), 0.0)
    candidates = [
        _polish_multiple_root(disc, center, size, tol)
        for center, size in _multiple_root_clusters(all_roots(disc), tol)
    ]

    points: list[complex] = []
    excluded: list[complex] = []
    abs_disc = ComplexPoly(tuple(abs(c) for c in disc.coeffs))
    residual = 0.0
    for b in candidates:
        if any(abs(b - known) <= tol * max(1.0, abs(b)) for known in points + excluded):
            continue
        try:
            p_b = at_parameter(f, b)
        except DegenerateLeadingCoeff:
            excluded.append(b)
            continue
        if multiple_root_residual(p_b) > math.sqrt(tol):
            _log.warning(f"[branch_points] dropped unverified discriminant root {b:.12g}")
            continue
        points.append(b)
        residual = max(residual, abs(evaluate(disc, b)) / max(abs(evaluate(abs_disc, abs(b))), 1e-300))

    points.sort(key=canonical_key)
    excluded.sort(key=canonical_key)
    _log.info(f"[branch_points] {len(points)} branch points, {len(excluded)} excluded, residual {residual:.3g}")
    return BranchSet(tuple(points), residual, tuple(excluded))


def parse_family(text: str) -> PolyFamily:
    """
    Parse a family literal such as ``"z^5 - 5*z + a"``.

    Integers, rationals, ``i``, ``+``, ``-``, ``*``, ``/``, ``^`` (or ``**``) over z and a
    are accepted. Denominators depending only on a are cleared, so ``z^3 - 1/a`` becomes
    ``a*z^3 - 1`` and a = 0 turns into an excluded point of the family.

    Raises:
        ValueError: on syntax errors, unknown symbols, or denominators involving z.
    """
    try:
        expr = parse_expr(
            text, local_dict={'z': Z, 'a': A, 'i': sympy.I, 'I': sympy.I}, transformations=_TRANSFORMATIONS
        )
    except Exception as e:  # sympy's tokenizer and evaluator raise assorted exception types
        raise ValueError(f"Invalid family literal '{text}': {e}") from e
    return family_from_expr(expr)


def family_from_expr(expr) -> PolyFamily:
    """Family from a sympy expression in the symbols `Z` and `A`, clearing denominators in a."""
    expr = sympy.sympify(expr)
    unknown = expr.free_symbols - {Z, A}
    if unknown:
        raise ValueError(f"Unknown symbols in family '{expr}': {sorted(map(str, unknown))}")
    numerator, denominator = sympy.fraction(sympy.together(expr))
    if Z in denominator.free_symbols:
        raise ValueError(f"Denominator of '{expr}' depends on z")
    poly_z = sympy.Poly(sympy.expand(numerator), Z)
    if poly_z.degree() < 1:
        raise ValueError(f"Family '{expr}' has degree < 1 in z")
    rows = []
    for k in range(poly_z.degree() + 1):
        coeff = poly_z.coeff_monomial(Z ** k)
        rows.append([complex(c) for c in reversed(sympy.Poly(coeff, A).all_coeffs())])
    return PolyFamily.from_rows(rows)


def _exact(x: float) -> sympy.Rational:
    short = sympy.Rational(x).limit_denominator(10 ** 6)
    return short if float(short) == x else sympy.Rational(x)


def to_sympy_number(c: complex) -> sympy.Expr:
    return _exact(c.real) + sympy.I * _exact(c.imag)


def format_family(f: PolyFamily) -> str:
    """Render a family literal that `parse_family` maps back to an equal family."""
    expr = sympy.Integer(0)
    for k, coeff in enumerate(f.coeffs_in_a):
        in_a = sum((to_sympy_number(c) * A ** j for j, c in enumerate(coeff.coeffs)), sympy.Integer(0))
        expr += in_a * Z ** k
    return str(sympy.expand(expr)).replace('**', '^')


def quartic_alpha_check() -> dict[str, object]:
    """
    Check the two readings of the branch points of z^4 - 4z + a.

    Multiple roots satisfy 4z^3 - 4 = 0, so z^3 = 1 and a = 4z - z^4 = 3z: the branch
    points are 3, 3w, 3w^2 with w = (-1 + i*sqrt(3))/2. A commonly quoted form writes
    them as 3, 3α, 3α² with α = (1 + i*sqrt(3))/2, which is a sixth root of unity and
    puts 3α off the branch set. The discrepancy is logged, not reconciled.
    """
    f = parse_family("z^4 - 4*z + a")
    found = branch_points(f).points
    quoted = 3 * (1 + 1j * math.sqrt(3)) / 2
    corrected = 3 * (-1 + 1j * math.sqrt(3)) / 2

    def is_branch(value: complex) -> bool:
        return any(abs(value - b) <= 1e-8 for b in found)

    report = {
        'branch_points': found,
        'quoted_alpha_point': quoted,
        'quoted_is_branch_point': is_branch(quoted),
        'corrected_alpha_point': corrected,
        'corrected_is_branch_point': is_branch(corrected),
    }
    if not report['quoted_is_branch_point']:
        _log.warning(
            "[quartic_alpha_check] 3*(1+i*sqrt(3))/2 is not a branch point of z^4-4z+a; "
            "alpha must be the primitive cube root of unity (-1+i*sqrt(3))/2"
        )
    return report
