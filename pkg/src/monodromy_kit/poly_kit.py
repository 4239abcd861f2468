"""
This module provides dense univariate polynomials over the complex numbers.

It is the ground-truth oracle for the rest of the lab: everything that needs to
know "where are the roots right now" ends up calling `all_roots`.

Key components:
- ComplexPoly: an immutable coefficient tuple, index k holding the coefficient of z^k.
- evaluate / derivative: Horner evaluation and the formal derivative.
- all_roots: simultaneous (Aberth–Ehrlich) iteration returning every root at once.
- min_separation: smallest pairwise distance of a root tuple.
"""

import cmath
import logging
from collections.abc import Iterable, Sequence
from typing import NamedTuple

import numpy as np

from .lab_error import MonodromyLabError

_log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12
MAX_ITERATIONS = 500
MAX_DEGREE = 64
# Angular offset and radial spread of the initial guesses; any fixed values that break
# the symmetry of real or conjugate-symmetric inputs will do.
_GUESS_ANGLE_OFFSET = 0.4
_GUESS_RADIAL_SPREAD = 0.05


class NonConvergence(MonodromyLabError):
    pass


class ComplexPoly(NamedTuple):
    """
    Dense polynomial with complex coefficients, lowest degree first.

    The zero polynomial is the empty tuple; otherwise the last coefficient is nonzero.

    Attributes:
        coeffs (tuple[complex, ...]): coefficient of z^k at index k.
    """
    coeffs: tuple[complex, ...]

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[complex]) -> 'ComplexPoly':
        """Build a polynomial, dropping exact trailing zeros. Rejects NaN and infinity."""
        values = [complex(c) for c in coeffs]
        for c in values:
            if not cmath.isfinite(c):
                raise ValueError(f"Non-finite coefficient: {c}")
        while values and values[-1] == 0:
            values.pop()
        return cls(tuple(values))

    @classmethod
    def from_roots(cls, roots: Sequence[complex]) -> 'ComplexPoly':
        """Monic polynomial with the given roots (with multiplicity)."""
        return cls.from_coeffs(np.poly(np.asarray(roots, dtype=complex))[::-1])

    @property
    def degree(self) -> int:
        """Degree, or -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> complex:
        return self.coeffs[-1] if self.coeffs else 0j

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=complex)

    def __call__(self, z):
        return evaluate(self, z)

    def __str__(self):
        if self.is_zero:
            return '0'
        return ' + '.join(f'({c.real:.6g}{c.imag:+.6g}i)*z^{k}' for k, c in enumerate(self.coeffs) if c)


def evaluate(p: ComplexPoly, z):
    """
    Horner-scheme value of `p` at `z`. Accepts scalars or numpy arrays.

    Example:
        >>> evaluate(ComplexPoly.from_coeffs([2, -3, 0, 1]), 1)
        0j
    """
    result = 0j
    for c in reversed(p.coeffs):
        result = result * z + c
    return result


def derivative(p: ComplexPoly) -> ComplexPoly:
    """Formal derivative. A constant becomes the zero polynomial."""
    return ComplexPoly(tuple(k * c for k, c in enumerate(p.coeffs) if k))


def all_roots(p: ComplexPoly, tol: float = DEFAULT_TOL, max_iterations: int = MAX_ITERATIONS) -> np.ndarray:
    """
    Find all roots of `p` at once by Aberth–Ehrlich iteration.

    The polynomial is normalized to monic form. Initial guesses sit on a circle of
    radius 1 + max|c_i/c_n| (a bound on the root moduli), with a fixed angular offset
    and a small fixed radial spread, so the result depends only on `p` and `tol`.

    A root estimate is accepted once its backward error satisfies
    |p(z)| <= tol * sum(|c_i| |z|^i), or once its Aberth correction is below
    tol * max(1, |z|) (which is what multiple roots converge to).

    Args:
        p (ComplexPoly): polynomial of degree >= 1.
        tol (float): relative tolerance.
        max_iterations (int): iteration cap.

    Returns:
        np.ndarray: exactly deg(p) complex roots, with multiplicity.

    Raises:
        NonConvergence: if the iteration cap is reached first.
        ValueError: if `p` is constant or its degree exceeds MAX_DEGREE.
    """
    n = p.degree
    if n < 1:
        raise ValueError(f"Root finding needs degree >= 1 (got {n})")
    if n > MAX_DEGREE:
        raise ValueError(f"Degree {n} exceeds the supported maximum of {MAX_DEGREE}")

    monic = p.array / p.leading
    if n == 1:
        return np.array([-monic[0]])

    high_first = monic[::-1]
    d_high_first = np.polyder(high_first)
    abs_high_first = np.abs(high_first)

    radius = 1.0 + float(np.max(np.abs(monic[:-1])))
    k = np.arange(n)
    z = radius * (1 + _GUESS_RADIAL_SPREAD * k / n) * np.exp(1j * (2 * np.pi * k / n + _GUESS_ANGLE_OFFSET))

    off_diagonal = ~np.eye(n, dtype=bool)
    for iteration in range(max_iterations):
        pz = np.polyval(high_first, z)
        small_residual = np.abs(pz) <= tol * np.polyval(abs_high_first, np.abs(z))
        diff = z[:, None] - z[None, :]
        with np.errstate(divide='ignore', invalid='ignore'):
            repulsion = np.where(off_diagonal, 1 / np.where(off_diagonal, diff, 1), 0).sum(axis=1)
            correction = 1 / (np.polyval(d_high_first, z) / pz - repulsion)
        finite = np.isfinite(correction)
        correction = np.where(small_residual | ~finite, 0, correction)
        z = z - correction
        if np.all(small_residual | (finite & (np.abs(correction) <= tol * np.maximum(1.0, np.abs(z))))):
            _log.debug(f"[all_roots] degree {n} converged after {iteration + 1} iterations")
            return z

    raise NonConvergence("Aberth iteration did not converge", degree=n, iterations=max_iterations, tol=tol)


def min_separation(roots: Sequence[complex]) -> float:
    """Minimum pairwise distance among at least two points."""
    r = np.asarray(roots, dtype=complex)
    if r.size < 2:
        raise ValueError("min_separation needs at least two roots")
    distances = np.abs(r[:, None] - r[None, :])
    return float(distances[np.triu_indices(r.size, 1)].min())
