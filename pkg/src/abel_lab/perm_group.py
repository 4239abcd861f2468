"""
This module provides permutations and the finite-group machinery of the
unsolvability argument: generated groups, commutators, derived series and
explicit product-of-commutators certificates.

`Permutation` is a hashable, ordered value type; the group theory itself is done by
``sympy.combinatorics``. Labels are 0-based internally. The cycle-notation text form
is 1-based, e.g. ``(1 2)(3 4 5)``.

Composition is right-to-left: ``compose(s, t)`` applies `t` first, then `s`. Sympy
multiplies left-to-right, so ``compose(s, t)`` is ``t * s`` there, and sympy's
``s.commutator(t)`` (``~t*~s*t*s``) is exactly s∘t∘s⁻¹∘t⁻¹.
"""

import logging
import math
import re
from collections import deque
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

from sympy.combinatorics import Permutation as SympyPermutation, PermutationGroup
from sympy.combinatorics.named_groups import AlternatingGroup, SymmetricGroup

from monodromy_kit.lab_error import MonodromyLabError

_log = logging.getLogger(__name__)

MAX_DEGREE = 9
MAX_GROUP_ORDER = 10 ** 6

_cycle_pattern = re.compile(r'\(([^()]*)\)')


class SizeMismatch(MonodromyLabError):
    pass


class SizeLimit(MonodromyLabError):
    pass


class Permutation(NamedTuple):
    """
    Bijection of {0, ..., n-1}.

    Attributes:
        images (tuple[int, ...]): images[i] is the image of i (sympy's ``array_form``).
    """
    images: tuple[int, ...]

    @classmethod
    def from_images(cls, images: Iterable[int]) -> 'Permutation':
        images = tuple(int(i) for i in images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"Not a permutation of 0..{len(images) - 1}: {images}")
        return cls(images)

    @classmethod
    def from_sympy(cls, p: SympyPermutation, n: int) -> 'Permutation':
        images = list(p.array_form)
        return cls(tuple(images + list(range(len(images), n))))

    @classmethod
    def identity(cls, n: int) -> 'Permutation':
        return cls(tuple(range(n)))

    @classmethod
    def cycle(cls, n: int, elements: Sequence[int]) -> 'Permutation':
        """The cycle elements[0] -> elements[1] -> ... -> elements[0] (0-based labels)."""
        elements = list(elements)
        if len(set(elements)) != len(elements) or any(not 0 <= e < n for e in elements):
            raise ValueError(f"Invalid cycle {tuple(elements)} on {n} points")
        if len(elements) < 2:
            return cls.identity(n)
        return cls.from_sympy(SympyPermutation([elements], size=n), n)

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> 'Permutation':
        return cls.cycle(n, (i, j))

    @property
    def n(self) -> int:
        return len(self.images)

    @property
    def is_identity(self) -> bool:
        return all(i == image for i, image in enumerate(self.images))

    @property
    def sympy(self) -> SympyPermutation:
        return SympyPermutation(list(self.images))

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __str__(self):
        return format_cycles(self)


def _check_sizes(s: Permutation, t: Permutation):
    if s.n != t.n:
        raise SizeMismatch("Permutations act on different sets", left=s.n, right=t.n)


def compose(s: Permutation, t: Permutation) -> Permutation:
    """
    s∘t: apply `t` first, then `s`.

    Example:
        >>> str(compose(Permutation.transposition(3, 0, 1), Permutation.transposition(3, 0, 2)))
        '(1 3 2)'
    """
    _check_sizes(s, t)
    return Permutation.from_sympy(t.sympy * s.sympy, s.n)


def inverse(s: Permutation) -> Permutation:
    return Permutation.from_sympy(~s.sympy, s.n)


def commutator(s: Permutation, t: Permutation) -> Permutation:
    """s∘t∘s⁻¹∘t⁻¹."""
    _check_sizes(s, t)
    return Permutation.from_sympy(s.sympy.commutator(t.sympy), s.n)


def cycle_decomposition(s: Permutation) -> list[tuple[int, ...]]:
    """Disjoint cycles of length >= 2, each starting at its smallest element, sorted by it."""
    return [tuple(c) for c in s.sympy.cyclic_form]


def cycle_type(s: Permutation) -> tuple[int, ...]:
    """Cycle lengths >= 2 in decreasing order; the identity has the empty type."""
    return tuple(sorted((len(c) for c in s.sympy.cyclic_form), reverse=True))


def is_even(s: Permutation) -> bool:
    return s.sympy.is_even


def order(s: Permutation) -> int:
    return int(s.sympy.order())


def power(s: Permutation, k: int) -> Permutation:
    """s composed with itself `k` times; negative `k` uses the inverse."""
    return Permutation.from_sympy(s.sympy ** k, s.n)


def format_cycles(s: Permutation) -> str:
    """
    1-based cycle notation; the identity prints as ``()``.

    Example:
        >>> format_cycles(Permutation((1, 0, 3, 4, 2)))
        '(1 2)(3 4 5)'
    """
    cycles = cycle_decomposition(s)
    if not cycles:
        return '()'
    return ''.join('(' + ' '.join(str(e + 1) for e in c) + ')' for c in cycles)


def parse_cycles(text: str, n: int | None = None) -> Permutation:
    """
    Parse 1-based cycle notation such as ``(1 2)(3 4 5)`` or ``(1,2)``.

    Cycles are composed right-to-left, so non-disjoint input like ``(1 2)(1 3)`` is
    accepted and means (1 2)∘(1 3). When `n` is omitted it is the largest label used.

    Raises:
        ValueError: on malformed text, labels below 1, or labels above `n`.
    """
    stripped = text.strip()
    if not stripped or _cycle_pattern.sub('', stripped).strip():
        raise ValueError(f"Invalid cycle notation: '{text}'")
    cycles = []
    for body in _cycle_pattern.findall(stripped):
        try:
            labels = [int(x) for x in re.split(r'[\s,]+', body.strip()) if x]
        except ValueError:
            raise ValueError(f"Invalid cycle notation: '{text}'") from None
        if any(label < 1 for label in labels):
            raise ValueError(f"Cycle labels start at 1: '{text}'")
        cycles.append([label - 1 for label in labels])
    largest = max((max(c) + 1 for c in cycles if c), default=1)
    if n is None:
        n = largest
    elif largest > n:
        raise ValueError(f"Label {largest} exceeds n={n} in '{text}'")
    result = Permutation.identity(n)
    for c in reversed(cycles):
        result = compose(Permutation.cycle(n, c), result)
    return result


@dataclass(frozen=True)
class PermSet:
    """
    A deduplicated set of permutations of a common {0, ..., n-1}.

    Attributes:
        n (int): size of the permuted set.
        elements (frozenset[Permutation]): the permutations.
    """
    n: int
    elements: frozenset[Permutation]

    def __post_init__(self):
        for s in self.elements:
            if s.n != self.n:
                raise SizeMismatch("Permutation size differs from the set's n", expected=self.n, got=s.n)

    @classmethod
    def of(cls, perms: Iterable[Permutation], n: int | None = None) -> 'PermSet':
        perms = frozenset(perms)
        if n is None:
            if not perms:
                raise ValueError("Cannot infer n from an empty set of permutations")
            n = next(iter(perms)).n
        return cls(n, perms)

    @classmethod
    def trivial(cls, n: int) -> 'PermSet':
        return cls(n, frozenset((Permutation.identity(n),)))

    @classmethod
    def from_group(cls, group: PermutationGroup, n: int) -> 'PermSet':
        """All elements of a sympy group, enumerated."""
        if group.order() > MAX_GROUP_ORDER:
            raise SizeLimit("Group closure too large", order=int(group.order()), limit=MAX_GROUP_ORDER)
        return cls(n, frozenset(Permutation.from_sympy(g, n) for g in group.generate()))

    @cached_property
    def group(self) -> PermutationGroup:
        """The sympy group generated by the elements."""
        return PermutationGroup([s.sympy for s in self.sorted()] or [Permutation.identity(self.n).sympy])

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def is_trivial(self) -> bool:
        return all(s.is_identity for s in self.elements)

    @property
    def is_abelian(self) -> bool:
        return self.group.is_abelian

    def sorted(self) -> list[Permutation]:
        return sorted(self.elements)

    def __contains__(self, item):
        return item in self.elements

    def __iter__(self) -> Iterator[Permutation]:
        return iter(self.sorted())

    def __len__(self):
        return len(self.elements)


def generate(gens: PermSet) -> PermSet:
    """
    The group generated by `gens`, enumerated from a sympy ``PermutationGroup``.

    Raises:
        ValueError: if `gens` is empty.
        SizeLimit: if n exceeds MAX_DEGREE or the group has more than MAX_GROUP_ORDER elements.
    """
    if not gens.elements:
        raise ValueError("Cannot generate a group from an empty set")
    if gens.n > MAX_DEGREE:
        raise SizeLimit("Degree too large for exhaustive closure", n=gens.n, max_degree=MAX_DEGREE)
    return PermSet.from_group(gens.group, gens.n)


def symmetric_group(n: int) -> PermSet:
    if n < 2:
        return PermSet.trivial(n)
    return PermSet.from_group(SymmetricGroup(n), n)


def alternating_group(n: int) -> PermSet:
    if n < 3:
        return PermSet.trivial(n)
    return PermSet.from_group(AlternatingGroup(n), n)


def _commutator_witnesses(group: PermSet) -> dict[Permutation, tuple[Permutation, Permutation]]:
    """Every commutator of `group`, with the first (x, y) in sorted order producing it."""
    items = group.sorted()
    witnesses: dict[Permutation, tuple[Permutation, Permutation]] = {}
    for x in items:
        for y in items:
            witnesses.setdefault(commutator(x, y), (x, y))
    return witnesses


def commutator_closure_step(s: PermSet) -> PermSet:
    """The commutator subgroup of the group generated by `s`."""
    return PermSet.from_group(s.group.derived_subgroup(), s.n)


def derived_series(s: PermSet, max_depth: int) -> list[PermSet]:
    """
    [s, s', s'', ...], stopping at the trivial group, at stabilization, or after
    `max_depth` closure steps, whichever comes first. A stabilized closure appears twice.
    """
    series = [s]
    for _ in range(max_depth):
        current = series[-1]
        if current.is_trivial:
            break
        step = commutator_closure_step(current)
        series.append(step)
        if step == current:
            break
    _log.debug(f"[derived_series] orders {[g.order for g in series]}")
    return series


def derived_depth_to_trivial(s: PermSet, max_depth: int) -> int | None:
    """
    Smallest d <= max_depth with the d-fold commutator closure of `s` trivial.

    Returns:
        int | None: the depth, or None when the trivial group is not reached.
    """
    for depth, group in enumerate(derived_series(s, max_depth)):
        if group.is_trivial:
            return depth
    return None


def group_tag(s: PermSet) -> str:
    """One of 'symmetric', 'alternating', 'cyclic' or 'other', relative to the n points acted on."""
    if s.order == math.factorial(s.n):
        return 'symmetric'
    if s.n >= 3 and s.order == math.factorial(s.n) // 2 and all(is_even(x) for x in s.elements):
        return 'alternating'
    if is_cyclic(s):
        return 'cyclic'
    return 'other'


def is_cyclic(group: PermSet) -> bool:
    return group.group.is_cyclic


CommutatorCertificate = dict[Permutation, tuple[tuple[Permutation, Permutation], ...]]


def commutator_product_certificate(group: PermSet) -> CommutatorCertificate:
    """
    Write every element of the commutator subgroup of `group` as an explicit product
    of commutators of elements of `group`.

    Breadth-first search from the identity over right multiplication by single
    commutators, so each product is as short as possible. The witness pair of each
    commutator is the first one in sorted order.

    Returns:
        CommutatorCertificate: g -> ((x1, y1), ..., (xk, yk)) with
        g = [x1, y1]∘...∘[xk, yk]; the identity maps to the empty product.
    """
    witnesses = _commutator_witnesses(group)
    identity = Permutation.identity(group.n)
    certificate: CommutatorCertificate = {identity: ()}
    frontier = deque([identity])
    steps = sorted(witnesses.items())
    while frontier:
        current = frontier.popleft()
        for c, pair in steps:
            reached = compose(current, c)
            if reached not in certificate:
                certificate[reached] = certificate[current] + (pair,)
                frontier.append(reached)
    _log.debug(f"[commutator_product_certificate] {len(certificate)} elements certified")
    return certificate


def verify_commutator_certificate(group: PermSet, certificate: CommutatorCertificate) -> bool:
    """Recompute every product and check that all witnesses belong to `group`."""
    for target, pairs in certificate.items():
        product = Permutation.identity(group.n)
        for x, y in pairs:
            if x not in group or y not in group:
                return False
            product = compose(product, commutator(x, y))
        if product != target:
            return False
    return True


def even_as_commutators_certificate(n: int = 5) -> CommutatorCertificate:
    """
    Every even permutation of n points as a product of commutators of even permutations.

    Raises:
        ArithmeticError: if some even permutation is missed, which happens for n < 5
        where the alternating group is not perfect.
    """
    group = alternating_group(n)
    certificate = commutator_product_certificate(group)
    if len(certificate) != group.order:
        raise ArithmeticError(f"Only {len(certificate)} of {group.order} even permutations are commutator products")
    return certificate


class DeepCommutatorPair(NamedTuple):
    """Two non-commuting elements `first` = [x1, y1] and `second` = [x2, y2] with x, y in the closure."""
    first: Permutation
    second: Permutation
    first_witness: tuple[Permutation, Permutation]
    second_witness: tuple[Permutation, Permutation]


def find_noncommuting_deep_commutators(group: PermSet, depth: int = 2) -> DeepCommutatorPair | None:
    """
    Search for two non-commuting commutators of elements of the (depth-1)-fold
    commutator closure of `group`.

    With depth 2 and the symmetric group on 5 points this exhibits two non-commuting
    commutators of products of commutators. Returns None if none exist.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1 (got {depth})")
    closure = group
    for _ in range(depth - 1):
        closure = commutator_closure_step(closure)
    witnesses = sorted(_commutator_witnesses(closure).items())
    for k, (first, first_pair) in enumerate(witnesses):
        for second, second_pair in witnesses[k + 1:]:
            if compose(first, second) != compose(second, first):
                return DeepCommutatorPair(first, second, first_pair, second_pair)
    return None


def is_power_of_single_cycle(perms: Iterable[Permutation], n: int) -> bool:
    """
    True if some n-cycle c has every permutation in `perms` among its powers.

    That holds exactly when the generated group is cyclic and its generators split the
    n points into cycles of one common length, the order of the group.
    """
    perms = set(perms)
    if any(s.n != n for s in perms):
        raise SizeMismatch("Permutation size differs from n", expected=n)
    if all(s.is_identity for s in perms) or n < 2:
        return True
    group = PermSet.of(perms, n).group
    if not group.is_cyclic:
        return False
    size = int(group.order())
    generator = next(g for g in group.generate() if g.order() == size)
    return generator.cycle_structure == {size: n // size}
