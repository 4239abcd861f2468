"""
This module provides radical formulas: towers of root extractions over rational functions,

    z_j^(k_j) = p_j(a_0, ..., a_n, z_1, ..., z_(j-1)),   j = 1..s,

evaluated with every branch of every root, and continued branch by branch as the
coefficients a_i move along a parameter path.

A closed path is *cautious* for a formula when every value of every level returns to
its own starting place. Cautiousness is checked numerically, with the tracker's
step-acceptance rule applied to the finite set of value tuples.

Formula text has one level per line (``;`` also separates levels)::

    z1^2 = a0^2 - 4
    z2^3 = (-a0 + z1)/2
    z3 = z2 + 1/z2

A bare ``a`` stands for ``a0``.
"""

import logging
import math
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np
import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from monodromy_kit.lab_error import MonodromyLabError
from monodromy_kit.path_spec import NotClosed, ParamPath
from monodromy_kit.poly_kit import ComplexPoly, all_roots

from .perm_group import Permutation
from .tracker import BranchPointHit, StepFailure, TrackOptions

_log = logging.getLogger(__name__)

DIVISION_TOL = 1e-12
RADICAND_TOL = 1e-8
# Radicands at or below this size are zero in `evaluate_tower`.
ZERO_RADICAND_TOL = 1e-14
RETURN_TOL = 1e-6
ORACLE_TOL = 1e-9

A = sympy.Symbol('a')
_TRANSFORMATIONS = standard_transformations + (convert_xor,)
_variable_name = re.compile(r'^(?P<kind>[az])(?P<index>\d+)$')
_level_head = re.compile(r'^\s*z(?P<index>\d+)\s*(\^\s*(?P<k>\d+))?\s*=(?P<body>.*)$')
# Deterministic coefficient values at which a divisor is checked for vanishing.
_SAMPLE_POINTS = (0.37 + 0.61j, -0.83 + 0.29j, 1.21 - 0.47j)


class DivisionByZero(MonodromyLabError):
    pass


class RadicandVanishes(MonodromyLabError):
    pass


def a_symbol(i: int) -> sympy.Symbol:
    return sympy.Symbol(f'a{i}')


def z_symbol(j: int) -> sympy.Symbol:
    return sympy.Symbol(f'z{j}')


def _sympy_text(expr) -> str:
    return str(expr).replace('**', '^')


@dataclass(frozen=True)
class RationalExpr:
    """
    Quotient of polynomials in a fixed, ordered list of variables.

    Attributes:
        expr: the sympy expression.
        variables (tuple[sympy.Symbol, ...]): argument order for `evaluate`.
    """
    expr: sympy.Expr
    variables: tuple[sympy.Symbol, ...] = field(default=())

    @classmethod
    def parse(cls, text: str, variables: Sequence[sympy.Symbol] | None = None) -> 'RationalExpr':
        """
        Parse text over ``a``, ``a0..aN`` and ``z1..zM``; ``a`` is ``a0`` unless `variables` holds ``a``.

        Raises:
            ValueError: on syntax errors or symbols outside `variables`.
        """
        local = {'i': sympy.I, 'I': sympy.I}
        if variables is None or A not in variables:
            local['a'] = a_symbol(0)
        else:
            local['a'] = A
        try:
            expr = sympy.sympify(parse_expr(text, local_dict=local, transformations=_TRANSFORMATIONS))
        except Exception as e:  # sympy's tokenizer and evaluator raise assorted exception types
            raise ValueError(f"Invalid rational expression '{text}': {e}") from e
        for s in expr.free_symbols:
            if variables is None and not _variable_name.match(s.name):
                raise ValueError(f"Unknown symbol '{s}' in '{text}'")
        if variables is None:
            variables = sorted(expr.free_symbols, key=_variable_order)
        result = cls(expr, tuple(variables))
        result.check_variables()
        return result

    def check_variables(self):
        unknown = self.expr.free_symbols - set(self.variables)
        if unknown:
            raise ValueError(f"Expression '{self}' uses {sorted(map(str, unknown))} outside {list(map(str, self.variables))}")

    def with_variables(self, variables: Sequence[sympy.Symbol]) -> 'RationalExpr':
        result = RationalExpr(self.expr, tuple(variables))
        result.check_variables()
        return result

    @cached_property
    def _parts(self):
        numerator, denominator = sympy.fraction(sympy.together(self.expr))
        return (
            sympy.lambdify(self.variables, numerator, modules='numpy'),
            sympy.lambdify(self.variables, denominator, modules='numpy'),
        )

    def evaluate(self, *values):
        """
        Value at `values` (one per variable; numpy arrays broadcast).

        Raises:
            DivisionByZero: if the denominator vanishes (|den| <= 1e-12) anywhere.
        """
        numerator, denominator = self._parts
        shape = np.broadcast(*values).shape if values else ()
        num = np.broadcast_to(np.asarray(numerator(*values), dtype=complex), shape)
        den = np.broadcast_to(np.asarray(denominator(*values), dtype=complex), shape)
        if np.any(np.abs(den) <= DIVISION_TOL):
            raise DivisionByZero("Denominator vanishes", expression=str(self))
        result = num / den
        return complex(result) if result.ndim == 0 else result

    def __str__(self):
        return _sympy_text(self.expr)


def _variable_order(s: sympy.Symbol) -> tuple[str, int]:
    found = _variable_name.match(s.name)
    return (found.group('kind'), int(found.group('index'))) if found else (s.name, 0)


class RadicalLevel(NamedTuple):
    """One level z_j^k = expr."""
    expr: RationalExpr
    k: int


class RadicalFormula(NamedTuple):
    """
    A tower of root extractions.

    Attributes:
        levels (tuple[RadicalLevel, ...]): level j (1-based) defines z_j.
        n (int): the coefficients are a_0..a_n.
        notes (tuple[str, ...]): warnings recorded while building the formula.
    """
    levels: tuple[RadicalLevel, ...]
    n: int
    notes: tuple[str, ...] = ()

    @classmethod
    def of(cls, levels: Iterable[tuple[str | sympy.Expr | RationalExpr, int]], n: int | None = None,
           notes: Sequence[str] = ()) -> 'RadicalFormula':
        """
        Build and validate a formula from (expression, k) pairs.

        Raises:
            ValueError: if some k < 1, or level j refers to z_j or a later level.
        """
        parsed = []
        for expr, k in levels:
            match expr:
                case str():
                    expr = RationalExpr.parse(expr)
                case sympy.Basic():
                    expr = RationalExpr(expr)
            parsed.append((expr, int(k)))
        if n is None:
            n = max(
                (int(s.name[1:]) for e, _ in parsed for s in e.expr.free_symbols if s.name.startswith('a')),
                default=0,
            )
        coefficient_vars = [a_symbol(i) for i in range(n + 1)]
        result = []
        for j, (expr, k) in enumerate(parsed, start=1):
            if k < 1:
                raise ValueError(f"Root index of level {j} must be >= 1 (got {k})")
            result.append(RadicalLevel(expr.with_variables(coefficient_vars + [z_symbol(i) for i in range(1, j)]), k))
        return cls(tuple(result), n, tuple(notes))

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> 'RadicalFormula':
        """
        Parse formula text, one ``zj^k = expr`` per line or ``;``-separated.

        Raises:
            ValueError: on malformed lines or levels out of order.
        """
        levels = []
        for line in (s for s in re.split(r'[\n;]', text) if s.strip()):
            head = _level_head.match(line)
            if not head:
                raise ValueError(f"Invalid formula level: '{line.strip()}'")
            if int(head.group('index')) != len(levels) + 1:
                raise ValueError(f"Expected level z{len(levels) + 1}, got '{line.strip()}'")
            levels.append((head.group('body').strip(), int(head.group('k') or 1)))
        if not levels:
            raise ValueError("Empty radical formula")
        return cls.of(levels, n)

    @property
    def depth(self) -> int:
        """Number of levels with a genuine root (k > 1)."""
        return sum(1 for level in self.levels if level.k > 1)

    @property
    def branch_count(self) -> int:
        return math.prod(level.k for level in self.levels)

    def format(self) -> str:
        lines = []
        for j, level in enumerate(self.levels, start=1):
            head = f"z{j}^{level.k}" if level.k > 1 else f"z{j}"
            lines.append(f"{head} = {level.expr}")
        return '\n'.join(lines)

    def __str__(self):
        return self.format()


class ValueTower(NamedTuple):
    """
    All value tuples of a formula at fixed coefficients.

    Attributes:
        levels (tuple[np.ndarray, ...]): levels[j-1][m] is the m-th tuple (z_1, ..., z_j).
        collapsed (tuple[bool, ...]): per level, whether a zero radicand merged branches.
        radicands (tuple[np.ndarray, ...]): per level, the radicand on each parent tuple.
    """
    levels: tuple[np.ndarray, ...]
    collapsed: tuple[bool, ...]
    radicands: tuple[np.ndarray, ...]

    def values(self, level: int) -> np.ndarray:
        """All values of z_level (1-based)."""
        return self.levels[level - 1][:, -1]

    @property
    def top(self) -> np.ndarray:
        return self.values(len(self.levels))

    @property
    def min_radicand(self) -> float:
        return min((float(np.min(np.abs(r))) for r in self.radicands if r.size), default=math.inf)


def _kth_roots(r: complex, k: int) -> np.ndarray:
    m = np.arange(k)
    return abs(r) ** (1 / k) * np.exp(1j * (np.angle(r) + 2 * np.pi * m) / k)


def evaluate_tower(rf: RadicalFormula, coeffs: Sequence[complex]) -> ValueTower:
    """
    Evaluate every branch of every level.

    Level by level, the expression is evaluated on each existing tuple and all k-th roots
    are adjoined. A zero radicand contributes the single value 0 and marks the level
    as collapsed.

    Raises:
        ValueError: if the coefficient count does not match.
        DivisionByZero: if a denominator vanishes.
    """
    coeffs = [complex(c) for c in coeffs]
    if len(coeffs) != rf.n + 1:
        raise ValueError(f"Expected {rf.n + 1} coefficients, got {len(coeffs)}")
    tuples = np.empty((1, 0), dtype=complex)
    levels, collapsed, radicands = [], [], []
    for level in rf.levels:
        columns = [np.full(len(tuples), c) for c in coeffs] + [tuples[:, i] for i in range(tuples.shape[1])]
        radicand = np.atleast_1d(np.asarray(level.expr.evaluate(*columns), dtype=complex))
        radicand = np.broadcast_to(radicand, (len(tuples),))
        rows = []
        level_collapsed = False
        for parent, r in zip(tuples, radicand):
            if level.k == 1:
                children = np.array([r])
            elif abs(r) <= ZERO_RADICAND_TOL:
                children = np.array([0j])
                level_collapsed = True
            else:
                children = _kth_roots(r, level.k)
            rows.extend(np.append(parent, child) for child in children)
        tuples = np.array(rows, dtype=complex)
        levels.append(tuples)
        collapsed.append(level_collapsed)
        radicands.append(radicand if level.k > 1 else np.empty(0, dtype=complex))
    return ValueTower(tuple(levels), tuple(collapsed), tuple(radicands))


@dataclass(frozen=True)
class CoeffPath:
    """
    Coefficients a_0..a_n as rational functions of one parameter a, and a path for a.

    Attributes:
        coeffs (tuple[RationalExpr, ...]): a_i as a function of the symbol ``a``.
        path (ParamPath): the path of the parameter.
    """
    coeffs: tuple[RationalExpr, ...]
    path: ParamPath

    @classmethod
    def of(cls, coeff_texts: Sequence[str], path: ParamPath) -> 'CoeffPath':
        return cls(tuple(RationalExpr.parse(t, (A,)) for t in coeff_texts), path)

    @classmethod
    def identity(cls, path: ParamPath) -> 'CoeffPath':
        """The single coefficient a0 = a."""
        return cls.of(['a'], path)

    def at(self, a: complex) -> list[complex]:
        return [complex(c.evaluate(complex(a))) for c in self.coeffs]


def _max_norm_distances(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """distances[i, j] = max-norm distance between tuple x[i] and tuple y[j]."""
    return np.max(np.abs(x[:, None, :] - y[None, :, :]), axis=2)


def _tuple_separation(x: np.ndarray) -> float:
    if len(x) < 2:
        return math.inf
    d = _max_norm_distances(x, x)
    return float(d[np.triu_indices(len(x), 1)].min())


def _tower_at(rf: RadicalFormula, cp: CoeffPath, a: complex) -> ValueTower:
    tower = evaluate_tower(rf, cp.at(a))
    if tower.min_radicand <= RADICAND_TOL:
        raise RadicandVanishes("A radicand vanishes on the path", a=complex(a), radicand=tower.min_radicand)
    return tower


class TowerTrack(NamedTuple):
    """Start tower and the continued top-level tuples (row i continues start row i)."""
    start: ValueTower
    final_top: np.ndarray
    steps_taken: int


def continue_tower(rf: RadicalFormula, cp: CoeffPath, opts: TrackOptions | None = None) -> TowerTrack:
    """
    Continue every top-level value tuple along the path.

    At each step the tower is re-evaluated and the tuples are matched by max-norm
    nearest neighbour. A step is accepted when the matching is a bijection and each
    tuple moves at most safety_factor * (current tuple separation) / 2; otherwise it is halved.

    Raises:
        RadicandVanishes: if min |radicand| <= 1e-8 somewhere on the path.
        DivisionByZero: if a denominator vanishes on the path.
        StepFailure: if halvings are exhausted.
    """
    opts = (opts or TrackOptions.default()).validated()
    path = cp.path
    if path.is_empty:
        raise ValueError("Cannot continue a tower along the empty path")
    if len(cp.coeffs) != rf.n + 1:
        raise ValueError(f"Formula needs {rf.n + 1} coefficient functions, got {len(cp.coeffs)}")
    start = _tower_at(rf, cp, path.start)
    current = start.levels[-1]
    h_max = opts.initial_step * path.length
    h = h_max
    steps = 0
    for index, segment in enumerate(path.segments):
        length = segment.length
        if length == 0:
            continue
        done = 0.0
        while done < length:
            remaining = length - done
            sep = _tuple_separation(current)
            step = min(h, remaining)
            for halvings in range(opts.max_halvings + 1):
                last = step >= remaining
                a_to = complex(segment.end if last else segment.point_at((done + step) / length))
                candidate = _tower_at(rf, cp, a_to).levels[-1]
                distances = _max_norm_distances(current, candidate)
                nearest = np.argmin(distances, axis=1)
                moved = distances[np.arange(len(current)), nearest]
                if len(set(nearest.tolist())) == len(current) and np.all(moved <= opts.safety_factor * sep / 2):
                    break
                _log.debug(f"[continue_tower] halving step {step:.3g} on segment {index}")
                step /= 2
            else:
                raise StepFailure("Step halvings exhausted while continuing a tower", segment=index)
            current = candidate[nearest]
            done = length if last else done + step
            h = min(2 * step, h_max) if halvings == 0 else step
            steps += 1
    _log.debug(f"[continue_tower] {steps} steps over {len(current)} tuples")
    return TowerTrack(start, current, steps)


def _level_permutation(start_level: np.ndarray, final_prefix: np.ndarray, parents: np.ndarray) -> Permutation:
    """
    Permutation of the level's tuples: slot p goes to slot q when the tuple starting at p ends at q.

    `parents[i]` is the start slot of the prefix of top tuple i.
    """
    sep = _tuple_separation(start_level)
    images = [-1] * len(start_level)
    for i, p in enumerate(parents):
        distances = np.max(np.abs(start_level - final_prefix[i]), axis=1)
        q = int(np.argmin(distances))
        if distances[q] > min(sep / 4, RETURN_TOL * max(1.0, float(np.max(np.abs(start_level[q]))))):
            raise BranchPointHit("Continued values do not return to the value set", worst=float(distances[q]))
        if images[p] not in (-1, q):
            raise BranchPointHit("Continued values of one branch disagree")
        images[p] = q
    if sorted(images) != list(range(len(start_level))):
        raise BranchPointHit("Continued values are not a permutation of the value set")
    return Permutation(tuple(images))


def track_tower(rf: RadicalFormula, cp: CoeffPath, opts: TrackOptions | None = None) -> tuple[Permutation, ...]:
    """
    Per level, the permutation of that level's value tuples induced by the closed path.

    Raises:
        NotClosed: if the path is open.
        RadicandVanishes, DivisionByZero, StepFailure: as `continue_tower`.
    """
    if not cp.path.closed:
        raise NotClosed("Branch permutations need a closed path", start=cp.path.start, end=cp.path.end)
    tracked = continue_tower(rf, cp, opts)
    top_start = tracked.start.levels[-1]
    perms = []
    for j, level in enumerate(tracked.start.levels, start=1):
        slot = {tuple(row): p for p, row in enumerate(level)}
        parents = np.array([slot[tuple(row[:j])] for row in top_start])
        perms.append(_level_permutation(level, tracked.final_top[:, :j], parents))
    return tuple(perms)


def is_cautious(rf: RadicalFormula, cp: CoeffPath, opts: TrackOptions | None = None) -> bool:
    """True iff every value of every level returns to its own place along the closed path."""
    return all(p.is_identity for p in track_tower(rf, cp, opts))


def _shift_z(expr: RationalExpr, offset: int, levels: int) -> sympy.Expr:
    return expr.expr.xreplace({z_symbol(i): z_symbol(i + offset) for i in range(1, levels + 1)})


_OPERATIONS = {
    'sum': lambda x, y: x + y,
    'difference': lambda x, y: x - y,
    'product': lambda x, y: x * y,
    'quotient': lambda x, y: x / y,
}


def compose_formulas(rf1: RadicalFormula, rf2: RadicalFormula, op: str) -> RadicalFormula:
    """
    Levels of `rf1`, then the levels of `rf2` renumbered after them, then one k=1
    level combining the two top values with `op` (sum, difference, product or quotient).

    A quotient whose divisor vanishes at the sample points is flagged in `notes`.
    """
    if op not in _OPERATIONS:
        raise ValueError(f"Unknown operation '{op}'; expected one of {sorted(_OPERATIONS)}")
    s1, s2 = len(rf1.levels), len(rf2.levels)
    if not (s1 and s2):
        raise ValueError("Cannot compose empty formulas")
    n = max(rf1.n, rf2.n)
    levels = [(RationalExpr(level.expr.expr), level.k) for level in rf1.levels]
    levels += [(RationalExpr(_shift_z(level.expr, s1, s2)), level.k) for level in rf2.levels]
    levels.append((RationalExpr(_OPERATIONS[op](z_symbol(s1), z_symbol(s1 + s2))), 1))
    notes = list(rf1.notes) + list(rf2.notes)
    if op == 'quotient':
        for point in _SAMPLE_POINTS:
            try:
                top = evaluate_tower(rf2, [point] * (rf2.n + 1)).top
            except DivisionByZero:
                top = np.zeros(1)
            if np.any(np.abs(top) <= DIVISION_TOL):
                notes.append(f"divisor vanishes at sample coefficients {point}")
                _log.warning(f"[compose_formulas] quotient divisor vanishes at sample coefficients {point}")
                break
    return RadicalFormula.of(levels, n, notes)


def adjoin_root(rf: RadicalFormula, k: int) -> RadicalFormula:
    """Append the level z_(s+1)^k = z_s."""
    if not rf.levels:
        raise ValueError("Cannot adjoin a root to an empty formula")
    if k < 1:
        raise ValueError(f"Root index must be >= 1 (got {k})")
    s = len(rf.levels)
    return RadicalFormula.of([(e, level_k) for e, level_k in rf.levels] + [(RationalExpr(z_symbol(s)), k)], rf.n, rf.notes)


class CubicVariant(NamedTuple):
    """Outcome of checking one written form of a cubic formula against the root oracle."""
    name: str
    formula: RadicalFormula
    validated: bool
    worst_error: float


CUBIC_VARIANTS = {
    'corrected': "z1^2 = a0^2 - 4; z2^3 = (-a0 + z1)/2; z3 = z2 + 1/z2",
    'printed': "z1^2 = a0^2 - 4; z2^3 = -a0 + z1; z3 = z2/2 - 2/z2",
    'independent-cube-roots': "z1^2 = a0^2 - 4; z2^3 = -a0 + z1; z3^3 = a0 + z1; z4 = (z2 - z3)/2",
}


def cubic_variant_report(a_values: Iterable[complex]) -> list[CubicVariant]:
    """
    Check which written forms of a radical formula for x^3 - 3x + a = 0 produce its roots.

    For every a, each variant passes when every root from `all_roots` lies within 1e-9
    of some top-level value of the tower. Failing variants are logged, not raised.
    """
    a_values = [complex(a) for a in a_values]
    results = []
    for name, text in CUBIC_VARIANTS.items():
        rf = RadicalFormula.parse(text)
        worst = 0.0
        for a in a_values:
            roots = all_roots(ComplexPoly.from_coeffs((a, -3, 0, 1)))
            try:
                top = evaluate_tower(rf, [a]).top
            except DivisionByZero:
                worst = math.inf
                continue
            worst = max(worst, float(np.max(np.min(np.abs(roots[:, None] - top[None, :]), axis=1))))
        validated = worst <= ORACLE_TOL
        if not validated:
            _log.warning(f"[cubic_variant_report] variant '{name}' misses a root of x^3-3x+a (error {worst:.3g})")
        results.append(CubicVariant(name, rf, validated, worst))
    return results
