"""
This module continues all n roots of p_a(z) while the parameter a moves along a path,
and reads off the permutation of the roots induced by a closed loop.

Each step is an Euler prediction along dz/da followed by Newton correction on the
polynomial at the new parameter value. A step is accepted only when every corrected
root stays within safety_factor * (current minimum separation) / 2 of its prediction,
which keeps the matching of old and new roots unambiguous. Otherwise the step is halved.

Key components:
- TrackOptions: step-control settings.
- TrackResult: the permutation plus the full trajectories.
- track / monodromy_perm: the continuation itself.
- canonical_numbering: a deterministic numbering of a root set.
- trajectories_to_csv: ``root_index,t,re,im`` export.

Permutations follow the right-to-left convention of `perm_group`: for loops L1 then L2,
perm(L1·L2) = compose(perm(L2), perm(L1)).
"""

import csv
import io
import logging
import math
from collections.abc import Sequence
from typing import NamedTuple

import numpy as np

from monodromy_kit.family_kit import (
    MULTIPLE_ROOT_TOL, PolyFamily, at_parameter, canonical_key, implicit_velocity, multiple_root_residual,
)
from monodromy_kit.lab_error import MonodromyLabError
from monodromy_kit.path_spec import NotClosed, ParamPath
from monodromy_kit.poly_kit import ComplexPoly, all_roots, derivative, evaluate, min_separation

from .perm_group import Permutation

_log = logging.getLogger(__name__)

# Relative distance within which given start roots must match the actual roots.
START_MATCH_TOL = 1e-8
CROSS_CHECK_TOL = 1e-6


class BranchPointHit(MonodromyLabError):
    pass


class StepFailure(MonodromyLabError):
    pass


class TrackOptions(NamedTuple):
    """
    Step control for root continuation.

    Attributes:
        initial_step (float): largest step, as a fraction of the path length.
        newton_tol (float): relative Newton step size at which a root counts as converged.
        max_newton_iters (int): Newton iterations per step.
        safety_factor (float): in (0, 1); scales the acceptance radius.
        max_halvings (int): consecutive step halvings before giving up.
        cross_check (bool): compare every accepted step with a fresh `all_roots` call.
    """
    initial_step: float = 1e-2
    newton_tol: float = 1e-12
    max_newton_iters: int = 20
    safety_factor: float = 0.5
    max_halvings: int = 40
    cross_check: bool = False

    @classmethod
    def default(cls) -> 'TrackOptions':
        return cls()

    def validated(self) -> 'TrackOptions':
        if not (self.initial_step > 0 and self.newton_tol > 0):
            raise ValueError(f"initial_step and newton_tol must be positive: {self}")
        if self.max_newton_iters < 1 or self.max_halvings < 1:
            raise ValueError(f"max_newton_iters and max_halvings must be positive: {self}")
        if not 0 < self.safety_factor < 1:
            raise ValueError(f"safety_factor must lie in (0, 1) (got {self.safety_factor})")
        return self


class TrackResult(NamedTuple):
    """
    Outcome of a continuation.

    Attributes:
        perm (Permutation | None): root i ends in the slot of start root perm(i); None on open paths.
        t (np.ndarray): arc-length parameter of every accepted point, shared by all roots.
        positions (np.ndarray): positions[k, i] is root i at t[k].
        min_separation_seen (float): smallest root separation met along the way.
        steps_taken (int): accepted steps.
        cross_check_error (float | None): largest mismatch against fresh root sets, when checked.
    """
    perm: Permutation | None
    t: np.ndarray
    positions: np.ndarray
    min_separation_seen: float
    steps_taken: int
    cross_check_error: float | None = None

    @property
    def n(self) -> int:
        return self.positions.shape[1]

    @property
    def start_roots(self) -> np.ndarray:
        return self.positions[0]

    @property
    def final_roots(self) -> np.ndarray:
        return self.positions[-1]

    @property
    def trajectories(self) -> list[list[tuple[float, complex]]]:
        """Per root, the sequence of (t, z) pairs."""
        return [
            [(float(t), complex(z)) for t, z in zip(self.t, self.positions[:, i])]
            for i in range(self.n)
        ]


def canonical_numbering(roots: Sequence[complex]) -> tuple[complex, ...]:
    """
    Roots sorted by (re, im) after rounding to 1e-9.

    Example:
        >>> canonical_numbering([3 ** 0.5, 0, -3 ** 0.5])
        ((-1.7320508075688772+0j), 0j, (1.7320508075688772+0j))
    """
    return tuple(sorted((complex(z) for z in roots), key=canonical_key))


def _separation(z: np.ndarray) -> float:
    return min_separation(z) if z.size > 1 else math.inf


def _newton(p: ComplexPoly, z: np.ndarray, opts: TrackOptions) -> tuple[np.ndarray, bool]:
    """Vectorized Newton on every entry of `z`; the flag tells whether all of them converged."""
    dp = derivative(p)
    for _ in range(opts.max_newton_iters):
        with np.errstate(divide='ignore', invalid='ignore'):
            step = evaluate(p, z) / evaluate(dp, z)
        if not np.all(np.isfinite(step)):
            return z, False
        z = z - step
        if np.all(np.abs(step) <= opts.newton_tol * np.maximum(1.0, np.abs(z))):
            return z, True
    return z, False


def _nearest(targets: np.ndarray, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """For each point, the index of the nearest target and the distance to it."""
    distances = np.abs(points[:, None] - targets[None, :])
    nearest = np.argmin(distances, axis=1)
    return nearest, distances[np.arange(points.size), nearest]


def _prepare_start(f: PolyFamily, a0: complex, start_roots: Sequence[complex] | None, opts: TrackOptions) -> np.ndarray:
    p0 = at_parameter(f, a0)
    if f.n > 1 and multiple_root_residual(p0) <= MULTIPLE_ROOT_TOL:
        raise BranchPointHit("Start point has a multiple root", a=complex(a0))
    actual = np.array(canonical_numbering(all_roots(p0)), dtype=complex)
    if start_roots is None:
        return actual
    given = np.asarray(start_roots, dtype=complex)
    if given.size != f.n:
        raise ValueError(f"Expected {f.n} start roots, got {given.size}")
    start, converged = _newton(p0, given.copy(), opts)
    drift = np.abs(start - given)
    if not converged or np.any(drift > START_MATCH_TOL * np.maximum(1.0, np.abs(given))):
        raise ValueError(f"Start roots are not the roots of p_a at a={a0}")
    # as a multiset: a repeated entry must not stand in for a missing root
    nearest, distance = _nearest(actual, start)
    scale = max(1.0, float(np.max(np.abs(actual))))
    if np.unique(nearest).size != f.n or np.any(distance > CROSS_CHECK_TOL * scale):
        raise ValueError(f"Start roots do not match the roots of p_a at a={a0} one to one")
    return start


def track(
    f: PolyFamily, path: ParamPath, start_roots: Sequence[complex] | None = None, opts: TrackOptions | None = None
) -> TrackResult:
    """
    Continue the roots of p_a along `path`.

    Args:
        f (PolyFamily): the family.
        path (ParamPath): parameter path; any branch point must stay off it.
        start_roots (Sequence[complex] | None): roots of p_a at the start of the path,
            in the numbering to use; defaults to `canonical_numbering` of all roots.
        opts (TrackOptions | None): step control, `TrackOptions.default()` when None.

    Returns:
        TrackResult: trajectories, and on a closed path the induced permutation.

    Raises:
        ValueError: if the path is empty or the start roots do not match.
        BranchPointHit: if roots come within 10 * newton_tol of each other, or the end
        positions cannot be matched to the start roots with certainty.
        StepFailure: if a step still fails after `max_halvings` halvings.
        SingularPoint: propagated from the velocity predictor.
    """
    opts = (opts or TrackOptions.default()).validated()
    if path.is_empty:
        raise ValueError("Cannot track along the empty path")
    a0 = complex(path.start)
    z = _prepare_start(f, a0, start_roots, opts)
    start = z.copy()
    start_separation = _separation(start)

    h_max = opts.initial_step * path.length
    h = h_max
    t_offset = 0.0
    grid_t = [0.0]
    grid_z = [z.copy()]
    min_seen = start_separation
    cross_error = 0.0 if opts.cross_check else None
    steps = 0

    for index, segment in enumerate(path.segments):
        length = segment.length
        if length == 0:
            continue
        done = 0.0
        while done < length:
            remaining = length - done
            sep = _separation(z)
            if sep < 10 * opts.newton_tol:
                raise BranchPointHit("Roots collided along the path", segment=index, t=t_offset + done)
            a_from = complex(segment.point_at(done / length))
            velocity = implicit_velocity(f, a_from, z)
            step = min(h, remaining)
            collapsed = False
            for halvings in range(opts.max_halvings + 1):
                last = step >= remaining
                a_to = complex(segment.end if last else segment.point_at((done + step) / length))
                predicted = z + velocity * (a_to - a_from)
                corrected, converged = _newton(at_parameter(f, a_to), predicted, opts)
                if converged:
                    new_sep = _separation(corrected)
                    if new_sep <= 10 * opts.newton_tol:
                        collapsed = True
                    elif np.all(np.abs(corrected - predicted) <= opts.safety_factor * sep / 2):
                        break
                _log.debug(f"[track] halving step {step:.3g} at t={t_offset + done:.6g}")
                step /= 2
            else:
                if collapsed:
                    raise BranchPointHit("Roots merge under every step size", segment=index, t=t_offset + done)
                raise StepFailure("Step halvings exhausted", segment=index, t=t_offset + done, halvings=opts.max_halvings)

            z = corrected
            done = length if last else done + step
            h = min(2 * step, h_max) if halvings == 0 else step
            steps += 1
            min_seen = min(min_seen, new_sep)
            grid_t.append(t_offset + done)
            grid_z.append(z.copy())
            if opts.cross_check:
                fresh = all_roots(at_parameter(f, a_to))
                _, mismatch = _nearest(fresh, z)
                cross_error = max(cross_error, float(mismatch.max()))
                if cross_error > CROSS_CHECK_TOL:
                    raise StepFailure("Tracked roots disagree with a fresh root set", mismatch=cross_error, a=a_to)
        t_offset += length

    perm = _read_permutation(start, z, start_separation) if path.closed else None
    _log.info(f"[track] {steps} steps, min separation {min_seen:.3g}, permutation {perm}")
    return TrackResult(perm, np.array(grid_t), np.array(grid_z), min_seen, steps, cross_error)


def _read_permutation(start: np.ndarray, final: np.ndarray, start_separation: float) -> Permutation:
    slots, distances = _nearest(start, final)
    if np.any(distances > start_separation / 4) or len(set(slots.tolist())) != start.size:
        raise BranchPointHit("End positions do not match the start roots", worst=float(distances.max()))
    return Permutation(tuple(int(s) for s in slots))


def monodromy_perm(
    f: PolyFamily, loop: ParamPath, numbering: Sequence[complex] | None = None, opts: TrackOptions | None = None
) -> Permutation:
    """
    The path permutation of `loop` in the given root numbering.

    Raises:
        NotClosed: if `loop` is open.
    """
    if not loop.closed:
        raise NotClosed("A path permutation needs a closed loop", start=loop.start, end=loop.end)
    return track(f, loop, numbering, opts).perm


def trajectories_to_csv(result: TrackResult) -> str:
    """Rows ``root_index,t,re,im`` with a header, 12 significant digits."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(('root_index', 't', 're', 'im'))
    for i in range(result.n):
        for t, z in zip(result.t, result.positions[:, i]):
            writer.writerow((i, f"{t:.12g}", f"{z.real:.12g}", f"{z.imag:.12g}"))
    return buffer.getvalue()
