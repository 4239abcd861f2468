"""
Command-line entry point: ``abel-lab <subcommand> ...``.

Exit status is 0 on success, 1 on domain errors (reported as ``<ErrorName>: message``
on stderr) and 2 on usage errors. JSON documents carry a ``schema_version`` field;
complex numbers print as ``re+imi`` with 12 significant digits.
"""

import argparse
import json
import logging
import math
import sys
from collections.abc import Sequence

import numpy as np

from monodromy_kit.family_kit import PolyFamily, branch_points, format_family, parse_family
from monodromy_kit.lab_error import MonodromyLabError
from monodromy_kit.number_kit import format_complex, parse_complex
from monodromy_kit.path_spec import (
    Lasso, ParamPath, circle, compile_lasso, default_lasso_radius, path_from_json, path_to_json,
)
from version import __version__

from .certify import SCHEMA_VERSION, abel_certificate, certificate_to_json, monodromy_report, report_to_json
from .perm_group import (
    PermSet, commutator, compose, cycle_type, derived_depth_to_trivial, derived_series, format_cycles,
    generate, group_tag, inverse, is_even, order, parse_cycles,
)
from .radical_formula import CoeffPath, RadicalFormula, cubic_variant_report, evaluate_tower, track_tower
from .svg_plot import plot_trajectories
from .tracker import TrackOptions, track, trajectories_to_csv

_log = logging.getLogger(__name__)

SUBCOMMANDS = ('branch-points', 'track', 'monodromy', 'certify', 'radical-eval', 'cautious', 'perm')
_FORMATS = {
    'branch-points': ('json', 'text'),
    'track': ('json', 'csv', 'svg'),
    'monodromy': ('json',),
    'certify': ('json', 'text'),
    'radical-eval': ('json', 'text'),
    'cautious': ('json',),
    'perm': ('json', 'text'),
}


class UsageError(ValueError):
    pass


def _complex_list(text: str) -> list[complex]:
    return [parse_complex(item) for item in text.split(',') if item.strip()]


def _add_family(parser: argparse.ArgumentParser):
    parser.add_argument('--family', required=True, help='family literal, e.g. "z^5 - 5*z + a"')


def _add_path(parser: argparse.ArgumentParser):
    group = parser.add_argument_group('parameter path')
    group.add_argument('--path', help='JSON path literal: [{"line": [from, to]}, {"arc": {...}}, ...]')
    group.add_argument('--base', default='0', help='base point (default 0)')
    group.add_argument('--around', help='lasso target')
    group.add_argument('--radius', type=float, help='lasso or circle radius')
    group.add_argument('--turns', type=int, default=1, help='signed number of turns (default 1)')
    group.add_argument('--circle', action='store_true', help='circle of --radius around --around instead of a lasso')


def _add_track_options(parser: argparse.ArgumentParser):
    defaults = TrackOptions.default()
    group = parser.add_argument_group('tracking options')
    group.add_argument('--initial-step', type=float, default=defaults.initial_step)
    group.add_argument('--newton-tol', type=float, default=defaults.newton_tol)
    group.add_argument('--max-newton-iters', type=int, default=defaults.max_newton_iters)
    group.add_argument('--safety-factor', type=float, default=defaults.safety_factor)
    group.add_argument('--max-halvings', type=int, default=defaults.max_halvings)
    group.add_argument('--cross-check', action='store_true')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='abel-lab',
        description='Numerical monodromy of polynomial families and commutator-closure certificates.',
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--verbose', '-v', action='store_true', help='log at DEBUG level on stderr')
    parser.add_argument('--format', help='output format (json by default; see each subcommand)')
    parser.add_argument('--output', '-o', help='write to this file instead of stdout')
    sub = parser.add_subparsers(dest='command', required=True, metavar='SUBCOMMAND')

    p = sub.add_parser('branch-points', help='values of a where p_a has a multiple root')
    _add_family(p)
    p.add_argument('--tol', type=float, default=1e-7, help='clustering tolerance')

    p = sub.add_parser('track', help='continue the roots along a path; json, csv or svg')
    _add_family(p)
    _add_path(p)
    p.add_argument('--start-roots', help='comma-separated roots at the start, in the numbering to use')
    _add_track_options(p)

    p = sub.add_parser('monodromy', help='lasso permutations and the generated group')
    _add_family(p)
    p.add_argument('--base', default='0')
    _add_track_options(p)

    p = sub.add_parser('certify', help='commutator-closure certificate')
    _add_family(p)
    p.add_argument('--base', default='0')
    p.add_argument('--max-depth', type=int, default=10)
    _add_track_options(p)

    p = sub.add_parser('radical-eval', help='all branch values of a radical formula')
    p.add_argument('--formula', help='levels separated by newlines or ";", e.g. "z1^2 = a0^2 - 4; z2^3 = (-a0 + z1)/2"')
    p.add_argument('--coeffs', help='comma-separated coefficient values a0,a1,...')
    p.add_argument('--cubic-report', action='store_true', help='check written cubic formulas against the root oracle')
    p.add_argument('--samples', type=int, default=20, help='random a values in the unit disk for --cubic-report')
    p.add_argument('--seed', type=int, default=0)

    p = sub.add_parser('cautious', help='whether a closed path is cautious for a formula')
    p.add_argument('--formula', required=True)
    p.add_argument('--coeff', action='append', help='coefficient a_i as a function of a (repeat; default a0 = a)')
    _add_path(p)
    _add_track_options(p)

    p = sub.add_parser('perm', help='permutation arithmetic in 1-based cycle notation')
    p.add_argument('--cycles', help='e.g. "(1 2)(3 4 5)"')
    p.add_argument('--n', type=int, help='number of points (default: largest label)')
    p.add_argument('--with', dest='other', help='second permutation: composition and commutator')
    p.add_argument('--generate', nargs='+', metavar='CYCLES', help='generators: group order, tag and closure orders')
    return parser


def _track_options(args) -> TrackOptions:
    return TrackOptions(
        initial_step=args.initial_step, newton_tol=args.newton_tol, max_newton_iters=args.max_newton_iters,
        safety_factor=args.safety_factor, max_halvings=args.max_halvings, cross_check=args.cross_check,
    ).validated()


def _path_from_args(args, f: PolyFamily | None = None) -> ParamPath:
    if args.path:
        return path_from_json(args.path)
    base = parse_complex(args.base)
    if args.around is None:
        raise UsageError("A path needs --path or --around")
    target = parse_complex(args.around)
    if args.circle:
        if args.radius is None:
            raise UsageError("--circle needs --radius")
        return circle(target, args.radius, args.turns)
    radius = args.radius
    if radius is None:
        others = branch_points(f).points if f is not None and f.n >= 2 else ()
        radius = default_lasso_radius(base, target, others)
    return compile_lasso(Lasso(base, target, radius, args.turns))


def _cmd_branch_points(args) -> tuple[dict, str]:
    f = parse_family(args.family)
    found = branch_points(f, args.tol)
    doc = {
        'schema_version': SCHEMA_VERSION,
        'family': format_family(f),
        'branch_points': [format_complex(b) for b in found.points],
        'excluded': [format_complex(b) for b in found.excluded],
        'residual': float(f"{found.residual:.12g}"),
    }
    return doc, '\n'.join(doc['branch_points'])


def _cmd_track(args) -> tuple[dict, str]:
    f = parse_family(args.family)
    path = _path_from_args(args, f)
    start = _complex_list(args.start_roots) if args.start_roots else None
    result = track(f, path, start, _track_options(args))
    match args.format:
        case 'csv':
            return {}, trajectories_to_csv(result).rstrip('\n')
        case 'svg':
            return {}, plot_trajectories(result, path).rstrip('\n')
    doc = {
        'schema_version': SCHEMA_VERSION,
        'family': format_family(f),
        'path': path_to_json(path),
        'closed': path.closed,
        'start_roots': [format_complex(z) for z in result.start_roots],
        'final_roots': [format_complex(z) for z in result.final_roots],
        'permutation_cycles': format_cycles(result.perm) if result.perm is not None else None,
        'permutation': list(result.perm.images) if result.perm is not None else None,
        'steps_taken': result.steps_taken,
        'min_separation_seen': (
            float(f"{result.min_separation_seen:.12g}") if math.isfinite(result.min_separation_seen) else None
        ),
    }
    if result.cross_check_error is not None:
        doc['cross_check_error'] = float(f"{result.cross_check_error:.12g}")
    return doc, ''


def _cmd_monodromy(args) -> tuple[dict, str]:
    report = monodromy_report(parse_family(args.family), parse_complex(args.base), _track_options(args))
    return report_to_json(report), ''


def _cmd_certify(args) -> tuple[dict, str]:
    if args.max_depth < 0:
        raise UsageError("--max-depth must be >= 0")
    certificate = abel_certificate(
        parse_family(args.family), args.max_depth, parse_complex(args.base), _track_options(args)
    )
    doc = certificate_to_json(certificate)
    return doc, f"{doc['verdict']} (closure orders {', '.join(map(str, doc['closure_orders']))})"


def _cmd_radical_eval(args) -> tuple[dict, str]:
    if args.cubic_report:
        rng = np.random.default_rng(args.seed)
        radius = np.sqrt(rng.uniform(0, 1, args.samples))
        a_values = radius * np.exp(2j * np.pi * rng.uniform(0, 1, args.samples))
        variants = cubic_variant_report(a_values)
        doc = {
            'schema_version': SCHEMA_VERSION,
            'polynomial': 'x^3 - 3*x + a',
            'samples': args.samples,
            'variants': [
                {
                    'name': v.name,
                    'formula': v.formula.format(),
                    'validated': v.validated,
                    'worst_error': float(f"{v.worst_error:.12g}") if math.isfinite(v.worst_error) else None,
                }
                for v in variants
            ],
        }
        return doc, '\n'.join(f"{v.name}: {'ok' if v.validated else 'FAILS'}" for v in variants)
    if not (args.formula and args.coeffs):
        raise UsageError("radical-eval needs --formula and --coeffs (or --cubic-report)")
    rf = RadicalFormula.parse(args.formula)
    tower = evaluate_tower(rf, _complex_list(args.coeffs))
    doc = {
        'schema_version': SCHEMA_VERSION,
        'formula': rf.format(),
        'levels': [
            {'level': j, 'values': [format_complex(z) for z in tower.values(j)], 'collapsed': tower.collapsed[j - 1]}
            for j in range(1, len(rf.levels) + 1)
        ],
    }
    return doc, '\n'.join(format_complex(z) for z in tower.top)


def _cmd_cautious(args) -> tuple[dict, str]:
    rf = RadicalFormula.parse(args.formula)
    path = _path_from_args(args)
    cp = CoeffPath.of(args.coeff, path) if args.coeff else CoeffPath.identity(path)
    perms = track_tower(rf, cp, _track_options(args))
    doc = {
        'schema_version': SCHEMA_VERSION,
        'formula': rf.format(),
        'path': path_to_json(path),
        'level_permutations': [format_cycles(p) for p in perms],
        'cautious': all(p.is_identity for p in perms),
    }
    return doc, ''


def _cmd_perm(args) -> tuple[dict, str]:
    doc: dict = {'schema_version': SCHEMA_VERSION}
    if args.generate:
        gens = [parse_cycles(g, args.n) for g in args.generate]
        n = max(g.n for g in gens)
        gens = [parse_cycles(g, n) for g in args.generate]
        group = generate(PermSet.of(gens, n))
        doc['group_order'] = group.order
        doc['group_tag'] = group_tag(group)
        doc['closure_orders'] = [g.order for g in derived_series(group, 10)]
        doc['derived_depth_to_trivial'] = derived_depth_to_trivial(group, 10)
    if args.cycles:
        s = parse_cycles(args.cycles, args.n)
        t = parse_cycles(args.other, args.n) if args.other else None
        if t is not None and t.n != s.n:
            n = max(s.n, t.n)
            s, t = parse_cycles(args.cycles, n), parse_cycles(args.other, n)
        doc.update({
            'permutation': format_cycles(s),
            'images': list(s.images),
            'cycle_type': list(cycle_type(s)),
            'order': order(s),
            'is_even': is_even(s),
            'inverse': format_cycles(inverse(s)),
        })
        if t is not None:
            doc['with'] = format_cycles(t)
            doc['compose'] = format_cycles(compose(s, t))
            doc['commutator'] = format_cycles(commutator(s, t))
    elif not args.generate:
        raise UsageError("perm needs --cycles or --generate")
    return doc, doc.get('permutation', str(doc.get('group_order', '')))


_COMMANDS = {
    'branch-points': _cmd_branch_points,
    'track': _cmd_track,
    'monodromy': _cmd_monodromy,
    'certify': _cmd_certify,
    'radical-eval': _cmd_radical_eval,
    'cautious': _cmd_cautious,
    'perm': _cmd_perm,
}


def _emit(text: str, output: str | None):
    if output:
        with open(output, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text + '\n')
    else:
        sys.stdout.write(text + '\n')


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr,
    )
    allowed = _FORMATS[args.command]
    if args.format is not None and args.format not in allowed:
        parser.error(f"argument --format: '{args.format}' is not available for {args.command} (choose from {', '.join(allowed)})")
    try:
        doc, text = _COMMANDS[args.command](args)
    except MonodromyLabError as e:
        print(f"{e.error_name}: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"{parser.prog} {args.command}: error: {e}", file=sys.stderr)
        return 2
    if args.format in (None, 'json'):
        _emit(json.dumps(doc, indent=2), args.output)
    else:
        _emit(text, args.output)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    """Console-script entry point; argparse usage errors exit with status 2 on their own."""
    return run(argv)


if __name__ == '__main__':
    sys.exit(main())
