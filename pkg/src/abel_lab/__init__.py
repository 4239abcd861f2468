from version import __version__
from .perm_group import (
    Permutation, PermSet, compose, commutator, cycle_decomposition, derived_depth_to_trivial,
    even_as_commutators_certificate, format_cycles, generate, inverse, is_even, parse_cycles,
)
from .tracker import TrackOptions, TrackResult, canonical_numbering, monodromy_perm, track
from .radical_formula import (
    CoeffPath, RadicalFormula, adjoin_root, compose_formulas, evaluate_tower, is_cautious, track_tower,
)
from .certify import AbelCertificate, MonodromyReport, Verdict, abel_certificate, monodromy_report, product_family

__all__ = [
    "__version__",
    "Permutation", "PermSet", "compose", "commutator", "cycle_decomposition", "derived_depth_to_trivial",
    "even_as_commutators_certificate", "format_cycles", "generate", "inverse", "is_even", "parse_cycles",
    "TrackOptions", "TrackResult", "canonical_numbering", "monodromy_perm", "track",
    "CoeffPath", "RadicalFormula", "adjoin_root", "compose_formulas", "evaluate_tower", "is_cautious",
    "track_tower",
    "AbelCertificate", "MonodromyReport", "Verdict", "abel_certificate", "monodromy_report", "product_family",
]
