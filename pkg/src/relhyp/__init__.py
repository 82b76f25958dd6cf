"""Weakly relatively hyperbolic groups at desk scale.

Free-group words and Stallings graphs, HNN extensions and amalgams with
their word problems, finite balls of relative, coset, coned-off and
Bass-Serre graphs, and exact checks of hyperbolicity, quasi-isometry and
linear isoperimetric bounds on those balls.
"""

from .complexes import (
    BudgetExceeded,
    LabeledGraph,
    bass_serre_ball,
    bass_serre_hull,
    coned_off_ball,
    coset_ball,
    edge_orbit_witness,
    relative_ball,
)
from .groups import (
    Amalgam,
    FreeAbelianGroup,
    FreeGroup,
    HNNExtension,
    SubgroupSpec,
    amalgam_embed_word,
    britton_reduce,
    canonical_form,
    group_from_json,
    is_identity,
)
from .hyperbolicity import DeltaReport, delta_four_point, delta_series, delta_slim
from .isoperimetry import Chain, chain_of_cycle, fill_cycle, hnn_decompose, verify_ip
from .qi import QIVerdict, check_qi_map, eqdef_check, lipschitz_orbit_bound
from .stallings import express_in_basis, fold, member, schreier_rep
from .words import Alphabet, Word, format_word, parse_word

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "Amalgam",
    "BudgetExceeded",
    "Chain",
    "DeltaReport",
    "FreeAbelianGroup",
    "FreeGroup",
    "HNNExtension",
    "LabeledGraph",
    "QIVerdict",
    "SubgroupSpec",
    "Word",
    "amalgam_embed_word",
    "bass_serre_ball",
    "bass_serre_hull",
    "britton_reduce",
    "canonical_form",
    "chain_of_cycle",
    "check_qi_map",
    "coned_off_ball",
    "coset_ball",
    "delta_four_point",
    "delta_series",
    "delta_slim",
    "edge_orbit_witness",
    "eqdef_check",
    "express_in_basis",
    "fill_cycle",
    "fold",
    "format_word",
    "group_from_json",
    "hnn_decompose",
    "is_identity",
    "lipschitz_orbit_bound",
    "member",
    "parse_word",
    "relative_ball",
    "schreier_rep",
    "verify_ip",
]
