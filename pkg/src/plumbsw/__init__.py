"""Normalized Seiberg-Witten invariants of negative definite plumbed
3-manifolds: surgery graphs, universal abelian covers, and the covering
additivity check, with a lattice-cohomology brute-force oracle."""

from .builders import (
    KnotSpec,
    SurgeryGraph,
    hj_continued_fraction,
    evaluate_hj,
    surgery_graph,
    superisolated_compat,
    torus_knot_graph,
)
from .covers import (
    BranchData,
    CoverResult,
    SuspensionGraph,
    cyclic_cover,
    suspension_graph,
    uac_graph,
    uac_surgery,
)
from .cubes import Inconclusive, WeightedBox, lattice_eu, sublevel_betti
from .graph import PlumbingGraph, blow_up, minimal_model
from .lattice import DualVector, Lattice, NotNegativeDefinite
from .series import alexander_polynomial, equivariant_series, polynomial_part, torus_knot_alexander
from .sw import (
    CapReport,
    SWReport,
    cap_check,
    integral_surgery_table,
    s_invariant,
    suspension_pg,
    sw_table,
)

__all__ = [
    "BranchData",
    "CapReport",
    "CoverResult",
    "DualVector",
    "Inconclusive",
    "KnotSpec",
    "Lattice",
    "NotNegativeDefinite",
    "PlumbingGraph",
    "SWReport",
    "SurgeryGraph",
    "SuspensionGraph",
    "WeightedBox",
    "alexander_polynomial",
    "blow_up",
    "cap_check",
    "cyclic_cover",
    "equivariant_series",
    "evaluate_hj",
    "hj_continued_fraction",
    "integral_surgery_table",
    "lattice_eu",
    "minimal_model",
    "polynomial_part",
    "s_invariant",
    "sublevel_betti",
    "surgery_graph",
    "superisolated_compat",
    "suspension_graph",
    "suspension_pg",
    "sw_table",
    "torus_knot_alexander",
    "torus_knot_graph",
    "uac_graph",
    "uac_surgery",
]
