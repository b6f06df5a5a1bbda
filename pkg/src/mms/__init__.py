"""Limits at infinity of Sobolev functions along infinite curves.

Computational criteria on discrete and model metric measure spaces:
dyadic volume-growth functionals, coordinate-weight integrals, discrete
p-modulus of path families, annular chain checking, weak polar
coordinate verification, and the divergent-function construction that
certifies the sharp side of the growth dichotomy.
"""

from .counterexample import (
    AnnulusMismatchError,
    BlockDensity,
    BlockSequence,
    BlockShortfallError,
    DivergenceReport,
    PreconditionError,
    budget_bound,
    build_density,
    distance_function,
    divergence_check,
    greedy_blocks,
)
from .experiments import (
    ProbeRow,
    SandwichRow,
    SweepRow,
    TrendReport,
    TwoEndsConstruction,
    classify_trend,
    example43_sweep,
    thm12_probe,
    thm13_sandwich,
    two_ends_demo,
)
from .graph_space import (
    ChainReport,
    ChainWitness,
    MalformedPathError,
    SpaceGraph,
    build_graph,
    chain_check,
    graph_from_json,
    graph_to_json,
    grid_graph,
    halfline_graph,
    line_graph,
    poincare_probe,
    profile_from_graph,
    tree_graph,
    verify_chain_report,
)
from .growth_criteria import (
    DIVERGENT,
    FINITE,
    INCONCLUSIVE,
    CompareReport,
    GrowthReport,
    R_weight,
    compare_R,
    script_R,
)
from .model_spaces import (
    AhlforsModel,
    AsymptoticClass,
    GenerationWeight,
    KRegularTree,
    ModelSpace,
    MuckenhouptEstimate,
    NonIntegrableWeightError,
    PowerWeightedEuclidean,
    RadialPower,
    RadialProfile,
    WeightedHalfLine,
    annulus_masses,
    model_from_json,
    model_to_json,
    muckenhoupt_constant,
    sphere_area,
    standard_ball_sample,
)
from .modulus import (
    Condenser,
    CondenserSweep,
    Density,
    ExplicitPaths,
    FamilyError,
    ModulusResult,
    OverflowHypothesisError,
    TruncatedRays,
    condenser_sequence,
    modulus,
    overflow_bound,
)
from .polar import (
    ExclusionWitness,
    PolarReport,
    PolarSystem,
    PolarViolationError,
    TruncatedFamily,
    cantor_diamond,
    euclidean_spherical,
    hat_truncate,
    polar_lhs,
    semmes_check,
    standard_suite,
    system_from_json,
    system_to_json,
    tree_polar,
    verify_polar,
    wedge_strip,
)

__all__ = [
    "AhlforsModel",
    "AnnulusMismatchError",
    "AsymptoticClass",
    "BlockDensity",
    "BlockSequence",
    "BlockShortfallError",
    "ChainReport",
    "ChainWitness",
    "CompareReport",
    "Condenser",
    "CondenserSweep",
    "Density",
    "DivergenceReport",
    "DIVERGENT",
    "ExclusionWitness",
    "ExplicitPaths",
    "FamilyError",
    "FINITE",
    "GenerationWeight",
    "GrowthReport",
    "INCONCLUSIVE",
    "KRegularTree",
    "MalformedPathError",
    "ModelSpace",
    "ModulusResult",
    "MuckenhouptEstimate",
    "NonIntegrableWeightError",
    "OverflowHypothesisError",
    "PolarReport",
    "PolarSystem",
    "PolarViolationError",
    "PowerWeightedEuclidean",
    "PreconditionError",
    "ProbeRow",
    "RadialPower",
    "RadialProfile",
    "SandwichRow",
    "SpaceGraph",
    "SweepRow",
    "TrendReport",
    "TruncatedFamily",
    "TruncatedRays",
    "TwoEndsConstruction",
    "WeightedHalfLine",
    "annulus_masses",
    "budget_bound",
    "build_density",
    "build_graph",
    "cantor_diamond",
    "chain_check",
    "classify_trend",
    "compare_R",
    "condenser_sequence",
    "distance_function",
    "divergence_check",
    "euclidean_spherical",
    "example43_sweep",
    "graph_from_json",
    "graph_to_json",
    "greedy_blocks",
    "grid_graph",
    "halfline_graph",
    "hat_truncate",
    "line_graph",
    "model_from_json",
    "model_to_json",
    "modulus",
    "muckenhoupt_constant",
    "overflow_bound",
    "poincare_probe",
    "polar_lhs",
    "profile_from_graph",
    "R_weight",
    "script_R",
    "semmes_check",
    "sphere_area",
    "standard_ball_sample",
    "standard_suite",
    "system_from_json",
    "system_to_json",
    "thm12_probe",
    "thm13_sandwich",
    "tree_graph",
    "tree_polar",
    "two_ends_demo",
    "verify_chain_report",
    "verify_polar",
    "wedge_strip",
]

__version__ = "0.1.0"
