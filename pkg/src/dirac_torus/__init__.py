"""Deformed Dirac operators on the noncommutative torus."""

from .algebra import (
    GNSVector,
    MeasureCoeffs,
    Symbol,
    gns_apply,
    modular_apply,
    state_omega,
    trace_tau,
    weyl_mul,
    weyl_star,
)
from .circle import (
    GOLDEN,
    CircleDiffeo,
    CircleLift,
    Cocycle,
    GrowthTable,
    growth_sequence,
    iterate_lift,
    make_diffeo,
    radon_nikodym,
)
from .dirac import (
    DiracBlock,
    SpectrumReport,
    assemble_block,
    block_spectrum,
    inverse_norm_report,
    structure_checks,
)
from .fredholm import (
    ElementSpec,
    FredholmContext,
    circle_example,
    deformed_derivation,
    fredholm_commutator,
    triple_norm,
)
from .hill import (
    HillProblem,
    hill_assemble,
    hill_compare,
    hill_eigenvalues,
    monodromy,
    reconstruct_eigenvector,
)
from .liouville import ContinuedFraction, liouville_report

__all__ = [
    "GNSVector", "MeasureCoeffs", "Symbol", "gns_apply", "modular_apply", "state_omega",
    "trace_tau", "weyl_mul", "weyl_star",
    "GOLDEN", "CircleDiffeo", "CircleLift", "Cocycle", "GrowthTable", "growth_sequence",
    "iterate_lift", "make_diffeo", "radon_nikodym",
    "DiracBlock", "SpectrumReport", "assemble_block", "block_spectrum",
    "inverse_norm_report", "structure_checks",
    "ElementSpec", "FredholmContext", "circle_example", "deformed_derivation",
    "fredholm_commutator", "triple_norm",
    "HillProblem", "hill_assemble", "hill_compare", "hill_eigenvalues", "monodromy",
    "reconstruct_eigenvector",
    "ContinuedFraction", "liouville_report",
]
