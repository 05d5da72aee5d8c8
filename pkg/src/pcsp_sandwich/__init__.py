"""Tools for checking that a promise CSP has no small tractable sandwiched
structure, built on homomorphism search and affine solving over Z_p."""

from .affine import (
    AffineRelation,
    AffineStructure,
    ModMatrix,
    affine_closure,
    gauss_solve,
    pcsp_decide_via_sandwich,
    solve_affine_csp,
    to_affine_structure,
)
from .constructions import build_thm1, build_thm2, build_thm2_witness
from .digraph import (
    Digraph,
    classify_graph_csp,
    classify_smooth_digraph_csp,
    smooth_part,
    solve_cycle_union_csp,
)
from .hom import (
    CspInstance,
    ObstructionWitness,
    Status,
    check_sandwich,
    compose_cyclic,
    core_of,
    find_cyclic_polymorphism,
    find_homomorphism,
    is_homomorphism,
    verify_obstruction_witness,
)
from .kernels import BACKEND
from .structcore import (
    BudgetExceeded,
    Extensional,
    FiniteStructure,
    FunctionTable,
    Homomorphism,
    Intensional,
    StructureError,
    is_cyclic,
)
from .verify import (
    refutation_certificate,
    verify_lemma32,
    verify_lemma41,
    verify_thm2_claims,
    verify_thm31,
)

__version__ = "0.1.0"

__all__ = [
    "AffineRelation",
    "AffineStructure",
    "ModMatrix",
    "affine_closure",
    "gauss_solve",
    "pcsp_decide_via_sandwich",
    "solve_affine_csp",
    "to_affine_structure",
    "build_thm1",
    "build_thm2",
    "build_thm2_witness",
    "Digraph",
    "classify_graph_csp",
    "classify_smooth_digraph_csp",
    "smooth_part",
    "solve_cycle_union_csp",
    "CspInstance",
    "ObstructionWitness",
    "Status",
    "check_sandwich",
    "compose_cyclic",
    "core_of",
    "find_cyclic_polymorphism",
    "find_homomorphism",
    "is_homomorphism",
    "verify_obstruction_witness",
    "BACKEND",
    "BudgetExceeded",
    "Extensional",
    "FiniteStructure",
    "FunctionTable",
    "Homomorphism",
    "Intensional",
    "StructureError",
    "is_cyclic",
    "refutation_certificate",
    "verify_lemma32",
    "verify_lemma41",
    "verify_thm2_claims",
    "verify_thm31",
]
