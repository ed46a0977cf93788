"""Model functors: elementary functors, presentations with equivalence
oracles, groupoid extraction, and pre-component functors."""

from .elementary import (
    ElementaryModelFunctor,
    elementary_brute,
    elementary_count,
    elementary_quasipolynomial,
)
from .extraction import (
    CalibrationFrame,
    ExtractedGroupoid,
    NotCalibrated,
    Quadruple,
    Quintuple,
    Unstable,
    analyze_pair,
    extract_groupoid,
    mf_count_via_groupoid,
)
from .model import (
    AxiomReport,
    MFPair,
    ModelFunctorPresentation,
    apply_injection,
    apply_permutation,
    broken_axiom3_presentation,
    broken_symmetry_presentation,
    check_equivalence,
    elementary_embedding,
    mf_classes,
    mf_orbit_count_direct,
    roots_of_unity,
    trivial_presentation,
    verify_axioms,
)
from .precomponent import (
    PreComponentPresentation,
    broken_compatibility_presentation,
    planes_precomponent,
    precomp_count,
    precomp_quasipolynomial,
    verify_compatibility,
)

__all__ = [
    "AxiomReport",
    "CalibrationFrame",
    "ElementaryModelFunctor",
    "ExtractedGroupoid",
    "MFPair",
    "ModelFunctorPresentation",
    "NotCalibrated",
    "PreComponentPresentation",
    "Quadruple",
    "Quintuple",
    "Unstable",
    "analyze_pair",
    "apply_injection",
    "apply_permutation",
    "broken_axiom3_presentation",
    "broken_compatibility_presentation",
    "broken_symmetry_presentation",
    "check_equivalence",
    "elementary_brute",
    "elementary_count",
    "elementary_embedding",
    "elementary_quasipolynomial",
    "extract_groupoid",
    "mf_classes",
    "mf_count_via_groupoid",
    "mf_orbit_count_direct",
    "planes_precomponent",
    "precomp_count",
    "precomp_quasipolynomial",
    "roots_of_unity",
    "trivial_presentation",
    "verify_axioms",
    "verify_compatibility",
]
