"""Frobenius-invariant smoothness bases for small finite fields.

Builds explicit models of F_{p^d} (Kummer, Artin-Schreier, rank-1 torus,
elliptic residue field) whose Galois action has a closed structural form,
reduces smoothness bases to Frobenius orbits, and runs index-calculus and
two-dimensional sieve engines on top.
"""

from .ffcore import (
    NEG_INF,
    Poly,
    PrimeField,
    QuotientField,
    factor,
    factorize_int,
    find_irreducible,
    is_irreducible,
    is_prime,
    kernel_basis,
    monic_irreducibles,
    poly_gcd,
    poly_invert_mod,
    poly_mul_mod,
    poly_pow_mod,
    primitive_root,
)
from .galoisrep import (
    ARTIN_SCHREIER,
    ELLIPTIC,
    KUMMER,
    TORUS,
    Representation,
    apply_frobenius,
    build_artin_schreier,
    build_kummer,
    build_torus,
    degree,
    orbit_partition,
    rep_from_json,
    verify_representation,
)
from .elliptic import (
    Curve,
    EndomorphismElement,
    Isogeny,
    build_elliptic_residue,
    ec_add,
    ec_neg,
    ec_scalar,
    ec_sub,
    translate_point,
)
from .indexcalc import (
    FactorBase,
    LogTable,
    Relation,
    build_factor_base,
    build_log_table,
    collect_relations,
    compute_logs,
    find_generator,
    individual_log,
    smooth_factor,
)
from .sieve2d import (
    BivariatePoly,
    EERelation,
    EERestriction,
    EESetup,
    JLRelation,
    JLSetup,
    NSClassEE,
    NSClassP1P1,
    PlaceClasses,
    build_place_classes,
    class_of_side_a,
    class_of_side_b,
    ee_relation,
    ee_setup,
    ee_sieve,
    effectivity_check,
    expected_dimension,
    intersection_degrees_ee,
    intersection_form_p1p1,
    jl_relation,
    jl_setup,
    jl_sieve,
    linear_system_ee,
    translate_place,
    verify_ee_relation,
)

__all__ = [
    "NEG_INF",
    "Poly",
    "PrimeField",
    "QuotientField",
    "factor",
    "factorize_int",
    "find_irreducible",
    "is_irreducible",
    "is_prime",
    "kernel_basis",
    "monic_irreducibles",
    "poly_gcd",
    "poly_invert_mod",
    "poly_mul_mod",
    "poly_pow_mod",
    "primitive_root",
    "ARTIN_SCHREIER",
    "ELLIPTIC",
    "KUMMER",
    "TORUS",
    "Representation",
    "apply_frobenius",
    "build_artin_schreier",
    "build_kummer",
    "build_torus",
    "degree",
    "orbit_partition",
    "rep_from_json",
    "verify_representation",
    "Curve",
    "EndomorphismElement",
    "Isogeny",
    "build_elliptic_residue",
    "ec_add",
    "ec_neg",
    "ec_scalar",
    "ec_sub",
    "translate_point",
    "FactorBase",
    "LogTable",
    "Relation",
    "build_factor_base",
    "build_log_table",
    "collect_relations",
    "compute_logs",
    "find_generator",
    "individual_log",
    "smooth_factor",
    "BivariatePoly",
    "EERelation",
    "EERestriction",
    "EESetup",
    "JLRelation",
    "JLSetup",
    "NSClassEE",
    "NSClassP1P1",
    "PlaceClasses",
    "build_place_classes",
    "class_of_side_a",
    "class_of_side_b",
    "ee_relation",
    "ee_setup",
    "ee_sieve",
    "effectivity_check",
    "expected_dimension",
    "intersection_degrees_ee",
    "intersection_form_p1p1",
    "jl_relation",
    "jl_setup",
    "jl_sieve",
    "linear_system_ee",
    "translate_place",
    "verify_ee_relation",
]
