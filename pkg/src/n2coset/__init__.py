"""Characters, branching rules and fusion for the N=2 superconformal minimal models
realised as cosets of sl2 minimal models by a Heisenberg algebra."""
from .catalog import (Algebra, Family, GrothVector, MinimalModel, ModuleLabel, canonical_label,
                      conjugate, fock, ghost, groth_decompose, highest_weight, irreducible_class,
                      kac_table, n2, normal_form, orbits, sl2, unitary_labels, validate, vir)
from .characters import (Method, Regime, branch_verify, char_ghost, char_n2, char_sl2,
                         magic_check, ses_char_check)
from .errors import N2CosetError
from .fusion import (FusionCoeffQuery, FusionResult, fuse_exact, fuse_unitary, fusion_coeff,
                     groth_fuse_n2, groth_fuse_sl2, ring_check)
from .labels import format_label, parse_label
from .series import Monomial, Series2

__version__ = "0.1.0"

__all__ = [
    "Algebra", "Family", "GrothVector", "MinimalModel", "ModuleLabel", "canonical_label",
    "conjugate", "fock", "ghost", "groth_decompose", "highest_weight", "irreducible_class",
    "kac_table", "n2", "normal_form", "orbits", "sl2", "unitary_labels", "validate", "vir",
    "Method", "Regime", "branch_verify", "char_ghost", "char_n2", "char_sl2", "magic_check",
    "ses_char_check", "N2CosetError", "FusionCoeffQuery", "FusionResult", "fuse_exact",
    "fuse_unitary", "fusion_coeff", "groth_fuse_n2", "groth_fuse_sl2", "ring_check",
    "format_label", "parse_label", "Monomial", "Series2",
]
