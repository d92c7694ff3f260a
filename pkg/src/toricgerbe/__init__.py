"""Exact integer toolkit for stacky fans, Gale duals and toric gerbes."""

from .abgroup import DiagGroup, FgAbGroup, GroupError, GroupHom
from .exactla import cokernel, hermite_normal_form, kernel_basis, smith_normal_form, solve_in_image
from .galedual import gale_dual, verify_gale_sequences
from .gerbe import (
    ExtensionError,
    ExtensionSpec,
    canonical_injection,
    gerbe_stacky_fan,
    identity_extension,
    rigidify,
)
from .matrix import IntMatrix
from .momentangle import SimplicialComplex, complement_cohomology, verify_lemma
from .stackyfan import Fan, StackyFan, codim_V, quotient_presentation, validate_stacky_fan

__version__ = "0.1.0"

__all__ = [
    "DiagGroup", "ExtensionError", "ExtensionSpec", "Fan", "FgAbGroup", "GroupError", "GroupHom",
    "IntMatrix", "SimplicialComplex", "StackyFan", "canonical_injection", "codim_V", "cokernel",
    "complement_cohomology", "gale_dual", "gerbe_stacky_fan", "hermite_normal_form",
    "identity_extension", "kernel_basis", "quotient_presentation", "rigidify", "smith_normal_form",
    "solve_in_image", "validate_stacky_fan", "verify_gale_sequences", "verify_lemma",
]
