"""Duality for polarized abelian varieties, on lattices and on cohomology.

Submodules:

``exact_core``      exact integer/rational matrices, Smith form, Pfaffians
``moduli_types``    type vectors and the duality involution on them
``polarization``    alternating forms, their types and dual forms
``complex_torus``   period matrices, Riemann relations, dual tori
``fourier_mukai``   exterior algebra and the cohomological Fourier transform
``cli``             the ``polardual`` command
"""

from .exact_core import IntMatrix, RatMatrix, det, pfaffian, smith_normal_form
from .moduli_types import TypeVector, delta_type, d_dual_type, validate_type
from .polarization import (
    PolarizationForm,
    degree,
    dual_d_form,
    dual_delta_form,
    exponent,
    line_bundle_dual_form,
    standard_form,
    type_of,
)

__all__ = [
    "IntMatrix",
    "RatMatrix",
    "det",
    "pfaffian",
    "smith_normal_form",
    "TypeVector",
    "delta_type",
    "d_dual_type",
    "validate_type",
    "PolarizationForm",
    "degree",
    "dual_d_form",
    "dual_delta_form",
    "exponent",
    "line_bundle_dual_form",
    "standard_form",
    "type_of",
]

__version__ = "0.1.0"
