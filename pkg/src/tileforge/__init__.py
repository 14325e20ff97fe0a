"""tileforge: self-affine tiles and attractors.

Construction and verification of multidimensional digit-expansion
attractors, the contact-matrix tile test, box tiles in cyclic normal form,
tile-generated Haar wavelet systems, and the complete classification of
one-dimensional integer tiles as direct sums of arithmetic progressions.
"""

__version__ = "0.1.0"

from .lattice import det, is_expanding, residue_of, residue_system, validate_digits
from .attractor import (
    AttractorApprox,
    ContactMatrix,
    Raster,
    ResourceLimitError,
    TileReport,
    approximate,
    bounding_box,
    measure_upper,
    rasterize,
    self_similarity_residual,
    shift_cover_layers,
    tile_check_exact,
    unit_cell_cover,
)
from .boxtile import (
    BoxForm,
    MonomialStructure,
    NotMonomialError,
    ParallelepipedReport,
    box_digits,
    build_cyclic_matrix,
    is_parallelepiped,
    monomial_structure,
    suggested_depth,
    tensor_product,
)
from .haar import (
    HaarSystem,
    HyperplaneBasis,
    build_wavelets,
    exact_gram,
    hyperplane_basis,
    inner_product,
    raster_gram,
    shift_orthonormality,
)
from .oned import (
    CollisionError,
    NotSimpleError,
    NotTilingError,
    Progression,
    cancel,
    classify,
    direct_sum,
    enumerate_simple,
    is_l_set,
    poly_eq,
    poly_mul,
    poly_of_set,
    progression_family,
    segments_to_intset,
    tiling_oracle,
)

__all__ = [
    "AttractorApprox",
    "BoxForm",
    "CollisionError",
    "ContactMatrix",
    "HaarSystem",
    "HyperplaneBasis",
    "MonomialStructure",
    "NotMonomialError",
    "NotSimpleError",
    "NotTilingError",
    "ParallelepipedReport",
    "Progression",
    "Raster",
    "ResourceLimitError",
    "TileReport",
    "approximate",
    "bounding_box",
    "box_digits",
    "build_cyclic_matrix",
    "build_wavelets",
    "cancel",
    "classify",
    "det",
    "direct_sum",
    "enumerate_simple",
    "exact_gram",
    "hyperplane_basis",
    "inner_product",
    "is_expanding",
    "is_l_set",
    "is_parallelepiped",
    "measure_upper",
    "monomial_structure",
    "poly_eq",
    "poly_mul",
    "poly_of_set",
    "progression_family",
    "raster_gram",
    "rasterize",
    "residue_of",
    "residue_system",
    "segments_to_intset",
    "self_similarity_residual",
    "shift_cover_layers",
    "shift_orthonormality",
    "suggested_depth",
    "tensor_product",
    "tile_check_exact",
    "tiling_oracle",
    "unit_cell_cover",
    "validate_digits",
]
