"""Exact dominance regions of cluster algebras and the machinery behind them."""

from .affine import (
    DeltaData,
    NeighboringStructure,
    comp_c,
    comp_c_bar,
    delta_acyclic,
    delta_general,
    expand_sequence,
    is_neighboring,
    neighboring_structure,
)
from .dominance import (
    DominanceResult,
    PointCertificate,
    Segment,
    affine_segment_predict,
    certify_point,
    dominance,
    dominance_piece,
    fold_slice_check,
    integral_dominance,
    verify_finite_bipartite,
    verify_segment,
)
from .errors import DomainError
from .exchange import (
    ExchangeMatrix,
    ExtendedExchangeMatrix,
    FoldingAutomorphism,
    MutationSequence,
    block_decompose,
    cartan_companion,
    check_stable,
    classify,
    ef_matrices,
    fold,
    is_bipartite,
    is_salient,
    mutate,
    mutate_extended,
    square_extension,
    symmetrizer,
)
from .frames import (
    Frame,
    find_maximal_green,
    find_maximal_red,
    frame_along,
    gvector_cone,
    is_green,
    is_red,
)
from .mutation_maps import eta, eta_extended, linearization, map_polyhedron_exact, map_polyhedron_hull
from .polyhedra import (
    HPolyhedron,
    PointedPolyhedron,
    Polyhedron,
    RegionUnion,
    as_segment,
    contains_line,
    dual_description,
    intersect,
    is_singleton,
    lattice_points_on_segment,
)

__version__ = "0.1.0"
