"""Combinatorial calculus of geometric types of Markov partitions."""

from .algebra import (
    DoubleBoundaryReport,
    MixingReport,
    has_double_boundary,
    mixing_report,
    perron_root,
    power,
)
from .boundary import (
    BoundaryCodeTable,
    Code,
    T_related,
    boundary_code_table,
    format_code,
    gamma,
    has_corner_property,
    parse_code,
    s_related,
    stratum,
    u_related,
    upsilon,
)
from .core import (
    GeometricType,
    IncidenceMatrix,
    ValidationReport,
    incidence_matrix,
    invert,
    parse_geometric_type,
    serialize,
    validate,
)
from .obstructions import (
    ConditionWitness,
    ObstructionReport,
    PAVerdict,
    condition_type1,
    condition_type2,
    condition_type3,
    impasse_property,
    is_pseudo_anosov_class,
    scan_obstructions,
    verify_witness,
)
from .oracle import (
    AffineRealization,
    Ribbon,
    affine_concretization,
    geometric_impasse,
    geometric_obstructions,
    iterate_type,
    realizer_euler,
    ribbons,
)
from .surface import (
    SectorClass,
    SurfaceReport,
    euler_characteristic,
    genus,
    prong_spectrum,
    sector_classes,
    surface_report,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
