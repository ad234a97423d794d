"""Oblique quantum correlations toolkit."""

from .backend import active_lane
from .channels import (
    CompositeChannel,
    ConditionNumberError,
    ObliqueBasis,
    ObliqueChannel,
    apply_channel,
    apply_composite,
    decompose_fixed_point,
    dual_basis,
    is_fixed_point,
)
from .qmat import (
    DensityMatrix,
    hermitian_eigensystem,
    make_density,
    mutual_information,
    partial_trace,
    tensor,
    von_neumann_entropy,
)
from .conjecture import SearchConfig, certify, delta_i, run_search
from .hierarchy import hierarchy_report
from .measures import (
    MEASURES,
    MeasureResult,
    OptimizerConfig,
    discord_geometric,
    discord_global,
    discord_global_geometric,
    discord_info,
    hs_distance,
    oblique_geometric,
    oblique_geometric_phi,
    oblique_global_geometric,
    oblique_global_info,
    oblique_info,
)
from .states import (
    GlobalZodSpec,
    SeparableSpec,
    ZodSpec,
    bell_state,
    build_global_zod,
    build_separable,
    build_zod,
    hierarchy_witnesses,
    random_density,
    random_oblique_basis,
)

__version__ = "0.1.0"
