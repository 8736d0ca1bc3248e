"""
facreg Core

Geometry, attribute spaces, logical operators, solvers and the regularizer.
"""

from .geometry import (
    derive_angles,
    make_params,
    params_to_transform,
    transform_to_params,
    validate_layout,
)

from .attrspace import (
    adjacency_delta,
    cluster_attribute,
    build_model_spaces,
    orientation_classes,
)

from .logic import (
    Gate,
    encode_gate,
    same,
    enum_expr,
    prune_support,
    selection_vector,
)

from .solver import (
    solve_exhaustive,
    solve_bb,
    check_feasible,
)

from .lp_writer import export_lp, write_lp

from .config import (
    Config,
    SolverConfig,
    WeightMode,
    load_config,
)

from .regularizer import (
    Residuals,
    Weights,
    VarMap,
    RunReport,
    compute_residuals,
    build_bip,
    decode,
    regularize,
    compare_pruning,
)

__all__ = [
    # Geometry
    "derive_angles",
    "make_params",
    "params_to_transform",
    "transform_to_params",
    "validate_layout",
    # Attribute spaces
    "adjacency_delta",
    "cluster_attribute",
    "build_model_spaces",
    "orientation_classes",
    # Logic
    "Gate",
    "encode_gate",
    "same",
    "enum_expr",
    "prune_support",
    "selection_vector",
    # Solvers
    "solve_exhaustive",
    "solve_bb",
    "check_feasible",
    "export_lp",
    "write_lp",
    # Config
    "Config",
    "SolverConfig",
    "WeightMode",
    "load_config",
    # Regularizer
    "Residuals",
    "Weights",
    "VarMap",
    "RunReport",
    "compute_residuals",
    "build_bip",
    "decode",
    "regularize",
    "compare_pruning",
]
