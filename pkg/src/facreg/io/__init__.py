"""
facreg I/O

Layout files, synthetic ground truth and report writers.
"""

from .layout_io import (
    ComponentRecord,
    LayoutRecord,
    parse_layout,
    load_layout,
    dumps_layout,
    save_layout,
)

from .synthetic import SyntheticSpec, generate_synthetic

from .reports import (
    STATS_HEADER,
    write_json,
    write_stats_csv,
    write_sweep_csv,
)

__all__ = [
    "ComponentRecord",
    "LayoutRecord",
    "parse_layout",
    "load_layout",
    "dumps_layout",
    "save_layout",
    "SyntheticSpec",
    "generate_synthetic",
    "STATS_HEADER",
    "write_json",
    "write_stats_csv",
    "write_sweep_csv",
]
