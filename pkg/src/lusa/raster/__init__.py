"""Raster multi-criteria evaluation: grids, algebra, WLC suitability."""

from .edt import BACKEND as EDT_BACKEND
from .edt import squared_edt
from .grid import (
    ConfigError,
    Raster,
    RasterParseError,
    rasters_equal,
    read_ascii_grid,
    read_raster,
    write_ascii_grid,
    write_pgm,
    write_raster,
)
from .ops import (
    ConstraintSpec,
    FactorSpec,
    ScenarioConfig,
    ScenarioError,
    ScenarioResult,
    TransformError,
    build_constraint,
    constraints_from_digest,
    distance_transform,
    reclassify,
    run_scenario,
    standardize,
    wlc_combine,
    write_scenario_outputs,
)

__all__ = [
    "EDT_BACKEND", "squared_edt", "ConfigError", "Raster", "RasterParseError",
    "rasters_equal", "read_ascii_grid", "read_raster", "write_ascii_grid",
    "write_pgm", "write_raster", "ConstraintSpec", "FactorSpec",
    "ScenarioConfig", "ScenarioError", "ScenarioResult", "TransformError",
    "build_constraint", "constraints_from_digest", "distance_transform",
    "reclassify", "run_scenario", "standardize", "wlc_combine",
    "write_scenario_outputs",
]
