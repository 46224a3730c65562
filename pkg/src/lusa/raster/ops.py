"""Raster algebra and the weighted-linear-combination suitability model.

Factors are standardized to a continuous 0-255 scale (0 = unsuitable,
255 = most suitable); constraints are Boolean masks.  The combined map
is the weight-normalized average of the factors multiplied by the
product of the constraints.  Nodata propagates through every operation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .edt import squared_edt
from .grid import ConfigError, Raster, read_raster, write_raster


class TransformError(Exception):
    pass


class ScenarioError(Exception):
    pass


def reclassify(r: Raster, table: Sequence[tuple[float, float, float]],
               default: Optional[float] = None) -> Raster:
    """Map each cell through the first containing [lo, hi] range.

    Unmatched cells get `default` (nodata when None).
    """
    ranges = [(float(lo), float(hi), float(val)) for lo, hi, val in table]
    for i, (lo, hi, _) in enumerate(ranges):
        if lo > hi:
            raise ConfigError(f"reclassify range [{lo}, {hi}] is inverted")
        for lo2, hi2, _ in ranges[i + 1:]:
            if lo <= hi2 and lo2 <= hi:
                raise ConfigError(
                    f"reclassify ranges [{lo}, {hi}] and [{lo2}, {hi2}] overlap")
    fill = r.nodata if default is None else float(default)
    out = np.full_like(r.cells, fill)
    unmatched = np.ones(r.cells.shape, dtype=bool)
    for lo, hi, val in ranges:
        hit = unmatched & (r.cells >= lo) & (r.cells <= hi)
        out[hit] = val
        unmatched &= ~hit
    out[r.nodata_mask()] = r.nodata
    return r.like(out)


def distance_transform(r: Raster, target: Optional[np.ndarray] = None) -> Raster:
    """Exact Euclidean distance in map units to the nearest target cell.

    Default target: nonzero, non-nodata cells.
    """
    if target is None:
        target = (r.cells != 0) & ~r.nodata_mask()
    target = np.asarray(target, dtype=bool)
    if not target.any():
        raise TransformError("distance transform has no target cells")
    dist = np.sqrt(squared_edt(target)) * r.cellsize
    return r.like(dist)


def standardize(r: Raster, direction: str = "increasing",
                control_points: Optional[tuple[float, float]] = None) -> Raster:
    """Piecewise-linear rescale to [0, 255] with clamping at the control points."""
    if direction not in ("increasing", "decreasing"):
        raise ConfigError(f"unknown standardize direction {direction!r}")
    nodata = r.nodata_mask()
    if control_points is not None:
        lo, hi = float(control_points[0]), float(control_points[1])
        if lo >= hi:
            raise ConfigError(f"control points ({lo}, {hi}) are not increasing")
    else:
        valid = r.cells[~nodata]
        if valid.size == 0:
            raise ConfigError("standardize: raster has no data cells")
        lo, hi = float(valid.min()), float(valid.max())
        if lo == hi:
            raise ConfigError(
                "standardize: constant raster needs explicit control points")
    scaled = np.clip((r.cells - lo) / (hi - lo), 0.0, 1.0) * 255.0
    if direction == "decreasing":
        scaled = 255.0 - scaled
    scaled[nodata] = r.nodata
    return r.like(scaled)


@dataclass
class ConstraintSpec:
    layer: str
    predicate: dict

    @staticmethod
    def validate_predicate(predicate: dict) -> None:
        known = {"value_in", "value_not_in", "distance_lt"}
        keys = set(predicate)
        if len(keys) != 1 or not keys <= known:
            raise ConfigError(f"constraint predicate must be one of {sorted(known)}")


def build_constraint(spec: ConstraintSpec, layers: dict[str, Raster]) -> Raster:
    """Boolean raster: 0 where the predicate forbids development, 1 elsewhere."""
    if spec.layer not in layers:
        raise ConfigError(f"constraint references unknown layer {spec.layer!r}")
    ConstraintSpec.validate_predicate(spec.predicate)
    r = layers[spec.layer]
    nodata = r.nodata_mask()
    if "value_in" in spec.predicate:
        values = [float(v) for v in spec.predicate["value_in"]]
        forbidden = np.isin(r.cells, values) & ~nodata
    elif "value_not_in" in spec.predicate:
        values = [float(v) for v in spec.predicate["value_not_in"]]
        forbidden = ~np.isin(r.cells, values) & ~nodata
    else:
        dist = distance_transform(r)
        forbidden = dist.cells < float(spec.predicate["distance_lt"])
    out = np.where(forbidden, 0.0, 1.0)
    out[nodata] = r.nodata
    return r.like(out)


def wlc_combine(factors: Sequence[tuple[Raster, float]],
                constraints: Sequence[Raster] = ()) -> Raster:
    """Weight-normalized sum of factors masked by the constraint product."""
    if not factors:
        raise ConfigError("wlc_combine needs at least one factor")
    first = factors[0][0]
    for r, _ in list(factors) + [(c, 0.0) for c in constraints]:
        if not first.same_shape(r):
            raise ConfigError("wlc_combine: raster shapes/georeferences differ")
    weights = [float(w) for _, w in factors]
    if any(w < 0 for w in weights):
        raise ConfigError("factor weights must be non-negative")
    total = sum(weights)
    if total <= 0:
        raise ConfigError("factor weights sum to zero")
    acc = np.zeros_like(first.cells)
    nodata = np.zeros(first.cells.shape, dtype=bool)
    for (r, _), w in zip(factors, weights):
        nodata |= r.nodata_mask()
        acc += w * r.cells
    acc /= total
    for c in constraints:
        nodata |= c.nodata_mask()
        acc *= c.cells
    acc[nodata] = first.nodata
    return first.like(acc)


@dataclass
class FactorSpec:
    layer: str
    pipeline: list[dict]
    weight: float = 1.0
    name: str = ""


@dataclass
class ScenarioConfig:
    layers: dict[str, str]
    constraints: list[ConstraintSpec] = field(default_factory=list)
    factors: list[FactorSpec] = field(default_factory=list)
    output: str = "suitability"
    from_ontology: Optional[str] = None
    layer_map: dict[str, str] = field(default_factory=dict)
    base_dir: Path = field(default_factory=Path)

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "ScenarioConfig":
        path = Path(path)
        obj = json.loads(path.read_text(encoding="utf-8"))
        config = cls(
            layers=dict(obj.get("layers", {})),
            constraints=[ConstraintSpec(c["layer"], c["predicate"])
                         for c in obj.get("constraints", [])],
            factors=[FactorSpec(f["layer"], list(f.get("pipeline", [])),
                                float(f.get("weight", 1.0)),
                                f.get("name", f["layer"]))
                     for f in obj.get("factors", [])],
            output=obj.get("output", "suitability"),
            from_ontology=obj.get("from_ontology"),
            layer_map=dict(obj.get("layer_map", {})),
            base_dir=path.parent,
        )
        if not config.factors:
            raise ConfigError("scenario declares no factors")
        return config


def _apply_pipeline(r: Raster, pipeline: list[dict], name: str) -> Raster:
    for step in pipeline:
        op = step.get("op")
        if op == "reclassify":
            r = reclassify(r, [tuple(row) for row in step["table"]],
                           step.get("default"))
        elif op == "distance":
            r = distance_transform(r)
        elif op == "standardize":
            cp = step.get("control_points")
            r = standardize(r, step.get("direction", "increasing"),
                            tuple(cp) if cp else None)
        else:
            raise ConfigError(f"factor {name!r}: unknown pipeline op {op!r}")
    return r


def constraints_from_digest(digest: dict, layer_map: dict[str, str],
                            known_layers: dict[str, str]) -> tuple[list[ConstraintSpec], list[str]]:
    """Buffer constraints from an extracted-criteria digest.

    Objects missing from the layer map (or mapping to absent layers) are
    skipped and reported, not fatal.
    """
    specs: list[ConstraintSpec] = []
    skipped: list[str] = []
    for entry in digest.get("constraints", []):
        obj = entry["object"]
        layer = layer_map.get(obj)
        if layer is None:
            skipped.append(f"no layer mapping for object {obj!r} "
                           f"({entry.get('source_instance', '?')})")
            continue
        if layer not in known_layers:
            skipped.append(f"object {obj!r} maps to unknown layer {layer!r}")
            continue
        specs.append(ConstraintSpec(layer, {"distance_lt": float(entry["distance_m"])}))
    return specs, skipped


@dataclass
class ScenarioResult:
    suitability: Raster
    intermediates: dict[str, Raster]
    stats: dict[str, dict]
    notes: list[str] = field(default_factory=list)


def run_scenario(config: ScenarioConfig,
                 weights: Optional[Sequence[float]] = None) -> ScenarioResult:
    """Execute factor pipelines and constraints, then combine with WLC."""
    layers: dict[str, Raster] = {}
    for layer_id, rel_path in sorted(config.layers.items()):
        path = config.base_dir / rel_path
        if not path.is_file():
            raise ConfigError(f"layer {layer_id!r}: file not found: {path}")
        layers[layer_id] = read_raster(path)

    notes: list[str] = []
    constraint_specs = list(config.constraints)
    if config.from_ontology:
        digest_path = config.base_dir / config.from_ontology
        if not digest_path.is_file():
            raise ConfigError(f"criteria digest not found: {digest_path}")
        digest = json.loads(digest_path.read_text(encoding="utf-8"))
        extra, skipped = constraints_from_digest(digest, config.layer_map,
                                                 config.layers)
        constraint_specs.extend(extra)
        notes.extend(skipped)

    if weights is not None:
        if len(weights) != len(config.factors):
            raise ConfigError(
                f"{len(weights)} weights given for {len(config.factors)} factors")
        factor_weights = [float(w) for w in weights]
    else:
        factor_weights = [f.weight for f in config.factors]

    intermediates: dict[str, Raster] = {}
    factor_rasters: list[tuple[Raster, float]] = []
    for spec, weight in zip(config.factors, factor_weights):
        if spec.layer not in layers:
            raise ConfigError(f"factor {spec.name!r}: unknown layer {spec.layer!r}")
        try:
            r = _apply_pipeline(layers[spec.layer], spec.pipeline, spec.name)
        except (ConfigError, TransformError) as exc:
            raise ScenarioError(f"factor {spec.name!r}: {exc}") from exc
        intermediates[f"factor_{spec.name}"] = r
        factor_rasters.append((r, weight))

    constraint_rasters: list[Raster] = []
    for i, spec in enumerate(constraint_specs):
        try:
            c = build_constraint(spec, layers)
        except (ConfigError, TransformError) as exc:
            raise ScenarioError(f"constraint {i} on layer {spec.layer!r}: {exc}") from exc
        intermediates[f"constraint_{i}_{spec.layer}"] = c
        constraint_rasters.append(c)

    suitability = wlc_combine(factor_rasters, constraint_rasters)
    stats = {name: r.stats() for name, r in sorted(intermediates.items())}
    stats["suitability"] = suitability.stats()
    return ScenarioResult(suitability, intermediates, stats, notes)


def write_scenario_outputs(result: ScenarioResult, out_dir: Union[str, Path],
                           output_name: str = "suitability") -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, r in sorted(result.intermediates.items()):
        path = out_dir / f"{name}.asc"
        write_raster(r, path, "ascii_grid")
        written.append(path)
    asc = out_dir / f"{output_name}.asc"
    pgm = out_dir / f"{output_name}.pgm"
    write_raster(result.suitability, asc, "ascii_grid")
    write_raster(result.suitability, pgm, "pgm")
    written.extend([asc, pgm])
    return written
