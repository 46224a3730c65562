"""End-to-end orchestration: extract, populate, suitability.

Stages communicate only via files (standoff annotations, ontology XML,
criteria digest JSON, ASCII grids) so each can run and be tested in
isolation.  Log lines go to stderr; machine-readable output goes to
files only.
"""

from __future__ import annotations

import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import gazetteer, ontology as onto
from .doc_model import DEFAULT_SET, Document, export_inline_xml, export_standoff, import_standoff, ingest_text
from .linguistic import resource_path, run_linguistic_cascade
from .raster import ScenarioConfig, run_scenario, write_scenario_outputs
from .rule_engine import RulePhase, parse_rules, run_cascade

CONCEPT_TYPES = [
    "Setback", "QualitativeDistance", "SoilCondition", "SoilType",
    "SlopeCondition", "DrainageIssue", "SetbackFrom",
]
EXPORT_TYPES = CONCEPT_TYPES + ["Mention"]


class PipelineConfigError(Exception):
    pass


@dataclass
class PipelineConfig:
    corpus_dir: Path
    gazetteer_index: Path
    rule_files: list[Path]
    ontology_schema: Path
    output_dir: Path
    factor_map: Optional[Path] = None

    @classmethod
    def bundled(cls, output_dir: Path) -> "PipelineConfig":
        """Config pointing at the packaged demo fixtures."""
        return cls(
            corpus_dir=resource_path("corpus"),
            gazetteer_index=resource_path("lists/lists.def"),
            rule_files=[resource_path("rules/concepts.rul"),
                        resource_path("rules/mentions.rul")],
            ontology_schema=resource_path("lusa_schema.xml"),
            output_dir=Path(output_dir),
        )

    @classmethod
    def from_json(cls, path: Path) -> "PipelineConfig":
        path = Path(path)
        obj = json.loads(path.read_text(encoding="utf-8"))
        base = path.parent

        def resolve(p):
            return (base / p).resolve()

        return cls(
            corpus_dir=resolve(obj["corpus_dir"]),
            gazetteer_index=resolve(obj["gazetteer_index"]),
            rule_files=[resolve(p) for p in obj["rule_files"]],
            ontology_schema=resolve(obj["ontology_schema"]),
            output_dir=resolve(obj["output_dir"]),
            factor_map=resolve(obj["factor_map"]) if obj.get("factor_map") else None,
        )

    def validate(self) -> None:
        if not self.corpus_dir.is_dir():
            raise PipelineConfigError(f"corpus dir not found: {self.corpus_dir}")
        for path in [self.gazetteer_index, self.ontology_schema, *self.rule_files]:
            if not Path(path).is_file():
                raise PipelineConfigError(f"resource not found: {path}")


def load_phases(rule_files: Sequence[Path]) -> list[RulePhase]:
    return [parse_rules(Path(p).read_text(encoding="utf-8")) for p in rule_files]


def corpus_files(corpus_dir: Path) -> list[Path]:
    return sorted(p for p in Path(corpus_dir).iterdir()
                  if p.suffix.lower() in (".txt", ".html"))


def process_document(path: Path, gaz: gazetteer.CompiledGazetteer,
                     phases: Sequence[RulePhase]) -> Document:
    fmt = "html" if path.suffix.lower() == ".html" else "plain"
    doc = ingest_text(path.read_bytes(), fmt, doc_id=path.stem)
    run_linguistic_cascade(doc)
    gazetteer.annotate_lookups(doc, gaz)
    run_cascade(doc, phases)
    return doc


def _worker(args) -> tuple[str, Optional[str], Optional[str]]:
    path, index_path, rule_files = args
    try:
        gaz = gazetteer.compile_gazetteer(gazetteer.load_index(index_path))
        doc = process_document(path, gaz, load_phases(rule_files))
        return path.stem, export_standoff(doc), None
    except Exception as exc:
        return path.stem, None, f"{type(exc).__name__}: {exc}"


def cmd_extract(config: PipelineConfig, jobs: int = 1,
                log=None) -> int:
    """Annotate every corpus document and write standoff + inline XML."""
    log = sys.stderr if log is None else log
    config.validate()
    index = gazetteer.load_index(config.gazetteer_index)
    gaz = gazetteer.compile_gazetteer(index)
    phases = load_phases(config.rule_files)
    files = corpus_files(config.corpus_dir)
    out_dir = config.output_dir / "extract"
    out_dir.mkdir(parents=True, exist_ok=True)
    if not files:
        print(f"warning: no .txt/.html documents in {config.corpus_dir}", file=log)
        return 0

    failures = 0
    if jobs > 1:
        tasks = [(p, config.gazetteer_index, config.rule_files) for p in files]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_worker, tasks))
        docs = []
        for stem, standoff, error in results:
            if error is not None:
                failures += 1
                print(f"error: {stem}: {error}", file=log)
                docs.append(None)
            else:
                docs.append(import_standoff(standoff))
    else:
        docs = []
        for path in files:
            try:
                docs.append(process_document(path, gaz, phases))
            except Exception as exc:
                failures += 1
                print(f"error: {path.stem}: {type(exc).__name__}: {exc}", file=log)
                docs.append(None)

    for path, doc in zip(files, docs):
        if doc is None:
            continue
        (out_dir / f"{doc.id}.standoff.tsv").write_text(
            export_standoff(doc), encoding="utf-8")
        (out_dir / f"{doc.id}.inline.xml").write_text(
            export_inline_xml(doc, DEFAULT_SET, EXPORT_TYPES), encoding="utf-8")
        counts: dict[str, int] = {}
        for ann in doc.get_set(DEFAULT_SET):
            counts[ann.type] = counts.get(ann.type, 0) + 1
        summary = " ".join(f"{t}={counts[t]}" for t in sorted(counts))
        print(f"{doc.id}: {summary}", file=log)
    return 1 if failures else 0


def cmd_populate(config: PipelineConfig, run_extract_if_missing: bool = True,
                 log=None) -> int:
    """Populate the ontology from extraction output; write XML and digest."""
    log = sys.stderr if log is None else log
    extract_dir = config.output_dir / "extract"
    if not extract_dir.is_dir() or not list(extract_dir.glob("*.standoff.tsv")):
        if not run_extract_if_missing:
            print(f"error: no extraction output in {extract_dir}", file=log)
            return 1
        status = cmd_extract(config, log=log)
        if status != 0:
            return status
    docs = [import_standoff(p.read_text(encoding="utf-8"))
            for p in sorted(extract_dir.glob("*.standoff.tsv"))]
    ontology = onto.load_schema(config.ontology_schema)
    report = onto.populate(ontology, docs)
    factor_map = None
    if config.factor_map is not None:
        factor_map = json.loads(Path(config.factor_map).read_text(encoding="utf-8"))
    digest = onto.criteria_summary(ontology, factor_map)
    config.output_dir.mkdir(parents=True, exist_ok=True)
    (config.output_dir / "ontology.xml").write_text(
        onto.export_ontology(ontology, "xml"), encoding="utf-8")
    (config.output_dir / "criteria.json").write_text(digest.to_json(), encoding="utf-8")
    print(report.summary(), file=log)
    return 0


def cmd_suitability(scenario_path: Path, out_dir: Path,
                    weights: Optional[Sequence[float]] = None,
                    log=None) -> int:
    """Run one suitability scenario and write all layers plus the map."""
    log = sys.stderr if log is None else log
    config = ScenarioConfig.from_json(scenario_path)
    result = run_scenario(config, weights=weights)
    write_scenario_outputs(result, out_dir, config.output)
    for note in result.notes:
        print(f"note: {note}", file=log)
    name_width = max(len(n) for n in result.stats)
    print(f"{'layer'.ljust(name_width)}      min      max     mean", file=log)
    for name in sorted(result.stats):
        s = result.stats[name]
        if s["min"] is None:
            print(f"{name.ljust(name_width)}  (no data)", file=log)
        else:
            print(f"{name.ljust(name_width)} {s['min']:8.2f} {s['max']:8.2f} "
                  f"{s['mean']:8.2f}", file=log)
    return 0


def build_demo_scenario(output_dir: Path) -> Path:
    """Write a scenario config joining the bundled rasters to the digest."""
    base = json.loads(resource_path("scenario/scenario.json").read_text(encoding="utf-8"))
    scenario_dir = Path(output_dir) / "scenario"
    scenario_dir.mkdir(parents=True, exist_ok=True)
    base["layers"] = {layer: str(resource_path(f"scenario/{rel}"))
                      for layer, rel in base["layers"].items()}
    base["from_ontology"] = "../criteria.json"
    base["layer_map"] = {"water_body": "water", "water_bodies": "water"}
    path = scenario_dir / "scenario.json"
    path.write_text(json.dumps(base, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def cmd_demo(out_dir: Path, log=None) -> int:
    """Extract, populate, and map the bundled fixtures end to end."""
    log = sys.stderr if log is None else log
    config = PipelineConfig.bundled(Path(out_dir))
    print("stage 1/3: extract criteria from corpus", file=log)
    status = cmd_extract(config, log=log)
    if status != 0:
        return status
    print("stage 2/3: populate ontology and digest criteria", file=log)
    status = cmd_populate(config, run_extract_if_missing=False, log=log)
    if status != 0:
        return status
    print("stage 3/3: weighted-linear-combination suitability map", file=log)
    scenario_path = build_demo_scenario(Path(out_dir))
    return cmd_suitability(scenario_path, Path(out_dir) / "map", log=log)
