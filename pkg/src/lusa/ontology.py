"""Criteria ontology: class hierarchy, instances, population, and export.

Classes form a tree rooted at an implicit Thing.  Instances are created
from Mention annotations: one instance per Mention whose `ontology`
feature names this ontology and whose `class` feature names a known
class; declared data properties are copied from same-named annotation
features, and every instance records its provenance (document, span,
source annotation).
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union
from xml.sax.saxutils import escape, quoteattr

from .doc_model import Document
from .linguistic import resource_path

PropertyValue = Union[str, float, bool]


class OntologyError(Exception):
    pass


class QueryError(Exception):
    pass


@dataclass
class OntologyClass:
    name: str
    parent: Optional[str] = None
    data_properties: list[tuple[str, str]] = field(default_factory=list)
    description: str = ""
    inferred: bool = False


@dataclass
class Provenance:
    doc_id: str
    start: int
    end: int
    annotation_id: int


@dataclass
class OntologyInstance:
    id: str
    class_name: str
    property_values: dict[str, PropertyValue] = field(default_factory=dict)
    provenance: Optional[Provenance] = None


class Ontology:
    def __init__(self, name: str):
        self.name = name
        self.classes: dict[str, OntologyClass] = {}
        self.instances: list[OntologyInstance] = []

    def add_class(self, cls: OntologyClass) -> None:
        if cls.name in self.classes:
            raise OntologyError(f"duplicate class {cls.name!r}")
        if cls.parent is not None and cls.parent not in self.classes:
            raise OntologyError(f"class {cls.name!r}: unknown parent {cls.parent!r}")
        self.classes[cls.name] = cls

    def ancestors(self, name: str) -> list[str]:
        out = []
        cur = self.classes[name].parent
        while cur is not None:
            out.append(cur)
            cur = self.classes[cur].parent
        return out

    def descendants(self, name: str) -> set[str]:
        out = {name}
        changed = True
        while changed:
            changed = False
            for cls in self.classes.values():
                if cls.parent in out and cls.name not in out:
                    out.add(cls.name)
                    changed = True
        return out

    def declared_properties(self, name: str) -> dict[str, str]:
        """Data properties of a class including inherited ones."""
        props: dict[str, str] = {}
        for cls_name in reversed([name] + self.ancestors(name)):
            for pname, kind in self.classes[cls_name].data_properties:
                props[pname] = kind
        return props


def load_schema(path: Union[str, Path]) -> Ontology:
    """Load an ontology (classes, and any instances) from its XML form."""
    return import_ontology(Path(path).read_text(encoding="utf-8"))


def load_lusa_schema() -> Ontology:
    """The bundled land-use suitability criteria schema."""
    return load_schema(resource_path("lusa_schema.xml"))


@dataclass
class SkipRecord:
    doc_id: str
    annotation_id: int
    reason: str


@dataclass
class PopulationReport:
    created: int = 0
    skipped: int = 0
    skips: list[SkipRecord] = field(default_factory=list)
    skipped_properties: list[SkipRecord] = field(default_factory=list)

    def summary(self) -> str:
        lines = [f"instances created: {self.created}",
                 f"mentions skipped:  {self.skipped}"]
        for rec in self.skips:
            lines.append(f"  skip {rec.doc_id}#{rec.annotation_id}: {rec.reason}")
        for rec in self.skipped_properties:
            lines.append(f"  property skip {rec.doc_id}#{rec.annotation_id}: {rec.reason}")
        return "\n".join(lines)


_KIND_TYPES = {"string": str, "number": (int, float), "boolean": bool}


def _value_matches_kind(value, kind: str) -> bool:
    if kind == "number":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if kind == "boolean":
        return isinstance(value, bool)
    return isinstance(value, str)


def populate(ontology: Ontology, corpus: Iterable[Document],
             mention_type: str = "Mention", set_name: str = "") -> PopulationReport:
    """Create one instance per Mention annotation targeting this ontology."""
    report = PopulationReport()
    counters: dict[str, int] = {}
    for doc in corpus:
        for ann in doc.query(set_name, type=mention_type):
            if ann.features.get("ontology") != ontology.name:
                continue
            class_name = ann.features.get("class")
            if not isinstance(class_name, str) or class_name not in ontology.classes:
                report.skipped += 1
                report.skips.append(SkipRecord(doc.id, ann.id,
                                               f"unknown class {class_name!r}"))
                continue
            n = counters.get(class_name, 0)
            counters[class_name] = n + 1
            instance = OntologyInstance(
                id=f"lusa:#{class_name}_{n}",
                class_name=class_name,
                provenance=Provenance(doc.id, ann.start, ann.end, ann.id),
            )
            declared = ontology.declared_properties(class_name)
            for pname, kind in sorted(declared.items()):
                if pname not in ann.features:
                    continue
                value = ann.features[pname]
                if isinstance(value, int) and not isinstance(value, bool) \
                        and kind == "number":
                    value = float(value)
                if not _value_matches_kind(value, kind):
                    report.skipped_properties.append(SkipRecord(
                        doc.id, ann.id,
                        f"property {pname!r}: value {value!r} is not a {kind}"))
                    continue
                instance.property_values[pname] = value
            ontology.instances.append(instance)
            report.created += 1
    return report


def query_instances(ontology: Ontology, class_name: str,
                    include_subclasses: bool = False) -> list[OntologyInstance]:
    if class_name not in ontology.classes:
        raise QueryError(f"unknown class {class_name!r}")
    wanted = ontology.descendants(class_name) if include_subclasses else {class_name}
    return sorted((i for i in ontology.instances if i.class_name in wanted),
                  key=lambda i: i.id)


def _value_to_str(v: PropertyValue) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v) if isinstance(v, float) else str(v)


def _str_to_value(s: str, kind: str) -> PropertyValue:
    if kind == "number":
        return float(s)
    if kind == "boolean":
        return s == "true"
    return s


def export_ontology(ontology: Ontology, format: str = "xml") -> str:
    """Deterministic serialization: classes first, then instances."""
    classes = [ontology.classes[n] for n in sorted(ontology.classes)]
    if format == "xml":
        lines = [f'<ontology name={quoteattr(ontology.name)}>']
        for cls in classes:
            attrs = f" name={quoteattr(cls.name)}"
            if cls.parent is not None:
                attrs += f" parent={quoteattr(cls.parent)}"
            if cls.inferred:
                attrs += ' inferred="true"'
            if cls.description:
                attrs += f" description={quoteattr(cls.description)}"
            if cls.data_properties:
                lines.append(f"  <class{attrs}>")
                for pname, kind in cls.data_properties:
                    lines.append(
                        f"    <property name={quoteattr(pname)} kind={quoteattr(kind)}/>")
                lines.append("  </class>")
            else:
                lines.append(f"  <class{attrs}/>")
        for inst in ontology.instances:
            lines.append(f"  <instance id={quoteattr(inst.id)} "
                         f"class={quoteattr(inst.class_name)}>")
            for pname in sorted(inst.property_values):
                value = inst.property_values[pname]
                lines.append(f"    <value property={quoteattr(pname)}>"
                             f"{escape(_value_to_str(value))}</value>")
            if inst.provenance is not None:
                p = inst.provenance
                lines.append(f"    <provenance doc={quoteattr(p.doc_id)} "
                             f'start="{p.start}" end="{p.end}" ann="{p.annotation_id}"/>')
            lines.append("  </instance>")
        lines.append("</ontology>")
        return "\n".join(lines) + "\n"
    if format == "tsv":
        lines = [f"# ontology\t{ontology.name}"]
        for cls in classes:
            props = ";".join(f"{p}:{k}" for p, k in cls.data_properties)
            lines.append(f"class\t{cls.name}\t{cls.parent or ''}\t{props}")
        for inst in ontology.instances:
            values = ";".join(f"{p}={_value_to_str(inst.property_values[p])}"
                              for p in sorted(inst.property_values))
            prov = ""
            if inst.provenance is not None:
                p = inst.provenance
                prov = f"{p.doc_id}:{p.start}:{p.end}:{p.annotation_id}"
            lines.append(f"instance\t{inst.id}\t{inst.class_name}\t{values}\t{prov}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {format!r}")


def import_ontology(data: str) -> Ontology:
    root = ET.fromstring(data)
    if root.tag != "ontology":
        raise OntologyError(f"expected <ontology> root, got <{root.tag}>")
    ontology = Ontology(root.get("name", ""))
    pending = []
    for el in root:
        if el.tag == "class":
            cls = OntologyClass(
                name=el.get("name", ""),
                parent=el.get("parent"),
                description=el.get("description", ""),
                inferred=el.get("inferred") == "true",
                data_properties=[(p.get("name", ""), p.get("kind", "string"))
                                 for p in el if p.tag == "property"],
            )
            pending.append(cls)
        elif el.tag == "instance":
            inst = OntologyInstance(id=el.get("id", ""),
                                    class_name=el.get("class", ""))
            ontology.instances.append(inst)
            for child in el:
                if child.tag == "value":
                    inst.property_values[child.get("property", "")] = child.text or ""
                elif child.tag == "provenance":
                    inst.provenance = Provenance(
                        child.get("doc", ""), int(child.get("start", "0")),
                        int(child.get("end", "0")), int(child.get("ann", "0")))
    # parents may appear after children in hand-edited files
    remaining = pending
    while remaining:
        progress = [c for c in remaining
                    if c.parent is None or c.parent in ontology.classes]
        if not progress:
            raise OntologyError(
                "unresolvable class parents: "
                + ", ".join(sorted(c.name for c in remaining)))
        for cls in progress:
            ontology.add_class(cls)
        remaining = [c for c in remaining if c.name not in ontology.classes]
    for inst in ontology.instances:
        if inst.class_name not in ontology.classes:
            raise OntologyError(f"instance {inst.id}: unknown class {inst.class_name!r}")
        declared = ontology.declared_properties(inst.class_name)
        for pname in list(inst.property_values):
            if pname not in declared:
                raise OntologyError(
                    f"instance {inst.id}: undeclared property {pname!r}")
            inst.property_values[pname] = _str_to_value(
                str(inst.property_values[pname]), declared[pname])
    return ontology


UNIT_FACTORS_M = {
    "m": 1.0, "meter": 1.0, "meters": 1.0, "metre": 1.0, "metres": 1.0,
    "km": 1000.0, "kilometer": 1000.0, "kilometers": 1000.0,
    "kilometre": 1000.0, "kilometres": 1000.0,
    "ft": 0.3048, "foot": 0.3048, "feet": 0.3048,
}

BUFFER_RELATIONS = {"within", "less than"}


@dataclass
class CriteriaSet:
    constraints: list[dict] = field(default_factory=list)
    factors: list[dict] = field(default_factory=list)
    unresolved: list[dict] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {"constraints": self.constraints, "factors": self.factors,
             "unresolved": self.unresolved},
            indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, data: str) -> "CriteriaSet":
        obj = json.loads(data)
        return cls(constraints=obj.get("constraints", []),
                   factors=obj.get("factors", []),
                   unresolved=obj.get("unresolved", []))


def default_factor_map() -> dict[str, str]:
    with open(resource_path("factor_map.json"), encoding="utf-8") as fh:
        return json.load(fh)


def _normalize_object(name: str) -> str:
    return "_".join(name.lower().split())


def criteria_summary(ontology: Ontology,
                     factor_map: Optional[dict[str, str]] = None) -> CriteriaSet:
    """Digest populated instances into raster-ready constraints and factors.

    Buffer constraints come from setback instances whose spatial relation
    is `within` or `less than`; distances normalize to meters.  Factor
    entries come from the class-to-factor-kind mapping table.
    """
    if factor_map is None:
        factor_map = default_factor_map()
    out = CriteriaSet()
    setback_tree = (ontology.descendants("Setback")
                    if "Setback" in ontology.classes else set())
    for inst in sorted(ontology.instances, key=lambda i: i.id):
        values = inst.property_values
        if inst.class_name in setback_tree and "distance" in values \
                and "setback_from" in values:
            relation = str(values.get("spatial_relation", "")).lower()
            if relation not in BUFFER_RELATIONS:
                continue
            unit = str(values.get("unit", "")).lower()
            factor = UNIT_FACTORS_M.get(unit)
            if factor is None:
                out.unresolved.append({
                    "object": _normalize_object(str(values["setback_from"])),
                    "source_instance": inst.id,
                    "reason": f"unknown unit {values.get('unit')!r}",
                })
                continue
            out.constraints.append({
                "object": _normalize_object(str(values["setback_from"])),
                "distance_m": float(values["distance"]) * factor,
                "source_instance": inst.id,
            })
        elif inst.class_name in factor_map:
            out.factors.append({
                "class": inst.class_name,
                "kind": factor_map[inst.class_name],
                "source_instance": inst.id,
            })
    return out
