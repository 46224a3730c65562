import random

import pytest

from lusa.doc_model import Document
from lusa import ontology as onto
from lusa.ontology import (
    CriteriaSet,
    Ontology,
    OntologyClass,
    OntologyError,
    QueryError,
    criteria_summary,
    export_ontology,
    import_ontology,
    load_lusa_schema,
    populate,
    query_instances,
)

from generators import random_ontology


def mention_doc(*mentions, ontology="LUSA"):
    """Document with one Mention annotation per (class_name, features)."""
    doc = Document("m", "x" * 200)
    pos = 0
    for class_name, features in mentions:
        feats = {"class": class_name, "ontology": ontology, **features}
        doc.add_annotation("", "Mention", pos, pos + 10, feats)
        pos += 10
    return doc


class TestSchema:
    def test_bundled_schema_shape(self):
        schema = load_lusa_schema()
        assert schema.name == "LUSA"
        for name in ("Setback", "Quantitative_Distance", "Qualitative_Distance",
                     "Soils", "Topography", "Surface_Subsurface_Drainage"):
            assert name in schema.classes
        assert schema.classes["Quantitative_Distance"].parent == "Setback"
        assert schema.descendants("Setback") >= {
            "Setback", "Quantitative_Distance", "Qualitative_Distance"}
        assert "Setback" not in schema.descendants("Soils")

    def test_inherited_properties(self):
        schema = load_lusa_schema()
        props = schema.declared_properties("Quantitative_Distance")
        assert props["distance"] == "number"
        assert props["spatial_relation"] == "string"

    def test_ancestors(self):
        schema = load_lusa_schema()
        assert schema.ancestors("Quantitative_Distance") == ["Setback"]

    def test_duplicate_class_rejected(self):
        schema = Ontology("t")
        schema.add_class(OntologyClass("A"))
        with pytest.raises(OntologyError):
            schema.add_class(OntologyClass("A"))

    def test_unknown_parent_rejected(self):
        schema = Ontology("t")
        with pytest.raises(OntologyError):
            schema.add_class(OntologyClass("A", parent="Ghost"))


class TestPopulate:
    def test_instance_per_known_mention(self):
        schema = load_lusa_schema()
        doc = mention_doc(
            ("Quantitative_Distance", {"distance": 500, "unit": "meters",
                                       "spatial_relation": "within",
                                       "setback_from": "water body"}),
            ("Soils", {"soil_type": "loose or swampy"}),
            ("NotAClass", {}),
        )
        report = populate(schema, [doc])
        assert report.created == 2
        assert report.skipped == 1
        assert report.created + report.skipped == 3
        assert "unknown class" in report.skips[0].reason

    def test_ids_count_per_class_in_canonical_order(self):
        schema = load_lusa_schema()
        doc = mention_doc(("Soils", {}), ("Topography", {}), ("Soils", {}))
        populate(schema, [doc])
        assert [i.id for i in schema.instances] == [
            "lusa:#Soils_0", "lusa:#Topography_0", "lusa:#Soils_1"]

    def test_other_ontology_mentions_ignored(self):
        schema = load_lusa_schema()
        doc = mention_doc(("Soils", {}), ontology="OTHER")
        report = populate(schema, [doc])
        assert (report.created, report.skipped) == (0, 0)

    def test_provenance_recorded(self):
        schema = load_lusa_schema()
        doc = mention_doc(("Soils", {}))
        populate(schema, [doc])
        prov = schema.instances[0].provenance
        assert (prov.doc_id, prov.start, prov.end) == ("m", 0, 10)

    def test_integer_distance_coerced_to_float(self):
        schema = load_lusa_schema()
        doc = mention_doc(("Quantitative_Distance", {"distance": 457}))
        populate(schema, [doc])
        value = schema.instances[0].property_values["distance"]
        assert value == 457.0 and isinstance(value, float)

    def test_kind_mismatch_skips_property_not_instance(self):
        schema = load_lusa_schema()
        doc = mention_doc(("Quantitative_Distance", {"distance": "far",
                                                     "unit": "meters"}))
        report = populate(schema, [doc])
        assert report.created == 1
        assert "distance" not in schema.instances[0].property_values
        assert schema.instances[0].property_values["unit"] == "meters"
        assert len(report.skipped_properties) == 1

    def test_undeclared_features_not_copied(self):
        schema = load_lusa_schema()
        doc = mention_doc(("Soils", {"soil_type": "swampy", "bogus": 1}))
        populate(schema, [doc])
        assert schema.instances[0].property_values == {"soil_type": "swampy"}

    def test_report_summary_mentions_counts(self):
        schema = load_lusa_schema()
        report = populate(schema, [mention_doc(("Soils", {}), ("Nope", {}))])
        text = report.summary()
        assert "1" in text and "created" in text.lower()


class TestQuery:
    def build(self):
        schema = load_lusa_schema()
        doc = mention_doc(("Quantitative_Distance", {}),
                          ("Qualitative_Distance", {}), ("Soils", {}))
        populate(schema, [doc])
        return schema

    def test_exact_class(self):
        schema = self.build()
        assert [i.class_name for i in query_instances(schema, "Soils")] == ["Soils"]
        assert query_instances(schema, "Setback") == []

    def test_subclass_closure(self):
        schema = self.build()
        got = query_instances(schema, "Setback", include_subclasses=True)
        assert sorted(i.class_name for i in got) == [
            "Qualitative_Distance", "Quantitative_Distance"]

    def test_unknown_class_raises(self):
        with pytest.raises(QueryError):
            query_instances(self.build(), "Ghost")


class TestSerialization:
    def test_xml_round_trip_bundled(self):
        schema = load_lusa_schema()
        doc = mention_doc(("Quantitative_Distance",
                           {"distance": 500, "unit": "meters",
                            "spatial_relation": "within",
                            "setback_from": "water body"}))
        populate(schema, [doc])
        back = import_ontology(export_ontology(schema, "xml"))
        assert back.name == schema.name
        assert back.classes == schema.classes
        assert back.instances == schema.instances

    def test_export_is_deterministic(self):
        a, b = load_lusa_schema(), load_lusa_schema()
        assert export_ontology(a) == export_ontology(b)

    def test_tsv_export_shape(self):
        schema = load_lusa_schema()
        populate(schema, [mention_doc(("Soils", {"soil_type": "swampy"}))])
        lines = export_ontology(schema, "tsv").splitlines()
        assert lines[0] == "# ontology\tLUSA"
        inst_lines = [ln for ln in lines if ln.startswith("instance\t")]
        assert inst_lines == [
            "instance\tlusa:#Soils_0\tSoils\tsoil_type=swampy\tm:0:10:0"]

    def test_bad_root_rejected(self):
        with pytest.raises(OntologyError):
            import_ontology("<notontology/>")

    def test_undeclared_property_rejected(self):
        data = ('<ontology name="t"><class name="A"/>'
                '<instance id="i" class="A"><value property="p">v</value>'
                "</instance></ontology>")
        with pytest.raises(OntologyError):
            import_ontology(data)

    def test_forward_parent_reference_resolves(self):
        data = ('<ontology name="t"><class name="B" parent="A"/>'
                '<class name="A"/></ontology>')
        back = import_ontology(data)
        assert back.classes["B"].parent == "A"

    def test_random_round_trips(self):
        rng = random.Random(5)
        for _ in range(30):
            schema = random_ontology(rng)
            back = import_ontology(export_ontology(schema, "xml"))
            assert back.name == schema.name
            assert back.classes == schema.classes
            assert back.instances == schema.instances


class TestCriteriaSummary:
    def populated(self, *mentions):
        schema = load_lusa_schema()
        populate(schema, [mention_doc(*mentions)])
        return schema

    def quant(self, distance, unit, relation="within", obj="water body"):
        return ("Quantitative_Distance",
                {"distance": distance, "unit": unit,
                 "spatial_relation": relation, "setback_from": obj})

    def test_unit_conversions(self):
        schema = self.populated(self.quant(457, "meters", obj="landfill"),
                                self.quant(0.5, "km", obj="road"),
                                self.quant(100, "feet", obj="mine"))
        digest = criteria_summary(schema, factor_map={})
        got = {c["object"]: c["distance_m"] for c in digest.constraints}
        assert got == {"landfill": 457.0, "road": 500.0, "mine": 30.48}

    def test_buffer_relations_filter(self):
        schema = self.populated(self.quant(5, "km", relation="within"),
                                self.quant(9, "km", relation="less than"),
                                self.quant(2, "km", relation="greater than"))
        digest = criteria_summary(schema, factor_map={})
        assert sorted(c["distance_m"] for c in digest.constraints) == [
            5000.0, 9000.0]

    def test_unknown_unit_goes_unresolved(self):
        schema = self.populated(self.quant(3, "leagues"))
        digest = criteria_summary(schema, factor_map={})
        assert digest.constraints == []
        assert len(digest.unresolved) == 1
        assert "leagues" in digest.unresolved[0]["reason"]

    def test_object_name_normalized(self):
        schema = self.populated(self.quant(1, "m", obj="Water  Body"))
        digest = criteria_summary(schema, factor_map={})
        assert digest.constraints[0]["object"] == "water_body"

    def test_factor_entries_from_map(self):
        schema = self.populated(("Soils", {"soil_type": "swampy"}),
                                ("Topography", {}))
        digest = criteria_summary(schema, factor_map={"Soils": "soil_rating"})
        assert digest.factors == [{"class": "Soils", "kind": "soil_rating",
                                   "source_instance": "lusa:#Soils_0"}]

    def test_json_round_trip(self):
        schema = self.populated(self.quant(457, "meters"))
        digest = criteria_summary(schema, factor_map={})
        again = CriteriaSet.from_json(digest.to_json())
        assert again.constraints == digest.constraints
        assert again.factors == digest.factors
        assert again.unresolved == digest.unresolved

    def test_default_factor_map_loads(self):
        mapping = onto.default_factor_map()
        assert isinstance(mapping, dict) and mapping
