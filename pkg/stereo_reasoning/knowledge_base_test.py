import json

from absl.testing import absltest
from absl.testing import parameterized
import numpy as np

from stereo_reasoning import corpus
from stereo_reasoning import distances
from stereo_reasoning import errors
from stereo_reasoning import knowledge_base
from stereo_reasoning import representability
from stereo_reasoning import sets
from stereo_reasoning.knowledge_base import KnowledgeBase, Stereotype
from stereo_reasoning.worlds import World, WorldSpace


def _cat_document(**overrides):
    document = {
        "atoms": ["big", "striped"],
        "worlds": [{"name": f"w{i}", "valuation": {"big": bool(i & 1), "striped": bool(i & 2)}} for i in range(4)],
        "stereotypes": [{"name": "tabby", "formula": "big & striped"}, {"name": "any", "worlds": ["w0", "w1", "w2",
                                                                                                 "w3"]}],
        "distance": {"family": "cardinality"},
    }
    document.update(overrides)
    return document


class KnowledgeBaseTest(parameterized.TestCase):

    def setUp(self):
        np.random.seed(0)

    def test_minimal_document(self):
        kb = knowledge_base.load_kb(
            json.dumps({
                "atoms": ["a"],
                "worlds": [{"name": "w0", "valuation": {"a": False}}, {"name": "w1", "valuation": {"a": True}}],
                "stereotypes": [{"name": "S", "worlds": ["w0", "w1"]}],
                "distance": {"family": "constant"},
            }))
        self.assertLen(kb.stereotypes, 1)
        self.assertEqual(kb.stereotypes[0].extent, kb.space.full)

    def test_formula_stereotype(self):
        kb = knowledge_base.load_kb(_cat_document())
        self.assertEqual(kb.space.names_of(kb.stereotype("tabby").extent), ("w3",))
        self.assertEqual(kb.names, ("tabby", "any"))
        with self.assertRaises(KeyError):
            kb.stereotype_index("lion")

    @parameterized.named_parameters(
        ("unsatisfiable_formula", dict(stereotypes=[{"name": "none", "formula": "big & ~big"}]),
         errors.EmptyStereotype, "stereotypes[0]"),
        ("empty_world_list", dict(stereotypes=[{"name": "none", "worlds": []}]), errors.EmptyStereotype,
         "stereotypes[0]"),
        ("unknown_field", dict(colour="red"), errors.FormatError, "$"),
        ("bad_formula", dict(stereotypes=[{"name": "x", "formula": "big &"}]), errors.FormatError,
         "stereotypes[0].formula"),
        ("unknown_atom", dict(stereotypes=[{"name": "x", "formula": "small"}]), errors.FormatError,
         "stereotypes[0].formula"),
        ("both_extents", dict(stereotypes=[{"name": "x", "formula": "big", "worlds": ["w0"]}]), errors.FormatError,
         "stereotypes[0]"),
        ("unknown_world", dict(stereotypes=[{"name": "x", "worlds": ["w9"]}]), errors.UnknownWorld,
         "stereotypes[0].worlds"),
        ("duplicate_stereotype", dict(stereotypes=[{"name": "x", "worlds": ["w0"]}, {"name": "x", "worlds": ["w1"]}]),
         errors.DuplicateName, "stereotypes[1].name"),
        ("duplicate_valuation", dict(worlds=[{"name": "w0", "valuation": {"big": True, "striped": True}},
                                             {"name": "w1", "valuation": {"big": True, "striped": True}}],
                                     stereotypes=[{"name": "x", "worlds": ["w0"]}]),
         errors.DuplicateValuation, "worlds[1].valuation"),
        ("unknown_family", dict(distance={"family": "euclidean"}), errors.DistanceSpecError, "distance.family"),
        ("extra_parameter", dict(distance={"family": "constant", "rank": {}}), errors.DistanceSpecError, "distance"),
        ("min_world_needs_singletons", dict(distance={"family": "min-world", "rank": {"w0": 0, "w1": 1, "w2": 2,
                                                                                      "w3": 3}}),
         errors.DistanceSpecError, "stereotypes[1]"),
        ("partition_needs_disjoint", dict(distance={"family": "partition-cover", "order": ["tabby", "any"]}),
         errors.DistanceSpecError, "stereotypes[1]"),
        ("partial_table", dict(distance={"family": "table", "entries": [
            {"info_set": [], "stereotype": "tabby", "distance": 0}]}), errors.DistanceSpecError, "distance.entries"),
    )
    def test_load_errors(self, overrides, error, location):
        with self.assertRaises(error) as context:
            knowledge_base.load_kb(_cat_document(**overrides))
        self.assertEqual(context.exception.location, location)

    def test_invalid_json(self):
        with self.assertRaises(errors.FormatError):
            knowledge_base.load_kb("{not json")

    def test_validate_kb(self):
        kb = corpus.load_builtin("example2")
        self.assertEqual(knowledge_base.validate_kb(kb), [])

        space = WorldSpace(("a",), (World("w1", (("a", True),)), World("w2", (("a", True),))))
        kb = KnowledgeBase(space, (Stereotype("S", space.full),), distances.ConstantFamily())
        violations = knowledge_base.validate_kb(kb)
        self.assertEqual([v.kind for v in violations], ["DuplicateValuation"])
        self.assertIn("'w1' and 'w2'", violations[0].message)

        space = WorldSpace.binary(2)
        kb = KnowledgeBase(space, (Stereotype("S", sets.InfoSet(0b100, 2)),), distances.ConstantFamily())
        self.assertEqual([v.kind for v in knowledge_base.validate_kb(kb)], ["UnknownWorld"])
        self.assertIsInstance(knowledge_base.validate_kb(kb)[0].to_error(), errors.UnknownWorld)

    def test_dump_then_load(self):
        kbs = [corpus.load_builtin(name) for name in corpus.BUILTIN_NAMES]
        kbs += [kb for _, kb in corpus.family_kbs((1, 2, 3))]
        kbs += [corpus.eq2_violating_kb(), corpus.shrinking_flip_kb()]
        rng = np.random.default_rng(0)
        for _ in range(10):
            space = WorldSpace.binary(3)
            kbs.append(representability.random_eq2_table_kb(space, corpus.random_stereotypes(space, rng), rng))
        for kb in kbs:
            text = knowledge_base.dump_kb(kb)
            self.assertEqual(knowledge_base.load_kb(text), kb)
            self.assertEqual(knowledge_base.dump_kb(knowledge_base.load_kb(text)), text)

    def test_load_kb_file(self):
        path = self.create_tempfile("kb.json", content=json.dumps(_cat_document())).full_path
        self.assertEqual(knowledge_base.load_kb_file(path), knowledge_base.load_kb(_cat_document()))
        self.assertEqual(knowledge_base.load_kb_file("builtin:tie").names, ("S_a", "S_b"))
        with self.assertRaises(errors.FormatError):
            knowledge_base.load_kb_file("builtin:example9")
        with self.assertRaises(errors.FormatError):
            knowledge_base.load_kb_file(path + ".missing")
        undecodable = self.create_tempfile("latin1.json", content=b"{\"atoms\": [\"\xe9t\xe9\"]}", mode="wb").full_path
        with self.assertRaisesRegex(errors.FormatError, "cannot read"):
            knowledge_base.load_kb_file(undecodable)


if __name__ == "__main__":
    absltest.main()
