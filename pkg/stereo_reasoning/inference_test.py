import typing

from absl.testing import absltest
import numpy as np

from stereo_reasoning import corpus
from stereo_reasoning import distances
from stereo_reasoning import errors
from stereo_reasoning import formulas
from stereo_reasoning import inference
from stereo_reasoning import representability
from stereo_reasoning import sets
from stereo_reasoning import utils
from stereo_reasoning.worlds import WorldSpace


class InferenceTest(absltest.TestCase):

    def setUp(self):
        np.random.seed(0)
        self.example1 = corpus.load_builtin("example1")
        self.example3 = corpus.load_builtin("example3")
        self.example4 = corpus.load_builtin("example4")

    def test_best_stereotype(self):
        for info_set in self.example1.space.all_info_sets(nonempty=True):
            self.assertEqual(inference.best_stereotype(self.example1, info_set), "S_0")
        kb = corpus.cardinality_kb(5)
        self.assertEqual(inference.best_stereotype(kb, kb.info_set(["w1", "w4"])), "S_w1_w4")
        self.assertEqual(inference.best_stereotype(self.example3, self.example3.info_set(["w3", "w5"])), "S_w3")

    def test_best_stereotype_errors(self):
        tie = corpus.load_builtin("tie")
        with self.assertRaises(errors.NoUniqueMinimum) as context:
            inference.best_stereotype(tie, tie.space.full)
        self.assertEqual(context.exception.stereotypes, ("S_a", "S_b"))
        self.assertEqual(context.exception.info_set, ("w0", "w1"))
        with self.assertRaises(errors.EmptyInfoSet):
            inference.best_stereotype(tie, tie.space.empty)

    def test_nm_consequences(self):
        kb = self.example4
        result = inference.nm_consequences(kb, kb.info_set(["w0", "w1", "w2"]))
        self.assertEqual(result.chosen, "S_0")
        self.assertEqual(result.consequences, kb.info_set(["w0", "w1"]))
        self.assertTrue(result.consistent)
        self.assertEqual({k: str(v) for k, v in result.distance_map.items()}, {"S_0": "0", "S_1": "4/3", "S_2": "8/3"})

        result = inference.nm_consequences(self.example3, formulas.models(self.example3.parse("a | b"),
                                                                          self.example3.space))
        self.assertEqual(self.example3.space.names_of(result.given), ("w3", "w5"))
        self.assertEqual(result.to_json(self.example3)["consequences"], ["w3"])

        result = inference.nm_consequences(kb, kb.space.empty)
        self.assertIsNone(result.chosen)
        self.assertFalse(result.consequences)
        self.assertTrue(result.consistent)
        self.assertEqual(result.distances, ())

    def test_nm_entails(self):
        kb = self.example1
        parse = kb.parse
        texts = ["big", "striped", "big & striped", "big | ~striped", "false", "true", "big -> striped"]
        for alpha in texts:
            self.assertTrue(inference.nm_entails(kb, parse(alpha), parse(alpha)))
            self.assertTrue(inference.nm_entails(kb, parse("big & ~big"), parse(alpha)))
            for beta in texts:
                self.assertEqual(inference.nm_entails(kb, parse(alpha), parse(beta)),
                                 formulas.classically_entails(parse(alpha), parse(beta), kb.space))
        # Nonmonotonic: more facts may withdraw a conclusion.
        kb = self.example4
        self.assertTrue(inference.nm_entails(kb, kb.parse("~r"), kb.parse("~q")))
        self.assertFalse(inference.nm_entails(kb, kb.parse("~r & (q | ~p)"), kb.parse("~q")))

    def test_classical_for_examples_1_and_2(self):
        for n in range(1, 6):
            masks = utils.mask_array(n)
            for kb in (corpus.constant_kb(n), corpus.cardinality_kb(n)):
                table = inference.selection_table(kb)
                # F |~ B iff F ⊆ B, for every pair of sets.
                np.testing.assert_array_equal(
                    utils.subset_array(table.consequences[:, None], masks[None, :]),
                    utils.subset_array(masks[:, None], masks[None, :]))
        kb = corpus.load_builtin("example2")
        canonical = [formulas.canonical_formula(s, kb.space) for s in kb.space.all_info_sets()]
        for alpha in canonical:
            for beta in canonical:
                self.assertEqual(inference.nm_entails(kb, alpha, beta),
                                 formulas.classically_entails(alpha, beta, kb.space))

    def test_min_world_jumps_to_lowest_rank(self):
        for n in range(1, 7):
            rank = np.random.permutation(n).tolist()
            kb = corpus.min_world_kb(n, rank)
            table = inference.selection_table(kb)
            for mask in range(1, 1 << n):
                lowest = min(sets.InfoSet(mask, n).indices, key=lambda i: rank[i])
                self.assertEqual(int(table.consequences[mask]), 1 << lowest)

    def test_selection_table_matches_nm_consequences(self):
        rng = np.random.default_rng(0)
        kbs = [self.example1, self.example3, self.example4, corpus.load_builtin("tie"), corpus.shrinking_flip_kb()]
        for _ in range(20):
            space = WorldSpace.binary(3)
            kbs.append(representability.random_eq2_table_kb(space, corpus.random_stereotypes(space, rng), rng))
        for kb in kbs:
            table = inference.selection_table(kb)
            for info_set in kb.space.all_info_sets(nonempty=True):
                try:
                    result = inference.nm_consequences(kb, info_set)
                except errors.NoUniqueMinimum:
                    self.assertEqual(table.chosen[info_set.mask], -1)
                    self.assertGreater(table.n_minimal[info_set.mask], 1)
                    continue
                self.assertEqual(kb.stereotypes[table.chosen[info_set.mask]].name, result.chosen)
                self.assertEqual(int(table.consequences[info_set.mask]), result.consequences.mask)

    def test_left_logical_equivalence(self):
        kb = self.example4
        first = inference.nm_consequences(kb, formulas.models(kb.parse("~r & ~(p & q)"), kb.space))
        second = inference.nm_consequences(kb, formulas.models(kb.parse("~(r | p & q)"), kb.space))
        self.assertEqual(first, second)

    def test_stereotype_theory_and_closure(self):
        kb = self.example1
        theory = inference.stereotype_theory(kb, kb.info_set(["w1"]))
        self.assertEqual(formulas.models(theory, kb.space), kb.space.full)

        kb = self.example3
        theory = inference.stereotype_theory(kb, kb.info_set(["w3", "w5"]))
        self.assertEqual(theory, formulas.canonical_formula(kb.info_set(["w3"]), kb.space))

        kb = self.example4
        given = kb.info_set(["w0", "w1", "w2"])
        expected = formulas.canonical_formula(kb.info_set(["w0", "w1"]), kb.space)
        self.assertEqual(inference.stereotype_theory(kb, given), expected)
        self.assertEqual(inference.consequence_closure(kb, formulas.canonical_formula(given, kb.space)), expected)
        self.assertEqual(inference.consequence_closure(kb, formulas.BOTTOM), formulas.BOTTOM)

        kb = corpus.load_builtin("example2")
        alpha = kb.parse("p -> q")
        self.assertEqual(formulas.models(inference.consequence_closure(kb, alpha), kb.space),
                         formulas.models(alpha, kb.space))

    def test_explain(self):
        kb = self.example4
        explanation = inference.explain(kb, kb.info_set(["w0", "w1", "w2"]))
        self.assertEqual([(r.stereotype, str(r.value)) for r in explanation.rows], [("S_0", "0"), ("S_1", "4/3"),
                                                                                    ("S_2", "8/3")])
        self.assertTrue(explanation.unique)
        self.assertEqual(explanation.minimal, ("S_0",))

        tie = corpus.load_builtin("tie")
        explanation = inference.explain(tie, tie.space.full)
        self.assertFalse(explanation.unique)
        self.assertEqual(explanation.minimal, ("S_a", "S_b"))

    def test_explain_empty(self):
        kb = corpus.cardinality_kb(2)
        explanation = inference.explain(kb, kb.space.empty)
        self.assertLen(explanation.rows, 3)
        self.assertEmpty(explanation.minimal)
        self.assertFalse(explanation.unique)

    def test_result_annotations_resolve(self):
        hints = typing.get_type_hints(inference.InferenceResult)
        self.assertEqual(hints["distances"], typing.Tuple[typing.Tuple[str, distances.DistanceValue], ...])

    def test_find_nonmonotone_selection(self):
        self.assertIsNone(inference.find_nonmonotone_selection(corpus.cardinality_kb(4)))
        kb = self.example4
        big, small = inference.find_nonmonotone_selection(kb)
        self.assertEqual(small & ~big, 0)
        chosen_big = inference.best_stereotype(kb, sets.InfoSet(big, kb.space.size))
        chosen_small = inference.best_stereotype(kb, sets.InfoSet(small, kb.space.size))
        self.assertFalse(kb.stereotype(chosen_small).extent <= kb.stereotype(chosen_big).extent)


if __name__ == "__main__":
    absltest.main()
