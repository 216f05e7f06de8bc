import fractions

from absl.testing import absltest
from absl.testing import parameterized
import numpy as np

from stereo_reasoning import corpus
from stereo_reasoning import distances
from stereo_reasoning import sets


class DistanceValueTest(parameterized.TestCase):

    @parameterized.parameters((3, "3"), ("4/3", "4/3"), ("8/6", "4/3"), ("-2", "-2"), ("inf", "inf"), (-1, "-1"))
    def test_parse(self, raw, text):
        self.assertEqual(str(distances.DistanceValue.parse(raw)), text)

    @parameterized.parameters((True,), ("1/0",), ("x",), (1.5,), (None,))
    def test_parse_rejects(self, raw):
        with self.assertRaises(ValueError):
            distances.DistanceValue.parse(raw)

    def test_order(self):
        values = [distances.DistanceValue.parse(v) for v in ("inf", "8/3", "-2", "0", "4/3")]
        self.assertEqual([str(v) for v in sorted(values)], ["-2", "0", "4/3", "8/3", "inf"])
        self.assertEqual(distances.INFINITY, distances.DistanceValue.parse("inf"))
        self.assertGreater(distances.INFINITY, distances.DistanceValue.finite(10**9))
        self.assertFalse(distances.INFINITY < distances.INFINITY)
        self.assertEqual(distances.DistanceValue.finite(2, 4).denominator, 2)


class FamilyTest(absltest.TestCase):

    def setUp(self):
        np.random.seed(0)

    def test_cardinality(self):
        kb = corpus.cardinality_kb(5)
        info_set = kb.info_set(["w1", "w4"])
        stereotype = kb.stereotype("S_w1_w4")
        self.assertEqual(distances.distance(kb, info_set, stereotype), distances.DistanceValue.finite(-2))

    def test_min_world(self):
        kb = corpus.load_builtin("example3")
        info_set = kb.info_set(["w3", "w5"])
        self.assertEqual(distances.distance(kb, info_set, kb.stereotype("S_w3")), distances.DistanceValue.finite(3))
        self.assertEqual(distances.distance(kb, info_set, kb.stereotype("S_w4")), distances.INFINITY)

    def test_partition_cover(self):
        kb = corpus.load_builtin("example4")
        info_set = kb.info_set(["w0", "w1", "w2"])
        values = [str(distances.distance(kb, info_set, s)) for s in kb.stereotypes]
        self.assertEqual(values, ["0", "4/3", "8/3"])
        # Distinct stereotypes are never at the same distance.
        matrix = distances.distance_matrix(kb)
        for mask in range(1 << kb.space.size):
            self.assertLen(set(matrix.ranks[mask].tolist()), len(kb.stereotypes))

    def test_blind_to_worlds_outside_the_stereotype(self):
        for _, kb in corpus.family_kbs((2, 3, 4, 5)):
            matrix = distances.distance_matrix(kb)
            for i, stereotype in enumerate(kb.stereotypes):
                for mask in range(1 << kb.space.size):
                    self.assertEqual(matrix.value(mask, i), matrix.value(mask & stereotype.extent.mask, i))

    def test_distance_matrix(self):
        kb = corpus.load_builtin("example3")
        matrix = distances.distance_matrix(kb)
        self.assertEqual(matrix.ranks.shape, (64, 6))
        self.assertEqual(list(matrix.levels), sorted(set(matrix.levels)))
        for _ in range(50):
            mask, i = np.random.randint(64), np.random.randint(6)
            self.assertEqual(matrix.value(mask, i), kb.distance.evaluate(mask, i, kb.stereotypes, kb.space.size))

    def test_table_from_function(self):
        family = distances.TableFamily.from_function(2, 2, lambda mask, i: fractions.Fraction(mask, i + 1))
        self.assertLen(family.values, 8)
        self.assertEqual(str(family.values[3 * 2 + 1]), "3/2")
        kb = corpus.shrinking_flip_kb()
        self.assertEqual(distances.distance(kb, sets.InfoSet(0b11, 2), kb.stereotype("A")), distances.ZERO)


if __name__ == "__main__":
    absltest.main()
