from absl.testing import absltest
import numpy as np

from stereo_reasoning import sets


class InfoSetTest(absltest.TestCase):

    def setUp(self):
        np.random.seed(0)

    def test_operations_match_python_sets(self):
        size = 6
        for _ in range(200):
            a, b = np.random.randint(0, 1 << size, size=2).tolist()
            x, y = sets.InfoSet(a, size), sets.InfoSet(b, size)
            sa, sb = set(x.indices), set(y.indices)
            self.assertEqual(set((x | y).indices), sa | sb)
            self.assertEqual(set((x & y).indices), sa & sb)
            self.assertEqual(set((x - y).indices), sa - sb)
            self.assertEqual(set(x.complement().indices), set(range(size)) - sa)
            self.assertEqual(x <= y, sa <= sb)
            self.assertEqual(x < y, sa < sb)
            self.assertEqual(x.isdisjoint(y), sa.isdisjoint(sb))
            self.assertLen(x, len(sa))

    def test_constructors(self):
        self.assertEqual(sets.InfoSet.from_indices([0, 2], 3).mask, 0b101)
        self.assertEqual(sets.InfoSet.full(3).mask, 0b111)
        self.assertFalse(sets.InfoSet.empty(3))
        self.assertTrue(sets.InfoSet(0b111, 3).is_well_formed)
        self.assertFalse(sets.InfoSet(0b1000, 3).is_well_formed)
        self.assertIn(2, sets.InfoSet(0b100, 3))
        self.assertEqual(list(sets.InfoSet(0b110, 3)), [1, 2])

    def test_mismatched_spaces(self):
        with self.assertRaises(ValueError):
            sets.InfoSet(1, 2) | sets.InfoSet(1, 3)
        with self.assertRaises(TypeError):
            sets.InfoSet(1, 2) & {0}

    def test_all_info_sets(self):
        self.assertEqual([s.mask for s in sets.all_info_sets(2)], [0, 1, 2, 3])
        self.assertEqual([s.mask for s in sets.all_info_sets(2, nonempty=True)], [1, 2, 3])


if __name__ == "__main__":
    absltest.main()
