"""Best-stereotype selection and the nonmonotonic consequence relation it induces.

For a nonempty information set `F`, the best stereotype `S^F` is the unique stereotype at minimal distance from `F`,
and the worlds the reasoner jumps to are `F' = F ∩ S^F`. A formula `beta` follows from `alpha` (`alpha |~ beta`) iff
every world of `F'` for `F = models(alpha)` satisfies `beta`.
"""
from flax import struct
import numpy as np

from stereo_reasoning import distances
from stereo_reasoning import errors
from stereo_reasoning import formulas
from stereo_reasoning import sets
from stereo_reasoning.distances import DistanceValue
from stereo_reasoning.knowledge_base import KnowledgeBase

from typing import Dict, List, Optional, Tuple


@struct.dataclass
class InferenceResult:
    """The outcome of stereotypical inference from an information set.

    Attributes:
        given: The information set `F`.
        chosen: Name of the best stereotype `S^F`, or `None` when `F` is empty.
        consequences: `F' = F ∩ S^F`, the worlds the reasoner jumps to.
        consistent: Whether `F'` is nonempty whenever `F` is (vacuously true for empty `F`).
        distances: `d(F, S)` for every stereotype `S` (empty when `F` is empty).
    """
    given: sets.InfoSet
    chosen: Optional[str]
    consequences: sets.InfoSet
    consistent: bool
    distances: Tuple[Tuple[str, DistanceValue], ...] = struct.field(pytree_node=False)

    @property
    def distance_map(self) -> Dict[str, DistanceValue]:
        return dict(self.distances)

    def to_json(self, kb: KnowledgeBase) -> Dict:
        return {
            "given": list(kb.space.names_of(self.given)),
            "chosen": self.chosen,
            "consequences": list(kb.space.names_of(self.consequences)),
            "consistent": self.consistent,
            "distances": {name: str(value) for name, value in self.distances},
        }


def _distances(kb: KnowledgeBase, info_set: sets.InfoSet) -> List[distances.DistanceValue]:
    return [kb.distance.evaluate(info_set.mask, i, kb.stereotypes, kb.space.size) for i in range(len(kb.stereotypes))]


def _minimal(kb: KnowledgeBase, info_set: sets.InfoSet) -> Tuple[List[int], List[distances.DistanceValue]]:
    values = _distances(kb, info_set)
    minimum = min(values)
    return [i for i, v in enumerate(values) if v == minimum], values


def best_stereotype(kb: KnowledgeBase, info_set: sets.InfoSet) -> str:
    """Returns the name of the unique stereotype closest to `info_set`.

    Raises:
        EmptyInfoSet: if `info_set` is empty.
        NoUniqueMinimum: if several stereotypes share the minimal distance (Assumption Zero fails here).
    """
    if not info_set:
        raise errors.EmptyInfoSet("The best stereotype is only defined for nonempty information sets.")
    minimal, _ = _minimal(kb, info_set)
    if len(minimal) > 1:
        raise errors.NoUniqueMinimum(kb.space.names_of(info_set), tuple(kb.stereotypes[i].name for i in minimal))
    return kb.stereotypes[minimal[0]].name


def nm_consequences(kb: KnowledgeBase, info_set: sets.InfoSet) -> InferenceResult:
    """Returns the `InferenceResult` for `info_set`; the empty set short-circuits to empty consequences."""
    if not info_set:
        return InferenceResult(info_set, None, info_set, True, ())
    chosen = best_stereotype(kb, info_set)
    consequences = info_set & kb.stereotype(chosen).extent
    values = _distances(kb, info_set)
    return InferenceResult(info_set, chosen, consequences, bool(consequences),
                           tuple((s.name, v) for s, v in zip(kb.stereotypes, values)))


def nm_entails(kb: KnowledgeBase, alpha: formulas.Formula, beta: formulas.Formula) -> bool:
    """Returns whether `alpha |~ beta`: every world `alpha` jumps to satisfies `beta`."""
    consequences = nm_consequences(kb, formulas.models(alpha, kb.space)).consequences
    return consequences <= formulas.models(beta, kb.space)


def stereotype_theory(kb: KnowledgeBase, info_set: sets.InfoSet) -> formulas.Formula:
    """Returns a formula axiomatizing what holds in every world of the stereotype that best fits `info_set`."""
    return formulas.canonical_formula(kb.stereotype(best_stereotype(kb, info_set)).extent, kb.space)


def consequence_closure(kb: KnowledgeBase, alpha: formulas.Formula) -> formulas.Formula:
    """Returns a formula whose classical consequences over the space are exactly the nonmonotonic ones of `alpha`."""
    result = nm_consequences(kb, formulas.models(alpha, kb.space))
    return formulas.canonical_formula(result.consequences, kb.space)


@struct.dataclass
class ExplainRow:
    stereotype: str
    value: distances.DistanceValue = struct.field(pytree_node=False)
    minimal: bool


@struct.dataclass
class Explanation:
    """The distance comparison behind a choice of best stereotype, rows sorted by increasing distance."""
    given: sets.InfoSet
    rows: Tuple[ExplainRow, ...]

    @property
    def unique(self) -> bool:
        return sum(row.minimal for row in self.rows) == 1

    @property
    def minimal(self) -> Tuple[str, ...]:
        return tuple(row.stereotype for row in self.rows if row.minimal)


def explain(kb: KnowledgeBase, info_set: sets.InfoSet) -> Explanation:
    """Returns every `d(F, S_i)` sorted ascending (ties in declaration order), with the minima flagged.

    No row is flagged for an empty `F`, which selects no stereotype.
    """
    values = _distances(kb, info_set)
    minimum = min(values)
    order = sorted(range(len(values)), key=lambda i: (values[i], i))
    return Explanation(
        info_set,
        tuple(ExplainRow(kb.stereotypes[i].name, values[i], bool(info_set) and values[i] == minimum) for i in order))


@struct.dataclass
class SelectionTable:
    """Vectorized selection for every information set of a knowledge base.

    Attributes:
        matrix: The `DistanceMatrix` the table is derived from.
        extents: Stereotype extents as an int64 mask vector of length `k`.
        n_minimal: Number of co-minimal stereotypes per mask.
        chosen: Index of `S^F` per mask, or `-1` where the minimum is not unique.
        consequences: `F ∩ S^F` per mask (`0` where `chosen == -1`).
    """
    matrix: distances.DistanceMatrix
    extents: np.ndarray
    n_minimal: np.ndarray
    chosen: np.ndarray
    consequences: np.ndarray

    @property
    def n_worlds(self) -> int:
        return self.chosen.shape[0].bit_length() - 1

    @property
    def unique(self) -> np.ndarray:
        """Boolean vector: the minimum is unique for this mask."""
        return self.n_minimal == 1


def selection_table(kb: KnowledgeBase, matrix: Optional[distances.DistanceMatrix] = None) -> SelectionTable:
    """Computes `S^F` and `F ∩ S^F` for every mask, including the empty one, with numpy."""
    if matrix is None:
        matrix = distances.distance_matrix(kb)
    ranks = matrix.ranks
    extents = np.array([s.extent.mask for s in kb.stereotypes], dtype=np.int64)
    is_minimal = ranks == ranks.min(axis=1, keepdims=True)
    n_minimal = is_minimal.sum(axis=1)
    chosen = np.where(n_minimal == 1, np.argmax(is_minimal, axis=1), -1)
    masks = np.arange(ranks.shape[0], dtype=np.int64)
    consequences = np.where(chosen >= 0, masks & extents[np.maximum(chosen, 0)], 0)
    return SelectionTable(matrix, extents, n_minimal, chosen, consequences)


def find_nonmonotone_selection(kb: KnowledgeBase,
                               table: Optional[SelectionTable] = None) -> Optional[Tuple[int, int]]:
    """Returns the first `(F, G)` masks with `G ⊆ F` nonempty and `extent(S^G) ⊄ extent(S^F)`, or `None`.

    Selection is not expected to be monotone: the best stereotype for a more specific information set may be
    unrelated to (e.g. more general than) that of the broader set.
    """
    if table is None:
        table = selection_table(kb)
    n = kb.space.size
    for big in range(1, 1 << n):
        if table.chosen[big] < 0:
            continue
        big_extent = int(table.extents[table.chosen[big]])
        small = big
        while small:
            if table.chosen[small] >= 0 and int(table.extents[table.chosen[small]]) & ~big_extent:
                return big, small
            small = (small - 1) & big
    return None
