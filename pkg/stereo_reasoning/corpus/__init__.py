"""Built-in knowledge bases: the shipped demo documents and generators for each family at any size."""
import os

import numpy as np

from stereo_reasoning import distances
from stereo_reasoning import errors
from stereo_reasoning import sets
from stereo_reasoning.knowledge_base import KnowledgeBase, Stereotype, load_kb
from stereo_reasoning.worlds import WorldSpace

from typing import List, Optional, Sequence, Tuple

_CORPUS_DIR = os.path.dirname(os.path.abspath(__file__))

BUILTIN_NAMES = ("example1", "example2", "example3", "example4", "tie")


def load_builtin(name: str) -> KnowledgeBase:
    """Loads the shipped knowledge base called `name` (one of `BUILTIN_NAMES`)."""
    if name not in BUILTIN_NAMES:
        raise errors.FormatError(f"unknown built-in knowledge base {name!r}; use one of {list(BUILTIN_NAMES)}")
    with open(os.path.join(_CORPUS_DIR, f"{name}.json"), encoding="utf-8") as f:
        return load_kb(f.read())


def subset_name(space: WorldSpace, info_set: sets.InfoSet) -> str:
    return "_".join(("S",) + space.names_of(info_set))


def constant_kb(n_worlds: int) -> KnowledgeBase:
    """A single stereotype `W` at constant distance: nonmonotonic consequence is classical consequence."""
    space = WorldSpace.binary(n_worlds)
    return KnowledgeBase(space, (Stereotype("S_0", space.full),), distances.ConstantFamily())


def cardinality_kb(n_worlds: int) -> KnowledgeBase:
    """Every nonempty set is a stereotype, at distance `|S - F| - |S ∩ F|`; the best stereotype of `F` is `F`."""
    space = WorldSpace.binary(n_worlds)
    stereotypes = tuple(Stereotype(subset_name(space, s), s) for s in space.all_info_sets(nonempty=True))
    return KnowledgeBase(space, stereotypes, distances.CardinalityFamily())


def min_world_kb(n_worlds: int, rank: Optional[Sequence[int]] = None) -> KnowledgeBase:
    """Singleton stereotypes ranked by `rank` (the identity by default); `F` jumps to its lowest-ranked world."""
    space = WorldSpace.binary(n_worlds)
    rank = tuple(range(n_worlds)) if rank is None else tuple(rank)
    stereotypes = tuple(
        Stereotype(f"S_{name}", sets.InfoSet.from_indices([i], n_worlds)) for i, name in enumerate(space.names))
    return KnowledgeBase(space, stereotypes, distances.MinWorldFamily(rank))


def partition_cover_kb(n_worlds: int, n_stereotypes: Optional[int] = None) -> KnowledgeBase:
    """Contiguous blocks of worlds as stereotypes, ties broken towards the first block.

    With six worlds and three blocks this is the `example4` document.
    """
    n_stereotypes = min(3, n_worlds) if n_stereotypes is None else n_stereotypes
    if not 1 <= n_stereotypes <= n_worlds:
        raise ValueError(f"A partition of {n_worlds} worlds needs between 1 and {n_worlds} blocks; "
                         f"got {n_stereotypes}.")
    space = WorldSpace.binary(n_worlds)
    stereotypes = tuple(
        Stereotype(f"S_{i}", sets.InfoSet.from_indices(block.tolist(), n_worlds))
        for i, block in enumerate(np.array_split(np.arange(n_worlds), n_stereotypes)))
    return KnowledgeBase(space, stereotypes, distances.PartitionCoverFamily(tuple(s.name for s in stereotypes)))


def family_kbs(sizes: Sequence[int] = (2, 3, 4, 5, 6)) -> List[Tuple[str, KnowledgeBase]]:
    """Returns `(label, kb)` for each built-in family instantiated at each size."""
    kbs = []
    for n in sizes:
        kbs.append((f"constant-{n}", constant_kb(n)))
        kbs.append((f"cardinality-{n}", cardinality_kb(n)))
        kbs.append((f"min-world-{n}", min_world_kb(n)))
        kbs.append((f"partition-cover-{n}", partition_cover_kb(n)))
    return kbs


def eq2_violating_kb() -> KnowledgeBase:
    """One stereotype `{w0}` over two worlds with `d(F, S) = |F - S|`: the distance depends on `F - S`."""
    space = WorldSpace.binary(2)
    stereotype = Stereotype("S_0", space.info_set(["w0"]))
    family = distances.TableFamily.from_function(2, 1, lambda mask, _: int(mask >> 1 & 1))
    return KnowledgeBase(space, (stereotype,), family)


def shrinking_flip_kb() -> KnowledgeBase:
    """Two worlds, stereotypes `A = {w0}` and `B = {w0, w1}`; `W` picks `A` but `{w0}` picks `B`.

    Selection is unique and consistent everywhere, so only the invariance of the best stereotype under shrinking
    `F` towards `F ∩ S^F` fails.
    """
    space = WorldSpace.binary(2)
    stereotypes = (Stereotype("A", space.info_set(["w0"])), Stereotype("B", space.full))
    # Rows by mask: {}, {w0}, {w1}, {w0, w1}; columns A, B.
    table = ((0, 1), (1, 0), (1, 0), (0, 1))
    family = distances.TableFamily.from_function(2, 2, lambda mask, i: table[mask][i])
    return KnowledgeBase(space, stereotypes, family)


def random_stereotypes(space: WorldSpace, rng: np.random.Generator, max_stereotypes: int = 4) -> List[sets.InfoSet]:
    """Draws between one and `max_stereotypes` distinct nonempty stereotypes, returned in mask order."""
    n_sets = (1 << space.size) - 1
    count = int(rng.integers(1, min(max_stereotypes, n_sets) + 1))
    masks = sorted(int(m) + 1 for m in rng.choice(n_sets, size=count, replace=False))
    return [sets.InfoSet(m, space.size) for m in masks]
