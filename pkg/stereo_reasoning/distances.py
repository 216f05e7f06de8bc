"""Distances `d(F, S)` from information sets to stereotypes, valued in extended rationals."""
import abc
import fractions
import functools
from enum import Enum

from flax import struct
import numpy as np

from stereo_reasoning import errors
from stereo_reasoning import sets
from stereo_reasoning import utils

from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union


@functools.total_ordering
@struct.dataclass
class DistanceValue:
    """An exact rational distance, or infinity (`rational is None`).

    Finite values are ordered by their rational value; infinity is greater than every finite value.
    """
    rational: Optional[fractions.Fraction] = struct.field(pytree_node=False)

    @classmethod
    def finite(cls, numerator: Union[int, fractions.Fraction], denominator: int = 1) -> "DistanceValue":
        if denominator <= 0:
            raise ValueError(f"Denominators must be positive; got {denominator}.")
        return cls(fractions.Fraction(numerator, denominator))

    @classmethod
    def parse(cls, value: Any) -> "DistanceValue":
        """Reads `"inf"`, `"p/q"`, `"p"` or a JSON integer."""
        if isinstance(value, bool):
            raise ValueError(f"Distances must be integers, `p/q` strings or 'inf'; got {value!r}.")
        if isinstance(value, int):
            return cls(fractions.Fraction(value))
        if isinstance(value, str):
            if value.strip() == "inf":
                return INFINITY
            try:
                numerator, _, denominator = value.strip().partition("/")
                return cls.finite(int(numerator), int(denominator) if denominator else 1)
            except ValueError:
                pass
        raise ValueError(f"Distances must be integers, `p/q` strings or 'inf'; got {value!r}.")

    @property
    def is_infinite(self) -> bool:
        return self.rational is None

    @property
    def numerator(self) -> Optional[int]:
        return None if self.rational is None else self.rational.numerator

    @property
    def denominator(self) -> Optional[int]:
        return None if self.rational is None else self.rational.denominator

    def __lt__(self, other: "DistanceValue") -> bool:
        if not isinstance(other, DistanceValue):
            return NotImplemented
        if self.rational is None:
            return False
        return other.rational is None or self.rational < other.rational

    def __str__(self) -> str:
        return "inf" if self.rational is None else str(self.rational)

    def to_json(self) -> str:
        return str(self)


INFINITY = DistanceValue(None)
ZERO = DistanceValue(fractions.Fraction(0))


class FamilyEnum(str, Enum):
    """Enum for the built-in distance families."""
    CONSTANT = "constant"
    CARDINALITY = "cardinality"
    MIN_WORLD = "min-world"
    PARTITION_COVER = "partition-cover"
    TABLE = "table"


@struct.dataclass
class DistanceFamilySpec(metaclass=abc.ABCMeta):
    """Abstract base class for distance families; `stereotypes` below are `knowledge_base.Stereotype`s."""

    family = None

    @abc.abstractmethod
    def evaluate(self, mask: int, index: int, stereotypes: Sequence[Any], n_worlds: int) -> DistanceValue:
        """Returns `d(F, S)` for `F` given by `mask` and `S = stereotypes[index]`."""

    def violations(self, space, stereotypes: Sequence[Any]) -> List[Tuple[str, str]]:
        """Returns `(message, location)` pairs for every way this family does not fit the knowledge base."""
        return []

    def params_to_json(self, space, stereotypes: Sequence[Any]) -> Dict[str, Any]:
        return {}

    def to_json(self, space, stereotypes: Sequence[Any]) -> Dict[str, Any]:
        return {"family": self.family.value, **self.params_to_json(space, stereotypes)}


@struct.dataclass
class ConstantFamily(DistanceFamilySpec):
    """`d(F, S) = 0`: the choice among stereotypes is irrelevant (meant for a single stereotype `W`)."""

    family = FamilyEnum.CONSTANT

    def evaluate(self, mask, index, stereotypes, n_worlds):
        return ZERO


@struct.dataclass
class CardinalityFamily(DistanceFamilySpec):
    """`d(F, S) = |S - F| - |S ∩ F|`; with every nonempty set a stereotype, `S^F = F`."""

    family = FamilyEnum.CARDINALITY

    def evaluate(self, mask, index, stereotypes, n_worlds):
        extent = stereotypes[index].extent.mask
        return DistanceValue.finite(utils.popcount(extent & ~mask) - utils.popcount(extent & mask))


@struct.dataclass
class MinWorldFamily(DistanceFamilySpec):
    """Singleton stereotypes `{w}`: `d(F, {w}) = rank(w)` if `w ∈ F`, else infinity.

    Attributes:
        rank: One nonnegative integer per world (by world index), pairwise distinct.
    """
    rank: Tuple[int, ...] = struct.field(pytree_node=False)

    family = FamilyEnum.MIN_WORLD

    def evaluate(self, mask, index, stereotypes, n_worlds):
        (world,) = stereotypes[index].extent.indices
        return DistanceValue.finite(self.rank[world]) if mask >> world & 1 else INFINITY

    def violations(self, space, stereotypes):
        found = []
        if len(self.rank) != space.size:
            found.append((f"rank must cover all {space.size} worlds; got {len(self.rank)} entries", "distance.rank"))
        if any(not isinstance(r, int) or isinstance(r, bool) or r < 0 for r in self.rank):
            found.append(("ranks must be nonnegative integers", "distance.rank"))
        if len(set(self.rank)) != len(self.rank):
            found.append(("ranks must be injective", "distance.rank"))
        for i, stereotype in enumerate(stereotypes):
            if len(stereotype.extent) != 1:
                found.append((f"min-world needs singleton stereotypes; {stereotype.name!r} has "
                              f"{len(stereotype.extent)} worlds", f"stereotypes[{i}]"))
        return found

    def params_to_json(self, space, stereotypes):
        return {"rank": {name: r for name, r in zip(space.names, self.rank)}}


@struct.dataclass
class PartitionCoverFamily(DistanceFamilySpec):
    """Partition stereotypes: `d(F, S_i) = |S_i - F| + i/k`, `i` the position of `S_i` in `order`.

    The fractional part breaks ties in favour of the smallest index.
    """
    order: Tuple[str, ...] = struct.field(pytree_node=False)

    family = FamilyEnum.PARTITION_COVER

    def evaluate(self, mask, index, stereotypes, n_worlds):
        stereotype = stereotypes[index]
        position = self.order.index(stereotype.name)
        return DistanceValue(utils.popcount(stereotype.extent.mask & ~mask) +
                             fractions.Fraction(position, len(self.order)))

    def violations(self, space, stereotypes):
        found = []
        names = [s.name for s in stereotypes]
        if sorted(self.order) != sorted(names) or len(set(self.order)) != len(self.order):
            found.append((f"order must list each stereotype exactly once; got {list(self.order)}", "distance.order"))
        covered = 0
        for i, stereotype in enumerate(stereotypes):
            if covered & stereotype.extent.mask:
                found.append((f"stereotype {stereotype.name!r} overlaps an earlier one; partition-cover needs "
                              "pairwise disjoint stereotypes", f"stereotypes[{i}]"))
            covered |= stereotype.extent.mask
        if covered != (1 << space.size) - 1:
            found.append(("partition-cover stereotypes must cover every world", "stereotypes"))
        return found

    def params_to_json(self, space, stereotypes):
        return {"order": list(self.order)}


@struct.dataclass
class TableFamily(DistanceFamilySpec):
    """An explicit, total table of distances.

    Attributes:
        values: `values[mask * k + i]` is `d(F, S_i)` for the set `F` with bit-mask `mask`; `k` stereotypes.
    """
    values: Tuple[DistanceValue, ...] = struct.field(pytree_node=False)

    family = FamilyEnum.TABLE

    @classmethod
    def from_function(cls, n_worlds: int, n_stereotypes: int,
                      fn: Callable[[int, int], Union[int, fractions.Fraction, DistanceValue]]) -> "TableFamily":
        """Tabulates `fn(mask, stereotype index)` over every mask and stereotype."""
        values = []
        for mask in range(1 << n_worlds):
            for index in range(n_stereotypes):
                value = fn(mask, index)
                values.append(value if isinstance(value, DistanceValue) else DistanceValue(fractions.Fraction(value)))
        return cls(tuple(values))

    def evaluate(self, mask, index, stereotypes, n_worlds):
        return self.values[mask * len(stereotypes) + index]

    def violations(self, space, stereotypes):
        expected = (1 << space.size) * len(stereotypes)
        if len(self.values) != expected:
            return [(f"table must have {expected} entries (every set times every stereotype); got {len(self.values)}",
                     "distance.entries")]
        return []

    def params_to_json(self, space, stereotypes):
        k = len(stereotypes)
        return {
            "entries": [{
                "info_set": list(space.names_of(sets.InfoSet(mask, space.size))),
                "stereotype": stereotype.name,
                "distance": self.values[mask * k + i].to_json()
            } for mask in range(1 << space.size) for i, stereotype in enumerate(stereotypes)]
        }


def family_from_json(document: Mapping[str, Any], space, stereotypes: Sequence[Any]) -> DistanceFamilySpec:
    """Builds a `DistanceFamilySpec` from the `distance` object of a knowledge base document.

    Raises:
        DistanceSpecError: on unknown families, unknown or missing parameters, or malformed values.
    """
    if not isinstance(document, Mapping):
        raise errors.DistanceSpecError("`distance` must be an object", "distance")
    try:
        family = FamilyEnum(document.get("family"))
    except ValueError:
        raise errors.DistanceSpecError(f"unknown family {document.get('family')!r}; use one of "
                                       f"{[f.value for f in FamilyEnum]}", "distance.family") from None
    allowed = {
        FamilyEnum.CONSTANT: set(),
        FamilyEnum.CARDINALITY: set(),
        FamilyEnum.MIN_WORLD: {"rank"},
        FamilyEnum.PARTITION_COVER: {"order"},
        FamilyEnum.TABLE: {"entries"},
    }[family]
    unknown = set(document) - allowed - {"family"}
    if unknown:
        raise errors.DistanceSpecError(f"unknown parameters {sorted(unknown)} for family {family.value!r}",
                                       "distance")
    missing = allowed - set(document)
    if missing:
        raise errors.DistanceSpecError(f"missing parameters {sorted(missing)} for family {family.value!r}", "distance")

    if family == FamilyEnum.CONSTANT:
        return ConstantFamily()
    if family == FamilyEnum.CARDINALITY:
        return CardinalityFamily()
    if family == FamilyEnum.MIN_WORLD:
        rank = document["rank"]
        if not isinstance(rank, Mapping) or set(rank) != set(space.names):
            raise errors.DistanceSpecError("rank must map every world name to an integer", "distance.rank")
        return MinWorldFamily(tuple(rank[name] for name in space.names))
    if family == FamilyEnum.PARTITION_COVER:
        order = document["order"]
        if not isinstance(order, list) or not all(isinstance(name, str) for name in order):
            raise errors.DistanceSpecError("order must be a list of stereotype names", "distance.order")
        return PartitionCoverFamily(tuple(order))

    entries = document["entries"]
    if not isinstance(entries, list):
        raise errors.DistanceSpecError("entries must be a list", "distance.entries")
    names = [s.name for s in stereotypes]
    table: Dict[Tuple[int, int], DistanceValue] = {}
    for j, entry in enumerate(entries):
        location = f"distance.entries[{j}]"
        if not isinstance(entry, Mapping) or set(entry) != {"info_set", "stereotype", "distance"}:
            raise errors.DistanceSpecError("entries need exactly `info_set`, `stereotype` and `distance`", location)
        if entry["stereotype"] not in names:
            raise errors.DistanceSpecError(f"unknown stereotype {entry['stereotype']!r}", location)
        try:
            mask = space.info_set(entry["info_set"]).mask
            value = DistanceValue.parse(entry["distance"])
        except (errors.UnknownWorld, TypeError, ValueError) as e:
            raise errors.DistanceSpecError(str(e), location) from None
        key = (mask, names.index(entry["stereotype"]))
        if key in table:
            raise errors.DistanceSpecError("duplicate table entry", location)
        table[key] = value
    k = len(names)
    if len(table) != (1 << space.size) * k:
        raise errors.DistanceSpecError(f"table must be total: {(1 << space.size) * k} entries needed, "
                                       f"{len(table)} given", "distance.entries")
    return TableFamily(tuple(table[(mask, i)] for mask in range(1 << space.size) for i in range(k)))


def distance(kb, info_set: sets.InfoSet, stereotype) -> DistanceValue:
    """Returns `d(F, S)` for an information set `F` and a stereotype `S` of `kb`."""
    index = kb.stereotype_index(stereotype.name)
    return kb.distance.evaluate(info_set.mask, index, kb.stereotypes, kb.space.size)


@struct.dataclass
class DistanceMatrix:
    """Every distance `d(F, S_i)` of a knowledge base, as exact levels plus order-isomorphic integer ranks.

    Attributes:
        levels: The distinct distance values, in increasing order.
        ranks: A `(2 ** |W|, k)` int64 array; `levels[ranks[mask, i]] == d(F, S_i)`.
    """
    levels: Tuple[DistanceValue, ...] = struct.field(pytree_node=False)
    ranks: np.ndarray

    def value(self, mask: int, index: int) -> DistanceValue:
        return self.levels[int(self.ranks[mask, index])]


def distance_matrix(kb) -> DistanceMatrix:
    """Evaluates the distance family of `kb` on every information set and stereotype."""
    k = len(kb.stereotypes)
    values = [
        kb.distance.evaluate(mask, i, kb.stereotypes, kb.space.size)
        for mask in range(1 << kb.space.size)
        for i in range(k)
    ]
    levels = tuple(sorted(set(values)))
    position = {level: r for r, level in enumerate(levels)}
    ranks = np.array([position[v] for v in values], dtype=np.int64).reshape(1 << kb.space.size, k)
    return DistanceMatrix(levels, ranks)
