from flax import struct

from stereo_reasoning import utils

from typing import Iterator, List


@struct.dataclass
class InfoSet:
    """Class for representing a set of worlds as a bit-mask over world indices of a fixed `WorldSpace`.

    Information sets (the facts at hand) and stereotype extents are both `InfoSet`s. Bit `i` of `mask` is set iff
    the `i`th world of the space belongs to the set.

    Attributes:
        mask: A nonnegative integer; only bits below `size` may be set in a well-formed set.
        size: The number of worlds of the ambient space.
    """
    mask: int
    size: int = struct.field(pytree_node=False)

    @classmethod
    def empty(cls, size: int) -> "InfoSet":
        return cls(0, size)

    @classmethod
    def full(cls, size: int) -> "InfoSet":
        return cls((1 << size) - 1, size)

    @classmethod
    def from_indices(cls, indices, size: int) -> "InfoSet":
        return cls(utils.from_bits(indices), size)

    @property
    def indices(self) -> List[int]:
        """Returns the world indices in the set, in increasing order."""
        return utils.bits(self.mask)

    @property
    def is_well_formed(self) -> bool:
        """Returns whether `mask` only uses bits below `size`."""
        return 0 <= self.mask < (1 << self.size)

    def __len__(self) -> int:
        return utils.popcount(self.mask)

    def __bool__(self) -> bool:
        return self.mask != 0

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __contains__(self, index: int) -> bool:
        return bool(self.mask >> index & 1)

    def _check(self, other: "InfoSet") -> None:
        if not isinstance(other, InfoSet):
            raise TypeError(f"Expected an `InfoSet`; got {type(other).__name__}.")
        if other.size != self.size:
            raise ValueError(f"Information sets must share a world space; got sizes {self.size} and {other.size}.")

    def __or__(self, other: "InfoSet") -> "InfoSet":
        self._check(other)
        return InfoSet(self.mask | other.mask, self.size)

    def __and__(self, other: "InfoSet") -> "InfoSet":
        self._check(other)
        return InfoSet(self.mask & other.mask, self.size)

    def __sub__(self, other: "InfoSet") -> "InfoSet":
        self._check(other)
        return InfoSet(self.mask & ~other.mask, self.size)

    def __le__(self, other: "InfoSet") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def __ge__(self, other: "InfoSet") -> bool:
        return other <= self

    def __lt__(self, other: "InfoSet") -> bool:
        return self <= other and self.mask != other.mask

    def __gt__(self, other: "InfoSet") -> bool:
        return other < self

    def complement(self) -> "InfoSet":
        return InfoSet(~self.mask & ((1 << self.size) - 1), self.size)

    def union(self, other: "InfoSet") -> "InfoSet":
        return self | other

    def intersection(self, other: "InfoSet") -> "InfoSet":
        return self & other

    def difference(self, other: "InfoSet") -> "InfoSet":
        return self - other

    def issubset(self, other: "InfoSet") -> bool:
        return self <= other

    def isdisjoint(self, other: "InfoSet") -> bool:
        return not self & other


def all_info_sets(size: int, nonempty: bool = False) -> Iterator[InfoSet]:
    """Yields every `InfoSet` over `size` worlds in increasing mask order."""
    return (InfoSet(mask, size) for mask in range(1 if nonempty else 0, 1 << size))
