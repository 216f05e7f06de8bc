import itertools

import numpy as np

from typing import Iterator, List, Optional, Sequence, Tuple


def popcount(mask: int) -> int:
    """Returns the number of set bits in `mask`."""
    return bin(mask).count("1")


def bits(mask: int) -> List[int]:
    """Returns the indices of the set bits of `mask`, in increasing order."""
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def from_bits(indices: Sequence[int]) -> int:
    """Returns the mask whose set bits are exactly `indices`."""
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def submasks(mask: int) -> Iterator[int]:
    """Yields every submask of `mask` (including `0` and `mask` itself) in increasing numeric order."""
    indices = bits(mask)
    return iter(sorted(from_bits(c) for r in range(len(indices) + 1) for c in itertools.combinations(indices, r)))


def supermasks_within(mask: int, bound: int) -> Iterator[int]:
    """Yields every `G` with `mask ⊆ G ⊆ bound`, in increasing numeric order."""
    if mask & ~bound:
        return iter(())
    return (mask | extra for extra in submasks(bound & ~mask))


def mask_array(n_worlds: int) -> np.ndarray:
    """Returns `np.arange(2 ** n_worlds)`, the vector of all information set masks."""
    return np.arange(1 << n_worlds, dtype=np.int64)


def popcount_array(masks: np.ndarray) -> np.ndarray:
    """Vectorized `popcount` for nonnegative int64 masks of at most 62 bits."""
    masks = np.asarray(masks, dtype=np.int64)
    counts = np.zeros(masks.shape, dtype=np.int64)
    for i in range(62):
        if not np.any(masks >> i):
            break
        counts += (masks >> i) & 1
    return counts


def subset_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise (broadcasting) test `a ⊆ b` on mask arrays."""
    return (a & ~b) == 0


def first_rows(index_arrays: Tuple[np.ndarray, ...], limit: Optional[int]) -> List[Tuple[int, ...]]:
    """Zips the index arrays from `np.nonzero` into tuples, keeping the lexicographically smallest `limit`."""
    rows = sorted(zip(*(a.tolist() for a in index_arrays)))
    return rows if limit is None else rows[:limit]
