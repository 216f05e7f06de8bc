import math
import re

from flax import struct
import numpy as np

from stereo_reasoning import errors
from stereo_reasoning import sets

from typing import Dict, Iterable, Mapping, Sequence, Tuple

ATOM_PATTERN = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")
NAME_PATTERN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
RESERVED_ATOMS = ("true", "false")


@struct.dataclass
class World:
    """A named propositional valuation.

    Attributes:
        name: The world's identifier, unique within its space.
        valuation: `(atom, value)` pairs, one per atom of the space, in the space's atom order.
    """
    name: str
    valuation: Tuple[Tuple[str, bool], ...]

    @property
    def assignment(self) -> Dict[str, bool]:
        return dict(self.valuation)

    @property
    def values(self) -> Tuple[bool, ...]:
        return tuple(value for _, value in self.valuation)


@struct.dataclass
class WorldSpace:
    """Class for representing a finite set `W` of named worlds over an ordered set of atoms.

    The raw constructor does not validate; use `from_valuations` (or `knowledge_base.validate_kb`) to enforce that
    names are unique and valuations pairwise distinct, which is what makes every `InfoSet` definable by a formula.

    Attributes:
        atoms: Atom names in declaration (canonical) order.
        worlds: Worlds in declaration order; world `i` corresponds to bit `i` of an `InfoSet` mask.
    """
    atoms: Tuple[str, ...]
    worlds: Tuple[World, ...]

    @classmethod
    def from_valuations(cls, atoms: Sequence[str], worlds: Iterable[Tuple[str, Mapping[str, bool]]]) -> "WorldSpace":
        """Constructs a validated `WorldSpace` from atom names and `(world name, {atom: bool})` pairs.

        Raises:
            DuplicateName: if atom or world names repeat.
            FormatError: if a name is malformed or a valuation is not total over `atoms`.
            DuplicateValuation: if two worlds share a valuation.
        """
        atoms = tuple(atoms)
        for i, atom in enumerate(atoms):
            if not ATOM_PATTERN.match(atom) or atom in RESERVED_ATOMS:
                raise errors.FormatError(f"atom names must match {ATOM_PATTERN.pattern!r}; got {atom!r}",
                                         f"atoms[{i}]")
        if len(set(atoms)) != len(atoms):
            raise errors.DuplicateName(f"atom names must be unique; got {list(atoms)}", "atoms")
        built = []
        for i, (name, valuation) in enumerate(worlds):
            if not NAME_PATTERN.match(name):
                raise errors.FormatError(f"world names must match {NAME_PATTERN.pattern!r}; got {name!r}",
                                         f"worlds[{i}].name")
            if set(valuation) != set(atoms) or not all(isinstance(v, bool) for v in valuation.values()):
                raise errors.FormatError(f"valuation of {name!r} must map exactly the atoms {list(atoms)} to booleans",
                                         f"worlds[{i}].valuation")
            built.append(World(name, tuple((atom, valuation[atom]) for atom in atoms)))
        space = cls(atoms, tuple(built))
        for kind, message, location in space.violations():
            raise getattr(errors, kind)(message, location)
        return space

    @classmethod
    def binary(cls, n_worlds: int, prefix: str = "w") -> "WorldSpace":
        """Returns `n_worlds` worlds `w0, w1, ...` over atoms `x0, x1, ...` where world `i` encodes `i` in binary."""
        if n_worlds < 1:
            raise ValueError(f"A world space needs at least one world; got {n_worlds}.")
        n_atoms = max(1, math.ceil(math.log2(n_worlds)))
        atoms = tuple(f"x{j}" for j in range(n_atoms))
        return cls.from_valuations(atoms, ((f"{prefix}{i}", {a: bool(i >> j & 1) for j, a in enumerate(atoms)})
                                           for i in range(n_worlds)))

    def violations(self):
        """Yields `(error kind, message, location)` triples for every broken invariant of the space."""
        if not self.worlds:
            yield ("FormatError", "a world space needs at least one world", "worlds")
        if len(self.worlds) > 2**len(self.atoms):
            yield ("FormatError", f"{len(self.worlds)} worlds cannot have distinct valuations over "
                   f"{len(self.atoms)} atoms", "worlds")
        seen_names: Dict[str, int] = {}
        seen_values: Dict[Tuple[bool, ...], int] = {}
        for i, world in enumerate(self.worlds):
            if world.name in seen_names:
                yield ("DuplicateName", f"world {world.name!r} is declared twice", f"worlds[{i}].name")
            seen_names.setdefault(world.name, i)
            if world.values in seen_values:
                other = self.worlds[seen_values[world.values]].name
                yield ("DuplicateValuation", f"worlds {other!r} and {world.name!r} have the same valuation",
                       f"worlds[{i}].valuation")
            seen_values.setdefault(world.values, i)

    @property
    def size(self) -> int:
        """Returns `|W|`."""
        return len(self.worlds)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(world.name for world in self.worlds)

    @property
    def empty(self) -> sets.InfoSet:
        return sets.InfoSet.empty(self.size)

    @property
    def full(self) -> sets.InfoSet:
        return sets.InfoSet.full(self.size)

    def index(self, name: str) -> int:
        """Returns the index of the world called `name`."""
        for i, world in enumerate(self.worlds):
            if world.name == name:
                return i
        raise errors.UnknownWorld(f"unknown world {name!r}")

    def info_set(self, names: Iterable[str]) -> sets.InfoSet:
        """Returns the `InfoSet` containing the named worlds."""
        return sets.InfoSet.from_indices((self.index(name) for name in names), self.size)

    def names_of(self, info_set: sets.InfoSet) -> Tuple[str, ...]:
        """Returns the names of the worlds of `info_set` in declaration order."""
        return tuple(self.worlds[i].name for i in info_set.indices if i < self.size)

    def all_info_sets(self, nonempty: bool = False):
        return sets.all_info_sets(self.size, nonempty)

    def truth_table(self) -> np.ndarray:
        """Returns a `(|atoms|, |W|)` boolean array whose row `j` holds atom `j`'s value in every world."""
        return np.array([[world.values[j] for world in self.worlds] for j in range(len(self.atoms))],
                        dtype=bool).reshape(len(self.atoms), self.size)

