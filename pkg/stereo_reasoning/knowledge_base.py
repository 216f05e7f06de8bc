"""Knowledge bases: a world space, a finite list of stereotypes and a distance family; JSON load/dump/validation."""
import json
import os

from absl import logging
from flax import struct

from stereo_reasoning import distances
from stereo_reasoning import errors
from stereo_reasoning import formulas
from stereo_reasoning import sets
from stereo_reasoning import worlds
from stereo_reasoning.worlds import WorldSpace

from typing import Any, Dict, List, Mapping, Tuple, Union

_TOP_LEVEL_FIELDS = ("atoms", "worlds", "stereotypes", "distance")


@struct.dataclass
class Stereotype:
    """A named, nonempty set of worlds representing a typical kind of situation."""
    name: str
    extent: sets.InfoSet


@struct.dataclass
class KnowledgeBase:
    """The unit of every query: worlds, stereotypes and the distance from information sets to stereotypes."""
    space: WorldSpace
    stereotypes: Tuple[Stereotype, ...]
    distance: distances.DistanceFamilySpec

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(s.name for s in self.stereotypes)

    def stereotype_index(self, name: str) -> int:
        for i, stereotype in enumerate(self.stereotypes):
            if stereotype.name == name:
                return i
        raise KeyError(f"Unknown stereotype {name!r}.")

    def stereotype(self, name: str) -> Stereotype:
        return self.stereotypes[self.stereotype_index(name)]

    def info_set(self, names) -> sets.InfoSet:
        return self.space.info_set(names)

    def parse(self, text: str) -> formulas.Formula:
        return formulas.parse_formula(text, self.space)


@struct.dataclass
class Violation:
    """A broken knowledge base invariant.

    Attributes:
        kind: Name of the `errors` class that `load_kb` raises for this violation (e.g. `"DuplicateValuation"`).
        location: JSON path of the offending element.
        message: Human-readable description naming the offending element(s).
    """
    kind: str
    location: str
    message: str

    def to_error(self) -> errors.KnowledgeBaseError:
        return getattr(errors, self.kind)(self.message, self.location)


def validate_kb(kb: KnowledgeBase) -> List[Violation]:
    """Returns every invariant violation of `kb`; an empty list iff the knowledge base is well formed."""
    found = [Violation(kind, location, message) for kind, message, location in kb.space.violations()]
    if not kb.stereotypes:
        found.append(Violation("FormatError", "stereotypes", "a knowledge base needs at least one stereotype"))
    seen = set()
    for i, stereotype in enumerate(kb.stereotypes):
        location = f"stereotypes[{i}]"
        if not worlds.NAME_PATTERN.match(stereotype.name):
            found.append(Violation("FormatError", f"{location}.name", f"malformed stereotype name {stereotype.name!r}"))
        if stereotype.name in seen:
            found.append(Violation("DuplicateName", f"{location}.name", f"stereotype {stereotype.name!r} is "
                                   "declared twice"))
        seen.add(stereotype.name)
        if stereotype.extent.size != kb.space.size or not stereotype.extent.is_well_formed:
            found.append(Violation("UnknownWorld", f"{location}.worlds", f"stereotype {stereotype.name!r} refers to "
                                   f"worlds outside the {kb.space.size}-world space"))
        elif not stereotype.extent:
            found.append(Violation("EmptyStereotype", location, f"stereotype {stereotype.name!r} has no worlds"))
    if not any(v.kind in ("UnknownWorld", "DuplicateName") for v in found):
        found.extend(
            Violation("DistanceSpecError", location, message)
            for message, location in kb.distance.violations(kb.space, kb.stereotypes))
    return found


def _expect(condition: bool, message: str, location: str) -> None:
    if not condition:
        raise errors.FormatError(message, location)


def _load_stereotype(document: Any, i: int, space: WorldSpace) -> Stereotype:
    location = f"stereotypes[{i}]"
    _expect(isinstance(document, Mapping), "stereotypes must be objects", location)
    unknown = set(document) - {"name", "worlds", "formula"}
    _expect(not unknown, f"unknown fields {sorted(unknown)}", location)
    _expect(isinstance(document.get("name"), str), "stereotypes need a string `name`", f"{location}.name")
    _expect(("worlds" in document) != ("formula" in document), "give exactly one of `worlds` and `formula`", location)
    name = document["name"]
    if "worlds" in document:
        names = document["worlds"]
        _expect(isinstance(names, list) and all(isinstance(n, str) for n in names),
                "`worlds` must be a list of world names", f"{location}.worlds")
        try:
            extent = space.info_set(names)
        except errors.UnknownWorld as e:
            raise errors.UnknownWorld(str(e), f"{location}.worlds") from None
    else:
        _expect(isinstance(document["formula"], str), "`formula` must be a string", f"{location}.formula")
        try:
            extent = formulas.models(formulas.parse_formula(document["formula"], space), space)
        except (errors.FormulaSyntaxError, errors.UnknownAtom) as e:
            raise errors.FormatError(str(e), f"{location}.formula") from None
    return Stereotype(name, extent)


def load_kb(document: Union[str, bytes, Mapping[str, Any]]) -> KnowledgeBase:
    """Loads and fully validates a knowledge base from its JSON text (or an already decoded object).

    Raises:
        FormatError, DuplicateName, EmptyStereotype, DuplicateValuation, UnknownWorld, DistanceSpecError: each with
            the JSON path of the offending element.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except ValueError as e:
            raise errors.FormatError(f"invalid JSON: {e}") from None
    _expect(isinstance(document, Mapping), "a knowledge base must be a JSON object", "$")
    unknown = set(document) - set(_TOP_LEVEL_FIELDS)
    _expect(not unknown, f"unknown fields {sorted(unknown)}", "$")
    missing = set(_TOP_LEVEL_FIELDS) - set(document)
    _expect(not missing, f"missing fields {sorted(missing)}", "$")

    atoms = document["atoms"]
    _expect(isinstance(atoms, list) and all(isinstance(a, str) for a in atoms), "`atoms` must be a list of strings",
            "atoms")
    raw_worlds = document["worlds"]
    _expect(isinstance(raw_worlds, list), "`worlds` must be a list", "worlds")
    pairs = []
    for i, world in enumerate(raw_worlds):
        _expect(isinstance(world, Mapping) and set(world) == {"name", "valuation"},
                "worlds need exactly `name` and `valuation`", f"worlds[{i}]")
        _expect(isinstance(world["name"], str), "world names must be strings", f"worlds[{i}].name")
        _expect(isinstance(world["valuation"], Mapping), "valuations must be objects", f"worlds[{i}].valuation")
        pairs.append((world["name"], world["valuation"]))
    space = WorldSpace.from_valuations(atoms, pairs)

    raw_stereotypes = document["stereotypes"]
    _expect(isinstance(raw_stereotypes, list), "`stereotypes` must be a list", "stereotypes")
    stereotypes = tuple(_load_stereotype(s, i, space) for i, s in enumerate(raw_stereotypes))
    for violation in validate_kb(KnowledgeBase(space, stereotypes, distances.ConstantFamily())):
        raise violation.to_error()

    kb = KnowledgeBase(space, stereotypes, distances.family_from_json(document["distance"], space, stereotypes))
    for violation in validate_kb(kb):
        raise violation.to_error()
    logging.vlog(1, "Loaded knowledge base: %d worlds, %d stereotypes, %s distance.", space.size, len(stereotypes),
                 kb.distance.family.value)
    return kb


def to_json(kb: KnowledgeBase) -> Dict[str, Any]:
    """Returns the canonical JSON object for `kb` (stereotypes as explicit world lists)."""
    return {
        "atoms": list(kb.space.atoms),
        "worlds": [{
            "name": world.name,
            "valuation": dict(world.valuation)
        } for world in kb.space.worlds],
        "stereotypes": [{
            "name": s.name,
            "worlds": list(kb.space.names_of(s.extent))
        } for s in kb.stereotypes],
        "distance": kb.distance.to_json(kb.space, kb.stereotypes),
    }


def dump_kb(kb: KnowledgeBase) -> str:
    """Serializes `kb` canonically, so that `load_kb(dump_kb(kb)) == kb`."""
    return json.dumps(to_json(kb), indent=2, ensure_ascii=False) + "\n"


def load_kb_file(path: str) -> KnowledgeBase:
    """Loads a knowledge base from a UTF-8 JSON file, or a shipped one addressed as `builtin:<name>`."""
    if path.startswith("builtin:"):
        from stereo_reasoning import corpus  # pylint: disable=import-outside-toplevel
        return corpus.load_builtin(path[len("builtin:"):])
    if not os.path.isfile(path):
        raise errors.FormatError(f"no such file {path!r}")
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except (UnicodeDecodeError, OSError) as e:
        raise errors.FormatError(f"cannot read {path!r}: {e}") from None
    return load_kb(text)
