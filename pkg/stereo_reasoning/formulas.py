"""Propositional formulas over the atoms of a `WorldSpace`: syntax trees, parsing, printing and semantics.

Surface grammar, loosest binding first (`<->` is left-associative, `->` right-associative, `|`/`&` left-associative):

    iff     := implies ("<->" implies)*
    implies := or ("->" implies)?
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := ("~" | "!") unary | atom | "true" | "false" | "(" iff ")"
"""
import abc
import functools
import re

from flax import struct
import numpy as np

from stereo_reasoning import errors
from stereo_reasoning import sets
from stereo_reasoning.worlds import World, WorldSpace

from typing import List, Mapping, Optional, Tuple

# Binding strength used by the printer; larger binds tighter.
_PRECEDENCE = {"Iff": 1, "Implies": 2, "Or": 3, "And": 4, "Not": 5, "Atom": 6, "Top": 6, "Bottom": 6}


@struct.dataclass
class Formula(metaclass=abc.ABCMeta):
    """Abstract base class for propositional formulas."""

    @abc.abstractmethod
    def evaluate(self, assignment: Mapping[str, bool]) -> bool:
        """Evaluates the formula under a total `atom -> bool` assignment."""

    @abc.abstractmethod
    def truth_vector(self, table: np.ndarray, atoms: Tuple[str, ...]) -> np.ndarray:
        """Evaluates the formula in every world at once; `table` is `WorldSpace.truth_table()`."""

    @property
    @abc.abstractmethod
    def atoms(self) -> frozenset:
        """Returns the set of atom names mentioned in the formula."""

    def __str__(self) -> str:
        return to_text(self)

    def __invert__(self) -> "Formula":
        return Not(self)

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)


@struct.dataclass
class Top(Formula):

    def evaluate(self, assignment):
        return True

    def truth_vector(self, table, atoms):
        return np.ones(table.shape[1], dtype=bool)

    @property
    def atoms(self):
        return frozenset()


@struct.dataclass
class Bottom(Formula):

    def evaluate(self, assignment):
        return False

    def truth_vector(self, table, atoms):
        return np.zeros(table.shape[1], dtype=bool)

    @property
    def atoms(self):
        return frozenset()


@struct.dataclass
class Atom(Formula):
    name: str

    def evaluate(self, assignment):
        if self.name not in assignment:
            raise errors.UnknownAtom(self.name)
        return assignment[self.name]

    def truth_vector(self, table, atoms):
        if self.name not in atoms:
            raise errors.UnknownAtom(self.name)
        return table[atoms.index(self.name)]

    @property
    def atoms(self):
        return frozenset((self.name,))


@struct.dataclass
class Not(Formula):
    operand: Formula

    def evaluate(self, assignment):
        return not self.operand.evaluate(assignment)

    def truth_vector(self, table, atoms):
        return ~self.operand.truth_vector(table, atoms)

    @property
    def atoms(self):
        return self.operand.atoms


@struct.dataclass
class BinaryFormula(Formula):
    left: Formula
    right: Formula

    @staticmethod
    @abc.abstractmethod
    def combine(left, right):
        """Applies the connective to two truth values (or two boolean arrays)."""

    def evaluate(self, assignment):
        return bool(self.combine(self.left.evaluate(assignment), self.right.evaluate(assignment)))

    def truth_vector(self, table, atoms):
        return self.combine(self.left.truth_vector(table, atoms), self.right.truth_vector(table, atoms))

    @property
    def atoms(self):
        return self.left.atoms | self.right.atoms


@struct.dataclass
class And(BinaryFormula):
    combine = staticmethod(lambda x, y: x & y)


@struct.dataclass
class Or(BinaryFormula):
    combine = staticmethod(lambda x, y: x | y)


@struct.dataclass
class Implies(BinaryFormula):
    combine = staticmethod(lambda x, y: ~x | y if isinstance(x, np.ndarray) else (not x) or y)


@struct.dataclass
class Iff(BinaryFormula):
    combine = staticmethod(lambda x, y: x == y)


TOP = Top()
BOTTOM = Bottom()

_SYMBOLS = {"And": "&", "Or": "|", "Implies": "->", "Iff": "<->"}
_TOKEN = re.compile(r"\s*(?:(?P<op><->|->|[~!&|()])|(?P<name>[A-Za-z_][A-Za-z0-9_]*))")


def _tokenize(text: str) -> List[Tuple[str, int]]:
    tokens, position = [], 0
    while position < len(text):
        if text[position:].isspace():
            break
        match = _TOKEN.match(text, position)
        if match is None:
            position += len(text[position:]) - len(text[position:].lstrip())
            raise errors.FormulaSyntaxError(text, position, ("atom", "true", "false", "~", "!", "("))
        kind = "op" if match.group("op") else "name"
        start = match.start(kind)
        tokens.append((match.group(kind), start))
        position = match.end()
    return tokens


class _Parser:
    """Recursive-descent parser over the token list of `_tokenize`."""

    def __init__(self, text: str, atoms: Optional[Tuple[str, ...]]):
        self.text = text
        self.atoms = atoms
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def position(self) -> int:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)

    def fail(self, *expected: str):
        raise errors.FormulaSyntaxError(self.text, self.position(), expected)

    def parse(self) -> Formula:
        formula = self.iff()
        if self.peek() is not None:
            self.fail("&", "|", "->", "<->", "end of input")
        return formula

    def iff(self) -> Formula:
        formula = self.implies()
        while self.peek() == "<->":
            self.i += 1
            formula = Iff(formula, self.implies())
        return formula

    def implies(self) -> Formula:
        formula = self.disjunction()
        if self.peek() == "->":
            self.i += 1
            return Implies(formula, self.implies())
        return formula

    def disjunction(self) -> Formula:
        formula = self.conjunction()
        while self.peek() == "|":
            self.i += 1
            formula = Or(formula, self.conjunction())
        return formula

    def conjunction(self) -> Formula:
        formula = self.unary()
        while self.peek() == "&":
            self.i += 1
            formula = And(formula, self.unary())
        return formula

    def unary(self) -> Formula:
        token = self.peek()
        if token in ("~", "!"):
            self.i += 1
            return Not(self.unary())
        if token == "(":
            self.i += 1
            formula = self.iff()
            if self.peek() != ")":
                self.fail(")", "&", "|", "->", "<->")
            self.i += 1
            return formula
        if token is None or token in ("&", "|", "->", "<->", ")"):
            self.fail("atom", "true", "false", "~", "!", "(")
        self.i += 1
        if token == "true":
            return TOP
        if token == "false":
            return BOTTOM
        if not re.match(r"[a-z]", token):
            self.i -= 1
            self.fail("atom", "true", "false", "~", "!", "(")
        if self.atoms is not None and token not in self.atoms:
            raise errors.UnknownAtom(token)
        return Atom(token)


def parse_formula(text: str, space: Optional[WorldSpace] = None) -> Formula:
    """Parses `text` into a `Formula`, checking atoms against `space` when given.

    Raises:
        FormulaSyntaxError: with the offending offset and the expected tokens.
        UnknownAtom: if an atom is not declared by `space`.
    """
    if not text or text.isspace():
        raise errors.FormulaSyntaxError(text, 0, ("atom", "true", "false", "~", "!", "("))
    return _Parser(text, None if space is None else space.atoms).parse()


def to_text(formula: Formula) -> str:
    """Prints `formula` with the fewest parentheses that re-parse to the same tree."""
    kind = type(formula).__name__
    if isinstance(formula, Top):
        return "true"
    if isinstance(formula, Bottom):
        return "false"
    if isinstance(formula, Atom):
        return formula.name
    if isinstance(formula, Not):
        inner = to_text(formula.operand)
        return "~" + (inner if _PRECEDENCE[type(formula.operand).__name__] >= _PRECEDENCE["Not"] else f"({inner})")
    precedence = _PRECEDENCE[kind]
    left_precedence = _PRECEDENCE[type(formula.left).__name__]
    right_precedence = _PRECEDENCE[type(formula.right).__name__]
    if kind == "Implies":
        wrap_left, wrap_right = left_precedence <= precedence, right_precedence < precedence
    else:
        wrap_left, wrap_right = left_precedence < precedence, right_precedence <= precedence
    left, right = to_text(formula.left), to_text(formula.right)
    return (f"({left})" if wrap_left else left) + f" {_SYMBOLS[kind]} " + (f"({right})" if wrap_right else right)


def eval(formula: Formula, world: World) -> bool:  # pylint: disable=redefined-builtin
    """Returns whether `world` satisfies `formula`."""
    return formula.evaluate(world.assignment)


def models(formula: Formula, space: WorldSpace) -> sets.InfoSet:
    """Returns the `InfoSet` of worlds of `space` satisfying `formula`."""
    vector = np.broadcast_to(formula.truth_vector(space.truth_table(), space.atoms), (space.size,))
    return sets.InfoSet.from_indices(np.flatnonzero(vector).tolist(), space.size)


def classically_entails(alpha: Formula, beta: Formula, space: WorldSpace) -> bool:
    """Returns whether every world of `space` satisfying `alpha` satisfies `beta`."""
    return models(alpha, space) <= models(beta, space)


def _conjoin(formulas) -> Formula:
    return functools.reduce(And, formulas) if formulas else TOP


def _disjoin(formulas) -> Formula:
    return functools.reduce(Or, formulas) if formulas else BOTTOM


def world_formula(world: World) -> Formula:
    """Returns the conjunction of literals describing `world`'s valuation, in atom order."""
    return _conjoin([Atom(atom) if value else Not(Atom(atom)) for atom, value in world.valuation])


def canonical_formula(info_set: sets.InfoSet, space: WorldSpace) -> Formula:
    """Returns the disjunction of `world_formula`s of the worlds in `info_set`, in declaration order.

    Since valuations in a space are pairwise distinct, `models(canonical_formula(F, space), space) == F`.
    """
    return _disjoin([world_formula(space.worlds[i]) for i in info_set.indices])
