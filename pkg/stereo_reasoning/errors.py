from typing import Sequence, Tuple


class StereoError(Exception):
    """Base class for all errors raised by `stereo_reasoning`."""


class FormulaSyntaxError(StereoError, ValueError):
    """Raised when formula text does not follow the surface grammar."""

    def __init__(self, text: str, position: int, expected: Sequence[str]):
        self.text = text
        self.position = position
        self.expected = tuple(expected)
        super().__init__(f"Syntax error at offset {position} in {text!r}; expected one of {list(self.expected)}.")


class UnknownAtom(StereoError, ValueError):
    """Raised when a formula mentions an atom the world space does not declare."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Unknown atom {name!r}.")


class KnowledgeBaseError(StereoError, ValueError):
    """Base class for knowledge base load/validation errors; `location` is a JSON path such as `worlds[2]`."""

    def __init__(self, message: str, location: str = "$"):
        self.location = location
        super().__init__(f"{location}: {message}")


class FormatError(KnowledgeBaseError):
    pass


class DuplicateName(KnowledgeBaseError):
    pass


class EmptyStereotype(KnowledgeBaseError):
    pass


class DuplicateValuation(KnowledgeBaseError):
    pass


class UnknownWorld(KnowledgeBaseError):
    pass


class DistanceSpecError(KnowledgeBaseError):
    pass


class EmptyInfoSet(StereoError, ValueError):
    """Raised when a best stereotype is requested for the empty information set."""


class NoUniqueMinimum(StereoError):
    """Raised when several stereotypes are at minimal distance from an information set (Assumption Zero fails)."""

    def __init__(self, info_set: Tuple[str, ...], stereotypes: Tuple[str, ...]):
        self.info_set = tuple(info_set)
        self.stereotypes = tuple(stereotypes)
        super().__init__(f"No unique closest stereotype for {{{', '.join(self.info_set)}}}; "
                         f"co-minimal: {list(self.stereotypes)}.")


class InconsistentJump(StereoError):
    """Raised when a nonempty information set has an empty intersection with its best stereotype."""

    def __init__(self, info_set: Tuple[str, ...], stereotype: str):
        self.info_set = tuple(info_set)
        self.stereotype = stereotype
        super().__init__(f"{{{', '.join(self.info_set)}}} does not meet its best stereotype {stereotype!r}.")


class ScaleLimit(StereoError):
    """Raised when an exhaustive sweep exceeds the configured budget and no override is set."""

    def __init__(self, what: str, cases: int, budget: int):
        self.cases = cases
        self.budget = budget
        super().__init__(f"{what} needs {cases} cases, over the budget of {budget}; "
                         "set `override_scale_limit` to run it anyway.")
