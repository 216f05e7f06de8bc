"""Exhaustive checkers for the laws of stereotypical reasoning on a concrete knowledge base.

Every checker quantifies over bit-mask information sets (legitimate because every set of worlds is definable by a
formula), works on the integer ranks of a `DistanceMatrix`, and returns a deterministic `CheckReport` whose witnesses
are sorted canonically by their masks and stereotype indices.
"""
import contextlib
import time
from enum import Enum

from absl import logging
from flax import struct
import numpy as np

from stereo_reasoning import distances
from stereo_reasoning import errors
from stereo_reasoning import formulas
from stereo_reasoning import inference
from stereo_reasoning import sets
from stereo_reasoning import utils
from stereo_reasoning.knowledge_base import KnowledgeBase

from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

# Upper bound on the number of elements of a boolean matrix built in one vectorized step.
_CHUNK_ELEMENTS = 1 << 22


class ScaleEnum(str, Enum):
    """Enum for sweep size presets."""
    DESK = "desk"
    EXTENDED = "extended"
    UNBOUNDED = "unbounded"


class VerdictEnum(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    NOT_APPLICABLE = "NOT_APPLICABLE"


class KlmProperty(str, Enum):
    """Enum for the rules of nonmonotonic consequence checked by `check_klm`."""
    REFLEXIVITY = "reflexivity"
    LLE = "lle"
    RW_AND = "rw_and"
    CUT = "cut"
    CAUTIOUS_MONOTONY = "cautious_monotony"
    CUMULATIVITY = "cumulativity"
    OR = "or"


@struct.dataclass
class CheckerSettings:
    max_worlds: int = 5
    max_stereotypes: int = 8
    budget: int = 10**8
    override_scale_limit: bool = False
    max_witnesses: Optional[int] = 64
    progress_bar: bool = False

    @classmethod
    def with_scale(cls, scale: ScaleEnum, **kwargs) -> "CheckerSettings":
        if scale == ScaleEnum.DESK:
            limits = dict(max_worlds=5, max_stereotypes=8)
        elif scale == ScaleEnum.EXTENDED:
            limits = dict(max_worlds=6, max_stereotypes=64)
        elif scale == ScaleEnum.UNBOUNDED:
            limits = dict(max_worlds=62, max_stereotypes=1 << 30, override_scale_limit=True)
        else:
            raise ValueError(f"Unknown scale. Use one of {list(ScaleEnum)}.")
        logging.info("CheckerSettings.with_scale: %s", limits)
        return cls(**{**limits, **kwargs})


@struct.dataclass
class CheckReport:
    """The verdict of one checker on one knowledge base.

    Attributes:
        property: Identifier of the checked law (e.g. `"eq2"`, `"klm:or"`, `"theorem1"`).
        universe: Description of the quantification ranges.
        verdict: `PASS`, `FAIL` (iff there are witnesses) or `NOT_APPLICABLE` (a prerequisite failed).
        witnesses: Counterexample records rendered with world names, stereotype names and exact distances, in
            canonical order; at most `CheckerSettings.max_witnesses` of them.
        stats: `cases` examined, total `violations` found (possibly more than the witnesses kept), `elapsed_ms`.
    """
    property: str
    universe: str
    verdict: VerdictEnum
    witnesses: Tuple[Dict[str, Any], ...] = struct.field(pytree_node=False)
    stats: Dict[str, int] = struct.field(pytree_node=False)

    @property
    def passed(self) -> bool:
        return self.verdict == VerdictEnum.PASS

    def to_json(self) -> Dict[str, Any]:
        return {
            "property": self.property,
            "universe": self.universe,
            "verdict": self.verdict.value,
            "witnesses": list(self.witnesses),
            "stats": dict(self.stats),
        }

    def to_text(self) -> str:
        lines = [f"{self.property}: {self.verdict.value}", f"  universe: {self.universe}",
                 "  stats: " + ", ".join(f"{key}={value}" for key, value in self.stats.items())]
        for witness in self.witnesses:
            lines.append("  witness: " + "; ".join(f"{key}={_format_field(value)}" for key, value in witness.items()))
        if self.stats.get("violations", 0) > len(self.witnesses):
            lines.append(f"  ... {self.stats['violations'] - len(self.witnesses)} more violations")
        return "\n".join(lines)


def _format_field(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return "{" + ", ".join(map(str, value)) + "}"
    return str(value)


def _try_get_progress_bar(total: int, desc: str):
    try:
        import tqdm
    except ImportError:
        raise ImportError("The option `progress_bar=True` requires the 'tqdm' package to be installed.")
    return tqdm.tqdm(total=total, desc=desc, unit="row", ascii=True, leave=False)


class _Sweep:
    """Accumulates cases, violations and canonically ordered witness keys for one checker run."""

    def __init__(self, settings: CheckerSettings, total: int, desc: str):
        self.settings = settings
        self.cases = 0
        self.violations = 0
        self.keys: List[Tuple[int, ...]] = []
        self.start = time.perf_counter()
        self.bar = _try_get_progress_bar(total, desc) if settings.progress_bar else contextlib.nullcontext()

    def add(self, cases: int, index_arrays: Sequence[np.ndarray], key: Callable[..., Tuple[int, ...]]) -> None:
        """Records `cases` examined and the violations whose coordinates are given by `index_arrays`."""
        self.cases += int(cases)
        found = int(index_arrays[0].size)
        self.violations += found
        if found:
            self.keys.extend(key(*row) for row in utils.first_rows(tuple(index_arrays), self.settings.max_witnesses))
            if self.settings.max_witnesses is not None and len(self.keys) > 4 * self.settings.max_witnesses:
                self.keys = sorted(set(self.keys))[:self.settings.max_witnesses]

    def tick(self, n: int = 1) -> None:
        if self.settings.progress_bar:
            self.bar.update(n)

    def report(self, name: str, universe: str, render: Callable[..., Dict[str, Any]]) -> CheckReport:
        if self.settings.progress_bar:
            self.bar.close()
        keys = sorted(set(self.keys))
        if self.settings.max_witnesses is not None:
            keys = keys[:self.settings.max_witnesses]
        verdict = VerdictEnum.FAIL if keys else VerdictEnum.PASS
        stats = {"cases": self.cases, "violations": self.violations,
                 "elapsed_ms": int(round(1000 * (time.perf_counter() - self.start)))}
        logging.info("%s: %s (%d cases, %d violations).", name, verdict.value, self.cases, self.violations)
        return CheckReport(name, universe, verdict, tuple(render(*key) for key in keys), stats)


def _not_applicable(name: str, universe: str, reason: str) -> CheckReport:
    logging.info("%s: NOT_APPLICABLE (%s).", name, reason)
    return CheckReport(name, universe, VerdictEnum.NOT_APPLICABLE, (), {"cases": 0, "violations": 0, "elapsed_ms": 0,
                                                                        "reason": reason})


def _check_scale(kb: KnowledgeBase, settings: CheckerSettings, name: str, cases: int) -> None:
    n, k = kb.space.size, len(kb.stereotypes)
    if n > settings.max_worlds or k > settings.max_stereotypes or cases > settings.budget:
        if not settings.override_scale_limit:
            raise errors.ScaleLimit(f"{name} on {n} worlds and {k} stereotypes", cases, settings.budget)
        logging.warning("%s: running %d cases on %d worlds and %d stereotypes beyond the configured limits.", name,
                        cases, n, k)


def guarded_selection_table(kb: KnowledgeBase, settings: Optional[CheckerSettings] = None) -> inference.SelectionTable:
    """Builds the selection table of `kb` once its `2^|W| * k` distance evaluations fit `settings`.

    Raises:
        ScaleLimit: if the knowledge base exceeds the size limits or the budget of `settings`.
    """
    settings = CheckerSettings() if settings is None else settings
    _check_scale(kb, settings, "selection table", (1 << kb.space.size) * len(kb.stereotypes))
    return inference.selection_table(kb)


def _row_chunks(n_rows: int, n_columns: int) -> Iterable[np.ndarray]:
    step = max(1, _CHUNK_ELEMENTS // max(1, n_columns))
    for start in range(0, n_rows, step):
        yield np.arange(start, min(n_rows, start + step), dtype=np.int64)


class _Renderer:
    """Renders witness masks and stereotype indices of a knowledge base for reports."""

    def __init__(self, kb: KnowledgeBase, matrix: Optional[distances.DistanceMatrix] = None):
        self.kb = kb
        self.matrix = matrix

    def worlds(self, mask: int) -> List[str]:
        return list(self.kb.space.names_of(sets.InfoSet(int(mask), self.kb.space.size)))

    def stereotype(self, index: int) -> Optional[str]:
        return None if index < 0 else self.kb.stereotypes[int(index)].name

    def distance(self, mask: int, index: int) -> str:
        return str(self.matrix.value(int(mask), int(index)))


def _universe(kb: KnowledgeBase, text: str) -> str:
    return f"{text}; |W| = {kb.space.size}, {len(kb.stereotypes)} stereotypes"


def _zero_holds(table: inference.SelectionTable) -> bool:
    return bool(np.all(table.unique[1:]))


def check_assumption_zero(kb: KnowledgeBase, settings: Optional[CheckerSettings] = None,
                          table: Optional[inference.SelectionTable] = None) -> CheckReport:
    """Checks that every nonempty information set has a unique closest stereotype."""
    settings = CheckerSettings() if settings is None else settings
    _check_scale(kb, settings, "zero", (1 << kb.space.size) * len(kb.stereotypes))
    table = inference.selection_table(kb) if table is None else table
    sweep = _Sweep(settings, 1, "zero")
    nonunique = np.flatnonzero(~table.unique[1:]) + 1
    sweep.add(table.chosen.shape[0] - 1, (nonunique,), lambda f: (f,))
    sweep.tick()
    render = _Renderer(kb, table.matrix)
    ranks = table.matrix.ranks

    def witness(f):
        minimal = np.flatnonzero(ranks[f] == ranks[f].min())
        return {"F": render.worlds(f), "co_minimal": [render.stereotype(i) for i in minimal],
                "distance": render.distance(f, minimal[0])}

    return sweep.report("zero", _universe(kb, "every nonempty F ⊆ W"), witness)


def check_eq2(kb: KnowledgeBase, settings: Optional[CheckerSettings] = None,
              matrix: Optional[distances.DistanceMatrix] = None) -> CheckReport:
    """Checks the combined monotonicity law of the distance.

    For all `F, F' ⊆ W` and stereotypes `S, S'`: if `F' ∩ S' ⊆ F ∩ S` and `S - F ⊆ S' - F'` then
    `d(F, S) <= d(F', S')`. That is, `d` is antitone in `F ∩ S`, monotone in `S - F` and blind to `F - S`.

    Raises:
        ScaleLimit: if `4 ** |W| * k ** 2` cases exceed the budget (or the world/stereotype limits are exceeded).
    """
    settings = CheckerSettings() if settings is None else settings
    n, k = kb.space.size, len(kb.stereotypes)
    n_sets = 1 << n
    _check_scale(kb, settings, "eq2", n_sets * n_sets * k * k)
    matrix = distances.distance_matrix(kb) if matrix is None else matrix
    masks = utils.mask_array(n)
    extents = [s.extent.mask for s in kb.stereotypes]
    sweep = _Sweep(settings, k * k, "eq2")
    for s in range(k):
        common, missing, rank = masks & extents[s], extents[s] & ~masks, matrix.ranks[:, s]
        for t in range(k):
            common_t, missing_t, rank_t = masks & extents[t], extents[t] & ~masks, matrix.ranks[:, t]
            for rows in _row_chunks(n_sets, n_sets):
                premise = (utils.subset_array(common_t[None, :], common[rows, None]) &
                           utils.subset_array(missing[rows, None], missing_t[None, :]))
                violated = premise & (rank[rows, None] > rank_t[None, :])
                f, f_prime = np.nonzero(violated)
                sweep.add(rows.size * n_sets, (rows[f], f_prime), lambda a, b, s=s, t=t: (a, s, b, t))
            sweep.tick()
    render = _Renderer(kb, matrix)
    return sweep.report(
        "eq2", _universe(kb, "all F, F' ⊆ W and stereotypes S, S'"), lambda f, s, g, t: {
            "F": render.worlds(f), "S": render.stereotype(s), "F_prime": render.worlds(g),
            "S_prime": render.stereotype(t), "d(F,S)": render.distance(f, s), "d(F',S')": render.distance(g, t)})


def check_assumption_four(kb: KnowledgeBase, settings: Optional[CheckerSettings] = None,
                          matrix: Optional[distances.DistanceMatrix] = None) -> CheckReport:
    """Checks `d(F ∪ F', S) == min(d(F, S), d(F', S))` for all `F, F' ⊆ W` and stereotypes `S`.

    This is the distance-level reading of "the closeness contributed by a union is that of its closest part"; pairs
    are examined once (`F <= F'` by mask).
    """
    settings = CheckerSettings() if settings is None else settings
    n, k = kb.space.size, len(kb.stereotypes)
    n_sets = 1 << n
    _check_scale(kb, settings, "four", n_sets * n_sets * k)
    matrix = distances.distance_matrix(kb) if matrix is None else matrix
    masks = utils.mask_array(n)
    sweep = _Sweep(settings, k, "four")
    for s in range(k):
        rank = matrix.ranks[:, s]
        for rows in _row_chunks(n_sets, n_sets):
            union = rank[rows[:, None] | masks[None, :]]
            violated = (union != np.minimum(rank[rows, None], rank[None, :])) & (rows[:, None] <= masks[None, :])
            f, g = np.nonzero(violated)
            sweep.add(rows.size * n_sets, (rows[f], g), lambda a, b, s=s: (a, b, s))
        sweep.tick()
    render = _Renderer(kb, matrix)

    def witness(f, g, s):
        lhs = render.distance(f | g, s)
        rhs = str(min(matrix.value(f, s), matrix.value(g, s)))
        return {"F": render.worlds(f), "F_prime": render.worlds(g), "S": render.stereotype(s), "d(F∪F',S)": lhs,
                "min": rhs}

    return sweep.report("four", _universe(kb, "all F, F' ⊆ W and stereotypes S"), witness)


def _klm_sweep(kb: KnowledgeBase, table: inference.SelectionTable, prop: KlmProperty, sweep: _Sweep) -> None:
    n_sets = table.chosen.shape[0]
    masks = utils.mask_array(table.n_worlds)
    consequences = table.consequences

    if prop == KlmProperty.REFLEXIVITY:
        sweep.add(n_sets, (np.flatnonzero(consequences & ~masks),), lambda f: (f,))
        return

    if prop == KlmProperty.LLE:
        bad = []
        for mask in range(n_sets):
            info_set = sets.InfoSet(mask, kb.space.size)
            alpha = formulas.canonical_formula(info_set, kb.space)
            alpha_prime = formulas.Not(formulas.canonical_formula(info_set.complement(), kb.space))
            first = inference.nm_consequences(kb, formulas.models(alpha, kb.space))
            second = inference.nm_consequences(kb, formulas.models(alpha_prime, kb.space))
            if first != second:
                bad.append(mask)
        sweep.add(n_sets, (np.array(bad, dtype=np.int64),), lambda f: (f,))
        return

    if prop == KlmProperty.RW_AND:
        # entails[F, B]: every world F jumps to lies in B.
        entails = utils.subset_array(consequences[:, None], masks[None, :])
        subset = utils.subset_array(masks[:, None], masks[None, :])
        meet = masks[:, None] & masks[None, :]
        for f in range(n_sets):
            row = entails[f]
            weakening = row[:, None] & subset & ~row[None, :]
            conjunction = row[:, None] & row[None, :] & ~row[meet]
            b, c = np.nonzero(weakening)
            sweep.add(n_sets * n_sets, (np.full(b.shape, f), b, c), lambda a, x, y: (a, x, y, 0))
            b, c = np.nonzero(conjunction)
            sweep.add(n_sets * n_sets, (np.full(b.shape, f), b, c), lambda a, x, y: (a, x, y, 1))
            sweep.tick()
        return

    if prop in (KlmProperty.CUT, KlmProperty.CAUTIOUS_MONOTONY, KlmProperty.CUMULATIVITY):
        for rows in _row_chunks(n_sets, n_sets):
            between = (utils.subset_array(consequences[rows, None], masks[None, :]) &
                       utils.subset_array(masks[None, :], rows[:, None]))
            lost = ~utils.subset_array(consequences[rows, None], consequences[None, :])
            gained = ~utils.subset_array(consequences[None, :], consequences[rows, None])
            if prop == KlmProperty.CUT:
                violated = between & lost
            elif prop == KlmProperty.CAUTIOUS_MONOTONY:
                violated = between & gained
            else:
                violated = between & (lost | gained)
            f, g = np.nonzero(violated)
            sweep.add(rows.size * n_sets, (rows[f], g), lambda a, b: (a, b))
        return

    if prop == KlmProperty.OR:
        for rows in _row_chunks(n_sets, n_sets):
            union = consequences[rows[:, None] | masks[None, :]]
            either = consequences[rows, None] | consequences[None, :]
            violated = ~utils.subset_array(union, either) & (rows[:, None] <= masks[None, :])
            f, g = np.nonzero(violated)
            sweep.add(rows.size * n_sets, (rows[f], g), lambda a, b: (a, b))
        return

    raise ValueError(f"Unknown property. Use one of {list(KlmProperty)}.")


_KLM_UNIVERSES = {
    KlmProperty.REFLEXIVITY: "every F ⊆ W: F' ⊆ F",
    KlmProperty.LLE: "every F ⊆ W, two syntactically different formulas with models F",
    KlmProperty.RW_AND: "all F, B, C ⊆ W: F |~ B and B ⊆ C imply F |~ C; F |~ B and F |~ C imply F |~ B ∩ C",
    KlmProperty.CUT: "all F, G ⊆ W with F' ⊆ G ⊆ F: F' ⊆ G'",
    KlmProperty.CAUTIOUS_MONOTONY: "all F, G ⊆ W with F' ⊆ G ⊆ F: G' ⊆ F'",
    KlmProperty.CUMULATIVITY: "all F, G ⊆ W with F' ⊆ G ⊆ F: G' = F'",
    KlmProperty.OR: "all F, G ⊆ W: (F ∪ G)' ⊆ F' ∪ G'",
}


def check_klm(kb: KnowledgeBase, prop: KlmProperty, settings: Optional[CheckerSettings] = None,
              table: Optional[inference.SelectionTable] = None) -> CheckReport:
    """Checks one rule of nonmonotonic consequence in its set-level form (`F'` denotes `F ∩ S^F`).

    Returns `NOT_APPLICABLE` when some nonempty information set has no unique closest stereotype.
    """
    settings = CheckerSettings() if settings is None else settings
    prop = KlmProperty(prop)
    name = f"klm:{prop.value}"
    n_sets = 1 << kb.space.size
    cases = n_sets**3 if prop == KlmProperty.RW_AND else n_sets * n_sets
    _check_scale(kb, settings, name, cases)
    table = inference.selection_table(kb) if table is None else table
    universe = _universe(kb, _KLM_UNIVERSES[prop])
    if not _zero_holds(table):
        return _not_applicable(name, universe, "assumption zero fails")
    sweep = _Sweep(settings, n_sets if prop == KlmProperty.RW_AND else 1, name)
    _klm_sweep(kb, table, prop, sweep)
    render = _Renderer(kb, table.matrix)
    consequences = table.consequences

    def witness(*key):
        if prop in (KlmProperty.REFLEXIVITY, KlmProperty.LLE):
            (f,) = key
            return {"F": render.worlds(f), "F'": render.worlds(consequences[f])}
        if prop == KlmProperty.RW_AND:
            f, b, c, rule = key
            return {"rule": ["right_weakening", "and"][rule], "F": render.worlds(f), "B": render.worlds(b),
                    "C": render.worlds(c), "F'": render.worlds(consequences[f])}
        f, g = key
        record = {"F": render.worlds(f), "G": render.worlds(g), "F'": render.worlds(consequences[f]),
                  "G'": render.worlds(consequences[g])}
        if prop == KlmProperty.OR:
            record["(F∪G)'"] = render.worlds(consequences[f | g])
        return record

    return sweep.report(name, universe, witness)


def verify_theorem1(kb: KnowledgeBase, settings: Optional[CheckerSettings] = None,
                    table: Optional[inference.SelectionTable] = None) -> CheckReport:
    """Checks that shrinking `F` to any `G` with `F ∩ S^F ⊆ G ⊆ F` keeps the best stereotype: `S^G = S^F`.

    `G` ranges over nonempty sets only, since `S^∅` is not defined.
    """
    settings = CheckerSettings() if settings is None else settings
    n_sets = 1 << kb.space.size
    _check_scale(kb, settings, "theorem1", n_sets * n_sets)
    table = inference.selection_table(kb) if table is None else table
    universe = _universe(kb, "all nonempty F, G ⊆ W with F ∩ S^F ⊆ G ⊆ F: S^G = S^F")
    if not _zero_holds(table):
        return _not_applicable("theorem1", universe, "assumption zero fails")
    masks = utils.mask_array(kb.space.size)
    sweep = _Sweep(settings, 1, "theorem1")
    for rows in _row_chunks(n_sets, n_sets):
        between = (utils.subset_array(table.consequences[rows, None], masks[None, :]) &
                   utils.subset_array(masks[None, :], rows[:, None]) & (rows[:, None] > 0) & (masks[None, :] > 0))
        violated = between & (table.chosen[rows, None] != table.chosen[None, :])
        f, g = np.nonzero(violated)
        sweep.add(rows.size * n_sets, (rows[f], g), lambda a, b: (a, b))
    render = _Renderer(kb, table.matrix)
    return sweep.report(
        "theorem1", universe, lambda f, g: {
            "F": render.worlds(f), "G": render.worlds(g), "S^F": render.stereotype(table.chosen[f]),
            "S^G": render.stereotype(table.chosen[g])})


def verify_theorem2(kb: KnowledgeBase, settings: Optional[CheckerSettings] = None,
                    table: Optional[inference.SelectionTable] = None) -> CheckReport:
    """Checks that two information sets with the same best stereotype share it with their union.

    Applies only when assumption zero, the monotonicity law (`eq2`) and assumption four all pass.
    """
    settings = CheckerSettings() if settings is None else settings
    n_sets = 1 << kb.space.size
    _check_scale(kb, settings, "theorem2", n_sets * n_sets)
    table = inference.selection_table(kb) if table is None else table
    universe = _universe(kb, "all nonempty F, G ⊆ W with S^F = S^G: S^(F∪G) = S^F")
    for prerequisite in (lambda: check_assumption_zero(kb, settings, table),
                         lambda: check_eq2(kb, settings, table.matrix),
                         lambda: check_assumption_four(kb, settings, table.matrix)):
        report = prerequisite()
        if not report.passed:
            return _not_applicable("theorem2", universe, f"{report.property} does not pass")
    masks = utils.mask_array(kb.space.size)
    chosen = table.chosen
    sweep = _Sweep(settings, 1, "theorem2")
    for rows in _row_chunks(n_sets, n_sets):
        same = (chosen[rows, None] == chosen[None, :]) & (rows[:, None] > 0) & (masks[None, :] > 0)
        same &= rows[:, None] <= masks[None, :]
        violated = same & (chosen[rows[:, None] | masks[None, :]] != chosen[rows, None])
        f, g = np.nonzero(violated)
        sweep.add(rows.size * n_sets, (rows[f], g), lambda a, b: (a, b))
    render = _Renderer(kb, table.matrix)
    return sweep.report(
        "theorem2", universe, lambda f, g: {
            "F": render.worlds(f), "G": render.worlds(g), "S^F": render.stereotype(chosen[f]),
            "S^(F∪G)": render.stereotype(chosen[f | g])})


def check_tree_structure(kb: KnowledgeBase, settings: Optional[CheckerSettings] = None) -> CheckReport:
    """Checks that any two overlapping stereotypes are nested (the stereotypes form a tree under inclusion)."""
    settings = CheckerSettings() if settings is None else settings
    k = len(kb.stereotypes)
    extents = np.array([s.extent.mask for s in kb.stereotypes], dtype=np.int64)
    sweep = _Sweep(settings, 1, "tree")
    overlapping = (extents[:, None] & extents[None, :]) != 0
    nested = utils.subset_array(extents[:, None], extents[None, :]) | utils.subset_array(extents[None, :],
                                                                                         extents[:, None])
    upper = np.arange(k)[:, None] < np.arange(k)[None, :]
    s, t = np.nonzero(overlapping & ~nested & upper)
    sweep.add(k * (k - 1) // 2, (s, t), lambda a, b: (a, b))
    sweep.tick()
    render = _Renderer(kb)
    return sweep.report(
        "tree", _universe(kb, "all pairs of stereotypes S, T with S ∩ T nonempty: S ⊆ T or T ⊆ S"), lambda a, b: {
            "S": render.stereotype(a), "T": render.stereotype(b),
            "S∩T": render.worlds(int(extents[a] & extents[b]))})


def check_consequence_consistency(kb: KnowledgeBase, settings: Optional[CheckerSettings] = None,
                                  table: Optional[inference.SelectionTable] = None) -> CheckReport:
    """Checks that no consistent information set jumps to contradictory conclusions: `F ∩ S^F` nonempty."""
    settings = CheckerSettings() if settings is None else settings
    _check_scale(kb, settings, "consistency", (1 << kb.space.size) * len(kb.stereotypes))
    table = inference.selection_table(kb) if table is None else table
    universe = _universe(kb, "every nonempty F ⊆ W: F ∩ S^F nonempty")
    if not _zero_holds(table):
        return _not_applicable("consistency", universe, "assumption zero fails")
    sweep = _Sweep(settings, 1, "consistency")
    empty = np.flatnonzero(table.consequences[1:] == 0) + 1
    sweep.add(table.chosen.shape[0] - 1, (empty,), lambda f: (f,))
    render = _Renderer(kb, table.matrix)
    return sweep.report("consistency", universe,
                        lambda f: {"F": render.worlds(f), "S^F": render.stereotype(table.chosen[f])})


PROPERTIES = ("zero", "eq2", "four", "tree", "consistency") + tuple(f"klm:{p.value}" for p in KlmProperty)
ALL_CHECKS = PROPERTIES + ("theorem1", "theorem2")


def check_property(kb: KnowledgeBase, name: str, settings: Optional[CheckerSettings] = None,
                   table: Optional[inference.SelectionTable] = None) -> CheckReport:
    """Runs the checker called `name` (one of `PROPERTIES`, `theorem1` or `theorem2`)."""
    if name.startswith("klm:"):
        try:
            prop = KlmProperty(name[len("klm:"):])
        except ValueError:
            raise ValueError(f"Unknown property {name!r}. Use one of {list(PROPERTIES)}.") from None
        return check_klm(kb, prop, settings, table)
    if name == "tree":
        return check_tree_structure(kb, settings)
    if name not in ALL_CHECKS:
        raise ValueError(f"Unknown property {name!r}. Use one of {list(PROPERTIES)}.")
    table = guarded_selection_table(kb, settings) if table is None else table
    checkers = {
        "zero": lambda: check_assumption_zero(kb, settings, table),
        "eq2": lambda: check_eq2(kb, settings, table.matrix),
        "four": lambda: check_assumption_four(kb, settings, table.matrix),
        "consistency": lambda: check_consequence_consistency(kb, settings, table),
        "theorem1": lambda: verify_theorem1(kb, settings, table),
        "theorem2": lambda: verify_theorem2(kb, settings, table),
    }
    return checkers[name]()


def check_all(kb: KnowledgeBase, settings: Optional[CheckerSettings] = None) -> List[CheckReport]:
    """Runs every checker in `ALL_CHECKS` order (properties, then both theorems), sharing one selection table."""
    table = guarded_selection_table(kb, settings)
    return [check_property(kb, name, settings, table) for name in ALL_CHECKS]
