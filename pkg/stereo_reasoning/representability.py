"""Which cumulative consequence relations arise from stereotype systems with a monotone distance?

A consequence relation satisfying reflexivity, left logical equivalence, right weakening and and is, on a space where
every set of worlds is definable, the same thing as a `SelectionFunction` `F -> f(F) ⊆ F`. A selection function is
*representable* over a candidate list of stereotypes when some assignment `σ(F)` of stereotypes with
`F ∩ σ(F) = f(F)` admits distances that make `σ(F)` the strict unique minimum for every nonempty `F` while obeying
the monotonicity law checked by `checkers.check_eq2`. Those requirements are order constraints between nodes
`(F, S)`; they are satisfiable in some partially ordered set of distances iff no strict constraint lies on a cycle.
"""
import functools
import itertools
import multiprocessing
from enum import Enum

from absl import logging
from flax import struct
import networkx as nx
import numpy as np

from stereo_reasoning import distances
from stereo_reasoning import errors
from stereo_reasoning import inference
from stereo_reasoning import sets
from stereo_reasoning import utils
from stereo_reasoning.knowledge_base import KnowledgeBase, Stereotype
from stereo_reasoning.worlds import WorldSpace

from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

Node = Tuple[int, int]  # (information set mask, stereotype index)


class RepresentabilityEnum(str, Enum):
    YES = "YES"
    NO = "NO"
    UNKNOWN = "UNKNOWN"


@struct.dataclass
class SelectionFunction:
    """A total map from nonempty information sets to nonempty subsets of themselves.

    Attributes:
        space: The world space.
        choice: `choice[mask]` is the mask of `f(F)`; `choice[0]` is `0` and unused.
    """
    space: WorldSpace = struct.field(pytree_node=False)
    choice: Tuple[int, ...] = struct.field(pytree_node=False)

    @classmethod
    def from_function(cls, space: WorldSpace, fn) -> "SelectionFunction":
        """Tabulates `fn(InfoSet) -> InfoSet` over the nonempty information sets of `space`."""
        return cls(space, (0,) + tuple(fn(sets.InfoSet(m, space.size)).mask for m in range(1, 1 << space.size)))

    @classmethod
    def identity(cls, space: WorldSpace) -> "SelectionFunction":
        return cls(space, tuple(range(1 << space.size)))

    def __call__(self, info_set: sets.InfoSet) -> sets.InfoSet:
        if not info_set:
            raise errors.EmptyInfoSet("Selection functions are defined on nonempty information sets only.")
        return sets.InfoSet(self.choice[info_set.mask], self.space.size)

    def violations(self) -> List[str]:
        """Returns messages for every broken invariant (totality, `f(F) ⊆ F`, `f(F)` nonempty)."""
        found = []
        if len(self.choice) != 1 << self.space.size:
            return [f"choice must have {1 << self.space.size} entries; got {len(self.choice)}"]
        for mask in range(1, 1 << self.space.size):
            if not self.choice[mask]:
                found.append(f"f({mask:#b}) is empty")
            elif self.choice[mask] & ~mask:
                found.append(f"f({mask:#b}) = {self.choice[mask]:#b} is not a subset of its argument")
        return found

    def to_json(self) -> Dict[str, List[str]]:
        space = self.space
        return {
            ",".join(space.names_of(sets.InfoSet(m, space.size))): list(space.names_of(sets.InfoSet(c, space.size)))
            for m, c in enumerate(self.choice)
            if m
        }


def selection_of(kb: KnowledgeBase) -> SelectionFunction:
    """Returns the selection function `F -> F ∩ S^F` of `kb`.

    Raises:
        NoUniqueMinimum: if some nonempty set has several closest stereotypes.
        InconsistentJump: if some nonempty set does not meet its best stereotype.
    """
    table = inference.selection_table(kb)
    for mask in range(1, 1 << kb.space.size):
        info_set = sets.InfoSet(mask, kb.space.size)
        if table.chosen[mask] < 0:
            ranks = table.matrix.ranks[mask]
            raise errors.NoUniqueMinimum(kb.space.names_of(info_set),
                                         tuple(kb.stereotypes[i].name for i in np.flatnonzero(ranks == ranks.min())))
        if not table.consequences[mask]:
            raise errors.InconsistentJump(kb.space.names_of(info_set), kb.stereotypes[table.chosen[mask]].name)
    return SelectionFunction(kb.space, (0,) + tuple(int(c) for c in table.consequences[1:]))


def is_cumulative(f: SelectionFunction) -> Tuple[bool, Optional[Tuple[sets.InfoSet, sets.InfoSet]]]:
    """Returns `(True, None)` if `f(F) ⊆ G ⊆ F` always implies `f(G) = f(F)`, else `(False, (F, G))`."""
    size = f.space.size
    for big in range(1, 1 << size):
        for small in utils.supermasks_within(f.choice[big], big):
            if f.choice[small] != f.choice[big]:
                return False, (sets.InfoSet(big, size), sets.InfoSet(small, size))
    return True, None


def cumulative_selection_functions(space: WorldSpace) -> Iterator[SelectionFunction]:
    """Yields every cumulative selection function on `space`, in a fixed canonical order.

    Sets are decided from the largest down; choosing `f(F) = T` forces `f(G) = T` for every `T ⊆ G ⊆ F`, so the
    enumeration never produces a non-cumulative function and never misses a cumulative one.
    """
    n = space.size
    order = sorted(range(1, 1 << n), key=lambda m: (-utils.popcount(m), m))
    choice = [0] * (1 << n)

    def assign(position: int) -> Iterator[SelectionFunction]:
        while position < len(order) and choice[order[position]]:
            position += 1
        if position == len(order):
            yield SelectionFunction(space, tuple(choice))
            return
        big = order[position]
        for value in utils.submasks(big):
            if not value:
                continue
            forced = list(utils.supermasks_within(value, big))
            if any(choice[g] and choice[g] != value for g in forced):
                continue
            newly = [g for g in forced if not choice[g]]
            for g in newly:
                choice[g] = value
            yield from assign(position + 1)
            for g in newly:
                choice[g] = 0

    return assign(0)


@functools.lru_cache(maxsize=4096)
def _weak_edges(n_worlds: int, extents: Tuple[int, ...]) -> Tuple[Tuple[Node, Node], ...]:
    """Edges `x -> y` meaning `d(x) <= d(y)` forced by the monotonicity law, over all `(F, S)` with `F ⊆ W`."""
    masks = utils.mask_array(n_worlds)
    nodes = [(int(m), s) for m in masks for s in range(len(extents))]
    node_masks = np.array([m for m, _ in nodes], dtype=np.int64)
    node_extents = np.array([extents[s] for _, s in nodes], dtype=np.int64)
    common, missing = node_masks & node_extents, node_extents & ~node_masks
    # x = (F, S) -> y = (F', S') iff F' ∩ S' ⊆ F ∩ S and S - F ⊆ S' - F'.
    related = (utils.subset_array(common[None, :], common[:, None]) &
               utils.subset_array(missing[:, None], missing[None, :]))
    np.fill_diagonal(related, False)
    x, y = np.nonzero(related)
    return tuple((nodes[i], nodes[j]) for i, j in zip(x.tolist(), y.tolist()))


@struct.dataclass
class ConstraintGraph:
    """Order constraints between distance values `d(F, S_i)`, as a digraph on nodes `(mask, i)`.

    An edge `x -> y` means `d(x) <= d(y)`; strict edges mean `d(x) < d(y)`.

    Attributes:
        n_worlds: Size of the world space.
        extents: Stereotype extents as masks.
        weak_edges: Monotonicity constraints, in canonical order.
        strict_edges: Strict-minimality constraints `(F, σ(F)) -> (F, S)`, in canonical order.
    """
    n_worlds: int = struct.field(pytree_node=False)
    extents: Tuple[int, ...] = struct.field(pytree_node=False)
    weak_edges: Tuple[Tuple[Node, Node], ...] = struct.field(pytree_node=False)
    strict_edges: Tuple[Tuple[Node, Node], ...] = struct.field(pytree_node=False)

    @classmethod
    def build(cls, n_worlds: int, extents: Sequence[int], assignment: Optional[Dict[int, int]] = None):
        """Builds the graph for stereotype `extents` and a (possibly partial) assignment `mask -> σ index`."""
        extents = tuple(extents)
        strict = sorted(((mask, chosen), (mask, other))
                        for mask, chosen in (assignment or {}).items()
                        for other in range(len(extents))
                        if other != chosen)
        return cls(n_worlds, extents, _weak_edges(n_worlds, extents), tuple(strict))

    @property
    def nodes(self) -> List[Node]:
        return [(m, s) for m in range(1 << self.n_worlds) for s in range(len(self.extents))]

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.nodes)
        graph.add_edges_from(self.weak_edges, strict=False)
        graph.add_edges_from(self.strict_edges, strict=True)
        return graph

    def conflicts(self) -> List[Tuple[Node, Node]]:
        """Returns the strict edges lying inside a strongly connected component (empty iff satisfiable)."""
        component = {}
        for i, scc in enumerate(nx.strongly_connected_components(self.to_networkx())):
            for node in scc:
                component[node] = i
        return [(x, y) for x, y in self.strict_edges if component[x] == component[y]]

    def linear_ranks(self, rng: Optional[np.random.Generator] = None) -> Dict[Node, int]:
        """Ranks every node by the position of its component in a topological order of the condensation.

        Constraints become `rank(x) <= rank(y)`, strict across components. With `rng` the topological order is drawn
        at random among all orders, else it is the lexicographically smallest one.
        """
        graph = self.to_networkx()
        condensed = nx.condensation(graph)
        if rng is None:
            key = lambda c: min(condensed.nodes[c]["members"])
            order = list(nx.lexicographical_topological_sort(condensed, key=key))
        else:
            order, indegree = [], dict(condensed.in_degree())
            ready = sorted(c for c, d in indegree.items() if d == 0)
            while ready:
                component = ready.pop(int(rng.integers(len(ready))))
                order.append(component)
                for successor in sorted(condensed.successors(component)):
                    indegree[successor] -= 1
                    if indegree[successor] == 0:
                        ready.append(successor)
        position = {component: r for r, component in enumerate(order)}
        return {node: position[condensed.graph["mapping"][node]] for node in graph.nodes}


@struct.dataclass
class RepresentabilityResult:
    """Outcome of `is_representable`.

    Attributes:
        verdict: `YES`, `NO` or `UNKNOWN` (budget exhausted).
        assignment: For `YES`, `σ(F)` as a stereotype index per mask (`-1` for the empty set).
        ranks: For `YES`, integer distances per node satisfying every constraint.
        certificate: For `NO`, why: `{"reason": "empty-choice", "F": ...}` or `{"reason": "strict-cycle", ...}`.
        explored: Number of assignment steps spent.
    """
    verdict: RepresentabilityEnum
    assignment: Optional[Tuple[int, ...]] = struct.field(pytree_node=False, default=None)
    ranks: Optional[Dict[Node, int]] = struct.field(pytree_node=False, default=None)
    certificate: Optional[Dict[str, Any]] = struct.field(pytree_node=False, default=None)
    explored: int = 0


def _names(space: WorldSpace, mask: int) -> List[str]:
    return list(space.names_of(sets.InfoSet(mask, space.size)))


def is_representable(f: SelectionFunction, stereotypes: Sequence[sets.InfoSet], budget: int) -> RepresentabilityResult:
    """Decides whether `f` is `F -> F ∩ S^F` for the given stereotypes under some monotone, uniquely minimal distance.

    Searches assignments `σ(F) ∈ {S : F ∩ S = f(F)}` depth first; each partial assignment adds strict edges to the
    constraint graph and is abandoned as soon as a strict edge closes a cycle (adding edges never removes cycles).

    Args:
        f: The selection function.
        stereotypes: Nonempty candidate stereotype extents.
        budget: Maximum number of assignment steps before answering `UNKNOWN`.
    """
    space, n = f.space, f.space.size
    extents = tuple(s.mask for s in stereotypes)
    if not extents or any(not e for e in extents):
        raise ValueError("Candidate stereotypes must be a nonempty list of nonempty sets.")
    choices = {}
    for mask in range(1, 1 << n):
        options = [s for s, extent in enumerate(extents) if mask & extent == f.choice[mask]]
        if not options:
            return RepresentabilityResult(RepresentabilityEnum.NO, certificate={
                "reason": "empty-choice", "F": _names(space, mask), "f(F)": _names(space, f.choice[mask])})
        choices[mask] = options
    order = sorted(choices, key=lambda m: (len(choices[m]), utils.popcount(m), m))

    graph = ConstraintGraph.build(n, extents).to_networkx()
    assignment: Dict[int, int] = {}
    state = {"explored": 0, "conflict": None}

    def search(position: int) -> Optional[bool]:
        if position == len(order):
            return True
        mask = order[position]
        for chosen in choices[mask]:
            if state["explored"] >= budget:
                return None
            state["explored"] += 1
            added = [((mask, chosen), (mask, other)) for other in range(len(extents)) if other != chosen]
            new = [edge for edge in added if not graph.has_edge(*edge)]
            graph.add_edges_from(new, strict=True)
            conflict = next(((x, y) for x, y in added if nx.has_path(graph, y, x)), None)
            if conflict is None:
                assignment[mask] = chosen
                outcome = search(position + 1)
                if outcome is not False:
                    return outcome
                del assignment[mask]
            elif state["conflict"] is None:
                state["conflict"] = conflict
            graph.remove_edges_from(new)
        return False

    outcome = search(0)
    explored = state["explored"]
    if outcome is None:
        logging.vlog(1, "is_representable: budget of %d exhausted.", budget)
        return RepresentabilityResult(RepresentabilityEnum.UNKNOWN, explored=explored)
    if not outcome:
        (f_mask, chosen), (_, other) = state["conflict"]
        return RepresentabilityResult(RepresentabilityEnum.NO, explored=explored, certificate={
            "reason": "strict-cycle", "first_conflict": {"F": _names(space, f_mask), "sigma(F)": _names(
                space, extents[chosen]), "S": _names(space, extents[other])}})
    model = ConstraintGraph.build(n, extents, assignment)
    return RepresentabilityResult(RepresentabilityEnum.YES, tuple(assignment.get(m, -1) for m in range(1 << n)),
                                  model.linear_ranks(), explored=explored)


def _stereotypes_named(space: WorldSpace, extents: Sequence[int]) -> Tuple[Stereotype, ...]:
    return tuple(Stereotype(f"S_{i}", sets.InfoSet(extent, space.size)) for i, extent in enumerate(extents))


def _table_kb(space: WorldSpace, extents: Sequence[int], ranks: Dict[Node, int]) -> KnowledgeBase:
    family = distances.TableFamily.from_function(space.size, len(extents), lambda mask, s: ranks[(mask, s)])
    return KnowledgeBase(space, _stereotypes_named(space, extents), family)


def table_kb_from_model(f: SelectionFunction, stereotypes: Sequence[sets.InfoSet],
                        result: RepresentabilityResult) -> KnowledgeBase:
    """Builds a TABLE knowledge base realizing `f` from a `YES` result of `is_representable`."""
    if result.verdict != RepresentabilityEnum.YES:
        raise ValueError(f"A knowledge base can only be built from a YES result; got {result.verdict.value}.")
    return _table_kb(f.space, [s.mask for s in stereotypes], result.ranks)


def random_eq2_table_kb(space: WorldSpace, stereotypes: Sequence[sets.InfoSet],
                        rng: np.random.Generator) -> KnowledgeBase:
    """Returns a TABLE knowledge base whose distance obeys the monotonicity law, drawn by random linearization.

    Closest stereotypes need not be unique; callers wanting assumption zero should filter with
    `checkers.check_assumption_zero`.
    """
    extents = tuple(s.mask for s in stereotypes)
    return _table_kb(space, extents, ConstraintGraph.build(space.size, extents).linear_ranks(rng))


def construction_stereotypes(f: SelectionFunction) -> List[sets.InfoSet]:
    """Returns `{f(F) : F nonempty} ∪ {W}`, sorted by mask: the stereotypes of the direct construction."""
    masks = sorted(set(f.choice[1:]) | {(1 << f.space.size) - 1})
    return [sets.InfoSet(m, f.space.size) for m in masks]


def candidate_stereotype_sets(n_worlds: int, max_stereotypes: Optional[int] = None) -> Iterator[Tuple[int, ...]]:
    """Yields stereotype lists (as mask tuples) drawn from the nonempty sets, by size then lexicographically."""
    universe = list(range(1, 1 << n_worlds))
    largest = len(universe) if max_stereotypes is None else min(max_stereotypes, len(universe))
    for size in range(1, largest + 1):
        yield from itertools.combinations(universe, size)


@struct.dataclass
class SearchEntry:
    """One cumulative selection function that no candidate stereotype list was shown to represent.

    Attributes:
        selection: The selection function.
        verdict: `NO` when every candidate list answered `NO`, `UNKNOWN` when some ran out of budget.
        verdicts: Per candidate list: `{"stereotypes", "verdict", "certificate"}`.
    """
    selection: SelectionFunction
    verdict: RepresentabilityEnum
    verdicts: Tuple[Dict[str, Any], ...] = struct.field(pytree_node=False)

    def to_json(self) -> Dict[str, Any]:
        return {"selection": self.selection.to_json(), "verdict": self.verdict.value, "verdicts": list(self.verdicts)}


@struct.dataclass
class SearchResult:
    """Outcome of `search_nonrepresentable`; `found` are `NO` entries, `unknown` the budget-limited tail."""
    n_worlds: int
    max_stereotypes: Optional[int]
    budget: int
    examined: int
    found: Tuple[SearchEntry, ...] = struct.field(pytree_node=False)
    unknown: Tuple[SearchEntry, ...] = struct.field(pytree_node=False)

    def to_json(self) -> Dict[str, Any]:
        return {
            "n_worlds": self.n_worlds,
            "max_stereotypes": self.max_stereotypes,
            "budget": self.budget,
            "examined": self.examined,
            "found": [entry.to_json() for entry in self.found],
            "unknown": [entry.to_json() for entry in self.unknown],
        }


def _examine(job: Tuple[SelectionFunction, Optional[int], int]) -> Optional[SearchEntry]:
    """Tries every candidate stereotype list on one selection function; `None` once one represents it."""
    f, max_stereotypes, budget = job
    verdicts, any_unknown = [], False
    for extents in candidate_stereotype_sets(f.space.size, max_stereotypes):
        stereotypes = [sets.InfoSet(e, f.space.size) for e in extents]
        result = is_representable(f, stereotypes, budget)
        if result.verdict == RepresentabilityEnum.YES:
            return None
        any_unknown |= result.verdict == RepresentabilityEnum.UNKNOWN
        verdicts.append({"stereotypes": [_names(f.space, e) for e in extents], "verdict": result.verdict.value,
                         "certificate": result.certificate})
    return SearchEntry(f, RepresentabilityEnum.UNKNOWN if any_unknown else RepresentabilityEnum.NO, tuple(verdicts))


def search_nonrepresentable(space: WorldSpace,
                            max_stereotypes: Optional[int] = None,
                            budget: int = 10**5,
                            workers: int = 1,
                            progress_bar: bool = False,
                            on_entry=None) -> SearchResult:
    """Finds cumulative selection functions on `space` that no candidate stereotype list represents.

    Candidate lists are all lists of at most `max_stereotypes` distinct nonempty sets (all of them when `None`).
    `budget` bounds each `is_representable` call separately, so results do not depend on `workers`.

    Args:
        space: World space with at most 4 worlds.
        max_stereotypes: Bound on the length of candidate stereotype lists.
        budget: Assignment steps allowed per (selection function, stereotype list) pair.
        workers: Number of processes; results are merged in enumeration order.
        progress_bar: Whether to show a `tqdm` bar over selection functions.
        on_entry: Optional callback invoked with each `SearchEntry` as it is found, in order.
    """
    if space.size > 4:
        raise ValueError(f"Representability search enumerates at most 4 worlds; got {space.size}.")
    if budget <= 0:
        raise ValueError(f"`budget` must be positive; got {budget}.")
    jobs = ((f, max_stereotypes, budget) for f in cumulative_selection_functions(space))
    found, unknown, examined = [], [], 0
    bar = None
    if progress_bar:
        try:
            import tqdm
        except ImportError:
            raise ImportError("The option `progress_bar=True` requires the 'tqdm' package to be installed.")
        bar = tqdm.tqdm(unit="f", ascii=True, leave=False)
    pool = multiprocessing.Pool(workers) if workers > 1 else None
    try:
        entries = pool.imap(_examine, jobs, chunksize=8) if pool is not None else map(_examine, jobs)
        for entry in entries:
            examined += 1
            if bar is not None:
                bar.update(1)
            if entry is None:
                continue
            (found if entry.verdict == RepresentabilityEnum.NO else unknown).append(entry)
            if on_entry is not None:
                on_entry(entry)
    finally:
        if pool is not None:
            pool.close()
            pool.join()
        if bar is not None:
            bar.close()
    logging.info("search_nonrepresentable: %d cumulative selection functions, %d not representable, %d unknown.",
                 examined, len(found), len(unknown))
    return SearchResult(space.size, max_stereotypes, budget, examined, tuple(found), tuple(unknown))
