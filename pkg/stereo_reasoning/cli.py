"""Command-line front end.

Usage:
    stereo infer --kb=builtin:example3 --given="a | b" [--query=a]
    stereo explain --kb=builtin:example4 --given="~r"
    stereo check --kb=path/to/kb.json --property=all [--format=json]
    stereo verify --kb=builtin:example3 --theorem=2
    stereo search --n_worlds=3 --max_stereotypes=2 [--workers=4]

Exit codes: 0 all checks pass, 1 some check fails, 2 usage/load/parse error, 3 no unique closest stereotype,
4 some check not applicable (and none fails).
"""
import json
import os
import sys
from enum import Enum

from absl import app
from absl import flags
from absl import logging
from flax import struct

from stereo_reasoning import checkers
from stereo_reasoning import errors
from stereo_reasoning import formulas
from stereo_reasoning import inference
from stereo_reasoning import representability
from stereo_reasoning import sets
from stereo_reasoning.knowledge_base import KnowledgeBase, load_kb_file
from stereo_reasoning.worlds import WorldSpace

from typing import Any, List, Optional, Sequence, TextIO

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_ERROR = 2
EXIT_NOT_UNIQUE = 3
EXIT_NOT_APPLICABLE = 4

DEFAULT_BUDGET = 10**8
BUDGET_ENV_VAR = "STEREO_BUDGET"

COMMANDS = ("infer", "explain", "check", "verify", "search")


class OutputFormat(str, Enum):
    TEXT = "text"
    JSON = "json"


@struct.dataclass
class CliConfig:
    """Options shared by every subcommand.

    Attributes:
        kb_path: Knowledge base file, or `builtin:<name>`.
        output_format: `text` or `json`.
        budget: Maximum number of elementary cases per sweep (and assignment steps per representability query).
        override_scale_limit: Run sweeps even beyond the size limits and the budget.
        scale: Size preset for the checkers.
        workers: Processes used by `search`.
        progress_bar: Whether to show `tqdm` progress bars.
    """
    kb_path: Optional[str] = None
    output_format: OutputFormat = OutputFormat.TEXT
    budget: int = DEFAULT_BUDGET
    override_scale_limit: bool = False
    scale: checkers.ScaleEnum = checkers.ScaleEnum.EXTENDED
    workers: int = 1
    progress_bar: bool = False

    @classmethod
    def create(cls, budget: Optional[int] = None, **kwargs) -> "CliConfig":
        """Builds a validated config; `budget=None` falls back to `$STEREO_BUDGET`, then to `DEFAULT_BUDGET`."""
        if budget is None:
            raw = os.environ.get(BUDGET_ENV_VAR)
            try:
                budget = DEFAULT_BUDGET if raw is None else int(raw)
            except ValueError:
                raise ValueError(f"${BUDGET_ENV_VAR} must be an integer; got {raw!r}.") from None
        if budget <= 0:
            raise ValueError(f"`budget` must be positive; got {budget}.")
        if kwargs.get("workers", 1) < 1:
            raise ValueError(f"`workers` must be positive; got {kwargs['workers']}.")
        for key, enum in (("output_format", OutputFormat), ("scale", checkers.ScaleEnum)):
            if key in kwargs:
                kwargs[key] = enum(kwargs[key])
        return cls(budget=budget, **kwargs)

    @property
    def json(self) -> bool:
        return self.output_format == OutputFormat.JSON

    def checker_settings(self) -> checkers.CheckerSettings:
        return checkers.CheckerSettings.with_scale(self.scale,
                                                   budget=self.budget,
                                                   override_scale_limit=self.override_scale_limit or
                                                   self.scale == checkers.ScaleEnum.UNBOUNDED,
                                                   progress_bar=self.progress_bar)


def _worlds(space: WorldSpace, info_set: sets.InfoSet) -> str:
    return "{" + ", ".join(space.names_of(info_set)) + "}"


def _emit_json(document: Any, out: TextIO) -> None:
    out.write(json.dumps(document, indent=2, ensure_ascii=False) + "\n")


def _fail(message: str, err: TextIO) -> int:
    err.write(f"error: {message}\n")
    return EXIT_ERROR


def _not_unique(e: errors.NoUniqueMinimum, config: CliConfig, out: TextIO, err: TextIO) -> int:
    if config.json:
        _emit_json({"error": "NoUniqueMinimum", "given": list(e.info_set), "co_minimal": list(e.stereotypes)}, out)
    err.write(f"error: {e}\n")
    return EXIT_NOT_UNIQUE


def _load(config: CliConfig) -> KnowledgeBase:
    if not config.kb_path:
        raise errors.FormatError("`--kb` is required")
    return load_kb_file(config.kb_path)


def cmd_infer(config: CliConfig, given: str, query: Optional[str] = None, out: TextIO = sys.stdout,
              err: TextIO = sys.stderr) -> int:
    """Prints the best stereotype, the distances and the worlds `given` jumps to.

    With `query`, also decides `given |~ query`.
    """
    try:
        kb = _load(config)
        alpha = kb.parse(given)
        beta = None if query is None else kb.parse(query)
    except (errors.KnowledgeBaseError, errors.FormulaSyntaxError, errors.UnknownAtom) as e:
        return _fail(str(e), err)
    try:
        result = inference.nm_consequences(kb, formulas.models(alpha, kb.space))
    except errors.NoUniqueMinimum as e:
        return _not_unique(e, config, out, err)
    entailed = None if beta is None else result.consequences <= formulas.models(beta, kb.space)

    if config.json:
        document = result.to_json(kb)
        if beta is not None:
            document.update(query=query, entailed=entailed)
        _emit_json(document, out)
        return EXIT_PASS
    lines = [f"F: {_worlds(kb.space, result.given)}"]
    if result.chosen is not None:
        lines.append("distances:")
        lines.extend(f"  {name}: {value}" for name, value in result.distances)
    lines.append(f"chosen: {result.chosen if result.chosen is not None else '-'}")
    lines.append(f"F': {_worlds(kb.space, result.consequences)}")
    lines.append(f"consistent: {str(result.consistent).lower()}")
    lines.append(f"closure: {formulas.to_text(formulas.canonical_formula(result.consequences, kb.space))}")
    if beta is not None:
        lines.append(f"{given} |~ {query}: {str(entailed).lower()}")
    out.write("\n".join(lines) + "\n")
    return EXIT_PASS


def cmd_explain(config: CliConfig, given: str, out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    """Prints every `d(F, S)` in increasing order with the minimum marked; exit 3 when the minimum is shared.

    An empty `F` selects no stereotype: no row is marked and the exit code is 0.
    """
    try:
        kb = _load(config)
        info_set = formulas.models(kb.parse(given), kb.space)
    except (errors.KnowledgeBaseError, errors.FormulaSyntaxError, errors.UnknownAtom) as e:
        return _fail(str(e), err)
    explanation = inference.explain(kb, info_set)
    if config.json:
        _emit_json(
            {
                "given": list(kb.space.names_of(info_set)),
                "rows": [{"stereotype": r.stereotype, "distance": str(r.value), "minimal": r.minimal}
                         for r in explanation.rows],
                "unique": explanation.unique,
            }, out)
    else:
        lines = [f"F: {_worlds(kb.space, info_set)}"]
        lines.extend(f"{'*' if r.minimal else ' '} {r.stereotype}: {r.value}" for r in explanation.rows)
        if not info_set:
            lines.append("no stereotype selected (empty F)")
        elif not explanation.unique:
            lines.append(f"NON-UNIQUE minimum: {', '.join(explanation.minimal)}")
        out.write("\n".join(lines) + "\n")
    return EXIT_PASS if explanation.unique or not info_set else EXIT_NOT_UNIQUE


def _exit_code(reports: Sequence[checkers.CheckReport]) -> int:
    verdicts = {r.verdict for r in reports}
    if checkers.VerdictEnum.FAIL in verdicts:
        return EXIT_FAIL
    if checkers.VerdictEnum.NOT_APPLICABLE in verdicts:
        return EXIT_NOT_APPLICABLE
    return EXIT_PASS


def _run_checks(config: CliConfig, names: Sequence[str], as_list: bool, out: TextIO, err: TextIO) -> int:
    try:
        kb = _load(config)
    except errors.KnowledgeBaseError as e:
        return _fail(str(e), err)
    settings = config.checker_settings()
    try:
        table = checkers.guarded_selection_table(kb, settings) if len(names) > 1 else None
        reports = [checkers.check_property(kb, name, settings, table) for name in names]
    except (errors.ScaleLimit, ValueError) as e:
        return _fail(str(e), err)
    if config.json:
        _emit_json([r.to_json() for r in reports] if as_list else reports[0].to_json(), out)
    else:
        out.write("\n".join(r.to_text() for r in reports) + "\n")
    return _exit_code(reports)


def cmd_check(config: CliConfig, prop: str = "all", out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    """Runs one property checker, or all of them (`prop="all"`, a JSON array in JSON mode)."""
    if prop == "all":
        return _run_checks(config, checkers.ALL_CHECKS, True, out, err)
    return _run_checks(config, [prop], False, out, err)


def cmd_verify(config: CliConfig, theorem: int, out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    """Checks the conclusion of the shrinking theorem (`1`) or the union theorem (`2`) on the knowledge base."""
    if theorem not in (1, 2):
        return _fail(f"`--theorem` must be 1 or 2; got {theorem}", err)
    return _run_checks(config, [f"theorem{theorem}"], False, out, err)


def cmd_search(config: CliConfig, n_worlds: int, max_stereotypes: Optional[int] = None, out: TextIO = sys.stdout,
               err: TextIO = sys.stderr) -> int:
    """Lists cumulative selection functions on `n_worlds` binary worlds that no candidate stereotype list represents.

    Text mode streams each finding as it arrives, then a summary line; JSON mode prints one evidence document.
    """
    if not 1 <= n_worlds <= 4:
        return _fail(f"`--n_worlds` must be between 1 and 4; got {n_worlds}", err)
    if max_stereotypes is not None and max_stereotypes < 1:
        return _fail(f"`--max_stereotypes` must be positive; got {max_stereotypes}", err)
    space = WorldSpace.binary(n_worlds)

    def stream(entry: representability.SearchEntry) -> None:
        out.write(f"{entry.verdict.value}: {json.dumps(entry.selection.to_json(), ensure_ascii=False)}\n")
        for verdict in entry.verdicts:
            out.write(f"  {verdict['stereotypes']}: {verdict['verdict']} {json.dumps(verdict['certificate'])}\n")

    result = representability.search_nonrepresentable(space,
                                                       max_stereotypes,
                                                       config.budget,
                                                       workers=config.workers,
                                                       progress_bar=config.progress_bar,
                                                       on_entry=None if config.json else stream)
    if config.json:
        _emit_json(result.to_json(), out)
    else:
        out.write(f"{len(result.found)} found, {len(result.unknown)} unknown, {result.examined} cumulative selection "
                  f"functions examined\n")
    return EXIT_PASS


FLAGS = flags.FLAGS

flags.DEFINE_string("kb", None, "Knowledge base JSON file, or `builtin:<name>`.")
flags.DEFINE_enum("format", OutputFormat.TEXT.value, [f.value for f in OutputFormat], "Report format.")
flags.DEFINE_string("given", None, "Formula describing the facts at hand (infer, explain).")
flags.DEFINE_string("query", None, "Formula to test for nonmonotonic entailment (infer).")
flags.DEFINE_string("property", "all", f"Property to check: one of {list(checkers.PROPERTIES)} or `all`.")
flags.DEFINE_integer("theorem", 1, "Theorem to verify: 1 or 2.")
flags.DEFINE_integer("n_worlds", None, "Number of worlds for `search` (at most 4).")
flags.DEFINE_integer("max_stereotypes", None, "Bound on candidate stereotype list length for `search`.")
flags.DEFINE_integer("budget", None, f"Case budget; defaults to ${BUDGET_ENV_VAR} or {DEFAULT_BUDGET}.")
flags.DEFINE_enum("scale", checkers.ScaleEnum.EXTENDED.value, [s.value for s in checkers.ScaleEnum],
                  "Checker size preset.")
flags.DEFINE_boolean("override_scale_limit", False, "Run sweeps beyond the size limits and the budget.")
flags.DEFINE_integer("workers", 1, "Processes for `search`.")
flags.DEFINE_boolean("progress_bar", False, "Show progress bars.")


def main(argv: List[str]) -> int:
    if len(argv) != 2 or argv[1] not in COMMANDS:
        sys.stderr.write(f"usage: {os.path.basename(argv[0])} {{{','.join(COMMANDS)}}} [flags]\n")
        return EXIT_ERROR
    command = argv[1]
    try:
        config = CliConfig.create(kb_path=FLAGS.kb,
                                  output_format=FLAGS.format,
                                  budget=FLAGS.budget,
                                  override_scale_limit=FLAGS.override_scale_limit,
                                  scale=FLAGS.scale,
                                  workers=FLAGS.workers,
                                  progress_bar=FLAGS.progress_bar)
    except ValueError as e:
        return _fail(str(e), sys.stderr)
    logging.info("stereo %s: %s", command, config)
    if command in ("infer", "explain") and FLAGS.given is None:
        return _fail(f"`--given` is required for {command}", sys.stderr)
    if command == "infer":
        return cmd_infer(config, FLAGS.given, FLAGS.query)
    if command == "explain":
        return cmd_explain(config, FLAGS.given)
    if command == "check":
        return cmd_check(config, FLAGS.property)
    if command == "verify":
        return cmd_verify(config, FLAGS.theorem)
    if FLAGS.n_worlds is None:
        return _fail("`--n_worlds` is required for search", sys.stderr)
    return cmd_search(config, FLAGS.n_worlds, FLAGS.max_stereotypes)


def run():
    app.run(main)


if __name__ == "__main__":
    run()
