import io
import json
import os
from unittest import mock

from absl.testing import absltest
from absl.testing import parameterized
import jsonschema

from stereo_reasoning import cli
from stereo_reasoning import corpus
from stereo_reasoning import schemas
from stereo_reasoning.knowledge_base import dump_kb


def _config(kb="example4", **kwargs):
    return cli.CliConfig.create(kb_path=f"builtin:{kb}", **kwargs)


def _run(command, *args, **kwargs):
    out, err = io.StringIO(), io.StringIO()
    code = command(*args, out=out, err=err, **kwargs)
    return code, out.getvalue(), err.getvalue()


class ConfigTest(parameterized.TestCase):

    def test_defaults(self):
        with mock.patch.dict(os.environ, {}, clear=True):
            config = cli.CliConfig.create()
        self.assertEqual(config.budget, cli.DEFAULT_BUDGET)
        self.assertEqual(config.output_format, cli.OutputFormat.TEXT)
        self.assertFalse(config.json)
        settings = config.checker_settings()
        self.assertEqual((settings.max_worlds, settings.max_stereotypes), (6, 64))

    def test_budget_from_environment(self):
        with mock.patch.dict(os.environ, {cli.BUDGET_ENV_VAR: "1234"}):
            self.assertEqual(cli.CliConfig.create().budget, 1234)
            self.assertEqual(cli.CliConfig.create(budget=7).budget, 7)

    @parameterized.parameters("lots", "0", "-5")
    def test_bad_budget_from_environment(self, raw):
        with mock.patch.dict(os.environ, {cli.BUDGET_ENV_VAR: raw}):
            with self.assertRaises(ValueError):
                cli.CliConfig.create()

    def test_bad_values(self):
        with self.assertRaises(ValueError):
            cli.CliConfig.create(budget=0)
        with self.assertRaises(ValueError):
            cli.CliConfig.create(workers=0)
        with self.assertRaises(ValueError):
            cli.CliConfig.create(output_format="yaml")

    def test_unbounded_scale_overrides_limits(self):
        self.assertTrue(cli.CliConfig.create(scale="unbounded").checker_settings().override_scale_limit)


class InferTest(parameterized.TestCase):

    def test_jump_to_lowest_world(self):
        code, out, _ = _run(cli.cmd_infer, _config("example3"), "a | b", "a")
        self.assertEqual(code, cli.EXIT_PASS)
        lines = out.splitlines()
        self.assertIn("F: {w3, w5}", lines)
        self.assertIn("chosen: S_w3", lines)
        self.assertIn("F': {w3}", lines)
        self.assertIn("consistent: true", lines)
        self.assertIn("a | b |~ a: true", lines)

    def test_json(self):
        code, out, _ = _run(cli.cmd_infer, _config("example3", output_format="json"), "a | b", "b")
        self.assertEqual(code, cli.EXIT_PASS)
        document = json.loads(out)
        jsonschema.validate(document, schemas.load_schema("inference_result"))
        self.assertEqual(document["chosen"], "S_w3")
        self.assertEqual(document["consequences"], ["w3"])
        self.assertEqual(document["distances"]["S_w3"], "3")
        self.assertEqual(document["distances"]["S_w5"], "5")
        self.assertEqual(document["distances"]["S_w0"], "inf")
        self.assertFalse(document["entailed"])

    def test_contradiction(self):
        code, out, _ = _run(cli.cmd_infer, _config("example3"), "false", "a & ~a")
        self.assertEqual(code, cli.EXIT_PASS)
        lines = out.splitlines()
        self.assertIn("chosen: -", lines)
        self.assertIn("F': {}", lines)
        self.assertIn("closure: false", lines)
        self.assertIn("false |~ a & ~a: true", lines)

    def test_reflexivity(self):
        code, out, _ = _run(cli.cmd_infer, _config("example4", output_format="json"), "p | r", "p | r")
        self.assertEqual(code, cli.EXIT_PASS)
        self.assertTrue(json.loads(out)["entailed"])

    def test_partition_cover(self):
        code, out, _ = _run(cli.cmd_infer, _config("example4"), "~r & ~(p & q)")
        self.assertEqual(code, cli.EXIT_PASS)
        self.assertIn("chosen: S_0", out.splitlines())
        self.assertIn("F': {w0, w1}", out.splitlines())

    def test_not_unique(self):
        code, out, err = _run(cli.cmd_infer, _config("tie", output_format="json"), "true")
        self.assertEqual(code, cli.EXIT_NOT_UNIQUE)
        self.assertEqual(json.loads(out), {
            "error": "NoUniqueMinimum",
            "given": ["w0", "w1"],
            "co_minimal": ["S_a", "S_b"]
        })
        self.assertIn("S_a", err)

    @parameterized.parameters(
        ("a &&", None),
        ("z", None),
        ("a", "(b"),
    )
    def test_parse_errors(self, given, query):
        code, out, err = _run(cli.cmd_infer, _config("example3"), given, query)
        self.assertEqual(code, cli.EXIT_ERROR)
        self.assertEmpty(out)
        self.assertStartsWith(err, "error: ")

    def test_load_errors(self):
        missing = os.path.join(absltest.get_default_test_tmpdir(), "missing.json")
        for config in (cli.CliConfig.create(kb_path=missing), cli.CliConfig.create(), _config("example9")):
            code, _, err = _run(cli.cmd_infer, config, "true")
            self.assertEqual(code, cli.EXIT_ERROR)
            self.assertStartsWith(err, "error: ")

    def test_file_path(self):
        path = self.create_tempfile("kb.json", content=dump_kb(corpus.load_builtin("example3"))).full_path
        code, out, _ = _run(cli.cmd_infer, cli.CliConfig.create(kb_path=path), "a | b")
        self.assertEqual(code, cli.EXIT_PASS)
        self.assertIn("chosen: S_w3", out.splitlines())


class ExplainTest(absltest.TestCase):

    def test_rows(self):
        code, out, _ = _run(cli.cmd_explain, _config("example4"), "~r & ~(p & q)")
        self.assertEqual(code, cli.EXIT_PASS)
        self.assertEqual(out.splitlines(), ["F: {w0, w1, w2}", "* S_0: 0", "  S_1: 4/3", "  S_2: 8/3"])

    def test_json(self):
        code, out, _ = _run(cli.cmd_explain, _config("example4", output_format="json"), "~r & ~(p & q)")
        self.assertEqual(code, cli.EXIT_PASS)
        self.assertEqual(
            json.loads(out), {
                "given": ["w0", "w1", "w2"],
                "rows": [{"stereotype": "S_0", "distance": "0", "minimal": True},
                         {"stereotype": "S_1", "distance": "4/3", "minimal": False},
                         {"stereotype": "S_2", "distance": "8/3", "minimal": False}],
                "unique": True,
            })

    def test_tie(self):
        code, out, _ = _run(cli.cmd_explain, _config("tie"), "true")
        self.assertEqual(code, cli.EXIT_NOT_UNIQUE)
        self.assertEqual(out.splitlines(), ["F: {w0, w1}", "* S_a: -1", "* S_b: -1", "NON-UNIQUE minimum: S_a, S_b"])

    def test_empty_given(self):
        code, out, _ = _run(cli.cmd_explain, _config("example3"), "false")
        self.assertEqual(code, cli.EXIT_PASS)
        lines = out.splitlines()
        self.assertEqual(lines[0], "F: {}")
        self.assertEqual(lines[-1], "no stereotype selected (empty F)")
        self.assertTrue(all(line.startswith("  S_w") for line in lines[1:-1]))
        self.assertNotIn("NON-UNIQUE", out)


class CheckTest(parameterized.TestCase):

    @parameterized.parameters(
        ("example2", "four", cli.EXIT_FAIL),
        ("example2", "klm:or", cli.EXIT_PASS),
        ("example4", "eq2", cli.EXIT_PASS),
        ("example4", "klm:or", cli.EXIT_FAIL),
        ("example4", "all", cli.EXIT_FAIL),
        ("example1", "all", cli.EXIT_PASS),
        ("tie", "zero", cli.EXIT_FAIL),
        ("tie", "klm:cumulativity", cli.EXIT_NOT_APPLICABLE),
    )
    def test_exit_codes(self, kb, prop, expected):
        for output_format in ("text", "json"):
            code, _, _ = _run(cli.cmd_check, _config(kb, output_format=output_format), prop)
            self.assertEqual(code, expected)

    @parameterized.parameters(("example4", "eq2"), ("example2", "four"), ("tie", "klm:or"), ("example4", "tree"))
    def test_single_report_json(self, kb, prop):
        _, out, _ = _run(cli.cmd_check, _config(kb, output_format="json"), prop)
        document = json.loads(out)
        jsonschema.validate(document, schemas.load_schema("check_report"))
        self.assertEqual(document["property"], prop)

    def test_undecodable_file(self):
        text = dump_kb(corpus.load_builtin("example4")).encode("utf-8")
        path = self.create_tempfile("kb.json", content=text.replace(b"S_0", b"S_\xff", 1), mode="wb").full_path
        code, out, err = _run(cli.cmd_check, cli.CliConfig.create(kb_path=path), "eq2")
        self.assertEqual(code, cli.EXIT_ERROR)
        self.assertEmpty(out)
        self.assertStartsWith(err, "error: ")

    def test_scale_limit_before_selection_table(self):
        path = self.create_tempfile("kb.json", content=dump_kb(corpus.constant_kb(18))).full_path
        config = cli.CliConfig.create(kb_path=path)
        with mock.patch.object(cli.inference, "selection_table", side_effect=AssertionError("table built")):
            for prop in ("eq2", "zero", "consistency", "all"):
                code, _, err = _run(cli.cmd_check, config, prop)
                self.assertEqual(code, cli.EXIT_ERROR)
                self.assertIn("18 worlds", err)

    def test_all_json(self):
        code, out, _ = _run(cli.cmd_check, _config("example4", output_format="json"), "all")
        self.assertEqual(code, cli.EXIT_FAIL)
        documents = json.loads(out)
        self.assertEqual([d["property"] for d in documents], list(cli.checkers.ALL_CHECKS))
        schema = schemas.load_schema("check_report")
        for document in documents:
            jsonschema.validate(document, schema)
        verdicts = {d["property"]: d["verdict"] for d in documents}
        self.assertEqual(verdicts["four"], "FAIL")
        self.assertEqual(verdicts["klm:or"], "FAIL")
        self.assertEqual(verdicts["eq2"], "PASS")

    def test_text_and_json_agree(self):
        _, text, _ = _run(cli.cmd_check, _config("example4"), "all")
        _, out, _ = _run(cli.cmd_check, _config("example4", output_format="json"), "all")
        headers = [line for line in text.splitlines() if not line.startswith(" ")]
        self.assertEqual(headers, [f"{d['property']}: {d['verdict']}" for d in json.loads(out)])

    def test_json_is_deterministic(self):
        runs = [_run(cli.cmd_check, _config("example4", output_format="json"), "eq2")[1] for _ in range(2)]
        first, second = (json.loads(r) for r in runs)
        for document in (first, second):
            del document["stats"]["elapsed_ms"]
        self.assertEqual(first, second)

    def test_errors(self):
        code, _, err = _run(cli.cmd_check, _config("example4"), "transitivity")
        self.assertEqual(code, cli.EXIT_ERROR)
        self.assertStartsWith(err, "error: ")
        code, _, _ = _run(cli.cmd_check, _config("example3", scale="desk"), "eq2")
        self.assertEqual(code, cli.EXIT_ERROR)
        code, _, _ = _run(cli.cmd_check, _config("example3", scale="desk", override_scale_limit=True), "eq2")
        self.assertEqual(code, cli.EXIT_PASS)


class VerifyTest(parameterized.TestCase):

    @parameterized.parameters(
        ("example3", 2, cli.EXIT_PASS),
        ("example1", 2, cli.EXIT_PASS),
        ("example4", 2, cli.EXIT_NOT_APPLICABLE),
        ("example4", 1, cli.EXIT_PASS),
        ("example2", 1, cli.EXIT_PASS),
    )
    def test_theorems(self, kb, theorem, expected):
        code, out, _ = _run(cli.cmd_verify, _config(kb), theorem)
        self.assertEqual(code, expected)
        self.assertStartsWith(out, f"theorem{theorem}: ")

    def test_json(self):
        schema = schemas.load_schema("check_report")
        for kb, theorem in (("example3", 2), ("example4", 2), ("example4", 1)):
            _, out, _ = _run(cli.cmd_verify, _config(kb, output_format="json"), theorem)
            jsonschema.validate(json.loads(out), schema)

    def test_bad_theorem(self):
        code, _, _ = _run(cli.cmd_verify, _config(), 3)
        self.assertEqual(code, cli.EXIT_ERROR)


class SearchTest(parameterized.TestCase):

    @parameterized.parameters(1, 2)
    def test_small_spaces(self, n_worlds):
        code, out, _ = _run(cli.cmd_search, _config(), n_worlds)
        self.assertEqual(code, cli.EXIT_PASS)
        self.assertStartsWith(out.splitlines()[-1], "0 found, 0 unknown, ")

    def test_few_stereotypes(self):
        code, out, _ = _run(cli.cmd_search, _config(budget=10**6), 3, 2)
        self.assertEqual(code, cli.EXIT_PASS)
        summary = out.splitlines()[-1]
        self.assertNotStartsWith(summary, "0 found")
        self.assertEqual(sum(line.startswith("NO: ") for line in out.splitlines()), int(summary.split()[0]))

    def test_json_is_reproducible(self):
        runs = [
            _run(cli.cmd_search, _config(output_format="json", budget=10**5, workers=workers), 3, 1)[1]
            for workers in (1, 1, 2)
        ]
        self.assertEqual(runs[0], runs[1])
        self.assertEqual(runs[0], runs[2])
        document = json.loads(runs[0])
        jsonschema.validate(document, schemas.load_schema("search_evidence"))
        self.assertEqual((document["n_worlds"], document["max_stereotypes"]), (3, 1))

    @parameterized.parameters((0, None), (5, None), (3, 0))
    def test_bad_bounds(self, n_worlds, max_stereotypes):
        code, out, err = _run(cli.cmd_search, _config(), n_worlds, max_stereotypes)
        self.assertEqual(code, cli.EXIT_ERROR)
        self.assertEmpty(out)
        self.assertStartsWith(err, "error: ")


class MainTest(absltest.TestCase):

    def test_usage(self):
        with mock.patch("sys.stderr", new_callable=io.StringIO) as err:
            self.assertEqual(cli.main(["stereo"]), cli.EXIT_ERROR)
            self.assertEqual(cli.main(["stereo", "prove"]), cli.EXIT_ERROR)
        self.assertIn("usage: stereo {infer,explain,check,verify,search}", err.getvalue())


if __name__ == "__main__":
    absltest.main()
