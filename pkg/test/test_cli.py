import contextlib
import csv
import io
import json
import os
import tempfile
import unittest
from unittest import mock

from solharm import cli
from solharm.errors import ConfigError
from solharm.util import enable_debug


def run(*argv):
    out = io.StringIO()
    err = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = cli.main(list(argv))
    return code, out.getvalue(), err.getvalue()


def rows(text):
    return list(csv.reader(io.StringIO(text)))


class TestConfig(unittest.TestCase):
    def test_defaults(self):
        cfg = cli.RunConfig.from_dict({"command": "tree"})
        self.assertEqual(cfg.system.N, 2)
        self.assertEqual(cfg.filter.name, "haar")
        self.assertEqual(cfg.params, {"root": cli.DEFAULT_ROOT, "depth": 4})
        self.assertEqual((cfg.seed, cfg.path, cfg.format), (0, None, "csv"))

    def test_unknown_key(self):
        for doc, key in (({"command": "tree", "params": {"bogus": 1}}, "params.bogus"),
                         ({"command": "tree", "system": {"M": 2}}, "system.M"),
                         ({"command": "tree", "extra": 1}, "extra"),
                         ({"command": "tree", "params": {"samples": 10}}, "params.samples")):
            with self.subTest(key=key):
                with self.assertRaises(ConfigError) as e:
                    cli.RunConfig.from_dict(doc)
                self.assertEqual(e.exception.key, key)

    def test_invalid_value(self):
        for doc, key in (({}, "command"),
                         ({"command": "tree", "params": {"depth": "4"}}, "params.depth"),
                         ({"command": "tree", "params": {"depth": -1}}, "params.depth"),
                         ({"command": "decay", "params": {"m_max": 3}}, "params.m_max"),
                         ({"command": "decay", "params": {"b0": "0,0.5,1"}}, "params.b0"),
                         ({"command": "verify", "params": {"suite": "x"}}, "params.suite"),
                         ({"command": "tree", "filter": {"name": "d4"},
                           "system": {"N": 3}}, "filter.name"),
                         ({"command": "tree", "output": {"format": "xml"}}, "output.format")):
            with self.subTest(key=key):
                with self.assertRaises(ConfigError) as e:
                    cli.RunConfig.from_dict(doc)
                self.assertEqual(e.exception.key, key)

    def test_flags_override(self):
        doc = json.dumps({"command": "tree", "params": {"depth": 2}, "seed": 3})
        cfg, debug = cli.parse_args(["--config", doc, "--depth", "5", "--filter", "d4"])
        self.assertEqual(cfg.params["depth"], 5)
        self.assertEqual(cfg.seed, 3)
        self.assertEqual(cfg.filter.name, "d4")
        self.assertFalse(debug)

    def test_config_file(self):
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, "run.json")
            with open(path, "w") as fp:
                json.dump({"command": "martin", "params": {"depth": 1}}, fp)
            cfg, _ = cli.parse_args(["--config", path])
        self.assertEqual(cfg.command, "martin")


class TestCommands(unittest.TestCase):
    def test_tree(self):
        code, out, _ = run("tree", "--root", "0.1234477851", "--depth", "4",
                           "--filter", "haar")
        self.assertEqual(code, 0)
        r = rows(out)
        self.assertEqual(r[0], ["id", "parent", "depth", "point", "W", "Wn", "D"])
        self.assertEqual(len(r), 32)
        self.assertEqual(out, run("tree", "--depth", "4")[1])

    def test_tree_json(self):
        code, out, _ = run("tree", "--depth", "1", "--format", "json")
        self.assertEqual(code, 0)
        lines = [json.loads(x) for x in out.splitlines()]
        self.assertEqual(len(lines), 3)
        self.assertEqual(lines[0]["parent"], -1)

    def test_tree_source(self):
        doc = {"command": "tree",
               "system": {"kind": "tree",
                          "tree": {"root": "o", "children": {"o": ["a", "b"]},
                                   "weights": {"a": 0.25, "b": 0.75}}}}
        code, out, _ = run("--config", json.dumps(doc))
        self.assertEqual(code, 0)
        self.assertEqual([x[3] for x in rows(out)[1:]], ["o", "a", "b"])

    def test_walk(self):
        code, out, _ = run("walk", "--length", "4", "--paths", "3", "--seed", "2")
        self.assertEqual(code, 0)
        r = rows(out)
        self.assertEqual(r[0], ["step", "point", "W", "cumulative_product"])
        self.assertEqual(len(r), 1 + 3 * 5)
        self.assertEqual([x[0] for x in r[1:6]], ["0", "1", "2", "3", "4"])
        self.assertEqual(out, run("walk", "--length", "4", "--paths", "3", "--seed", "2")[1])

    def test_martin(self):
        code, out, _ = run("martin", "--depth", "2")
        self.assertEqual(code, 0)
        r = rows(out)
        self.assertEqual(r[0], ["x", "y", "green", "K", "rho", "tail"])
        self.assertEqual(len(r), 1 + 7 * 7)

    def test_martin_periodic(self):
        code, _, err = run("martin", "--root", str(1 / 3), "--depth", "2")
        self.assertEqual(code, 1)
        self.assertIn("RegularityError", err)

    def test_harmonic(self):
        code, out, _ = run("harmonic", "--depth", "3")
        self.assertEqual(code, 0)
        r = rows(out)
        self.assertEqual(r[0], ["id", "point", "depth", "value", "role", "residual"])
        self.assertEqual(len(r), 1 + 2 * 15)
        self.assertEqual({x[4] for x in r[1:]}, {"additive", "p-harmonic"})

    def test_harmonic_fails(self):
        doc = json.dumps({"command": "harmonic", "params": {"h": "cos", "depth": 3}})
        self.assertEqual(run("--config", doc)[0], 1)

    def test_lyapunov(self):
        code, out, _ = run("lyapunov", "--filter", "constant")
        self.assertEqual(code, 0)
        self.assertEqual(rows(out), [["filter", "value", "error", "jensen"],
                                     ["constant", "0.0", "0.0", "True"]])

    def test_decay(self):
        code, out, _ = run("decay", "--m-max", "8", "--format", "json")
        self.assertEqual(code, 0)
        doc = json.loads(out)
        self.assertEqual(set(doc), {"A0", "probabilities", "fit", "audit"})
        self.assertEqual(doc["A0"], "0.4,0.6")
        self.assertEqual(len(doc["probabilities"]), 8)
        self.assertLess(doc["fit"]["b"], 1.0)

    def test_decompose(self):
        code, out, _ = run("decompose", "--samples", "4000", "--length", "16", "--seed", "1")
        self.assertEqual(code, 0)
        doc = json.loads(out)
        self.assertEqual(len(doc["histogram"]["counts"]), 17)
        self.assertEqual([c["check"] for c in doc["checks"]],
                         ["decompose.psi_isometry", "decompose.non_periodic"])
        self.assertTrue(all(c["pass"] for c in doc["checks"]))

    def test_verify(self):
        code, out, _ = run("verify", "--suite", "dynsys", "--seed", "7")
        self.assertEqual(code, 0)
        lines = [json.loads(x) for x in out.splitlines()]
        self.assertTrue(all(x["check"].startswith("dynsys.") for x in lines))
        self.assertTrue(all(x["pass"] for x in lines))

    def test_out_file(self):
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, "tree.csv")
            code, out, _ = run("tree", "--depth", "2", "--out", path)
            with open(path) as fp:
                text = fp.read()
        self.assertEqual(code, 0)
        self.assertEqual(out, "")
        self.assertEqual(len(rows(text)), 8)


class TestExitCodes(unittest.TestCase):
    def test_config_error(self):
        code, out, err = run("--config", '{"command": "tree", "params": {"bogus": 1}}')
        self.assertEqual(code, 2)
        self.assertEqual(out, "")
        self.assertIn("params.bogus", err)

    def test_bad_json(self):
        self.assertEqual(run("--config", "{not json")[0], 2)

    def test_argparse(self):
        with contextlib.redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as e:
                cli.main(["tree", "--depth", "four"])
        self.assertEqual(e.exception.code, 2)

    def test_ignored_flag(self):
        code, out, _ = run("tree", "--depth", "1", "--samples", "10")
        self.assertEqual(code, 0)
        self.assertEqual(len(rows(out)), 4)

    def test_threads_env(self):
        for value in ("zero", "0"):
            with mock.patch.dict(os.environ, {"SOLHARM_THREADS": value}):
                code, out, err = run("tree", "--depth", "1")
            self.assertEqual(code, 2)
            self.assertEqual(out, "")
            self.assertIn("config error: SOLHARM_THREADS", err)


if __name__ == "__main__":
    enable_debug()
    unittest.main()
