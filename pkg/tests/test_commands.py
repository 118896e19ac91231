import io
import json
import os
import shutil
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout

from cli.commands import batch_command, main, read_batch_file, solve_command, summarize
from config.settings import SolveConfig
from core.results_store import ResultsStore
from tests.operators import EXAMPLE_TEXT

BATCH_TEXT = """# malformed and out-of-contract operators
Dx^3

x $ 1
Dx^2 - x   # Airy, irregular at infinity
"""


class TestSolveCommand(unittest.TestCase):
    def setUp(self):
        self.cfg = SolveConfig.from_settings()

    def test_invalid_inputs(self):
        for text in ("Dx^3", "x*Dx^2 + Dx", "Dx^2 - x", "x/Dx"):
            with self.subTest(text=text):
                report = solve_command(text, self.cfg)
                self.assertEqual(report.status, "invalid-input")
                self.assertEqual(report.exit_code, 3)
                self.assertIn("error", report.diagnostics)

    def test_diagnostics(self):
        report = solve_command("Dx^2 - x", self.cfg)
        self.assertIn("memory_mb", report.diagnostics)
        self.assertEqual(report.diagnostics["mode"], "auto")

    def test_rational_pullback(self):
        cfg = SolveConfig.from_settings(mode="find2f1", a_fmax=1)
        report = solve_command(EXAMPLE_TEXT, cfg)
        self.assertEqual(report.status, "solved")
        self.assertEqual(len(report.solutions), 1)
        self.assertTrue(report.solutions[0]["certified"])
        self.assertEqual(report.solutions[0]["d_f"], 2)


class TestBatch(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.path = os.path.join(self.tmp, "operators.txt")
        with open(self.path, "w", encoding="utf-8") as handle:
            handle.write(BATCH_TEXT)

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def test_read_batch_file(self):
        self.assertEqual(read_batch_file(self.path), ["Dx^3", "x $ 1", "Dx^2 - x"])

    def test_batch_reports_in_order(self):
        store = ResultsStore(os.path.join(self.tmp, "results.db"))
        reports = batch_command(self.path, SolveConfig.from_settings(), store, workers=2)
        self.assertEqual([r.operator for r in reports], ["Dx^3", "x $ 1", "Dx^2 - x"])
        counts = summarize(reports)
        self.assertEqual(counts["invalid-input"], 3)
        self.assertEqual(counts["solved"], 0)
        self.assertEqual(counts["total"], 3)

        run = store.get_latest_runs(1)[0]
        stored = store.get_reports(run["id"])
        self.assertEqual([r["line_number"] for r in stored], [1, 2, 3])
        self.assertEqual(store.get_status_counts(run["id"]), {"invalid-input": 3})

    def test_summarize_empty(self):
        self.assertEqual(summarize([]), {
            "solved": 0, "no-solution-found": 0, "unsupported": 0, "invalid-input": 0, "total": 0,
        })


class TestMain(unittest.TestCase):
    def run_main(self, argv):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = main(argv)
        return code, out.getvalue(), err.getvalue()

    def test_solve_json(self):
        code, out, _ = self.run_main(["solve", "Dx^3", "--json"])
        self.assertEqual(code, 3)
        self.assertEqual(json.loads(out)["status"], "invalid-input")

    def test_invalid_prime(self):
        code, _, err = self.run_main(["solve", "x*Dx^2", "--prime", "4"])
        self.assertEqual(code, 3)
        self.assertIn("prime", err)

    def test_invalid_precision_factor(self):
        code, _, _ = self.run_main(["solve", "x*Dx^2", "--precision-factor", "1/2"])
        self.assertEqual(code, 3)

    def test_batch_missing_file(self):
        code, _, err = self.run_main(["batch", os.path.join(tempfile.gettempdir(), "no-such-batch.txt")])
        self.assertEqual(code, 3)
        self.assertIn("cannot read batch file", err)

    def test_batch_empty_file(self):
        tmp = tempfile.mkdtemp()
        try:
            path = os.path.join(tmp, "empty.txt")
            open(path, "w").close()
            code, out, _ = self.run_main(["batch", path, "--json"])
            self.assertEqual(code, 0)
            self.assertEqual(json.loads(out)["summary"]["total"], 0)
        finally:
            shutil.rmtree(tmp, ignore_errors=True)


if __name__ == "__main__":
    unittest.main()
