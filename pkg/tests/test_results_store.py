import os
import shutil
import tempfile
import unittest

from core.results_store import ResultsStore


def report(status, solutions=None):
    return {"status": status, "solutions": solutions or [], "diagnostics": {"elapsed": 0.5}}


class TestResultsStore(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.store = ResultsStore(os.path.join(self.tmp, "results.db"))

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def test_run_round_trip(self):
        run_id = self.store.start_run("batch.txt", {"prime": 4099, "precision_factor": "3/2"})
        run = self.store.get_run(run_id)
        self.assertEqual(run["source"], "batch.txt")
        self.assertEqual(run["config"], {"prime": 4099, "precision_factor": "3/2"})

    def test_missing_run(self):
        self.assertIsNone(self.store.get_run(42))

    def test_reports_in_line_order(self):
        run_id = self.store.start_run("batch.txt")
        self.store.add_report(run_id, 2, "Dx^2 - x", report("invalid-input"))
        self.store.add_report(run_id, 1, "Dx^2 + 1", report("solved", [{"params": ["1/2", "1/2", "1"]}]))
        reports = self.store.get_reports(run_id)
        self.assertEqual([r["line_number"] for r in reports], [1, 2])
        self.assertEqual(reports[0]["solutions"][0]["params"], ["1/2", "1/2", "1"])
        self.assertEqual(reports[1]["diagnostics"], {"elapsed": 0.5})

    def test_status_filter_and_counts(self):
        run_id = self.store.start_run("batch.txt")
        for line, status in enumerate(["solved", "unsupported", "solved"], 1):
            self.store.add_report(run_id, line, f"op{line}", report(status))
        self.assertEqual(len(self.store.get_reports(run_id, status="solved")), 2)
        self.assertEqual(self.store.get_status_counts(run_id), {"solved": 2, "unsupported": 1})

    def test_latest_runs_first(self):
        first = self.store.start_run("a")
        second = self.store.start_run("b")
        self.assertEqual([r["id"] for r in self.store.get_latest_runs()], [second, first])
        self.assertEqual(len(self.store.get_latest_runs(1)), 1)


if __name__ == "__main__":
    unittest.main()
