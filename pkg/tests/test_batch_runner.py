import threading
import unittest

from core.batch_runner import BatchRunner


def fail_on_bad(text):
    if text == "bad":
        raise RuntimeError("boom")
    return text.upper()


def error_report(text, error):
    return f"error: {error}"


class TestBatchRunner(unittest.TestCase):
    def test_results_in_input_order(self):
        entries = [f"op{i}" for i in range(20)]
        runner = BatchRunner(str.upper, error_report, workers=4)
        self.assertEqual(runner.run(entries), [e.upper() for e in entries])

    def test_empty_input(self):
        self.assertEqual(BatchRunner(str.upper, error_report, workers=2).run([]), [])

    def test_failure_only_affects_its_entry(self):
        runner = BatchRunner(fail_on_bad, error_report, workers=2)
        self.assertEqual(runner.run(["a", "bad", "c"]), ["A", "error: boom", "C"])

    def test_callbacks(self):
        seen = []
        lock = threading.Lock()

        def record(index, text, report):
            with lock:
                seen.append((index, text, report))

        def broken(index, text, report):
            raise ValueError("callback failure")

        runner = BatchRunner(str.upper, error_report, workers=3)
        runner.register_report_callback(broken)
        runner.register_report_callback(record)
        self.assertEqual(runner.run(["a", "b"]), ["A", "B"])
        self.assertEqual(sorted(seen), [(0, "a", "A"), (1, "b", "B")])

    def test_runner_can_be_reused(self):
        runner = BatchRunner(str.upper, error_report, workers=2)
        runner.run(["x"])
        self.assertEqual(runner.run(["y", "z"]), ["Y", "Z"])


if __name__ == "__main__":
    unittest.main()
