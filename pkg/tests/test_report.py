import json
import unittest
from fractions import Fraction

from cli.report import (
    SolveReport,
    render_derivative,
    render_prefactor,
    render_solution,
    solution_from_json,
    solution_to_json,
)
from core.candidates import GHDOParams
from core.exact_arith import X, ratfun
from core.quotient_lift import HypSolution
from tests.operators import EXAMPLE_PARAMS, EXAMPLE_PULLBACK, EXAMPLE_R

F = Fraction


def example_solution(certified=True) -> HypSolution:
    return HypSolution(EXAMPLE_PARAMS, ratfun(EXAMPLE_PULLBACK), ratfun(EXAMPLE_R), 1, 2, certified=certified)


class TestSolveReport(unittest.TestCase):
    def test_unknown_status(self):
        with self.assertRaises(ValueError):
            SolveReport("maybe")

    def test_failure(self):
        report = SolveReport.failure("unsupported", "no rational true singularity", "x*Dx^2")
        self.assertEqual(report.exit_code, 2)
        self.assertEqual(report.diagnostics["error"], "no rational true singularity")
        self.assertEqual(report.solutions, [])

    def test_from_solutions_keeps_certified(self):
        report = SolveReport.from_solutions([example_solution(False)], {})
        self.assertEqual(report.status, "no-solution-found")
        self.assertEqual(report.exit_code, 1)
        report = SolveReport.from_solutions([example_solution()], {"tried": 3})
        self.assertEqual(report.status, "solved")
        self.assertEqual(len(report.solutions), 1)

    def test_json_document(self):
        report = SolveReport.from_solutions([example_solution()], {"tried": 3})
        data = json.loads(report.to_json())
        self.assertEqual(set(data), {"status", "solutions", "diagnostics"})
        self.assertEqual(data["diagnostics"]["tried"], 3)

    def test_render_text(self):
        report = SolveReport.from_solutions([example_solution()], {}, "op")
        text = report.render_text()
        self.assertTrue(text.startswith("operator: op\nstatus: solved"))
        self.assertIn("solution 1:", text)


class TestSolutionJson(unittest.TestCase):
    def test_schema(self):
        data = solution_to_json(example_solution())
        self.assertEqual(data["params"], ["5/42", "11/42", "2/3"])
        self.assertEqual(data["pullback"]["type"], "rational")
        self.assertIsNone(data["gauge"])
        self.assertEqual(data["a_f"], 1)
        self.assertEqual(data["d_f"], 2)
        self.assertTrue(data["certified"])

    def test_from_json(self):
        solution = solution_from_json(solution_to_json(example_solution()))
        self.assertEqual(solution.params, EXAMPLE_PARAMS)
        self.assertEqual(solution.pullback, ratfun(EXAMPLE_PULLBACK))
        self.assertEqual(solution.r, ratfun(EXAMPLE_R))
        self.assertFalse(solution.certified)


class TestRendering(unittest.TestCase):
    def test_prefactor_as_power(self):
        self.assertEqual(render_prefactor(1 / (2 * X)), "sqrt(x)")
        self.assertIn("-5/21", render_prefactor(ratfun(EXAMPLE_R)))

    def test_prefactor_of_zero(self):
        self.assertEqual(render_prefactor(ratfun(0)), "")

    def test_prefactor_in_integral_form(self):
        self.assertEqual(render_prefactor(X), "exp(int(x, x))")

    def test_derivative(self):
        params = GHDOParams(F(1, 2), F(1, 2), F(1))
        self.assertEqual(render_derivative(params, "x"), "(1/4)*2F1(3/2, 3/2; 2; x)")

    def test_solution(self):
        text = render_solution(example_solution())
        self.assertIn("2F1(5/42, 11/42; 2/3;", text)
        self.assertIn("certified: yes", text)
        self.assertIn("certified: no", render_solution(example_solution(False)))


if __name__ == "__main__":
    unittest.main()
