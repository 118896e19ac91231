import random
import unittest
from fractions import Fraction
from unittest.mock import patch

from core.candidates import GHDOParams, ghdo_operator
from core.diffop import DiffOp, Place, exp_product, singularities
from core.exact_arith import K, X, ratfun
from core.exceptions import NegativePowers, Unsupported
from core.intbasis import (
    DX,
    ONE,
    global_integral_basis,
    hypergeometricsols,
    is_integral,
    local_integral_basis,
    normalize_at_infinity,
    pole_profile,
)
from core.quotient_lift import certify_solution, find_2f1
from tests.operators import gauge_input_operator

F = Fraction
ORIGIN = Place.rational(0)
PARAMS = GHDOParams(F(1, 2), F(1, 3), F(1, 4))
NEG_POWERS_PARAMS = GHDOParams(F(1, 2), F(3, 2), F(3))
# x*Dx^2 + Dx, solutions 1 and log(x)
LOG_OPERATOR = DiffOp((K.zero, K.one, X))


class TestLocalIntegralBasis(unittest.TestCase):
    def test_logarithmic_place(self):
        basis = local_integral_basis(LOG_OPERATOR, ORIGIN)
        self.assertEqual(basis, [ONE, DiffOp((K.zero, X))])

    def test_infinity_is_rejected(self):
        with self.assertRaises(ValueError):
            local_integral_basis(LOG_OPERATOR, Place.infinity())

    def test_is_integral(self):
        self.assertFalse(is_integral(LOG_OPERATOR, DX, ORIGIN))
        self.assertTrue(is_integral(LOG_OPERATOR, DiffOp((K.zero, X)), ORIGIN))
        self.assertTrue(is_integral(LOG_OPERATOR, ONE, ORIGIN))


class TestGlobalIntegralBasis(unittest.TestCase):
    def setUp(self):
        self.op = ghdo_operator(PARAMS)
        self.basis = global_integral_basis(self.op)

    def test_integral_at_every_finite_singularity(self):
        for place in singularities(self.op):
            if place.is_infinity:
                continue
            for element in self.basis.elements:
                self.assertTrue(is_integral(self.op, element, place), f"{element} at {place}")

    def test_twisted_operators(self):
        rng = random.Random(11)
        for _ in range(3):
            r = ratfun(F(rng.randint(1, 5), rng.randint(2, 4))) / (X - rng.choice([2, 3, -2, -3]))
            op = exp_product(self.op, r)
            basis = global_integral_basis(op)
            for place in singularities(op):
                if place.is_infinity or place.is_algebraic:
                    continue
                for element in basis.elements:
                    self.assertTrue(is_integral(op, element, place), f"{element} at {place}")

    def test_gauges_have_order_at_most_one(self):
        for gauge in self.basis.gauges():
            self.assertLessEqual(gauge.as_operator().order, 1)

    def test_normalization_does_not_raise_poles(self):
        normalized = normalize_at_infinity(self.op, self.basis)
        self.assertTrue(normalized.normalized)
        before = pole_profile(self.op, self.basis.elements).total
        after = pole_profile(self.op, normalized.elements).total
        self.assertLessEqual(after, before)


class TestGaugeReduction(unittest.TestCase):
    def test_solution_through_gauge(self):
        L = gauge_input_operator()
        solutions = hypergeometricsols(L, 1, direct=False)
        self.assertEqual(len(solutions), 1)
        solution = solutions[0]
        self.assertTrue(solution.certified)
        self.assertIsNotNone(solution.gauge)
        self.assertIsNotNone(solution.inverse)
        self.assertTrue(certify_solution(L, solution))

    def test_positive_log_differences_go_to_gauge_reduction(self):
        # logarithmic at 0, 1 and infinity with differences 2, 1 and 1
        L = ghdo_operator(NEG_POWERS_PARAMS)
        with self.assertRaises(NegativePowers):
            find_2f1(L, 1)
        solutions = hypergeometricsols(L, 1)
        for solution in solutions:
            self.assertTrue(certify_solution(L, solution))

    def test_negative_powers_fall_through_to_gauge_elements(self):
        calls = []

        def search(op, *args, **kwargs):
            calls.append(op)
            if len(calls) == 1:
                raise NegativePowers("only logarithmic expansion points with positive exponent difference")
            return []

        with patch("core.intbasis.find_2f1", side_effect=search):
            self.assertEqual(hypergeometricsols(ghdo_operator(PARAMS), 1), [])
        self.assertGreater(len(calls), 1)

    def test_unsupported_gauge_element_is_skipped(self):
        calls = []

        def search(op, *args, **kwargs):
            calls.append(op)
            raise Unsupported("no rational true singularity")

        with patch("core.intbasis.find_2f1", side_effect=search):
            self.assertEqual(hypergeometricsols(ghdo_operator(PARAMS), 1, direct=False), [])
        self.assertGreater(len(calls), 0)


if __name__ == "__main__":
    unittest.main()
