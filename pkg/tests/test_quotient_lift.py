import unittest
from fractions import Fraction
from unittest.mock import patch

from config.settings import SolveConfig
from core.candidates import GHDOParams, ghdo_from_triple, ghdo_operator, singular_structure
from core.diffop import DiffOp, GaugeOperator, Place, change_of_variables, exp_product
from core.exact_arith import K, X, QuadraticExtension, ratfun
from core.exceptions import InvalidOperator, NegativePowers
from core.quotient_lift import (
    HypSolution,
    LiftState,
    SearchStats,
    algebraic_lift,
    build_quotients,
    certify_solution,
    expansion_points,
    find_2f1,
    hensel_step,
    reconstruct_state,
    recover_r,
    sweep_c,
    validate_operator,
)
from tests.operators import (
    EXAMPLE_PARAMS,
    EXAMPLE_PULLBACK,
    EXAMPLE_R,
    GAUGE_PARAMS,
    GAUGE_PULLBACK,
    algebraic_operator,
    algebraic_pullback_minpoly,
    example_operator,
    gauge_target_operator,
)

F = Fraction
PARAMS = GHDOParams(F(1, 2), F(1, 3), F(1, 4))


def example_solution(**changes) -> HypSolution:
    values = dict(
        params=EXAMPLE_PARAMS,
        pullback=ratfun(EXAMPLE_PULLBACK),
        r=ratfun(EXAMPLE_R),
        a_f=1,
        d_f=2,
    )
    values.update(changes)
    return HypSolution(**values)


class TestValidation(unittest.TestCase):
    def test_order_must_be_two(self):
        with self.assertRaises(InvalidOperator):
            validate_operator(DiffOp((K.zero, K.one)))

    def test_reducible_operator(self):
        with self.assertRaises(InvalidOperator):
            validate_operator(DiffOp((K.zero, K.one, X)))

    def test_irregular_operator(self):
        with self.assertRaises(InvalidOperator):
            validate_operator(DiffOp((-X, K.zero, K.one)))

    def test_example_is_valid(self):
        validate_operator(example_operator().normalized())


class TestExpansionPoints(unittest.TestCase):
    def test_rational_points_first_infinity_last(self):
        points = expansion_points(singular_structure(example_operator()))
        self.assertEqual([str(p[0]) for p in points], ["0", "1", "-1", "infinity"])

    def test_logarithmic_points(self):
        points = expansion_points(singular_structure(gauge_target_operator()))
        self.assertTrue(all(logarithmic for _, _, logarithmic in points))


class TestQuotients(unittest.TestCase):
    def test_nonlog_quotients(self):
        params = ghdo_from_triple((F(1, 3), F(2, 7), F(1, 7)))[0]
        qd = build_quotients(example_operator(), ghdo_operator(params), Place.rational(0), 10, "nonlog")
        self.assertEqual(qd.params, params)
        self.assertEqual(qd.alpha, F(1, 3))
        self.assertEqual(qd.delta, F(1, 3))
        self.assertEqual(qd.rho, 1)
        self.assertEqual(qd.length, 10)

    def test_ramified_quotients(self):
        # 1 is a double point over the 2/7 slot
        params = ghdo_from_triple((F(2, 7), F(1, 3), F(1, 7)))[0]
        qd = build_quotients(example_operator(), ghdo_operator(params), Place.rational(1), 6, "nonlog", params)
        self.assertEqual(qd.alpha, F(2, 7))
        self.assertEqual(qd.delta, F(4, 7))
        self.assertEqual(qd.rho, 1)

    def test_log_mode_needs_zero_difference(self):
        with self.assertRaises(NegativePowers):
            build_quotients(example_operator(), ghdo_operator(EXAMPLE_PARAMS), Place.rational(0), 10, "log")


class TestCertification(unittest.TestCase):
    def test_recover_r(self):
        M = change_of_variables(ghdo_operator(PARAMS), X ** 2)
        r = 1 / X + 1 / (X - 3)
        self.assertEqual(recover_r(M, exp_product(M, r)), r)

    def test_recover_r_rejects_other_operators(self):
        M = change_of_variables(ghdo_operator(PARAMS), X ** 2)
        self.assertIsNone(recover_r(M, ghdo_operator(PARAMS)))

    def test_certify_example(self):
        self.assertTrue(certify_solution(example_operator(), example_solution()))

    def test_certify_rejects_wrong_prefactor(self):
        self.assertFalse(certify_solution(example_operator(), example_solution(r=K.zero)))

    def test_certify_gauge_target(self):
        solution = HypSolution(GAUGE_PARAMS, ratfun(GAUGE_PULLBACK), K.zero, 1, 2)
        self.assertTrue(certify_solution(gauge_target_operator(), solution))

    def test_form2_without_gauge(self):
        self.assertEqual(example_solution().form2_coefficients(), (K.one, K.zero))

    def test_form2_with_inverse(self):
        solution = example_solution(r=K.zero, inverse=GaugeOperator(0, 1))
        r0, r1 = solution.form2_coefficients()
        self.assertEqual(r0, K.zero)
        self.assertEqual(r1, ratfun(EXAMPLE_PULLBACK).diff(X))


class TestSweepAndLift(unittest.TestCase):
    """The input equals the base operator, so f = x with leading constant 1."""

    ell = 4099

    def setUp(self):
        op = ghdo_operator(PARAMS)
        self.qd = build_quotients(op, op, Place.rational(0), 12, "nonlog", PARAMS)

    def identity_hit(self):
        hits = [hit for hit in sweep_c(self.qd, self.ell, 1, 1) if hit.c == 1]
        self.assertEqual(len(hits), 1)
        return hits[0]

    def test_sweep_finds_identity(self):
        hit = self.identity_hit()
        self.assertEqual(hit.numer, (0, 1))
        self.assertEqual(hit.denom, (1,))
        self.assertEqual(list(hit.series[:3]), [0, 1, 0])

    def test_identity_needs_no_lifting(self):
        state = LiftState.from_hit(self.identity_hit(), self.ell, 1)
        self.assertEqual(reconstruct_state(state), ([0, 1], [1]))

    def test_hensel_step(self):
        lifted = hensel_step(LiftState.from_hit(self.identity_hit(), self.ell, 1), self.qd)
        self.assertEqual(lifted.n, 2)
        self.assertEqual(lifted.modulus, self.ell ** 2)
        self.assertEqual(lifted.c, 1)
        self.assertEqual(lifted.numer, (0, 1))
        self.assertEqual(lifted.denom, (1,))

    def test_algebraic_lift_needs_minimal_polynomial(self):
        state = LiftState.from_hit(self.identity_hit(), self.ell, 1)
        with self.assertRaises(ValueError):
            algebraic_lift(state, self.qd)


class TestSearchStats(unittest.TestCase):
    def test_primes_recorded_once(self):
        stats = SearchStats()
        stats.use_prime(4099)
        stats.use_prime(4099)
        stats.use_prime(7919)
        self.assertEqual(stats.primes, [4099, 7919])
        self.assertEqual(set(stats.to_dict()), {
            "candidates", "tried", "primes", "lift_levels", "expansion_point", "hits", "elapsed",
        })


class TestFind2F1(unittest.TestCase):
    def test_rational_pullback(self):
        stats = SearchStats()
        solutions = find_2f1(example_operator(), 1, SolveConfig.from_settings(), stats)
        self.assertEqual(len(solutions), 1)
        solution = solutions[0]
        self.assertTrue(solution.certified)
        self.assertFalse(solution.algebraic)
        self.assertEqual(solution.a_f, 1)
        self.assertEqual(solution.d_f, 2)
        self.assertEqual(sorted(solution.params.exponent_differences()), [F(1, 7), F(2, 7), F(1, 3)])
        self.assertTrue(certify_solution(example_operator(), solution))
        self.assertGreater(stats.tried, 0)
        self.assertIn(4099, stats.primes)

    def test_logarithmic_pullback(self):
        solutions = find_2f1(gauge_target_operator(), 1)
        self.assertEqual(len(solutions), 1)
        solution = solutions[0]
        self.assertTrue(solution.certified)
        self.assertIn(0, solution.params.exponent_differences())
        self.assertTrue(certify_solution(gauge_target_operator(), solution))

    def test_constructed_pullback(self):
        # 2F1(1/2, 1/3; 1/4; x^2) times (x - 3)
        M = change_of_variables(ghdo_operator(PARAMS), X ** 2)
        L = exp_product(M, 1 / (X - 3))
        solutions = find_2f1(L, 1)
        self.assertEqual(len(solutions), 1)
        self.assertEqual(solutions[0].d_f, 2)
        self.assertTrue(certify_solution(L, solutions[0]))

    def test_algebraic_pullback(self):
        L = algebraic_operator()
        with patch("core.quotient_lift.algebraic_lift", wraps=algebraic_lift) as lift:
            solutions = find_2f1(L, 2)
        self.assertTrue(lift.called)
        self.assertEqual(len(solutions), 1)
        solution = solutions[0]
        self.assertTrue(solution.certified)
        self.assertTrue(solution.algebraic)
        self.assertEqual(solution.a_f, 2)
        self.assertEqual(sorted(solution.params.exponent_differences()), [0, 0, F(1, 3)])
        ext = QuadraticExtension.from_minpoly(solution.minpoly)
        p, q = algebraic_pullback_minpoly()
        # f or 1 - f, the operator is symmetric under x -> 1/x
        self.assertIn((ext.p, ext.q), [(p, q), (-2 - p, 1 + p + q)])
        self.assertTrue(certify_solution(L, solution))

    def test_reducible_input_is_rejected(self):
        with self.assertRaises(InvalidOperator):
            find_2f1(DiffOp((K.zero, K.one, X)))


if __name__ == "__main__":
    unittest.main()
