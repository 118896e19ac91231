import random
import unittest
from fractions import Fraction

from core.candidates import (
    CandidateTriple,
    GHDOParams,
    LogCover,
    align_triple,
    canonical_order,
    cover_logs,
    covol,
    degree_bound,
    find_expdiffs,
    ghdo_from_triple,
    ghdo_operator,
    schwarz_ok,
    singular_structure,
)
from core.diffop import change_of_variables
from core.exact_arith import X, ratfun
from core.exceptions import InvalidOperator
from tests.operators import EXAMPLE_PARAMS, example_operator, gauge_target_operator

F = Fraction
EXAMPLE_TRIPLE = CandidateTriple(F(1, 3), F(2, 7), F(1, 7), 2, 1)


class TestStructure(unittest.TestCase):
    def test_example_structure(self):
        struct = singular_structure(example_operator())
        self.assertEqual(struct.n_true, 4)
        self.assertFalse(struct.has_log)
        self.assertEqual(sorted(struct.nonlog_deltas), [F(2, 7), F(1, 3), F(1, 3), F(4, 7)])
        self.assertEqual(struct.covol_input, F(10, 21))

    def test_logarithmic_structure(self):
        struct = singular_structure(gauge_target_operator())
        self.assertTrue(struct.has_log)
        self.assertEqual(struct.log_deltas, [0, 0, 0, 0])

    def test_covol(self):
        self.assertEqual(covol([F(1, 3), F(4, 7), F(2, 7), F(1, 3)]), F(10, 21))

    def test_covol_scales_with_pullback_degree(self):
        rng = random.Random(5)
        choices = [F(k, n) for n in range(2, 8) for k in range(1, n)]
        checked = 0
        while checked < 8:
            d0, d1, dinf = (rng.choice(choices) for _ in range(3))
            b1 = 1 - d0
            params = GHDOParams((b1 - d1 + dinf) / 2, (b1 - d1 - dinf) / 2, b1)
            if not params.is_irreducible:
                continue
            # c*x^m*(x - b)^n has its remaining branch point at m*b/(m + n)
            m, n = rng.randint(1, 2), rng.randint(1, 2)
            c = ratfun(F(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 5)))
            b = rng.choice([-3, -2, -1, 1, 2, 3])
            f = c * X ** m * (X - b) ** n
            struct = singular_structure(change_of_variables(ghdo_operator(params), f))
            self.assertEqual(struct.covol_input, (m + n) * covol([d0, d1, dinf]), f"{params} at {f}")
            checked += 1

    def test_degree_bound(self):
        self.assertEqual(degree_bound(3, True), 6)
        self.assertEqual(degree_bound(4, False), 60)
        with self.assertRaises(InvalidOperator):
            degree_bound(2, False)


class TestTriples(unittest.TestCase):
    def test_schwarz_condition(self):
        self.assertTrue(schwarz_ok([F(1, 2), F(1, 3), F(1, 7)]))
        self.assertFalse(schwarz_ok([F(1, 2), F(1, 2), F(1, 3)]))

    def test_canonical_order(self):
        self.assertEqual(canonical_order([F(1, 7), 0, F(1, 3)]), (0, F(1, 3), F(1, 7)))

    def test_example_triple_is_found(self):
        struct = singular_structure(example_operator())
        triples = find_expdiffs(struct, 1)
        self.assertIn(EXAMPLE_TRIPLE, triples)
        for t in triples:
            self.assertTrue(schwarz_ok(t.alphas))
            self.assertEqual(t.alphas, canonical_order(t.alphas))

    def test_triples_satisfy_covol(self):
        struct = singular_structure(example_operator())
        for t in find_expdiffs(struct, 1):
            self.assertEqual(F(t.d, t.a_f) * covol(t.alphas), struct.covol_input)

    def test_cover_logs_without_logs(self):
        struct = singular_structure(example_operator())
        self.assertEqual(cover_logs(struct, 1), [LogCover((), 60, False)])

    def test_cover_logs_with_zero_differences(self):
        struct = singular_structure(gauge_target_operator())
        for cover in cover_logs(struct, 1):
            self.assertIn(0, cover.alphas)


class TestBaseOperators(unittest.TestCase):
    def test_canonical_parameters(self):
        params = ghdo_from_triple(EXAMPLE_TRIPLE)
        self.assertEqual(params[0], EXAMPLE_PARAMS)
        for p in params:
            self.assertTrue(p.is_irreducible)
            self.assertEqual(sorted(p.exponent_differences()), sorted(EXAMPLE_TRIPLE.alphas))

    def test_reducible_parameters_are_dropped(self):
        # alpha_0 = 1 with alpha_1 = alpha_inf = 1/2 forces an integer parameter
        self.assertEqual(ghdo_from_triple((F(1), F(1, 2), F(1, 2))), [])

    def test_ghdo_operator(self):
        op = ghdo_operator(GHDOParams(F(1, 2), F(1, 2), F(1)))
        self.assertEqual(op.order, 2)
        self.assertEqual(op.apply(1), ratfun(F(-1, 4)))
        self.assertEqual(op.leading_coefficient(), ratfun("x - x^2"))

    def test_derivative_params(self):
        self.assertEqual(EXAMPLE_PARAMS.derivative_params(),
                         GHDOParams(F(47, 42), F(53, 42), F(5, 3)))


class TestAlignment(unittest.TestCase):
    def test_align_to_simple_point(self):
        alignments = align_triple(EXAMPLE_TRIPLE, F(1, 3), False)
        self.assertEqual(len(alignments), 1)
        self.assertEqual(alignments[0].alphas[0], F(1, 3))
        self.assertEqual(alignments[0].ramification, 1)

    def test_align_to_double_point(self):
        alignments = align_triple(EXAMPLE_TRIPLE, F(4, 7), False)
        self.assertEqual([a.alphas[0] for a in alignments], [F(2, 7)])
        self.assertEqual(alignments[0].ramification, 2)

    def test_logarithmic_point_needs_zero_slot(self):
        self.assertEqual(align_triple(EXAMPLE_TRIPLE, F(0), True), [])
        log_triple = CandidateTriple(F(0), F(0), F(0), 2, 1)
        self.assertEqual(len(align_triple(log_triple, F(0), True)), 1)


if __name__ == "__main__":
    unittest.main()
