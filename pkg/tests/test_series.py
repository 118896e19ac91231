import unittest
from fractions import Fraction

from core.exact_arith import ModInt, ratfun
from core.exceptions import PrecisionExhausted
from core.series import (
    LogSeries,
    PuiseuxSeries,
    compositional_inverse,
    series_arith,
    series_compose,
    series_exp,
    series_from_ratfun,
    series_invert_functional,
    series_pow_rational,
    zero_series,
)

F = Fraction


def series(coeffs, offset=0, ramification=1):
    return PuiseuxSeries.from_coeffs([F(c) for c in coeffs], offset, ramification)


class TestPuiseuxSeries(unittest.TestCase):
    def test_geometric_expansion(self):
        s = series_from_ratfun(ratfun("1/(1-x)"), 5)
        self.assertEqual(s.coeffs, (1, 1, 1, 1, 1))
        self.assertEqual(s.order, 5)

    def test_laurent_expansion_has_negative_offset(self):
        s = series_from_ratfun(ratfun("1/(x^2 - x^3)"), 3)
        self.assertEqual(s.offset, -2)
        self.assertEqual(s.coeffs, (1, 1, 1))

    def test_expansion_at_a_point(self):
        s = series_from_ratfun(ratfun("x^2"), 3, F(1))
        self.assertEqual(s.coeffs, (1, 2, 1))

    def test_product_with_inverse_is_one(self):
        s = series([1, 2, 3, 4, 5])
        product = s * s.inverse()
        self.assertEqual(product.coeffs, (1, 0, 0, 0, 0))

    def test_normalized_reduces_ramification(self):
        s = series([1, 0, 1, 0], ramification=2)
        n = s.normalized()
        self.assertEqual(n.ramification, 1)
        self.assertEqual(n.coeffs, (1, 1))

    def test_addition_aligns_exponents(self):
        a = series([1, 1], offset=F(1, 2), ramification=2)
        b = series([1, 1])
        total = a + b
        self.assertEqual(total.coefficient(0), 1)
        self.assertEqual(total.coefficient(F(1, 2)), 1)
        self.assertEqual(total.coefficient(1), 2)

    def test_coefficient_beyond_order(self):
        with self.assertRaises(PrecisionExhausted):
            series([1, 2]).coefficient(2)

    def test_residues_pad_leading_zeros(self):
        s = series([F(1, 2), 1], offset=1)
        self.assertEqual(s.residues(7, 3), [0, 4, 1])
        with self.assertRaises(PrecisionExhausted):
            s.residues(7, 4)

    def test_reduce_mod(self):
        s = series([F(1, 2), 3]).reduce_mod(7)
        self.assertEqual(s.coeffs, (ModInt(4, 7), ModInt(3, 7)))


class TestSeriesFunctions(unittest.TestCase):
    def test_square_root(self):
        s = series_pow_rational(series([1, 1, 0, 0]), F(1, 2))
        self.assertEqual(s.coeffs, (1, F(1, 2), F(-1, 8), F(1, 16)))

    def test_rational_power_shifts_offset(self):
        s = series_pow_rational(series([4, 0, 0], offset=2), F(1, 2))
        self.assertEqual(s.offset, 1)
        self.assertEqual(s.coeffs[0], 2)

    def test_exp(self):
        s = series_exp(series([0, 1, 0, 0, 0]))
        self.assertEqual(s.coeffs, (1, 1, F(1, 2), F(1, 6), F(1, 24)))

    def test_exp_needs_zero_constant_term(self):
        with self.assertRaises(ValueError):
            series_exp(series([1, 1]))

    def test_compositional_inverse(self):
        # x + x^2 inverts to the signed Catalan numbers
        w = compositional_inverse(series([1, 1, 0, 0], offset=1))
        self.assertEqual(w.offset, 1)
        self.assertEqual(w.coeffs, (1, -1, 2, -5))

    def test_compositional_inverse_needs_valuation_one(self):
        with self.assertRaises(ValueError):
            compositional_inverse(series([1, 1], offset=2))

    def test_arith_dispatch(self):
        a, b = series([1, 2, 3]), series([1, 1, 1])
        self.assertEqual(series_arith(a, b, "mul").coeffs, (a * b).coeffs)
        self.assertEqual(series_arith(a, b, "add").coeffs, (2, 3, 4))
        with self.assertRaises(ValueError):
            series_arith(a, b, "pow")

    def test_compose(self):
        # 1 + T + T^2 at T = x + x^2
        s = series_compose(series([1, 1, 1]), series([1, 1], offset=1))
        self.assertEqual([s.coefficient(k) for k in range(3)], [1, 1, 2])

    def test_compose_with_inverse_is_identity(self):
        u = series([1, 1, 0, 0], offset=1)
        s = series_compose(compositional_inverse(u), u)
        self.assertEqual(s.coefficient(1), 1)
        self.assertEqual(s.coefficient(2), 0)
        self.assertEqual(s.coefficient(3), 0)

    def test_compose_needs_positive_valuation(self):
        with self.assertRaises(ValueError):
            series_compose(series([1, 1]), series([1, 1]))

    def test_functional_inverse(self):
        # q = x^2 (1 + x) inverts to T^(1/2) - T/2 + ...
        q = series([1, 1, 0, 0, 0], offset=2)
        inv = series_invert_functional(q, 2)
        self.assertEqual(inv.offset, F(1, 2))
        self.assertEqual(inv.coefficient(F(1, 2)), 1)
        self.assertEqual(inv.coefficient(1), F(-1, 2))
        with self.assertRaises(ValueError):
            series_invert_functional(q, 1)


class TestLogSeries(unittest.TestCase):
    def test_pure_series_is_not_logarithmic(self):
        y = LogSeries.pure(series([1, 2, 3]))
        self.assertFalse(y.is_logarithmic)
        self.assertEqual(y.valuation(), 0)

    def test_derivative_of_log(self):
        # d/dt log t = 1/t
        y = LogSeries(F(0), zero_series(4), series([1, 0, 0, 0]))
        dy = y.derivative()
        self.assertEqual(dy.coefficient(-1), (1, 0))
        self.assertFalse(dy.is_logarithmic)

    def test_terms_below(self):
        y = LogSeries(F(0), series([0, 2, 0, 0]), series([1, 0, 0, 0]))
        self.assertEqual(y.terms_below(2), [(0, 0, 1), (1, 2, 0)])
        with self.assertRaises(PrecisionExhausted):
            y.terms_below(5)


if __name__ == "__main__":
    unittest.main()
