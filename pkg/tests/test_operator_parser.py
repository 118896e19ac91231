import unittest
from fractions import Fraction

from cli.operator_parser import parse_operator, render_operator, tokenize
from core.candidates import GHDOParams, ghdo_operator
from core.diffop import DiffOp
from core.exact_arith import K, X
from core.exceptions import InvalidOperator, OperatorParseError
from tests.operators import EXAMPLE_TEXT, example_operator

F = Fraction
LEGENDRE_TEXT = "x*(1-x)*Dx^2 + (1-2*x)*Dx - 1/4"


class TestParseOperator(unittest.TestCase):
    def test_hypergeometric_operator(self):
        op = parse_operator(LEGENDRE_TEXT)
        self.assertEqual(op, DiffOp((K.one, 8 * X - 4, 4 * X ** 2 - 4 * X)))
        self.assertEqual(op, ghdo_operator(GHDOParams(F(1, 2), F(1, 2), F(1))).normalized())

    def test_ore_product(self):
        # Dx*x = x*Dx + 1
        self.assertEqual(parse_operator("Dx*x"), DiffOp((K.one, X)))

    def test_content_is_removed(self):
        self.assertEqual(parse_operator("x^2*Dx^2 + x**1*Dx"), DiffOp((K.zero, K.one, X)))

    def test_example_operator(self):
        self.assertEqual(parse_operator(EXAMPLE_TEXT), example_operator().normalized())

    def test_parse_errors_are_invalid_input(self):
        self.assertTrue(issubclass(OperatorParseError, InvalidOperator))

    def test_rejected_inputs(self):
        for text in ("Dx^3", "x/Dx", "x +", "0*Dx", "", "x/0", "(x", "x^y"):
            with self.subTest(text=text):
                with self.assertRaises(OperatorParseError):
                    parse_operator(text)

    def test_unknown_character_position(self):
        with self.assertRaises(OperatorParseError) as ctx:
            parse_operator("x $ 1")
        self.assertEqual(ctx.exception.position, 2)
        self.assertIn("position 2", str(ctx.exception))

    def test_denominator_message(self):
        with self.assertRaises(OperatorParseError) as ctx:
            parse_operator("x/Dx")
        self.assertIn("Dx may not appear in a denominator", str(ctx.exception))


class TestTokenize(unittest.TestCase):
    def test_kinds(self):
        tokens = tokenize("Dx^2 + 3*x")
        self.assertEqual([t.kind for t in tokens], ["name", "op", "number", "op", "number", "op", "name", "end"])
        self.assertEqual(tokens[0].text, "Dx")

    def test_double_star_is_power(self):
        self.assertEqual(tokenize("x**2")[1].text, "^")


class TestRenderOperator(unittest.TestCase):
    def test_render(self):
        self.assertEqual(
            render_operator(parse_operator(LEGENDRE_TEXT)),
            "(4*x^2 - 4*x)*Dx^2 + (8*x - 4)*Dx + (1)",
        )

    def test_render_parses_back(self):
        op = example_operator().normalized()
        self.assertEqual(parse_operator(render_operator(op)), op)


if __name__ == "__main__":
    unittest.main()
