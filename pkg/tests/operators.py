"""
Test Operators
Operators with known hypergeometric solutions shared by the test modules.
"""

from fractions import Fraction

from core.candidates import GHDOParams
from core.diffop import DiffOp
from core.exact_arith import ratfun

# 2F1(5/42, 11/42; 2/3; 4x/(x+1)^2) times (x+1)^(-5/21)
EXAMPLE_PARAMS = GHDOParams(Fraction(5, 42), Fraction(11, 42), Fraction(2, 3))
EXAMPLE_PULLBACK = "4*x/(x+1)^2"
EXAMPLE_R = "-5/(21*(x+1))"
EXAMPLE_TEXT = "147*x*(x-1)*(x+1)*Dx^2 + (266*x^2 - 42*x - 98)*Dx + 20*x - 5"

# 2F1(1/2, 1/2; 1; 16x^2) solves the gauge target; the input needs a gauge
GAUGE_PARAMS = GHDOParams(Fraction(1, 2), Fraction(1, 2), Fraction(1))
GAUGE_PULLBACK = "16*x^2"


def example_operator() -> DiffOp:
    return DiffOp((
        ratfun("20*x - 5"),
        ratfun("266*x^2 - 42*x - 98"),
        ratfun("147*x*(x-1)*(x+1)"),
    ))


def gauge_target_operator() -> DiffOp:
    return DiffOp((
        ratfun("16/(16*x^2 - 1)"),
        ratfun("(48*x^2 - 1)/(x*(16*x^2 - 1))"),
        ratfun(1),
    ))


def gauge_input_operator() -> DiffOp:
    common = "(4*x - 1)*(4*x + 1)*(16*x^3 + 24*x^2 + 5*x + 1)"
    return DiffOp((
        ratfun(f"(512*x^5 + 64*x^4 - 128*x^3 - 60*x^2 - 8*x - 1)/(x^2*{common})"),
        ratfun(f"-(512*x^5 + 384*x^4 - 64*x^3 - 88*x^2 - 10*x - 1)/(x*{common})"),
        ratfun(1),
    ))


# 2F1(1/3, 2/3; 1; f) with f a root of C*y^2 - A*y + (A^2 - B^2*D)/(4*C)
ALGEBRAIC_PARAMS = GHDOParams(Fraction(1, 3), Fraction(2, 3), Fraction(1))
ALGEBRAIC_PULLBACK_PARTS = {
    "A": "1 + 30*x - 24*x^2 + x^3",
    "B": "x^2 - 7*x + 1",
    "D": "x^2 - 34*x + 1",
    "C": "(1 + x)^3",
}


def algebraic_operator() -> DiffOp:
    return DiffOp((
        ratfun("(x^4 - 44*x^3 + 1206*x^2 - 44*x + 1)/(4*(x^2 - 34*x + 1)^2*x^2)"),
        ratfun(0),
        ratfun(1),
    ))


def algebraic_pullback_minpoly():
    """(p, q) of y^2 + p*y + q, the monic minimal polynomial of the pullback."""
    a, b, d, c = (ratfun(ALGEBRAIC_PULLBACK_PARTS[k]) for k in "ABDC")
    return -a / c, (a * a - b * b * d) / (4 * c * c)
