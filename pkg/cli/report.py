"""
Solve Reports
Serialization of solutions to the stable JSON schema, the reverse mapping and
human-readable rendering.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from sympy import Add, Mul, Poly, Symbol, integrate, log, sympify

from config.settings import Settings
from core.candidates import GHDOParams
from core.diffop import GaugeOperator
from core.exact_arith import (
    QuadExtElem,
    QuadraticExtension,
    X_SYMBOL,
    minpoly_to_poly,
    ratfun,
    ratfun_to_str,
    to_rat,
)
from core.quotient_lift import HypSolution
from utils.logger import setup_logger

logger = setup_logger(__name__)

Y_SYMBOL = Symbol("y")
STATUSES = tuple(Settings.EXIT_CODES)


@dataclass
class SolveReport:
    """Outcome of one solve: status, serialized solutions and diagnostics."""

    status: str
    solutions: List[dict] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    operator: Optional[str] = None
    rendered: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @classmethod
    def from_solutions(cls, solutions: List[HypSolution], diagnostics: dict, operator: str = None) -> "SolveReport":
        certified = [s for s in solutions if s.certified]
        status = "solved" if certified else "no-solution-found"
        return cls(
            status,
            [solution_to_json(s) for s in certified],
            diagnostics,
            operator,
            [render_solution(s) for s in certified],
        )

    @classmethod
    def failure(cls, status: str, message: str, operator: str = None, diagnostics: dict = None) -> "SolveReport":
        diagnostics = dict(diagnostics or {})
        diagnostics["error"] = message
        return cls(status, [], diagnostics, operator)

    @property
    def exit_code(self) -> int:
        return Settings.EXIT_CODES[self.status]

    def to_dict(self) -> dict:
        return {"status": self.status, "solutions": self.solutions, "diagnostics": self.diagnostics}

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)

    def render_text(self) -> str:
        lines = [f"status: {self.status}"]
        if self.operator:
            lines.insert(0, f"operator: {self.operator}")
        for k, text in enumerate(self.rendered, 1):
            lines.append(f"solution {k}:")
            lines.extend(f"  {line}" for line in text.splitlines())
        if self.diagnostics:
            shown = ", ".join(f"{k}={v}" for k, v in self.diagnostics.items())
            lines.append(f"diagnostics: {shown}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def _text(value) -> str:
    return ratfun_to_str(value)


def _parse_expr(text: str):
    return sympify(text.replace("^", "**"), locals={"x": X_SYMBOL, "y": Y_SYMBOL})


def _minpoly_text(coeffs) -> str:
    return str(minpoly_to_poly(coeffs).as_expr()).replace("**", "^")


def solution_to_json(solution: HypSolution) -> dict:
    """One solution in the stable schema; every value is an exact string."""
    if solution.algebraic:
        pullback = {"type": "algebraic", "minpoly": _minpoly_text(solution.minpoly)}
    else:
        pullback = {"type": "rational", "expr": _text(solution.pullback)}
    gauge = None
    if solution.gauge is not None:
        gauge = {"r0": _text(solution.gauge.r0), "r1": _text(solution.gauge.r1)}
    data = {
        "params": [str(p) for p in solution.params.as_list()],
        "pullback": pullback,
        "r": _text(solution.r),
        "gauge": gauge,
        "a_f": solution.a_f,
        "d_f": solution.d_f,
        "certified": solution.certified,
    }
    if solution.branch:
        data["branch"] = {k: str(v) for k, v in solution.branch.items()}
    return data


def _minpoly_from_text(text: str) -> List:
    poly = Poly(_parse_expr(text), Y_SYMBOL)
    coeffs = list(reversed(poly.all_coeffs()))
    return [ratfun(c) for c in coeffs]


def solution_from_json(data: dict) -> HypSolution:
    """
    Rebuild a HypSolution from its JSON form.

    The result is uncertified; pass it to certify_solution together with the
    parsed operator.
    """
    params = GHDOParams(*(to_rat(Fraction(p)) for p in data["params"]))
    pullback = data["pullback"]
    minpoly = None
    if pullback["type"] == "algebraic":
        minpoly = tuple(_minpoly_from_text(pullback["minpoly"]))
        ext = QuadraticExtension.from_minpoly(minpoly)
        f = ext.gen
        r_expr = _parse_expr(data["r"])
        r = QuadExtElem(ratfun(r_expr.subs(Y_SYMBOL, 0)), ratfun(r_expr.diff(Y_SYMBOL)), ext)
    else:
        f = ratfun(pullback["expr"])
        r = ratfun(data["r"])
    gauge = inverse = None
    if data.get("gauge"):
        gauge = GaugeOperator(ratfun(data["gauge"]["r0"]), ratfun(data["gauge"]["r1"]))
    return HypSolution(
        params, f, r, int(data.get("a_f", 2 if minpoly else 1)), int(data.get("d_f", 0)),
        minpoly=minpoly, gauge=gauge, inverse=inverse,
    )


# ---------------------------------------------------------------------------
# Text rendering
# ---------------------------------------------------------------------------

def _pow_text(expr) -> str:
    return str(expr).replace("**", "^")


def render_prefactor(r) -> str:
    """
    exp(int r dx) as a product of powers when r is a sum of logarithmic
    derivatives with rational weights, else in integral form.
    """
    if isinstance(r, QuadExtElem):
        return f"exp(int({r.to_str()}, x))" if r else ""
    r = ratfun(r)
    if not r:
        return ""
    antiderivative = integrate(r.as_expr(), X_SYMBOL)
    factors = []
    for term in Add.make_args(antiderivative):
        coeff, rest = term.as_coeff_Mul()
        if not isinstance(rest, log) or not coeff.is_Rational:
            return f"exp(int({_text(r)}, x))"
        factors.append(rest.args[0] ** coeff)
    return _pow_text(Mul(*factors))


def _hyp_text(params: GHDOParams, arg: str) -> str:
    return f"2F1({params.a1}, {params.a2}; {params.b1}; {arg})"


def render_derivative(params: GHDOParams, arg: str) -> str:
    """2F1' as (a1*a2/b1)*2F1(a1+1, a2+1; b1+1; f)."""
    if not params.b1:
        return f"2F1'({params.a1}, {params.a2}; {params.b1}; {arg})"
    factor = params.a1 * params.a2 / params.b1
    return f"({factor})*{_hyp_text(params.derivative_params(), arg)}"


def render_solution(solution: HypSolution) -> str:
    """Text form of exp(int r)*(r0*2F1(f) + r1*2F1'(f)) with a description of f."""
    if solution.algebraic:
        arg = "y"
        where = f"where y = f(x) is a root of {_minpoly_text(solution.minpoly)}"
    else:
        arg = _text(solution.pullback)
        where = None
    prefactor = render_prefactor(solution.r)
    if solution.inverse is None:
        body = _hyp_text(solution.params, arg)
    else:
        r0, r1 = solution.form2_coefficients()
        terms = []
        if r0:
            terms.append(f"({_text(r0)})*{_hyp_text(solution.params, arg)}")
        if r1:
            terms.append(f"({_text(r1)})*{render_derivative(solution.params, arg)}")
        body = " + ".join(terms) or "0"
        if prefactor:
            body = f"({body})"
    lines = [f"y(x) = {prefactor} * {body}" if prefactor else f"y(x) = {body}"]
    if where:
        lines.append(where)
    if solution.gauge is not None:
        lines.append(f"gauge: ({_text(solution.gauge.r1)})*Dx + ({_text(solution.gauge.r0)})")
    lines.append(f"certified: {'yes' if solution.certified else 'no'}")
    return "\n".join(lines)
