"""
Local Solutions
Frobenius expansions at regular singular places (logarithmic case included),
singularity classification and the exponential solution search used to
reject reducible inputs.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from core.diffop import (
    DiffOp,
    Place,
    change_of_variables,
    exp_product,
    exponent_difference,
    indicial_exponents,
    indicial_polynomial,
    is_singular_at,
    singularities,
    theta_coefficients,
)
from core.exact_arith import (
    K,
    X,
    ResidueElem,
    nullspace,
    poly_coeffs,
    poly_from_coeffs,
    rat_to_qq,
    ratfun,
    ratfun_eval,
    to_rat,
)
from core.exceptions import InvalidOperator, Unsupported
from core.series import LogSeries, PuiseuxSeries, series_from_ratfun, zero_series
from config.settings import Settings
from utils.logger import setup_logger

logger = setup_logger(__name__)

SING_KINDS = ("regular", "false", "removable", "true-nonlog", "true-log")


@dataclass(frozen=True)
class FormalBasis:
    """
    Local solution basis at a place.

    When logarithmic, solutions[0] is the power-series member and
    solutions[1] = solutions[0]*log t + h with log coefficient 1 and no
    t^0 term in h/solutions[0]. Otherwise both have unit leading coefficient
    and are ordered by exponent.
    """

    place: Place
    solutions: Tuple[LogSeries, LogSeries]
    logarithmic: bool
    delta: Optional[Fraction]
    exponents: Tuple[Fraction, Fraction]

    @property
    def y1(self) -> LogSeries:
        return self.solutions[0]

    @property
    def y2(self) -> LogSeries:
        return self.solutions[1]


@dataclass(frozen=True)
class SingClass:
    """Classification of a place: regular, false, removable, true-nonlog or true-log."""

    place: Place
    delta: Optional[Fraction]
    kind: str

    @property
    def logarithmic(self) -> bool:
        return self.kind == "true-log"


# ---------------------------------------------------------------------------
# Frobenius recurrence in theta form: t^2 L = theta^2 + (q1 - 1) theta + q0
# ---------------------------------------------------------------------------

def _dense(series: PuiseuxSeries, n: int) -> list:
    coeffs = list(series.coeffs[:n])
    return coeffs + [series.zero] * (n - len(coeffs))


def _indicial_value(q0, q1, s):
    return s * (s - 1) + q1[0] * s + q0[0]


def _history(q0, q1, e, coeffs, n, zero):
    """sum_{k>=1} P_k(e+n-k) c_{n-k} with P_k(s) = q1_k s + q0_k."""
    acc = zero
    for k in range(1, n + 1):
        c = coeffs[n - k]
        if c and (q1[k] or q0[k]):
            s = e + n - k
            acc = acc + (q1[k] * s + q0[k]) * c
    return acc


def _power_solution(q0, q1, e, count, zero):
    """
    Coefficients c_0 = 1, c_1, ... of a pure power-series solution t^e sum c_n t^n.

    Returns:
        (coeffs, None), or (None, n) when the recurrence is obstructed at n
    """
    coeffs = [zero + 1]
    for n in range(1, count):
        rhs = _history(q0, q1, e, coeffs, n, zero)
        ind = _indicial_value(q0, q1, e + n)
        if not ind:
            if rhs:
                return None, n
            coeffs.append(zero)
            continue
        coeffs.append(-rhs / ind)
    return coeffs, None


def _log_companion(q0, q1, e1, e2, y1, count, zero):
    """
    (kappa, d) with kappa*y1*log t + t^e1 sum d_n t^n a solution.

    Uses Phi(y1*log t) = Phi'(theta)(y1) where Phi' = 2 theta - 1 + q1.
    """
    gap = int(e2 - e1)
    g = []
    for m in range(max(0, count - gap)):
        acc = (2 * (e2 + m) - 1 + q1[0]) * y1[m]
        for k in range(1, m + 1):
            if q1[k] and y1[m - k]:
                acc = acc + q1[k] * y1[m - k]
        g.append(acc)
    d = [zero] * count
    if gap == 0:
        kappa = zero + 1
    else:
        d[0] = zero + 1
        kappa = None
    for n in range(1, count):
        rhs = _history(q0, q1, e1, d, n, zero)
        if n == gap:
            kappa = -rhs / g[0]
            continue
        if n > gap:
            rhs = rhs + kappa * g[n - gap]
        d[n] = -rhs / _indicial_value(q0, q1, e1 + n)
    return kappa, d


def _rational_exponents(op: DiffOp, place: Place) -> Tuple[Fraction, Fraction, Optional[Fraction]]:
    delta = exponent_difference(op, place)
    if delta is None:
        raise Unsupported(f"irrational exponent difference at {place}")
    exps = indicial_exponents(op, place)
    values = []
    for e in exps:
        value = e.to_rational() if isinstance(e, ResidueElem) else e
        if not isinstance(value, Fraction):
            raise Unsupported(f"exponents at {place} are not rational")
        values.append(value)
    return values[0], values[1], delta


def local_solutions(op: DiffOp, place: Place, precision: int) -> FormalBasis:
    """
    Frobenius basis at any place with rational exponents.

    Args:
        op: order 2 operator over Q(x)
        place: rational, algebraic or infinite place
        precision: number of terms of each solution past its leading exponent

    Raises:
        InvalidOperator: irregular singularity or wrong order
        Unsupported: exponents not rational
    """
    if op.order != 2:
        raise InvalidOperator(f"formal solutions need order 2, got {op.order}")
    e1, e2, delta = _rational_exponents(op, place)
    gap = delta if delta.denominator == 1 else None
    count = precision + (int(gap) if gap is not None else 0) + 1
    qs = theta_coefficients(op, place, count)
    q0, q1 = _dense(qs[0], count), _dense(qs[1], count)
    zero = qs[0].zero

    high, _ = _power_solution(q0, q1, e2, count, zero)
    y_high = PuiseuxSeries(tuple(high), e2, 1, zero)
    if gap is None:
        low, _ = _power_solution(q0, q1, e1, count, zero)
        y_low = PuiseuxSeries(tuple(low), e1, 1, zero)
        solutions = (LogSeries.pure(y_low.truncate(e1 + precision), place),
                     LogSeries.pure(y_high.truncate(e2 + precision), place))
        return FormalBasis(place, solutions, False, delta, (e1, e2))

    low, obstruction = (None, 0) if gap == 0 else _power_solution(q0, q1, e1, count, zero)
    if obstruction is None:
        y_low = PuiseuxSeries(tuple(low), e1, 1, zero)
        solutions = (LogSeries.pure(y_low.truncate(e1 + precision), place),
                     LogSeries.pure(y_high.truncate(e2 + precision), place))
        return FormalBasis(place, solutions, False, delta, (e1, e2))

    kappa, d = _log_companion(q0, q1, e1, e2, high, count, zero)
    h = PuiseuxSeries(tuple(d), e1, 1, zero).scale(1 / kappa)
    ratio = h / y_high
    if ratio.order > 0:
        h = h - y_high.scale(ratio.coefficient(0))
    bound = e1 + precision
    log_solution = LogSeries(e1, h.truncate(bound), y_high.truncate(bound), place)
    base = LogSeries.pure(y_high.truncate(e2 + precision), place)
    return FormalBasis(place, (base, log_solution), True, delta, (e1, e2))


def formal_solutions(op: DiffOp, place: Place, precision: int) -> FormalBasis:
    """
    Frobenius basis at a rational place or infinity.

    Raises:
        Unsupported: algebraic place or irrational exponents
        InvalidOperator: irregular singularity
    """
    if place.is_algebraic:
        raise Unsupported(f"expansion at algebraic place {place} is not supported")
    return local_solutions(op, place, precision)


def _has_log(op: DiffOp, place: Place, delta: Fraction) -> bool:
    """Log test for an integer exponent difference, valid in any residue field."""
    gap = int(delta)
    if gap == 0:
        return True
    qs = theta_coefficients(op, place, gap + 1)
    zero = qs[0].zero
    q0, q1 = _dense(qs[0], gap + 1), _dense(qs[1], gap + 1)
    _, c1, _ = indicial_polynomial(op, place)
    e1 = (-c1 - delta) / 2
    _, obstruction = _power_solution(q0, q1, e1, gap + 1, zero)
    return obstruction is not None


def classify_singularity(op: DiffOp, place: Place) -> SingClass:
    """Regular, false, removable, true-nonlog or true-log at the place."""
    if not is_singular_at(op, place):
        return SingClass(place, Fraction(1), "regular")
    delta = exponent_difference(op, place)
    if delta is None or delta.denominator != 1:
        return SingClass(place, delta, "true-nonlog")
    if _has_log(op, place, delta):
        return SingClass(place, delta, "true-log")
    return SingClass(place, delta, "false" if delta == 1 else "removable")


def classify_singularities(op: DiffOp) -> List[SingClass]:
    """Classification of every singular place, in singularity order."""
    return [classify_singularity(op, p) for p in singularities(op)]


def is_regular_singular(op: DiffOp) -> bool:
    """True iff every singular place, infinity included, is regular singular."""
    for place in singularities(op):
        try:
            theta_coefficients(op, place, 1)
        except InvalidOperator:
            logger.debug(f"irregular singularity at {place}")
            return False
    return True


def move_point_to_zero(op: DiffOp, place: Place) -> DiffOp:
    """Moebius change x -> x + p (or x -> 1/x) putting the place at 0."""
    if place.is_algebraic:
        raise Unsupported(f"cannot move algebraic place {place} to 0 over Q")
    if place.is_infinity:
        return change_of_variables(op, 1 / X)
    if place.point == 0:
        return op.normalized()
    return change_of_variables(op, X + K(rat_to_qq(place.point)))


# ---------------------------------------------------------------------------
# Local evaluation of operators on log series
# ---------------------------------------------------------------------------

def local_expansion(f, place: Place, precision: int) -> PuiseuxSeries:
    """Laurent expansion of a rational function in the local parameter of a place."""
    f = ratfun(f)
    if place.is_infinity:
        return series_from_ratfun(ratfun_eval(f, 1 / X), precision, 0)
    if place.is_rational:
        return series_from_ratfun(f, precision, place.point)
    return series_from_ratfun(f, precision, place.residue_field().root)


def x_derivative(y: LogSeries, place: Place) -> LogSeries:
    """d/dx of a local series; at infinity d/dx = -t^2 d/dt."""
    dy = y.derivative()
    if place.is_infinity:
        return dy.scale(-1).shift(2)
    return dy


def apply_local(op: DiffOp, y: LogSeries, place: Place, precision: int) -> LogSeries:
    """op(y) computed in the local parameter of the place."""
    result = None
    deriv = y
    for i, a in enumerate(op.coeffs):
        if i:
            deriv = x_derivative(deriv, place)
        if not a:
            continue
        term = deriv.mul_series(local_expansion(a, place, precision))
        result = term if result is None else result + term
    if result is None:
        return LogSeries(y.exponent, zero_series(y.order, y.part0.zero), zero_series(y.order, y.part0.zero), place)
    return result


# ---------------------------------------------------------------------------
# Exponential solutions
# ---------------------------------------------------------------------------

def _exponent_term(place: Place, e):
    """(sum over the place's roots of e/(x - root), sum of e) for one exponent choice."""
    if place.is_rational:
        return K(rat_to_qq(e)) / place.local_parameter(), to_rat(e)
    m = place.minpoly
    numer = (e.poly * m.diff(m.ring.gens[0])).rem(m)
    d = m.degree()
    trace = to_rat(numer.coeff(m.ring.gens[0] ** (d - 1))) if numer else Fraction(0)
    return K(numer) / K(m), trace


def _polynomial_solution(op: DiffOp, degree: int):
    """A nonzero polynomial of degree <= degree annihilated by op, or None."""
    images = []
    for j in range(degree + 1):
        value = op.apply(X ** j)
        scale = to_rat(value.denom.LC)
        if value.denom.degree() > 0:
            raise ValueError("operator coefficients must be polynomial")
        images.append([c / scale for c in poly_coeffs(value.numer)])
    rows_needed = max((len(im) for im in images), default=0)
    rows = [[im[r] if r < len(im) else Fraction(0) for im in images] for r in range(rows_needed)]
    if not rows:
        return poly_from_coeffs([Fraction(1)])
    kernel = nullspace(rows, degree + 1, Fraction(0), Fraction(1))
    if not kernel:
        return None
    return poly_from_coeffs(kernel[0])


def exp_solutions(op: DiffOp) -> List:
    """
    Logarithmic derivatives r in Q(x) of the hyperexponential solutions of op.

    Each finite singular place contributes one of its exponents, infinity
    bounds the degree of the remaining polynomial factor, which is found by
    linear algebra. A nonempty result means op has a first order right factor.
    """
    places = singularities(op)
    finite = [p for p in places if not p.is_infinity]
    if len(finite) > Settings.EXP_SOLUTION_MAX_PLACES:
        logger.warning(f"exponential solution search skipped: {len(finite)} singular places")
        return []
    options = []
    for place in finite:
        choices = []
        try:
            exps = indicial_exponents(op, place)
        except Unsupported as e:
            logger.warning(f"exponential solution search skipped at {place}: {e}")
            return []
        for e in exps:
            if isinstance(e, (Fraction, ResidueElem)):
                term = _exponent_term(place, e)
                if term not in choices:
                    choices.append(term)
        if not choices:
            return []
        options.append(choices)
    inf_exps = [e for e in indicial_exponents(op, Place.infinity()) if isinstance(e, Fraction)]
    found = []
    for combo in itertools.product(*options):
        r_u = K.zero
        total = Fraction(0)
        for contribution, trace in combo:
            r_u = r_u + contribution
            total += trace
        for e_inf in inf_exps:
            degree = -e_inf - total
            if degree.denominator != 1 or degree < 0 or degree > Settings.EXP_SOLUTION_MAX_DEGREE:
                continue
            poly = _polynomial_solution(exp_product(op, -r_u), int(degree))
            if poly is None:
                continue
            r = r_u + K(poly.diff(poly.ring.gens[0])) / K(poly)
            if r not in found:
                logger.debug(f"exponential solution with log derivative {r.as_expr()}")
                found.append(r)
    return found
