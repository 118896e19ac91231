"""
Integral Bases
Integral bases of second order regular singular operators, normalization at
infinity and the gauge-reduction driver on top of find_2f1.
"""

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from config.settings import Settings, SolveConfig
from core.diffop import DiffOp, GaugeOperator, Place, gauge_transform, inverse_gauge, singularities
from core.exact_arith import K, X, ResidueElem, rat_to_qq
from core.exceptions import InvalidOperator, NegativePowers, PrecisionExhausted, Unsupported
from core.frobenius import apply_local, local_solutions
from core.quotient_lift import HypSolution, SearchStats, certify_solution, find_2f1, validate_operator
from core.series import LogSeries
from utils.logger import setup_logger

logger = setup_logger(__name__)

INFINITY = Place.infinity()
ONE = DiffOp((K.one,))
DX = DiffOp((K.zero, K.one))
MAX_IMPROVEMENTS = 64


@dataclass(frozen=True)
class IntegralBasis:
    """Two operators b0 + b1*Dx generating the integral elements of Q(x)[Dx]/L."""

    elements: Tuple[DiffOp, DiffOp]
    normalized: bool = False

    def gauges(self) -> List[GaugeOperator]:
        return [GaugeOperator.from_operator(e) for e in self.elements]

    def __str__(self):
        return "[" + ", ".join(_render(e) for e in self.elements) + "]"


@dataclass(frozen=True)
class PoleProfile:
    """
    Pole orders at infinity of B_i(Y_j).

    orders[i][j] is minus the valuation of B_i(Y_j) in t = 1/x; m is the
    largest entry, found at `location`, and n the pole order of the other
    element on the same solution.
    """

    orders: Tuple[Tuple[Fraction, Fraction], Tuple[Fraction, Fraction]]
    m: Fraction
    location: Tuple[int, int]
    n: Fraction

    @property
    def total(self) -> Fraction:
        return sum((max(row) for row in self.orders), Fraction(0))

    def ranked(self) -> List[Tuple[int, int]]:
        """Entries by decreasing pole order."""
        cells = [(i, j) for i in range(2) for j in range(2)]
        return sorted(cells, key=lambda c: -self.orders[c[0]][c[1]])


def _render(op: DiffOp) -> str:
    b0, b1 = op.coefficient(0), op.coefficient(1)
    return f"({b1.as_expr()})*Dx + ({b0.as_expr()})"


def _as_polynomial(c):
    """Constant of a residue field (or Q) as a polynomial in x."""
    if isinstance(c, ResidueElem):
        return K(c.poly)
    return K(rat_to_qq(Fraction(c)))


def _valuation(image: LogSeries) -> Optional[Fraction]:
    return image.valuation()


def _min_valuation(images: Sequence[LogSeries]) -> Fraction:
    """Smallest valuation; zero images (to known order) count as their order."""
    values = []
    for image in images:
        v = _valuation(image)
        values.append(image.order if v is None else v)
    return min(values)


def _images(op: DiffOp, solutions, place: Place, precision: int) -> List[LogSeries]:
    return [apply_local(op, y, place, precision) for y in solutions]


def _improving_constant(gi: Sequence[LogSeries], gk: Sequence[LogSeries]):
    """
    c with every term of gi + c*gk below exponent 1 vanishing, or None.

    Each exponent below 1 gives one equation per log power.
    """
    equations = []
    for a_img, b_img in zip(gi, gk):
        exps = {e for e, _, _ in a_img.terms_below(1)} | {e for e, _, _ in b_img.terms_below(1)}
        for e in exps:
            a0, a1 = a_img.coefficient(e)
            b0, b1 = b_img.coefficient(e)
            equations.append((a0, b0))
            equations.append((a1, b1))
    c = None
    for a, b in equations:
        if b:
            c = -a / b
            break
    if c is None:
        c = 0
    for a, b in equations:
        if a + b * c:
            return None
    return c


def _improve_at(L: DiffOp, elements: Sequence[DiffOp], place: Place, precision: int) -> List[DiffOp]:
    """One pass of the local procedure on global elements; only powers of the uniformizer change."""
    basis = local_solutions(L, place, precision)
    solutions = basis.solutions
    pi = K(place.uniformizer())
    out = list(elements)
    for idx, element in enumerate(out):
        v = _min_valuation(_images(element, solutions, place, precision))
        if v < 0:
            out[idx] = element.scale(pi ** math.ceil(-v))
    for _ in range(MAX_IMPROVEMENTS):
        images = [_images(e, solutions, place, precision) for e in out]
        for i in (1, 0):
            k = 1 - i
            c = _improving_constant(images[i], images[k])
            if c is not None:
                out[i] = (out[i] + out[k].scale(_as_polynomial(c))).scale(1 / pi)
                logger.debug(f"improved element {i} at {place} with constant {c}")
                break
        else:
            return out
    logger.warning(f"integral basis at {place}: improvement limit reached")
    return out


def _with_retries(fn, precision: int, *args):
    for _ in range(Settings.MAX_PRECISION_RETRIES):
        try:
            return fn(*args, precision)
        except PrecisionExhausted as e:
            logger.debug(f"precision {precision} exhausted ({e}), retrying with {2 * precision}")
            precision *= 2
    raise PrecisionExhausted(f"local expansions still too short at precision {precision}")


def local_integral_basis(L: DiffOp, p: Place, a: int = Settings.INTBASIS_PRECISION) -> List[DiffOp]:
    """
    Integral basis at one finite place.

    Starting from [1, Dx] scaled by powers of the uniformizer t_p, an element
    E is replaced by (E + c*G)/t_p whenever a constant c makes every term of
    the combination on the formal solutions have exponent >= 1.

    Args:
        L: regular singular order 2 operator
        p: finite place (rational or algebraic)
        a: initial number of series terms

    Raises:
        Unsupported: irrational exponents at p
        PrecisionExhausted: series too short after all retries
    """
    if p.is_infinity:
        raise ValueError("local integral bases are taken at finite places")
    L = L.normalized()
    return _with_retries(lambda prec: _improve_at(L, [ONE, DX], p, prec), a)


def global_integral_basis(L: DiffOp, precision: int = Settings.INTBASIS_PRECISION) -> IntegralBasis:
    """
    Basis integral at every finite place.

    The local procedure runs place by place on the same pair of elements:
    dividing by one uniformizer and adding polynomial multiples keeps
    integrality everywhere else.
    """
    L = L.normalized()
    elements = [ONE, DX]
    for place in singularities(L):
        if place.is_infinity:
            continue
        current = list(elements)
        elements = _with_retries(lambda prec: _improve_at(L, current, place, prec), precision)
    basis = IntegralBasis(tuple(elements))
    logger.info(f"integral basis {basis}")
    return basis


def is_integral(L: DiffOp, element: DiffOp, place: Place, precision: int = Settings.INTBASIS_PRECISION) -> bool:
    """Valuation audit of one element on the formal solutions at a finite place."""
    solutions = local_solutions(L.normalized(), place, precision).solutions
    return _min_valuation(_images(element, solutions, place, precision)) >= 0


# ---------------------------------------------------------------------------
# Normalization at infinity
# ---------------------------------------------------------------------------

def pole_profile(L: DiffOp, elements: Sequence[DiffOp], precision: int = Settings.INTBASIS_PRECISION) -> PoleProfile:
    """
    Pole orders of both elements on both formal solutions at infinity.

    Raises:
        PrecisionExhausted: an image has no known nonzero term
    """
    solutions = local_solutions(L.normalized(), INFINITY, precision).solutions
    return _profile(_all_images(elements, solutions, precision))


def _all_images(elements, solutions, precision):
    return [_images(e, solutions, INFINITY, precision) for e in elements]


def _profile(images) -> PoleProfile:
    orders = []
    for row in images:
        entries = []
        for image in row:
            v = _valuation(image)
            if v is None:
                raise PrecisionExhausted("image at infinity has no known nonzero term")
            entries.append(-v)
        orders.append(tuple(entries))
    orders = tuple(orders)
    i, j = max(((i, j) for i in range(2) for j in range(2)), key=lambda c: orders[c[0]][c[1]])
    return PoleProfile(orders, orders[i][j], (i, j), orders[1 - i][j])


def _leading_ratio(a_img: LogSeries, b_img: LogSeries, ea: Fraction, eb: Fraction) -> Optional[Fraction]:
    a0, a1 = a_img.coefficient(ea)
    b0, b1 = b_img.coefficient(eb)
    if b1:
        c = a1 / b1
    elif b0 and not a1:
        c = a0 / b0
    else:
        return None
    if a0 != c * b0:
        return None
    return c


def _normalize(L: DiffOp, elements: List[DiffOp], precision: int) -> List[DiffOp]:
    solutions = local_solutions(L, INFINITY, precision).solutions
    elements = list(elements)
    for _ in range(MAX_IMPROVEMENTS):
        images = _all_images(elements, solutions, precision)
        profile = _profile(images)
        accepted = False
        for i, j in profile.ranked():
            k = 1 - i
            m, n = profile.orders[i][j], profile.orders[k][j]
            shift = m - n
            if shift < 0 or shift.denominator != 1:
                continue
            c = _leading_ratio(images[i][j], images[k][j], -m, -n)
            if not c:
                continue
            candidate = list(elements)
            candidate[i] = elements[i] - elements[k].scale(K(rat_to_qq(c)) * X ** int(shift))
            new_profile = _profile(_all_images(candidate, solutions, precision))
            if new_profile.total < profile.total:
                logger.debug(f"normalization: element {i} reduced, pole total {profile.total} -> {new_profile.total}")
                elements = candidate
                accepted = True
                break
        if not accepted:
            return elements
    logger.warning("normalization at infinity: iteration limit reached")
    return elements


def normalize_at_infinity(L: DiffOp, basis: IntegralBasis,
                          precision: int = Settings.INTBASIS_PRECISION) -> IntegralBasis:
    """
    Lower the pole orders at infinity by unimodular updates.

    While some entry of the pole profile can be cancelled by
    B_i - C*x^(m-n)*B_k without raising the total, apply the update.
    """
    L = L.normalized()
    elements = _with_retries(lambda prec: _normalize(L, list(basis.elements), prec), precision)
    result = IntegralBasis(tuple(elements), True)
    logger.info(f"normalized integral basis {result}")
    return result


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------

def hypergeometricsols(L_inp: DiffOp, a_fmax: int = Settings.AF_MAX, cfg: Optional[SolveConfig] = None,
                       stats: Optional[SearchStats] = None, direct: bool = True) -> List[HypSolution]:
    """
    find_2f1, followed by gauge reduction through a normalized integral basis.

    Each basis element with a Dx part is tried as a gauge transformation; a
    solution of the transformed operator is mapped back with the inverse gauge.

    Args:
        L_inp: irreducible regular singular operator of order 2
        a_fmax: largest algebraic degree of the pullback
        cfg: solver configuration
        stats: diagnostics accumulator
        direct: run find_2f1 on the input before trying gauge elements

    Returns:
        The first certified solution found (a list of at most one), empty
        when neither step succeeds
    """
    cfg = cfg or SolveConfig.from_settings()
    stats = stats if stats is not None else SearchStats()
    L = L_inp.normalized()
    validate_operator(L)
    if direct:
        try:
            solutions = find_2f1(L, a_fmax, cfg, stats, validate=False)
        except NegativePowers as e:
            logger.info(f"direct search skipped, trying gauge elements: {e}")
            solutions = []
        if solutions:
            return solutions
    basis = normalize_at_infinity(L, global_integral_basis(L))
    for element in basis.elements:
        if element.order < 1:
            continue
        gauge = GaugeOperator.from_operator(element)
        try:
            transformed = gauge_transform(L, gauge)
        except InvalidOperator as e:
            logger.warning(f"gauge element rejected: {e}")
            continue
        logger.info(f"trying gauge element {_render(element)}")
        try:
            found = find_2f1(transformed, a_fmax, cfg, stats, validate=False)
        except Unsupported as e:
            logger.warning(f"gauge element skipped: {e}")
            continue
        if not found:
            continue
        inverse = inverse_gauge(L, gauge)
        solution = replace(found[0], gauge=gauge, inverse=inverse)
        solution = replace(solution, certified=certify_solution(L, solution))
        if solution.certified:
            return [solution]
        logger.warning("gauge solution failed certification")
    logger.info("gauge reduction found no solution")
    return []
