"""
Differential Operators
The Ore algebra Q(x)[Dx] (and its quadratic extensions), the three solution
preserving transformations, singular places and indicial exponents.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from sympy import sqrt as sym_sqrt, Rational as SymRational
from sympy.polys.rings import PolyElement

from core.exact_arith import (
    QX,
    K,
    R,
    X,
    QuadExtElem,
    ResidueElem,
    ResidueField,
    height,
    nullspace,
    poly_coeffs,
    poly_degree,
    poly_eval,
    rat_gcd,
    rat_to_qq,
    rational_sqrt,
    ratfun,
    ratfun_eval,
    to_rat,
)
from core.exceptions import InvalidOperator, Unsupported
from core.series import PuiseuxSeries, series_from_ratfun
from utils.logger import setup_logger

logger = setup_logger(__name__)


# ---------------------------------------------------------------------------
# Places
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Place:
    """
    A point of the projective line over Q.

    kind is "rational" (point p), "infinity", or "algebraic" (all roots of an
    irreducible minpoly of degree >= 2 at once).
    """

    kind: str
    point: Optional[Fraction] = None
    minpoly: Optional[PolyElement] = None

    @classmethod
    def rational(cls, p) -> "Place":
        return cls("rational", to_rat(p))

    @classmethod
    def infinity(cls) -> "Place":
        return cls("infinity")

    @classmethod
    def from_factor(cls, factor: PolyElement) -> "Place":
        """Place of the roots of an irreducible factor of Q[x]."""
        factor = factor.monic()
        if poly_degree(factor) == 1:
            c0, _ = poly_coeffs(factor)
            return cls.rational(-c0)
        if poly_degree(factor) < 1:
            raise ValueError("constant polynomial has no roots")
        return cls("algebraic", None, factor)

    @property
    def is_rational(self) -> bool:
        return self.kind == "rational"

    @property
    def is_infinity(self) -> bool:
        return self.kind == "infinity"

    @property
    def is_algebraic(self) -> bool:
        return self.kind == "algebraic"

    @property
    def degree(self) -> int:
        """Number of geometric points represented."""
        return poly_degree(self.minpoly) if self.is_algebraic else 1

    def local_parameter(self):
        """t_p = x - p, 1/x at infinity, the minimal polynomial at algebraic places."""
        if self.is_infinity:
            return 1 / X
        if self.is_rational:
            return X - K(rat_to_qq(self.point))
        return K(self.minpoly)

    def uniformizer(self) -> PolyElement:
        """Irreducible polynomial vanishing at a finite place."""
        if self.is_infinity:
            raise ValueError("infinity has no polynomial uniformizer")
        if self.is_rational:
            return R.gens[0] - rat_to_qq(self.point)
        return self.minpoly

    def residue_field(self) -> ResidueField:
        if not self.is_algebraic:
            raise ValueError("only algebraic places carry a residue field")
        return ResidueField(self.minpoly)

    def sort_key(self):
        if self.is_rational:
            return (0, height(self.point), self.point < 0, abs(self.point))
        if self.is_algebraic:
            return (1, self.degree, str(self.minpoly.as_expr()))
        return (2,)

    def label(self) -> str:
        if self.is_infinity:
            return "infinity"
        if self.is_rational:
            return str(self.point)
        return f"RootOf({str(self.minpoly.as_expr()).replace('**', '^')})"

    def __str__(self):
        return self.label()


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiffOp:
    """
    sum coeffs[i] * Dx^i with coefficients in a differential field.

    Trailing zero coefficients are dropped, so coeffs[-1] is the leading
    coefficient; the zero operator has no coefficients and order -1.
    """

    coeffs: Tuple
    domain: object = QX

    def __post_init__(self):
        coeffs = [self.domain.convert(c) for c in self.coeffs]
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def dx(cls, domain=QX) -> "DiffOp":
        return cls((domain.zero, domain.one), domain)

    @classmethod
    def scalar(cls, value, domain=QX) -> "DiffOp":
        return cls((value,), domain)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def zero(self):
        return self.domain.zero

    def coefficient(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.domain.zero

    def leading_coefficient(self):
        if not self.coeffs:
            raise ZeroDivisionError("zero operator")
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return not self.coeffs

    def over(self, domain) -> "DiffOp":
        """Same operator with coefficients coerced into another domain."""
        return DiffOp(tuple(domain.convert(c) for c in self.coeffs), domain)

    # -- ring structure -----------------------------------------------------

    def __add__(self, other: "DiffOp") -> "DiffOp":
        n = max(len(self.coeffs), len(other.coeffs))
        return DiffOp(tuple(self.coefficient(i) + other.coefficient(i) for i in range(n)), self.domain)

    def __neg__(self) -> "DiffOp":
        return DiffOp(tuple(-c for c in self.coeffs), self.domain)

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-other)

    def __mul__(self, other: "DiffOp") -> "DiffOp":
        return op_mul(self, other)

    def scale(self, c) -> "DiffOp":
        """Left multiplication by a coefficient."""
        c = self.domain.convert(c)
        return DiffOp(tuple(c * a for a in self.coeffs), self.domain)

    def shift(self, k: int) -> "DiffOp":
        """Right multiplication by Dx^k."""
        return DiffOp((self.domain.zero,) * k + self.coeffs, self.domain)

    # -- normal forms -------------------------------------------------------

    def monic(self) -> "DiffOp":
        return self.scale(1 / self.leading_coefficient())

    def normalized(self) -> "DiffOp":
        """
        Representative with polynomial coefficients of gcd 1, positive leading
        coefficient and integer content 1 (monic outside Q(x)).
        """
        if self.is_zero() or self.domain != QX:
            return self if self.is_zero() else self.monic()
        common = R.one
        for c in self.coeffs:
            if c:
                common = common.lcm(c.denom)
        polys = [c.numer * common.exquo(c.denom) if c else R.zero for c in self.coeffs]
        g = R.zero
        for p in polys:
            if p:
                g = p if not g else g.gcd(p)
        polys = [p.exquo(g) if p else p for p in polys]
        content = rat_gcd([c for p in polys for c in poly_coeffs(p)])
        if polys[-1].LC < 0:
            content = -content
        polys = [p.quo_ground(rat_to_qq(content)) for p in polys]
        return DiffOp(tuple(K(p) for p in polys), QX)

    def equivalent(self, other: "DiffOp") -> bool:
        """Equality up to left multiplication by a nonzero coefficient."""
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        if self.domain != other.domain:
            other = other.over(self.domain)
        return self.monic().coeffs == other.monic().coeffs

    # -- action on functions ------------------------------------------------

    def apply(self, f):
        """L(f) = sum A_i f^(i) for f in the coefficient domain."""
        f = self.domain.convert(f)
        total = self.domain.zero
        for a in self.coeffs:
            if a:
                total = total + a * f
            f = self.domain.diff(f)
        return total

    def __repr__(self):
        terms = [f"({c})*Dx^{i}" for i, c in enumerate(self.coeffs) if c]
        return f"DiffOp({' + '.join(reversed(terms)) or '0'})"


@dataclass(frozen=True)
class GaugeOperator:
    """G = r1*Dx + r0, acting by y -> r0*y + r1*y'."""

    r0: object
    r1: object

    def __post_init__(self):
        object.__setattr__(self, "r0", ratfun(self.r0))
        object.__setattr__(self, "r1", ratfun(self.r1))
        if not self.r0 and not self.r1:
            raise ValueError("gauge operator must be nonzero")

    @classmethod
    def identity(cls) -> "GaugeOperator":
        return cls(1, 0)

    @classmethod
    def from_operator(cls, op: DiffOp) -> "GaugeOperator":
        if op.order > 1:
            raise ValueError(f"gauge operator must have order <= 1, got {op.order}")
        return cls(op.coefficient(0), op.coefficient(1))

    @property
    def is_identity(self) -> bool:
        return not self.r1 and self.r0 == K.one

    def as_operator(self, domain=QX) -> DiffOp:
        return DiffOp((self.r0, self.r1), QX).over(domain)

    def apply(self, y):
        return self.as_operator().apply(y)


# ---------------------------------------------------------------------------
# Ore ring operations
# ---------------------------------------------------------------------------

def op_mul(left: DiffOp, right: DiffOp) -> DiffOp:
    """Product in the Ore ring with Dx*a = a*Dx + a'."""
    domain = left.domain
    if right.domain != domain:
        right = right.over(domain)
    if left.is_zero() or right.is_zero():
        return DiffOp((), domain)
    out = [domain.zero] * (left.order + right.order + 1)
    # derivatives[k][j] = k-th derivative of right.coeffs[j]
    derivatives = [list(right.coeffs)]
    for _ in range(left.order):
        derivatives.append([domain.diff(b) for b in derivatives[-1]])
    for i, a in enumerate(left.coeffs):
        if not a:
            continue
        for k in range(i + 1):
            binom = math.comb(i, k)
            for j, b in enumerate(derivatives[k]):
                if b:
                    out[i - k + j] = out[i - k + j] + a * b * binom
    return DiffOp(tuple(out), domain)


def right_divide(a: DiffOp, b: DiffOp) -> Tuple[DiffOp, DiffOp]:
    """
    Right Euclidean division.

    Returns:
        (Q, R) with a = Q*b + R and ord R < ord b
    """
    if b.is_zero():
        raise ZeroDivisionError("right division by the zero operator")
    domain = a.domain
    lead_inv = 1 / b.leading_coefficient()
    quotient = DiffOp((), domain)
    rem = a
    while not rem.is_zero() and rem.order >= b.order:
        k = rem.order - b.order
        term = DiffOp.scalar(rem.leading_coefficient() * lead_inv, domain).shift(k)
        quotient = quotient + term
        rem = rem - op_mul(term, b)
    return quotient, rem


def lclm(a: DiffOp, b: DiffOp) -> DiffOp:
    """
    Least common left multiple (monic).

    Remainders of Dx^i modulo a and b are stacked until they become linearly
    dependent over the coefficient field; the dependency is the lclm.
    """
    domain = a.domain
    if b.domain != domain:
        b = b.over(domain)
    d = DiffOp.dx(domain)
    rem_a = DiffOp.scalar(domain.one, domain)
    rem_b = DiffOp.scalar(domain.one, domain)
    rem_a = right_divide(rem_a, a)[1]
    rem_b = right_divide(rem_b, b)[1]
    vectors = []
    for k in range(a.order + b.order + 1):
        vectors.append(
            [rem_a.coefficient(i) for i in range(a.order)] + [rem_b.coefficient(i) for i in range(b.order)]
        )
        if k >= max(a.order, b.order):
            rows = [[vec[r] for vec in vectors] for r in range(a.order + b.order)]
            kernel = nullspace(rows, k + 1, domain.zero, domain.one)
            if kernel:
                return DiffOp(tuple(kernel[0]), domain).monic()
        rem_a = right_divide(op_mul(d, rem_a), a)[1]
        rem_b = right_divide(op_mul(d, rem_b), b)[1]
    raise ArithmeticError("no left common multiple found within order bound")


# ---------------------------------------------------------------------------
# Transformations
# ---------------------------------------------------------------------------

def _target_domain(value):
    if isinstance(value, QuadExtElem):
        return value.ext, value
    return QX, ratfun(value)


def change_of_variables(op: DiffOp, f) -> DiffOp:
    """
    Operator annihilating y(f) for every solution y of op.

    Args:
        op: operator over Q(x)
        f: nonconstant pullback, rational or in a quadratic extension

    Returns:
        sum A_i(f) ((1/f') Dx)^i, normalized
    """
    if op.domain != QX:
        raise ValueError("change of variables needs an operator over Q(x)")
    domain, f = _target_domain(f)
    fprime = domain.diff(f)
    if not fprime:
        raise ValueError("pullback must be nonconstant")
    step = DiffOp((domain.zero, 1 / fprime), domain)
    power = DiffOp.scalar(domain.one, domain)
    result = DiffOp((), domain)
    for i, a in enumerate(op.coeffs):
        if i:
            power = op_mul(power, step)
        if a:
            result = result + power.scale(ratfun_eval(a, f))
    return result.normalized()


def exp_product(op: DiffOp, r) -> DiffOp:
    """Operator annihilating exp(int r)*y for solutions y of op (Dx -> Dx - r)."""
    domain, r = _target_domain(r)
    if domain == QX:
        domain = op.domain
    op = op.over(domain)
    step = DiffOp((-domain.convert(r), domain.one), domain)
    power = DiffOp.scalar(domain.one, domain)
    result = DiffOp((), domain)
    for i, a in enumerate(op.coeffs):
        if i:
            power = op_mul(power, step)
        if a:
            result = result + power.scale(a)
    return result.normalized()


def gauge_transform(op: DiffOp, gauge: GaugeOperator) -> DiffOp:
    """
    Operator whose solutions are G(y), y a solution of op.

    Raises:
        InvalidOperator: G right-divides op, so op is reducible
    """
    g = gauge.as_operator(op.domain)
    if g.order >= 1 and right_divide(op, g)[1].is_zero():
        raise InvalidOperator("gauge operator is a right factor of the operator")
    multiple = lclm(op, g)
    quotient, rem = right_divide(multiple, g)
    if not rem.is_zero():
        raise ArithmeticError("lclm is not right-divisible by the gauge operator")
    return quotient.normalized()


def inverse_gauge(op: DiffOp, gauge: GaugeOperator) -> GaugeOperator:
    """
    H with H(G(y)) = y on the solutions of op.

    Extended right Euclid on (op, G): every remainder r_i satisfies
    r_i = s_i*G modulo left multiples of op; the last nonzero remainder has
    order 0 when the right gcd is trivial. H acts on solutions of the
    transformed operator, so it is reduced modulo gauge_transform(op, G).

    Raises:
        InvalidOperator: op and G share a nontrivial right factor
    """
    domain = op.domain
    g = gauge.as_operator(domain)
    if g.order >= op.order:
        g = right_divide(g, op)[1]
    prev_r, cur_r = op, g
    prev_s, cur_s = DiffOp((), domain), DiffOp.scalar(domain.one, domain)
    while not cur_r.is_zero() and cur_r.order > 0:
        quotient, rem = right_divide(prev_r, cur_r)
        prev_r, cur_r = cur_r, rem
        prev_s, cur_s = cur_s, prev_s - op_mul(quotient, cur_s)
    if cur_r.is_zero():
        raise InvalidOperator("gauge operator shares a right factor with the operator")
    inverse = cur_s.scale(1 / cur_r.coeffs[0])
    if inverse.order >= op.order:
        inverse = right_divide(inverse, gauge_transform(op, gauge).over(domain))[1]
    return GaugeOperator.from_operator(inverse)


# ---------------------------------------------------------------------------
# Local data
# ---------------------------------------------------------------------------

def local_operator(op: DiffOp, place: Place) -> Tuple[DiffOp, object]:
    """
    Operator and base point such that the place sits at t = x - point.

    Infinity is moved to 0 by x -> 1/x; algebraic places use the generic root
    of their residue field.
    """
    if place.is_infinity:
        return change_of_variables(op, 1 / X), Fraction(0)
    if place.is_rational:
        return op, place.point
    return op, place.residue_field().root


def is_singular_at(op: DiffOp, place: Place) -> bool:
    """True when some A_i/A_n has a pole at the place."""
    local, point = local_operator(op, place)
    monic = local.monic()
    for a in monic.coeffs[:-1]:
        if not a:
            continue
        if place.is_algebraic:
            if not a.denom.rem(place.minpoly):
                return True
        elif poly_eval(a.denom, point) == 0:
            return True
    return False


def theta_coefficients(op: DiffOp, place: Place, precision: int) -> List[PuiseuxSeries]:
    """
    Local expansions q_i = t^(n-i) a_i of the monic operator, i = 0..n.

    Args:
        op: operator over Q(x)
        place: rational, algebraic or infinite place
        precision: absolute order to which every q_i is returned

    Raises:
        InvalidOperator: some q_i has a pole (irregular singularity)
    """
    local, point = local_operator(op, place)
    monic = local.monic()
    n = monic.order
    out = []
    for i, a in enumerate(monic.coeffs):
        s = series_from_ratfun(a, precision + n + 1, point)
        v = s.valuation()
        if v is not None and v < -(n - i):
            raise InvalidOperator(f"irregular singularity at {place}")
        out.append(s.shift(n - i).as_power_series().truncate(precision))
    return out


def indicial_polynomial(op: DiffOp, place: Place) -> List:
    """Coefficients (low to high) of the indicial polynomial sum q_i(0) [s]_i."""
    qs = theta_coefficients(op, place, 1)
    n = len(qs) - 1
    zero = qs[0].zero
    out = [zero] * (n + 1)
    falling = [1]  # coefficients of s(s-1)...(s-i+1)
    for i, q in enumerate(qs):
        if i:
            falling = [0] + falling
            for k in range(len(falling) - 1):
                falling[k] -= (i - 1) * falling[k + 1]
        c = q.coeffs[0] if q.coeffs else zero
        if c:
            for k, f in enumerate(falling):
                if f:
                    out[k] = out[k] + c * f
    return out


def _rational_value(value) -> Optional[Fraction]:
    if isinstance(value, ResidueElem):
        return value.to_rational()
    return to_rat(value)


def exponent_difference(op: DiffOp, place: Place) -> Optional[Fraction]:
    """Nonnegative exponent difference at the place, or None when irrational."""
    if op.order != 2:
        raise InvalidOperator(f"exponent difference needs order 2, got {op.order}")
    c0, c1, _ = indicial_polynomial(op, place)
    disc = _rational_value(c1 * c1 - 4 * c0)
    if disc is None:
        return None
    return rational_sqrt(disc)


def indicial_exponents(op: DiffOp, place: Place) -> Tuple:
    """
    Roots of the indicial polynomial, smaller first.

    Rational roots are Fractions, residue field elements at algebraic places;
    irrational roots at rational places are returned as sympy numbers.

    Raises:
        Unsupported: exponents at an algebraic place outside its residue field
    """
    coeffs = indicial_polynomial(op, place)
    if len(coeffs) == 2:
        return (-coeffs[0],)
    if len(coeffs) != 3:
        raise InvalidOperator(f"indicial exponents need order 1 or 2, got {len(coeffs) - 1}")
    c0, c1, _ = coeffs
    disc = c1 * c1 - 4 * c0
    delta = rational_sqrt(_rational_value(disc)) if _rational_value(disc) is not None else None
    if delta is not None:
        return ((-c1 - delta) / 2, (-c1 + delta) / 2)
    if place.is_algebraic:
        raise Unsupported(f"exponents at {place} lie outside its residue field")
    c0, c1 = to_rat(c0), to_rat(c1)
    root = sym_sqrt(SymRational(disc.numerator, disc.denominator))
    b = SymRational(c1.numerator, c1.denominator)
    return ((-b - root) / 2, (-b + root) / 2)


def singularities(op: DiffOp) -> List[Place]:
    """
    Singular places: roots of the normalized leading coefficient grouped by
    irreducible factor, plus infinity when op(1/x) is singular at 0.
    """
    if op.domain != QX:
        raise ValueError("singularities are computed for operators over Q(x)")
    normal = op.normalized()
    places = []
    _, factors = normal.leading_coefficient().numer.factor_list()
    for factor, _ in factors:
        if poly_degree(factor) >= 1:
            places.append(Place.from_factor(factor))
    places.sort(key=Place.sort_key)
    if is_singular_at(op, Place.infinity()):
        places.append(Place.infinity())
    logger.debug(f"singularities: {[str(p) for p in places]}")
    return places
