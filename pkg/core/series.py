"""
Series Arithmetic
Truncated Puiseux series and log-extended series: arithmetic, composition,
rational powers, exponentials and compositional inversion.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from core.exact_arith import (
    ModInt,
    ResidueElem,
    poly_coeffs,
    rational_root,
    reduce_rat,
    to_rat,
)
from core.exceptions import BadPrime, PrecisionExhausted


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


@dataclass(frozen=True)
class PuiseuxSeries:
    """
    sum c_k t^(offset + k/ramification), known for all exponents below `order`.

    Coefficients may be Fractions, ModInts or residue-field elements; every
    exponent strictly below offset + len(coeffs)/ramification is known.
    """

    coeffs: Tuple
    offset: Fraction = Fraction(0)
    ramification: int = 1
    zero: object = field(default=Fraction(0), compare=False)

    # -- construction -------------------------------------------------------

    @classmethod
    def from_coeffs(cls, coeffs: Sequence, offset=0, ramification: int = 1, zero=None) -> "PuiseuxSeries":
        coeffs = tuple(coeffs)
        if zero is None:
            zero = coeffs[0] * 0 if coeffs else Fraction(0)
        return cls(coeffs, to_rat(offset), ramification, zero)

    @classmethod
    def constant(cls, value, precision: int, zero=None) -> "PuiseuxSeries":
        zero = value * 0 if zero is None else zero
        return cls.from_coeffs([value] + [zero] * (precision - 1), 0, 1, zero)

    # -- inspection ---------------------------------------------------------

    @property
    def order(self) -> Fraction:
        """Truncation order: exponents below it are exact."""
        return self.offset + Fraction(len(self.coeffs), self.ramification)

    def exponent(self, k: int) -> Fraction:
        return self.offset + Fraction(k, self.ramification)

    def first_nonzero(self) -> Optional[int]:
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return None

    def valuation(self) -> Optional[Fraction]:
        k = self.first_nonzero()
        return None if k is None else self.exponent(k)

    def leading_coefficient(self):
        k = self.first_nonzero()
        if k is None:
            raise ZeroDivisionError("zero series has no leading coefficient")
        return self.coeffs[k]

    def is_zero(self) -> bool:
        return self.first_nonzero() is None

    def coefficient(self, exponent) -> object:
        """Coefficient of t^exponent (zero when the exponent is off the grid)."""
        exponent = to_rat(exponent)
        if exponent >= self.order:
            raise PrecisionExhausted(f"coefficient of t^{exponent} beyond order {self.order}")
        k = (exponent - self.offset) * self.ramification
        if k < 0 or k.denominator != 1:
            return self.zero
        return self.coeffs[int(k)]

    def terms(self):
        """(exponent, coefficient) pairs with nonzero coefficient."""
        return [(self.exponent(k), c) for k, c in enumerate(self.coeffs) if c]

    # -- normalization ------------------------------------------------------

    def normalized(self) -> "PuiseuxSeries":
        """Strip leading zeros and reduce the ramification where possible."""
        k = self.first_nonzero()
        if k is None:
            return PuiseuxSeries((), self.order, 1, self.zero)
        coeffs = self.coeffs[k:]
        offset = self.exponent(k)
        rho = self.ramification
        # common stride of nonzero indices
        stride = 0
        for i, c in enumerate(coeffs):
            if c:
                stride = math.gcd(stride, i)
        stride = math.gcd(stride, rho) if stride else rho
        if stride > 1:
            usable = (len(coeffs) // stride) * stride
            coeffs = coeffs[:usable:stride]
            rho //= stride
        return PuiseuxSeries(tuple(coeffs), offset, rho, self.zero)

    def with_ramification(self, rho: int) -> "PuiseuxSeries":
        if rho == self.ramification:
            return self
        if rho % self.ramification:
            raise ValueError("new ramification must be a multiple of the old one")
        step = rho // self.ramification
        coeffs = []
        for c in self.coeffs:
            coeffs.append(c)
            coeffs.extend([self.zero] * (step - 1))
        return PuiseuxSeries(tuple(coeffs), self.offset, rho, self.zero)

    def truncate(self, order) -> "PuiseuxSeries":
        """Drop everything at or above the given absolute order."""
        order = to_rat(order)
        if order >= self.order:
            return self
        n = max(0, math.ceil((order - self.offset) * self.ramification))
        return PuiseuxSeries(self.coeffs[:n], self.offset, self.ramification, self.zero)

    def as_power_series(self) -> "PuiseuxSeries":
        """Same series with offset 0 and ramification 1 (leading zeros padded)."""
        s = self if self.ramification == 1 else self.normalized()
        if s.ramification != 1 or s.offset.denominator != 1 or s.offset < 0:
            raise ValueError(f"not an ordinary power series: {self!r}")
        pad = int(s.offset)
        return PuiseuxSeries((s.zero,) * pad + s.coeffs, Fraction(0), 1, s.zero)

    # -- arithmetic ---------------------------------------------------------

    def _align(self, other: "PuiseuxSeries") -> Tuple["PuiseuxSeries", "PuiseuxSeries", int]:
        rho = _lcm(self.ramification, other.ramification)
        gap = (self.offset - other.offset) * rho
        if gap.denominator != 1:
            rho *= gap.denominator
        return self.with_ramification(rho), other.with_ramification(rho), rho

    def __add__(self, other):
        if not isinstance(other, PuiseuxSeries):
            other = constant_series(other, self.order, self.zero)
        a, b, rho = self._align(other)
        offset = min(a.offset, b.offset)
        order = min(a.order, b.order)
        n = max(0, int((order - offset) * rho))
        out = [self.zero] * n
        for s in (a, b):
            shift = int((s.offset - offset) * rho)
            for k, c in enumerate(s.coeffs):
                if shift + k < n:
                    out[shift + k] = out[shift + k] + c
        return PuiseuxSeries(tuple(out), offset, rho, self.zero)

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxSeries(tuple(-c for c in self.coeffs), self.offset, self.ramification, self.zero)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "PuiseuxSeries":
        return PuiseuxSeries(tuple(x * c for x in self.coeffs), self.offset, self.ramification, self.zero)

    def shift(self, exponent) -> "PuiseuxSeries":
        """Multiply by t^exponent."""
        return PuiseuxSeries(self.coeffs, self.offset + to_rat(exponent), self.ramification, self.zero)

    def __mul__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return self.scale(other)
        a = self.normalized()
        b = other.normalized()
        rho = _lcm(a.ramification, b.ramification)
        a, b = a.with_ramification(rho), b.with_ramification(rho)
        n = min(len(a.coeffs), len(b.coeffs))
        out = [self.zero] * n
        for i in range(n):
            ai = a.coeffs[i]
            if not ai:
                continue
            for j in range(n - i):
                out[i + j] = out[i + j] + ai * b.coeffs[j]
        return PuiseuxSeries(tuple(out), a.offset + b.offset, rho, self.zero)

    __rmul__ = __mul__

    def inverse(self) -> "PuiseuxSeries":
        s = self.normalized()
        if not s.coeffs:
            raise ZeroDivisionError("division by a zero series")
        n = len(s.coeffs)
        lead_inv = 1 / s.coeffs[0]
        out = [lead_inv] + [self.zero] * (n - 1)
        for k in range(1, n):
            acc = self.zero
            for j in range(1, k + 1):
                if s.coeffs[j]:
                    acc = acc + s.coeffs[j] * out[k - j]
            out[k] = -acc * lead_inv
        return PuiseuxSeries(tuple(out), -s.offset, s.ramification, self.zero)

    def __truediv__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return self.scale(Fraction(1, other) if isinstance(other, int) else 1 / other)
        return self * other.inverse()

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        s = self.normalized()
        result = PuiseuxSeries.constant(s.coeffs[0] * 0 + 1 if s.coeffs else Fraction(1), max(1, len(s.coeffs)), self.zero)
        base = s
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def derivative(self) -> "PuiseuxSeries":
        """d/dt, term by term."""
        coeffs = tuple(c * self.exponent(k) for k, c in enumerate(self.coeffs))
        return PuiseuxSeries(coeffs, self.offset - 1, self.ramification, self.zero)

    def reduce_mod(self, ell: int) -> "PuiseuxSeries":
        coeffs = tuple(ModInt(reduce_rat(c, ell), ell) for c in self.coeffs)
        return PuiseuxSeries(coeffs, self.offset, self.ramification, ModInt(0, ell))

    def residues(self, ell: int, length: int) -> List[int]:
        """First `length` coefficients mod ell as ints (ramification 1, offset 0)."""
        if self.ramification != 1 or self.offset.denominator != 1:
            raise ValueError("expected an ordinary power series")
        s = self
        if self.offset < 0:
            raise ValueError("negative powers")
        pad = int(self.offset)
        if pad + len(s.coeffs) < length:
            raise PrecisionExhausted(f"need {length} terms, have {pad + len(s.coeffs)}")
        out = [0] * pad + [int(c) if isinstance(c, ModInt) else reduce_rat(c, ell) for c in s.coeffs]
        return out[:length]

    def __repr__(self):
        shown = ", ".join(f"{c}*t^{self.exponent(k)}" for k, c in enumerate(self.coeffs[:6]) if c)
        return f"PuiseuxSeries({shown} + O(t^{self.order}))"


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def series_arith(a: PuiseuxSeries, b: PuiseuxSeries, op: str) -> PuiseuxSeries:
    """add, sub, mul or div of two series in the same local parameter."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown series operation {op}")


def _root_of_lead(lead, exponent: Fraction, lead_root=None):
    """lead^exponent in the coefficient ring."""
    if exponent.denominator == 1:
        return lead ** int(exponent)
    if lead_root is not None:
        return lead_root ** exponent.numerator if exponent.numerator >= 0 else (1 / lead_root) ** (-exponent.numerator)
    if lead == 1:
        return lead * 0 + 1
    if isinstance(lead, Fraction):
        root = rational_root(lead, exponent.denominator)
        if root is None:
            raise ValueError(f"{lead} has no rational {exponent.denominator}-th root")
        return root ** exponent.numerator
    if isinstance(lead, ModInt):
        ell = lead.modulus
        for r in range(1, ell):
            if pow(r, exponent.denominator, ell) == lead.residue:
                return ModInt(r, ell) ** exponent.numerator
        raise BadPrime(f"{lead.residue} has no {exponent.denominator}-th root mod {ell}")
    raise ValueError("leading coefficient root not available")


def series_pow_rational(s: PuiseuxSeries, e, lead_root=None) -> PuiseuxSeries:
    """
    s^e for rational e.

    Args:
        s: series with invertible leading coefficient
        e: rational exponent
        lead_root: chosen value of lead^(1/den(e)) when lead != 1

    Returns:
        PuiseuxSeries with offset valuation(s)*e
    """
    e = to_rat(e)
    s = s.normalized()
    if not s.coeffs:
        raise ZeroDivisionError("power of a zero series")
    lead = s.coeffs[0]
    unit = [c / lead for c in s.coeffs]
    n = len(unit)
    zero = s.zero
    out = [unit[0] * 0 + 1] + [zero] * (n - 1)
    # (e+1)-weighted power recurrence for unit^e with unit(0) = 1
    for k in range(1, n):
        acc = zero
        for j in range(1, k + 1):
            if unit[j]:
                acc = acc + unit[j] * out[k - j] * ((e + 1) * j - k)
        out[k] = acc / k
    factor = _root_of_lead(lead, e, lead_root)
    result = PuiseuxSeries(tuple(out), s.offset * e, s.ramification, zero)
    return result.scale(factor)


def series_exp(s: PuiseuxSeries) -> PuiseuxSeries:
    """exp(s) for an ordinary power series with zero constant term."""
    s = s.as_power_series()
    if s.coeffs and s.coeffs[0]:
        raise ValueError("exp needs zero constant term")
    n = len(s.coeffs)
    zero = s.zero
    out = [zero + 1] + [zero] * (n - 1)
    for k in range(1, n):
        acc = zero
        for j in range(1, k + 1):
            if s.coeffs[j]:
                acc = acc + s.coeffs[j] * out[k - j] * j
        out[k] = acc / k
    return PuiseuxSeries(tuple(out), Fraction(0), 1, zero)


def series_compose(outer: PuiseuxSeries, inner: PuiseuxSeries, lead_root=None) -> PuiseuxSeries:
    """
    outer(inner) for inner of positive valuation.

    Args:
        outer: series in T
        inner: series in t with positive valuation
        lead_root: root of inner's leading coefficient used for fractional powers

    Returns:
        Truncated composition with pessimistic order
    """
    inner = inner.normalized()
    mu = inner.valuation()
    if mu is None or mu <= 0:
        raise ValueError("inner series must have positive valuation")
    outer = outer.normalized()
    zero = inner.zero
    if not outer.coeffs:
        return PuiseuxSeries((), outer.order * mu, 1, zero)
    rho_o = outer.ramification
    base = inner if rho_o == 1 else series_pow_rational(inner, Fraction(1, rho_o), lead_root)
    step = mu / rho_o
    target = min(step + (inner.order - mu), len(outer.coeffs) * step)
    one = zero + 1
    acc = constant_series(outer.coeffs[0], target, zero)
    power = constant_series(one, target, zero)
    for k in range(1, len(outer.coeffs)):
        power = (power * base).truncate(target)
        if outer.coeffs[k]:
            acc = acc + power.scale(outer.coeffs[k])
    acc = acc.truncate(target)
    if outer.offset:
        acc = acc * series_pow_rational(inner, outer.offset, lead_root)
    return acc


def compositional_inverse(u: PuiseuxSeries) -> PuiseuxSeries:
    """
    w with w(u(x)) = x for an ordinary series u = u1*x + u2*x^2 + ...

    Returns:
        w as an ordinary series known to the same order as u
    """
    u = u.normalized()
    if u.ramification != 1 or u.offset != 1:
        raise ValueError("compositional inverse needs valuation exactly 1")
    n = len(u.coeffs) + 1  # coefficients of w for T^1..T^(n-1)
    zero = u.zero
    dense = [zero] + list(u.coeffs)  # u[i] = coefficient of x^i
    powers = [None, dense[:n]]
    for k in range(2, n):
        prev = powers[-1]
        nxt = [zero] * n
        for i in range(k - 1, n):
            if not prev[i]:
                continue
            for j in range(1, n - i):
                nxt[i + j] = nxt[i + j] + prev[i] * dense[j]
        powers.append(nxt)
    w = [zero] * n
    u1 = dense[1]
    w[1] = 1 / u1
    for m in range(2, n):
        acc = zero
        for k in range(1, m):
            if w[k] and powers[k][m]:
                acc = acc + w[k] * powers[k][m]
        w[m] = -acc / powers[m][m]
    return PuiseuxSeries(tuple(w[1:]), Fraction(1), 1, zero)


def series_invert_functional(q: PuiseuxSeries, alpha) -> PuiseuxSeries:
    """
    q^(-1) as a Puiseux series in T for q = x^alpha*(1 + ...).

    u = q^(1/alpha) is inverted compositionally and precomposed with T^(1/alpha).
    """
    alpha = to_rat(alpha)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    q = q.normalized()
    if q.valuation() != alpha:
        raise ValueError(f"q has valuation {q.valuation()}, expected {alpha}")
    if q.leading_coefficient() != 1:
        raise ValueError("q must be normalized to leading coefficient 1")
    u = series_pow_rational(q, 1 / alpha)
    w = compositional_inverse(u)
    inv = 1 / alpha
    stride = inv.numerator
    coeffs = []
    for c in w.coeffs:
        coeffs.append(c)
        coeffs.extend([w.zero] * (stride - 1))
    return PuiseuxSeries(tuple(coeffs), inv, inv.denominator, w.zero)


# ---------------------------------------------------------------------------
# Expansions of rational functions
# ---------------------------------------------------------------------------

def taylor_shift(coeffs: Sequence, point, zero) -> List:
    """Coefficients of P(point + t) from those of P(x), both low to high."""
    work = list(coeffs)
    n = len(work)
    out = []
    for _ in range(n):
        # synthetic division by (x - point)
        acc = zero
        quotient = [zero] * len(work)
        for i in range(len(work) - 1, -1, -1):
            acc = acc * point + work[i]
            quotient[i] = acc
        out.append(quotient[0])
        work = quotient[1:]
    return out


def laurent_from_polys(numer: Sequence, denom: Sequence, precision: int, zero) -> PuiseuxSeries:
    """Laurent expansion at t = 0 of numer(t)/denom(t), relative precision `precision`."""
    def strip(cs):
        k = 0
        while k < len(cs) and not cs[k]:
            k += 1
        return k, list(cs[k:])

    vn, num = strip(numer)
    vd, den = strip(denom)
    if not den:
        raise ZeroDivisionError("zero denominator")
    if not num:
        return PuiseuxSeries((zero,) * precision, Fraction(0), 1, zero)
    num = (num + [zero] * precision)[:precision]
    den = (den + [zero] * precision)[:precision]
    s_num = PuiseuxSeries(tuple(num), Fraction(0), 1, zero)
    s_den = PuiseuxSeries(tuple(den), Fraction(0), 1, zero)
    return (s_num / s_den).shift(vn - vd)


def series_from_ratfun(f, precision: int, point=None) -> PuiseuxSeries:
    """
    Laurent expansion of f in Q(x) at x = point (0 by default).

    Args:
        f: rational function
        precision: relative precision in terms
        point: Fraction or residue-field element

    Returns:
        PuiseuxSeries in t = x - point
    """
    numer = poly_coeffs(f.numer)
    denom = poly_coeffs(f.denom)
    if point is None or (isinstance(point, (int, Fraction)) and point == 0):
        return laurent_from_polys(numer, denom, precision, Fraction(0))
    if isinstance(point, ResidueElem):
        zero = point.field.zero
        numer = [point.field.element(c) for c in numer]
        denom = [point.field.element(c) for c in denom]
    else:
        zero = Fraction(0)
        point = to_rat(point)
    return laurent_from_polys(taylor_shift(numer, point, zero), taylor_shift(denom, point, zero), precision, zero)


# ---------------------------------------------------------------------------
# Log-extended series
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class LogSeries:
    """
    part0 + part1*log t with leading exponent `exponent`.

    Both parts carry absolute exponents. A non-logarithmic solution has
    part1 equal to the zero series known to the same order as part0.
    """

    exponent: Fraction
    part0: PuiseuxSeries
    part1: PuiseuxSeries
    place: object = None

    @classmethod
    def pure(cls, part0: PuiseuxSeries, place=None) -> "LogSeries":
        lead = part0.valuation()
        return cls(part0.offset if lead is None else lead, part0, zero_series(part0.order, part0.zero), place)

    @property
    def is_logarithmic(self) -> bool:
        return not self.part1.is_zero()

    @property
    def order(self) -> Fraction:
        return min(self.part0.order, self.part1.order)

    def valuation(self) -> Optional[Fraction]:
        """Smallest exponent whose log-polynomial coefficient is nonzero."""
        vals = [v for v in (self.part0.valuation(), self.part1.valuation()) if v is not None]
        vals = [v for v in vals if v < self.order]
        return min(vals) if vals else None

    def coefficient(self, exponent) -> Tuple[object, object]:
        """(constant, log) coefficients of t^exponent."""
        return self.part0.coefficient(exponent), self.part1.coefficient(exponent)

    def derivative(self) -> "LogSeries":
        """d/dt of part0 + part1*log t."""
        d0 = self.part0.derivative() + self.part1.shift(-1)
        return LogSeries(self.exponent - 1, d0, self.part1.derivative(), self.place)

    def mul_series(self, s: PuiseuxSeries) -> "LogSeries":
        shift = s.valuation() or Fraction(0)
        return LogSeries(self.exponent + shift, self.part0 * s, self.part1 * s, self.place)

    def __add__(self, other: "LogSeries") -> "LogSeries":
        return LogSeries(
            min(self.exponent, other.exponent),
            self.part0 + other.part0,
            self.part1 + other.part1,
            self.place,
        )

    def scale(self, c) -> "LogSeries":
        return LogSeries(self.exponent, self.part0.scale(c), self.part1.scale(c), self.place)

    def shift(self, k) -> "LogSeries":
        """Multiply by t^k."""
        return LogSeries(self.exponent + k, self.part0.shift(k), self.part1.shift(k), self.place)

    def terms_below(self, bound) -> List[Tuple[Fraction, object, object]]:
        """(exponent, constant, log) triples with exponent < bound and a nonzero entry."""
        bound = to_rat(bound)
        if bound > self.order:
            raise PrecisionExhausted(f"need terms below {bound}, known below {self.order}")
        exps = set()
        for part in (self.part0, self.part1):
            for e, _ in part.terms():
                if e < bound:
                    exps.add(e)
        out = []
        for e in sorted(exps):
            c0, c1 = self.coefficient(e)
            if c0 or c1:
                out.append((e, c0, c1))
        return out


def zero_series(order, zero=Fraction(0)) -> PuiseuxSeries:
    """The zero series known below `order`."""
    return PuiseuxSeries((), to_rat(order), 1, zero)


def constant_series(value, order, zero=Fraction(0)) -> PuiseuxSeries:
    """A constant known exactly below `order`."""
    order = to_rat(order)
    if order <= 0:
        return zero_series(order, zero)
    n = math.ceil(order)
    return PuiseuxSeries((value,) + (zero,) * (n - 1), Fraction(0), 1, zero)
