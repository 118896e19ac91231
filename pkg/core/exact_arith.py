"""
Exact Arithmetic
Rationals, prime fields, polynomials and rational functions over QQ, algebraic
residue fields, quadratic extensions and the modular reconstruction primitives.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, NamedTuple, Optional, Sequence

import numpy as np
from sympy import QQ, Poly, Symbol, sympify
from sympy.polys.fields import FracElement, field
from sympy.polys.rings import PolyElement

from core.exceptions import BadPrime

Rat = Fraction

# Q(x) and Q[x], shared by every module
K, X = field("x", QQ)
R = K.ring
XPOLY = R.gens[0]
X_SYMBOL = Symbol("x")

RatFun = FracElement
UPoly = PolyElement


# ---------------------------------------------------------------------------
# Rationals
# ---------------------------------------------------------------------------

def to_rat(value) -> Fraction:
    """Convert ints, Fractions, QQ elements, sympy Rationals and strings to Rat."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if hasattr(value, "numerator") and hasattr(value, "denominator") and not isinstance(value, float):
        num, den = value.numerator, value.denominator
        if callable(num):
            num, den = num(), den()
        return Fraction(int(num), int(den))
    if isinstance(value, str):
        return Fraction(value)
    expr = sympify(value)
    if expr.is_Rational:
        return Fraction(int(expr.p), int(expr.q))
    raise TypeError(f"cannot convert {value!r} to a rational")


def rat_to_qq(value):
    value = to_rat(value)
    return QQ(value.numerator, value.denominator)


def rational_sqrt(value: Fraction) -> Optional[Fraction]:
    """Exact square root of a nonnegative rational, or None."""
    value = to_rat(value)
    if value < 0:
        return None
    num, den = math.isqrt(value.numerator), math.isqrt(value.denominator)
    if num * num == value.numerator and den * den == value.denominator:
        return Fraction(num, den)
    return None


def rational_root(value: Fraction, n: int) -> Optional[Fraction]:
    """Exact n-th root of a rational (sign allowed for odd n), or None."""
    value = to_rat(value)
    if value == 0:
        return Fraction(0)
    sign = 1
    if value < 0:
        if n % 2 == 0:
            return None
        sign, value = -1, -value
    roots = []
    for part in (value.numerator, value.denominator):
        root = _int_root(part, n)
        for candidate in (root - 1, root, root + 1):
            if candidate >= 0 and candidate ** n == part:
                roots.append(candidate)
                break
        else:
            return None
    return sign * Fraction(roots[0], roots[1])


def _int_root(value: int, n: int) -> int:
    lo, hi = 0, 1 << (value.bit_length() // n + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid ** n <= value:
            lo = mid
        else:
            hi = mid - 1
    return lo


def rat_gcd(values: Sequence[Fraction]) -> Fraction:
    """gcd of rationals: gcd of numerators over lcm of denominators."""
    values = [to_rat(v) for v in values if v != 0]
    if not values:
        return Fraction(0)
    num, den = 0, 1
    for v in values:
        num = math.gcd(num, abs(v.numerator))
        den = den * v.denominator // math.gcd(den, v.denominator)
    return Fraction(num, den)


def height(value: Fraction) -> int:
    value = to_rat(value)
    return max(abs(value.numerator), value.denominator)


# ---------------------------------------------------------------------------
# Prime fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModInt:
    """Residue modulo a prime or a prime power."""

    residue: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        object.__setattr__(self, "residue", self.residue % self.modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, ModInt):
            if other.modulus != self.modulus:
                raise ValueError("moduli differ")
            return other.residue
        if isinstance(other, Fraction):
            return reduce_rat(other, self.modulus)
        return int(other)

    def __add__(self, other):
        return ModInt(self.residue + self._coerce(other), self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        return ModInt(self.residue - self._coerce(other), self.modulus)

    def __rsub__(self, other):
        return ModInt(self._coerce(other) - self.residue, self.modulus)

    def __mul__(self, other):
        return ModInt(self.residue * self._coerce(other), self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return ModInt(-self.residue, self.modulus)

    def inverse(self) -> "ModInt":
        if math.gcd(self.residue, self.modulus) != 1:
            raise ZeroDivisionError(f"{self.residue} is not invertible mod {self.modulus}")
        return ModInt(pow(self.residue, -1, self.modulus), self.modulus)

    def __truediv__(self, other):
        return self * ModInt(self._coerce(other), self.modulus).inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, exponent: int):
        return ModInt(pow(self.residue, exponent, self.modulus), self.modulus)

    def __eq__(self, other):
        if isinstance(other, ModInt):
            return self.modulus == other.modulus and self.residue == other.residue
        if isinstance(other, (int, Fraction)):
            try:
                return self.residue == self._coerce(other)
            except BadPrime:
                return False
        return NotImplemented

    def __hash__(self):
        return hash((self.residue, self.modulus))

    def __bool__(self):
        return self.residue != 0

    def __int__(self):
        return self.residue

    def __repr__(self):
        return f"{self.residue} (mod {self.modulus})"


def reduce_rat(value, modulus: int) -> int:
    value = to_rat(value)
    if value.denominator % modulus == 0 or math.gcd(value.denominator, modulus) != 1:
        raise BadPrime(f"denominator {value.denominator} not invertible mod {modulus}")
    return value.numerator * pow(value.denominator, -1, modulus) % modulus


# ---------------------------------------------------------------------------
# Polynomials and rational functions over QQ
# ---------------------------------------------------------------------------

def poly_coeffs(poly: PolyElement) -> List[Fraction]:
    """Coefficients low to high as Fractions."""
    if not poly:
        return []
    return [to_rat(c) for c in reversed(poly.to_dense())]


def poly_from_coeffs(coeffs: Sequence) -> PolyElement:
    """Polynomial in x from coefficients low to high."""
    dense = [rat_to_qq(c) for c in reversed(list(coeffs))]
    while dense and not dense[0]:
        dense.pop(0)
    return R.from_list(dense) if dense else R.zero


def poly_degree(poly: PolyElement) -> int:
    return poly.degree() if poly else -1


def ratfun(value) -> FracElement:
    """Coerce ints, rationals, polynomials, strings and sympy expressions into Q(x)."""
    if isinstance(value, FracElement):
        return value
    if isinstance(value, PolyElement):
        return K(value)
    if isinstance(value, (int, Fraction)):
        return K(rat_to_qq(value))
    if isinstance(value, str):
        return K.from_expr(sympify(value.replace("^", "**"), locals={"x": X_SYMBOL}))
    return K.from_expr(sympify(value))


def horner(coeffs: Sequence, value, zero):
    """Evaluate sum coeffs[k] value^k (coefficients low to high)."""
    acc = zero
    for c in reversed(list(coeffs)):
        acc = acc * value + c
    return acc


def poly_eval(poly: PolyElement, value):
    """Evaluate a QQ[x] polynomial at a Fraction, ResidueElem, FracElement or QuadExtElem."""
    coeffs = poly_coeffs(poly)
    if isinstance(value, (int, Fraction)):
        return horner(coeffs, Fraction(value), Fraction(0))
    if isinstance(value, FracElement):
        return horner([K(rat_to_qq(c)) for c in coeffs], value, K.zero)
    if isinstance(value, QuadExtElem):
        return horner(coeffs, value, value.ext.zero)
    if isinstance(value, ResidueElem):
        return horner(coeffs, value, value.field.zero)
    raise TypeError(f"cannot evaluate polynomial at {type(value).__name__}")


def ratfun_eval(f: FracElement, value):
    """Evaluate f at a value (ZeroDivisionError when the denominator vanishes)."""
    numer = poly_eval(f.numer, value)
    denom = poly_eval(f.denom, value)
    if not denom:
        raise ZeroDivisionError("denominator vanishes")
    return numer / denom


def ratfun_to_str(f) -> str:
    """Exact text form using ^ for powers."""
    if isinstance(f, QuadExtElem):
        return f.to_str()
    expr = ratfun(f).as_expr().factor()
    return str(expr).replace("**", "^")


def poly_is_square(poly: PolyElement) -> bool:
    """True when a QQ[x] polynomial is the square of a QQ[x] polynomial."""
    if not poly:
        return True
    coeff, factors = poly.sqf_list()
    if any(k % 2 for _, k in factors):
        return False
    return rational_sqrt(to_rat(coeff)) is not None


def ratfun_is_square(f: FracElement) -> bool:
    return poly_is_square(f.numer * f.denom)


# ---------------------------------------------------------------------------
# Dense polynomials over Z/m (int lists, low to high)
# ---------------------------------------------------------------------------

def pm_trim(a: List[int]) -> List[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def pm_degree(a: Sequence[int]) -> int:
    for i in range(len(a) - 1, -1, -1):
        if a[i]:
            return i
    return -1


def pm_add(a, b, m):
    n = max(len(a), len(b))
    return pm_trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % m for i in range(n)])


def pm_sub(a, b, m):
    n = max(len(a), len(b))
    return pm_trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % m for i in range(n)])


def pm_scale(a, c, m):
    return pm_trim([x * c % m for x in a])


def pm_mul(a, b, m, trunc: Optional[int] = None):
    if not a or not b:
        return []
    n = len(a) + len(b) - 1
    if trunc is not None:
        n = min(n, trunc)
    out = [0] * n
    for i, ai in enumerate(a):
        if not ai or i >= n:
            continue
        for j in range(min(len(b), n - i)):
            out[i + j] += ai * b[j]
    return pm_trim([x % m for x in out])


def pm_divmod(a, b, m):
    """Division with remainder; the leading coefficient of b must be a unit mod m."""
    a = pm_trim(list(a))
    b = pm_trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(b[-1], -1, m)
    quotient = [0] * max(len(a) - len(b) + 1, 0)
    rem = [x % m for x in a]
    for k in range(len(a) - len(b), -1, -1):
        coef = rem[k + len(b) - 1] * inv % m
        quotient[k] = coef
        if coef:
            for j, bj in enumerate(b):
                rem[k + j] = (rem[k + j] - coef * bj) % m
    return pm_trim(quotient), pm_trim(rem[: len(b) - 1])


def pm_from_poly(poly: PolyElement, m: int) -> List[int]:
    return pm_trim([reduce_rat(c, m) for c in poly_coeffs(poly)])


class ModRatFun(NamedTuple):
    """N/D over Z/m with D(0) = 1."""

    numer: List[int]
    denom: List[int]
    modulus: int


def ratfun_reconstruct(series: Sequence[int], nbound: int, dbound: int, ell: int) -> Optional[ModRatFun]:
    """
    Rational function reconstruction by the half-extended Euclidean scheme.

    Args:
        series: coefficients of s mod (ell, x^a), low to high, a = len(series)
        nbound: numerator degree bound
        dbound: denominator degree bound
        ell: prime modulus

    Returns:
        ModRatFun with deg N <= nbound, deg D <= dbound, D(0) = 1 and
        N = D*s mod x^a, or None (also when a < nbound + dbound + 2)
    """
    a = len(series)
    if a < nbound + dbound + 2:
        return None
    r0 = [0] * a + [1]
    r1 = pm_trim([c % ell for c in series])
    t0, t1 = [], [1]
    while pm_degree(r1) > nbound:
        quotient, rem = pm_divmod(r0, r1, ell)
        r0, r1 = r1, rem
        t0, t1 = t1, pm_sub(t0, pm_mul(quotient, t1, ell), ell)
    if pm_degree(t1) > dbound or not t1 or t1[0] % ell == 0:
        return None
    inv = pow(t1[0], -1, ell)
    numer = pm_scale(r1, inv, ell)
    denom = pm_scale(t1, inv, ell)
    check = pm_sub(pm_mul(denom, list(series), ell, trunc=a), numer, ell)
    if check:
        return None
    return ModRatFun(numer, denom, ell)


def ratnum_reconstruct(residue, modulus: Optional[int] = None) -> Optional[Fraction]:
    """
    Rational number reconstruction with balanced bound sqrt(m/2).

    Args:
        residue: ModInt, or an int together with modulus
        modulus: modulus when residue is an int

    Returns:
        Fraction p/q with |p|, q <= sqrt(m/2), q*r = p mod m, or None
    """
    if isinstance(residue, ModInt):
        residue, modulus = residue.residue, residue.modulus
    if modulus is None or modulus < 2:
        raise ValueError("modulus must be at least 2")
    residue %= modulus
    if residue == 0:
        return Fraction(0)
    bound = math.isqrt(modulus // 2)
    r0, r1 = modulus, residue
    t0, t1 = 0, 1
    while r1 > bound:
        quotient = r0 // r1
        r0, r1 = r1, r0 - quotient * r1
        t0, t1 = t1, t0 - quotient * t1
    if t1 == 0 or abs(t1) > bound or math.gcd(t1, modulus) != 1:
        return None
    value = Fraction(r1, t1)
    if (value.numerator - residue * value.denominator) % modulus:
        return None
    return value


def reduce_mod(value, ell: int):
    """
    Homomorphic image mod ell.

    Rationals map to ints, QQ[x] polynomials and lists to int lists, rational
    functions to ModRatFun, series to series with ModInt coefficients.

    Raises:
        BadPrime: a denominator vanishes mod ell
    """
    if isinstance(value, (int, Fraction)):
        return reduce_rat(value, ell)
    if isinstance(value, PolyElement):
        return pm_from_poly(value, ell)
    if isinstance(value, FracElement):
        numer, denom = value.numer, value.denom
        n_img, d_img = pm_from_poly(numer, ell), pm_from_poly(denom, ell)
        if not d_img:
            raise BadPrime(f"denominator vanishes mod {ell}")
        return ModRatFun(n_img, d_img, ell)
    if isinstance(value, (list, tuple)):
        return [reduce_mod(v, ell) for v in value]
    if hasattr(value, "reduce_mod"):
        return value.reduce_mod(ell)
    return reduce_rat(to_rat(value), ell)


# ---------------------------------------------------------------------------
# Linear algebra
# ---------------------------------------------------------------------------

class LinearSolution(NamedTuple):
    particular: List[int]
    kernel: List[List[int]]


def solve_linear_mod(matrix: Sequence[Sequence[int]], rhs: Sequence[int], ell: int) -> Optional[LinearSolution]:
    """
    All solutions of M v = rhs over F_ell by Gaussian elimination.

    Returns:
        LinearSolution (particular solution + kernel basis), or None when inconsistent
    """
    rows = [[x % ell for x in row] + [b % ell] for row, b in zip(matrix, rhs)]
    ncols = len(matrix[0]) if matrix else 0
    pivots = []
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], -1, ell)
        rows[rank] = [x * inv % ell for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                factor = rows[r][col]
                rows[r] = [(x - factor * y) % ell for x, y in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
    for r in range(rank, len(rows)):
        if rows[r][ncols]:
            return None
    particular = [0] * ncols
    for r, col in enumerate(pivots):
        particular[col] = rows[r][ncols]
    kernel = []
    free = [c for c in range(ncols) if c not in pivots]
    for fcol in free:
        vec = [0] * ncols
        vec[fcol] = 1
        for r, col in enumerate(pivots):
            vec[col] = -rows[r][fcol] % ell
        kernel.append(vec)
    return LinearSolution(particular, kernel)


def nullspace(rows: Sequence[Sequence], ncols: int, zero, one) -> List[list]:
    """Kernel basis of a matrix over any exact field (Fraction, Q(x), residue fields)."""
    work = [list(row) for row in rows]
    pivots = []
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(work)) if work[r][col]), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        inv = one / work[rank][col]
        work[rank] = [x * inv for x in work[rank]]
        for r in range(len(work)):
            if r != rank and work[r][col]:
                factor = work[r][col]
                work[r] = [x - factor * y for x, y in zip(work[r], work[rank])]
        pivots.append(col)
        rank += 1
    basis = []
    for fcol in (c for c in range(ncols) if c not in pivots):
        vec = [zero] * ncols
        vec[fcol] = one
        for r, col in enumerate(pivots):
            vec[col] = -work[r][fcol]
        basis.append(vec)
    return basis


def batched_has_kernel(mats: np.ndarray, ell: int) -> np.ndarray:
    """
    Rank test for a stack of matrices over F_ell.

    Args:
        mats: int64 array of shape (batch, rows, cols), entries in [0, ell)

    Returns:
        Boolean array, True where the matrix has a nontrivial kernel
    """
    work = mats.copy() % ell
    batch, nrows, ncols = work.shape
    rank = np.zeros(batch, dtype=np.int64)
    row_idx = np.arange(nrows)
    inverses = np.array([0] + [pow(v, -1, ell) for v in range(1, ell)], dtype=np.int64)
    all_b = np.arange(batch)
    for col in range(ncols):
        eligible = (work[:, :, col] != 0) & (row_idx[None, :] >= rank[:, None])
        has_pivot = eligible.any(axis=1)
        if not has_pivot.any():
            continue
        pivot_row = np.argmax(eligible, axis=1)
        b = all_b[has_pivot]
        prow = pivot_row[has_pivot]
        target = rank[has_pivot]
        # swap pivot row into position rank
        pivot_vals = work[b, prow, :].copy()
        work[b, prow, :] = work[b, target, :]
        work[b, target, :] = pivot_vals
        inv = inverses[pivot_vals[:, col]]
        pivot_vals = pivot_vals * inv[:, None] % ell
        work[b, target, :] = pivot_vals
        factors = work[b, :, col].copy()
        factors[np.arange(len(b)), target] = 0
        work[b] = (work[b] - factors[:, :, None] * pivot_vals[:, None, :]) % ell
        rank[has_pivot] += 1
    return rank < ncols


# ---------------------------------------------------------------------------
# Residue fields Q[z]/(m) for algebraic places
# ---------------------------------------------------------------------------

class ResidueField:
    """Q[z]/(m) for an irreducible m; elements are polynomials reduced mod m."""

    def __init__(self, minpoly: PolyElement):
        self.minpoly = minpoly.monic()
        self.degree = poly_degree(self.minpoly)
        self.zero = ResidueElem(R.zero, self)
        self.one = ResidueElem(R.one, self)
        self.root = self.element(XPOLY)

    def element(self, value) -> "ResidueElem":
        if isinstance(value, ResidueElem):
            return value
        if isinstance(value, PolyElement):
            return ResidueElem(value.rem(self.minpoly), self)
        return ResidueElem(R(rat_to_qq(value)), self)

    def __eq__(self, other):
        return isinstance(other, ResidueField) and self.minpoly == other.minpoly

    def __hash__(self):
        return hash(str(self.minpoly))


class ResidueElem:
    """Element of a ResidueField."""

    __slots__ = ("poly", "field")

    def __init__(self, poly: PolyElement, fld: ResidueField):
        self.poly = poly
        self.field = fld

    def _coerce(self, other) -> PolyElement:
        if isinstance(other, ResidueElem):
            return other.poly
        return R(rat_to_qq(other))

    def __add__(self, other):
        return ResidueElem(self.poly + self._coerce(other), self.field)

    __radd__ = __add__

    def __sub__(self, other):
        return ResidueElem(self.poly - self._coerce(other), self.field)

    def __rsub__(self, other):
        return ResidueElem(self._coerce(other) - self.poly, self.field)

    def __mul__(self, other):
        return ResidueElem((self.poly * self._coerce(other)).rem(self.field.minpoly), self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return ResidueElem(-self.poly, self.field)

    def inverse(self) -> "ResidueElem":
        if not self.poly:
            raise ZeroDivisionError("division by zero in residue field")
        s, _, h = self.poly.gcdex(self.field.minpoly)
        return ResidueElem((s.quo_ground(h.LC)).rem(self.field.minpoly), self.field)

    def __truediv__(self, other):
        if isinstance(other, ResidueElem):
            return self * other.inverse()
        other = to_rat(other)
        return ResidueElem(self.poly.quo_ground(rat_to_qq(other)), self.field)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, exponent: int):
        result = self.field.one
        base = self
        if exponent < 0:
            base, exponent = self.inverse(), -exponent
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __bool__(self):
        return bool(self.poly)

    def __eq__(self, other):
        if isinstance(other, ResidueElem):
            return self.poly == other.poly
        try:
            return self.poly == self._coerce(other)
        except Exception:
            return NotImplemented

    def __hash__(self):
        return hash(str(self.poly))

    def to_rational(self) -> Optional[Fraction]:
        if not self.poly:
            return Fraction(0)
        if self.poly.degree() == 0:
            return to_rat(self.poly.LC)
        return None

    def __repr__(self):
        return f"[{self.poly.as_expr()} mod {self.field.minpoly.as_expr()}]"


# ---------------------------------------------------------------------------
# Coefficient domains for operators
# ---------------------------------------------------------------------------

class RationalFunctions:
    """The differential field Q(x)."""

    zero = K.zero
    one = K.one

    def convert(self, value) -> FracElement:
        return ratfun(value)

    def diff(self, value: FracElement) -> FracElement:
        return value.diff(X)

    def x(self) -> FracElement:
        return X

    def __eq__(self, other):
        return isinstance(other, RationalFunctions)

    def __hash__(self):
        return hash("Q(x)")

    def __repr__(self):
        return "QQ(x)"


QX = RationalFunctions()


class QuadraticExtension:
    """
    Q(x)[y]/(m) for m = y^2 + p*y + q irreducible over Q(x), as a differential field.

    Args:
        p: coefficient of y in the monic minimal polynomial
        q: constant coefficient of the monic minimal polynomial
    """

    def __init__(self, p, q):
        self.p = ratfun(p)
        self.q = ratfun(q)
        discriminant = self.p * self.p - 4 * self.q
        if not discriminant:
            raise ValueError("minimal polynomial is not squarefree")
        self.zero = QuadExtElem(K.zero, K.zero, self)
        self.one = QuadExtElem(K.one, K.zero, self)
        self.gen = QuadExtElem(K.zero, K.one, self)
        # y' = -(p'y + q')/(2y + p)
        numer = QuadExtElem(-self.q.diff(X), -self.p.diff(X), self)
        self.gen_derivative = numer / QuadExtElem(self.p, K(2), self)

    @classmethod
    def from_minpoly(cls, coeffs: Sequence) -> "QuadraticExtension":
        """From [A0, A1, A2] with m = A2*y^2 + A1*y + A0, A_i in Q(x)."""
        a0, a1, a2 = (ratfun(c) for c in coeffs)
        if not a2:
            raise ValueError("minimal polynomial must have degree 2 in y")
        return cls(a1 / a2, a0 / a2)

    def discriminant(self) -> FracElement:
        return self.p * self.p - 4 * self.q

    def is_field(self) -> bool:
        """True when m is irreducible over Q(x)."""
        return not ratfun_is_square(self.discriminant())

    def convert(self, value) -> "QuadExtElem":
        if isinstance(value, QuadExtElem):
            return value
        return QuadExtElem(ratfun(value), K.zero, self)

    def diff(self, value: "QuadExtElem") -> "QuadExtElem":
        return self.convert(value).diff()

    def x(self) -> "QuadExtElem":
        return self.convert(X)

    def __eq__(self, other):
        return isinstance(other, QuadraticExtension) and self.p == other.p and self.q == other.q

    def __hash__(self):
        return hash((str(self.p), str(self.q)))

    def __repr__(self):
        return f"QQ(x)[y]/(y^2 + ({self.p.as_expr()})*y + {self.q.as_expr()})"


class QuadExtElem:
    """c0 + c1*y in a QuadraticExtension."""

    __slots__ = ("c0", "c1", "ext")

    def __init__(self, c0, c1, ext: QuadraticExtension):
        self.c0 = ratfun(c0)
        self.c1 = ratfun(c1)
        self.ext = ext

    def _coerce(self, other) -> "QuadExtElem":
        if isinstance(other, QuadExtElem):
            return other
        return QuadExtElem(ratfun(other), K.zero, self.ext)

    def __add__(self, other):
        other = self._coerce(other)
        return QuadExtElem(self.c0 + other.c0, self.c1 + other.c1, self.ext)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return QuadExtElem(self.c0 - other.c0, self.c1 - other.c1, self.ext)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return QuadExtElem(-self.c0, -self.c1, self.ext)

    def __mul__(self, other):
        other = self._coerce(other)
        p, q = self.ext.p, self.ext.q
        t = self.c1 * other.c1
        return QuadExtElem(
            self.c0 * other.c0 - q * t,
            self.c0 * other.c1 + self.c1 * other.c0 - p * t,
            self.ext,
        )

    __rmul__ = __mul__

    def norm(self) -> FracElement:
        p, q = self.ext.p, self.ext.q
        return self.c0 * self.c0 - p * self.c0 * self.c1 + q * self.c1 * self.c1

    def inverse(self) -> "QuadExtElem":
        n = self.norm()
        if not n:
            raise ZeroDivisionError("division by zero in quadratic extension")
        return QuadExtElem((self.c0 - self.ext.p * self.c1) / n, -self.c1 / n, self.ext)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, exponent: int):
        result = self.ext.one
        base = self
        if exponent < 0:
            base, exponent = self.inverse(), -exponent
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def diff(self) -> "QuadExtElem":
        base = QuadExtElem(self.c0.diff(X), self.c1.diff(X), self.ext)
        if not self.c1:
            return base
        return base + self.ext.gen_derivative * self.c1

    def __bool__(self):
        return bool(self.c0) or bool(self.c1)

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except Exception:
            return NotImplemented
        return self.c0 == other.c0 and self.c1 == other.c1

    def __hash__(self):
        return hash((str(self.c0), str(self.c1)))

    def to_str(self) -> str:
        c0 = str(self.c0.as_expr().factor()).replace("**", "^")
        c1 = str(self.c1.as_expr().factor()).replace("**", "^")
        return f"({c0}) + ({c1})*y"

    def __repr__(self):
        return self.to_str()


def minpoly_to_poly(coeffs: Sequence[FracElement]) -> Poly:
    """m(x, y) as a sympy Poly in x, y with integer coefficients and content removed."""
    y = Symbol("y")
    expr = sum(ratfun(c).as_expr() * y ** j for j, c in enumerate(coeffs))
    poly = Poly(expr.together().as_numer_denom()[0], X_SYMBOL, y)
    _, poly = poly.clear_denoms()
    poly = poly.primitive()[1]
    if poly.LC() < 0:
        poly = -poly
    return poly


def mod_power(value: int, exponent: Fraction, ell: int) -> List[int]:
    """All residues r with r^den = value^num mod ell, for exponent num/den."""
    exponent = to_rat(exponent)
    target = pow(value, exponent.numerator, ell) if exponent.numerator >= 0 else pow(pow(value, -1, ell), -exponent.numerator, ell)
    den = exponent.denominator
    return [r for r in range(1, ell) if pow(r, den, ell) == target]
