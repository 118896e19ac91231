"""
Quotient Method
Recovers the pullback of a 2F1-type solution from quotients of local solutions:
modular sweep over the unknown constant, Hensel lifting, rational and
algebraic reconstruction, recovery of the exp-product part and exact
certification.
"""

import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, List, NamedTuple, Optional, Tuple

import numpy as np

from config.settings import Settings, SolveConfig
from core.candidates import (
    CandidateTriple,
    GHDOParams,
    SingularStructure,
    align_triple,
    find_expdiffs,
    ghdo_from_triple,
    ghdo_operator,
    singular_structure,
)
from core.diffop import (
    DiffOp,
    GaugeOperator,
    Place,
    change_of_variables,
    exp_product,
    exponent_difference,
    gauge_transform,
    indicial_exponents,
)
from core.exact_arith import (
    K,
    QX,
    X,
    QuadExtElem,
    QuadraticExtension,
    batched_has_kernel,
    mod_power,
    pm_add,
    pm_mul,
    pm_scale,
    poly_from_coeffs,
    ratfun,
    ratfun_eval,
    ratfun_reconstruct,
    ratnum_reconstruct,
    solve_linear_mod,
)
from core.exceptions import (
    BadPrime,
    HypSolveError,
    InvalidOperator,
    NegativePowers,
    PrecisionExhausted,
    ReconstructionFailure,
    Unsupported,
)
from core.frobenius import exp_solutions, is_regular_singular, local_solutions, move_point_to_zero
from core.series import PuiseuxSeries, compositional_inverse, series_exp, series_pow_rational
from utils.logger import setup_logger

logger = setup_logger(__name__)

ORIGIN = Place.rational(0)


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuotientData:
    """
    Local data of the quotient method at one expansion point.

    In both modes the pullback satisfies f = qinv(C*S) in the root parameter
    s = t^(1/rho) of the local parameter t, with C the leading coefficient of
    f. Non-logarithmic mode: q = y2/y1 of the base operator (normalized,
    valuation alpha), Q the same for the input, qinv the compositional inverse
    of q^(1/alpha) and S = Q^(1/alpha). Logarithmic mode: q = g = exp(y2/y1),
    Q = G = exp(Y2/Y1), qinv the inverse of g and S = G^v0.
    """

    place: Place
    params: GHDOParams
    mode: str
    alpha: Fraction
    delta: Fraction
    rho: int
    length: int
    q: PuiseuxSeries
    Q: PuiseuxSeries
    qinv: PuiseuxSeries
    base_argument: PuiseuxSeries

    def argument(self, v0: int = 1) -> PuiseuxSeries:
        if self.mode == "log":
            return self.base_argument ** v0
        return self.base_argument

    def argument_order(self, v0: int = 1) -> int:
        """Valuation of S in the root parameter."""
        if self.mode == "log":
            return v0
        return int(self.delta / self.alpha * self.rho)

    def power_count(self, v0: int = 1) -> int:
        return (self.length - 1) // self.argument_order(v0)


class SweepHit(NamedTuple):
    """A residue of C whose image of f reconstructs mod ell."""

    c: int
    roots: List[int]
    series: Tuple[int, ...]
    numer: Tuple[int, ...] = ()
    denom: Tuple[int, ...] = ()
    minpoly: Tuple[Tuple[int, ...], ...] = ()
    pivot: Optional[Tuple[int, int]] = None


@dataclass(frozen=True)
class LiftState:
    """
    Images mod ell^n of C and of f (as A/B with B(0) = 1, or as the
    coefficients of sum A_j(t) y^j with one coefficient fixed to 1).
    """

    ell: int
    n: int
    c: int
    v0: int
    series: Tuple[int, ...]
    numer: Tuple[int, ...] = ()
    denom: Tuple[int, ...] = ()
    minpoly: Tuple[Tuple[int, ...], ...] = ()
    pivot: Optional[Tuple[int, int]] = None

    @property
    def modulus(self) -> int:
        return self.ell ** self.n

    @property
    def algebraic(self) -> bool:
        return bool(self.minpoly)

    @classmethod
    def from_hit(cls, hit: SweepHit, ell: int, v0: int) -> "LiftState":
        return cls(ell, 1, hit.c, v0, hit.series, hit.numer, hit.denom, hit.minpoly, hit.pivot)


@dataclass(frozen=True)
class HypSolution:
    """
    A solution exp(int r)*(r0*2F1(a1,a2;b1;f) + r1*2F1'(f)) of the input.

    Without a gauge r0 = 1 and r1 = 0. With a gauge G the solution above
    belongs to the input while exp(int r)*2F1(f) solves gauge_transform(L, G).
    """

    params: GHDOParams
    pullback: object
    r: object
    a_f: int
    d_f: int
    minpoly: Optional[Tuple] = None
    gauge: Optional[GaugeOperator] = None
    inverse: Optional[GaugeOperator] = None
    branch: Optional[dict] = None
    certified: bool = False

    @property
    def algebraic(self) -> bool:
        return self.minpoly is not None

    def form2_coefficients(self) -> Tuple[object, object]:
        """(r0, r1) in front of 2F1(f) and its derivative 2F1'(f)."""
        if self.inverse is None:
            return K.one, K.zero
        h0, h1 = self.inverse.r0, self.inverse.r1
        r, f = self.r, self.pullback
        if isinstance(f, QuadExtElem):
            ext = f.ext
            h0, h1, r = ext.convert(h0), ext.convert(h1), ext.convert(r)
            return h0 + h1 * r, h1 * f.diff()
        return h0 + h1 * r, h1 * ratfun(f).diff(X)


@dataclass
class SearchStats:
    """Counters collected while searching; reported as diagnostics."""

    candidates: int = 0
    tried: int = 0
    primes: List[int] = field(default_factory=list)
    lift_levels: int = 0
    expansion_point: Optional[str] = None
    hits: int = 0
    elapsed: float = 0.0

    def use_prime(self, ell: int):
        if ell not in self.primes:
            self.primes.append(ell)

    def to_dict(self) -> dict:
        return {
            "candidates": self.candidates,
            "tried": self.tried,
            "primes": list(self.primes),
            "lift_levels": self.lift_levels,
            "expansion_point": self.expansion_point,
            "hits": self.hits,
            "elapsed": round(self.elapsed, 3),
        }


# ---------------------------------------------------------------------------
# Quotients
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _input_basis(op: DiffOp, place: Place, precision: int):
    return local_solutions(move_point_to_zero(op, place), ORIGIN, precision)


@lru_cache(maxsize=128)
def _base_data(params: GHDOParams, mode: str, precision: int):
    """(q, alpha, qinv) for the base operator at 0."""
    basis = local_solutions(ghdo_operator(params), ORIGIN, precision)
    if mode == "log":
        if not basis.logarithmic or basis.delta != 0:
            raise Unsupported(f"base operator {params} is not logarithmic with difference 0 at 0")
        g = _exp_quotient(basis)
        return g, Fraction(0), compositional_inverse(g)
    alpha = basis.delta
    q = basis.y2.part0 / basis.y1.part0
    unit = q.shift(-alpha).as_power_series()
    u = series_pow_rational(unit, 1 / alpha).shift(1)
    return q, alpha, compositional_inverse(u)


def _exp_quotient(basis) -> PuiseuxSeries:
    """t*exp(h/y1) for a logarithmic basis y1, y1*log t + h."""
    ratio = (basis.y2.part0 / basis.y1.part0).as_power_series()
    return series_exp(ratio).shift(1)


def _in_root_parameter(series: PuiseuxSeries, rho: int) -> PuiseuxSeries:
    """An ordinary power series in t rewritten in s with t = s^rho."""
    spread = series.with_ramification(rho)
    return PuiseuxSeries(spread.coeffs, spread.offset * rho, 1, spread.zero)


def build_quotients(L_inp: DiffOp, L_B: DiffOp, p: Place, a: int, mode: str,
                    params: Optional[GHDOParams] = None) -> QuotientData:
    """
    Quotient data of the input at p against the base operator at 0.

    Args:
        L_inp: input operator
        L_B: base operator (a GHDO with the aligned slot at 0)
        p: rational place or infinity of L_inp
        a: number of terms in the local parameter
        mode: "nonlog" or "log"
        params: parameters of L_B (recovered from L_B when omitted)

    Raises:
        Unsupported: algebraic place or mismatched local data
        NegativePowers: logarithmic place with a positive exponent difference
    """
    if p.is_algebraic:
        raise Unsupported(f"expansion at algebraic place {p} is not supported")
    if params is None:
        params = _params_of(L_B)
    delta = exponent_difference(L_inp.normalized(), p)
    if delta is None:
        raise Unsupported(f"irrational exponent difference at {p}")
    if mode == "log":
        if delta != 0:
            raise NegativePowers(f"logarithmic quotient at {p} with difference {delta} has negative powers")
        rho = 1
    else:
        alpha = exponent_difference(L_B, ORIGIN)
        if not alpha or delta.denominator == 1:
            raise Unsupported(f"non-logarithmic mode needs non-integer differences, got {delta} and {alpha}")
        rho = (delta / alpha).denominator
    length = a * rho
    precision = length + 4
    basis = _input_basis(L_inp, p, precision)
    q, alpha, qinv = _base_data(params, mode, precision)
    if mode == "log":
        if not basis.logarithmic:
            raise Unsupported(f"input is not logarithmic at {p}")
        big_q = _exp_quotient(basis)
        argument = big_q
    else:
        if basis.logarithmic:
            raise Unsupported(f"input is logarithmic at {p}")
        big_q = basis.y2.part0 / basis.y1.part0
        unit = big_q.shift(-delta).as_power_series()
        root = series_pow_rational(unit, 1 / alpha)
        argument = _in_root_parameter(root, rho).shift(int(delta / alpha * rho))
    logger.debug(f"quotients at {p}: mode={mode}, alpha={alpha}, delta={delta}, rho={rho}, terms={length}")
    return QuotientData(p, params, mode, alpha, delta, rho, length, q, big_q, qinv, argument)


def _params_of(L_B: DiffOp) -> GHDOParams:
    """a1, a2 from the exponents at infinity, b1 from the nonzero exponent 1 - b1 at 0."""
    at_inf = indicial_exponents(L_B, Place.infinity())
    at_zero = indicial_exponents(L_B, ORIGIN)
    if not all(isinstance(e, Fraction) for e in at_inf + at_zero):
        raise Unsupported("base operator parameters are irrational")
    other = at_zero[1] if at_zero[0] == 0 else at_zero[0]
    return GHDOParams(at_inf[0], at_inf[1], 1 - other)


# ---------------------------------------------------------------------------
# Modular sweep
# ---------------------------------------------------------------------------

def _power_table(s: List[int], count: int, length: int, ell: int) -> np.ndarray:
    """Rows S^k mod (ell, s^length) for k = 1..count."""
    base = np.array(s[:length], dtype=np.int64)
    table = np.zeros((count, length), dtype=np.int64)
    cur = base
    for k in range(count):
        table[k] = cur
        cur = np.convolve(cur, base)[:length] % ell
    return table


def _square_rows(images: np.ndarray, ell: int) -> np.ndarray:
    out = np.zeros_like(images)
    for n in range(images.shape[1]):
        out[:, n] = (images[:, : n + 1] * images[:, n::-1]).sum(axis=1) % ell
    return out


def _algebraic_columns(images: np.ndarray, d_f: int, a_f: int, rho: int, ell: int) -> np.ndarray:
    """Columns t^i*f^j (t = s^rho), i = 0..d_f, j = 0..a_f, for a batch of images."""
    batch, length = images.shape
    one = np.zeros_like(images)
    one[:, 0] = 1
    powers = [one, images, _square_rows(images, ell) if a_f > 1 else None]
    mats = np.zeros((batch, length, (a_f + 1) * (d_f + 1)), dtype=np.int64)
    for j in range(a_f + 1):
        for i in range(d_f + 1):
            shift = rho * i
            if shift < length:
                mats[:, shift:, j * (d_f + 1) + i] = powers[j][:, : length - shift]
    return mats


def _rational_mask(images: np.ndarray, d_f: int, ell: int) -> np.ndarray:
    """Hankel rank test: D*f has no terms in degrees d_f+1.. for some D of degree <= d_f."""
    length = images.shape[1]
    nrows = min(length - d_f - 1, 2 * (d_f + 1) + 4)
    rows = np.arange(d_f + 1, d_f + 1 + nrows)
    cols = np.arange(d_f + 1)
    idx = rows[:, None] - cols[None, :]
    mats = images[:, idx]
    return batched_has_kernel(mats, ell)


def _reconstruct_hit(c: int, image: List[int], qd: QuotientData, d_f: int, a_f: int, ell: int,
                     matrix: Optional[np.ndarray]) -> Optional[SweepHit]:
    roots = mod_power(c, qd.alpha, ell) if qd.mode == "nonlog" else [c]
    if a_f == 1:
        found = ratfun_reconstruct(image, d_f, d_f, ell)
        if found is None:
            return None
        # minimal degrees keep the lifted solution unique
        return SweepHit(c, roots, tuple(image), numer=tuple(found.numer), denom=tuple(found.denom))
    rows = matrix.tolist()
    solution = solve_linear_mod(rows, [0] * len(rows), ell)
    if solution is None or len(solution.kernel) != 1:
        return None
    vec = solution.kernel[0]
    pivot = next(k for k, v in enumerate(vec) if v)
    inv = pow(vec[pivot], -1, ell)
    vec = [v * inv % ell for v in vec]
    width = d_f + 1
    minpoly = tuple(tuple(vec[j * width:(j + 1) * width]) for j in range(a_f + 1))
    if not any(minpoly[a_f]):
        return None
    return SweepHit(c, roots, tuple(image), minpoly=minpoly, pivot=(pivot // width, pivot % width))


def sweep_c(qd: QuotientData, ell: int, d_f: int, a_f: int, v0: int = 1) -> List[SweepHit]:
    """
    Evaluate f(C) = qinv(C*S) mod (ell, s^length) for every C in 1..ell-1 and
    keep the residues whose image reconstructs.

    All residues are evaluated at once as the matrix product of the powers
    C^k*w_k with the powers S^k; a batched rank test discards residues before
    exact reconstruction.

    Raises:
        BadPrime: a series coefficient has a denominator divisible by ell
    """
    argument = qd.argument(v0)
    length = qd.length
    count = qd.power_count(v0)
    s_res = argument.residues(ell, length)
    w_res = qd.qinv.residues(ell, count + 1)
    table = _power_table(s_res, count, length, ell)
    weights = np.array(w_res[1: count + 1], dtype=np.int64)
    hits = []
    chunk = max(1, Settings.SWEEP_CHUNK)
    for start in range(1, ell, chunk):
        cs = np.arange(start, min(start + chunk, ell), dtype=np.int64)
        cpow = np.empty((len(cs), count), dtype=np.int64)
        cur = np.ones(len(cs), dtype=np.int64)
        for k in range(count):
            cur = cur * cs % ell
            cpow[:, k] = cur * weights[k] % ell
        images = cpow @ table % ell
        if a_f == 1:
            mats = None
            mask = _rational_mask(images, d_f, ell)
        else:
            mats = _algebraic_columns(images, d_f, a_f, qd.rho, ell)
            mask = batched_has_kernel(mats, ell)
        for idx in np.nonzero(mask)[0]:
            hit = _reconstruct_hit(
                int(cs[idx]), [int(v) for v in images[idx]], qd, d_f, a_f, ell,
                None if mats is None else mats[idx],
            )
            if hit is not None:
                hits.append(hit)
    logger.debug(f"sweep mod {ell} (d={d_f}, a_f={a_f}, v0={v0}): {len(hits)} residue(s)")
    return hits


# ---------------------------------------------------------------------------
# Hensel lifting
# ---------------------------------------------------------------------------

def _evaluate(weights: List[int], s: List[int], c: int, modulus: int, length: int) -> List[int]:
    """sum_k w_k (c*S)^k mod (modulus, s^length)."""
    t = pm_scale(list(s), c, modulus)
    acc = []
    for k in range(len(weights) - 1, 0, -1):
        acc = pm_add(pm_mul(t, acc, modulus, trunc=length), [weights[k]], modulus)
    out = pm_mul(t, acc, modulus, trunc=length)
    return out + [0] * (length - len(out))


def _spread(poly: Tuple[int, ...], rho: int) -> List[int]:
    if rho == 1:
        return list(poly)
    out = []
    for c in poly:
        out.append(c)
        out.extend([0] * (rho - 1))
    return out


def _shifted(series: List[int], shift: int, length: int) -> List[int]:
    return ([0] * shift + list(series))[:length] + [0] * max(0, length - shift - len(series))


def hensel_step(state: LiftState, qd: QuotientData) -> Optional[LiftState]:
    """
    Lift the state from ell^n to ell^(n+1).

    h(c + ell^n) - h(c) gives ell^n*h'(c); the unknown corrections of C and of
    the images of f are then the solution of a linear system over F_ell.

    Returns:
        The lifted state, or None when the system is inconsistent
    """
    ell, old = state.ell, state.modulus
    new = old * ell
    length = qd.length
    count = qd.power_count(state.v0)
    s_res = qd.argument(state.v0).residues(new, length)
    w_res = qd.qinv.residues(new, count + 1)
    h0 = _evaluate(w_res, s_res, state.c, new, length)
    h1 = _evaluate(w_res, s_res, state.c + old, new, length)
    deriv = [((b - a) % new) // old % ell for a, b in zip(h0, h1)]
    h0_bar = [v % ell for v in h0]
    if state.algebraic:
        lifted = _lift_algebraic(state, qd, h0, h0_bar, deriv, new, old)
    else:
        lifted = _lift_rational(state, h0, h0_bar, deriv, new, old, length)
    if lifted is None:
        logger.debug(f"lift to level {state.n + 1} mod {ell} is inconsistent")
        return None
    c1, extra = lifted
    c = (state.c + old * c1) % new
    if state.algebraic:
        return LiftState(ell, state.n + 1, c, state.v0, tuple(h0), minpoly=extra, pivot=state.pivot)
    numer, denom = extra
    return LiftState(ell, state.n + 1, c, state.v0, tuple(h0), numer=numer, denom=denom)


def _lift_rational(state, h0, h0_bar, deriv, new, old, length):
    ell = state.ell
    numer, denom = list(state.numer), list(state.denom)
    bh = pm_mul(denom, h0, new, trunc=length)
    bh = bh + [0] * (length - len(bh))
    rhs = []
    for i in range(length):
        diff = (bh[i] - (numer[i] if i < len(numer) else 0)) % new
        if diff % old:
            return None
        rhs.append(diff // old % ell)
    bd = pm_mul([v % ell for v in denom], deriv, ell, trunc=length)
    bd = bd + [0] * (length - len(bd))
    na, nb = len(numer), len(denom) - 1
    matrix = []
    for i in range(length):
        row = [1 if i == j else 0 for j in range(na)]
        row += [-h0_bar[i - j] % ell if i - j >= 0 else 0 for j in range(1, nb + 1)]
        row.append(-bd[i] % ell)
        matrix.append(row)
    solution = solve_linear_mod(matrix, rhs, ell)
    if solution is None:
        return None
    x = solution.particular
    a1, b1, c1 = x[:na], [0] + x[na:na + nb], x[-1]
    numer = tuple((v + old * w) % new for v, w in zip(numer, a1))
    denom = tuple((v + old * w) % new for v, w in zip(denom, b1))
    return c1, (numer, denom)


def _lift_algebraic(state, qd, h0, h0_bar, deriv, new, old):
    ell, rho, length = state.ell, qd.rho, qd.length
    degree = len(state.minpoly) - 1
    width = len(state.minpoly[0])
    powers_new = [[1] + [0] * (length - 1)]
    powers_bar = [[1] + [0] * (length - 1)]
    for _ in range(degree):
        p = pm_mul(powers_new[-1], h0, new, trunc=length)
        powers_new.append(p + [0] * (length - len(p)))
        p = pm_mul(powers_bar[-1], h0_bar, ell, trunc=length)
        powers_bar.append(p + [0] * (length - len(p)))
    total = []
    for j, coeffs in enumerate(state.minpoly):
        term = pm_mul(_spread(coeffs, rho), powers_new[j], new, trunc=length)
        total = pm_add(total, term, new)
    total = total + [0] * (length - len(total))
    rhs = []
    for v in total:
        if v % old:
            return None
        rhs.append(-(v // old) % ell)
    # d/dy of the minimal polynomial at f, times h'(c)
    dm = []
    for j in range(1, degree + 1):
        coeffs = [v * j % ell for v in state.minpoly[j]]
        dm = pm_add(dm, pm_mul(_spread(coeffs, rho), powers_bar[j - 1], ell, trunc=length), ell)
    c_col = pm_mul(dm, deriv, ell, trunc=length)
    c_col = c_col + [0] * (length - len(c_col))
    unknowns = [(j, i) for j in range(degree + 1) for i in range(width) if (j, i) != state.pivot]
    columns = [_shifted(powers_bar[j], rho * i, length) for j, i in unknowns]
    matrix = [[col[r] for col in columns] + [c_col[r]] for r in range(length)]
    solution = solve_linear_mod(matrix, rhs, ell)
    if solution is None:
        return None
    x = solution.particular
    updated = [list(c) for c in state.minpoly]
    for (j, i), v in zip(unknowns, x):
        updated[j][i] = (updated[j][i] + old * v) % new
    return x[-1], tuple(tuple(c) for c in updated)


def _rational_coeffs(values, modulus) -> List[Fraction]:
    """
    Raises:
        ReconstructionFailure: some value has no balanced rational preimage
    """
    out = []
    for v in values:
        r = ratnum_reconstruct(v, modulus)
        if r is None:
            raise ReconstructionFailure(f"no rational preimage of {v} mod {modulus}")
        out.append(r)
    return out


def reconstruct_state(state: LiftState):
    """
    Rational preimage of the lifted images.

    Returns:
        (A, B) coefficient lists, or the list of A_j coefficient lists, or None
    """
    m = state.modulus
    try:
        if state.algebraic:
            return [_rational_coeffs(coeffs, m) for coeffs in state.minpoly]
        return _rational_coeffs(state.numer, m), _rational_coeffs(state.denom, m)
    except ReconstructionFailure as e:
        logger.debug(f"level {state.n}: {e}")
        return None


def algebraic_lift(state: LiftState, qd: QuotientData, a_f: int = 2, max_lift_bits: int = Settings.MAX_LIFT_BITS,
                   accept: Optional[Callable] = None):
    """
    Lift the minimal polynomial of f until its coefficients reconstruct.

    Args:
        state: level-1 state of an algebraic sweep hit
        qd: quotient data the state belongs to
        a_f: degree of f over Q(x)
        max_lift_bits: give up once the modulus exceeds this many bits
        accept: called on each reconstruction; lifting stops when it returns
            a truthy value

    Returns:
        (minimal polynomial coefficients in Q(x), level), or None
    """
    if not state.algebraic or len(state.minpoly) != a_f + 1:
        raise ValueError(f"state does not carry a degree {a_f} minimal polynomial")
    for found, level in _lift_levels(state, qd, max_lift_bits):
        coeffs = [_local_to_global(c, qd.place) for c in found]
        if accept is None or accept(coeffs):
            return coeffs, level
    return None


def _lift_levels(state: LiftState, qd: QuotientData, max_lift_bits: int):
    """Yield each new reconstruction with its level, lifting until the bit budget is spent."""
    seen = set()
    while state is not None:
        found = reconstruct_state(state)
        if found is not None:
            key = repr(found)
            if key not in seen:
                seen.add(key)
                yield found, state.n
        if state.modulus.bit_length() > max_lift_bits:
            logger.debug(f"lift budget of {max_lift_bits} bits exhausted at level {state.n}")
            return
        state = hensel_step(state, qd)


def _local_to_global(coeffs, place: Place):
    """Polynomial in the local parameter t of the place, as a function of x."""
    poly = K(poly_from_coeffs(coeffs))
    return ratfun_eval(poly, place.local_parameter())


# ---------------------------------------------------------------------------
# Recovery of r and certification
# ---------------------------------------------------------------------------

def recover_r(M: DiffOp, L_inp: DiffOp):
    """
    r with exp_product(M, r) equal to L_inp up to a left factor.

    Returns:
        r (in Q(x) or the coefficient field of M), or None when the Dx^0
        coefficients disagree
    """
    if M.order != 2 or L_inp.order != 2:
        return None
    target = L_inp.over(M.domain) if M.domain != L_inp.domain else L_inp
    m, l = M.monic(), target.monic()
    r = (m.coefficient(1) - l.coefficient(1)) / 2
    if exp_product(M, r).equivalent(target):
        return r
    return None


def pullback_target(L_inp: DiffOp, gauge: Optional[GaugeOperator]) -> DiffOp:
    if gauge is None or gauge.is_identity:
        return L_inp.normalized()
    return gauge_transform(L_inp.normalized(), gauge)


def certify_solution(L_inp: DiffOp, solution: HypSolution) -> bool:
    """Exact check that the solution's transformation chain reproduces the input."""
    try:
        target = pullback_target(L_inp, solution.gauge)
        f = solution.pullback
        if solution.minpoly is not None:
            ext = QuadraticExtension.from_minpoly(solution.minpoly)
            f = ext.gen
        M = change_of_variables(ghdo_operator(solution.params), f)
        target = target.over(M.domain) if M.domain != QX else target
        expected = exp_product(M, solution.r)
        return expected.equivalent(target)
    except (HypSolveError, ZeroDivisionError, ValueError) as e:
        logger.warning(f"certification raised {type(e).__name__}: {e}")
        return False


def _verify_rational(L_target: DiffOp, params: GHDOParams, f) -> Optional[object]:
    if not f.diff(X):
        return None
    M = change_of_variables(ghdo_operator(params), f)
    return recover_r(M, L_target)


def _verify_algebraic(L_target: DiffOp, params: GHDOParams, coeffs):
    try:
        ext = QuadraticExtension.from_minpoly(coeffs)
    except ValueError:
        return None
    if not ext.is_field():
        logger.debug("reconstructed minimal polynomial is reducible")
        return None
    M = change_of_variables(ghdo_operator(params), ext.gen)
    r = recover_r(M, L_target)
    return None if r is None else (ext, r)


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------

def validate_operator(op: DiffOp):
    """
    Reject inputs outside the contract.

    Raises:
        InvalidOperator: order is not 2, an irregular singularity, or a
            hyperexponential solution (first order right factor)
    """
    if op.order != 2:
        raise InvalidOperator(f"operator must have order 2, got {op.order}")
    if not is_regular_singular(op):
        raise InvalidOperator("operator has an irregular singularity")
    if exp_solutions(op):
        raise InvalidOperator(
            "operator is reducible (hyperexponential solution); reduce it to first order factors first"
        )


def expansion_points(struct: SingularStructure) -> List[Tuple[Place, Fraction, bool]]:
    """
    True singular places usable for the quotient method, preferred first.

    Non-logarithmic rational places (smallest height first, infinity last),
    then logarithmic places with difference 0.

    Raises:
        NegativePowers: only logarithmic places with positive difference remain
        Unsupported: no rational true singularity
    """
    def key(entry):
        place = entry[0]
        return (1,) if place.is_infinity else (0,) + place.sort_key()

    rational = [e for e in struct.places() if not e[0].is_algebraic]
    nonlog = sorted((e for e in rational if not e[2]), key=key)
    logs = sorted((e for e in rational if e[2] and e[1] == 0), key=key)
    if nonlog or logs:
        return nonlog + logs
    if any(e[2] for e in rational):
        raise NegativePowers("only logarithmic expansion points with positive exponent difference")
    raise Unsupported("no rational true singularity")


def _solve_candidate(L_target: DiffOp, triple: CandidateTriple, points,
                     cfg: SolveConfig, stats: SearchStats) -> Optional[HypSolution]:
    """Run the quotient method at the first expansion point the candidate aligns with."""
    d, a_f = triple.d, triple.a_f
    precision = cfg.working_precision(a_f, d)
    for place, delta, logarithmic in points:
        alignments = align_triple(triple, delta, logarithmic)
        if not alignments:
            continue
        stats.expansion_point = str(place)
        mode = "log" if logarithmic else "nonlog"
        seen = set()
        for alignment in alignments:
            params = ghdo_from_triple(alignment.alphas)[0]
            if params in seen:
                continue
            seen.add(params)
            qd = build_quotients(L_target, ghdo_operator(params), place, precision, mode, params)
            for v0 in (range(1, d + 1) if mode == "log" else [1]):
                solution = _run_primes(L_target, qd, v0, triple, cfg, stats)
                if solution is not None:
                    return solution
        return None
    return None


def _run_primes(L_target, qd, v0, triple, cfg, stats) -> Optional[HypSolution]:
    params, place = qd.params, qd.place
    for ell in cfg.primes():
        stats.use_prime(ell)
        try:
            hits = sweep_c(qd, ell, triple.d, triple.a_f, v0)
        except BadPrime as e:
            logger.warning(f"bad prime {ell} for {params} at {place}: {e}")
            continue
        except PrecisionExhausted as e:
            logger.warning(f"precision exhausted for {params} at {place}: {e}")
            return None
        if not hits:
            continue
        stats.hits += len(hits)
        logger.info(f"{params} at {place}: {len(hits)} residue(s) mod {ell}, roots {hits[0].roots[:4]}")
        for hit in hits:
            solution = _lift_hit(L_target, params, qd, hit, ell, v0, triple, cfg, stats)
            if solution is not None:
                return solution
        return None
    return None


def _lift_hit(L_target, params, qd, hit, ell, v0, triple, cfg, stats) -> Optional[HypSolution]:
    state = LiftState.from_hit(hit, ell, v0)
    branch = {
        "point": str(qd.place),
        "order": str(Fraction(qd.argument_order(v0), qd.rho)),
        "leading_residue": hit.c,
        "modulus": ell,
    }
    if triple.a_f != 1:
        return _lift_algebraic_hit(L_target, params, qd, state, triple, cfg, stats, branch)
    for found, level in _lift_levels(state, qd, cfg.max_lift_bits):
        stats.lift_levels = max(stats.lift_levels, level)
        try:
            numer, denom = found
            f = _local_to_global(numer, qd.place) / _local_to_global(denom, qd.place)
            r = _verify_rational(L_target, params, f)
            if r is not None:
                logger.info(f"certified pullback {f.as_expr()} at level {level}")
                return HypSolution(params, f, r, 1, triple.d, branch=branch, certified=True)
        except (HypSolveError, ZeroDivisionError, ValueError) as e:
            logger.debug(f"reconstruction at level {level} rejected: {e}")
    return None


def _lift_algebraic_hit(L_target, params, qd, state, triple, cfg, stats, branch) -> Optional[HypSolution]:
    verified = []

    def accept(coeffs):
        try:
            result = _verify_algebraic(L_target, params, coeffs)
        except (HypSolveError, ZeroDivisionError, ValueError) as e:
            logger.debug(f"algebraic reconstruction rejected: {e}")
            return False
        if result is not None:
            verified.append(result)
        return result is not None

    lifted = algebraic_lift(state, qd, triple.a_f, cfg.max_lift_bits, accept)
    if lifted is None:
        return None
    coeffs, level = lifted
    stats.lift_levels = max(stats.lift_levels, level)
    ext, r = verified[-1]
    logger.info(f"certified algebraic pullback at level {level}")
    return HypSolution(params, ext.gen, r, triple.a_f, triple.d,
                       minpoly=tuple(coeffs), branch=branch, certified=True)


def find_2f1(L_inp: DiffOp, a_fmax: int = Settings.AF_MAX, cfg: Optional[SolveConfig] = None,
             stats: Optional[SearchStats] = None, validate: bool = True) -> List[HypSolution]:
    """
    Solutions exp(int r)*2F1(a1, a2; b1; f) of an order 2 operator.

    Args:
        L_inp: irreducible regular singular operator of order 2
        a_fmax: largest algebraic degree of f tried (1 or 2)
        cfg: solver configuration (defaults from Settings)
        stats: collects diagnostics when given
        validate: check order, regularity and reducibility first

    Returns:
        The first certified HypSolution found, as a list of at most one
        (empty when none is found)

    Raises:
        InvalidOperator: input violates the contract
        Unsupported: no usable expansion point
    """
    cfg = cfg or SolveConfig.from_settings()
    stats = stats if stats is not None else SearchStats()
    start = time.perf_counter()
    L = L_inp.normalized()
    if validate:
        validate_operator(L)
    struct = singular_structure(L)
    if struct.irrational:
        raise Unsupported("irrational exponent differences are not supported")
    points = expansion_points(struct)
    logger.info(f"expansion points: {[str(p[0]) for p in points]}")
    try:
        for a_f in range(1, a_fmax + 1):
            candidates = find_expdiffs(struct, a_f)
            stats.candidates += len(candidates)
            for triple in candidates:
                stats.tried += 1
                logger.debug(f"trying candidate {triple}")
                try:
                    solution = _solve_candidate(L, triple, points, cfg, stats)
                except (HypSolveError, ValueError, ZeroDivisionError) as e:
                    logger.warning(f"candidate {triple} skipped: {type(e).__name__}: {e}")
                    continue
                if solution is not None:
                    logger.info(f"solved with {solution.params}, a_f={a_f}, d={triple.d}")
                    return [solution]
        logger.info("no 2F1-type solution found")
        return []
    finally:
        stats.elapsed += time.perf_counter() - start
