"""
Candidate Enumeration
Exponent-difference data of an input operator, a-priori degree bounds, the
Covol relation and the search for base operator triples and pullback degrees.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

from core.diffop import DiffOp, Place
from core.exact_arith import K, X, rat_gcd, rat_to_qq, to_rat
from core.exceptions import InvalidOperator
from core.frobenius import classify_singularities
from utils.logger import setup_logger

logger = setup_logger(__name__)


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SingularStructure:
    """
    Exponent differences of an operator, one entry per geometric point.

    Algebraic places contribute deg(place) identical entries.
    """

    e_inp: Tuple[Tuple[Place, Fraction, bool], ...]
    e_rem: Tuple[Fraction, ...]
    covol_input: Fraction
    irrational: bool = False

    @property
    def n_true(self) -> int:
        return len(self.e_inp)

    @property
    def has_log(self) -> bool:
        return any(log for _, _, log in self.e_inp)

    @property
    def log_deltas(self) -> List[Fraction]:
        return [delta for _, delta, log in self.e_inp if log]

    @property
    def nonlog_deltas(self) -> List[Fraction]:
        return [delta for _, delta, log in self.e_inp if not log]

    def places(self) -> List[Tuple[Place, Fraction, bool]]:
        """Distinct true singular places with their data."""
        seen = []
        for entry in self.e_inp:
            if entry not in seen:
                seen.append(entry)
        return seen


@dataclass(frozen=True)
class GHDOParams:
    """Parameters a1, a2; b1 of a Gauss hypergeometric operator."""

    a1: Fraction
    a2: Fraction
    b1: Fraction

    def __post_init__(self):
        for name in ("a1", "a2", "b1"):
            object.__setattr__(self, name, to_rat(getattr(self, name)))

    @property
    def is_irreducible(self) -> bool:
        values = (self.a1, self.a2, self.b1 - self.a1, self.b1 - self.a2)
        return all(v.denominator != 1 for v in values)

    def exponent_differences(self) -> Tuple[Fraction, Fraction, Fraction]:
        """(alpha_0, alpha_1, alpha_inf) at 0, 1 and infinity."""
        return (
            abs(1 - self.b1),
            abs(self.b1 - self.a1 - self.a2),
            abs(self.a1 - self.a2),
        )

    def operator(self) -> DiffOp:
        return ghdo_operator(self)

    def derivative_params(self) -> "GHDOParams":
        """Parameters of d/dz 2F1(a1, a2; b1; z) up to the factor a1*a2/b1."""
        return GHDOParams(self.a1 + 1, self.a2 + 1, self.b1 + 1)

    def as_list(self) -> List[Fraction]:
        return [self.a1, self.a2, self.b1]

    def __str__(self):
        return f"({self.a1}, {self.a2}; {self.b1})"


@dataclass(frozen=True)
class CandidateTriple:
    """
    Candidate exponent differences of the base operator and the pullback degree.

    The alphas are kept in canonical order: integers first, then descending.
    """

    alpha0: Fraction
    alpha1: Fraction
    alpha_inf: Fraction
    d: int
    a_f: int = 1

    @property
    def alphas(self) -> Tuple[Fraction, Fraction, Fraction]:
        return (self.alpha0, self.alpha1, self.alpha_inf)

    @property
    def denominator_lcm(self) -> int:
        out = 1
        for a in self.alphas:
            out = out * a.denominator // math.gcd(out, a.denominator)
        return out

    def as_list(self) -> list:
        return [self.alpha0, self.alpha1, self.alpha_inf, self.d]

    def __str__(self):
        return f"[{self.alpha0}, {self.alpha1}, {self.alpha_inf}, d={self.d}, a_f={self.a_f}]"


class LogCover(NamedTuple):
    """Integer slots covering the logarithmic singularities, with d exact or a bound."""

    alphas: Tuple[int, ...]
    degree: int
    exact: bool


class SlotAlignment(NamedTuple):
    """
    Triple reordered so the slot sitting over the expansion point comes first.

    ramification is Delta/alpha (the local order of the pullback); None when
    alpha = Delta = 0, where it is searched separately.
    """

    alphas: Tuple[Fraction, Fraction, Fraction]
    ramification: Optional[Fraction]
    slot: int


# ---------------------------------------------------------------------------
# Structure of the input
# ---------------------------------------------------------------------------

def singular_structure(op: DiffOp) -> SingularStructure:
    """
    Exponent-difference data of an order 2 operator.

    Returns:
        SingularStructure with the irrational flag set when some exponent
        difference is irrational
    """
    e_inp = []
    e_rem = []
    covol = Fraction(-2)
    irrational = False
    for sing in classify_singularities(op):
        if sing.kind in ("regular", "false"):
            continue
        if sing.delta is None:
            irrational = True
            continue
        entries = sing.place.degree
        covol += entries * (1 - sing.delta)
        if sing.kind == "removable":
            e_rem.extend([sing.delta] * entries)
        else:
            e_inp.extend([(sing.place, sing.delta, sing.logarithmic)] * entries)
    struct = SingularStructure(tuple(e_inp), tuple(e_rem), covol, irrational)
    logger.debug(
        f"singular structure: n_true={struct.n_true}, logs={struct.log_deltas}, "
        f"nonlogs={struct.nonlog_deltas}, removable={list(e_rem)}, covol={covol}"
    )
    return struct


def degree_bound(n_true: int, has_log: bool) -> int:
    """
    A-priori bound on the pullback degree.

    Raises:
        InvalidOperator: fewer than 3 true singularities
    """
    if n_true < 3:
        raise InvalidOperator(f"need at least 3 true singularities, got {n_true}")
    if has_log:
        return 6 * (n_true - 2)
    return math.floor(36 * (n_true - Fraction(7, 3)))


def covol(deltas: Iterable) -> Fraction:
    """-2 + sum(1 - Delta) on the projective line."""
    return Fraction(-2) + sum((1 - to_rat(d) for d in deltas), Fraction(0))


# ---------------------------------------------------------------------------
# Integer slots
# ---------------------------------------------------------------------------

def _divisors(n: int) -> List[int]:
    small = [k for k in range(1, math.isqrt(n) + 1) if n % k == 0]
    return sorted(set(small + [n // k for k in small]))


def cover_logs(struct: SingularStructure, a_f: int) -> List[LogCover]:
    """
    Integer exponent differences of the base operator explaining the logarithmic
    singularities of the input.

    Every logarithmic Delta needs a slot dividing a_f*Delta (0 for Delta = 0),
    every slot must divide some a_f*Delta, and 0 is a slot exactly when some
    Delta is 0. The pullback degree is a_f*sum(log Deltas)/sum(slots) when the
    slots do not sum to 0, otherwise the a-priori bound.
    """
    bound = degree_bound(struct.n_true, struct.has_log)
    logs = struct.log_deltas
    if not logs:
        return [LogCover((), bound, False)]
    has_zero = any(delta == 0 for delta in logs)
    values = set()
    if has_zero:
        values.add(0)
    for delta in logs:
        if delta > 0:
            values.update(_divisors(int(a_f * delta)))
    log_total = a_f * sum(logs, Fraction(0))
    covers = []
    for k in (1, 2, 3):
        for slots in itertools.combinations_with_replacement(sorted(values, reverse=True), k):
            if (0 in slots) != has_zero:
                continue
            if not all(_covered(delta, slots, a_f) for delta in logs):
                continue
            total = sum(slots)
            if total == 0:
                covers.append(LogCover(slots, bound, False))
                continue
            degree = log_total / total
            if degree.denominator != 1 or degree < 1 or degree > bound:
                continue
            covers.append(LogCover(slots, int(degree), True))
    logger.debug(f"log covers for a_f={a_f}: {covers}")
    return covers


def _covered(delta: Fraction, slots: Sequence[int], a_f: int) -> bool:
    if delta == 0:
        return 0 in slots
    target = a_f * delta
    return any(s > 0 and target % s == 0 for s in slots)


# ---------------------------------------------------------------------------
# Fractional slots
# ---------------------------------------------------------------------------

def _is_fractional(alpha: Fraction) -> bool:
    return alpha > 0 and alpha.denominator != 1


def _gamma_max(deltas: Iterable[Fraction], a_f: int, cap: int) -> List[Fraction]:
    """{a_f*max(S)/b : b = 1..cap}."""
    deltas = list(deltas)
    if not deltas:
        return []
    top = a_f * max(deltas)
    return [top / b for b in range(1, cap + 1)]


def _gamma_all(deltas: Iterable[Fraction], a_f: int, cap: int) -> List[Fraction]:
    """{a_f*a/b : a in S, b = 1..cap}."""
    out = set()
    for delta in deltas:
        if delta > 0:
            out.update(a_f * delta / b for b in range(1, cap + 1))
    return sorted(out, reverse=True)


def _outside(deltas: Iterable[Fraction], alpha: Fraction, a_f: int) -> List[Fraction]:
    """Deltas that are not multiples of alpha/a_f."""
    return [d for d in deltas if (a_f * d / alpha).denominator != 1]


def _in_gamma_inf(alpha: Fraction, omega: List[Fraction], free: List[Fraction], a_f: int, cap: int) -> bool:
    if omega:
        b = a_f * rat_gcd(omega) / alpha
        return b.denominator == 1 and 1 <= b <= cap
    return alpha in free


class _DegreeSets:
    """Subset-sum sets D_v of admissible pullback degrees, per slot value v."""

    def __init__(self, struct: SingularStructure, a_f: int, cap: int):
        self.deltas = [d for _, d, _ in struct.e_inp] + list(struct.e_rem)
        self.a_f = a_f
        self.cap = cap
        self._cache = {}

    def get(self, v: Fraction) -> frozenset:
        if v not in self._cache:
            self._cache[v] = self._compute(v)
        return self._cache[v]

    def _compute(self, v: Fraction) -> frozenset:
        parts = []
        for delta in self.deltas:
            if delta <= 0:
                continue
            q = delta / v
            if q.denominator == 1:
                parts.append(int(q))
                if self.a_f == 2:
                    parts.append(int(q))
            if self.a_f == 2:
                q2 = 2 * delta / v
                if q2.denominator == 1:
                    parts.append(int(q2))
        unlimited = []
        if v.denominator != 1:
            for numer in range(1, self.a_f + 1):
                q = numer / v
                if q.denominator == 1:
                    unlimited.append(int(q))
        reachable = [False] * (self.cap + 1)
        reachable[0] = True
        for p in parts:
            if p > self.cap:
                continue
            for total in range(self.cap, p - 1, -1):
                if reachable[total - p]:
                    reachable[total] = True
        for p in unlimited:
            if p > self.cap:
                continue
            for total in range(p, self.cap + 1):
                if reachable[total - p]:
                    reachable[total] = True
        return frozenset(d for d in range(1, self.cap + 1) if reachable[d])

    def admits(self, d: int, alphas: Iterable[Fraction]) -> bool:
        return all(d in self.get(a) for a in alphas if a != 0)


def _explains(struct: SingularStructure, alphas: Sequence[Fraction], d: int, a_f: int) -> bool:
    """Every true exponent difference is e*alpha with e*a_f in 1..d (0 needs a 0 slot)."""
    for _, delta, _ in struct.e_inp:
        if delta == 0:
            if 0 not in alphas:
                return False
            continue
        ok = False
        for alpha in alphas:
            if alpha <= 0:
                continue
            k = a_f * delta / alpha
            if k.denominator == 1 and 1 <= k <= d:
                ok = True
                break
        if not ok:
            return False
    return True


def schwarz_ok(alphas: Iterable[Fraction]) -> bool:
    """sum of 1/denominator over the non-integer alphas is below 1."""
    total = sum((Fraction(1, a.denominator) for a in alphas if a.denominator != 1), Fraction(0))
    return total < 1


def canonical_order(alphas: Iterable[Fraction]) -> Tuple[Fraction, Fraction, Fraction]:
    """Integers first, each group descending."""
    alphas = [to_rat(a) for a in alphas]
    ints = sorted((a for a in alphas if a.denominator == 1), reverse=True)
    fracs = sorted((a for a in alphas if a.denominator != 1), reverse=True)
    return tuple(ints + fracs)


def find_expdiffs(struct: SingularStructure, a_f: int) -> List[CandidateTriple]:
    """
    Candidate triples [alpha_0, alpha_1, alpha_inf, d] for the input data.

    Integer slots come from cover_logs; the first fractional slot ranges over
    divisions of the largest non-logarithmic Delta (or of removable Deltas and
    1), further slots over divisions of the gcd of the still unexplained
    Deltas, and the last slot is pinned by the Covol relation for each degree
    in the intersection of the subset-sum sets.
    """
    if struct.irrational:
        logger.info("irrational exponent difference: no candidates")
        return []
    s_n = sorted(set(struct.nonlog_deltas), reverse=True)
    s_r = sorted(set(struct.e_rem), reverse=True)
    found = {}
    for cover in cover_logs(struct, a_f):
        cap = cover.degree
        degree_sets = _DegreeSets(struct, a_f, cap)
        degrees = [cap] if cover.exact else list(range(1, cap + 1))
        free = _gamma_all(s_n + s_r + [Fraction(1)], a_f, cap)
        first = _gamma_max(s_n, a_f, cap) if s_n else _gamma_all(s_r + [Fraction(1)], a_f, cap)
        ints = tuple(Fraction(a) for a in cover.alphas)
        for alphas, d in _fill_slots(struct, a_f, ints, degrees, first, free, s_n, cap, degree_sets):
            triple = _accept(struct, a_f, alphas, d)
            if triple is not None:
                found.setdefault((triple.alphas, d), triple)
    out = sorted(found.values(), key=lambda t: (t.d, t.denominator_lcm, [-a for a in t.alphas]))
    logger.info(f"a_f={a_f}: {len(out)} candidate triple(s)")
    return out


def _last_slot(struct: SingularStructure, a_f: int, others: Sequence[Fraction], d: int) -> Fraction:
    """alpha fixed by Covol_inp = (d/a_f)*(-2 + sum(1 - alpha))."""
    return 1 - a_f * struct.covol_input / d - sum(others, Fraction(0))


def _fill_slots(struct, a_f, ints, degrees, first, free, s_n, cap, degree_sets):
    k = len(ints)
    if k == 3:
        for d in degrees:
            if sum((1 - a for a in ints), Fraction(0)) == 2 + a_f * struct.covol_input / d:
                yield ints, d
        return
    if k == 2:
        for d in degrees:
            if not degree_sets.admits(d, ints):
                continue
            last = _last_slot(struct, a_f, ints, d)
            if _is_fractional(last) and d in degree_sets.get(last):
                yield ints + (last,), d
        return
    for alpha in first:
        if not _is_fractional(alpha):
            continue
        omega = _outside(s_n, alpha, a_f)
        if k == 1:
            for d in degrees:
                if not degree_sets.admits(d, ints + (alpha,)):
                    continue
                last = _last_slot(struct, a_f, ints + (alpha,), d)
                if not _is_fractional(last) or d not in degree_sets.get(last):
                    continue
                if _in_gamma_inf(last, omega, free, a_f, cap):
                    yield ints + (alpha, last), d
            continue
        second = _gamma_max(omega, a_f, cap) if omega else free
        for beta in second:
            if not _is_fractional(beta):
                continue
            omega2 = _outside(omega, beta, a_f)
            for d in degrees:
                if not degree_sets.admits(d, (alpha, beta)):
                    continue
                last = _last_slot(struct, a_f, (alpha, beta), d)
                if not _is_fractional(last) or d not in degree_sets.get(last):
                    continue
                if _in_gamma_inf(last, omega2, free, a_f, cap):
                    yield (alpha, beta, last), d


def _accept(struct: SingularStructure, a_f: int, alphas, d: int) -> Optional[CandidateTriple]:
    alphas = canonical_order(alphas)
    if not schwarz_ok(alphas):
        return None
    if not _explains(struct, alphas, d, a_f):
        return None
    triple = CandidateTriple(alphas[0], alphas[1], alphas[2], d, a_f)
    if not ghdo_from_triple(triple):
        return None
    return triple


# ---------------------------------------------------------------------------
# Base operators
# ---------------------------------------------------------------------------

def ghdo_from_triple(t) -> List[GHDOParams]:
    """
    All irreducible parameter sets with exponent differences t at 0, 1, infinity.

    Canonical representative first: b1 = 1 - alpha0, b1 - a1 - a2 = alpha1,
    a1 - a2 = -alpha_inf. Sets equal up to swapping a1 and a2 are reported once.

    Args:
        t: CandidateTriple or a sequence (alpha0, alpha1, alpha_inf)
    """
    alphas = t.alphas if isinstance(t, CandidateTriple) else tuple(to_rat(a) for a in t)
    alpha0, alpha1, alpha_inf = alphas
    out = []
    seen = set()
    for s0, s1, s_inf in itertools.product((1, -1), repeat=3):
        b1 = 1 - s0 * alpha0
        total = b1 - s1 * alpha1
        diff = -s_inf * alpha_inf
        params = GHDOParams((total + diff) / 2, (total - diff) / 2, b1)
        if not params.is_irreducible:
            continue
        key = (min(params.a1, params.a2), max(params.a1, params.a2), params.b1)
        if key in seen:
            continue
        seen.add(key)
        out.append(params)
    return out


@lru_cache(maxsize=256)
def ghdo_operator(params: GHDOParams) -> DiffOp:
    """x(1-x)Dx^2 + (b1 - (a1+a2+1)x)Dx - a1*a2."""
    a1, a2, b1 = (K(rat_to_qq(v)) for v in (params.a1, params.a2, params.b1))
    return DiffOp((-a1 * a2, b1 - (a1 + a2 + 1) * X, X * (1 - X)))


# ---------------------------------------------------------------------------
# Matching a slot to an expansion point
# ---------------------------------------------------------------------------

def align_triple(t: CandidateTriple, delta: Fraction, logarithmic: bool) -> List[SlotAlignment]:
    """
    Slots of t that can sit over a point with exponent difference delta.

    A non-logarithmic point with Delta > 0 needs a non-integer slot with
    a_f*Delta/alpha an integer in 1..d; a logarithmic point with Delta = 0
    needs a 0 slot. Logarithmic points with Delta > 0 have no alignment.
    """
    out = []
    seen = set()
    for i, alpha in enumerate(t.alphas):
        if alpha in seen:
            continue
        if logarithmic:
            if delta != 0 or alpha != 0:
                continue
            ramification = None
        else:
            if alpha.denominator == 1 or delta <= 0:
                continue
            k = t.a_f * delta / alpha
            if k.denominator != 1 or not 1 <= k <= t.d:
                continue
            ramification = k / t.a_f
        seen.add(alpha)
        rest = tuple(a for j, a in enumerate(t.alphas) if j != i)
        out.append(SlotAlignment((alpha,) + rest, ramification, i))
    return out
