"""Local and global Galois cohomology orders for quadratic twists, and the bounds built on them.

For L = Q(sqrt D) and an odd prime v of good reduction, the local group
H^1(Gal(L_w/Q_v), E(L_w)) is trivial when v is unramified in L and has order
#E~(F_v)[2] when v ramifies.  Globally #H^1(Gal(L/Q), E(L)) is at most
2^rank(E_D) * #E(Q)[2].  Everything here is exact rational arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import factor, fundamental_discriminant, is_prime, is_square, is_squarefree, jacobi, primes_from
from .descent import MonicIsogenyCurve
from .errors import InvalidInput, SearchExhausted
from .localfield import Place

DEFAULT_SEARCH_BOUND = 10**6


@dataclass(frozen=True)
class GeneralCurve:
    """y^2 = x^3 + a x^2 + b x, with 2-isogenous E': y^2 = x^3 - 2a x^2 + (a^2 - 4b) x."""

    a: int
    b: int

    def __post_init__(self):
        if self.b == 0 or self.a * self.a - 4 * self.b == 0:
            raise InvalidInput(f"y^2 = x^3 + {self.a}x^2 + {self.b}x is singular")

    @classmethod
    def coerce(cls, curve) -> GeneralCurve:
        if isinstance(curve, GeneralCurve):
            return curve
        if isinstance(curve, MonicIsogenyCurve):
            return cls(0, curve.a)
        if isinstance(curve, int):
            return cls(0, curve)
        a, b = curve
        return cls(int(a), int(b))

    @property
    def quadratic_disc(self) -> int:
        """a^2 - 4b: Q(E[2]) = Q(sqrt of this)."""
        return self.a * self.a - 4 * self.b

    @property
    def discriminant(self) -> int:
        return 16 * self.b * self.b * self.quadratic_disc

    @property
    def two_torsion_order(self) -> int:
        return 4 if is_square(self.quadratic_disc) else 2

    def has_good_reduction(self, q: int) -> bool:
        return self.discriminant % q != 0


def _odd_good_prime(curve: GeneralCurve, v: int) -> None:
    if v == 2 or not is_prime(v):
        raise InvalidInput(f"{v} is not an odd prime")
    if not curve.has_good_reduction(v):
        raise InvalidInput(f"curve has bad reduction at {v}")


def reduction_two_torsion(curve, v: int) -> int:
    """#E~(F_v)[2] = 1 + number of roots of x (x^2 + a x + b) mod v."""
    c = GeneralCurve.coerce(curve)
    _odd_good_prime(c, v)
    return 2 + (1 + jacobi(c.quadratic_disc % v, v))


def local_h1_order(curve, v: Place | int, D: int) -> int | None:
    """#H^1(Gal(L_w/Q_v), E(L_w)) for L = Q(sqrt D); None where only finiteness is known.

    At the real place the group is E(R)/E(R)^0 when L is complex, so its order
    is the number of real components.
    """
    c = GeneralCurve.coerce(curve)
    v = v if isinstance(v, Place) else Place.parse(v)
    if v.is_real:
        if D > 0:
            return 1
        return 2 if c.discriminant > 0 else 1
    q = v.p
    if q == 2 or not c.has_good_reduction(q):
        return None
    if fundamental_discriminant(D) % q == 0:
        return reduction_two_torsion(c, q)
    return 1


@dataclass(frozen=True)
class GrowthReport:
    D: int
    ramified_good_factors: tuple[tuple[int, int], ...]
    omitted_places: tuple[int, ...]
    rank_twist: int
    rank_base: int | None
    two_torsion: int

    @property
    def numerator(self) -> int:
        out = 1
        for _, k in self.ramified_good_factors:
            out *= k
        return out

    @property
    def denominator_bound(self) -> int:
        return 2**self.rank_twist * self.two_torsion

    @property
    def g_lower(self) -> Fraction:
        return Fraction(self.numerator, self.denominator_bound)

    @property
    def sha_growth_lower(self) -> Fraction:
        rank = self.rank_base or 0
        return self.g_lower / (self.two_torsion**3 * 2 ** (3 * rank))

    @property
    def conditional_on(self) -> list[str]:
        out = ["rank_twist"]
        if self.rank_base is None:
            out.append("rank_base_defaulted_to_0")
        else:
            out.append("rank_base")
        return out

    def to_dict(self) -> dict:
        return {
            "D": self.D,
            "ramified_good_factors": [{"prime": q, "local_order": k} for q, k in self.ramified_good_factors],
            "omitted_bad_or_wild_places": list(self.omitted_places),
            "numerator": self.numerator,
            "denominator_bound": self.denominator_bound,
            "g_lower": str(self.g_lower),
            "sha_growth_lower": str(self.sha_growth_lower),
            "conditional_on": self.conditional_on,
        }


def g_lower_bound(curve, D: int, rank_twist: int, rank_base: int | None = None) -> GrowthReport:
    """Lower bound for g(D) and for #Sha(E/L)[4] / #Sha(E_D/Q)[2].

    Only odd ramified primes of good reduction contribute; the rest are
    omitted, which keeps the numerator a valid lower bound.
    """
    c = GeneralCurve.coerce(curve)
    if D in (0, 1) or not is_squarefree(D):
        raise InvalidInput(f"{D} must be squarefree and not 0 or 1")
    if rank_twist < 0 or (rank_base is not None and rank_base < 0):
        raise InvalidInput("ranks must be nonnegative")
    factors, omitted = [], []
    for q, _ in factor(D).factors:
        if q == 2 or not c.has_good_reduction(q):
            omitted.append(q)
        else:
            factors.append((q, reduction_two_torsion(c, q)))
    return GrowthReport(D, tuple(factors), tuple(omitted), rank_twist, rank_base, c.two_torsion_order)


def _principal_form_represents(disc: int, q: int) -> bool:
    """Whether the principal form of negative discriminant ``disc`` represents q."""
    if disc % 4 == 0:
        A, B, C = 1, 0, -disc // 4
    else:
        A, B, C = 1, 1, (1 - disc) // 4
    y = 0
    # x^2 + B x y + C y^2 = q needs (B^2 - 4C) y^2 + 4q = disc y^2 + 4q to be a square
    while -disc * y * y <= 4 * q:
        if is_square(disc * y * y + 4 * q):
            return True
        y += 1
    return False


def split_prime_search(curve, count: int, bound: int = DEFAULT_SEARCH_BOUND, strict_hcf: bool = False) -> list[int]:
    """Ascending odd good primes splitting completely in Q(E[2]).

    Each returned prime v has #E~(F_v)[2] = 4.  ``strict_hcf`` also requires v
    to split completely in the Hilbert class field of Q(E[2]) (supported when
    that field is imaginary quadratic or Q itself).
    """
    c = GeneralCurve.coerce(curve)
    if count < 0:
        raise InvalidInput("count must be nonnegative")
    out: list[int] = []
    if count == 0:
        return out
    qd = c.quadratic_disc
    disc = None
    if strict_hcf and not is_square(qd):
        if qd > 0:
            raise InvalidInput("strict Hilbert-class-field mode needs Q(E[2]) imaginary quadratic")
        sf = 1
        for q, k in factor(qd).factors:
            if k % 2:
                sf *= q
        disc = fundamental_discriminant(-sf)
    for v in primes_from(3, bound):
        if not c.has_good_reduction(v) or jacobi(qd % v, v) != 1:
            continue
        if disc is not None and not _principal_form_represents(disc, v):
            continue
        if reduction_two_torsion(c, v) != 4:
            raise AssertionError(f"split prime {v} without full reduced 2-torsion")
        out.append(v)
        if len(out) == count:
            return out
    raise SearchExhausted(f"only {len(out)} of {count} split primes below {bound}")


@dataclass(frozen=True)
class TamagawaFactor:
    prime: int
    dims: tuple[int, int]

    @property
    def quotient(self) -> int:
        dim_e, dim_e_dual = self.dims
        if dim_e == dim_e_dual:
            return 2
        return 4 if (dim_e, dim_e_dual) == (1, 2) else 1

    @property
    def factor(self) -> Fraction:
        return Fraction(self.quotient, 2)

    def to_dict(self) -> dict:
        return {
            "prime": self.prime,
            "dim_E_D_2": self.dims[0],
            "dim_E'_D_2": self.dims[1],
            "quotient": self.quotient,
            "factor": str(self.factor),
        }


def tamagawa_factor(curve, q: int) -> TamagawaFactor:
    c = GeneralCurve.coerce(curve)
    _odd_good_prime(c, q)
    dim_e = 2 if jacobi(c.quadratic_disc % q, q) == 1 else 1
    dim_e_dual = 2 if jacobi(c.b % q, q) == 1 else 1
    return TamagawaFactor(q, (dim_e, dim_e_dual))


def _cor_gate(c: GeneralCurve) -> None:
    if is_square(c.b * c.quadratic_disc):
        raise InvalidInput(f"b/(a^2-4b) = {c.b}/{c.quadratic_disc} is a rational square: Q(E[2]) = Q(E'[2])")


def cor_prime_search(curve, count: int, bound: int = DEFAULT_SEARCH_BOUND) -> list[TamagawaFactor]:
    """Ascending odd good q inert in Q(E[2]) and split in Q(E'[2]) (local quotient 4)."""
    c = GeneralCurve.coerce(curve)
    _cor_gate(c)
    if count < 0:
        raise InvalidInput("count must be nonnegative")
    out: list[TamagawaFactor] = []
    if count == 0:
        return out
    for q in primes_from(3, bound):
        if not c.has_good_reduction(q):
            continue
        if jacobi(c.quadratic_disc % q, q) == -1 and jacobi(c.b % q, q) == 1:
            tf = tamagawa_factor(c, q)
            if tf.quotient != 4:
                raise AssertionError(f"prime {q} passed the search but has quotient {tf.quotient}")
            out.append(tf)
            if len(out) == count:
                return out
    raise SearchExhausted(f"only {len(out)} of {count} primes below {bound}")


def tamagawa_factors(curve, D: int) -> list[TamagawaFactor]:
    """Per-prime factors of h(D): odd q | D with good reduction."""
    c = GeneralCurve.coerce(curve)
    if D == 0 or not is_squarefree(D):
        raise InvalidInput(f"{D} is not squarefree")
    return [tamagawa_factor(c, q) for q in factor(D).primes() if c.has_good_reduction(q)]


def tamagawa_h(curve, D: int) -> Fraction:
    h = Fraction(1)
    for tf in tamagawa_factors(curve, D):
        h *= tf.factor
    return h


def tamagawa_lower_bound(curve, D: int, rank_twist: int) -> Fraction:
    """Lower bound h(D) / (2 * 2^rank(E_D) * #E(Q)[2]) for #Sha(E_D/Q)[2]."""
    c = GeneralCurve.coerce(curve)
    if rank_twist < 0:
        raise InvalidInput("rank must be nonnegative")
    return tamagawa_h(c, D) / (2 * 2**rank_twist * c.two_torsion_order)
