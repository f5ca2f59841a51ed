"""Quadratic twists of y^2 = x^3 + p x and the conditions under which Sha[2] is small.

Three gates on a pair (p, D) with l = -D prime:

* ``lemma-condition``: D = 5 mod 8 and p does not split in Q(sqrt D); then over
  K = Q(sqrt D), #K(S,2) = 8 and #Sha(E/K)[2] <= 4 (finiteness assumed).
* ``mainlemma-1``: p = 1 mod 4, D = 1 mod 4, p does not split;
* ``mainlemma-2``: p = 3 mod 4, D = 3 mod 4, p splits.
  Either of the last two forces Sha(E_D/Q)[2] = 0 (finiteness assumed).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .arith import factor, fundamental_discriminant, is_prime, is_squarefree, jacobi, primes_from
from .descent import PHI, PHI_HAT, MonicIsogenyCurve, SelmerReport, Sha2Bound, bad_set, phi_selmer, sha2_upper_bound
from .errors import ConditionFailure, InconsistentResult, InvalidInput, SearchExhausted, UndecidedError
from .localfield import DEFAULT_DEPTH_CAP, QuarticTorsor, SolvabilityCertificate, torsor_solvable_unramified_2ext

LEMMA_CONDITION = "lemma-condition"
MAINLEMMA_1 = "mainlemma-1"
MAINLEMMA_2 = "mainlemma-2"
VARIANTS = (LEMMA_CONDITION, MAINLEMMA_1, MAINLEMMA_2)

DEFAULT_SEARCH_BOUND = 10**6


@dataclass(frozen=True)
class TwistParameter:
    D: int
    l: int | None = None

    def __post_init__(self):
        if self.D in (0, 1) or not is_squarefree(self.D):
            raise InvalidInput(f"twist parameter {self.D} must be squarefree and not 0 or 1")
        if self.l is None and is_prime(abs(self.D)):
            object.__setattr__(self, "l", abs(self.D))


def twist_coefficient(a: int, D: int) -> int:
    """Coefficient of y^2 = x^3 + a D^2 x, the twist of y^2 = x^3 + a x by D."""
    if not is_squarefree(D):
        raise InvalidInput(f"{D} is not squarefree")
    return a * D * D


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    values: dict = field(default_factory=dict, hash=False)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "values": self.values}


@dataclass(frozen=True)
class ConditionTrace:
    variant: str
    p: int
    D: int
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "p": self.p,
            "D": self.D,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }


def default_variant(p: int) -> str:
    """The mainlemma variant matching p mod 4."""
    return MAINLEMMA_1 if p % 4 == 1 else MAINLEMMA_2


def check_conditions(p: int, D: int, variant: str) -> ConditionTrace:
    """Evaluate every hypothesis of the chosen gate, recording symbol values."""
    if variant not in VARIANTS:
        raise InvalidInput(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    if not (p > 2 and is_prime(p)):
        raise InvalidInput(f"p = {p} must be an odd prime")
    l = -D
    checks = [
        Check("D_negative", D < 0, {"D": D}),
        Check("l_prime", l > 1 and is_prime(l), {"l": l}),
        Check("l_ne_p", l != p, {"l": l, "p": p}),
    ]
    if variant == LEMMA_CONDITION:
        checks.append(Check("D_mod_8_is_5", D % 8 == 5, {"D_mod_8": D % 8}))
    else:
        want_p, want_d = (1, 1) if variant == MAINLEMMA_1 else (3, 3)
        checks.append(Check(f"p_mod_4_is_{want_p}", p % 4 == want_p, {"p_mod_4": p % 4}))
        checks.append(Check(f"D_mod_4_is_{want_d}", D % 4 == want_d, {"D_mod_4": D % 4}))
    sym = jacobi(D % p, p)
    if variant == MAINLEMMA_2:
        checks.append(Check("p_splits", sym == 1, {"(D/p)": sym}))
    else:
        checks.append(Check("p_not_split", sym != 1, {"(D/p)": sym}))
    return ConditionTrace(variant, p, D, tuple(checks))


def search_twists(p: int, variant: str, count: int, bound: int = DEFAULT_SEARCH_BOUND) -> list[tuple[TwistParameter, ConditionTrace]]:
    """The first ``count`` D = -l (l prime, ascending, l < bound) passing the gate."""
    if count < 0:
        raise InvalidInput("count must be nonnegative")
    out: list[tuple[TwistParameter, ConditionTrace]] = []
    if count == 0:
        return out
    for l in primes_from(3, bound):
        trace = check_conditions(p, -l, variant)
        if trace.passed:
            out.append((TwistParameter(-l, l), trace))
            if len(out) == count:
                return out
    raise SearchExhausted(f"only {len(out)} of {count} twists found for p={p}, {variant} below {bound}")


@dataclass(frozen=True)
class VanishingResult:
    trace: ConditionTrace
    phi: SelmerReport
    phihat: SelmerReport
    bound: Sha2Bound
    advisory: str | None = None


def verify_twist_vanishing(
    p: int,
    D: int,
    rank: int | None = None,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    variant: str | None = None,
    jobs: int = 1,
) -> VanishingResult:
    """Run the full descent on the twist by D and confirm Sha(E_D/Q)[2] = 0."""
    variant = variant or default_variant(p)
    if variant == LEMMA_CONDITION:
        raise InvalidInput("the vanishing pipeline uses the mainlemma variants")
    trace = check_conditions(p, D, variant)
    if not trace.passed:
        raise ConditionFailure(f"(p={p}, D={D}) fails {variant}: {', '.join(trace.failures())}", trace)
    curve = MonicIsogenyCurve(twist_coefficient(p, D))
    S = bad_set(curve).extend([-D])
    phi = phi_selmer(curve, PHI, depth_cap, S, jobs)
    phihat = phi_selmer(curve, PHI_HAT, depth_cap, S, jobs)
    bound = sha2_upper_bound(curve, phi.dimension, phihat.dimension, rank, assume_finite=True)
    if phi.dimension > 2 or phihat.dimension > 1 or bound.upper_dim_parity != 0:
        raise InconsistentResult(
            f"vanishing pipeline falsified for (p={p}, D={D}): e={phi.dimension}, f={phihat.dimension}, "
            f"parity bound {bound.upper_dim_parity}"
        )
    return VanishingResult(trace, phi, phihat, bound)


def genus_two_torsion(D: int) -> int:
    """#Cl[2] of the imaginary quadratic field Q(sqrt D), by genus theory."""
    if D >= 0:
        raise InvalidInput("genus theory here covers imaginary quadratic fields only (D < 0)")
    disc = fundamental_discriminant(D)
    r = len(factor(disc).factors)
    return 2 ** (r - 1)


@dataclass(frozen=True)
class ImQuadSelmerOrderReport:
    p: int
    D: int
    place_count: int
    unit_square_dim: int
    class_2_dim: int
    trace: ConditionTrace

    @property
    def total_order(self) -> int:
        return 2 ** (self.unit_square_dim + self.class_2_dim)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "D": self.D,
            "place_count": self.place_count,
            "unit_square_dim": self.unit_square_dim,
            "class_2_dim": self.class_2_dim,
            "total_order": self.total_order,
        }


def _lemma_gate(p: int, D: int) -> ConditionTrace:
    trace = check_conditions(p, D, LEMMA_CONDITION)
    if not trace.passed:
        raise ConditionFailure(f"(p={p}, D={D}) fails {LEMMA_CONDITION}: {', '.join(trace.failures())}", trace)
    return trace


def imquad_field_selmer_order(p: int, D: int) -> ImQuadSelmerOrderReport:
    """#K(S,2) for K = Q(sqrt D) under the lemma-condition gate.

    2 and p are inert and K has one infinite place, so #S = 3; the S-units have
    rank #S - 1 plus the torsion {+-1} mod squares, and |D| prime makes the
    class number odd.
    """
    trace = _lemma_gate(p, D)
    place_count = 3
    unit_square_dim = (place_count - 1) + 1
    class_2_dim = genus_two_torsion(D).bit_length() - 1
    return ImQuadSelmerOrderReport(p, D, place_count, unit_square_dim, class_2_dim, trace)


@dataclass(frozen=True)
class ImQuadShaBound:
    order_report: ImQuadSelmerOrderReport
    two_adic_certificate: SolvabilityCertificate
    bound: Sha2Bound

    @property
    def order_bound(self) -> int:
        return self.bound.order_bound


def imquad_sha_bound(p: int, D: int, depth_cap: int = DEFAULT_DEPTH_CAP) -> ImQuadShaBound:
    """#Sha(E/K)[2] bound for E: y^2 = x^3 + p x over K = Q(sqrt D)."""
    order = imquad_field_selmer_order(p, D)
    dim_ambient = order.total_order.bit_length() - 1
    cert = torsor_solvable_unramified_2ext(QuarticTorsor(2, p), D, depth_cap)
    if not cert.decided:
        raise UndecidedError(f"class 2 undecided over Q2(sqrt {D})", cert)
    e_dim = dim_ambient
    f_dim = dim_ambient - (0 if cert.solvable else 1)
    # over K, -p is not a square (|D| != p), so E(K)[2] has order 2
    bound = sha2_upper_bound(MonicIsogenyCurve(p), e_dim, f_dim, None, True, kernel_dim=1, torsion_dim=1)
    return ImQuadShaBound(order, cert, bound)


ORDER4_ADVISORY = (
    "Sha(E/Q) is asserted to contain an element of order 4; its period cannot divide the index 2 "
    "of any quadratic field, so Sha(E/K)[2] != 0 for every quadratic K."
)


def order4_obstruction_note(flag: bool, p: int | None = None, bound: Sha2Bound | None = None) -> str | None:
    """Advisory for a user-asserted order-4 element of Sha(E/Q).

    Raises InconsistentResult when a descent bound for E/Q already forces
    Sha(E/Q)[2] = 0, which no order-4 element allows.
    """
    if not flag:
        return None
    if bound is not None and bound.best_dim == 0:
        raise InconsistentResult("an order-4 element of Sha(E/Q) contradicts the computed bound Sha(E/Q)[2] = 0")
    prefix = f"p={p}: " if p is not None else ""
    return prefix + ORDER4_ADVISORY
