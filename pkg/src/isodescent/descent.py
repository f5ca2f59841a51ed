"""Descent via 2-isogeny on y^2 = x^3 + a x.

For E: y^2 = x^3 + a x and E': y^2 = x^3 - 4a x, the phi-Selmer group of E is
the set of classes d in Q(S, 2) whose torsor d y^2 = d^2 - 4a x^4 has a point
at every place of S; the phi-hat-Selmer group of E' uses d y^2 = d^2 + 16a x^4.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product

from .arith import SquareClass, is_square, prime_divisors, squarefree_class
from .errors import InconsistentResult, InvalidInput, UndecidedError
from .localfield import (
    DEFAULT_DEPTH_CAP,
    REAL,
    Place,
    QuarticTorsor,
    SolvabilityCertificate,
    solve_with_retry,
)

PHI = "phi"
PHI_HAT = "phihat"
SIDES = (PHI, PHI_HAT)


@dataclass(frozen=True)
class MonicIsogenyCurve:
    """y^2 = x^3 + a x, with the 2-isogeny to y^2 = x^3 - 4a x."""

    a: int

    def __post_init__(self):
        if self.a == 0:
            raise InvalidInput("a must be nonzero")

    @property
    def discriminant(self) -> int:
        return -64 * self.a**3

    @property
    def dual_coefficient(self) -> int:
        return -4 * self.a

    @property
    def full_two_torsion(self) -> bool:
        return is_square(-self.a)

    @property
    def two_torsion_dim(self) -> int:
        return 2 if self.full_two_torsion else 1

    def twist(self, D: int) -> MonicIsogenyCurve:
        return MonicIsogenyCurve(self.a * D * D)

    def torsor_coefficient(self, side: str) -> int:
        if side == PHI:
            return -4 * self.a
        if side == PHI_HAT:
            return 16 * self.a
        raise InvalidInput(f"unknown side {side!r}")


@dataclass(frozen=True)
class PlaceSet:
    places: tuple[Place, ...]

    def __post_init__(self):
        ps = tuple(sorted(set(self.places), key=Place.sort_key))
        if REAL not in ps or Place(2) not in ps:
            raise InvalidInput("a place set must contain the real place and 2")
        object.__setattr__(self, "places", ps)

    @property
    def finite_primes(self) -> list[int]:
        return [v.p for v in self.places if not v.is_real]

    def extend(self, primes) -> PlaceSet:
        return PlaceSet(self.places + tuple(Place(q) for q in primes))

    def __contains__(self, v) -> bool:
        return v in self.places

    def __iter__(self):
        return iter(self.places)

    def __len__(self):
        return len(self.places)

    def labels(self) -> list[str]:
        return [str(v) for v in self.places]


def bad_set(curve: MonicIsogenyCurve) -> PlaceSet:
    """The real place, 2, and the odd primes dividing a."""
    return PlaceSet((REAL, Place(2)) + tuple(Place(q) for q in prime_divisors(curve.a) if q != 2))


@dataclass(frozen=True)
class FieldSelmerGroup:
    """Q(S, 2): square classes with even valuation outside S."""

    generators: tuple[SquareClass, ...]
    elements: tuple[SquareClass, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, d) -> bool:
        return d in self.elements


def field_selmer(S: PlaceSet) -> FieldSelmerGroup:
    gens = (SquareClass(-1),) + tuple(SquareClass(q) for q in S.finite_primes)
    elems = set()
    for bits in product((0, 1), repeat=len(gens)):
        n = 1
        for g, b in zip(gens, bits):
            if b:
                n *= g.rep
        elems.add(squarefree_class(n))
    return FieldSelmerGroup(gens, tuple(sorted(elems, key=_class_key)))


def _class_key(d: SquareClass) -> tuple[int, int]:
    return (abs(d.rep), d.rep)


@dataclass(frozen=True)
class SelmerReport:
    side: str
    curve: MonicIsogenyCurve
    places: PlaceSet
    ambient: FieldSelmerGroup
    members: tuple[SquareClass, ...]
    certificates: dict = field(compare=True, hash=False)

    @property
    def dimension(self) -> int:
        return len(self.members).bit_length() - 1

    def certificate(self, d: int | SquareClass, v: Place | int | str) -> SolvabilityCertificate:
        d = d if isinstance(d, SquareClass) else SquareClass(d)
        v = v if isinstance(v, Place) else Place.parse(v)
        return self.certificates[(d, v)]

    def excluded_at(self, v: Place) -> list[SquareClass]:
        """Classes whose torsor has no point at v."""
        return [d for d in self.ambient.elements if not self.certificates[(d, v)].solvable]

    def __contains__(self, d) -> bool:
        d = d if isinstance(d, SquareClass) else SquareClass(d)
        return d in self.members


def _check(task):
    d, e, v, depth_cap = task
    return solve_with_retry(QuarticTorsor(d, e), v, depth_cap)


def phi_selmer(
    curve: MonicIsogenyCurve,
    side: str = PHI,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    places: PlaceSet | None = None,
    jobs: int = 1,
) -> SelmerReport:
    """The phi- (or phi-hat-) Selmer group, with a certificate for every (d, v)."""
    S = places or bad_set(curve)
    ambient = field_selmer(S)
    e = curve.torsor_coefficient(side)
    keys = [(d, v) for d in ambient.elements for v in S]
    tasks = [(d.rep, e, v, depth_cap) for d, v in keys]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            certs = list(pool.map(_check, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        certs = [_check(t) for t in tasks]
    table = dict(zip(keys, certs))
    for (d, v), c in table.items():
        if not c.decided:
            raise UndecidedError(f"torsor d={d} undecided at place {v} (depth {c.depth_used})", c, (d, v))
    members = tuple(d for d in ambient.elements if all(table[(d, v)].solvable for v in S))
    _check_subgroup(members)
    return SelmerReport(side, curve, S, ambient, members, table)


def _check_subgroup(members: tuple[SquareClass, ...]) -> None:
    ms = set(members)
    if SquareClass(1) not in ms:
        raise InconsistentResult("Selmer set does not contain the class 1")
    for x in members:
        for y in members:
            if x * y not in ms:
                raise InconsistentResult(f"Selmer set not closed: {x} * {y} missing")
    if len(ms) & (len(ms) - 1):
        raise InconsistentResult(f"Selmer set has order {len(ms)}, not a power of 2")


def kernel_quotient_dim(curve: MonicIsogenyCurve) -> int:
    """dim E'(Q)[phi-hat] / phi(E(Q)[2]): 1 unless -a is a square."""
    return 0 if curve.full_two_torsion else 1


@dataclass(frozen=True)
class Sha2Bound:
    upper_dim_raw: int
    upper_dim_parity: int | None
    finiteness_assumed: bool
    rank: int | None
    e: int
    f: int
    kernel_quotient_dim: int
    weak_mordell_weil_lower: int

    @property
    def best_dim(self) -> int:
        return self.upper_dim_raw if self.upper_dim_parity is None else self.upper_dim_parity

    @property
    def order_bound(self) -> int:
        return 2**self.best_dim

    @property
    def conditional_on(self) -> list[str]:
        out = []
        if self.rank is not None:
            out.append("rank")
        if self.finiteness_assumed:
            out.append("finiteness")
        return out

    def to_dict(self) -> dict:
        return {
            "upper_dim_raw": self.upper_dim_raw,
            "upper_dim_parity": self.upper_dim_parity,
            "order_bound": self.order_bound,
            "components": {
                "e": self.e,
                "f": self.f,
                "dim_kernel_quotient": self.kernel_quotient_dim,
                "dim_weak_mordell_weil_lower": self.weak_mordell_weil_lower,
            },
            "assumptions": {
                "finiteness_assumed": self.finiteness_assumed,
                "rank_provided": self.rank,
                "conditional_on": self.conditional_on,
            },
        }


def sha2_upper_bound(
    curve: MonicIsogenyCurve,
    e_dim: int,
    f_dim: int,
    rank: int | None = None,
    assume_finite: bool = False,
    *,
    kernel_dim: int | None = None,
    torsion_dim: int | None = None,
) -> Sha2Bound:
    """Upper bound on dim Sha(E)[2] from the two isogeny Selmer dimensions.

    ``kernel_dim`` and ``torsion_dim`` override the values over Q (used when the
    base field is a quadratic extension).
    """
    if rank is not None and rank < 0:
        raise InvalidInput("rank must be nonnegative")
    kq = kernel_quotient_dim(curve) if kernel_dim is None else kernel_dim
    tors = curve.two_torsion_dim if torsion_dim is None else torsion_dim
    wmw = (rank or 0) + tors
    raw = max(0, e_dim + f_dim - kq - wmw)
    parity = raw - raw % 2 if assume_finite else None
    return Sha2Bound(raw, parity, assume_finite, rank, e_dim, f_dim, kq, wmw)


@dataclass(frozen=True)
class DescentResult:
    curve: MonicIsogenyCurve
    phi: SelmerReport
    phihat: SelmerReport
    bound: Sha2Bound


def descend(
    curve: MonicIsogenyCurve,
    rank: int | None = None,
    assume_finite: bool = False,
    depth_cap: int = DEFAULT_DEPTH_CAP,
    places: PlaceSet | None = None,
    jobs: int = 1,
) -> DescentResult:
    phi = phi_selmer(curve, PHI, depth_cap, places, jobs)
    phihat = phi_selmer(curve, PHI_HAT, depth_cap, places, jobs)
    bound = sha2_upper_bound(curve, phi.dimension, phihat.dimension, rank, assume_finite)
    return DescentResult(curve, phi, phihat, bound)
