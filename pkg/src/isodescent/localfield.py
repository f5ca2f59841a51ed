"""Local arithmetic at the places of Q, plus the unramified quadratic extension of Q_2.

The central routine decides whether the genus-one curve

    C : d y^2 = d^2 + e x^4      (glued with  d v^2 = d^2 u^4 + e,  u = 1/x)

has a point over a completion.  Multiplying through by d, a point on the
x-chart is an x with F(x) = d^3 + d e x^4 a square (or zero), and a point on
the u-chart is a u with G(u) = d e + d^3 u^4 a square.  x ranges over the
integers of the completion and u over its maximal ideal, which together cover
P^1.  Each chart is explored as a tree of residue discs x0 + p^k O:

* if F(x0) is a square (or zero) the centre itself is a witness;
* if every Taylor term of F(x0 + p^k t) - F(x0) has valuation at least
  v(F(x0)) + margin (margin 1 for odd p, 3 over the 2-adics) then F has the
  square class of F(x0) on the whole disc, so a nonsquare centre excludes
  the disc;
* otherwise the disc is split into its residue subdiscs.

Since F has simple roots the tree is finite, and every leaf is either a
witness or an exclusion, which is what the certificates record.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

from .arith import is_prime, jacobi, sqrt_mod_prime, valuation
from .errors import InvalidInput

Rational = Union[int, Fraction]

DEFAULT_DEPTH_CAP = 64
MAX_DEPTH_CAP = 256


@dataclass(frozen=True, order=True)
class Place:
    """A place of Q: a prime p, or the real place when ``p`` is None."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None and not is_prime(self.p):
            raise InvalidInput(f"{self.p} is not prime")

    @classmethod
    def real(cls) -> Place:
        return cls(None)

    @classmethod
    def parse(cls, text: str | int) -> Place:
        if isinstance(text, str) and text.strip().lower() in ("inf", "infinity", "oo", "real"):
            return cls(None)
        return cls(int(text))

    @property
    def is_real(self) -> bool:
        return self.p is None

    def sort_key(self) -> tuple[int, int]:
        return (0, 0) if self.p is None else (1, self.p)

    def __str__(self) -> str:
        return "inf" if self.p is None else str(self.p)


REAL = Place.real()


def _as_fraction(x: Rational) -> Fraction:
    x = Fraction(x)
    if x == 0:
        raise InvalidInput("zero is not allowed here")
    return x


def _split(x: Fraction, p: int) -> tuple[int, Fraction]:
    """Write x = p^v * u with u a p-adic unit."""
    vn = valuation(x.numerator, p)
    vd = valuation(x.denominator, p)
    return vn - vd, x / Fraction(p) ** (vn - vd)


def _unit_residue(u: Fraction, m: int) -> int:
    """Residue of a p-adic unit rational modulo m."""
    return u.numerator * pow(u.denominator, -1, m) % m


def local_square(x: Rational, v: Place) -> bool:
    """Whether the nonzero rational x is a square in Q_v."""
    x = _as_fraction(x)
    if v.is_real:
        return x > 0
    k, u = _split(x, v.p)
    if k % 2:
        return False
    if v.p == 2:
        return _unit_residue(u, 8) == 1
    return jacobi(_unit_residue(u, v.p), v.p) == 1


def hilbert_symbol(a: Rational, b: Rational, v: Place) -> int:
    """Hilbert symbol (a, b)_v: +1 iff a x^2 + b y^2 = 1 is solvable over Q_v."""
    a = _as_fraction(a)
    b = _as_fraction(b)
    if v.is_real:
        return -1 if a < 0 and b < 0 else 1
    p = v.p
    # multiplying by the square denominator^2 leaves the symbol unchanged
    A = a.numerator * a.denominator
    B = b.numerator * b.denominator
    alpha = valuation(A, p)
    beta = valuation(B, p)
    u = A // p**alpha
    w = B // p**beta
    if p == 2:
        eps_u = (u % 4 - 1) // 2 % 2
        eps_w = (w % 4 - 1) // 2 % 2
        om_u = (u * u - 1) // 8 % 2
        om_w = (w * w - 1) // 8 % 2
        e = eps_u * eps_w + alpha * om_w + beta * om_u
        return -1 if e % 2 else 1
    s = 1
    if alpha * beta % 2 and p % 4 == 3:
        s = -s
    if beta % 2:
        s *= jacobi(u, p)
    if alpha % 2:
        s *= jacobi(w, p)
    return s


# --------------------------------------------------------------------------
# The ring Z_2[w], w^2 = w + 1: integers of the unramified quadratic extension
# of Q_2.  Elements are exact members of Z[w]; 2 is still a uniformiser.


@dataclass(frozen=True)
class Zw:
    a: int
    b: int = 0

    def __add__(self, other):
        other = _zw(other)
        return Zw(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return Zw(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-_zw(other))

    def __rsub__(self, other):
        return _zw(other) - self

    def __mul__(self, other):
        o = _zw(other)
        return Zw(self.a * o.a + self.b * o.b, self.a * o.b + self.b * o.a + self.b * o.b)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out, base = Zw(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __bool__(self):
        return bool(self.a or self.b)

    def __eq__(self, other):
        if isinstance(other, int):
            other = Zw(other)
        return isinstance(other, Zw) and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def exact_div(self, n: int) -> Zw:
        if self.a % n or self.b % n:
            raise ArithmeticError(f"{self} not divisible by {n}")
        return Zw(self.a // n, self.b // n)

    def mod(self, n: int) -> Zw:
        return Zw(self.a % n, self.b % n)

    def __str__(self):
        return f"{self.a}+{self.b}w"


def _zw(x) -> Zw:
    return x if isinstance(x, Zw) else Zw(int(x))


class _Ring:
    """Integers of a completion: uniformiser p, residue representatives."""

    p: int
    margin: int
    label: str

    def residues(self) -> list:
        raise NotImplementedError

    def val(self, x) -> int:
        raise NotImplementedError

    def unit_is_square(self, u) -> bool:
        raise NotImplementedError

    def divide_p_power(self, x, k: int):
        raise NotImplementedError

    def reduce(self, x, k: int):
        raise NotImplementedError

    def scalar(self, n: int):
        return n

    def is_square(self, x) -> bool:
        m = self.val(x)
        return m % 2 == 0 and self.unit_is_square(self.divide_p_power(x, m))

    def all_residues(self, k: int) -> Iterator:
        """Representatives of O / p^k O."""
        raise NotImplementedError


class _PadicIntegers(_Ring):
    def __init__(self, p: int):
        self.p = p
        self.margin = 3 if p == 2 else 1
        self.label = str(p)

    def residues(self):
        return list(range(self.p))

    def val(self, x: int) -> int:
        return valuation(x, self.p)

    def unit_is_square(self, u: int) -> bool:
        if self.p == 2:
            return u % 8 == 1
        return jacobi(u, self.p) == 1

    def divide_p_power(self, x: int, k: int) -> int:
        return x // self.p**k

    def reduce(self, x: int, k: int) -> int:
        return x % self.p**k

    def all_residues(self, k: int):
        return iter(range(self.p**k))


class _UnramifiedTwoAdic(_Ring):
    p = 2
    margin = 3
    label = "Q2(sqrt5)"
    _RES = [Zw(0), Zw(1), Zw(0, 1), Zw(1, 1)]

    def __init__(self):
        self._unit_squares = {
            (s * s).mod(8) for s in (Zw(a, b) for a in range(8) for b in range(8)) if self._is_unit(s)
        }

    @staticmethod
    def _is_unit(x: Zw) -> bool:
        return bool(x.a % 2 or x.b % 2)

    def residues(self):
        return list(self._RES)

    def val(self, x: Zw) -> int:
        x = _zw(x)
        if not x:
            raise ValueError("valuation of 0")
        v = 0
        a, b = x.a, x.b
        while a % 2 == 0 and b % 2 == 0:
            a //= 2
            b //= 2
            v += 1
        return v

    def unit_is_square(self, u: Zw) -> bool:
        return _zw(u).mod(8) in self._unit_squares

    def divide_p_power(self, x, k: int) -> Zw:
        return _zw(x).exact_div(2**k)

    def reduce(self, x, k: int) -> Zw:
        return _zw(x).mod(2**k)

    def scalar(self, n: int) -> Zw:
        return Zw(n)

    def all_residues(self, k: int):
        n = 2**k
        return (Zw(a, b) for a in range(n) for b in range(n))


_RINGS: dict[int, _PadicIntegers] = {}


def _padic(p: int) -> _PadicIntegers:
    if p not in _RINGS:
        _RINGS[p] = _PadicIntegers(p)
    return _RINGS[p]


UNRAMIFIED_2 = _UnramifiedTwoAdic()


# --------------------------------------------------------------------------
# Torsors and certificates


@dataclass(frozen=True, order=True)
class QuarticTorsor:
    """The curve d y^2 = d^2 + e x^4 in P(1,2,1)."""

    d: int
    e: int

    def __post_init__(self):
        if self.d == 0 or self.e == 0:
            raise InvalidInput("d and e must be nonzero")

    def chart_coefficients(self, chart: str) -> tuple[int, int]:
        """(A, B) with the chart's square-test polynomial equal to A t^4 + B."""
        d, e = self.d, self.e
        if chart == "x":
            return d * e, d**3
        return d**3, d * e

    def __str__(self):
        return f"{self.d}*y^2 = {self.d}^2 + ({self.e})*x^4"


@dataclass(frozen=True)
class Witness:
    """A local point (t, w) on one chart, valid up to a Hensel-checked residual.

    Chart "x": d w^2 = d^2 + e t^4.   Chart "u": d w^2 = d^2 t^4 + e  (t = 1/x).
    ``w`` equals ``big_y / d`` where big_y^2 is close to the square-test value.
    """

    chart: str
    t: object
    big_y: object
    residual_valuation: int | None  # None: exact point (residual zero)
    hensel_bound: int

    @property
    def at_infinity(self) -> bool:
        return self.chart == "u" and not self.t

    def to_dict(self) -> dict:
        return {
            "chart": self.chart,
            "t": str(self.t),
            "y_times_d": str(self.big_y),
            "residual_valuation": None if self.residual_valuation is None else str(self.residual_valuation),
            "hensel_bound": str(self.hensel_bound),
        }


@dataclass(frozen=True)
class SolvabilityCertificate:
    torsor: QuarticTorsor
    place: str
    verdict: str  # "solvable" | "unsolvable" | "undecided"
    kind: str  # affine_witness | infinity_witness | real_sign | residue_exhaustion | depth_cap
    depth_used: int
    witness: Witness | None = None
    nodes: int = 0
    excluded_discs: int = 0
    note: str = ""

    @property
    def solvable(self) -> bool:
        return self.verdict == "solvable"

    @property
    def decided(self) -> bool:
        return self.verdict != "undecided"

    def to_dict(self) -> dict:
        out = {
            "torsor": {"d": str(self.torsor.d), "e": str(self.torsor.e)},
            "place": self.place,
            "verdict": self.verdict,
            "evidence": self.kind,
            "depth_used": str(self.depth_used),
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        if self.kind in ("residue_exhaustion", "depth_cap"):
            out["nodes"] = str(self.nodes)
            out["excluded_discs"] = str(self.excluded_discs)
        if self.note:
            out["note"] = self.note
        return out


def _taylor(ring: _Ring, A: int, B: int, x0) -> list:
    """Coefficients c_i of A (x0 + h)^4 + B = sum c_i h^i."""
    x2 = x0 * x0
    return [
        ring.scalar(B) + A * x2 * x2,
        4 * A * x2 * x0,
        6 * A * x2,
        4 * A * x0,
        ring.scalar(A),
    ]


def _variation_bound(ring: _Ring, coeffs: list, k: int) -> float:
    best = float("inf")
    for i in range(1, 5):
        c = coeffs[i]
        if c:
            best = min(best, ring.val(c) + i * k)
    return best


def _square_root_approx(ring: _Ring, value, precision: int):
    """big_y with v(big_y^2 - value) >= v(value) + precision (value a nonzero square)."""
    m = ring.val(value)
    w = ring.divide_p_power(value, m)
    p = ring.p
    if p != 2:
        s = sqrt_mod_prime(w, p)
        mod = p
        while mod < p**precision:
            mod = min(mod * mod, p**precision)
            s = (s - (s * s - w) * pow(2 * s, -1, mod)) % mod
    else:
        s = next(s for s in ring.all_residues(2) if ring.reduce(s * s - w, 3) == 0)
        for k in range(3, precision):
            step = 2 ** (k - 1)
            s = next(s + step * r for r in ring.residues() if ring.reduce((s + step * r) ** 2 - w, k + 1) == 0)
    half = m // 2
    return s * p**half


def _make_witness(ring: _Ring, torsor: QuarticTorsor, chart: str, t, value) -> Witness:
    vd = ring.val(ring.scalar(torsor.d))
    delta = 1 if ring.p == 2 else 0
    if not value:
        return Witness(chart, t, ring.scalar(0), None, 0)
    big_y = _square_root_approx(ring, value, 2 * delta + vd + 4)
    resid = big_y * big_y - value
    resid_val = None if not resid else ring.val(resid) - vd
    bound = 2 * ring.val(2 * big_y)
    return Witness(chart, t, big_y, resid_val, bound)


def check_witness(torsor: QuarticTorsor, ring_label: str, w: Witness) -> bool:
    """Re-substitute a witness and check the Hensel criterion v(residual) > 2 v(2 d y)."""
    ring = _ring_for(ring_label)
    A, B = torsor.chart_coefficients(w.chart)
    if w.chart == "u" and w.t and ring.val(w.t) < 1:
        return False
    t = w.t if ring is not UNRAMIFIED_2 else _zw(w.t)
    value = ring.scalar(B) + A * t**4
    resid = w.big_y * w.big_y - value
    if not resid:
        return True
    if not w.big_y:
        return False
    vd = ring.val(ring.scalar(torsor.d))
    rv = ring.val(resid) - vd
    return rv == w.residual_valuation and rv > 2 * ring.val(2 * w.big_y)


def _ring_for(label: str) -> _Ring:
    if label == UNRAMIFIED_2.label:
        return UNRAMIFIED_2
    return _padic(int(label))


def _search_chart(ring: _Ring, torsor: QuarticTorsor, chart: str, depth_cap: int):
    """Explore one chart.  Returns (witness | None, capped, depth, nodes, excluded)."""
    A, B = torsor.chart_coefficients(chart)
    start = 0 if chart == "x" else 1
    stack = [(ring.scalar(0), start)]
    capped = False
    depth = start
    nodes = excluded = 0
    while stack:
        x0, k = stack.pop()
        nodes += 1
        depth = max(depth, k)
        coeffs = _taylor(ring, A, B, x0)
        f0 = coeffs[0]
        if not f0 or ring.is_square(f0):
            return _make_witness(ring, torsor, chart, x0, f0), False, depth, nodes, excluded
        m = ring.val(f0)
        if _variation_bound(ring, coeffs, k) >= m + ring.margin:
            excluded += 1
            continue
        if k >= depth_cap:
            capped = True
            continue
        step = ring.p**k
        for r in reversed(ring.residues()):
            stack.append((x0 + step * r, k + 1))
    return None, capped, depth, nodes, excluded


def _solve_in_ring(ring: _Ring, torsor: QuarticTorsor, depth_cap: int) -> SolvabilityCertificate:
    if depth_cap < 1:
        raise InvalidInput("depth_cap must be at least 1")
    total_nodes = total_excl = 0
    depth = 0
    capped_any = False
    A, B = torsor.chart_coefficients("u")
    if ring.is_square(ring.scalar(B)):
        w = _make_witness(ring, torsor, "u", ring.scalar(0), ring.scalar(B))
        return SolvabilityCertificate(torsor, ring.label, "solvable", "infinity_witness", 1, w, 1, 0)
    for chart in ("x", "u"):
        w, capped, dep, nodes, excl = _search_chart(ring, torsor, chart, depth_cap)
        total_nodes += nodes
        total_excl += excl
        depth = max(depth, dep)
        if w is not None:
            kind = "infinity_witness" if w.at_infinity else "affine_witness"
            return SolvabilityCertificate(torsor, ring.label, "solvable", kind, depth, w, total_nodes, total_excl)
        capped_any = capped_any or capped
    if capped_any:
        return SolvabilityCertificate(
            torsor, ring.label, "undecided", "depth_cap", depth, None, total_nodes, total_excl,
            note=f"depth cap {depth_cap} reached",
        )
    return SolvabilityCertificate(torsor, ring.label, "unsolvable", "residue_exhaustion", depth, None, total_nodes, total_excl)


def _real_certificate(torsor: QuarticTorsor) -> SolvabilityCertificate:
    d, e = torsor.d, torsor.e
    if d > 0:
        return SolvabilityCertificate(torsor, "inf", "solvable", "real_sign", 0, note="d > 0: x = 0 gives y^2 = d")
    if e < 0:
        return SolvabilityCertificate(torsor, "inf", "solvable", "real_sign", 0, note="e/d > 0: real points at infinity")
    return SolvabilityCertificate(torsor, "inf", "unsolvable", "real_sign", 0, note="d < 0 < e: d y^2 < 0 < d^2 + e x^4")


def torsor_solvable(torsor: QuarticTorsor, v: Place, depth_cap: int = DEFAULT_DEPTH_CAP) -> SolvabilityCertificate:
    """Decide whether the torsor has a Q_v-point, with a certificate."""
    if v.is_real:
        return _real_certificate(torsor)
    return _solve_in_ring(_padic(v.p), torsor, depth_cap)


def torsor_solvable_unramified_2ext(torsor: QuarticTorsor, D: int, depth_cap: int = DEFAULT_DEPTH_CAP) -> SolvabilityCertificate:
    """Decide solvability over Q_2(sqrt(D)) for D = 5 mod 8, the unramified quadratic extension."""
    if D % 8 != 5:
        raise InvalidInput(f"Q_2(sqrt({D})) is unramified over Q_2 only for D = 5 mod 8")
    return _solve_in_ring(UNRAMIFIED_2, torsor, depth_cap)


def solve_with_retry(torsor: QuarticTorsor, v: Place, depth_cap: int = DEFAULT_DEPTH_CAP, max_cap: int = MAX_DEPTH_CAP) -> SolvabilityCertificate:
    """torsor_solvable, doubling the depth cap on undecided results up to ``max_cap``."""
    cap = depth_cap
    while True:
        cert = torsor_solvable(torsor, v, cap)
        if cert.decided or cap >= max_cap:
            return cert
        cap = min(2 * cap, max_cap)


def revalidate(cert: SolvabilityCertificate) -> bool:
    """Independent re-check of a certificate.

    Witnesses are re-substituted.  Exhaustion certificates are re-checked by a
    flat sweep of every residue disc one level below the recorded depth: each
    disc centre must be a nonsquare whose square class is provably constant on
    its disc.
    """
    if cert.place == "inf":
        return cert == _real_certificate(cert.torsor)
    if cert.verdict == "solvable":
        return cert.witness is not None and check_witness(cert.torsor, cert.place, cert.witness)
    if cert.verdict != "unsolvable":
        return False
    ring = _ring_for(cert.place)
    level = cert.depth_used + 1
    for chart, lead in (("x", 0), ("u", 1)):
        A, B = cert.torsor.chart_coefficients(chart)
        for r in ring.all_residues(level - lead):
            x0 = ring.p**lead * r if lead else r
            coeffs = _taylor(ring, A, B, x0)
            f0 = coeffs[0]
            if not f0 or ring.is_square(f0):
                return False
            if _variation_bound(ring, coeffs, level) < ring.val(f0) + ring.margin:
                return False
    return True
