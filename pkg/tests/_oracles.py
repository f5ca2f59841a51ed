"""Brute-force reference implementations, independent of the library's algorithms."""
from __future__ import annotations

from math import gcd, isqrt


def trial_factor(n: int) -> dict[int, int]:
    n = abs(n)
    out: dict[int, int] = {}
    q = 2
    while q * q <= n:
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
        q += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def naive_is_prime(n: int) -> bool:
    return n > 1 and all(n % q for q in range(2, isqrt(n) + 1))


def euler_legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def vp(n: int, p: int) -> int:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def padic_square(n: int, p: int) -> bool:
    """Exact test for a nonzero integer being a square in Q_p."""
    if n == 0:
        return True
    k = vp(n, p)
    if k % 2:
        return False
    u = n // p**k
    if p == 2:
        return u % 8 == 1
    return any((y * y - u) % p == 0 for y in range(1, p))


def local_class_key(n: int, p: int) -> tuple[int, int]:
    k = vp(n, p)
    u = n // p**k
    return (k % 2, u % 8 if p == 2 else euler_legendre(u, p))


def _strip_even_power(n: int, p: int) -> int:
    k = vp(n, p)
    return n // p ** (k - k % 2)


_HILBERT_CACHE: dict = {}


def _conic_has_point(a: int, b: int, p: int) -> int:
    k = 4 if p == 2 else 2
    m = p**k
    for x in range(m):
        for y in range(m):
            if x % p == 0 and y % p == 0:
                continue
            v = a * x * x + b * y * y
            if v == 0 or padic_square(v, p):
                return 1
    return -1


def brute_hilbert(a: int, b: int, p: int) -> int:
    """(a,b)_p by searching z^2 = a x^2 + b y^2 with (x, y) primitive mod p^k."""
    a, b = _strip_even_power(a, p), _strip_even_power(b, p)
    key = (p, local_class_key(a, p), local_class_key(b, p))
    if key not in _HILBERT_CACHE:
        _HILBERT_CACHE[key] = _conic_has_point(a, b, p)
    return _HILBERT_CACHE[key]


def real_hilbert(a: int, b: int) -> int:
    return -1 if a < 0 and b < 0 else 1


# ---------------------------------------------------------------- torsors


def brute_torsor_solvable(d: int, e: int, p: int | None, depth: int) -> bool:
    """Existence of a Q_p-point on d y^2 = d^2 + e x^4 by a residue sweep.

    Searches x in Z/p^depth and 1/x in pZ/p^depth and accepts when the
    integer value d*(d^2 + e x^4) (resp. its u-chart analogue) is an exact
    p-adic square.  Positive answers are proofs; negative answers are
    conclusive once ``depth`` exceeds the library's certificate depth.
    """
    if p is None:
        return any(d * (d * d + e * x**4) >= 0 for x in (0, 1, 10, 1000))
    m = p**depth
    for x in range(m):
        v = d**3 + d * e * x**4
        if v == 0 or padic_square(v, p):
            return True
    for u in range(0, m, p):
        v = d * e + d**3 * u**4
        if v == 0 or padic_square(v, p):
            return True
    return False


# unramified quadratic extension of Q_2: pairs (s, t) = s + t w with w^2 = w + 1


def _zw_mul(x, y):
    a, b = x
    c, d = y
    return (a * c + b * d, a * d + b * c + b * d)


def _zw_val(x) -> int:
    a, b = x
    if a == 0 and b == 0:
        return 10**9
    k = 0
    while a % 2 == 0 and b % 2 == 0:
        a //= 2
        b //= 2
        k += 1
    return k


def _zw_unit_squares_mod8() -> set:
    out = set()
    for s in range(8):
        for t in range(8):
            if (s % 2, t % 2) != (0, 0):
                a, b = _zw_mul((s, t), (s, t))
                out.add((a % 8, b % 8))
    return out


_ZW_SQ8 = _zw_unit_squares_mod8()


def zw_square(x) -> bool:
    k = _zw_val(x)
    if k >= 10**9:
        return True
    if k % 2:
        return False
    a, b = x[0] >> k, x[1] >> k
    return (a % 8, b % 8) in _ZW_SQ8


def brute_torsor_unramified_2(d: int, e: int, depth: int) -> bool:
    m = 2**depth
    for s in range(m):
        for t in range(m):
            x2 = _zw_mul((s, t), (s, t))
            x4 = _zw_mul(x2, x2)
            v = (d**3 + d * e * x4[0], d * e * x4[1])
            if zw_square(v):
                return True
            if s % 2 == 0 and t % 2 == 0:
                w = (d * e + d**3 * x4[0], d**3 * x4[1])
                if zw_square(w):
                    return True
    return False


# ---------------------------------------------------------------- binary forms


def reduce_form(f):
    a, b, c = f
    while True:
        if c < a:
            a, b, c = c, -b, a
            continue
        if b > a or b <= -a:
            k = (a - b) // (2 * a)
            b, c = b + 2 * k * a, a * k * k + b * k + c
            continue
        if a == c and b < 0:
            b = -b
        return (a, b, c)


def reduced_forms(disc: int) -> list[tuple[int, int, int]]:
    out = []
    a = 1
    while 3 * a * a <= -disc:
        for b in range(-a + 1, a + 1):
            if (b * b - disc) % (4 * a):
                continue
            c = (b * b - disc) // (4 * a)
            if c < a or gcd(gcd(a, b), c) != 1:
                continue
            if a == c and b < 0:
                continue
            out.append((a, b, c))
        a += 1
    return out


def _xgcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def compose(f, g):
    """Gauss composition of primitive positive forms of equal discriminant, reduced."""
    if f[0] > g[0]:
        f, g = g, f
    a1, b1, c1 = f
    a2, b2, c2 = g
    disc = b1 * b1 - 4 * a1 * c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, u, v = _xgcd(s, d)
        x2, y2 = u, -v
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (b3 * b3 - disc) // (4 * a3)
    return reduce_form((a3, b3, c3))


def principal_form(disc: int):
    return reduce_form((1, disc % 2, (disc % 2 - disc) // 4))


def class_group_two_torsion(disc: int) -> int:
    forms = reduced_forms(disc)
    e = principal_form(disc)
    return sum(1 for f in forms if compose(f, f) == e)


def is_fundamental(disc: int) -> bool:
    if disc % 4 == 1:
        return all(k == 1 for k in trial_factor(disc).values())
    if disc % 4 == 0:
        m = disc // 4
        return m % 4 in (2, 3) and all(k == 1 for k in trial_factor(m).values())
    return False


# ---------------------------------------------------------------- reductions


def cubic_root_count(a2: int, a4: int, q: int) -> int:
    return sum(1 for x in range(q) if (x**3 + a2 * x * x + a4 * x) % q == 0)


def reduced_two_torsion(a2: int, a4: int, q: int) -> int:
    return 1 + cubic_root_count(a2, a4, q)
