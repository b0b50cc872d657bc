"""Factorization of multivariate polynomials over the rationals.

Pipeline for a nonzero polynomial ``p``:

1. pull out the rational unit and the monomial content;
2. trial-divide by caller-supplied hint factors (known irreducibles);
3. choose the variable of least positive degree, split off the content with
   respect to it (recursively factored) and square-free decompose the rest;
4. factor each square-free primitive part:

   * degree 1 in some variable: irreducible as it stands;
   * degree 2: split with the discriminant when it is a perfect square;
   * otherwise: Kronecker substitution to one variable, Zassenhaus over the
     integers (factor modulo a prime, Hensel lift, recombine), then inverse
     substitution and trial division.

A cheap certificate short-cuts step 4c: if specializing every other variable
to small integers leaves an irreducible univariate image of the same degree,
the primitive polynomial is irreducible.
"""

from __future__ import annotations

import random
from collections import Counter
from fractions import Fraction
from itertools import combinations
from math import gcd, isqrt, log
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .poly import (
    DEG_SHIFT,
    FIELD,
    NSLOTS,
    ONE,
    ZERO,
    Poly,
    PolyError,
    VarId,
    canonical,
    coefficients_in,
    degree_in,
    divide_exact,
    divide_monomial,
    from_coefficients,
    integer_primitive,
    mono_divides,
    mono_exponents,
    mono_var,
    monomial_content,
    partial,
    substitute,
)

Factors = List[Tuple[Poly, int]]


# ----------------------------------------------------------------- gcd

class _HeuristicFailed(Exception):
    pass


def _max_norm(p: Poly) -> int:
    return max((abs(c) for c in p.terms.values()), default=0)


def _int_content(p: Poly) -> int:
    g = 0
    for c in p.terms.values():
        g = gcd(g, int(c))
    return g


def _positive(p: Poly) -> Poly:
    if p.terms and p.terms[max(p.terms)] < 0:
        return -p
    return p


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Greatest common divisor over the rationals, returned in canonical form."""
    if not a.terms:
        return canonical(b)
    if not b.terms:
        return canonical(a)
    _, a = integer_primitive(a)
    _, b = integer_primitive(b)
    return canonical(_zgcd(a, b))


def _zgcd(a: Poly, b: Poly) -> Poly:
    """gcd of two integer polynomials, including the integer content."""
    if not a.terms:
        return _positive(b)
    if not b.terms:
        return _positive(a)
    ca, cb = _int_content(a), _int_content(b)
    c = gcd(ca, cb)
    if len(a.terms) == 1 or len(b.terms) == 1 or not a.variables() or not b.variables():
        return _gcd_with_monomial(a, b, c)
    pa = a.scale(Fraction(1, ca)) if ca != 1 else a
    pb = b.scale(Fraction(1, cb)) if cb != 1 else b
    if pa == pb or pa == -pb:
        return _positive(pa).scale(c)
    try:
        g = _heugcd(pa, pb)
    except _HeuristicFailed:
        g = _prs_gcd(pa, pb)
    return _positive(g).scale(c)


def _gcd_with_monomial(a: Poly, b: Poly, c: int) -> Poly:
    # One side is a monomial or constant: the gcd is a monomial.
    mono_side, other = (a, b) if len(a.terms) == 1 or not a.variables() else (b, a)
    if not mono_side.variables():
        return Poly.const(c)
    m = max(mono_side.terms)
    g = m
    for t in other.terms:
        g = _mono_gcd(g, t)
        if not g:
            break
    return Poly({g: c})


def _mono_gcd(a: int, b: int) -> int:
    from .poly import mono_gcd

    return mono_gcd(a, b)


def _pick_var(a: Poly, b: Poly) -> VarId:
    va, vb = set(a.variables()), set(b.variables())
    common = sorted(va | vb)
    return common[0]


def _heugcd(f: Poly, g: Poly) -> Poly:
    """Heuristic gcd of primitive integer polynomials (evaluation + interpolation)."""
    x = _pick_var(f, g)
    fn, gn = _max_norm(f), _max_norm(g)
    B = 2 * min(fn, gn) + 29
    xi = max(min(B, 99 * isqrt(B)), 2 * min(fn // max(1, abs(int(_lc_in(f, x)))), gn // max(1, abs(int(_lc_in(g, x))))) + 2)
    for _ in range(6):
        ff = substitute(f, x, xi)
        gg = substitute(g, x, xi)
        if ff.terms and gg.terms:
            h = _zgcd(ff, gg)
            H = _interpolate(h, xi, x)
            if H.terms:
                _, H = integer_primitive(H)
                if divide_exact(f, H) is not None and divide_exact(g, H) is not None:
                    return H
            cf = divide_exact(ff, h)
            if cf is not None:
                CF = _interpolate(cf, xi, x)
                if CF.terms:
                    Hq = divide_exact(f, CF)
                    if Hq is not None and Hq.terms:
                        _, Hq = integer_primitive(Hq)
                        if divide_exact(g, Hq) is not None:
                            return Hq
        xi = xi * 73794 * isqrt(isqrt(xi)) // 27011
    raise _HeuristicFailed


def _lc_in(p: Poly, x: VarId) -> int:
    top = coefficients_in(p, x)[-1]
    return top.terms[max(top.terms)]


def _interpolate(h: Poly, xi: int, x: VarId) -> Poly:
    """Symmetric xi-adic expansion of integer coefficients into powers of x."""
    out: Dict[int, int] = {}
    half = xi // 2
    for m, c in h.terms.items():
        c = int(c)
        k = 0
        while c:
            d = c % xi
            if d > half:
                d -= xi
            if d:
                if k >= 128:
                    return ZERO
                key = m + (mono_var(x, k) if k else 0)
                if (key >> DEG_SHIFT) >= 128:
                    return ZERO
                out[key] = out.get(key, 0) + d
            c = (c - d) // xi
            k += 1
    return Poly(out)


def _prs_gcd(f: Poly, g: Poly) -> Poly:
    """Primitive pseudo-remainder gcd, recursive on contents (fallback path)."""
    x = _pick_var(f, g)
    if degree_in(f, x) < degree_in(g, x):
        f, g = g, f
    if degree_in(g, x) == 0:
        return _zgcd(_content_in(f, x), g)
    cf, cg = _content_in(f, x), _content_in(g, x)
    c = _zgcd(cf, cg)
    f = divide_exact(f, cf)
    g = divide_exact(g, cg)
    while g.terms and degree_in(g, x) > 0:
        r = _pseudo_rem(f, g, x)
        f = g
        if not r.terms:
            g = ZERO
            break
        g = divide_exact(r, _content_in(r, x))
    if g.terms:
        # remainder became free of x: gcd of primitive parts is 1
        return c
    return c * _positive(divide_exact(f, _content_in(f, x)))


def _content_in(p: Poly, x: VarId) -> Poly:
    g = ZERO
    for c in coefficients_in(p, x):
        if c.terms:
            g = _zgcd(g, c)
            if not g.variables() and abs(_int_content(g)) == 1:
                return ONE
    return _positive(g)


def _pseudo_rem(f: Poly, g: Poly, x: VarId) -> Poly:
    dg = degree_in(g, x)
    lc = coefficients_in(g, x)[dg]
    xv = Poly.var(x)
    r = f
    while r.terms and degree_in(r, x) >= dg:
        dr = degree_in(r, x)
        lr = coefficients_in(r, x)[dr]
        r = r * lc - g * lr * xv ** (dr - dg)
    return r


# ------------------------------------------------------ polynomial roots

_LOWBITS = sum(1 << (i * FIELD) for i in range(NSLOTS + 1))


def poly_sqrt(d: Poly) -> Optional[Poly]:
    """Exact square root over the rationals, or ``None`` when ``d`` is not a square."""
    if not d.terms:
        return ZERO
    lm = max(d.terms)
    if lm & _LOWBITS:
        return None
    root_c = _rational_sqrt(Fraction(d.terms[lm]))
    if root_c is None:
        return None
    min_deg = min(m >> DEG_SHIFT for m in d.terms)
    if min_deg % 2:
        return None
    lm_r = lm >> 1
    r = Poly({lm_r: root_c})
    rem = d - r * r
    last = lm_r
    two_lc = 2 * root_c
    while rem.terms:
        lm_rem = max(rem.terms)
        if not mono_divides(lm_r, lm_rem):
            return None
        t_m = lm_rem - lm_r
        if t_m >= last or (t_m >> DEG_SHIFT) < min_deg // 2:
            return None
        t = Poly({t_m: Fraction(rem.terms[lm_rem]) / two_lc})
        rem = rem - (r * t).scale(2) - t * t
        r = r + t
        last = t_m
    return r


def _rational_sqrt(c: Fraction) -> Optional[Fraction]:
    if c < 0:
        return None
    n, d = isqrt(c.numerator), isqrt(c.denominator)
    if n * n == c.numerator and d * d == c.denominator:
        return Fraction(n, d)
    return None


# ------------------------------------------- univariate over the integers

UPoly = List[int]


def _trim(a: UPoly) -> UPoly:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pack_mul(a: Sequence[int], b: Sequence[int]) -> UPoly:
    """Product of non-negative coefficient lists via one big-integer multiply."""
    if not a or not b:
        return []
    ma = max(a)
    mb = max(b)
    if ma == 0 or mb == 0:
        return []
    bits = ma.bit_length() + mb.bit_length() + min(len(a), len(b)).bit_length() + 1
    A = _pack(a, bits)
    B = _pack(b, bits)
    C = A * B
    mask = (1 << bits) - 1
    out = []
    n = len(a) + len(b) - 1
    for _ in range(n):
        out.append(C & mask)
        C >>= bits
    return _trim(out)


def _pack(a: Sequence[int], bits: int) -> int:
    r = 0
    for c in reversed(a):
        r = (r << bits) | c
    return r


def _mul_mod(a: UPoly, b: UPoly, m: int) -> UPoly:
    return _trim([c % m for c in _pack_mul([c % m for c in a], [c % m for c in b])])


def _zmul(a: UPoly, b: UPoly) -> UPoly:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _symmetric(a: UPoly, m: int) -> UPoly:
    half = m // 2
    return _trim([(c % m) - m if (c % m) > half else c % m for c in a])


def _divmod_mod(a: UPoly, b: UPoly, m: int) -> Tuple[UPoly, UPoly]:
    """Division with remainder modulo m; requires lc(b) invertible modulo m."""
    a = [c % m for c in a]
    _trim(a)
    db = len(b) - 1
    inv = pow(b[-1] % m, -1, m)
    if len(a) - 1 < db:
        return [], a
    q = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] % m
        if c:
            k = c * inv % m
            q[i - db] = k
            for j in range(db + 1):
                a[i - db + j] = (a[i - db + j] - k * b[j]) % m
    r = _trim(a[:db])
    return _trim(q), r


def _sub_mod(a: UPoly, b: UPoly, m: int) -> UPoly:
    n = max(len(a), len(b))
    return _trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % m for i in range(n)])


def _add_mod(a: UPoly, b: UPoly, m: int) -> UPoly:
    n = max(len(a), len(b))
    return _trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % m for i in range(n)])


def _gcd_mod(a: UPoly, b: UPoly, p: int) -> UPoly:
    a = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    while b:
        _, r = _divmod_mod(a, b, p)
        a, b = b, r
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def _gcdex_mod(a: UPoly, b: UPoly, p: int) -> Tuple[UPoly, UPoly, UPoly]:
    """Return s, t, g with s*a + t*b = g = gcd(a, b) (monic) modulo prime p."""
    r0, r1 = _trim([c % p for c in a]), _trim([c % p for c in b])
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = _divmod_mod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, _sub_mod(s0, _mul_mod(q, s1, p), p)
        t0, t1 = t1, _sub_mod(t0, _mul_mod(q, t1, p), p)
    inv = pow(r0[-1], -1, p)
    return [c * inv % p for c in s0], [c * inv % p for c in t0], [c * inv % p for c in r0]


def _deriv(a: UPoly) -> UPoly:
    return _trim([i * a[i] for i in range(1, len(a))])


def _powmod_poly(base: UPoly, e: int, mod: UPoly, p: int) -> UPoly:
    result: UPoly = [1]
    base = _divmod_mod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _divmod_mod(_mul_mod(result, base, p), mod, p)[1]
        e >>= 1
        if e:
            base = _divmod_mod(_mul_mod(base, base, p), mod, p)[1]
    return result


def _ddf(f: UPoly, p: int) -> List[Tuple[UPoly, int]]:
    """Distinct-degree factorization of a monic square-free polynomial mod p."""
    out = []
    h = [0, 1]
    i = 1
    f = list(f)
    while len(f) - 1 >= 2 * i:
        h = _powmod_poly(h, p, f, p)
        g = _gcd_mod(f, _sub_mod(h, [0, 1], p), p)
        if len(g) > 1:
            out.append((g, i))
            f = _divmod_mod(f, g, p)[0]
            h = _divmod_mod(h, f, p)[1]
        i += 1
    if len(f) > 1:
        out.append((f, len(f) - 1))
    return out


def _edf(f: UPoly, d: int, p: int, rng: random.Random) -> List[UPoly]:
    """Cantor-Zassenhaus equal-degree splitting (p odd)."""
    n = len(f) - 1
    if n == d:
        return [f]
    e = (p**d - 1) // 2
    while True:
        a = _trim([rng.randrange(p) for _ in range(n)])
        if len(a) < 2:
            continue
        b = _sub_mod(_powmod_poly(a, e, f, p), [1], p)
        g = _gcd_mod(f, b, p)
        if 1 < len(g) < len(f):
            h = _divmod_mod(f, g, p)[0]
            inv = pow(h[-1], -1, p)
            h = [c * inv % p for c in h]
            return _edf(g, d, p, rng) + _edf(h, d, p, rng)


def _factor_mod_p(f: UPoly, p: int, rng: random.Random) -> List[UPoly]:
    """Monic irreducible factors of a square-free polynomial modulo p."""
    inv = pow(f[-1] % p, -1, p)
    monic = [c * inv % p for c in f]
    out: List[UPoly] = []
    for g, d in _ddf(monic, p):
        out.extend(_edf(g, d, p, rng))
    return sorted(out)


_PRIMES = [p for p in range(3, 2000) if all(p % q for q in range(2, isqrt(p) + 1))]


def _hensel_step(m: int, f: UPoly, g: UPoly, h: UPoly, s: UPoly, t: UPoly) -> Tuple[UPoly, UPoly, UPoly, UPoly]:
    M = m * m
    e = _sub_mod(f, _mul_mod(g, h, M), M)
    q, r = _divmod_mod(_mul_mod(s, e, M), h, M)
    u = _add_mod(_mul_mod(t, e, M), _mul_mod(q, g, M), M)
    G = _add_mod(g, u, M)
    H = _add_mod(h, r, M)
    b = _sub_mod(_add_mod(_mul_mod(s, G, M), _mul_mod(t, H, M), M), [1], M)
    c, d = _divmod_mod(_mul_mod(s, b, M), H, M)
    S = _sub_mod(s, d, M)
    T = _sub_mod(t, _add_mod(_mul_mod(t, b, M), _mul_mod(c, G, M), M), M)
    return G, H, S, T


def _hensel_lift(p: int, f: UPoly, factors: List[UPoly], l: int) -> List[UPoly]:
    """Lift monic factors of f modulo p to monic factors modulo p**l."""
    r = len(factors)
    lc = f[-1]
    pl = p**l
    if r == 1:
        inv = pow(lc % pl, -1, pl)
        return [[c * inv % pl for c in f]]
    k = r // 2
    d = max(1, (l - 1).bit_length())
    g: UPoly = [lc % p]
    for fi in factors[:k]:
        g = _mul_mod(g, fi, p)
    h: UPoly = factors[k]
    for fi in factors[k + 1:]:
        h = _mul_mod(h, fi, p)
    s, t, _ = _gcdex_mod(g, h, p)
    m = p
    for _ in range(d):
        g, h, s, t = _hensel_step(m, f, g, h, s, t)
        m = m * m
    g = [c % pl for c in g]
    h = [c % pl for c in h]
    return _hensel_lift(p, _trim(g), factors[:k], l) + _hensel_lift(p, _trim(h), factors[k:], l)


def _zdivide(a: UPoly, b: UPoly) -> Optional[UPoly]:
    """Exact division over the integers, or None."""
    if not b:
        raise PolyError("division by zero")
    a = list(a)
    db = len(b) - 1
    if len(a) - 1 < db:
        return None if a else []
    q = [0] * (len(a) - db)
    lb = b[-1]
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if c:
            if c % lb:
                return None
            k = c // lb
            q[i - db] = k
            for j in range(db + 1):
                a[i - db + j] -= k * b[j]
    if any(a[:db]):
        return None
    return _trim(q)


def _ucontent(a: UPoly) -> int:
    g = 0
    for c in a:
        g = gcd(g, c)
    return g


def _uprimitive(a: UPoly) -> UPoly:
    c = _ucontent(a)
    if c == 0:
        return a
    if a[-1] < 0:
        c = -c
    return [x // c for x in a]


def _ugcd(a: UPoly, b: UPoly) -> UPoly:
    """gcd over the integers of primitive univariate polynomials (heuristic + fallback)."""
    if not a:
        return _uprimitive(b)
    if not b:
        return _uprimitive(a)
    a, b = _uprimitive(a), _uprimitive(b)
    if len(a) == 1 or len(b) == 1:
        return [1]
    an, bn = max(abs(c) for c in a), max(abs(c) for c in b)
    xi = 2 * min(an, bn) + 29
    for _ in range(8):
        va, vb = _ueval(a, xi), _ueval(b, xi)
        if va and vb:
            hv = gcd(va, vb)
            H = _uprimitive(_uinterp(hv, xi))
            if H and _zdivide(a, H) is not None and _zdivide(b, H) is not None:
                return H
        xi = xi * 73794 * isqrt(isqrt(xi)) // 27011
    return _ugcd_prs(a, b)


def _ueval(a: UPoly, x: int) -> int:
    r = 0
    for c in reversed(a):
        r = r * x + c
    return r


def _uinterp(v: int, xi: int) -> UPoly:
    out = []
    half = xi // 2
    while v:
        d = v % xi
        if d > half:
            d -= xi
        out.append(d)
        v = (v - d) // xi
    return _trim(out)


def _ugcd_prs(a: UPoly, b: UPoly) -> UPoly:
    while b:
        r = list(a)
        db = len(b) - 1
        while r and len(r) - 1 >= db:
            lr = r[-1]
            shift = len(r) - 1 - db
            r = [c * b[-1] for c in r]
            for j in range(db + 1):
                r[shift + j] -= lr * b[j]
            _trim(r)
        a, b = b, (_uprimitive(r) if r else [])
    return _uprimitive(a)


def _usqf(f: UPoly) -> List[Tuple[UPoly, int]]:
    """Yun square-free decomposition of a primitive integer polynomial."""
    out = []
    df = _deriv(f)
    g = _ugcd(f, df)
    c = _zdivide(f, g)
    d = _zdivide(df, g)
    i = 1
    while len(c) > 1:
        dc = _deriv(c)
        y = [x - z for x, z in zip(d + [0] * (len(dc) - len(d)), dc + [0] * (len(d) - len(dc)))]
        _trim(y)
        a = _ugcd(c, y)
        if len(a) > 1:
            out.append((a, i))
        c = _zdivide(c, a)
        d = _zdivide(y, a) if y else []
        i += 1
    return out


def zassenhaus(f: UPoly, rng: Optional[random.Random] = None) -> List[UPoly]:
    """Irreducible factors over the integers of a square-free primitive polynomial."""
    rng = rng or random.Random(0)
    n = len(f) - 1
    if n <= 1:
        return [f]
    lc = f[-1]
    p = None
    for q in _PRIMES:
        if lc % q == 0:
            continue
        if len(_gcd_mod(f, _deriv(f), q)) == 1:
            p = q
            break
    if p is None:
        raise PolyError("no suitable prime for Zassenhaus")
    mod_factors = _factor_mod_p(f, p, rng)
    if len(mod_factors) == 1:
        return [f]
    norm = max(abs(c) for c in f)
    bound = isqrt(n + 1) + 1
    bound = bound * 2**n * norm * abs(lc)
    l = 1
    while p**l <= 2 * bound:
        l += 1
    lifted = _hensel_lift(p, f, mod_factors, l)
    pl = p**l
    remaining = list(range(len(lifted)))
    result: List[UPoly] = []
    s = 1
    g = f
    while 2 * s <= len(remaining):
        found = False
        for S in combinations(remaining, s):
            cand: UPoly = [g[-1] % pl]
            for i in S:
                cand = _mul_mod(cand, lifted[i], pl)
            cand = _uprimitive(_symmetric(cand, pl))
            q = _zdivide(g, cand)
            if q is not None:
                result.append(cand)
                g = _uprimitive(q)
                remaining = [i for i in remaining if i not in S]
                found = True
                break
        if not found:
            s += 1
    result.append(g)
    return result


def factor_univariate(f: UPoly) -> List[Tuple[UPoly, int]]:
    """Factor a primitive integer polynomial (no zero root) with multiplicities."""
    out = []
    for part, k in _usqf(_uprimitive(f)):
        for g in zassenhaus(part):
            out.append((g, k))
    return out


# ------------------------------------------------------------ Kronecker

def _kronecker_bases(p: Poly, vs: List[VarId]) -> List[int]:
    bases = []
    b = 1
    for v in vs:
        bases.append(b)
        b *= degree_in(p, v) + 1
    return bases


def _kronecker(p: Poly, vs: List[VarId], bases: List[int]) -> UPoly:
    deg = 0
    terms: Dict[int, int] = {}
    for m, c in p.terms.items():
        e = mono_exponents(m)
        k = sum(e.get(v, 0) * b for v, b in zip(vs, bases))
        terms[k] = terms.get(k, 0) + int(c)
        deg = max(deg, k)
    out = [0] * (deg + 1)
    for k, c in terms.items():
        out[k] = c
    return _trim(out)


def _inverse_kronecker(u: UPoly, vs: List[VarId], bases: List[int], limits: List[int]) -> Optional[Poly]:
    out: Dict[int, int] = {}
    for k, c in enumerate(u):
        if not c:
            continue
        m = 0
        rest = k
        for v, b, lim in reversed(list(zip(vs, bases, limits))):
            e, rest = divmod(rest, b)
            if e > lim:
                return None
            if e:
                m += mono_var(v, e)
        out[m] = c
    return Poly(out)


def _kronecker_factor(p: Poly, rng: random.Random) -> List[Poly]:
    """Irreducible factors of a square-free primitive integer polynomial."""
    vs = p.variables()
    bases = _kronecker_bases(p, vs)
    limits = [degree_in(p, v) for v in vs]
    image = _kronecker(p, vs, bases)
    shift = 0
    while image and image[0] == 0:
        image.pop(0)
        shift += 1
    ufactors: List[UPoly] = []
    for g, k in factor_univariate(image):
        ufactors.extend([g] * k)
    result: List[Poly] = []
    remaining = list(range(len(ufactors)))
    q = p
    s = 1
    while remaining and s <= len(remaining):
        found = False
        for S in combinations(remaining, s):
            prod: UPoly = [1]
            for i in S:
                prod = _zmul(prod, ufactors[i])
            for j in range(shift + 1):
                cand = _inverse_kronecker([0] * j + prod, vs, bases, limits)
                if cand is None or not cand.variables():
                    continue
                quo = divide_exact(q, cand)
                if quo is not None:
                    result.append(canonical(cand))
                    q = quo
                    remaining = [i for i in remaining if i not in S]
                    found = True
                    break
            if found:
                break
        if not found:
            s += 1
        if not q.variables():
            break
    if q.variables():
        result.append(canonical(q))
    return result


# ---------------------------------------------------------- multivariate

def _min_degree_var(p: Poly) -> Tuple[VarId, int]:
    best = None
    for v in p.variables():
        d = degree_in(p, v)
        if best is None or d < best[1]:
            best = (v, d)
    assert best is not None
    return best


def _content_wrt(p: Poly, v: VarId) -> Poly:
    g = ZERO
    for c in coefficients_in(p, v):
        if c.terms:
            g = poly_gcd(g, c)
            if not g.variables():
                return ONE
    return g


def _certify_irreducible(p: Poly, v: VarId, rng: random.Random) -> bool:
    """True if a specialization to one variable proves ``p`` irreducible.

    ``p`` must be primitive with respect to ``v``.
    """
    others = [w for w in p.variables() if w != v]
    dv = degree_in(p, v)
    for _ in range(3):
        q = p
        for w in others:
            q = substitute(q, w, rng.randint(-9, 9) or 11)
        if degree_in(q, v) != dv:
            continue
        coeffs = coefficients_in(q, v)
        u = [int(Fraction(c.terms.get(0, 0))) if c.terms else 0 for c in coeffs]
        if any(not isinstance(c, int) for c in u):
            continue
        u = _uprimitive(_trim(u))
        if len(_ugcd(u, _deriv(u))) > 1:
            continue
        if len(zassenhaus(u, rng)) == 1:
            return True
    return False


def _factor_squarefree(p: Poly, rng: random.Random) -> List[Poly]:
    """Irreducible factors of a square-free integer polynomial without monomial content."""
    if not p.variables():
        return []
    v, d = _min_degree_var(p)
    c = _content_wrt(p, v)
    out: List[Poly] = []
    if c.variables():
        out.extend(_factor_squarefree(c, rng))
        p = divide_exact(p, c)
    _, p = integer_primitive(p)
    if d == 1:
        out.append(canonical(p))
    elif d == 2:
        out.extend(_split_quadratic(p, v))
    elif _certify_irreducible(p, v, rng):
        out.append(canonical(p))
    else:
        out.extend(_kronecker_factor(p, rng))
    return out


def _split_quadratic(p: Poly, v: VarId) -> List[Poly]:
    """Factor a primitive polynomial quadratic in v via its discriminant."""
    cs = coefficients_in(p, v)
    C, B, A = cs[0], cs[1], cs[2]
    disc = B * B - A * C * 4
    delta = poly_sqrt(disc)
    if delta is None:
        return [canonical(p)]
    xv = Poly.var(v)
    out = []
    for sgn in (1, -1):
        lin = A * xv * 2 + B - delta.scale(sgn)
        cont = _content_wrt(lin, v)
        out.append(canonical(divide_exact(lin, cont) if cont.variables() else lin))
    return out


def _yun(p: Poly, v: VarId) -> List[Tuple[Poly, int]]:
    """Square-free decomposition of a polynomial primitive in v."""
    dp = partial(p, v)
    g = poly_gcd(p, dp)
    if not g.variables():
        return [(p, 1)]
    out = []
    c = divide_exact(p, g)
    d = divide_exact(dp, g)
    i = 1
    while c.variables():
        y = d - partial(c, v)
        a = poly_gcd(c, y)
        if a.variables():
            out.append((a, i))
        c = divide_exact(c, a)
        d = divide_exact(y, a) if y.terms else ZERO
        i += 1
    return out


def _factor_primitive(p: Poly, rng: random.Random) -> List[Tuple[Poly, int]]:
    if not p.variables():
        return []
    v, d = _min_degree_var(p)
    c = _content_wrt(p, v)
    out: List[Tuple[Poly, int]] = []
    if c.variables():
        out.extend(_factor_primitive(c, rng))
        p = divide_exact(p, c)
    _, p = integer_primitive(p)
    if d == 1:
        out.append((canonical(p), 1))
        return out
    for part, k in _yun(p, v):
        for f in _factor_squarefree(part, rng):
            out.append((f, k))
    return out


def factor(p: Poly, hints: Iterable[Poly] = ()) -> Tuple[Fraction, List[Tuple[Poly, int]]]:
    """Return ``(unit, [(factor, multiplicity), ...])`` with ``p == unit * prod``.

    Factors are irreducible over the rationals and canonical; monomial content
    is returned as single-variable factors.  ``hints`` must be irreducible.
    """
    if not p.terms:
        raise PolyError("cannot factor the zero polynomial")
    counts: Counter = Counter()
    _, q = integer_primitive(p)
    m = monomial_content(q)
    if m:
        for v, e in mono_exponents(m).items():
            counts[Poly.var(v)] += e
        q = divide_monomial(q, m)
    if q.variables():
        for h in hints:
            if not h.variables() or len(h.terms) == 1:
                continue
            while True:
                r = divide_exact(q, h)
                if r is None:
                    break
                counts[canonical(h)] += 1
                q = r
                if not q.variables():
                    break
            if not q.variables():
                break
    if q.variables():
        _, q = integer_primitive(q)
        for f, k in _factor_primitive(q, random.Random(len(q.terms))):
            counts[f] += k
    factors = sorted(counts.items(), key=lambda fk: fk[0].sort_key())
    lc = Fraction(1)
    for f, k in factors:
        lc *= Fraction(f.leading_coefficient()) ** k
    unit = Fraction(p.leading_coefficient()) / lc
    return unit, factors


def irreducible_factors(p: Poly, hints: Iterable[Poly] = ()) -> List[Poly]:
    """Distinct irreducible factors of ``p`` (canonical, deterministic order)."""
    return [f for f, _ in factor(p, hints)[1]]
