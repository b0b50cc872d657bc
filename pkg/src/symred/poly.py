"""Exact sparse multivariate polynomials over the rationals.

Monomials are packed into a single Python integer.  Every variable owns an
8-bit field, and the total degree sits in the most significant field, so that:

* multiplying two monomials is integer addition,
* comparing two monomials as integers is graded-lexicographic comparison
  (the variable with the smallest slot is the greatest variable),
* divisibility is a single guarded subtraction.

Exponents are limited to 127 per variable and 127 in total, far above anything
a Symanzik reduction produces.

Variables come in three kinds: Schwinger parameters ``x<k>``, kinematic
invariants (``s``, ``t``, ``u`` and any other declared name) and mass squares
``msq<k>``.  Slot order is Schwinger first (by index), then kinematic (in
declaration order), then mass squares (by index).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

Rational = Union[int, Fraction]

FIELD = 8
SCHWINGER_SLOTS = 64
KINEMATIC_SLOTS = 16
MASS_SLOTS = 48
NSLOTS = SCHWINGER_SLOTS + KINEMATIC_SLOTS + MASS_SLOTS
DEG_SHIFT = NSLOTS * FIELD
_FMASK = (1 << FIELD) - 1
_GUARD = sum(0x80 << (i * FIELD) for i in range(NSLOTS + 1))
_VARMASK = (1 << DEG_SHIFT) - 1

KINDS = ("schwinger", "kinematic", "mass_square")
_KIN_NAMES: List[str] = ["s", "t", "u"]


class PolyError(ValueError):
    """Raised for invalid polynomial operations or malformed input."""


@dataclass(frozen=True)
class VarId:
    kind: str
    index: int

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise PolyError(f"unknown variable kind {self.kind!r}")
        limit = {"schwinger": SCHWINGER_SLOTS, "kinematic": KINEMATIC_SLOTS, "mass_square": MASS_SLOTS}[self.kind]
        if not 0 <= self.index < limit:
            raise PolyError(f"{self.kind} index {self.index} out of range")

    @property
    def slot(self) -> int:
        if self.kind == "schwinger":
            return self.index
        if self.kind == "kinematic":
            return SCHWINGER_SLOTS + self.index
        return SCHWINGER_SLOTS + KINEMATIC_SLOTS + self.index

    @property
    def name(self) -> str:
        if self.kind == "schwinger":
            return f"x{self.index}"
        if self.kind == "mass_square":
            return f"msq{self.index}"
        return _KIN_NAMES[self.index]

    def __lt__(self, other: "VarId") -> bool:
        return self.slot < other.slot

    def __repr__(self) -> str:
        return self.name


def schwinger(index: int) -> VarId:
    return VarId("schwinger", index)


def mass_square(index: int) -> VarId:
    return VarId("mass_square", index)


def kinematic(name: str) -> VarId:
    """Return the kinematic variable called ``name``, declaring it if new."""
    if name not in _KIN_NAMES:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name) or _is_reserved(name):
            raise PolyError(f"invalid kinematic name {name!r}")
        if len(_KIN_NAMES) >= KINEMATIC_SLOTS:
            raise PolyError("too many kinematic symbols")
        _KIN_NAMES.append(name)
    return VarId("kinematic", _KIN_NAMES.index(name))


def _is_reserved(name: str) -> bool:
    return re.fullmatch(r"x\d+|msq\d+", name) is not None


def var_from_name(name: str) -> VarId:
    m = re.fullmatch(r"x(\d+)", name)
    if m:
        return schwinger(int(m.group(1)))
    m = re.fullmatch(r"msq(\d+)", name)
    if m:
        return mass_square(int(m.group(1)))
    return kinematic(name)


def _slot_shift(slot: int) -> int:
    return (NSLOTS - 1 - slot) * FIELD


def _var_of_slot(slot: int) -> VarId:
    if slot < SCHWINGER_SLOTS:
        return VarId("schwinger", slot)
    if slot < SCHWINGER_SLOTS + KINEMATIC_SLOTS:
        return VarId("kinematic", slot - SCHWINGER_SLOTS)
    return VarId("mass_square", slot - SCHWINGER_SLOTS - KINEMATIC_SLOTS)


_DEG1 = 1 << DEG_SHIFT


def mono_var(v: VarId, exp: int = 1) -> int:
    if not 0 <= exp < 128:
        raise PolyError("exponent out of range")
    return exp * (_DEG1 + (1 << _slot_shift(v.slot)))


def mono_from_exponents(exps: Mapping[VarId, int]) -> int:
    m = 0
    for v, e in exps.items():
        if e:
            m += mono_var(v, e)
    if (m >> DEG_SHIFT) >= 128:
        raise PolyError("total degree out of range")
    return m


def mono_exponents(m: int) -> Dict[VarId, int]:
    """Exponent map of a packed monomial, in variable order."""
    out: Dict[VarId, int] = {}
    body = m & _VARMASK
    while body:
        top = body.bit_length() - 1
        field = top // FIELD
        slot = NSLOTS - 1 - field
        e = (body >> (field * FIELD)) & _FMASK
        out[_var_of_slot(slot)] = e
        body &= ~(_FMASK << (field * FIELD))
    return out


def mono_degree(m: int) -> int:
    return m >> DEG_SHIFT


def mono_exp(m: int, v: VarId) -> int:
    return (m >> _slot_shift(v.slot)) & _FMASK


def mono_divides(d: int, m: int) -> bool:
    return ((m | _GUARD) - d) & _GUARD == _GUARD


def mono_gcd(a: int, b: int) -> int:
    out = 0
    body = (a | b) & _VARMASK
    while body:
        top = body.bit_length() - 1
        field = top // FIELD
        sh = field * FIELD
        e = min((a >> sh) & _FMASK, (b >> sh) & _FMASK)
        if e:
            out += e * (_DEG1 + (1 << sh))
        body &= ~(_FMASK << sh)
    return out


def _norm(c: Rational) -> Rational:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class Poly:
    """Immutable polynomial: a map from packed monomials to nonzero rationals."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Optional[Mapping[int, Rational]] = None, *, _trusted: bool = False) -> None:
        if _trusted:
            self.terms: Dict[int, Rational] = terms  # type: ignore[assignment]
        else:
            self.terms = {m: _norm(c) for m, c in (terms or {}).items() if c != 0}
        self._hash: Optional[int] = None

    # constructors
    @staticmethod
    def const(c: Rational) -> "Poly":
        return Poly({0: c})

    @staticmethod
    def var(v: VarId) -> "Poly":
        return Poly({mono_var(v): 1}, _trusted=True)

    @staticmethod
    def monomial(exps: Mapping[VarId, int], coeff: Rational = 1) -> "Poly":
        return Poly({mono_from_exponents(exps): coeff})

    # arithmetic
    def __add__(self, other: Union["Poly", Rational]) -> "Poly":
        other = _lift(other)
        if len(self.terms) < len(other.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out = dict(a)
        for m, c in b.items():
            r = out.get(m, 0) + c
            if r:
                out[m] = _norm(r)
            else:
                out.pop(m, None)
        return Poly(out, _trusted=True)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other: Union["Poly", Rational]) -> "Poly":
        return self + (-_lift(other))

    def __rsub__(self, other: Rational) -> "Poly":
        return _lift(other) - self

    def __mul__(self, other: Union["Poly", Rational]) -> "Poly":
        other = _lift(other)
        if not self.terms or not other.terms:
            return ZERO
        out: Dict[int, Rational] = {}
        get = out.get
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 + m2
                out[m] = get(m, 0) + c1 * c2
        return Poly({m: _norm(c) for m, c in out.items() if c}, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise PolyError("negative power")
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c: Rational) -> "Poly":
        if c == 0:
            return ZERO
        return Poly({m: _norm(k * c) for m, k in self.terms.items()}, _trusted=True)

    # comparison
    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"Poly({to_str(self)!r})"

    def __str__(self) -> str:
        return to_str(self)

    # structure
    def leading_monomial(self) -> int:
        return max(self.terms)

    def leading_coefficient(self) -> Rational:
        return self.terms[max(self.terms)] if self.terms else 0

    def variables(self) -> List[VarId]:
        body = 0
        for m in self.terms:
            body |= m
        return sorted(mono_exponents(body & _VARMASK))

    def total_degree(self) -> int:
        return max((m >> DEG_SHIFT for m in self.terms), default=0)

    def sort_key(self) -> Tuple:
        """Deterministic ordering key for sets of polynomials."""
        ms = sorted(self.terms, reverse=True)
        return (len(ms), tuple(ms), tuple(str(self.terms[m]) for m in ms))


def _lift(x: Union[Poly, Rational]) -> Poly:
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as a polynomial")


ZERO = Poly({}, _trusted=True)
ONE = Poly({0: 1}, _trusted=True)


def var(name: Union[str, VarId]) -> Poly:
    return Poly.var(name if isinstance(name, VarId) else var_from_name(name))


# ---------------------------------------------------------------- operations

def add(a: Poly, b: Poly) -> Poly:
    return a + b


def mul(a: Poly, b: Poly) -> Poly:
    return a * b


def partial(p: Poly, v: VarId) -> Poly:
    """Formal partial derivative of ``p`` with respect to ``v``."""
    sh = _slot_shift(v.slot)
    step = _DEG1 + (1 << sh)
    out: Dict[int, Rational] = {}
    for m, c in p.terms.items():
        e = (m >> sh) & _FMASK
        if e:
            out[m - step] = c * e
    return Poly(out, _trusted=True)


def eval_zero(p: Poly, v: VarId) -> Poly:
    sh = _slot_shift(v.slot)
    return Poly({m: c for m, c in p.terms.items() if not (m >> sh) & _FMASK}, _trusted=True)


def degree_in(p: Poly, v: VarId) -> int:
    sh = _slot_shift(v.slot)
    return max(((m >> sh) & _FMASK for m in p.terms), default=0)


def coefficients_in(p: Poly, v: VarId) -> List[Poly]:
    """Coefficients ``[c0, c1, ...]`` of ``p`` viewed as a polynomial in ``v``."""
    sh = _slot_shift(v.slot)
    step = _DEG1 + (1 << sh)
    buckets: Dict[int, Dict[int, Rational]] = {}
    for m, c in p.terms.items():
        e = (m >> sh) & _FMASK
        buckets.setdefault(e, {})[m - e * step] = c
    top = max(buckets, default=-1)
    return [Poly(buckets.get(i, {}), _trusted=True) for i in range(top + 1)]


def from_coefficients(coeffs: Sequence[Poly], v: VarId) -> Poly:
    out: Dict[int, Rational] = {}
    for i, c in enumerate(coeffs):
        shift = mono_var(v, i) if i else 0
        for m, k in c.terms.items():
            out[m + shift] = k
    return Poly(out, _trusted=True)


def substitute(p: Poly, v: VarId, value: Union[Poly, Rational]) -> Poly:
    """Replace ``v`` by ``value`` (a polynomial or rational) in ``p``."""
    value = _lift(value)
    coeffs = coefficients_in(p, v)
    result = ZERO
    for c in reversed(coeffs):
        result = result * value + c
    return result


def eval_rational(p: Poly, assignment: Mapping[VarId, Rational]) -> Rational:
    """Exact value of ``p`` at a rational point covering all of its variables."""
    for v in p.variables():
        if v not in assignment:
            raise PolyError(f"no value assigned to variable {v.name}")
    values = {v.slot: Fraction(c) for v, c in assignment.items()}
    total: Rational = 0
    for m, c in p.terms.items():
        term: Rational = c
        for v, e in mono_exponents(m).items():
            term *= values[v.slot] ** e
        total += term
    return _norm(Fraction(total))


def evaluate(p: Poly, assignment: Mapping[VarId, Rational]) -> Poly:
    """Partial evaluation: substitute the assigned variables, keep the rest."""
    out = p
    for v, c in assignment.items():
        out = substitute(out, v, c)
    return out


def is_constant(p: Poly) -> bool:
    return all(m == 0 for m in p.terms)


def is_monomial(p: Poly) -> bool:
    return len(p.terms) == 1


def content(p: Poly) -> Fraction:
    """Positive rational content: gcd of numerators over lcm of denominators."""
    num, den = 0, 1
    for c in p.terms.values():
        c = Fraction(c)
        num = gcd(num, c.numerator)
        den = den * c.denominator // gcd(den, c.denominator)
    return Fraction(num, den) if num else Fraction(0)


def canonical(p: Poly) -> Poly:
    """Content 1 and positive coefficient on the graded-lex greatest monomial."""
    if not p.terms:
        return p
    c = content(p)
    if p.terms[max(p.terms)] < 0:
        c = -c
    if c == 1:
        return p
    inv = 1 / c
    return Poly({m: _norm(k * inv) for m, k in p.terms.items()}, _trusted=True)


def is_canonical(p: Poly) -> bool:
    return canonical(p) == p


def divide_exact(p: Poly, d: Poly) -> Optional[Poly]:
    """Return ``p / d`` if ``d`` divides ``p`` exactly, else ``None``."""
    if not d.terms:
        raise PolyError("division by zero polynomial")
    if not p.terms:
        return ZERO
    lm_d = max(d.terms)
    lc_d = Fraction(d.terms[lm_d])
    d_items = [(m, c) for m, c in d.terms.items() if m != lm_d]
    if lm_d >> DEG_SHIFT > max(p.terms) >> DEG_SHIFT:
        return None
    rem: Dict[int, Rational] = dict(p.terms)
    quot: Dict[int, Rational] = {}
    while rem:
        lm = max(rem)
        if not mono_divides(lm_d, lm):
            return None
        q_m = lm - lm_d
        q_c = _norm(rem.pop(lm) / lc_d)
        quot[q_m] = q_c
        for m, c in d_items:
            t = m + q_m
            r = rem.get(t, 0) - q_c * c
            if r:
                rem[t] = r
            else:
                rem.pop(t, None)
    return Poly({m: _norm(c) for m, c in quot.items()}, _trusted=True)


def monomial_content(p: Poly) -> int:
    """Greatest monomial dividing every term of ``p`` (packed)."""
    it = iter(p.terms)
    g = next(it, 0)
    for m in it:
        if not g:
            break
        g = mono_gcd(g, m)
    return g


def divide_monomial(p: Poly, m: int) -> Poly:
    return Poly({t - m: c for t, c in p.terms.items()}, _trusted=True)


def integer_primitive(p: Poly) -> Tuple[Fraction, Poly]:
    """Split ``p`` as ``unit * q`` with ``q`` having coprime integer coefficients."""
    c = content(p)
    if not c:
        return Fraction(0), p
    if c == 1 and all(isinstance(k, int) for k in p.terms.values()):
        return Fraction(1), p
    inv = 1 / c
    return c, Poly({m: _norm(k * inv) for m, k in p.terms.items()}, _trusted=True)


def factor(p: Poly, hints: Iterable[Poly] = ()) -> List[Tuple[Poly, int]]:
    """Irreducible factorization over the rationals; see :mod:`symred.factor`."""
    from .factor import factor as _factor

    return _factor(p, hints=hints)[1]


def factor_with_unit(p: Poly, hints: Iterable[Poly] = ()) -> Tuple[Fraction, List[Tuple[Poly, int]]]:
    from .factor import factor as _factor

    return _factor(p, hints=hints)


def expand_factors(unit: Rational, factors: Iterable[Tuple[Poly, int]]) -> Poly:
    out = Poly.const(unit)
    for f, k in factors:
        out = out * f**k
    return out


# ------------------------------------------------------------- text format

def _fmt_coeff(c: Rational) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_mono(m: int) -> str:
    parts = []
    for v, e in mono_exponents(m).items():
        parts.append(v.name if e == 1 else f"{v.name}^{e}")
    return "*".join(parts)


def to_str(p: Poly) -> str:
    """Render with terms in decreasing graded-lex order, e.g. ``x1^2*s - 2*x3 + 1/2``."""
    if not p.terms:
        return "0"
    out: List[str] = []
    for m in sorted(p.terms, reverse=True):
        c = Fraction(p.terms[m])
        neg = c < 0
        a = -c if neg else c
        mono = _fmt_mono(m)
        if not mono:
            body = _fmt_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_fmt_coeff(a)}*{mono}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*^()]))")


def parse(text: str) -> Poly:
    """Parse the textual syntax produced by :func:`to_str` (plus parentheses)."""
    tokens: List[Tuple[str, str]] = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolyError(f"unexpected character at position {pos}: {text[pos:pos + 10]!r}")
        if m.group(1):
            tokens.append(("num", m.group(1)))
        elif m.group(2):
            tokens.append(("name", m.group(2)))
        else:
            tokens.append(("op", "^" if m.group(3) == "**" else m.group(3)))
        pos = m.end()
    if not tokens:
        raise PolyError("empty polynomial")
    parser = _Parser(tokens)
    result = parser.expr()
    if parser.i != len(tokens):
        raise PolyError(f"trailing input near token {parser.i}")
    return result


class _Parser:
    def __init__(self, tokens: List[Tuple[str, str]]) -> None:
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Optional[Tuple[str, str]]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> Tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise PolyError("unexpected end of polynomial")
        self.i += 1
        return tok

    def expr(self) -> Poly:
        sign = 1
        tok = self.peek()
        if tok and tok[1] in "+-" and tok[0] == "op":
            self.take()
            sign = -1 if tok[1] == "-" else 1
        result = self.term().scale(sign)
        while (tok := self.peek()) and tok[0] == "op" and tok[1] in "+-":
            self.take()
            t = self.term()
            result = result + t if tok[1] == "+" else result - t
        return result

    def term(self) -> Poly:
        result = self.power()
        while (tok := self.peek()) and tok == ("op", "*"):
            self.take()
            result = result * self.power()
        return result

    def power(self) -> Poly:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num" or "/" in val:
                raise PolyError("exponent must be a non-negative integer")
            base = base ** int(val)
        return base

    def atom(self) -> Poly:
        kind, val = self.take()
        if kind == "num":
            return Poly.const(Fraction(val))
        if kind == "name":
            return var(val)
        if val == "(":
            inner = self.expr()
            if self.take() != ("op", ")"):
                raise PolyError("missing closing parenthesis")
            return inner
        if val == "-":
            return -self.atom()
        raise PolyError(f"unexpected token {val!r}")
