"""Exact sparse univariate polynomial arithmetic over the rationals.

A polynomial is a map from nonnegative integer exponents to nonzero
rational coefficients.  The zero polynomial is the empty map.  Coefficients
are stored as ``int`` when integral and ``fractions.Fraction`` otherwise;
the two compare and hash identically, so this is purely a speed detail.

Design notes:

  * All arithmetic is exact.  No floats anywhere.
  * Large integer multiplications route through Kronecker substitution
    backed by gmpy2, so products of dense high-degree integer polynomials
    stay fast.
  * gcd over the rationals uses a primitive pseudo-remainder sequence at
    small degree and a CRT-based modular algorithm (with exact division
    verification) at large degree.  A degree-zero modular image certifies
    coprimality immediately.
  * Every constructed polynomial is checked against a configurable global
    degree cap (default 2**16); exceeding it raises DegreeCapExceeded.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

import gmpy2
import numpy as np

from .errors import DegreeCapExceeded, UsageError
from .padic import format_rational, is_prime, parse_rational

__all__ = [
    "SparsePoly",
    "Interval",
    "get_degree_cap",
    "set_degree_cap",
    "poly_gcd",
    "squarefree_part",
    "resultant",
    "discriminant",
    "rational_roots",
    "divisor_count",
    "coprime_radical",
    "sturm_count",
]

Coeff = Union[int, Fraction]

_DEFAULT_DEGREE_CAP = 1 << 16
_degree_cap = _DEFAULT_DEGREE_CAP


def get_degree_cap() -> int:
    return _degree_cap


def set_degree_cap(cap: int) -> int:
    """Set the global degree cap; returns the previous value."""
    global _degree_cap
    if cap < 1:
        raise UsageError(f"degree cap must be positive, got {cap}")
    old = _degree_cap
    _degree_cap = cap
    return old


def _check_degree(deg: int, context: str) -> None:
    if deg > _degree_cap:
        raise DegreeCapExceeded(deg, _degree_cap, context)


def _norm_coeff(c: Coeff) -> Coeff:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class SparsePoly:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, Coeff] | Iterable[tuple[int, Coeff]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, Coeff] = {}
        for e, c in items:
            if not isinstance(e, int) or e < 0:
                raise UsageError(f"exponent must be a nonnegative integer, got {e!r}")
            if not isinstance(c, (int, Fraction)):
                raise UsageError(f"coefficient must be exact (int or Fraction), got {type(c).__name__}")
            if c == 0:
                continue
            s = acc.get(e, 0) + c
            if s == 0:
                acc.pop(e, None)
            else:
                acc[e] = _norm_coeff(s)
        if acc:
            _check_degree(max(acc), "construction")
        self._terms = acc
        self._hash: int | None = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def _raw(cls, terms: dict[int, Coeff]) -> "SparsePoly":
        # Internal: terms already canonical (no zeros, normalized coeffs).
        obj = object.__new__(cls)
        obj._terms = terms
        obj._hash = None
        if terms:
            _check_degree(max(terms), "construction")
        return obj

    @classmethod
    def zero(cls) -> "SparsePoly":
        return cls._raw({})

    @classmethod
    def one(cls) -> "SparsePoly":
        return cls._raw({0: 1})

    @classmethod
    def x(cls) -> "SparsePoly":
        return cls._raw({1: 1})

    @classmethod
    def monomial(cls, exponent: int, coefficient: Coeff = 1) -> "SparsePoly":
        return cls([(exponent, coefficient)])

    @classmethod
    def constant(cls, c: Coeff) -> "SparsePoly":
        return cls([(0, c)])

    @classmethod
    def from_coeffs(cls, ascending: Iterable[Coeff]) -> "SparsePoly":
        """Build from a dense coefficient list, constant term first."""
        return cls(enumerate(ascending))

    @classmethod
    def from_roots(cls, roots: Iterable[Coeff]) -> "SparsePoly":
        """Monic product of (x - r) over the given roots."""
        out = cls.one()
        for r in roots:
            out = out * cls([(1, 1), (0, -r)])
        return out

    # -- inspection --------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int | None:
        """Degree, or None for the zero polynomial."""
        return max(self._terms) if self._terms else None

    @property
    def low_degree(self) -> int | None:
        """Smallest exponent with nonzero coefficient (order at x = 0)."""
        return min(self._terms) if self._terms else None

    @property
    def leading_coeff(self) -> Coeff:
        if not self._terms:
            return 0
        return self._terms[max(self._terms)]

    @property
    def constant_coeff(self) -> Coeff:
        return self._terms.get(0, 0)

    @property
    def num_terms(self) -> int:
        return len(self._terms)

    def coeff(self, exponent: int) -> Coeff:
        return self._terms.get(exponent, 0)

    def terms(self) -> dict[int, Coeff]:
        """A copy of the exponent -> coefficient map."""
        return dict(self._terms)

    def items_desc(self) -> list[tuple[int, Coeff]]:
        return sorted(self._terms.items(), reverse=True)

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self._terms.values())

    def to_dense(self) -> list[Coeff]:
        """Dense ascending coefficient list; empty for the zero polynomial."""
        if not self._terms:
            return []
        out: list[Coeff] = [0] * (max(self._terms) + 1)
        for e, c in self._terms.items():
            out[e] = c
        return out

    # -- equality / hashing ------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SparsePoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({} if other == 0 else {0: _norm_coeff(other)})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(sorted((e, Fraction(c)) for e, c in self._terms.items())))
        return self._hash

    def key(self) -> tuple[tuple[int, int, int], ...]:
        """Canonical hashable key: ((exp, num, den), ...) ascending in exp."""
        out = []
        for e in sorted(self._terms):
            c = self._terms[e]
            if isinstance(c, int):
                out.append((e, c, 1))
            else:
                out.append((e, c.numerator, c.denominator))
        return tuple(out)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "SparsePoly | Coeff") -> "SparsePoly":
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        big, small = (self._terms, other._terms)
        if len(big) < len(small):
            big, small = small, big
        acc = dict(big)
        for e, c in small.items():
            s = acc.get(e, 0) + c
            if s == 0:
                acc.pop(e, None)
            else:
                acc[e] = _norm_coeff(s)
        return SparsePoly._raw(acc)

    __radd__ = __add__

    def __neg__(self) -> "SparsePoly":
        return SparsePoly._raw({e: -c for e, c in self._terms.items()})

    def __sub__(self, other: "SparsePoly | Coeff") -> "SparsePoly":
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Coeff) -> "SparsePoly":
        return _as_poly(other) - self

    def __mul__(self, other: "SparsePoly | Coeff") -> "SparsePoly":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return SparsePoly.zero()
            return SparsePoly._raw({e: _norm_coeff(c * other) for e, c in self._terms.items()})
        if not isinstance(other, SparsePoly):
            return NotImplemented
        if not self._terms or not other._terms:
            return SparsePoly.zero()
        _check_degree(max(self._terms) + max(other._terms), "multiplication")
        if self.is_integral() and other.is_integral():
            return SparsePoly._raw(_mul_int_auto(self._terms, other._terms))
        return SparsePoly._raw(_mul_dict_generic(self._terms, other._terms))

    __rmul__ = __mul__

    def __truediv__(self, scalar: Coeff) -> "SparsePoly":
        if not isinstance(scalar, (int, Fraction)) or scalar == 0:
            raise UsageError("can only divide a polynomial by a nonzero scalar")
        return self * (Fraction(1) / Fraction(scalar))

    def __pow__(self, exponent: int) -> "SparsePoly":
        if not isinstance(exponent, int) or exponent < 0:
            raise UsageError(f"polynomial exponent must be a nonnegative integer, got {exponent!r}")
        if exponent == 0:
            return SparsePoly.one()
        if not self._terms:
            return SparsePoly.zero()
        _check_degree(max(self._terms) * exponent, "power")
        result: SparsePoly | None = None
        base = self
        k = exponent
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        assert result is not None
        return result

    def __divmod__(self, other: "SparsePoly") -> tuple["SparsePoly", "SparsePoly"]:
        """Euclidean division over the rationals."""
        if not isinstance(other, SparsePoly):
            return NotImplemented
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = dict(self._terms)
        quo: dict[int, Coeff] = {}
        dB = max(other._terms)
        lcB = other._terms[dB]
        other_items = list(other._terms.items())
        while rem:
            dR = max(rem)
            if dR < dB:
                break
            factor = _norm_coeff(Fraction(rem[dR]) / Fraction(lcB))
            shift = dR - dB
            quo[shift] = factor
            for e, c in other_items:
                t = e + shift
                s = rem.get(t, 0) - factor * c
                if s == 0:
                    rem.pop(t, None)
                else:
                    rem[t] = _norm_coeff(s)
        return SparsePoly._raw(quo), SparsePoly._raw(rem)

    def __mod__(self, other: "SparsePoly") -> "SparsePoly":
        return divmod(self, other)[1]

    def exact_div(self, other: "SparsePoly") -> "SparsePoly":
        """Exact quotient; raises UsageError if the division is not exact."""
        q, r = divmod(self, other)
        if not r.is_zero:
            raise UsageError("polynomial division is not exact")
        return q

    # -- calculus and substitution ----------------------------------------

    def derivative(self) -> "SparsePoly":
        return SparsePoly._raw(
            {e - 1: _norm_coeff(e * c) for e, c in self._terms.items() if e > 0}
        )

    def evaluate(self, x: Coeff) -> Coeff:
        """Exact evaluation by sparse Horner with gap exponentiation."""
        if not self._terms:
            return 0
        items = self.items_desc()
        acc: Coeff = 0
        prev_e: int | None = None
        for e, c in items:
            if prev_e is not None:
                acc = acc * _pow_scalar(x, prev_e - e)
            acc = acc + c
            prev_e = e
        assert prev_e is not None
        if prev_e:
            acc = acc * _pow_scalar(x, prev_e)
        return _norm_coeff(acc)

    def shift(self, c: Coeff) -> "SparsePoly":
        """Taylor shift: the polynomial g with g(x) = f(x + c).  O(d^2)."""
        if not self._terms or c == 0:
            return self
        dense = self.to_dense()
        d = len(dense) - 1
        for i in range(d):
            for j in range(d - 1, i - 1, -1):
                dense[j] = dense[j] + c * dense[j + 1]
        return SparsePoly.from_coeffs(_norm_coeff(v) for v in dense)

    def reverse(self) -> "SparsePoly":
        """Reciprocal polynomial x**deg * f(1/x); zero roots drop out."""
        if not self._terms:
            return self
        d = max(self._terms)
        return SparsePoly._raw({d - e: c for e, c in self._terms.items()})

    def strip_zero_root(self) -> tuple["SparsePoly", int]:
        """Factor out the largest power of x: returns (f / x**k, k)."""
        if not self._terms:
            raise UsageError("cannot strip the zero root of the zero polynomial")
        k = min(self._terms)
        if k == 0:
            return self, 0
        return SparsePoly._raw({e - k: c for e, c in self._terms.items()}), k

    # -- content -----------------------------------------------------------

    def content_and_primitive(self) -> tuple[Fraction, "SparsePoly"]:
        """Write f = content * primitive with primitive integral, content 1,
        and positive leading coefficient; the zero polynomial yields (0, 0)."""
        if not self._terms:
            return Fraction(0), self
        den_lcm = 1
        for c in self._terms.values():
            if isinstance(c, Fraction):
                den_lcm = den_lcm * c.denominator // math.gcd(den_lcm, c.denominator)
        num_gcd = 0
        for c in self._terms.values():
            num = c.numerator if isinstance(c, Fraction) else c
            num_gcd = math.gcd(num_gcd, num * (den_lcm // (c.denominator if isinstance(c, Fraction) else 1)))
        content = Fraction(num_gcd, den_lcm)
        if self.leading_coeff < 0:
            content = -content
        prim = SparsePoly._raw(
            {e: _norm_coeff(c / content) for e, c in self._terms.items()}
        )
        return content, prim

    def primitive_part(self) -> "SparsePoly":
        return self.content_and_primitive()[1]

    # -- text and JSON -----------------------------------------------------

    def __repr__(self) -> str:
        return f"SparsePoly({self.to_text()!r})"

    def to_text(self) -> str:
        """Canonical text form, e.g. "3*x^5 - 2*x + 7"."""
        if not self._terms:
            return "0"
        pieces: list[str] = []
        for i, (e, c) in enumerate(self.items_desc()):
            neg = c < 0
            mag = -c if neg else c
            if e == 0:
                body = format_rational(mag)
            else:
                xpart = "x" if e == 1 else f"x^{e}"
                body = xpart if mag == 1 else f"{format_rational(mag)}*{xpart}"
            if i == 0:
                pieces.append(("-" if neg else "") + body)
            else:
                pieces.append((" - " if neg else " + ") + body)
        return "".join(pieces)

    @classmethod
    def from_text(cls, text: str) -> "SparsePoly":
        """Parse the canonical text form (liberal about spacing and '**')."""
        s = text.replace("**", "^").replace(" ", "").replace("\t", "")
        if not s:
            raise UsageError("empty polynomial text")
        tokens = re.findall(r"[+-]?[^+-]+", s)
        if "".join(tokens) != s:
            raise UsageError(f"cannot parse polynomial text: {text!r}")
        terms: list[tuple[int, Coeff]] = []
        for tok in tokens:
            sign = 1
            body = tok
            if body[0] in "+-":
                sign = -1 if body[0] == "-" else 1
                body = body[1:]
            if not body:
                raise UsageError(f"cannot parse polynomial term: {tok!r}")
            try:
                if "x" in body:
                    cpart, _, epart = body.partition("x")
                    cpart = cpart.rstrip("*")
                    coeff: Coeff = parse_rational(cpart) if cpart else 1
                    if epart:
                        if not epart.startswith("^"):
                            raise UsageError(f"cannot parse polynomial term: {tok!r}")
                        exponent = int(epart[1:])
                    else:
                        exponent = 1
                else:
                    coeff = parse_rational(body)
                    exponent = 0
            except (ValueError, UsageError) as exc:
                raise UsageError(f"cannot parse polynomial term: {tok!r}") from exc
            terms.append((exponent, sign * coeff))
        return cls(terms)

    def to_json_obj(self) -> dict:
        """JSON-ready form: {"terms": [[exp, "coeff"], ...]}, exponents descending."""
        return {"terms": [[e, format_rational(c)] for e, c in self.items_desc()]}

    @classmethod
    def from_json_obj(cls, obj: object) -> "SparsePoly":
        if not isinstance(obj, dict) or "terms" not in obj or not isinstance(obj["terms"], list):
            raise UsageError("polynomial JSON must be an object with a 'terms' list")
        terms: list[tuple[int, Coeff]] = []
        for entry in obj["terms"]:
            if not isinstance(entry, list) or len(entry) != 2 or not isinstance(entry[0], int):
                raise UsageError(f"bad polynomial JSON term: {entry!r}")
            coeff = parse_rational(str(entry[1]))
            terms.append((entry[0], coeff))
        return cls(terms)


def _as_poly(v: "SparsePoly | Coeff") -> SparsePoly:
    if isinstance(v, SparsePoly):
        return v
    if isinstance(v, (int, Fraction)):
        return SparsePoly.constant(v)
    return NotImplemented  # type: ignore[return-value]


def _pow_scalar(x: Coeff, k: int) -> Coeff:
    if isinstance(x, Fraction):
        return x**k
    return x**k


# ---------------------------------------------------------------------------
# Multiplication strategies for integer polynomials
# ---------------------------------------------------------------------------

_KRONECKER_THRESHOLD = 300_000


def _mul_dict_generic(a: dict[int, Coeff], b: dict[int, Coeff]) -> dict[int, Coeff]:
    if len(a) > len(b):
        a, b = b, a
    acc: dict[int, Coeff] = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            s = acc.get(e, 0) + ca * cb
            if s == 0:
                acc.pop(e, None)
            else:
                acc[e] = s
    return {e: _norm_coeff(c) for e, c in acc.items()}


def _mul_int_auto(a: dict[int, int], b: dict[int, int], threshold: int = _KRONECKER_THRESHOLD) -> dict[int, int]:
    if len(a) * len(b) < threshold:
        return _mul_dict_generic(a, b)
    return _mul_int_kronecker(a, b)


def _pack_nonneg(terms: dict[int, int], slot_bytes: int, width: int) -> int:
    buf = bytearray(slot_bytes * width)
    for e, c in terms.items():
        if c:
            cb = c.to_bytes(slot_bytes, "little")
            start = e * slot_bytes
            buf[start : start + slot_bytes] = cb
    return int.from_bytes(buf, "little")


def _mul_int_kronecker(a: dict[int, int], b: dict[int, int]) -> dict[int, int]:
    """Multiply integer polynomials by packed evaluation at a power of 256.

    Coefficients of the product are bounded by amax*bmax*min(terms), so a
    byte-aligned slot strictly wider than that bound makes the product of
    the packings carry-free; a half-slot offset turns the signed digits
    nonnegative for single-pass extraction.
    """
    da, db = max(a), max(b)
    amax = max(abs(c) for c in a.values())
    bmax = max(abs(c) for c in b.values())
    bound_bits = (amax * bmax * min(len(a), len(b))).bit_length() + 2
    slot_bytes = (bound_bits + 7) // 8
    slot_bits = slot_bytes * 8
    width_a, width_b = da + 1, db + 1
    width = da + db + 1
    apos = {e: c for e, c in a.items() if c > 0}
    aneg = {e: -c for e, c in a.items() if c < 0}
    bpos = {e: c for e, c in b.items() if c > 0}
    bneg = {e: -c for e, c in b.items() if c < 0}
    na = gmpy2.mpz(_pack_nonneg(apos, slot_bytes, width_a)) - gmpy2.mpz(
        _pack_nonneg(aneg, slot_bytes, width_a)
    )
    nb = gmpy2.mpz(_pack_nonneg(bpos, slot_bytes, width_b)) - gmpy2.mpz(
        _pack_nonneg(bneg, slot_bytes, width_b)
    )
    prod = int(na * nb)
    half = 1 << (slot_bits - 1)
    offset_unit = bytearray(slot_bytes * width)
    half_bytes = half.to_bytes(slot_bytes, "little")
    for i in range(width):
        offset_unit[i * slot_bytes : (i + 1) * slot_bytes] = half_bytes
    shifted = prod + int.from_bytes(offset_unit, "little")
    raw = shifted.to_bytes(slot_bytes * width + slot_bytes, "little", signed=False)
    out: dict[int, int] = {}
    for e in range(width):
        chunk = raw[e * slot_bytes : (e + 1) * slot_bytes]
        digit = int.from_bytes(chunk, "little") - half
        if digit:
            out[e] = digit
    return out


# ---------------------------------------------------------------------------
# Dense modular arithmetic helpers (numpy, moduli below 2**31)
# ---------------------------------------------------------------------------


def _dense_mod(terms: dict[int, int], q: int) -> np.ndarray:
    d = max(terms)
    arr = np.zeros(d + 1, dtype=np.int64)
    for e, c in terms.items():
        arr[e] = c % q
    return _np_trim(arr)


def _np_trim(arr: np.ndarray) -> np.ndarray:
    nz = np.nonzero(arr)[0]
    if len(nz) == 0:
        return arr[:0]
    return arr[: nz[-1] + 1]


def _np_rem_mod(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    """Remainder of a by b modulo prime q; b nonzero, arrays ascending."""
    nb = len(b)
    inv = pow(int(b[-1]), -1, q)
    a = a.copy()
    for top in range(len(a) - 1, nb - 2, -1):
        c = int(a[top])
        if c:
            factor = c * inv % q
            lo = top - nb + 1
            a[lo : top + 1] = (a[lo : top + 1] - factor * b) % q
    return _np_trim(a[: nb - 1] if len(a) >= nb else a)


def _np_gcd_mod(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    while len(b):
        a, b = b, _np_rem_mod(a, b, q)
    if len(a):
        inv = pow(int(a[-1]), -1, q)
        a = a * inv % q
    return a


def _crt_primes() -> Iterator[int]:
    """Deterministic stream of distinct primes just below 2**31."""
    n = (1 << 31) - 1
    while True:
        if is_prime(n):
            yield n
        n -= 2


# ---------------------------------------------------------------------------
# gcd, squarefree part
# ---------------------------------------------------------------------------

_SMALL_GCD_DEGREE = 40


def poly_gcd(f: SparsePoly, g: SparsePoly) -> SparsePoly:
    """gcd over the rationals, normalized to a primitive integer polynomial
    with positive leading coefficient (1 for coprime inputs)."""
    if f.is_zero and g.is_zero:
        return SparsePoly.zero()
    if f.is_zero:
        return g.primitive_part()
    if g.is_zero:
        return f.primitive_part()
    fp = f.primitive_part()
    gp = g.primitive_part()
    if fp.degree == 0 or gp.degree == 0:
        return SparsePoly.one()
    if min(fp.degree, gp.degree) <= _SMALL_GCD_DEGREE:
        return _gcd_primitive_prs(fp, gp)
    return _gcd_modular(fp, gp)


def _int_terms(p: SparsePoly) -> dict[int, int]:
    return p._terms  # primitive parts are integral


def _prem(a: dict[int, int], b: dict[int, int]) -> dict[int, int]:
    """Pseudo-remainder: lc(b)**(da-db+1) * a reduced by b, all in integers."""
    da, db = max(a), max(b)
    lcb = b[db]
    r = dict(a)
    for top in range(da, db - 1, -1):
        c = r.get(top, 0)
        new: dict[int, int] = {}
        for e, v in r.items():
            if e != top:
                new[e] = v * lcb
        if c:
            for e, v in b.items():
                if e != db:
                    t = top - db + e
                    s = new.get(t, 0) - c * v
                    if s == 0:
                        new.pop(t, None)
                    else:
                        new[t] = s
        r = new
    return r


def _gcd_primitive_prs(fp: SparsePoly, gp: SparsePoly) -> SparsePoly:
    a, b = _int_terms(fp), _int_terms(gp)
    if max(a) < max(b):
        a, b = b, a
    while b:
        r = _prem(a, b)
        if r:
            cont = 0
            for v in r.values():
                cont = math.gcd(cont, v)
            r = {e: v // cont for e, v in r.items()}
        a, b = b, r
    out = SparsePoly._raw(dict(a))
    return out.primitive_part()


def _divides_int(candidate: SparsePoly, target: SparsePoly) -> bool:
    """Exact integer divisibility test with a cheap evaluation pre-filter."""
    c1 = candidate.evaluate(1)
    if c1 != 0 and target.evaluate(1) % c1 != 0:
        return False
    cm1 = candidate.evaluate(-1)
    if cm1 != 0 and target.evaluate(-1) % cm1 != 0:
        return False
    _, r = divmod(target, candidate)
    return r.is_zero


def _gcd_modular(fp: SparsePoly, gp: SparsePoly) -> SparsePoly:
    a, b = _int_terms(fp), _int_terms(gp)
    lc_gcd = math.gcd(a[max(a)], b[max(b)])
    best_deg: int | None = None
    crt_mod = 0
    crt_coeffs: dict[int, int] = {}
    last_candidate: SparsePoly | None = None
    for q in _crt_primes():
        if a[max(a)] % q == 0 or b[max(b)] % q == 0:
            continue
        hq = _np_gcd_mod(_dense_mod(a, q), _dense_mod(b, q), q)
        dq = len(hq) - 1
        if dq == 0:
            return SparsePoly.one()
        scaled = hq * (lc_gcd % q) % q
        if best_deg is None or dq < best_deg:
            best_deg = dq
            crt_mod = q
            crt_coeffs = {e: int(scaled[e]) for e in range(len(scaled)) if scaled[e]}
            last_candidate = None
        elif dq > best_deg:
            continue  # unlucky prime
        else:
            m0 = crt_mod
            inv_m0 = pow(m0 % q, -1, q)
            new_mod = m0 * q
            merged: dict[int, int] = {}
            for e in range(dq + 1):
                x0 = crt_coeffs.get(e, 0)
                r_q = int(scaled[e]) if e < len(scaled) else 0
                t = (r_q - x0) % q * inv_m0 % q
                val = (x0 + m0 * t) % new_mod
                if val:
                    merged[e] = val
            crt_mod = new_mod
            crt_coeffs = merged
        balanced = {
            e: (v if v <= crt_mod // 2 else v - crt_mod) for e, v in crt_coeffs.items()
        }
        candidate = SparsePoly._raw({e: v for e, v in balanced.items() if v}).primitive_part()
        if last_candidate is not None and candidate == last_candidate:
            if _divides_int(candidate, fp) and _divides_int(candidate, gp):
                return candidate
        last_candidate = candidate


def squarefree_part(f: SparsePoly) -> SparsePoly:
    """The product of the distinct irreducible factors of f, normalized to
    integer coefficients, content 1, positive leading coefficient."""
    if f.is_zero:
        raise UsageError("the zero polynomial has no squarefree part")
    fp = f.primitive_part()
    if fp.degree == 0:
        return SparsePoly.one()
    g = poly_gcd(fp, fp.derivative())
    if g.degree == 0:
        return fp if fp.leading_coeff > 0 else -fp
    return fp.exact_div(g).primitive_part()


def coprime_radical(polys: Iterable[SparsePoly]) -> SparsePoly:
    """Squarefree polynomial whose root set is the union of the inputs'.

    Each input is replaced by its squarefree part, factors already
    collected are divided out, and the leftovers are multiplied together.
    Constant inputs contribute nothing; a degree-0 result (no input had a
    root) is the constant 1.  Counting roots of the radical counts the
    distinct roots of the product of the inputs without ever expanding
    that product.
    """
    acc = SparsePoly.one()
    for f in polys:
        if f.is_zero:
            raise UsageError("the zero polynomial has no radical")
        if f.degree == 0:
            continue
        part = squarefree_part(f)
        shared = poly_gcd(part, acc)
        if shared.degree > 0:
            part = part.exact_div(shared).primitive_part()
        if part.degree > 0:
            acc = acc * part
    return acc


# ---------------------------------------------------------------------------
# Resultant and discriminant (subresultant pseudo-remainder sequence)
# ---------------------------------------------------------------------------


def resultant(f: SparsePoly, g: SparsePoly) -> Fraction:
    """Resultant of f and g over the rationals, exact."""
    if f.is_zero or g.is_zero:
        return Fraction(0)
    df, dg = f.degree, g.degree
    if df == 0:
        return Fraction(f.leading_coeff) ** dg
    if dg == 0:
        return Fraction(g.leading_coeff) ** df
    cf, fp = f.content_and_primitive()
    cg, gp = g.content_and_primitive()
    scale = Fraction(cf) ** dg * Fraction(cg) ** df
    return scale * _resultant_int(fp, gp)


def _resultant_int(fp: SparsePoly, gp: SparsePoly) -> int:
    a, b = fp, gp
    sign = 1
    if a.degree < b.degree:
        if (a.degree * b.degree) % 2 == 1:
            sign = -sign
        a, b = b, a
    g_ = 1
    h = 1
    while True:
        da, db = a.degree, b.degree
        delta = da - db
        if (da * db) % 2 == 1:
            sign = -sign
        r_terms = _prem(_int_terms(a), _int_terms(b))
        if not r_terms:
            return 0  # nontrivial common factor
        divisor = g_ * h**delta
        r = SparsePoly._raw({e: v // divisor for e, v in r_terms.items()})
        a, b = b, r
        g_ = a.leading_coeff
        if delta == 0:
            h = h  # unchanged when no degree drop beyond one step
        elif delta == 1:
            h = g_
        else:
            h = g_**delta // h ** (delta - 1)
        if b.degree == 0:
            da = a.degree
            lcb = b.leading_coeff
            res = lcb**da // h ** (da - 1) if da >= 1 else lcb
            return sign * res


def discriminant(f: SparsePoly) -> Fraction:
    """Discriminant of f: (-1)**(d(d-1)/2) * res(f, f') / lc(f)."""
    d = f.degree
    if d is None or d < 1:
        raise UsageError("discriminant requires degree at least 1")
    if d == 1:
        return Fraction(1)
    res = resultant(f, f.derivative())
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return sign * res / Fraction(f.leading_coeff)


# ---------------------------------------------------------------------------
# Rational roots by divisor enumeration
# ---------------------------------------------------------------------------


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    for c in range(1, 50):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
    raise ArithmeticError(f"factorization stalled for {n}")


def _factorize(n: int) -> dict[int, int]:
    """Prime factorization of a positive integer, exact."""
    out: dict[int, int] = {}
    for p in (2, 3, 5, 7, 11, 13):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        # quick trial division before rho
        found = False
        p = 17
        while p * p <= m and p < 100_000:
            if m % p == 0:
                stack.extend([p, m // p])
                found = True
                break
            p += 2
        if not found:
            d = _pollard_rho(m)
            stack.extend([d, m // d])
    return out


def _divisors(n: int) -> list[int]:
    facs = _factorize(n)
    out = [1]
    for p, k in facs.items():
        out = [d * p**i for d in out for i in range(k + 1)]
    return out


def divisor_count(n: int) -> int:
    """Number of positive divisors of abs(n); n must be nonzero."""
    if n == 0:
        raise UsageError("zero has no finite divisor count")
    out = 1
    for k in _factorize(abs(n)).values():
        out *= k + 1
    return out


# Filter prime for candidate rejection: small enough that products of two
# reduced values fit in int64, so the divisor grid vectorizes.
_FILTER_MODULUS = 2**31 - 1


def _powmod_vec(base: np.ndarray, exp: int, modulus: int) -> np.ndarray:
    out = np.ones_like(base)
    b = base % modulus
    while exp:
        if exp & 1:
            out = out * b % modulus
        b = b * b % modulus
        exp >>= 1
    return out


def _surviving_pairs(
    gp: SparsePoly, divs_a: list[int], divs_b: list[int]
) -> list[tuple[int, int]]:
    """Candidate pairs (a, b) not refuted by the homogeneous value mod a prime.

    The homogeneous value b**d * gp(a/b) of a true root is exactly zero, so
    a nonzero value mod the filter prime disproves the candidate; survivors
    still need exact verification.  Both signs of a are scanned.
    """
    m = _FILTER_MODULUS
    d = gp.degree
    items = sorted((e, int(c) % m) for e, c in gp.terms().items())
    b_mod = np.array([b % m for b in divs_b], dtype=np.int64)
    out: list[tuple[int, int]] = []
    for sign in (1, -1):
        a_mod = np.array([sign * a % m for a in divs_a], dtype=np.int64)
        acc = np.zeros((len(divs_a), len(divs_b)), dtype=np.int64)
        for e, c in items:
            pa = _powmod_vec(a_mod, e, m)
            pb = _powmod_vec(b_mod, d - e, m)
            acc = (acc + np.outer(pa, pb) % m * c) % m
        for i, j in zip(*np.nonzero(acc == 0)):
            out.append((sign * divs_a[int(i)], divs_b[int(j)]))
    return out


def rational_roots(f: SparsePoly) -> dict[Fraction, int]:
    """All rational roots with multiplicities, each verified exactly.

    Candidates a/b are enumerated from divisors of the constant and leading
    coefficients of the primitive integer form, so the cost is governed by
    the divisor counts of those two integers.  A vectorized modular filter
    rejects non-roots before any exact evaluation.
    """
    if f.is_zero:
        raise UsageError("every rational is a root of the zero polynomial")
    out: dict[Fraction, int] = {}
    g, k = f.strip_zero_root()
    if k:
        out[Fraction(0)] = k
    if g.degree == 0:
        return out
    gp = g.primitive_part()
    a0 = abs(gp.constant_coeff)
    an = abs(gp.leading_coeff)
    seen: set[Fraction] = set()
    for a, b in _surviving_pairs(gp, _divisors(a0), _divisors(an)):
        r = Fraction(a, b)
        if r in seen:
            continue
        seen.add(r)
        if gp.evaluate(r) == 0:
            mult = 0
            h = gp
            linear = SparsePoly([(1, 1), (0, -r)])
            while True:
                q, rem = divmod(h, linear)
                if not rem.is_zero:
                    break
                h = q
                mult += 1
            out[r] = mult
    return out


# ---------------------------------------------------------------------------
# Real-root counting by Sturm sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    """A rational interval with independent open/closed endpoint flags."""

    lo: Fraction
    hi: Fraction
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise UsageError(f"empty interval: lo {self.lo} > hi {self.hi}")

    def __str__(self) -> str:
        lo_b = "[" if self.lo_closed else "("
        hi_b = "]" if self.hi_closed else ")"
        return f"{lo_b}{format_rational(self.lo)},{format_rational(self.hi)}{hi_b}"


def _sturm_chain(g: SparsePoly) -> list[SparsePoly]:
    chain = [g, g.derivative()]
    while not chain[-1].is_zero and chain[-1].degree > 0:
        rem = chain[-2] % chain[-1]
        if rem.is_zero:
            break
        # strip positive content only: sign pattern must be preserved
        cont, prim = rem.content_and_primitive()
        nxt = -(prim if cont > 0 else -prim)
        chain.append(nxt)
    return [p for p in chain if not p.is_zero]


def _sign_variations(chain: list[SparsePoly], t: Fraction) -> int:
    signs = []
    for poly in chain:
        v = poly.evaluate(t)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for i in range(len(signs) - 1) if signs[i] != signs[i + 1])


def sturm_count(f: SparsePoly, interval: Interval) -> int:
    """Number of distinct real roots of f in the interval, exact."""
    if f.is_zero:
        raise UsageError("cannot count the roots of the zero polynomial")
    g = squarefree_part(f)
    lo, hi = interval.lo, interval.hi
    if lo == hi:
        inside = interval.lo_closed and interval.hi_closed
        return 1 if inside and g.evaluate(lo) == 0 else 0
    extra = 0
    if interval.lo_closed and g.evaluate(lo) == 0:
        extra += 1
    if interval.hi_closed and g.evaluate(hi) == 0:
        extra += 1
    for r in (lo, hi):
        linear = SparsePoly([(1, 1), (0, -r)])
        while g.degree and g.evaluate(r) == 0:
            g = g.exact_div(linear)
    if not g.degree:
        return extra
    chain = _sturm_chain(g)
    return _sign_variations(chain, lo) - _sign_variations(chain, hi) + extra
