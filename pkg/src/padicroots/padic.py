"""Exact p-adic valuations, norms, and finite digit expansions.

Valuations are exact objects: either a rational number (``int`` or
``fractions.Fraction``) or the absorbing infinity ``INF`` assigned to 0.
No floats appear anywhere in this module.

Digit expansions are finite windows of the canonical base-p expansion of a
rational number whose denominator is coprime to p after the p-part is
factored out.  The window always starts at the first significant position
(the valuation), so requesting n digits of q yields the digits at positions
ord_p(q) .. ord_p(q) + n - 1 and determines q modulo p**(ord_p(q) + n).
Negative numbers are rendered sign-magnitude: the digits of |q| with a
leading minus sign.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import gmpy2

from .errors import PrimeValidationError, UsageError

__all__ = [
    "INF",
    "Infinity",
    "Valuation",
    "Prime",
    "is_prime",
    "ord_int",
    "ord_rat",
    "padic_norm",
    "digits",
    "DigitString",
    "format_rational",
    "parse_rational",
]


class Infinity:
    """The valuation of zero: larger than every rational, absorbs addition.

    A single shared instance ``INF`` is exported; identity comparison is
    safe, and ``==`` only holds against other ``Infinity`` instances.
    """

    _instance: "Infinity | None" = None

    def __new__(cls) -> "Infinity":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "+inf"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Infinity)

    def __hash__(self) -> int:
        return hash("padicroots-infinity")

    def __lt__(self, other: object) -> bool:
        return False

    def __le__(self, other: object) -> bool:
        return isinstance(other, Infinity)

    def __gt__(self, other: object) -> bool:
        return not isinstance(other, Infinity)

    def __ge__(self, other: object) -> bool:
        return True

    def __add__(self, other: object) -> "Infinity":
        return self

    __radd__ = __add__

    def __mul__(self, other: object):
        # Scaling a valuation by a positive integer (hull dilation).
        if isinstance(other, Infinity) or other > 0:
            return self
        raise ValueError("cannot scale infinite valuation by a non-positive factor")

    __rmul__ = __mul__


INF = Infinity()

Valuation = Union[int, Fraction, Infinity]

# Deterministic Miller-Rabin witnesses: complete for n < 3.317e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_DETERMINISTIC_LIMIT = 3_317_044_064_679_887_385_961_981


def is_prime(n: int) -> bool:
    """Exact primality for n below 3.317e24; deterministic Miller-Rabin
    with seeded extra witnesses above that (still deterministic per n)."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n == q:
            return True
        if n % q == 0:
            return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    witnesses: tuple[int, ...] = _MR_WITNESSES
    if n >= _MR_DETERMINISTIC_LIMIT:
        rng = random.Random(n)
        witnesses = witnesses + tuple(rng.randrange(2, n - 1) for _ in range(40))
    for a in witnesses:
        a %= n
        if a in (0, 1, n - 1):
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Prime(int):
    """A positive prime integer; the constructor rejects everything else."""

    def __new__(cls, value: int) -> "Prime":
        try:
            v = int(value)
        except (TypeError, ValueError) as exc:
            raise PrimeValidationError(f"not an integer: {value!r}") from exc
        if isinstance(value, float):
            raise PrimeValidationError(f"not an integer: {value!r}")
        if not is_prime(v):
            raise PrimeValidationError(f"not a prime: {v}")
        return super().__new__(cls, v)


def ord_int(n: int, p: int) -> Valuation:
    """p-adic valuation of an integer; ord(0) is INF."""
    if n == 0:
        return INF
    if p == 2:
        return ((n & -n).bit_length()) - 1
    return gmpy2.remove(n, p)[1]


def ord_rat(q: Union[int, Fraction], p: int) -> Valuation:
    """p-adic valuation of a rational; ord(0) is INF."""
    if isinstance(q, int):
        return ord_int(q, p)
    if q == 0:
        return INF
    return ord_int(q.numerator, p) - ord_int(q.denominator, p)


def padic_norm(q: Union[int, Fraction], p: int) -> Fraction:
    """p-adic absolute value p**(-ord_p(q)) as an exact Fraction; |0| = 0."""
    v = ord_rat(q, p)
    if isinstance(v, Infinity):
        return Fraction(0)
    if v >= 0:
        return Fraction(1, p**v)
    return Fraction(p ** (-v))


_DIGIT_ALPHABET = "0123456789abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class DigitString:
    """A finite window of a base-p expansion.

    ``digit_values`` is least-significant first; entry i sits at exponent
    ``lsb_exponent + i``.  ``negative`` flags sign-magnitude rendering.

    Invariants: every digit lies in [0, p); the rendered form shows a radix
    point exactly when ``lsb_exponent`` is negative, and no redundant
    leading zeros (a single zero survives only in "0" or "0.xyz" forms).
    """

    prime: int
    negative: bool
    lsb_exponent: int
    digit_values: tuple[int, ...]

    def __post_init__(self) -> None:
        for d in self.digit_values:
            if not 0 <= d < self.prime:
                raise ValueError(f"digit {d} out of range for base {self.prime}")

    def to_rational(self) -> Fraction:
        """Signed exact value of the window: +-sum d_i * p**(lsb_exponent+i)."""
        total = Fraction(0)
        p = self.prime
        for i, d in enumerate(self.digit_values):
            e = self.lsb_exponent + i
            total += d * (Fraction(p) ** e)
        return -total if self.negative else total

    def __str__(self) -> str:
        if not self.digit_values or all(d == 0 for d in self.digit_values):
            return "0"
        t = self.lsb_exponent
        top = t + len(self.digit_values) - 1
        hi = max(top, 0)
        lo = min(t, 0)
        rendered: list[str] = []
        for pos in range(hi, lo - 1, -1):
            d = self.digit_values[pos - t] if t <= pos <= top else 0
            if self.prime <= len(_DIGIT_ALPHABET):
                rendered.append(_DIGIT_ALPHABET[d])
            else:
                rendered.append(f"({d})")
            if pos == 0 and lo < 0:
                rendered.append(".")
        s = "".join(rendered)
        while len(s) > 1 and s[0] == "0" and s[1] != ".":
            s = s[1:]
        return ("-" if self.negative else "") + s


def digits(q: Union[int, Fraction], p: int, n: int) -> DigitString:
    """First n base-p digits of q, starting at position ord_p(q).

    The result determines q modulo p**(ord_p(q) + n).  Requires n >= 1 and
    a valid prime p; q = 0 yields the all-zero window at position 0.
    """
    p = int(Prime(p))
    if n <= 0:
        raise UsageError(f"digit count must be positive, got {n}")
    q = Fraction(q)
    if q == 0:
        return DigitString(prime=p, negative=False, lsb_exponent=0, digit_values=(0,) * n)
    negative = q < 0
    if negative:
        q = -q
    v = ord_rat(q, p)
    assert not isinstance(v, Infinity)
    # Unit part u = q / p**v has numerator and denominator coprime to p.
    unit = q / Fraction(p) ** v
    modulus = p**n
    num = unit.numerator % modulus
    den = unit.denominator % modulus
    u_mod = num * pow(den, -1, modulus) % modulus
    ds = []
    for _ in range(n):
        u_mod, d = divmod(u_mod, p)
        ds.append(d)
    return DigitString(prime=p, negative=negative, lsb_exponent=int(v), digit_values=tuple(ds))


def format_rational(q: Union[int, Fraction]) -> str:
    """Canonical text for a rational: "n" for integers, "n/d" otherwise."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse "n" or "n/d" into an exact Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc
