"""Certified rounding of real-valued formulas via interval arithmetic.

Expressions are evaluated under mpmath's interval context at increasing
working precision until the requested rounding (floor, ceiling, or sign)
is provable from the enclosure alone; running out of the precision ladder
is a hard error, never a silently rounded value.

Builder callables are re-invoked at each precision level, so they must
construct the whole interval expression from exact inputs (ints and
Fractions) on every call.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from fractions import Fraction
from typing import Callable, Iterator

from mpmath import iv, libmp

from .errors import PrecisionError

__all__ = [
    "certified_ceil",
    "certified_floor",
    "certified_sign",
    "fraction_endpoints",
    "iv_fraction",
    "iv_log",
    "iv_log_base",
    "iv_euler_factor",
]

_PREC_LADDER = (64, 128, 256, 512, 1024, 2048, 4096, 8192)

_SPECIALS = (libmp.finf, libmp.fninf, libmp.fnan)


@contextmanager
def _iv_precision(prec: int) -> Iterator[None]:
    old = iv.prec
    iv.prec = prec
    try:
        yield
    finally:
        iv.prec = old


def fraction_endpoints(x) -> tuple[Fraction, Fraction]:
    """Exact rational endpoints of an interval value.

    Infinite or NaN endpoints are refused: to_rational would quietly
    produce garbage for them.
    """
    a, b = x._mpi_
    if a in _SPECIALS or b in _SPECIALS:
        raise PrecisionError(f"non-finite interval endpoint in {x}")
    pa, qa = libmp.to_rational(a)
    pb, qb = libmp.to_rational(b)
    return Fraction(int(pa), int(qa)), Fraction(int(pb), int(qb))


def iv_fraction(q: Fraction | int):
    """Tight two-sided enclosure of an exact rational."""
    q = Fraction(q)
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


def iv_log(x):
    """Natural logarithm of an interval or exact number."""
    if isinstance(x, (int, Fraction)):
        x = iv_fraction(x)
    return iv.log(x)


def iv_log_base(x, p: int):
    """Logarithm base p of an interval or exact number."""
    return iv_log(x) / iv_log(p)


def iv_euler_factor():
    """Enclosure of e/(e-1)."""
    e = +iv.e
    return e / (e - 1)


def _certified_round(
    build: Callable[[], object], mode: str
) -> tuple[int, tuple[Fraction, Fraction]]:
    for prec in _PREC_LADDER:
        with _iv_precision(prec):
            lo, hi = fraction_endpoints(build())
        if hi - lo >= 1:
            continue
        if mode == "floor":
            a, b = math.floor(lo), math.floor(hi)
        else:
            a, b = math.ceil(lo), math.ceil(hi)
        if a == b:
            return a, (lo, hi)
    raise PrecisionError(
        f"could not certify a {mode} within {_PREC_LADDER[-1]} bits of precision"
    )


def certified_floor(build: Callable[[], object]) -> tuple[int, tuple[Fraction, Fraction]]:
    """(floor, (lo, hi)): the floor plus an enclosure of width < 1 proving it."""
    return _certified_round(build, "floor")


def certified_ceil(build: Callable[[], object]) -> tuple[int, tuple[Fraction, Fraction]]:
    """(ceil, (lo, hi)): the ceiling plus an enclosure of width < 1 proving it."""
    return _certified_round(build, "ceil")


def certified_sign(build: Callable[[], object]) -> tuple[int, tuple[Fraction, Fraction]]:
    """(sign, (lo, hi)) with sign in {-1, +1}, provable from the enclosure.

    Only use on quantities that cannot be exactly zero; a true zero would
    exhaust the ladder.
    """
    for prec in _PREC_LADDER:
        with _iv_precision(prec):
            lo, hi = fraction_endpoints(build())
        if lo > 0:
            return 1, (lo, hi)
        if hi < 0:
            return -1, (lo, hi)
    raise PrecisionError(
        f"could not certify a sign within {_PREC_LADDER[-1]} bits of precision"
    )
