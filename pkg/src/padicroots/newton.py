"""Newton polygons, root-valuation profiles, and p-adic root counting.

The Newton polygon of a nonzero polynomial at a prime p is the lower convex
hull of the points (exponent, ord_p(coefficient)).  Its edge slopes encode
the valuations of the roots: an edge of slope -v and horizontal width w
accounts for exactly w roots of valuation v (with multiplicity), and the
power of x dividing the polynomial accounts for the roots at 0.

Root counting:

  * count_roots_zp / count_roots_qp count distinct roots in the p-adic
    integers / the p-adic field.  The algorithm reduces to the squarefree
    part, scans residues mod p, lifts simple residues uniquely, and recurses
    on g(r + p*y)/p^m for multiple residues.  Recursion depth is protected
    by a certificate (2*ord_p(disc) + 1, computed lazily) and, on the
    large-degree path, by explicitly tracked working precision mod p^M with
    automatic escalation.
  * count_roots_in_disk counts roots x with ord_p(x - 1) >= r via the
    Newton polygon of the Taylor shift g(1 + y): the count is the largest
    k minimizing ord_p(b_k) + r*k.

All results are exact; the modular fast paths only ever accelerate the
computation of quantities whose correctness is re-anchored to exact data
(escalating precision until every decision is determined).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from gmpy2 import mpz, next_prime

from .errors import HenselDepthError, PrecisionError, UsageError
from .padic import INF, Infinity, format_rational, parse_rational, ord_int, ord_rat
from .polynomial import (
    SparsePoly,
    _dense_mod,
    discriminant,
    divisor_count,
    _np_gcd_mod,
    rational_roots,
    squarefree_part,
)

__all__ = [
    "LowerHull",
    "ValuationProfile",
    "newton_polygon",
    "face",
    "slope_set",
    "minkowski_sum",
    "hull_union",
    "hull_scale",
    "hull_translate",
    "valuation_profile",
    "distinct_valuation_count",
    "count_roots_zp",
    "count_roots_qp",
    "count_roots_in_disk",
    "lift_zp_root_residues",
    "distinct_rational_roots",
]

Ordinate = Union[int, Fraction]
Point = tuple[int, Ordinate]

_RESIDUE_SCAN_LIMIT = 100_000
_EXACT_DEGREE_LIMIT = 128
_SOFT_DEPTH = 64
_MIN_HEADROOM = 8
_MAX_PRECISION = 4096


def _norm_ord(v: Ordinate) -> Ordinate:
    if isinstance(v, Fraction) and v.denominator == 1:
        return v.numerator
    return v


def _cross(o: Point, a: Point, b: Point) -> Fraction | int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class LowerHull:
    """Lower convex hull of a finite point set in the (exponent, valuation)
    plane.

    Invariants: at least one vertex; abscissas strictly increasing;
    successive edge slopes strictly increasing.
    """

    vertices: tuple[Point, ...]

    def __post_init__(self) -> None:
        vs = self.vertices
        if not vs:
            raise UsageError("a hull needs at least one vertex")
        for i in range(1, len(vs)):
            if vs[i][0] <= vs[i - 1][0]:
                raise UsageError("hull abscissas must strictly increase")
        slopes = self.slopes()
        for i in range(1, len(slopes)):
            if slopes[i] <= slopes[i - 1]:
                raise UsageError("hull slopes must strictly increase")

    @classmethod
    def from_points(cls, points: Sequence[Point]) -> "LowerHull":
        """Lower hull of arbitrary points; ties in abscissa keep the lowest."""
        if not points:
            raise UsageError("cannot build a hull from no points")
        best: dict[int, Ordinate] = {}
        for a, v in points:
            if a not in best or v < best[a]:
                best[a] = v
        pts = sorted(best.items())
        hull: list[Point] = []
        for pt in pts:
            while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
                hull.pop()
            hull.append(pt)
        return cls(tuple((a, _norm_ord(v)) for a, v in hull))

    # -- geometry ----------------------------------------------------------

    def slopes(self) -> list[Fraction]:
        out = []
        vs = self.vertices
        for i in range(1, len(vs)):
            (a0, v0), (a1, v1) = vs[i - 1], vs[i]
            out.append(Fraction(v1 - v0, a1 - a0))
        return out

    def edges(self) -> list[tuple[Point, Point, Fraction, int]]:
        """Successive edges as (start, end, slope, width)."""
        out = []
        vs = self.vertices
        for i in range(1, len(vs)):
            (a0, v0), (a1, v1) = vs[i - 1], vs[i]
            out.append(((a0, v0), (a1, v1), Fraction(v1 - v0, a1 - a0), a1 - a0))
        return out

    @property
    def min_abscissa(self) -> int:
        return self.vertices[0][0]

    @property
    def max_abscissa(self) -> int:
        return self.vertices[-1][0]

    def value_at(self, a: Fraction) -> Fraction:
        """Height of the lower envelope at abscissa a (must lie in range)."""
        a = Fraction(a)
        vs = self.vertices
        if a < vs[0][0] or a > vs[-1][0]:
            raise UsageError(f"abscissa {a} outside hull range")
        for i in range(1, len(vs)):
            if a <= vs[i][0]:
                (a0, v0), (a1, v1) = vs[i - 1], vs[i]
                return Fraction(v0) + Fraction(v1 - v0, a1 - a0) * (a - a0)
        return Fraction(vs[-1][1])

    def supports_point(self, a: int, v: Ordinate) -> bool:
        """True when (a, v) lies on or above the hull (within its span)."""
        if a < self.min_abscissa or a > self.max_abscissa:
            return False
        return Fraction(v) >= self.value_at(Fraction(a))

    # -- serialization -----------------------------------------------------

    def to_json_obj(self) -> dict:
        return {"vertices": [[a, format_rational(v)] for a, v in self.vertices]}

    @classmethod
    def from_json_obj(cls, obj: object) -> "LowerHull":
        if not isinstance(obj, dict) or not isinstance(obj.get("vertices"), list):
            raise UsageError("hull JSON must be an object with a 'vertices' list")
        verts = []
        for entry in obj["vertices"]:
            if not isinstance(entry, list) or len(entry) != 2 or not isinstance(entry[0], int):
                raise UsageError(f"bad hull vertex: {entry!r}")
            verts.append((entry[0], _norm_ord(parse_rational(str(entry[1])))))
        return cls(tuple(verts))

    def __str__(self) -> str:
        return " ".join(f"({a},{format_rational(v)})" for a, v in self.vertices)


def face(hull: LowerHull, r: Fraction) -> LowerHull:
    """The face of the hull supported by a line of slope -r: the vertices
    minimizing   r * abscissa + ordinate.   A vertex or a run of edges."""
    r = Fraction(r)
    scores = [r * a + v for a, v in hull.vertices]
    m = min(scores)
    picked = tuple(pt for pt, s in zip(hull.vertices, scores) if s == m)
    return LowerHull(picked)


def slope_set(hull: LowerHull) -> tuple[Fraction, ...]:
    """The edge slopes of the hull, strictly increasing."""
    return tuple(hull.slopes())


def minkowski_sum(h1: LowerHull, h2: LowerHull) -> LowerHull:
    """Minkowski sum of two lower hulls: edge vectors merge by slope and
    parallel edges coalesce.  This is the Newton polygon of a product."""
    e1, e2 = h1.edges(), h2.edges()
    start = (h1.vertices[0][0] + h2.vertices[0][0], h1.vertices[0][1] + h2.vertices[0][1])
    merged: list[tuple[int, Ordinate, Fraction]] = []  # (da, dv, slope)
    i = j = 0
    while i < len(e1) or j < len(e2):
        take1 = j >= len(e2) or (i < len(e1) and e1[i][2] <= e2[j][2])
        edge = e1[i] if take1 else e2[j]
        (a0, v0), (a1, v1), slope, width = edge
        da, dv = a1 - a0, v1 - v0
        if merged and merged[-1][2] == slope:
            pda, pdv, _ = merged[-1]
            merged[-1] = (pda + da, pdv + dv, slope)
        else:
            merged.append((da, dv, slope))
        if take1:
            i += 1
        else:
            j += 1
    verts: list[Point] = [start]
    for da, dv, _ in merged:
        a, v = verts[-1]
        verts.append((a + da, _norm_ord(v + dv)))
    return LowerHull(tuple((a, _norm_ord(v)) for a, v in verts))


def hull_union(h1: LowerHull, h2: LowerHull) -> LowerHull:
    """Lower hull of the union of the vertex sets.  This is the predicted
    polygon for a sum: the true polygon lies on or above it (cancellation
    can only raise or remove points, it cannot dip below)."""
    return LowerHull.from_points(h1.vertices + h2.vertices)


def hull_scale(h: LowerHull, k: int) -> LowerHull:
    """Dilation by a nonnegative integer: the polygon of a k-th power."""
    if k < 0:
        raise UsageError(f"hull dilation factor must be nonnegative, got {k}")
    if k == 0:
        return LowerHull(((0, 0),))
    return LowerHull(tuple((k * a, _norm_ord(k * v)) for a, v in h.vertices))


def hull_translate(h: LowerHull, da: int, dv: Ordinate) -> LowerHull:
    """Translation: the polygon of x**da * c * f with ord_p(c) = dv."""
    if da < 0 and h.min_abscissa + da < 0:
        raise UsageError("translation would move the hull to negative exponents")
    return LowerHull(tuple((a + da, _norm_ord(v + dv)) for a, v in h.vertices))


def newton_polygon(f: SparsePoly, p: int) -> LowerHull:
    """Newton polygon of a nonzero polynomial at the prime p."""
    if f.is_zero:
        raise UsageError("the zero polynomial has no Newton polygon")
    points: list[Point] = []
    for e, c in f.terms().items():
        v = ord_rat(c if isinstance(c, Fraction) else c, p)
        assert not isinstance(v, Infinity)
        points.append((e, v))
    return LowerHull.from_points(points)


@dataclass(frozen=True)
class ValuationProfile:
    """Multiset of root valuations of a nonzero polynomial.

    ``pairs`` lists (valuation, multiplicity) for the nonzero roots,
    valuations strictly increasing; ``zero_multiplicity`` counts the roots
    at 0.  Multiplicities are positive and sum (with the zero roots) to the
    degree.
    """

    pairs: tuple[tuple[Fraction, int], ...]
    zero_multiplicity: int
    degree: int

    def __post_init__(self) -> None:
        total = self.zero_multiplicity
        last = None
        for v, m in self.pairs:
            if m <= 0:
                raise UsageError("profile multiplicities must be positive")
            if last is not None and v <= last:
                raise UsageError("profile valuations must strictly increase")
            last = v
            total += m
        if total != self.degree:
            raise UsageError(
                f"profile multiplicities sum to {total}, expected degree {self.degree}"
            )

    def as_dict(self) -> dict[Fraction, int]:
        return {v: m for v, m in self.pairs}

    def distinct_count(self) -> int:
        return len(self.pairs)

    def to_json_obj(self) -> dict:
        return {
            "zero_multiplicity": self.zero_multiplicity,
            "pairs": [[format_rational(v), m] for v, m in self.pairs],
        }

    @classmethod
    def from_json_obj(cls, obj) -> "ValuationProfile":
        try:
            zero = int(obj["zero_multiplicity"])
            pairs = tuple((parse_rational(v), int(m)) for v, m in obj["pairs"])
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed valuation profile object: {obj!r}") from exc
        degree = zero + sum(m for _, m in pairs)
        return cls(pairs=pairs, zero_multiplicity=zero, degree=degree)


def valuation_profile(f: SparsePoly, p: int) -> ValuationProfile:
    """Root valuations of f at p, from the Newton polygon: an edge of slope
    -v and width w contributes w roots of valuation v."""
    if f.is_zero:
        raise UsageError("the zero polynomial has no valuation profile")
    g, k = f.strip_zero_root()
    pairs: list[tuple[Fraction, int]] = []
    if g.degree > 0:
        hull = newton_polygon(g, p)
        for _, _, slope, width in hull.edges():
            pairs.append((-slope, width))
        pairs.sort()
    return ValuationProfile(pairs=tuple(pairs), zero_multiplicity=k, degree=f.degree)


def distinct_valuation_count(f: SparsePoly, p: int) -> int:
    """Number of distinct valuations among the nonzero roots of f: the
    number of edges of the Newton polygon after stripping roots at 0."""
    return valuation_profile(f, p).distinct_count()


# ---------------------------------------------------------------------------
# Root counting over Z_p and Q_p
# ---------------------------------------------------------------------------


class _NeedMorePrecision(Exception):
    pass


@dataclass
class _ZpState:
    """Shared recursion state: the prime and the lazily computed depth
    certificate for the squarefree input.

    The discriminant certificate is only computed on the exact small-degree
    path, where the subresultant sequence is affordable.  The modular path
    does not need it for termination: every recursion level consumes at
    least one digit of tracked precision, so depth is bounded by the
    precision budget and its escalation cap.
    """

    p: int
    squarefree: SparsePoly
    depth_bound: int | None = None

    def certificate(self) -> int | None:
        if self.depth_bound is None:
            d = self.squarefree.degree
            if d is None or d < 1:
                self.depth_bound = 1
            elif d > _EXACT_DEGREE_LIMIT:
                return None
            else:
                disc = discriminant(self.squarefree)
                v = ord_rat(disc, self.p)
                if isinstance(v, Infinity):
                    raise HenselDepthError(
                        "discriminant vanishes: input was not squarefree"
                    )
                self.depth_bound = 2 * max(v, 0) + 1
        return self.depth_bound


def _residue_roots(dense: list[int], p: int) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate the reduction mod p and its derivative at all residues.

    Returns boolean arrays (is_root, derivative_nonzero) indexed by residue.
    """
    xs = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    dacc = np.zeros(p, dtype=np.int64)
    for c in reversed(dense):
        dacc = (dacc * xs + acc) % p
        acc = (acc * xs + (c % p)) % p
    return acc == 0, dacc != 0


def _shift1_exact(dense: list[int]) -> list[int]:
    out = list(dense)
    d = len(out) - 1
    for i in range(d):
        for j in range(d - 1, i - 1, -1):
            out[j] += out[j + 1]
    return out


def _shift1_mod(dense: list[int], modulus: int) -> list[int]:
    """Taylor shift by 1 modulo ``modulus`` via cumulative-sum passes."""
    arr = np.array(dense, dtype=object)
    n = len(arr)
    for i in range(n - 1):
        seg = arr[i:][::-1]
        arr[i:] = np.cumsum(seg)[::-1]
        if i % 32 == 31:
            arr = arr % modulus
    return [int(v) % modulus for v in arr]


def _compose_class_exact(dense: list[int], r: int, p: int) -> tuple[list[int], int]:
    """Exact h(y) = g(r + p*y) / p^m with m the p-content; returns (h, m)."""
    d = len(dense) - 1
    shifted = list(dense)
    # Taylor shift by r: scale by r, shift by 1, unscale (exact divisions).
    if r:
        if r == 1:
            shifted = _shift1_exact(shifted)
        else:
            rw = 1
            for k in range(d + 1):
                shifted[k] *= rw
                rw *= r
            shifted = _shift1_exact(shifted)
            rw = 1
            for k in range(d + 1):
                shifted[k] //= rw
                rw *= r
    pw = 1
    for k in range(d + 1):
        shifted[k] *= pw
        pw *= p
    m = None
    for c in shifted:
        if c:
            v = ord_int(c, p)
            m = v if m is None else min(m, v)
            if m == 0:
                break
    assert m is not None and m >= 1
    return [c // p**m for c in shifted], m


def _compose_class_mod(
    dense: list[int], r: int, p: int, rem: int
) -> tuple[list[int], int]:
    """Like _compose_class_exact but with coefficients known mod p**rem.

    The returned coefficients are known mod p**(rem - m).  Raises
    _NeedMorePrecision when the p-content cannot be determined.
    """
    modulus = p**rem
    d = len(dense) - 1
    work = [c % modulus for c in dense]
    if r:
        if r != 1:
            rw = 1
            for k in range(d + 1):
                work[k] = work[k] * rw % modulus
                rw = rw * r % modulus
        work = _shift1_mod(work, modulus)
        if r != 1:
            rinv = pow(r, -1, modulus)
            rw = 1
            for k in range(d + 1):
                work[k] = work[k] * rw % modulus
                rw = rw * rinv % modulus
    pk = 1
    for k in range(d + 1):
        work[k] = work[k] * pk % modulus
        if pk < modulus:
            pk *= p
    m = None
    for c in work:
        if c:
            v = ord_int(c, p)
            if m is None or v < m:
                m = v
            if m == 0:
                break
    if m is None:
        raise _NeedMorePrecision
    assert m >= 1
    shift_pow = p**m
    return [c // shift_pow for c in work], m


def _count_class(
    dense: list[int], state: _ZpState, rem: int | None, depth: int
) -> tuple[int, int]:
    """Distinct roots of the (squarefree) polynomial given by ``dense`` in
    each residue class, returned as (total, unit_total) where unit_total
    omits the class of 0."""
    p = state.p
    if depth > _SOFT_DEPTH:
        cert = state.certificate()
        if cert is not None and depth > cert:
            raise HenselDepthError(f"root isolation exceeded certified depth {cert}")
    is_root, dnz = _residue_roots(dense, p)
    total = 0
    units = 0
    for r in range(p):
        if not is_root[r]:
            continue
        if dnz[r]:
            contribution = 1
        else:
            if rem is None:
                h, _ = _compose_class_exact(dense, r, p)
                contribution, _ = _count_class(h, state, None, depth + 1)
            else:
                h, m = _compose_class_mod(dense, r, p, rem)
                new_rem = rem - m
                if new_rem < _MIN_HEADROOM:
                    raise _NeedMorePrecision
                contribution, _ = _count_class(h, state, new_rem, depth + 1)
        total += contribution
        if r != 0:
            units += contribution
    return total, units


def _count_zp_with_units(g: SparsePoly, p: int) -> tuple[int, int]:
    """(distinct Z_p roots, distinct unit roots) of a squarefree primitive
    integer polynomial."""
    d = g.degree
    if d is None or d < 1:
        return 0, 0
    dense = [int(c) for c in g.to_dense()]
    state = _ZpState(p=p, squarefree=g)
    if d <= _EXACT_DEGREE_LIMIT:
        return _count_class(dense, state, None, 0)
    rem = 64
    while rem <= _MAX_PRECISION:
        try:
            return _count_class(dense, state, rem, 0)
        except _NeedMorePrecision:
            rem *= 2
    raise PrecisionError(
        f"root counting needed more than p**{_MAX_PRECISION} working precision"
    )


def _require_small_prime(p: int) -> None:
    if p > _RESIDUE_SCAN_LIMIT:
        raise UsageError(
            f"residue enumeration requires p <= {_RESIDUE_SCAN_LIMIT}, got {p}"
        )


def count_roots_zp(f: SparsePoly, p: int) -> int:
    """Number of distinct roots of f in the p-adic integers."""
    if f.is_zero:
        raise UsageError("cannot count roots of the zero polynomial")
    _require_small_prime(p)
    g = squarefree_part(f)
    total, _ = _count_zp_with_units(g, p)
    return total


def count_roots_qp(f: SparsePoly, p: int) -> int:
    """Number of distinct roots of f in the p-adic field.

    Roots split by valuation sign: the nonnegative part is the Z_p count,
    the negative part comes from the reversed polynomial's roots of positive
    valuation, and unit roots (valuation 0) would be double counted by the
    naive sum, so they are subtracted once.
    """
    if f.is_zero:
        raise UsageError("cannot count roots of the zero polynomial")
    _require_small_prime(p)
    g = squarefree_part(f)
    total, units = _count_zp_with_units(g, p)
    rev = g.reverse().primitive_part()
    if rev.degree is None or rev.degree < 1:
        rev_total = 0
    else:
        rev_total, _ = _count_zp_with_units(rev, p)
    return total + rev_total - units


# ---------------------------------------------------------------------------
# Disk counting around 1
# ---------------------------------------------------------------------------

_DISK_EXACT_DEGREE = 400
_DISK_MOD_PRECISION = 64


def _disk_valuations(g: SparsePoly, p: int) -> tuple[list[int | None], int | None]:
    """Valuations of the coefficients of g(1 + y).

    Returns (vals, uncertain_floor).  With uncertain_floor None, every None
    entry is a genuinely zero coefficient (valuation infinity).  Otherwise
    the computation ran mod p**uncertain_floor and a None entry only means
    the valuation is at least that floor.
    """
    dense = g.to_dense()
    if not g.is_integral():
        shifted = g.shift(1).to_dense()
        out: list[int | None] = []
        for c in shifted:
            v = ord_rat(Fraction(c), p)
            out.append(None if isinstance(v, Infinity) else int(v))
        return out, None
    int_dense = [int(c) for c in dense]
    if len(int_dense) - 1 <= _DISK_EXACT_DEGREE:
        shifted_i = _shift1_exact(int_dense)
        out = []
        for c in shifted_i:
            v = ord_int(c, p)
            out.append(None if isinstance(v, Infinity) else int(v))
        return out, None
    modulus = p**_DISK_MOD_PRECISION
    shifted_m = _shift1_mod(int_dense, modulus)
    out = []
    for c in shifted_m:
        out.append(None if c == 0 else int(ord_int(c, p)))
    return out, _DISK_MOD_PRECISION


def _exact_shift_coeff(dense: list[int], k: int) -> int:
    """Coefficient of y**k in g(1 + y), exactly: sum_j C(j, k) c_j."""
    total = 0
    for j in range(k, len(dense)):
        c = dense[j]
        if c:
            total += math.comb(j, k) * c
    return total


def count_roots_in_disk(
    f: SparsePoly, p: int, r: Fraction, multiplicities: bool = False
) -> int:
    """Number of roots x of f with ord_p(x - 1) >= r.

    Distinct roots by default; with ``multiplicities`` each root counts with
    its multiplicity.  The count is read off the Newton polygon of
    g(1 + y): it is the largest k minimizing ord_p(b_k) + r*k, because the
    polygon edges of slope at most -r sit exactly left of that abscissa.
    """
    if f.is_zero:
        raise UsageError("cannot count roots of the zero polynomial")
    r = Fraction(r)
    g = f if multiplicities else squarefree_part(f)
    if g.degree is None or g.degree < 1:
        return 0
    vals, uncertain_floor = _disk_valuations(g, p)
    scores: dict[int, Fraction] = {
        k: Fraction(v) + r * k for k, v in enumerate(vals) if v is not None
    }
    if uncertain_floor is not None:
        # entries hidden by the modular precision can only matter when their
        # score lower bound undercuts the best certain score
        int_dense = [int(c) for c in g.to_dense()]
        m_star = min(scores.values()) if scores else None
        for k, v in enumerate(vals):
            if v is not None:
                continue
            lower = Fraction(uncertain_floor) + r * k
            if m_star is None or lower <= m_star:
                c = _exact_shift_coeff(int_dense, k)
                vv = ord_int(c, p)
                if not isinstance(vv, Infinity):
                    scores[k] = Fraction(vv) + r * k
                    m_star = min(m_star, scores[k]) if m_star is not None else scores[k]
    if not scores:
        raise UsageError("polynomial is identically zero after the shift")
    m_star = min(scores.values())
    return max(k for k, s in scores.items() if s == m_star)


# ---------------------------------------------------------------------------
# Root lifting and global rational roots
# ---------------------------------------------------------------------------

# Divisor enumeration of the outer coefficients is the cheap route to
# rational roots; above this size the p-adic lifting route avoids factoring.
# Highly composite outer coefficients are also routed to lifting: the
# divisor-grid filter scans d(a0)*d(an) pairs per sign.
_DIVISOR_BIT_LIMIT = 64
_DIVISOR_PAIR_CAP = 500_000

# Fixed moduli for exact nonzero-rejection before a full bigint evaluation.
# They need not be prime: a value that is nonzero mod anything is nonzero.
_REJECT_MODULI = (2**62 - 57, 2**62 - 87, 2**61 - 1)


def _horner_mod(dense: list[int], x: int, modulus: int) -> int:
    acc = 0
    for c in reversed(dense):
        acc = (acc * x + c) % modulus
    return acc


def _hensel_lift_simple(dense: list[int], p: int, r: int, target: int) -> int:
    """Residue mod p**target of the unique root over r, for f'(r) a unit."""
    if target <= 0:
        return 0
    deriv = [k * c for k, c in enumerate(dense)][1:]
    x = r % p
    k = 1
    while k < target:
        k = min(2 * k, target)
        modulus = p**k
        fx = _horner_mod(dense, x, modulus)
        dfx = _horner_mod(deriv, x, modulus)
        x = (x - fx * pow(dfx, -1, modulus)) % modulus
    return x


def _collect_class_residues(
    dense: list[int], state: _ZpState, rem: int | None, target: int, depth: int
) -> list[int]:
    """Residues mod p**target of the distinct Z_p roots of ``dense``.

    ``dense`` is exact when rem is None, otherwise known mod p**rem.  Roots
    that agree through the requested precision collapse to one residue.
    """
    p = state.p
    if target <= 0:
        return [0]
    if depth > _SOFT_DEPTH:
        cert = state.certificate()
        if cert is not None and depth > cert:
            raise HenselDepthError(f"root isolation exceeded certified depth {cert}")
    is_root, dnz = _residue_roots(dense, p)
    out: list[int] = []
    modulus = p**target
    for r in range(p):
        if not is_root[r]:
            continue
        if dnz[r]:
            out.append(_hensel_lift_simple(dense, p, r, target))
        else:
            if rem is None:
                h, _ = _compose_class_exact(dense, r, p)
                sub = _collect_class_residues(h, state, None, target - 1, depth + 1)
            else:
                h, m = _compose_class_mod(dense, r, p, rem)
                new_rem = rem - m
                if new_rem < target - 1 + _MIN_HEADROOM:
                    raise _NeedMorePrecision
                sub = _collect_class_residues(
                    h, state, new_rem, target - 1, depth + 1
                )
            out.extend((r + p * y) % modulus for y in sub)
    return out


def lift_zp_root_residues(
    f: SparsePoly, p: int, precision: int, assume_squarefree: bool = False
) -> list[int]:
    """Residues mod p**precision of the distinct roots of f in Z_p.

    One entry per distinct root, sorted, each reduced into
    [0, p**precision); roots that agree through the requested precision
    collapse to a single entry.  The residues locate genuine p-adic roots,
    so they can seed rational reconstruction or exact divisibility tests.
    """
    if f.is_zero:
        raise UsageError("cannot lift roots of the zero polynomial")
    if precision < 1:
        raise UsageError("precision must be positive")
    _require_small_prime(p)
    g = f if assume_squarefree else squarefree_part(f)
    if not g.is_integral():
        g = g.primitive_part()
    d = g.degree
    if d is None or d < 1:
        return []
    dense = [int(c) for c in g.to_dense()]
    state = _ZpState(p=p, squarefree=g)
    if d <= _EXACT_DEGREE_LIMIT:
        return sorted(set(_collect_class_residues(dense, state, None, precision, 0)))
    limit = precision + _MAX_PRECISION
    rem = precision + _MIN_HEADROOM + 64
    while rem <= limit:
        try:
            return sorted(
                set(_collect_class_residues(dense, state, rem, precision, 0))
            )
        except _NeedMorePrecision:
            rem *= 2
    raise PrecisionError(f"root lifting needed more than p**{limit} precision")


def _rational_reconstruct(u: int, modulus: int, bound: int) -> tuple[int, int] | None:
    """Reduced (a, b) with a/b = u mod modulus, |a| <= bound, 0 < b <= bound.

    Complete whenever 2*bound**2 < modulus: if such a fraction exists it is
    unique and is returned; otherwise None.
    """
    r0, s0 = modulus, 0
    r1, s1 = u % modulus, 1
    while r1 > bound:
        quo = r0 // r1
        r0, r1 = r1, r0 - quo * r1
        s0, s1 = s1, s0 - quo * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    a, b = (r1, s1) if s1 > 0 else (-r1, -s1)
    if math.gcd(a, b) != 1:
        return None
    return a, b


def _is_fraction_root(g: SparsePoly, a: int, b: int) -> bool:
    """Exactly decide g(a/b) == 0 via the homogeneous value sum c_e a^e b^(d-e).

    Candidates that are not roots are rejected by the value mod a fixed
    modulus (an exact nonzero certificate); only survivors pay for the full
    bigint evaluation, which then certifies the zero.
    """
    d = g.degree
    terms = g.terms()
    for q in _REJECT_MODULI:
        val = 0
        for e, c in terms.items():
            val += int(c) * pow(a, e, q) * pow(b, d - e, q)
        if val % q:
            return False
    az, bz = mpz(a), mpz(b)
    total = mpz(0)
    for e, c in terms.items():
        total += int(c) * az**e * bz ** (d - e)
    return total == 0


def _good_lifting_prime(seed: SparsePoly) -> int:
    """A small prime q preserving degree, preferring squarefree reduction.

    With seed squarefree mod q every residue root is simple and lifting
    never recurses; after 200 candidate primes the requirement is dropped
    (the compose recursion still handles those classes, just more slowly).
    """
    lead = abs(int(seed.leading_coeff))
    terms = {e: int(c) for e, c in seed.terms().items()}
    q = 2
    fallback = None
    for _ in range(200):
        if lead % q:
            if fallback is None:
                fallback = q
            fq = _dense_mod(terms, q)
            dq = (np.arange(len(fq), dtype=np.int64) * fq % q)[1:]
            while len(dq) and dq[-1] == 0:
                dq = dq[:-1]
            if len(dq) and len(_np_gcd_mod(fq, dq, q)) == 1:
                return q
        q = int(next_prime(q))
    if fallback is None:
        raise UsageError("no usable lifting prime below the scan limit")
    return fallback


def distinct_rational_roots(
    f: SparsePoly, assume_squarefree: bool = False
) -> set[Fraction]:
    """The set of rational roots of f, robust to huge outer coefficients.

    Small leading/constant coefficients short-circuit to divisor
    enumeration.  Otherwise each root is recovered from a p-adic root
    residue by rational reconstruction and verified exactly, so nothing is
    ever factored: candidate numerators and denominators are bounded by
    twice the coefficient 2-norm (the linear-factor height bound), and a
    working precision beyond twice that bound's square makes the
    reconstruction complete.  Denominators divisible by the lifting prime
    are recovered from the reversed polynomial's roots instead.
    """
    if f.is_zero:
        raise UsageError("every rational is a root of the zero polynomial")
    out: set[Fraction] = set()
    g, k = f.strip_zero_root()
    if k:
        out.add(Fraction(0))
    if g.degree == 0:
        return out
    seed = g if assume_squarefree else squarefree_part(g)
    if not seed.is_integral():
        seed = seed.primitive_part()
    if (
        abs(seed.constant_coeff).bit_length() <= _DIVISOR_BIT_LIMIT
        and abs(seed.leading_coeff).bit_length() <= _DIVISOR_BIT_LIMIT
        and divisor_count(seed.constant_coeff) * divisor_count(seed.leading_coeff)
        <= _DIVISOR_PAIR_CAP
    ):
        out.update(rational_roots(seed))
        return out
    norm_sq = sum(int(c) * int(c) for c in seed.terms().values())
    bound = 2 * (math.isqrt(norm_sq) + 1)
    need = 2 * bound * bound + 1
    rev = seed.reverse().primitive_part()
    for side, invert in ((seed, False), (rev, True)):
        q = _good_lifting_prime(side)
        precision = 1
        power = q
        while power < need:
            power *= q
            precision += 1
        for u in lift_zp_root_residues(side, q, precision, assume_squarefree=True):
            rec = _rational_reconstruct(u, power, bound)
            if rec is None:
                continue
            a, b = rec
            if invert:
                if a == 0:
                    continue
                a, b = (b, a) if a > 0 else (-b, -a)
            if _is_fraction_root(seed, a, b):
                out.add(Fraction(a, b))
    return out
