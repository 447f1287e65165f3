"""Certified evaluators for closed-form root-count bounds, plus reports
joining those bounds with exact empirical counts.

Purely rational closed forms are evaluated exactly and reported with both
the exact value and its integer ceiling.  Formulas involving logarithms
are evaluated in interval arithmetic whose precision escalates until the
final integer floor or ceiling is provable from the enclosure alone
(see _intervals); no bound is ever silently rounded.

The report path expands an additive circuit, measures its exact root
statistics (distinct root valuations, roots over the p-adic field,
rational roots, roots in a p-adic disk), and compares each statistic with
the matching bound, one row per formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .circuit import AdditiveCircuit, circuit_expand, circuit_gate_values
from .errors import DegreeCapExceeded, UsageError
from ._intervals import (
    certified_ceil,
    certified_floor,
    certified_sign,
    iv_euler_factor,
    iv_fraction,
    iv_log,
    iv_log_base,
)
from .newton import (
    count_roots_in_disk,
    count_roots_qp,
    distinct_rational_roots,
    distinct_valuation_count,
)
from .padic import Prime, format_rational
from .polynomial import (
    SparsePoly,
    coprime_radical,
    get_degree_cap,
    rational_roots,
)

__all__ = [
    "BoundValue",
    "BoundRow",
    "BoundReport",
    "TauRatio",
    "bound_np",
    "bound_qp",
    "bound_rational",
    "bound_cx",
    "bound_cx_chain",
    "bound_amd",
    "bound_pcfew",
    "tau_ratio",
    "verify_report",
]


# ---------------------------------------------------------------------------
# Value and report containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundValue:
    """One evaluated bound.

    ``value`` is the certified integer (ceiling or floor per formula).
    ``exact`` carries the exact rational when the formula is rational;
    interval-evaluated formulas carry ``enclosure`` (endpoints of the
    certifying interval, width < 1) instead.  ``domain_ok`` False means
    the formula left its own domain; ``value`` is then 0 and ``note``
    explains.
    """

    value: int
    exact: Fraction | None
    enclosure: tuple[Fraction, Fraction] | None
    domain_ok: bool = True
    note: str = ""

    def to_json_obj(self) -> dict:
        return {
            "value": self.value,
            "exact": None if self.exact is None else format_rational(self.exact),
            "enclosure": None
            if self.enclosure is None
            else [format_rational(self.enclosure[0]), format_rational(self.enclosure[1])],
            "domain_ok": self.domain_ok,
            "note": self.note,
        }


@dataclass(frozen=True)
class BoundRow:
    """One bound compared against one empirical count."""

    key: str
    formula: str
    empirical: int
    bound: BoundValue
    passed: bool | None  # None when the bound is out of domain

    def to_json_obj(self) -> dict:
        return {
            "key": self.key,
            "formula": self.formula,
            "empirical": self.empirical,
            "bound": self.bound.to_json_obj(),
            "passed": self.passed,
        }


@dataclass(frozen=True)
class BoundReport:
    """Empirical counts of one circuit joined with every applicable bound."""

    s: int
    p: int
    r: Fraction
    degree: int | None
    degenerate: bool
    rows: tuple[BoundRow, ...]
    notes: tuple[str, ...]
    circuit: AdditiveCircuit | None = None

    @property
    def violations(self) -> tuple[str, ...]:
        return tuple(row.key for row in self.rows if row.passed is False)

    @property
    def all_pass(self) -> bool:
        return not self.violations

    def to_json_obj(self) -> dict:
        return {
            "s": self.s,
            "p": self.p,
            "r": format_rational(self.r),
            "degree": self.degree,
            "degenerate": self.degenerate,
            "rows": [row.to_json_obj() for row in self.rows],
            "notes": list(self.notes),
            "violations": list(self.violations),
            "circuit": None if self.circuit is None else self.circuit.to_json_obj(),
        }

    def to_text(self) -> str:
        head = f"s={self.s} p={self.p} r={format_rational(self.r)} degree={self.degree}"
        if self.degenerate:
            head += " (degenerate)"
        lines = [head]
        if self.rows:
            widths = (10, 42, 10, 12, 6)
            header = ("bound", "formula", "empirical", "value", "pass")
            lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
            for row in self.rows:
                flag = "-" if row.passed is None else ("yes" if row.passed else "NO")
                cells = (
                    row.key,
                    row.formula,
                    str(row.empirical),
                    str(row.bound.value) if row.bound.domain_ok else "out-of-domain",
                    flag,
                )
                lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)))
        for note in self.notes:
            lines.append(f"note: {note}")
        return "\n".join(lines)


@dataclass(frozen=True)
class TauRatio:
    """Integral root count of a polynomial against its shortest-program
    length, with the exponent that count implies.

    ``implied_exponent`` is log(#roots)/log(tau+1), absent when there are
    no integral roots.  When ``tau_is_upper_bound`` is set the recorded
    tau only bounds the true minimal length from above, so the implied
    exponent is a lower bound on the true ratio.
    """

    label: str
    tau: int
    tau_is_upper_bound: bool
    integral_count: int
    implied_exponent: float | None

    def to_json_obj(self) -> dict:
        return {
            "label": self.label,
            "tau": self.tau,
            "tau_is_upper_bound": self.tau_is_upper_bound,
            "integral_count": self.integral_count,
            "implied_exponent": self.implied_exponent,
        }


# ---------------------------------------------------------------------------
# Validation helpers
# ---------------------------------------------------------------------------


def _require_count(s: int, what: str = "s") -> int:
    if not isinstance(s, int) or isinstance(s, bool) or s < 0:
        raise UsageError(f"{what} must be a nonnegative integer, got {s!r}")
    return s


def _positive_rational(r, what: str = "r") -> Fraction:
    try:
        r = Fraction(r)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{what} must be a positive rational, got {r!r}") from exc
    if r <= 0:
        raise UsageError(f"{what} must be a positive rational, got {r}")
    return r


def _int_vector(v: Sequence[int], what: str, minimum: int) -> tuple[int, ...]:
    out = tuple(v)
    if not out:
        raise UsageError(f"{what} must be nonempty")
    for x in out:
        if not isinstance(x, int) or isinstance(x, bool) or x < minimum:
            raise UsageError(f"{what} entries must be integers >= {minimum}, got {x!r}")
    return out


def _exact_value(q: Fraction | int, note: str = "") -> BoundValue:
    q = Fraction(q)
    return BoundValue(
        value=math.ceil(q), exact=q, enclosure=(q, q), domain_ok=True, note=note
    )


# ---------------------------------------------------------------------------
# Closed-form bounds
# ---------------------------------------------------------------------------

FORMULA_NP = "s*(s+1)/2"
FORMULA_QP = "1 + (p-1)*s^2*(15/2)^s*s!*(s*(s+1)/2)"
FORMULA_RATIONAL = "1 + s^3*(s+1)*(15/2)^s*s!"
FORMULA_CX = "s^2*s!*(3 + (3/r)*log_p(2/(r*ln p)))^s"
FORMULA_CX_CHAIN = "piecewise chain of certified few-term disk bounds"
FORMULA_AMD = (
    "(prod (p-1)*m_i*(m_i-1)/2) * floor(prod c*(m_i-1)*N_i*(1+log_p((m_i-1)/ln p)))"
)
FORMULA_PCFEW = (
    "floor(c^n * prod (m_i-1)*((sum r_j over N_i) + "
    "log_p((m_i-1)^k_i/((prod r_j over N_i)*(ln p)^k_i)))/r_i)"
)


def bound_np(s: int) -> int:
    """Cap on distinct root valuations at a given gate count: s*(s+1)/2."""
    s = _require_count(s)
    return s * (s + 1) // 2


def bound_qp(p: int, s: int) -> BoundValue:
    """Cap on distinct roots over the p-adic field at a given gate count.

    Exact rational, reported with its ceiling: the half-integer powers of
    15/2 make the value non-integral for odd s.
    """
    p = Prime(p)
    s = _require_count(s)
    exact = (
        1
        + Fraction(p - 1)
        * s
        * s
        * Fraction(15, 2) ** s
        * math.factorial(s)
        * bound_np(s)
    )
    return _exact_value(exact)


def bound_rational(s: int) -> BoundValue:
    """Cap on rational roots at a given gate count, exact with ceiling."""
    s = _require_count(s)
    exact = 1 + Fraction(s**3) * (s + 1) * Fraction(15, 2) ** s * math.factorial(s)
    return _exact_value(exact)


def bound_cx(p: int, s: int, r) -> BoundValue:
    """Cap on roots in the closed disk of radius-exponent r, certified.

    Interval-evaluated: s^2 * s! * (3 + (3/r)*log_p(2/(r*ln p)))^s with a
    certified integer ceiling.  If the base ever certified negative the
    formula would be meaningless for odd s, so a domain flag is returned
    instead of a value.
    """
    p = Prime(p)
    s = _require_count(s)
    r = _positive_rational(r)
    if s == 0:
        return _exact_value(0, note="s^2 factor vanishes")
    prefactor = s * s * math.factorial(s)

    def base():
        arg = iv_fraction(2) / (iv_fraction(r) * iv_log(p))
        return iv_fraction(3) + iv_fraction(Fraction(3) / r) * iv_log_base(arg, p)

    sign, base_enc = certified_sign(base)
    if sign < 0:
        return BoundValue(
            value=0,
            exact=None,
            enclosure=base_enc,
            domain_ok=False,
            note="base 3 + (3/r)*log_p(2/(r*ln p)) is negative",
        )
    value, enc = certified_ceil(lambda: base() ** s * prefactor)
    return BoundValue(value=value, exact=None, enclosure=enc)


def bound_amd(p: int, m: Sequence[int], counts: Sequence[int]) -> BoundValue:
    """Sparse-system bound: exact prefactor times a certified floor.

    prefactor = prod (p-1)*m_i*(m_i-1)/2 (an exact integer);
    inner      = prod c*(m_i-1)*N_i*(1 + log_p((m_i-1)/ln p)),
    with c = e/(e-1), floored under certified interval evaluation.
    Any m_i <= 1 forces the whole bound to 0.
    """
    p = Prime(p)
    m = _int_vector(m, "m", 1)
    counts = _int_vector(counts, "N", 1)
    if len(m) != len(counts):
        raise UsageError(
            f"m and N must have equal length, got {len(m)} and {len(counts)}"
        )
    if any(mi <= 1 for mi in m):
        return _exact_value(0, note="a (m_i - 1) factor vanishes")
    prefactor = 1
    for mi in m:
        prefactor *= (p - 1) * mi * (mi - 1) // 2

    def inner():
        c = iv_euler_factor()
        lnp = iv_log(p)
        acc = iv_fraction(1)
        for mi, ni in zip(m, counts):
            acc = acc * c * (mi - 1) * ni * (1 + iv_log_base(iv_fraction(mi - 1) / lnp, p))
        return acc

    floor_inner, enc = certified_floor(inner)
    return BoundValue(value=prefactor * floor_inner, exact=None, enclosure=enc)


def bound_pcfew(
    p: int,
    m: Sequence[int],
    n_sets: Sequence[Sequence[int]],
    r: Sequence,
) -> BoundValue:
    """Few-term disk bound for a system of n sparse equations, certified.

    floor( c^n * prod_i (m_i-1) * [ (sum_{j in N_i} r_j)
           + log_p((m_i-1)^k_i / ((prod_{j in N_i} r_j)*(ln p)^k_i)) ] / r_i )
    with c = e/(e-1) and k_i = #N_i.  Any m_i <= 1 forces 0.  Each N_i is
    a nonempty set of 1-based indices into r.
    """
    p = Prime(p)
    m = _int_vector(m, "m", 1)
    n = len(m)
    sets = tuple(tuple(sorted(set(ns))) for ns in n_sets)
    rs = tuple(_positive_rational(x, "r entry") for x in r)
    if not (len(sets) == len(rs) == n):
        raise UsageError(
            f"m, N sets, and r must have equal length, got {n}, {len(sets)}, {len(rs)}"
        )
    for ns in sets:
        if not ns:
            raise UsageError("each N set must be nonempty")
        for j in ns:
            if not isinstance(j, int) or isinstance(j, bool) or not 1 <= j <= n:
                raise UsageError(f"N set index {j!r} outside 1..{n}")
    if any(mi <= 1 for mi in m):
        return _exact_value(0, note="a (m_i - 1) factor vanishes")

    def expr():
        c = iv_euler_factor()
        lnp = iv_log(p)
        acc = c**n
        for mi, ns, ri in zip(m, sets, rs):
            k = len(ns)
            sum_r = sum((rs[j - 1] for j in ns), Fraction(0))
            prod_r = Fraction(1)
            for j in ns:
                prod_r *= rs[j - 1]
            arg = iv_fraction(Fraction((mi - 1) ** k)) / (iv_fraction(prod_r) * lnp**k)
            bracket = iv_fraction(sum_r) + iv_log_base(arg, p)
            acc = acc * (mi - 1) * bracket / iv_fraction(ri)
        return acc

    floor_val, enc = certified_floor(expr)
    return BoundValue(value=floor_val, exact=None, enclosure=enc)


def _single_term_pcfew(p: int, mi: int, r: Fraction) -> int:
    return bound_pcfew(p, (mi,), ((1,),), (r,)).value


def bound_cx_chain(p: int, s: int, r) -> BoundValue:
    """Refined disk-count cap built from certified few-term bounds.

    Piecewise in the gate count: 1 for s=0; 1 + C(2) for s=1;
    rho = 1 + C(2) + C(2)*C(3) for s=2; for s >= 3, rho plus one
    chain term per length l in 3..s with variable multiplicities
    (2,3,...,3) and index sets growing as initial segments of sizes
    (2,3,...,l,l).  Each term is a certified integer, so the chain value
    is an exact integer sum.
    """
    p = Prime(p)
    s = _require_count(s)
    r = _positive_rational(r)
    if s == 0:
        return _exact_value(1, note="empty chain")
    c2 = _single_term_pcfew(p, 2, r)
    if s == 1:
        return _exact_value(1 + c2, note="chain of certified integer terms")
    c3 = _single_term_pcfew(p, 3, r)
    total = 1 + c2 + c2 * c3
    for length in range(3, s + 1):
        m = (2,) + (3,) * (length - 1)
        sizes = tuple(range(2, length + 1)) + (length,)
        n_sets = tuple(tuple(range(1, k + 1)) for k in sizes)
        total += bound_pcfew(p, m, n_sets, (r,) * length).value
    return _exact_value(total, note="chain of certified integer terms")


# ---------------------------------------------------------------------------
# Ratio of integral roots to program length
# ---------------------------------------------------------------------------


def tau_ratio(
    f: SparsePoly,
    tau: int,
    tau_is_upper_bound: bool = False,
    label: str | None = None,
) -> TauRatio:
    """Integral root count of f with the exponent implied against tau.

    tau must be at least 1.  The exponent log(count)/log(tau+1) is absent
    when f has no integral roots.
    """
    if not isinstance(tau, int) or isinstance(tau, bool) or tau < 1:
        raise UsageError(f"tau must be a positive integer, got {tau!r}")
    count = sum(1 for root in rational_roots(f) if root.denominator == 1)
    exponent = None if count == 0 else math.log(count) / math.log(tau + 1)
    return TauRatio(
        label=f.to_text() if label is None else label,
        tau=tau,
        tau_is_upper_bound=tau_is_upper_bound,
        integral_count=count,
        implied_exponent=exponent,
    )


# ---------------------------------------------------------------------------
# Empirical verification reports
# ---------------------------------------------------------------------------


def _degree_estimate(c: AdditiveCircuit) -> int:
    """Upper bound on the expansion degree, by the exponent recurrence."""
    degs = [1]
    for gate in c.gates:
        branches = [0]
        if gate.c != 0:
            branches.append(sum(e * d for e, d in zip(gate.m, degs)))
        if gate.d != 0:
            branches.append(sum(e * d for e, d in zip(gate.mp, degs)))
        degs.append(max(branches))
    return sum(e * d for e, d in zip(c.final_m, degs))


def verify_report(c: AdditiveCircuit, p: int, r) -> BoundReport:
    """Expand a circuit, count its exact root statistics, compare each
    with the matching bound at the circuit's gate count.

    Root counting runs on the radical of the distinct gate polynomials the
    output monomial actually uses (same root set as the expansion, far
    smaller degree).  A circuit whose expansion is identically zero is
    flagged degenerate and carries no rows.
    """
    p = Prime(p)
    r = _positive_rational(r)
    s = c.s
    estimate = _degree_estimate(c)
    cap = get_degree_cap()
    if estimate > cap:
        raise DegreeCapExceeded(estimate, cap, "circuit expansion")
    f = circuit_expand(c)
    if f.is_zero:
        return BoundReport(
            s=s,
            p=p,
            r=r,
            degree=None,
            degenerate=True,
            rows=(),
            notes=("expansion is identically zero; no root statistics",),
            circuit=c,
        )

    dv = distinct_valuation_count(f, p)
    values = circuit_gate_values(c, SparsePoly.x())
    used: list[SparsePoly] = []
    for v, e in zip(values, c.final_m):
        if e != 0 and not any(v == u for u in used):
            used.append(v)
    rad = coprime_radical(used)
    if rad.degree is None or rad.degree == 0:
        qp_count = rat_count = disk_count = 0
    else:
        qp_count = count_roots_qp(rad, p)
        rat_count = len(distinct_rational_roots(rad, assume_squarefree=True))
        disk_count = count_roots_in_disk(rad, p, r)

    np_value = bound_np(s)
    qp_bound = bound_qp(p, s)
    rational_bound = bound_rational(s)
    cx_bound = bound_cx(p, s, r)
    chain_bound = bound_cx_chain(p, s, r)

    rows = (
        BoundRow("np", FORMULA_NP, dv, _exact_value(np_value), dv <= np_value),
        BoundRow("qp", FORMULA_QP, qp_count, qp_bound, qp_count <= qp_bound.value),
        BoundRow(
            "rational",
            FORMULA_RATIONAL,
            rat_count,
            rational_bound,
            rat_count <= rational_bound.value,
        ),
        BoundRow(
            "cx",
            FORMULA_CX,
            disk_count,
            cx_bound,
            (disk_count <= cx_bound.value) if cx_bound.domain_ok else None,
        ),
        BoundRow(
            "cx_chain",
            FORMULA_CX_CHAIN,
            disk_count,
            chain_bound,
            disk_count <= chain_bound.value,
        ),
    )
    notes = [
        "the standalone rational cap minus one is exactly twice the p=2 field "
        f"cap minus one: {rational_bound.value} vs {bound_qp(2, s).value}; "
        "both forms are reported, neither is hidden",
    ]
    if not cx_bound.domain_ok:
        notes.append(f"cx bound out of domain: {cx_bound.note}")
    return BoundReport(
        s=s,
        p=p,
        r=r,
        degree=f.degree,
        degenerate=False,
        rows=rows,
        notes=tuple(notes),
        circuit=c,
    )
