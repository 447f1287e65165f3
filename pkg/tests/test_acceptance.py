"""Acceptance suite: thirteen end-to-end criteria, one line each.

Every test exercises one stated contract at its stated tolerance and
runtime budget and prints exactly one "[criterion NN] name: PASS/FAIL"
line (visible with -v via the test name, or with -s).  The random
circuit corpus shared by criteria 3, 8, and 9 is built once per session;
each of those criteria times only its own analysis pass over it, not the
shared construction.
"""

import cmath
import math
import random
import time
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import pytest

from padicroots.bounds import (
    bound_amd,
    bound_cx,
    bound_cx_chain,
    bound_np,
    bound_pcfew,
    bound_qp,
    bound_rational,
    tau_ratio,
)
from padicroots.circuit import (
    AdditiveCircuit,
    circuit_expand,
    circuit_gate_values,
    propagate_hulls,
)
from padicroots.newton import (
    count_roots_in_disk,
    count_roots_qp,
    count_roots_zp,
    distinct_rational_roots,
    distinct_valuation_count,
    minkowski_sum,
    newton_polygon,
    valuation_profile,
)
from padicroots.padic import Infinity, digits, ord_int, ord_rat
from padicroots.polynomial import (
    Interval,
    SparsePoly,
    coprime_radical,
    resultant,
    sturm_count,
)
from padicroots.search import (
    enumerate_slps,
    family_extremal,
    family_logistic,
    family_shub_smale,
    random_circuit,
)

PRIMES = (2, 3, 5)
CORPUS_SIZE = 1000


def _finish(num: int, name: str, elapsed: float, budget: float, detail: str, failures):
    ok = not failures and elapsed < budget
    print(
        f"[criterion {num:02d}] {name}: {'PASS' if ok else 'FAIL'} "
        f"({elapsed:.2f}s, budget {budget:g}s; {detail})"
    )
    assert not failures, f"{len(failures)} failure(s), first: {failures[:4]}"
    assert elapsed < budget, f"took {elapsed:.2f}s, budget {budget:g}s"


# ---------------------------------------------------------------------------
# Shared random-circuit corpus (criteria 3, 8, 9)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorpusEntry:
    index: int
    s: int
    p: int
    circuit: AdditiveCircuit
    expansion: SparsePoly
    radical: SparsePoly | None  # None when the expansion is zero


@pytest.fixture(scope="session")
def corpus():
    entries = []
    for i in range(CORPUS_SIZE):
        s = i % 5
        p = PRIMES[i % 3]
        c = random_circuit(s, seed=10_000 + i)
        f = circuit_expand(c)
        if f.is_zero:
            entries.append(CorpusEntry(i, s, p, c, f, None))
            continue
        values = circuit_gate_values(c, SparsePoly.x())
        used: list[SparsePoly] = []
        for v, e in zip(values, c.final_m):
            if e != 0 and not any(v == u for u in used):
                used.append(v)
        rad = coprime_radical(used)
        entries.append(CorpusEntry(i, s, p, c, f, rad))
    return entries


# ---------------------------------------------------------------------------
# Criteria
# ---------------------------------------------------------------------------


def test_criterion_01_newton_oracle():
    rng = random.Random(424242)
    failures = []
    t0 = time.perf_counter()
    for i in range(1000):
        p = PRIMES[i % 3]
        d = rng.randint(1, 12)
        exponents = []
        roots = []
        for _ in range(d):
            a = rng.randint(0, 5)
            u = rng.randint(1, 50)
            while u % p == 0:
                u = rng.randint(1, 50)
            exponents.append(a)
            roots.append(rng.choice((-1, 1)) * p**a * u)
        f = SparsePoly.from_roots(roots)
        profile = valuation_profile(f, p)
        got = Counter()
        for v, m in profile.pairs:
            got[v] += m
        expected = Counter(Fraction(a) for a in exponents)
        if got != expected or profile.zero_multiplicity != 0:
            failures.append((i, roots, dict(got), dict(expected)))
    elapsed = time.perf_counter() - t0
    _finish(1, "newton-oracle", elapsed, 10, "1000 root-product polynomials", failures)


def test_criterion_02_extremal_lower_bound():
    failures = []
    t0 = time.perf_counter()
    for p in PRIMES:
        for s in range(1, 13):
            poly, _slp = family_extremal(p, s)
            dv = distinct_valuation_count(poly, p)
            if dv != s:
                failures.append((p, s, dv))
    elapsed = time.perf_counter() - t0
    _finish(2, "extremal-lower-bound", elapsed, 5, "s up to 12, three primes", failures)


def test_criterion_03_circuit_hull_ledger(corpus):
    failures = []
    degenerate = 0
    points = 0
    t0 = time.perf_counter()
    for entry in corpus:
        cap = entry.s * (entry.s + 1) // 2
        ph = propagate_hulls(entry.circuit, entry.p)
        if not all(ph.ledger_ok):
            failures.append(("ledger", entry.index, ph.ledger))
        if entry.radical is None:
            degenerate += 1
            continue
        dv = distinct_valuation_count(entry.expansion, entry.p)
        if dv > cap:
            failures.append(("dv", entry.index, dv, cap))
        hull = ph.final_hull
        for e, coeff in entry.expansion.terms().items():
            v = ord_int(int(coeff), entry.p)
            points += 1
            if not hull.supports_point(e, v):
                failures.append(("hull", entry.index, e))
                break
    elapsed = time.perf_counter() - t0
    _finish(
        3,
        "circuit-hull-ledger",
        elapsed,
        60,
        f"{CORPUS_SIZE} circuits, {degenerate} degenerate, {points} coefficient points",
        failures,
    )


def test_criterion_04_minkowski_product_law():
    rng = random.Random(171717)

    def draw():
        while True:
            d = rng.randint(1, 10)
            coeffs = [rng.randint(-100, 100) for _ in range(d + 1)]
            f = SparsePoly(list(enumerate(coeffs)))
            if not f.is_zero:
                return f

    failures = []
    t0 = time.perf_counter()
    for i in range(500):
        p = PRIMES[i % 3]
        f, g = draw(), draw()
        hf, hg = newton_polygon(f, p), newton_polygon(g, p)
        hfg = newton_polygon(f * g, p)
        if minkowski_sum(hf, hg) != hfg:
            failures.append(("sum", i))
        if set(hf.slopes()) | set(hg.slopes()) != set(hfg.slopes()):
            failures.append(("slopes", i))
    elapsed = time.perf_counter() - t0
    _finish(4, "minkowski-product-law", elapsed, 5, "500 random pairs", failures)


def test_criterion_05_shifted_roots_of_unity():
    failures = []
    t0 = time.perf_counter()
    for d in range(1, 21):
        vals = sorted(abs(cmath.exp(2j * math.pi * k / d) - 1) for k in range(d))
        clusters = 1 + sum(1 for a, b in zip(vals, vals[1:]) if b - a > 1e-9)
        if clusters != math.ceil(d / 2):
            failures.append(("abs", d, clusters, math.ceil(d / 2)))
    x = SparsePoly.x()
    cap = bound_np(2)
    for d in range(1, 65):
        dv = distinct_valuation_count((x + 1) ** d - 1, 2)
        if dv > cap:
            failures.append(("dv", d, dv, cap))
    elapsed = time.perf_counter() - t0
    _finish(
        5,
        "shifted-roots-of-unity",
        elapsed,
        5,
        "absolute-value clusters d<=20 and 2-adic valuation count d<=64",
        failures,
    )


def test_criterion_06_tau_catalog(tmp_path_factory):
    cache = str(tmp_path_factory.mktemp("catalog"))
    failures = []
    t0 = time.perf_counter()
    catalog = enumerate_slps(5, cache_dir=cache)
    for poly, tau, _witness in catalog.items():
        if poly.is_zero:
            continue
        if poly.degree > 2**tau:
            failures.append(("degree", poly.to_text(), tau))
    x = SparsePoly.x()
    for f, expected in ((x, 0), (x * x, 1), (x * x + x, 2)):
        got = catalog.tau(f)
        if got != expected:
            failures.append(("tau", f.to_text(), got, expected))
    elapsed = time.perf_counter() - t0
    _finish(
        6,
        "tau-catalog",
        elapsed,
        600,
        f"{len(catalog)} entries at length 5",
        failures,
    )


def _monicized_coeffs(g: SparsePoly) -> list[int]:
    d = g.degree
    lc = int(g.leading_coeff)
    out = [0] * (d + 1)
    for e, c in g.terms().items():
        out[e] = int(c) * lc ** (d - 1 - e) if e < d else 1
    return out


_DEPTH_CAP = {2: 10, 3: 6, 5: 4}


def _enumeration_count(g: SparsePoly, p: int) -> int | None:
    """Distinct p-adic integer roots by brute force at certified depth.

    Monicize so roots scale by the leading coefficient, enumerate every
    residue modulo p^(2D+1) where D majorizes both the valuation of
    res(G, G') and of the leading coefficient, then count solution
    classes modulo p^(D+1) whose root valuation admits the rescaling.
    Returns None when the certified depth is too deep to enumerate.
    """
    d = g.degree
    lc = int(g.leading_coeff)
    G = _monicized_coeffs(g)
    Gpoly = SparsePoly(list(enumerate(G)))
    res = resultant(Gpoly, Gpoly.derivative())
    if res == 0:
        return None
    vres = ord_rat(Fraction(res), p)
    vlc = ord_int(lc, p)
    depth = max(int(vres), int(vlc))
    if depth > _DEPTH_CAP[p]:
        return None
    modulus = p ** (2 * depth + 1)
    ys = np.arange(modulus, dtype=np.int64)
    vals = np.full(modulus, G[d] % modulus, dtype=np.int64)
    for e in range(d - 1, -1, -1):
        vals = (vals * ys + G[e] % modulus) % modulus
    classes = np.unique(ys[vals == 0] % (p ** (depth + 1)))
    count = 0
    for cl in classes:
        c = int(cl)
        if c == 0:
            count += 1
            continue
        v = 0
        while c % p == 0:
            c //= p
            v += 1
        if v >= vlc:
            count += 1
    return count


def test_criterion_07_hensel_vs_enumeration():
    rng = random.Random(987654)
    failures = []
    tested = depth_skips = 0
    t0 = time.perf_counter()
    i = 0
    while tested < 200:
        i += 1
        p = PRIMES[i % 3]
        d = rng.randint(1, 6)
        coeffs = [rng.randint(-30, 30) for _ in range(d + 1)]
        g = SparsePoly(list(enumerate(coeffs)))
        if g.degree != d or resultant(g, g.derivative()) == 0:
            continue
        oracle = _enumeration_count(g, p)
        if oracle is None:
            depth_skips += 1
            continue
        lib = count_roots_zp(g, p)
        if lib != oracle:
            failures.append((coeffs, p, lib, oracle))
        tested += 1
    elapsed = time.perf_counter() - t0
    _finish(
        7,
        "hensel-vs-enumeration",
        elapsed,
        60,
        f"200 squarefree cases, {depth_skips} redrawn for enumeration depth",
        failures,
    )


def test_criterion_08_field_and_rational_caps(corpus):
    failures = []
    qp_bounds = {}
    rat_bounds = {}
    t0 = time.perf_counter()
    for entry in corpus:
        if entry.radical is None:
            continue
        key = (entry.p, entry.s)
        if key not in qp_bounds:
            qp_bounds[key] = bound_qp(entry.p, entry.s).value
        if entry.s not in rat_bounds:
            rat_bounds[entry.s] = bound_rational(entry.s).value
        if entry.radical.degree == 0:
            continue
        qp = count_roots_qp(entry.radical, entry.p)
        if qp > qp_bounds[key]:
            failures.append(("qp", entry.index, qp, qp_bounds[key]))
        roots = distinct_rational_roots(entry.radical, assume_squarefree=True)
        integral = sum(1 for r in roots if r.denominator == 1)
        if integral > rat_bounds[entry.s]:
            failures.append(("integral", entry.index, integral))
    elapsed = time.perf_counter() - t0
    _finish(
        8,
        "field-and-rational-caps",
        elapsed,
        60,
        f"{CORPUS_SIZE} circuits, zero violations required",
        failures,
    )


def test_criterion_09_disk_count_caps(corpus):
    radii = (Fraction(1), Fraction(2), Fraction(1, 2))
    failures = []
    out_of_domain = 0
    cx_cache = {}
    chain_cache = {}
    t0 = time.perf_counter()
    for entry in corpus:
        if entry.radical is None or entry.radical.degree == 0:
            continue
        for r in radii:
            key = (entry.p, entry.s, r)
            if key not in cx_cache:
                cx_cache[key] = bound_cx(entry.p, entry.s, r)
                chain_cache[key] = bound_cx_chain(entry.p, entry.s, r).value
            n = count_roots_in_disk(entry.radical, entry.p, r)
            cx = cx_cache[key]
            if cx.domain_ok:
                if n > cx.value:
                    failures.append(("cx", entry.index, r, n, cx.value))
            else:
                out_of_domain += 1
            if n > chain_cache[key]:
                failures.append(("chain", entry.index, r, n))
    elapsed = time.perf_counter() - t0
    _finish(
        9,
        "disk-count-caps",
        elapsed,
        60,
        f"three radii, {out_of_domain} out-of-domain evaluations logged",
        failures,
    )


def test_criterion_10_logistic_sturm():
    failures = []
    t0 = time.perf_counter()
    zero, one = Fraction(0), Fraction(1)
    for j in range(1, 5):
        poly, _slp = family_logistic(j)
        closed = sturm_count(poly, Interval(zero, one, True, True))
        opened = sturm_count(poly, Interval(zero, one, False, False))
        if closed != 2**j:
            failures.append(("closed", j, closed, 2**j))
        if opened != 2**j - 1:
            failures.append(("open", j, opened, 2**j - 1))
    elapsed = time.perf_counter() - t0
    _finish(
        10,
        "logistic-sturm",
        elapsed,
        10,
        "closed count 2^j; open interval holds 2^j - 1, one below the "
        "advertised closed-interval figure, because 0 is a fixed point",
        failures,
    )


def test_criterion_11_shub_smale_ratio():
    failures = []
    t0 = time.perf_counter()
    exponents = []
    for j in range(1, 4):
        poly, slp = family_shub_smale(j)
        t = tau_ratio(poly, len(slp.instructions), tau_is_upper_bound=True)
        if t.integral_count != 2**j:
            failures.append(("count", j, t.integral_count, 2**j))
        if t.implied_exponent is None:
            failures.append(("exponent-missing", j))
        else:
            exponents.append(t.implied_exponent)
    for a, b in zip(exponents, exponents[1:]):
        if not b > a:
            failures.append(("not-increasing", exponents))
    elapsed = time.perf_counter() - t0
    _finish(
        11,
        "shub-smale-ratio",
        elapsed,
        10,
        f"implied exponents {[round(e, 4) for e in exponents]}",
        failures,
    )


def test_criterion_12_digit_expansion():
    t0 = time.perf_counter()
    got = str(digits(Fraction(12345, 49), 7, 5))
    failures = [] if got == "506.64" else [(got, "506.64")]
    elapsed = time.perf_counter() - t0
    _finish(12, "digit-expansion", elapsed, 1, f"digits {got}", failures)


def test_criterion_13_bound_evaluators():
    failures = []
    t0 = time.perf_counter()
    if bound_np(3) != 6:
        failures.append(("np", bound_np(3)))
    if bound_rational(1).value != 16:
        failures.append(("rational", bound_rational(1).value))
    if bound_pcfew(2, (1,), ((1,),), (1,)).value != 0:
        failures.append(("pcfew", bound_pcfew(2, (1,), ((1,),), (1,)).value))
    certified = 0
    for p in PRIMES:
        for s in range(1, 5):
            for r in (Fraction(1), Fraction(2), Fraction(1, 2)):
                for v in (bound_cx(p, s, r), bound_cx_chain(p, s, r)):
                    certified += 1
                    if v.enclosure is None:
                        failures.append(("enclosure-missing", p, s, r))
                    elif v.enclosure[1] - v.enclosure[0] >= 1:
                        failures.append(("enclosure-wide", p, s, r))
    for v in (
        bound_amd(3, (3, 2), (1, 2)),
        bound_pcfew(2, (2, 2), ((1,), (1, 2)), (1, 1)),
    ):
        certified += 1
        if v.enclosure[1] - v.enclosure[0] >= 1:
            failures.append(("enclosure-wide", "vector-form"))
    elapsed = time.perf_counter() - t0
    _finish(
        13,
        "bound-evaluators",
        elapsed,
        5,
        f"{certified} certified enclosures all narrower than 1",
        failures,
    )
