"""Bound evaluators: pinned values, certified enclosures, verification
reports, and the interval-rounding helpers underneath them."""

import math
from fractions import Fraction

import pytest
from mpmath import iv

from padicroots._intervals import (
    certified_ceil,
    certified_floor,
    certified_sign,
    fraction_endpoints,
    iv_log,
)
from padicroots.bounds import (
    BoundValue,
    bound_amd,
    bound_cx,
    bound_cx_chain,
    bound_np,
    bound_pcfew,
    bound_qp,
    bound_rational,
    tau_ratio,
    verify_report,
)
from padicroots.circuit import AdditiveCircuit, Gate
from padicroots.errors import DegreeCapExceeded, PrecisionError, UsageError
from padicroots.polynomial import SparsePoly
from padicroots.search import (
    cyclotomic_shift_circuit,
    extremal_circuit,
    family_shub_smale,
    random_circuit,
)


def _width(v: BoundValue) -> Fraction:
    assert v.enclosure is not None
    return v.enclosure[1] - v.enclosure[0]


class TestIntervalHelpers:
    def test_certified_floor_and_ceil(self):
        val, enc = certified_floor(lambda: iv_log(Fraction(100)))
        assert val == 4  # ln 100 = 4.605...
        assert enc[0] <= enc[1] and enc[1] - enc[0] < 1
        val, enc = certified_ceil(lambda: iv_log(Fraction(100)))
        assert val == 5

    def test_certified_round_of_exact_value(self):
        assert certified_ceil(lambda: iv.mpf(3) * iv.mpf(1))[0] == 3

    def test_sign(self):
        assert certified_sign(lambda: iv_log(2))[0] == 1
        assert certified_sign(lambda: iv_log(Fraction(1, 2)))[0] == -1

    def test_straddling_integer_raises(self):
        # exp(log 2) encloses 2 strictly at every precision, so no floor is
        # ever certifiable
        with pytest.raises(PrecisionError):
            certified_floor(lambda: iv.exp(iv.log(2)))

    def test_infinite_endpoint_raises(self):
        with pytest.raises(PrecisionError):
            fraction_endpoints(iv.log(iv.mpf(0)))

    def test_fraction_endpoints_bracket(self):
        lo, hi = fraction_endpoints(iv.mpf(1) / iv.mpf(3))
        assert lo <= Fraction(1, 3) <= hi
        assert hi - lo < Fraction(1, 10**15)


class TestBoundNp:
    def test_pinned(self):
        assert bound_np(0) == 0
        assert bound_np(3) == 6
        assert bound_np(12) == 78

    def test_monotone(self):
        vals = [bound_np(s) for s in range(21)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_validation(self):
        with pytest.raises(UsageError):
            bound_np(-1)
        with pytest.raises(UsageError):
            bound_np(True)


class TestBoundQp:
    def test_pinned(self):
        assert bound_qp(2, 0).value == 1
        v = bound_qp(2, 1)
        assert v.value == 9
        assert v.exact == Fraction(17, 2)
        assert bound_qp(3, 2).value == 2701

    def test_monotone(self):
        for p in (2, 3):
            vals = [bound_qp(p, s).exact for s in range(21)]
            assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_validation(self):
        with pytest.raises(UsageError):
            bound_qp(4, 1)
        with pytest.raises(UsageError):
            bound_qp(2, -1)


class TestBoundRational:
    def test_pinned(self):
        assert bound_rational(0).value == 1
        assert bound_rational(1).value == 16
        assert bound_rational(2).value == 2701

    def test_monotone(self):
        vals = [bound_rational(s).exact for s in range(21)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_exactly_twice_the_p2_field_form(self):
        # rational(s) - 1 == 2 * (qp(2, s) - 1) as exact rationals
        for s in range(11):
            assert bound_rational(s).exact - 1 == 2 * (bound_qp(2, s).exact - 1)


class TestBoundCx:
    def test_pinned(self):
        assert bound_cx(2, 0, 1).value == 0
        v = bound_cx(2, 1, 1)
        assert v.value == 8
        assert v.domain_ok
        assert _width(v) < 1
        assert bound_cx(5, 2, 2).value == 53

    def test_fractional_radius_exponent(self):
        v = bound_cx(2, 2, Fraction(1, 2))
        assert v.domain_ok and v.value > 0
        assert _width(v) < 1

    def test_validation(self):
        with pytest.raises(UsageError):
            bound_cx(2, 1, 0)
        with pytest.raises(UsageError):
            bound_cx(2, 1, -1)
        with pytest.raises(UsageError):
            bound_cx(6, 1, 1)


class TestBoundAmd:
    def test_pinned(self):
        assert bound_amd(2, (1,), (1,)).value == 0
        assert bound_amd(2, (2,), (1,)).value == 2
        v = bound_amd(3, (3, 2), (1, 2))
        assert v.value == 168
        assert _width(v) < 1

    def test_validation(self):
        with pytest.raises(UsageError):
            bound_amd(2, (2, 3), (1,))
        with pytest.raises(UsageError):
            bound_amd(2, (), ())
        with pytest.raises(UsageError):
            bound_amd(2, (0,), (1,))
        with pytest.raises(UsageError):
            bound_amd(2, (2,), (0,))


class TestBoundPcfew:
    def test_pinned(self):
        assert bound_pcfew(2, (1,), ((1,),), (1,)).value == 0
        assert bound_pcfew(2, (2,), ((1,),), (1,)).value == 2
        v = bound_pcfew(2, (2, 2), ((1,), (1, 2)), (1, 1))
        assert v.value == 11
        assert _width(v) < 1

    def test_single_cubic_term(self):
        assert bound_pcfew(2, (3,), ((1,),), (1,)).value == 8

    def test_validation(self):
        with pytest.raises(UsageError):
            bound_pcfew(2, (2,), ((1,), (1,)), (1,))
        with pytest.raises(UsageError):
            bound_pcfew(2, (2,), ((),), (1,))
        with pytest.raises(UsageError):
            bound_pcfew(2, (2,), ((2,),), (1,))
        with pytest.raises(UsageError):
            bound_pcfew(2, (2,), ((0,),), (1,))
        with pytest.raises(UsageError):
            bound_pcfew(2, (2,), ((1,),), (0,))


class TestBoundCxChain:
    def test_pinned(self):
        assert bound_cx_chain(2, 0, 1).value == 1
        assert bound_cx_chain(2, 1, 1).value == 3
        assert bound_cx_chain(2, 2, 1).value == 19
        assert bound_cx_chain(2, 3, 1).value == 2805

    def test_integer_composition(self):
        # s=2 value composes the two certified single-term values
        c2 = bound_pcfew(2, (2,), ((1,),), (1,)).value
        c3 = bound_pcfew(2, (3,), ((1,),), (1,)).value
        assert bound_cx_chain(2, 2, 1).value == 1 + c2 + c2 * c3

    def test_monotone(self):
        vals = [bound_cx_chain(3, s, 1).value for s in range(7)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))


class TestTauRatio:
    def test_two_integral_roots(self):
        t = tau_ratio(SparsePoly.from_coeffs([8, -6, 1]), 4)
        assert t.integral_count == 2
        assert t.implied_exponent == pytest.approx(math.log(2) / math.log(5))
        assert not t.tau_is_upper_bound

    def test_no_integral_roots(self):
        t = tau_ratio(SparsePoly.from_coeffs([1, 0, 1]), 3)
        assert t.integral_count == 0
        assert t.implied_exponent is None

    def test_rational_but_not_integral_roots_excluded(self):
        # (2x - 1)(x - 5): only 5 is integral
        t = tau_ratio(SparsePoly.from_coeffs([5, -11, 2]), 2)
        assert t.integral_count == 1
        assert t.implied_exponent == 0.0

    def test_upper_bound_flag(self):
        f, slp = family_shub_smale(2)
        t = tau_ratio(f, len(slp.instructions), tau_is_upper_bound=True, label="ss2")
        assert t.integral_count == 4
        assert t.tau_is_upper_bound
        assert t.label == "ss2"

    def test_validation(self):
        with pytest.raises(UsageError):
            tau_ratio(SparsePoly.x(), 0)


class TestVerifyReport:
    def test_extremal_family_passes(self):
        rep = verify_report(extremal_circuit(2, 3), 2, 1)
        assert rep.all_pass
        assert rep.degree == 3
        assert not rep.degenerate
        by_key = {row.key: row for row in rep.rows}
        assert set(by_key) == {"np", "qp", "rational", "cx", "cx_chain"}
        # three roots at three distinct sizes, only x = 1 near the center
        assert by_key["np"].empirical == 3
        assert by_key["qp"].empirical == 3
        assert by_key["rational"].empirical == 3
        assert by_key["cx"].empirical == 1
        assert by_key["cx_chain"].bound.value == 2805

    def test_shifted_power_family_passes(self):
        rep = verify_report(cyclotomic_shift_circuit(4), 2, 1)
        assert rep.all_pass
        assert rep.degree == 4
        by_key = {row.key: row for row in rep.rows}
        assert by_key["cx"].empirical == 0

    def test_monomial_circuit(self):
        rep = verify_report(AdditiveCircuit([], 3, [2]), 2, 1)
        assert rep.all_pass
        assert rep.s == 0
        assert rep.degree == 2
        by_key = {row.key: row for row in rep.rows}
        assert by_key["np"].empirical == 0 and by_key["np"].bound.value == 0
        assert by_key["qp"].empirical == 1 and by_key["qp"].bound.value == 1

    def test_zero_expansion_is_degenerate(self):
        rep = verify_report(AdditiveCircuit([], 0, [2]), 2, 1)
        assert rep.degenerate
        assert rep.rows == ()
        assert rep.all_pass

    def test_degree_precheck_rejects_huge_circuits(self):
        # squaring chain: estimate 2^40 exceeds the cap without expanding
        gates = [Gate(1, 0, [0] * (j - 1) + [2], [0] * j) for j in range(1, 41)]
        c = AdditiveCircuit(gates, 1, [0] * 40 + [1])
        with pytest.raises(DegreeCapExceeded):
            verify_report(c, 2, 1)

    def test_json_shape(self):
        rep = verify_report(extremal_circuit(3, 2), 3, 1)
        obj = rep.to_json_obj()
        assert obj["s"] == 2 and obj["p"] == 3 and obj["r"] == "1"
        assert obj["violations"] == []
        assert obj["circuit"] is not None
        keys = [row["key"] for row in obj["rows"]]
        assert keys == ["np", "qp", "rational", "cx", "cx_chain"]
        for row in obj["rows"]:
            assert row["passed"] in (True, None)

    def test_text_shape(self):
        text = verify_report(extremal_circuit(2, 2), 2, 1).to_text()
        assert text.splitlines()[0].startswith("s=2 p=2 r=1")
        assert "NO" not in text

    def test_validation(self):
        with pytest.raises(UsageError):
            verify_report(extremal_circuit(2, 2), 2, 0)
        with pytest.raises(UsageError):
            verify_report(extremal_circuit(2, 2), 9, 1)

    def test_random_circuits_never_violate(self):
        for i in range(20):
            c = random_circuit(i % 4, seed=5000 + i)
            rep = verify_report(c, (2, 3, 5)[i % 3], 1)
            assert rep.all_pass, (i, rep.violations)
