"""Program and circuit tests: evaluation, expansion, hull propagation,
and the multivariate gate system."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from padicroots.circuit import (
    AdditiveCircuit,
    Gate,
    PropagatedHulls,
    Slp,
    circuit_eval,
    circuit_expand,
    circuit_validate,
    propagate_hulls,
    slp_eval,
    slp_expand,
    to_poly_system,
    verify_system_root,
)
from padicroots.errors import UsageError
from padicroots.newton import LowerHull, newton_polygon
from padicroots.polynomial import SparsePoly

X = SparsePoly.x()


def P(text: str) -> SparsePoly:
    return SparsePoly.from_text(text)


SQUARE = Slp([("mul", 1, 1)])
SQUARE_PLUS_X = Slp([("mul", 1, 1), ("add", 2, 1)])


def cyclotomic_shift_circuit(d: int = 4) -> AdditiveCircuit:
    # X_1 = x + 1; X_2 = X_1^d - 1; output X_2
    return AdditiveCircuit(
        [Gate(1, 1, [1], [0]), Gate(1, -1, [0, d], [0, 0])],
        1,
        [0, 0, 1],
    )


def product_chain_circuit(shifts: list[int]) -> AdditiveCircuit:
    """prod_j (x - shifts[j]) with one gate per factor."""
    gates = []
    for j, a in enumerate(shifts, start=1):
        m = [0] * j
        mp = [0] * j
        m[0] = 1
        if j > 1:
            m[j - 1] = 1
            mp[j - 1] = 1
        gates.append(Gate(1, -a, m, mp))
    final_m = [0] * len(shifts) + [1]
    final_m[0] = 0
    return AdditiveCircuit(gates, 1, final_m)


class TestSlp:
    def test_validation(self):
        with pytest.raises(UsageError):
            Slp([("div", 1, 1)])
        with pytest.raises(UsageError):
            Slp([("mul", 1, 2)])  # node 2 not defined yet
        with pytest.raises(UsageError):
            Slp([("mul", 1, 1), ("add", 4, 0)])
        assert Slp([]).length == 0
        assert SQUARE_PLUS_X.length == 2

    def test_eval_points(self):
        assert slp_eval(SQUARE, 3) == 9
        assert slp_eval(Slp([]), 5) == 5
        assert slp_eval(SQUARE_PLUS_X, 2) == 6
        assert slp_eval(SQUARE_PLUS_X, Fraction(1, 2)) == Fraction(3, 4)

    def test_eval_modular(self):
        assert slp_eval(SQUARE, 3, modulus=7) == 2
        assert slp_eval(SQUARE_PLUS_X, 10, modulus=8) == 110 % 8

    def test_expand(self):
        assert slp_expand(SQUARE) == P("x^2")
        assert slp_expand(Slp([("add", 0, 0)])) == SparsePoly.constant(2)
        assert slp_expand(Slp([("mul", 1, 1), ("sub", 2, 0)])) == P("x^2 - 1")
        assert slp_expand(Slp([])) == X

    def test_degree_bounded_by_power_of_two(self):
        rng = random.Random(7)
        for _ in range(60):
            n = rng.randrange(0, 7)
            ins = []
            for i in range(n):
                ins.append(
                    (
                        rng.choice(["add", "sub", "mul"]),
                        rng.randrange(0, i + 2),
                        rng.randrange(0, i + 2),
                    )
                )
            prog = Slp(ins)
            f = slp_expand(prog)
            if not f.is_zero:
                assert f.degree <= 2**prog.length

    def test_json_roundtrip(self):
        assert SQUARE.to_text() == '{"ops":[{"op":"mul","l":1,"r":1}]}'
        assert Slp.from_text(SQUARE_PLUS_X.to_text()) == SQUARE_PLUS_X
        text = SQUARE_PLUS_X.to_text()
        assert Slp.from_text(text).to_text() == text
        with pytest.raises(UsageError):
            Slp.from_text("not json")
        with pytest.raises(UsageError):
            Slp.from_text('{"ops":[{"op":"mul","l":1}]}')


class TestCircuitConstruction:
    def test_gate_vector_lengths(self):
        with pytest.raises(UsageError):
            AdditiveCircuit([Gate(1, 1, [1, 0], [0, 0])], 1, [0, 1])
        with pytest.raises(UsageError):
            AdditiveCircuit([Gate(1, 1, [1], [0])], 1, [0, 0, 1])
        with pytest.raises(UsageError):
            Gate(1, 1, [1], [0, 0])
        with pytest.raises(UsageError):
            Gate(1, 1, [-1], [0])

    def test_expand_monomial(self):
        c = AdditiveCircuit([], 5, [3])
        assert c.s == 0
        assert circuit_expand(c) == P("5*x^3")

    def test_expand_binomial_gate(self):
        # X_1 = x^5 + 3
        c = AdditiveCircuit([Gate(1, 3, [5], [0])], 1, [0, 1])
        assert circuit_expand(c) == P("x^5 + 3")

    def test_expand_shifted_power(self):
        assert circuit_expand(cyclotomic_shift_circuit(4)) == P(
            "x^4 + 4*x^3 + 6*x^2 + 4*x"
        )

    def test_eval_at_points(self):
        c = cyclotomic_shift_circuit(4)
        assert circuit_eval(c, -2) == 0
        assert circuit_eval(c, 1) == 15
        assert circuit_eval(c, Fraction(1, 2)) == Fraction(3, 2) ** 4 - 1

    def test_validate(self):
        # two-factor powered difference with tamed exponents
        gates = [
            Gate(1, -7, [1], [0]),
            Gate(2, 1, [1, 0], [0, 0]),
            Gate(9, -11, [0, 9, 4], [0, 99, 3]),
        ]
        c = AdditiveCircuit(gates, 1, [0, 0, 0, 1])
        f = 9 * (X - 7) ** 9 * (2 * X + 1) ** 4 - 11 * (X - 7) ** 99 * (
            2 * X + 1
        ) ** 3
        assert circuit_validate(c, f)
        assert not circuit_validate(c, f + 1)
        assert circuit_validate(AdditiveCircuit([], 1, [2]), P("x^2"))

    def test_product_chain_helper(self):
        c = product_chain_circuit([1, 2, 4])
        assert circuit_expand(c) == SparsePoly.from_roots([1, 2, 4])

    def test_json_roundtrip_byte_identical(self):
        c = cyclotomic_shift_circuit(4)
        expected = (
            '{"s":2,"gates":[{"c":"1","d":"1","m":[1],"mp":[0]},'
            '{"c":"1","d":"-1","m":[0,4],"mp":[0,0]}],'
            '"final":{"c":"1","m":[0,0,1]}}'
        )
        assert c.to_text() == expected
        assert AdditiveCircuit.from_text(expected) == c
        assert AdditiveCircuit.from_text(expected).to_text() == expected

    def test_json_errors(self):
        with pytest.raises(UsageError):
            AdditiveCircuit.from_text("[1,2]")
        with pytest.raises(UsageError):
            AdditiveCircuit.from_text('{"gates":[],"final":{"c":"x","m":[0]}}')
        with pytest.raises(UsageError):
            AdditiveCircuit.from_text(
                '{"s":3,"gates":[],"final":{"c":"1","m":[2]}}'
            )


class TestPropagation:
    def test_monomial_circuit(self):
        ph = propagate_hulls(AdditiveCircuit([], 5, [3]), 2)
        assert ph.final_hull == LowerHull(((3, 0),))
        assert ph.ledger == (0, 0)
        assert ph.final_edges_ok

    def test_unit_binomial_gate(self):
        # X_1 = x^5 + 3 at p=2: predicted hull (0,0)-(5,0), one edge slope 0
        c = AdditiveCircuit([Gate(1, 3, [5], [0])], 1, [0, 1])
        ph = propagate_hulls(c, 2)
        assert ph.final_hull == LowerHull(((0, 0), (5, 0)))
        assert ph.slope_sets[1] == (Fraction(0),)

    def test_product_chain_exact_match(self):
        # generic constants: prediction equals the true polygon
        c = product_chain_circuit([1, 2, 4])
        ph = propagate_hulls(c, 2)
        f = circuit_expand(c)
        assert ph.final_hull == newton_polygon(f, 2)
        assert ph.final_hull.slopes() == [Fraction(-2), Fraction(-1), Fraction(0)]
        assert ph.ledger == (0, 1, 2, 3, 3)
        assert ph.ledger_ok == (True, True, True, True)
        assert ph.final_edges_ok

    def test_cancellation_keeps_containment(self):
        # (x+1)^4 - 1 cancels the constant term, lifting the true hull
        c = cyclotomic_shift_circuit(4)
        ph = propagate_hulls(c, 2)
        assert ph.final_hull == LowerHull(((0, 0), (4, 0)))
        f = circuit_expand(c)
        for e, coeff in f.terms().items():
            from padicroots.padic import ord_int

            assert ph.final_hull.supports_point(e, ord_int(int(coeff), 2))

    def test_zero_gate_rejected(self):
        with pytest.raises(UsageError):
            propagate_hulls(
                AdditiveCircuit([Gate(0, 0, [1], [0])], 1, [0, 1]), 2
            )
        with pytest.raises(UsageError):
            propagate_hulls(AdditiveCircuit([], 0, [1]), 2)

    def test_containment_on_random_circuits(self):
        from padicroots.padic import ord_int

        rng = random.Random(271)
        checked = 0
        for _ in range(120):
            s = rng.randrange(0, 4)
            gates = []
            for j in range(1, s + 1):
                gates.append(
                    Gate(
                        rng.choice([-1, 1]) * rng.randrange(1, 50),
                        rng.choice([-1, 1]) * rng.randrange(1, 50),
                        [rng.randrange(0, 4) for _ in range(j)],
                        [rng.randrange(0, 4) for _ in range(j)],
                    )
                )
            final_m = [rng.randrange(0, 3) for _ in range(s + 1)]
            c = AdditiveCircuit(
                gates, rng.choice([-1, 1]) * rng.randrange(1, 50), final_m
            )
            p = rng.choice([2, 3, 5])
            f = circuit_expand(c)
            if f.is_zero:
                continue
            ph = propagate_hulls(c, p)
            for e, coeff in f.terms().items():
                assert ph.final_hull.supports_point(e, ord_int(int(coeff), p))
            checked += 1
        assert checked > 80


class TestPolySystem:
    def test_single_gate_system(self):
        # X_1 = x^5 + 3, output X_1
        c = AdditiveCircuit([Gate(1, 3, [5], [0])], 1, [0, 1])
        sys = to_poly_system(c)
        assert sys.num_vars == 2
        assert len(sys.equations) == 2
        assert sys.equations[0] == ((1, (0, 1)), (-1, (5, 0)), (-3, (0, 0)))
        assert sys.equations[1] == ((1, (0, 1)),)
        assert sys.equation_text(1) == "X_1 - X_0^5 - 3 = 0"
        assert sys.equation_text(2) == "X_1 = 0"

    def test_monomial_system(self):
        sys = to_poly_system(AdditiveCircuit([], 5, [3]))
        assert sys.num_vars == 1
        assert sys.equations == (((5, (3,)),),)

    def test_variable_locality(self):
        sys = to_poly_system(cyclotomic_shift_circuit(4))
        assert len(sys.equations) == 3
        for k, eq in enumerate(sys.equations, start=1):
            for _, exps in eq:
                used = [i for i, e in enumerate(exps) if e != 0]
                assert all(i <= k for i in used)

    def test_verify_root(self):
        c = cyclotomic_shift_circuit(4)
        sys = to_poly_system(c)
        assert verify_system_root(sys, c, -2)
        assert not verify_system_root(sys, c, 1)
        assert verify_system_root(sys, c, 0)  # f(0) = 0 here

    def test_verify_monomial_at_zero(self):
        c = AdditiveCircuit([], 5, [3])
        sys = to_poly_system(c)
        assert verify_system_root(sys, c, 0)
        assert not verify_system_root(sys, c, 2)

    def test_verify_rational_point(self):
        # X_1 = 2x - 1, output X_1: root at 1/2
        c = AdditiveCircuit([Gate(2, -1, [1], [0])], 1, [0, 1])
        sys = to_poly_system(c)
        assert verify_system_root(sys, c, Fraction(1, 2))
        assert not verify_system_root(sys, c, Fraction(1, 3))

    def test_matches_expansion_roots(self):
        rng = random.Random(99)
        for _ in range(40):
            shifts = [rng.randrange(-5, 6) for _ in range(rng.randrange(1, 4))]
            c = product_chain_circuit(shifts)
            sys = to_poly_system(c)
            f = circuit_expand(c)
            for x in range(-6, 7):
                assert verify_system_root(sys, c, x) == (f.evaluate(x) == 0)
