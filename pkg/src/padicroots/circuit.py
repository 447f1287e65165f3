"""Straight-line programs and additive-complexity circuits.

Two presentations of a univariate integer polynomial:

* An ``Slp`` is a sequence of ring instructions over the initial nodes
  1 and x; its length is the complexity measure tau.
* An ``AdditiveCircuit`` is a chain of gates, each a sum of two signed
  monomials in the previous gate values, followed by a final monomial
  output; the gate count is the complexity measure sigma.

Alongside evaluation and exact expansion, this module propagates lower
Newton hulls symbolically through a circuit (no expansion needed) and
emits the multivariate gate system whose root set mirrors the roots of
the expansion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import UsageError
from .newton import (
    LowerHull,
    hull_scale,
    hull_translate,
    hull_union,
    minkowski_sum,
)
from .padic import Prime, ord_int
from .polynomial import SparsePoly

_SLP_OPS = ("add", "sub", "mul")

Instruction = tuple[str, int, int]
RingValue = Union[int, Fraction, SparsePoly]


def _as_int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise UsageError(f"{what} must be an integer, got {value!r}")
    return value


@dataclass(frozen=True)
class Slp:
    """Straight-line program: node 0 is the constant 1, node 1 is x,
    and instruction i defines node i + 2 from two earlier nodes."""

    instructions: tuple[Instruction, ...]

    def __init__(self, instructions: Sequence[Sequence] = ()):
        fixed = []
        for i, ins in enumerate(instructions):
            if len(ins) != 3:
                raise UsageError(f"instruction {i} must be (op, left, right)")
            op, left, right = ins
            if op not in _SLP_OPS:
                raise UsageError(f"instruction {i}: unknown op {op!r}")
            left = _as_int(left, f"instruction {i} left operand")
            right = _as_int(right, f"instruction {i} right operand")
            # instruction i defines node i + 2; operands must come earlier
            if not (0 <= left <= i + 1 and 0 <= right <= i + 1):
                raise UsageError(
                    f"instruction {i}: operands must index nodes below {i + 2}"
                )
            fixed.append((op, left, right))
        object.__setattr__(self, "instructions", tuple(fixed))

    @property
    def length(self) -> int:
        """Instruction count: the complexity this program witnesses."""
        return len(self.instructions)

    def to_json_obj(self) -> dict:
        return {
            "ops": [
                {"op": op, "l": left, "r": right}
                for op, left, right in self.instructions
            ]
        }

    @classmethod
    def from_json_obj(cls, obj) -> "Slp":
        if not isinstance(obj, dict) or "ops" not in obj:
            raise UsageError("program JSON must be an object with an 'ops' list")
        ops = obj["ops"]
        if not isinstance(ops, list):
            raise UsageError("'ops' must be a list")
        ins = []
        for entry in ops:
            if not isinstance(entry, dict):
                raise UsageError("each op must be an object")
            try:
                ins.append((entry["op"], entry["l"], entry["r"]))
            except KeyError as exc:
                raise UsageError(f"op entry missing key {exc}") from None
        return cls(ins)

    def to_text(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))

    @classmethod
    def from_text(cls, text: str) -> "Slp":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"invalid program JSON: {exc}") from None
        return cls.from_json_obj(obj)


def slp_eval(prog: Slp, x: RingValue, modulus: int | None = None):
    """Run the program on a ring element.  With ``modulus`` the arithmetic
    is reduced after every instruction (integers mod p**k)."""
    if modulus is not None:
        if not isinstance(x, int):
            raise UsageError("modular evaluation requires an integer point")
        values = [1 % modulus, x % modulus]
    elif isinstance(x, SparsePoly):
        values = [SparsePoly.one(), x]
    else:
        values = [1, x]
    for op, left, right in prog.instructions:
        a, b = values[left], values[right]
        if op == "add":
            v = a + b
        elif op == "sub":
            v = a - b
        else:
            v = a * b
        if modulus is not None:
            v %= modulus
        values.append(v)
    return values[-1]


def slp_node_values(prog: Slp, x: RingValue) -> list:
    """All node values in definition order (node 0 first)."""
    values = [SparsePoly.one() if isinstance(x, SparsePoly) else 1, x]
    for op, left, right in prog.instructions:
        a, b = values[left], values[right]
        values.append(a + b if op == "add" else a - b if op == "sub" else a * b)
    return values


def slp_expand(prog: Slp) -> SparsePoly:
    """The exact polynomial the program computes."""
    return slp_eval(prog, SparsePoly.x())


@dataclass(frozen=True)
class Gate:
    """One circuit gate: c * prod(X_i^m[i]) + d * prod(X_i^mp[i]), the
    products running over the gate values defined so far (X_0 = x)."""

    c: int
    d: int
    m: tuple[int, ...]
    mp: tuple[int, ...]

    def __init__(self, c: int, d: int, m: Sequence[int], mp: Sequence[int]):
        object.__setattr__(self, "c", _as_int(c, "gate constant c"))
        object.__setattr__(self, "d", _as_int(d, "gate constant d"))
        for name, vec in (("m", m), ("mp", mp)):
            for e in vec:
                if _as_int(e, f"gate exponent in {name}") < 0:
                    raise UsageError("gate exponents must be nonnegative")
        object.__setattr__(self, "m", tuple(int(e) for e in m))
        object.__setattr__(self, "mp", tuple(int(e) for e in mp))
        if len(self.m) != len(self.mp):
            raise UsageError("gate exponent vectors must have equal length")


@dataclass(frozen=True)
class AdditiveCircuit:
    """Gate chain X_1 .. X_s over X_0 = x with a monomial output
    final_c * prod(X_i^final_m[i])."""

    gates: tuple[Gate, ...]
    final_c: int
    final_m: tuple[int, ...]

    def __init__(
        self,
        gates: Sequence[Gate],
        final_c: int,
        final_m: Sequence[int],
    ):
        gates = tuple(gates)
        for j, gate in enumerate(gates, start=1):
            if not isinstance(gate, Gate):
                raise UsageError(f"gate {j} is not a Gate")
            # gate j may read X_0 .. X_{j-1} only
            if len(gate.m) != j:
                raise UsageError(
                    f"gate {j} exponent vectors must have length {j}, "
                    f"got {len(gate.m)}"
                )
        final_m = tuple(int(e) for e in final_m)
        if len(final_m) != len(gates) + 1:
            raise UsageError(
                f"final exponent vector must have length {len(gates) + 1}, "
                f"got {len(final_m)}"
            )
        for e in final_m:
            if e < 0:
                raise UsageError("final exponents must be nonnegative")
        object.__setattr__(self, "gates", gates)
        object.__setattr__(self, "final_c", _as_int(final_c, "final constant"))
        object.__setattr__(self, "final_m", final_m)

    @property
    def s(self) -> int:
        """Gate count: the additive complexity this presentation witnesses."""
        return len(self.gates)

    def to_json_obj(self) -> dict:
        return {
            "s": self.s,
            "gates": [
                {
                    "c": str(g.c),
                    "d": str(g.d),
                    "m": list(g.m),
                    "mp": list(g.mp),
                }
                for g in self.gates
            ],
            "final": {"c": str(self.final_c), "m": list(self.final_m)},
        }

    @classmethod
    def from_json_obj(cls, obj) -> "AdditiveCircuit":
        if not isinstance(obj, dict):
            raise UsageError("circuit JSON must be an object")
        try:
            raw_gates = obj["gates"]
            raw_final = obj["final"]
        except KeyError as exc:
            raise UsageError(f"circuit JSON missing key {exc}") from None
        if not isinstance(raw_gates, list) or not isinstance(raw_final, dict):
            raise UsageError("circuit JSON has malformed 'gates' or 'final'")
        gates = []
        for entry in raw_gates:
            try:
                gates.append(
                    Gate(
                        _parse_const(entry["c"]),
                        _parse_const(entry["d"]),
                        entry["m"],
                        entry["mp"],
                    )
                )
            except (KeyError, TypeError) as exc:
                raise UsageError(f"malformed gate entry: {exc}") from None
        try:
            final_c = _parse_const(raw_final["c"])
            final_m = raw_final["m"]
        except (KeyError, TypeError) as exc:
            raise UsageError(f"malformed final entry: {exc}") from None
        circuit = cls(gates, final_c, final_m)
        if "s" in obj and obj["s"] != circuit.s:
            raise UsageError(
                f"declared gate count {obj['s']} does not match {circuit.s}"
            )
        return circuit

    def to_text(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))

    @classmethod
    def from_text(cls, text: str) -> "AdditiveCircuit":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"invalid circuit JSON: {exc}") from None
        return cls.from_json_obj(obj)


def _parse_const(value) -> int:
    # canonical JSON carries constants as strings to stay bignum-safe
    if isinstance(value, str):
        try:
            return int(value)
        except ValueError:
            raise UsageError(f"bad integer constant {value!r}") from None
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    raise UsageError(f"bad integer constant {value!r}")


def _monomial_value(values: list, exps: Sequence[int]):
    acc = None
    for v, e in zip(values, exps):
        if e == 0:
            continue
        term = v**e
        acc = term if acc is None else acc * term
    return acc


def circuit_gate_values(c: AdditiveCircuit, x) -> list:
    """Exact values X_0 .. X_s of the gate chain at a point (or at the
    indeterminate when x is a SparsePoly)."""
    one = SparsePoly.one() if isinstance(x, SparsePoly) else 1
    values = [x]
    for gate in c.gates:
        a = 0
        if gate.c != 0:
            prod = _monomial_value(values, gate.m)
            a = gate.c * (prod if prod is not None else one)
        b = 0
        if gate.d != 0:
            prod = _monomial_value(values, gate.mp)
            b = gate.d * (prod if prod is not None else one)
        values.append(a + b)
    return values


def circuit_eval(c: AdditiveCircuit, x):
    """Value of the circuit output at a point."""
    values = circuit_gate_values(c, x)
    one = SparsePoly.one() if isinstance(x, SparsePoly) else 1
    if c.final_c == 0:
        return 0 * one
    prod = _monomial_value(values, c.final_m)
    return c.final_c * (prod if prod is not None else one)


def circuit_expand(c: AdditiveCircuit) -> SparsePoly:
    """The exact expanded polynomial the circuit computes."""
    out = circuit_eval(c, SparsePoly.x())
    if isinstance(out, SparsePoly):
        return out
    return SparsePoly.constant(out)


def circuit_validate(c: AdditiveCircuit, f: SparsePoly) -> bool:
    """True iff the circuit expands to f, witnessing gate count c.s."""
    return circuit_expand(c) == f


def _branch_hull(
    hulls: list[LowerHull], exps: Sequence[int], coeff: int, p: int
) -> LowerHull | None:
    """Propagated hull of coeff * prod(X_i^exps[i]); None for coeff 0."""
    if coeff == 0:
        return None
    acc = None
    for i, e in enumerate(exps):
        if e == 0:
            continue
        scaled = hull_scale(hulls[i], e)
        acc = scaled if acc is None else minkowski_sum(acc, scaled)
    offset = ord_int(coeff, p)
    if acc is None:
        return LowerHull(((0, offset),))
    if offset == 0:
        return acc
    return hull_translate(acc, 0, offset)


@dataclass(frozen=True)
class PropagatedHulls:
    """Symbolic hull propagation record.

    ``hulls[j]`` is the predicted lower hull of gate value X_j (index
    s + 1 is the circuit output); ``slope_sets[j]`` the edge slopes of
    hulls[0..s]; ``ledger[j]`` the edge counts.  The two flag fields
    record whether the expected growth pattern held: ``ledger_ok[i]``
    checks ledger[i+1] <= ledger[i] + i + 1 and ``final_edges_ok``
    checks ledger[s+1] <= s(s+1)/2.  Violations are recorded, not
    raised: the prediction is a containment statement, and coefficient
    cancellation in the actual expansion can only remove points."""

    hulls: tuple[LowerHull, ...]
    slope_sets: tuple[tuple[Fraction, ...], ...]
    ledger: tuple[int, ...]
    ledger_ok: tuple[bool, ...]
    final_edges_ok: bool

    @property
    def final_hull(self) -> LowerHull:
        return self.hulls[-1]


def propagate_hulls(c: AdditiveCircuit, p: Prime | int) -> PropagatedHulls:
    """Predict per-gate lower hulls without expanding the circuit.

    Each monomial branch is a Minkowski sum of dilated prior hulls
    shifted by the valuation of its constant; a gate takes the union
    hull of its two branches.  Every coefficient point of the true
    expansion lies on or above the corresponding predicted hull."""
    p = int(Prime(p)) if not isinstance(p, Prime) else int(p)
    hulls: list[LowerHull] = [LowerHull(((1, 0),))]
    for j, gate in enumerate(c.gates, start=1):
        if gate.c == 0 and gate.d == 0:
            raise UsageError(f"gate {j} has both constants zero")
        left = _branch_hull(hulls, gate.m, gate.c, p)
        right = _branch_hull(hulls, gate.mp, gate.d, p)
        if left is None:
            hulls.append(right)
        elif right is None:
            hulls.append(left)
        else:
            hulls.append(hull_union(left, right))
    if c.final_c == 0:
        raise UsageError("final constant is zero: circuit output is 0")
    final = _branch_hull(hulls, c.final_m, c.final_c, p)
    hulls.append(final)

    s = c.s
    slope_sets = tuple(tuple(h.slopes()) for h in hulls[: s + 1])
    ledger = tuple(len(h.vertices) - 1 for h in hulls)
    ledger_ok = tuple(ledger[i + 1] <= ledger[i] + i + 1 for i in range(s + 1))
    final_edges_ok = ledger[s + 1] <= s * (s + 1) // 2
    return PropagatedHulls(
        hulls=tuple(hulls),
        slope_sets=slope_sets,
        ledger=ledger,
        ledger_ok=ledger_ok,
        final_edges_ok=final_edges_ok,
    )


Term = tuple[int, tuple[int, ...]]


@dataclass(frozen=True)
class PolySystem:
    """Multivariate gate system in variables X_0 .. X_s.

    One equation per gate (X_j minus its two branch monomials) plus the
    final monomial equation; equation j touches no variable beyond
    index j."""

    num_vars: int
    equations: tuple[tuple[Term, ...], ...]

    def __init__(self, num_vars: int, equations: Sequence[Sequence[Term]]):
        equations = tuple(tuple(eq) for eq in equations)
        if num_vars < 1:
            raise UsageError("system needs at least the variable X_0")
        if len(equations) != num_vars:
            raise UsageError(
                f"expected {num_vars} equations, got {len(equations)}"
            )
        for k, eq in enumerate(equations, start=1):
            limit = min(k, num_vars - 1)
            for coeff, exps in eq:
                if len(exps) != num_vars:
                    raise UsageError("term exponent vector has wrong length")
                for idx in range(limit + 1, num_vars):
                    if exps[idx] != 0:
                        raise UsageError(
                            f"equation {k} may not involve X_{idx}"
                        )
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "equations", equations)

    def equation_text(self, k: int) -> str:
        """Readable form of equation k (1-based), e.g. 'X_1 - 2*X_0^3 = 0'."""
        parts = []
        for coeff, exps in self.equations[k - 1]:
            if coeff == 0:
                continue
            factors = [
                f"X_{i}" if e == 1 else f"X_{i}^{e}"
                for i, e in enumerate(exps)
                if e != 0
            ]
            mag = abs(coeff)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            if not parts:
                parts.append(body if coeff > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if coeff > 0 else f"- {body}")
        return (" ".join(parts) if parts else "0") + " = 0"


def to_poly_system(c: AdditiveCircuit) -> PolySystem:
    """Emit the gate equations plus the final monomial equation.

    A point x is a root of the expansion exactly when the gate values
    at x extend it to a solution of the full system."""
    n = c.s + 1
    equations: list[tuple[Term, ...]] = []
    for j, gate in enumerate(c.gates, start=1):
        unit = tuple(1 if i == j else 0 for i in range(n))
        terms: list[Term] = [(1, unit)]
        if gate.c != 0:
            terms.append((-gate.c, tuple(gate.m) + (0,) * (n - j)))
        if gate.d != 0:
            terms.append((-gate.d, tuple(gate.mp) + (0,) * (n - j)))
        equations.append(tuple(terms))
    equations.append(((c.final_c, c.final_m),))
    return PolySystem(n, equations)


def verify_system_root(
    sys: PolySystem, c: AdditiveCircuit, x: int | Fraction
) -> bool:
    """Evaluate the gate chain at x and test every system equation.

    The gate equations hold by construction, so the result is true
    exactly when x is a root of the circuit's expansion."""
    values = circuit_gate_values(c, x)
    if len(values) != sys.num_vars:
        raise UsageError("system and circuit sizes do not match")
    for eq in sys.equations:
        total = 0
        for coeff, exps in eq:
            term = coeff
            for v, e in zip(values, exps):
                if e:
                    term *= v**e
            total += term
        if total != 0:
            return False
    return True
