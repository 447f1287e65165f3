"""Exhaustive program search, bounded presentation search, and the named
polynomial families.

The enumeration walks all straight-line programs breadth-first by length,
recording each reachable polynomial the first time it appears; the result
is an exact minimal-length catalog over the enumerated universe (prunes
are counted and reported so that scope is explicit).  The presentation
search finds the smallest gate count admitting a circuit for a target
polynomial within stated exponent and constant bounds; it reports upper
bounds only, since the exact gate-count measure has no known algorithm.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import random
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import gmpy2

from .circuit import AdditiveCircuit, Gate, Slp, circuit_validate, slp_expand
from .errors import CacheStaleError, UsageError
from .padic import Prime
from .polynomial import SparsePoly

_HARD_LENGTH_LIMIT = 7
_DEFAULT_COEFF_BITS = 64

_OPS = ("add", "sub", "mul")
_OP_CODE = {"add": 0, "sub": 1, "mul": 2}

_CACHE_FORMAT = 1
_INDEX_FILE = "index.json"


def _pack_instruction(op_code: int, left: int, right: int) -> bytes:
    # node indices stay below 16 because programs stay short
    return bytes(((op_code << 4) | left, right))


def _unpack_witness(packed: bytes) -> Slp:
    ins = []
    for k in range(0, len(packed), 2):
        head, right = packed[k], packed[k + 1]
        ins.append((_OPS[head >> 4], head & 0x0F, right))
    return Slp(ins)


def _witness_json(packed: bytes) -> dict:
    return _unpack_witness(packed).to_json_obj()


class TauCatalog:
    """Minimal program length per reachable polynomial, with witnesses.

    Entries are keyed by the canonical sparse form; the recorded length
    is exact over the enumerated universe (length, degree and
    coefficient-size caps as stored on the catalog)."""

    def __init__(
        self,
        entries: dict[tuple, bytes],
        max_len: int,
        degree_cap: int,
        coeff_bit_cap: int,
        prunes: dict[str, int],
    ):
        self._entries = entries
        self.max_len = max_len
        self.degree_cap = degree_cap
        self.coeff_bit_cap = coeff_bit_cap
        self.prunes = dict(prunes)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, f: SparsePoly) -> bool:
        return f.key() in self._entries

    def tau(self, f: SparsePoly) -> int | None:
        packed = self._entries.get(f.key())
        return None if packed is None else len(packed) // 2

    def witness(self, f: SparsePoly) -> Slp | None:
        packed = self._entries.get(f.key())
        return None if packed is None else _unpack_witness(packed)

    def items(self) -> Iterator[tuple[SparsePoly, int, Slp]]:
        """All entries in a deterministic order (sorted canonical keys)."""
        for key in sorted(self._entries):
            packed = self._entries[key]
            poly = SparsePoly(
                [(e, n if d == 1 else Fraction(n, d)) for e, n, d in key]
            )
            yield poly, len(packed) // 2, _unpack_witness(packed)

    def keys_at(self, tau: int) -> list[tuple]:
        return sorted(
            k for k, packed in self._entries.items() if len(packed) // 2 == tau
        )

    def poly_from_key(self, key: tuple) -> SparsePoly:
        return SparsePoly(
            [(e, n if d == 1 else Fraction(n, d)) for e, n, d in key]
        )


def _coeff_bits(f: SparsePoly) -> int:
    worst = 0
    for c in f.terms().values():
        n = abs(c.numerator) if isinstance(c, Fraction) else abs(c)
        if n.bit_length() > worst:
            worst = n.bit_length()
    return worst


def enumerate_slps(
    max_len: int,
    degree_cap: int | None = None,
    coeff_bit_cap: int = _DEFAULT_COEFF_BITS,
    cache_dir: str | os.PathLike | None = None,
    refresh: bool = False,
    restrict_first: tuple[str, int, int] | None = None,
    hard_limit: int = _HARD_LENGTH_LIMIT,
) -> TauCatalog:
    """Breadth-first enumeration of all programs up to max_len instructions.

    Every polynomial value reachable at some node is recorded at its first
    (hence minimal) length together with a witness program.  Values whose
    degree exceeds degree_cap (default 2**max_len, which never cuts a
    genuine witness) or whose coefficients exceed coeff_bit_cap bits are
    pruned and counted.  ``restrict_first`` confines the search to
    programs opening with one fixed instruction; partition catalogs merge
    back to the full one with merge_catalogs."""
    if max_len < 0:
        raise UsageError("enumeration length must be nonnegative")
    if max_len > hard_limit:
        raise UsageError(
            f"enumeration length {max_len} exceeds the limit {hard_limit}"
        )
    if degree_cap is None:
        degree_cap = 2**max_len
    if degree_cap < 1 or coeff_bit_cap < 1:
        raise UsageError("caps must be positive")

    use_cache = cache_dir is not None and restrict_first is None
    if use_cache and not refresh:
        cached = _load_catalog_cache(
            cache_dir, max_len, degree_cap, coeff_bit_cap
        )
        if cached is not None:
            return cached

    one = SparsePoly.one()
    x = SparsePoly.x()
    polys: list[SparsePoly] = [one, x]
    intern: dict[tuple, int] = {one.key(): 0, x.key(): 1}
    # catalog: poly id -> packed witness (length = tau * 2)
    catalog: dict[int, bytes] = {0: b"", 1: b""}
    prunes = {"degree": 0, "coeff_bits": 0}
    # op memo: (code, ida, idb) packed into one int -> result id or -1
    memo: dict[int, int] = {}

    def intern_value(v: SparsePoly) -> int:
        key = v.key()
        vid = intern.get(key)
        if vid is None:
            if not v.is_zero:
                if v.degree > degree_cap:
                    prunes["degree"] += 1
                    return -1
                if _coeff_bits(v) > coeff_bit_cap:
                    prunes["coeff_bits"] += 1
                    return -1
            vid = len(polys)
            polys.append(v)
            intern[key] = vid
        return vid

    def apply_op(code: int, ida: int, idb: int) -> int:
        if code != 1 and ida > idb:
            ida, idb = idb, ida
        mkey = (((ida << 20) | idb) << 2) | code
        rid = memo.get(mkey)
        if rid is None:
            a, b = polys[ida], polys[idb]
            v = a + b if code == 0 else a - b if code == 1 else a * b
            rid = intern_value(v)
            memo[mkey] = rid
        return rid

    if restrict_first is not None:
        op, left, right = restrict_first
        if op not in _OPS or not (0 <= left <= 1 and 0 <= right <= 1):
            raise UsageError(
                "restrict_first must be an instruction over nodes 0 and 1"
            )

    # state: (ordered node ids, id set, packed program)
    frontier = [((0, 1), frozenset((0, 1)), b"")]
    visited = {(0, 1)}
    for depth in range(1, max_len + 1):
        last_level = depth == max_len
        next_frontier = []
        for ordered, idset, program in frontier:
            n = len(ordered)
            for i in range(n):
                for j in range(i, n):
                    for code in (0, 1, 2):
                        if code == 1 and i != j:
                            sub_pairs = ((i, j), (j, i))
                        else:
                            sub_pairs = ((i, j),)
                        for pi, pj in sub_pairs:
                            if depth == 1 and restrict_first is not None:
                                if (_OPS[code], pi, pj) != restrict_first:
                                    continue
                            rid = apply_op(code, ordered[pi], ordered[pj])
                            if rid < 0 or rid in idset:
                                continue
                            if rid not in catalog:
                                catalog[rid] = program + _pack_instruction(
                                    code, pi, pj
                                )
                            if last_level:
                                continue
                            new_ordered = ordered + (rid,)
                            skey = tuple(sorted(new_ordered))
                            if skey in visited:
                                continue
                            visited.add(skey)
                            next_frontier.append(
                                (
                                    new_ordered,
                                    idset | {rid},
                                    program
                                    + _pack_instruction(code, pi, pj),
                                )
                            )
        frontier = next_frontier

    entries = {polys[vid].key(): packed for vid, packed in catalog.items()}
    result = TauCatalog(entries, max_len, degree_cap, coeff_bit_cap, prunes)
    if use_cache:
        _write_catalog_cache(cache_dir, result)
    return result


def merge_catalogs(a: TauCatalog, b: TauCatalog) -> TauCatalog:
    """Union keeping the smaller length per key (ties break on witness
    bytes, so the merge is symmetric and deterministic)."""
    if (a.degree_cap, a.coeff_bit_cap) != (b.degree_cap, b.coeff_bit_cap):
        raise UsageError("cannot merge catalogs enumerated with different caps")
    merged = dict(a._entries)
    for key, packed in b._entries.items():
        mine = merged.get(key)
        if mine is None or (len(packed), packed) < (len(mine), mine):
            merged[key] = packed
    prunes = {
        k: a.prunes.get(k, 0) + b.prunes.get(k, 0)
        for k in set(a.prunes) | set(b.prunes)
    }
    return TauCatalog(
        merged,
        max(a.max_len, b.max_len),
        a.degree_cap,
        a.coeff_bit_cap,
        prunes,
    )


def all_first_instructions() -> list[tuple[str, int, int]]:
    """The complete set of possible opening instructions, for partitioned
    enumeration runs."""
    out = [("add", 0, 0), ("add", 0, 1), ("add", 1, 1)]
    out += [("sub", 0, 0), ("sub", 0, 1), ("sub", 1, 0), ("sub", 1, 1)]
    out += [("mul", 0, 0), ("mul", 0, 1), ("mul", 1, 1)]
    return out


# -- catalog persistence ---------------------------------------------------


def _shard_name(length: int) -> str:
    return f"tau_len_{length}.jsonl"


def _atomic_write(path: str, data: bytes) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp_catalog_")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_catalog_cache(cache_dir, catalog: TauCatalog) -> None:
    cache_dir = os.fspath(cache_dir)
    os.makedirs(cache_dir, exist_ok=True)
    shards = []
    by_len: dict[int, list[tuple]] = {i: [] for i in range(catalog.max_len + 1)}
    for key, packed in catalog._entries.items():
        by_len[len(packed) // 2].append(key)
    for length in range(catalog.max_len + 1):
        lines = []
        for key in sorted(by_len[length]):
            poly = catalog.poly_from_key(key)
            record = {
                "poly": poly.to_json_obj(),
                "tau": length,
                "witness": _witness_json(catalog._entries[key]),
            }
            lines.append(json.dumps(record, separators=(",", ":")))
        blob = ("\n".join(lines) + ("\n" if lines else "")).encode()
        fname = _shard_name(length)
        _atomic_write(os.path.join(cache_dir, fname), blob)
        shards.append(
            {
                "len": length,
                "file": fname,
                "sha256": hashlib.sha256(blob).hexdigest(),
                "count": len(lines),
            }
        )
    index = {
        "format": _CACHE_FORMAT,
        "max_len": catalog.max_len,
        "degree_cap": catalog.degree_cap,
        "coeff_bit_cap": catalog.coeff_bit_cap,
        "prunes": catalog.prunes,
        "shards": shards,
    }
    _atomic_write(
        os.path.join(cache_dir, _INDEX_FILE),
        json.dumps(index, indent=1).encode(),
    )


def _load_catalog_cache(
    cache_dir, max_len: int, degree_cap: int, coeff_bit_cap: int
) -> TauCatalog | None:
    """Load a cached catalog if present and compatible.

    Returns None when there is no cache at all; raises CacheStaleError
    when a cache exists but cannot serve this request faithfully."""
    cache_dir = os.fspath(cache_dir)
    index_path = os.path.join(cache_dir, _INDEX_FILE)
    if not os.path.exists(index_path):
        return None
    try:
        with open(index_path, "rb") as fh:
            index = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CacheStaleError(f"unreadable catalog index: {exc}") from None
    if index.get("format") != _CACHE_FORMAT:
        raise CacheStaleError(
            f"catalog cache format {index.get('format')} is not supported"
        )
    if index.get("max_len", -1) < max_len:
        # shorter cache cannot seed a longer run; rebuild from scratch
        return None
    same_caps = (index.get("degree_cap"), index.get("coeff_bit_cap")) == (
        degree_cap,
        coeff_bit_cap,
    )
    cache_pruned = any(index.get("prunes", {}).values())
    if not same_caps and cache_pruned:
        # the cached universe was actually cut by its caps; a request
        # with different caps would see a different universe
        raise CacheStaleError(
            "catalog cache was enumerated with different, binding caps: "
            f"degree_cap={index.get('degree_cap')} "
            f"coeff_bit_cap={index.get('coeff_bit_cap')}"
        )
    check_caps = not same_caps
    shards = {entry["len"]: entry for entry in index.get("shards", [])}
    entries: dict[tuple, bytes] = {}
    for length in range(max_len + 1):
        meta = shards.get(length)
        if meta is None:
            raise CacheStaleError(f"catalog cache is missing shard {length}")
        path = os.path.join(cache_dir, meta["file"])
        try:
            with open(path, "rb") as fh:
                blob = fh.read()
        except OSError as exc:
            raise CacheStaleError(f"unreadable shard {meta['file']}: {exc}")
        if hashlib.sha256(blob).hexdigest() != meta["sha256"]:
            raise CacheStaleError(
                f"shard {meta['file']} does not match its recorded checksum"
            )
        count = 0
        for line in blob.decode().splitlines():
            if not line.strip():
                continue
            record = json.loads(line)
            poly = SparsePoly.from_json_obj(record["poly"])
            witness = Slp.from_json_obj(record["witness"])
            if record["tau"] != length or witness.length != length:
                raise CacheStaleError(
                    f"shard {meta['file']} holds a record of the wrong length"
                )
            if check_caps and not poly.is_zero:
                # unpruned cache under different caps serves this request
                # only if the requested caps would not have pruned anything
                if poly.degree > degree_cap or _coeff_bits(poly) > coeff_bit_cap:
                    raise CacheStaleError(
                        "catalog cache holds values outside the requested caps"
                    )
            packed = b"".join(
                _pack_instruction(_OP_CODE[op], left, right)
                for op, left, right in witness.instructions
            )
            entries[poly.key()] = packed
            count += 1
        if count != meta["count"]:
            raise CacheStaleError(
                f"shard {meta['file']} holds {count} records, "
                f"index says {meta['count']}"
            )
    return TauCatalog(
        entries, max_len, degree_cap, coeff_bit_cap, index.get("prunes", {})
    )


_TAU_MEMORY: dict[tuple, TauCatalog] = {}


def tau_of(
    f: SparsePoly,
    max_len: int,
    cache_dir: str | os.PathLike | None = None,
) -> int | None:
    """Exact minimal program length when it is at most max_len, else None."""
    key = (max_len, 2**max_len, _DEFAULT_COEFF_BITS)
    catalog = _TAU_MEMORY.get(key)
    if catalog is None:
        catalog = enumerate_slps(max_len, cache_dir=cache_dir)
        _TAU_MEMORY[key] = catalog
    return catalog.tau(f)


# -- bounded presentation search -------------------------------------------


def _int_nth_root(a: int, n: int) -> int | None:
    if n == 1:
        return a
    if a == 0:
        return 0
    if a < 0:
        if n % 2 == 0:
            return None
        r = _int_nth_root(-a, n)
        return None if r is None else -r
    root, exact = gmpy2.iroot(gmpy2.mpz(a), n)
    return int(root) if exact else None


def _poly_nth_root(h: SparsePoly, n: int) -> SparsePoly | None:
    """Exact integer-coefficient n-th root, or None."""
    if n == 1:
        return h
    if h.is_zero:
        return h
    if not h.is_integral():
        return None
    d = h.degree
    if d % n:
        return None
    m = d // n
    lead = _int_nth_root(int(h.leading_coeff), n)
    if lead is None or lead == 0:
        return None
    if n % 2 == 0 and lead < 0:
        lead = -lead
    coeffs = {m: lead}
    denom = n * lead ** (n - 1)
    for t in range(1, m + 1):
        partial = SparsePoly(list(coeffs.items()))
        want = h.coeff(n * m - t)
        have = (partial**n).coeff(n * m - t)
        delta = want - have
        if delta % denom:
            return None
        c = delta // denom
        if c:
            coeffs[m - t] = c
    root = SparsePoly(list(coeffs.items()))
    return root if root**n == h else None


def _signed_divisors_upto(content: int, bound: int) -> list[int]:
    """Divisors of |content| within the bound, positive first, ascending."""
    from .polynomial import _divisors

    divs = [d for d in _divisors(abs(content)) if d <= bound]
    out = []
    for d in divs:
        out.append(d)
        out.append(-d)
    return out


def _solve_last_gate(
    target: SparsePoly,
    prefix: list[SparsePoly],
    exp_bound: int,
    const_bound: int,
) -> Gate | None:
    """Find gate constants and exponent vectors over the prefix values
    whose two branches sum to the target, scanning shapes in a fixed
    order."""
    if not target.is_integral():
        return None
    k = len(prefix)
    # all branch monomials prod(prefix[i] ** e[i]) with entries <= exp_bound
    shapes: list[tuple[int, ...]] = [()]
    for _ in range(k):
        shapes = [s + (e,) for s in shapes for e in range(exp_bound + 1)]
    powers: list[list[SparsePoly]] = []
    for v in prefix:
        col = [SparsePoly.one()]
        for _ in range(exp_bound):
            col.append(col[-1] * v)
        powers.append(col)

    def monomial(shape: tuple[int, ...]) -> SparsePoly:
        acc = SparsePoly.one()
        for i, e in enumerate(shape):
            if e:
                acc = acc * powers[i][e]
        return acc

    monos = [monomial(s) for s in shapes]

    # single-branch gates first
    for idx, mono in enumerate(monos):
        if mono.is_zero:
            continue
        try:
            q = target.exact_div(mono)
        except UsageError:
            continue
        if q.degree == 0 and q.is_integral():
            c = int(q.leading_coeff)
            if abs(c) <= const_bound:
                return Gate(c, 0, list(shapes[idx]), [0] * k)

    for i1 in range(len(shapes)):
        m1 = monos[i1]
        if m1.is_zero:
            continue
        for i2 in range(i1 + 1, len(shapes)):
            m2 = monos[i2]
            if m2.is_zero:
                continue
            support = set(m1.terms()) | set(m2.terms())
            hi, lo = max(support), min(support)
            a11, a12 = m1.coeff(hi), m2.coeff(hi)
            a21, a22 = m1.coeff(lo), m2.coeff(lo)
            det = a11 * a22 - a12 * a21
            if det != 0:
                b1, b2 = target.coeff(hi), target.coeff(lo)
                cnum = b1 * a22 - a12 * b2
                dnum = a11 * b2 - b1 * a21
                if cnum % det or dnum % det:
                    continue
                c, d = cnum // det, dnum // det
                if not c or not d:
                    continue  # single-branch pass covered these
                if abs(c) > const_bound or abs(d) > const_bound:
                    continue
                if c * m1 + d * m2 == target:
                    return Gate(
                        int(c), int(d), list(shapes[i1]), list(shapes[i2])
                    )
            else:
                # proportional branches: m1 * v == m2 * u in lowest terms
                lc1, lc2 = m1.leading_coeff, m2.leading_coeff
                g = math.gcd(int(lc1), int(lc2))
                u, v = int(lc1) // g, int(lc2) // g
                if m1 * v != m2 * u:
                    continue
                try:
                    q = target.exact_div(m2)
                except UsageError:
                    continue
                if q.degree != 0:
                    continue
                e = q.leading_coeff  # target == e * m2, need c*u/v + d == e
                for c in range(-const_bound, const_bound + 1):
                    d = e - Fraction(c * u, v)
                    if d.denominator != 1:
                        continue
                    d = int(d)
                    if abs(d) <= const_bound and (c or d):
                        return Gate(
                            int(c), int(d), list(shapes[i1]), list(shapes[i2])
                        )
    return None


def _final_exponent_shapes(
    n_vars: int, exp_bound: int, last_used: bool
) -> Iterator[tuple[int, ...]]:
    shapes: list[tuple[int, ...]] = [()]
    for _ in range(n_vars):
        shapes = [s + (e,) for s in shapes for e in range(exp_bound + 1)]
    for s in shapes:
        if not last_used or s[-1] >= 1:
            yield s


def _search_at_s(
    f: SparsePoly,
    s: int,
    exp_bound: int,
    const_bound: int,
    prefix_vals: list[SparsePoly],
    prefix_gates: list[Gate],
) -> AdditiveCircuit | None:
    """Complete the chain to exactly s gates and match f.

    The last gate is solved backwards from the final monomial equation;
    earlier gates are enumerated forwards with value deduplication."""
    built = len(prefix_gates)
    if built == s:
        # only the gateless search lands here: f must be one monomial
        if s != 0 or f.num_terms != 1:
            return None
        e = next(iter(f.terms()))
        c = f.coeff(e)
        if not isinstance(c, int) or abs(c) > const_bound or e > exp_bound:
            return None
        return AdditiveCircuit([], c, [e])

    if built == s - 1:
        # solve the last gate from the final equation
        for shape in _final_exponent_shapes(s + 1, exp_bound, True):
            head, e_last = shape[:-1], shape[-1]
            acc = SparsePoly.one()
            for v, e in zip(prefix_vals, head):
                for _ in range(e):
                    acc = acc * v
            if acc.is_zero:
                continue
            try:
                h = f.exact_div(acc)
            except UsageError:
                continue
            if h.is_zero or not h.is_integral():
                continue
            content = int(h.content_and_primitive()[0].numerator)
            for c_f in _signed_divisors_upto(content, const_bound):
                root = _poly_nth_root(
                    h.exact_div(SparsePoly.constant(c_f)), e_last
                )
                if root is None:
                    continue
                gate = _solve_last_gate(
                    root, prefix_vals, exp_bound, const_bound
                )
                if gate is None and e_last % 2 == 0:
                    # even powers cannot see the sign of the gate value
                    gate = _solve_last_gate(
                        -root, prefix_vals, exp_bound, const_bound
                    )
                if gate is not None:
                    return AdditiveCircuit(
                        prefix_gates + [gate], c_f, list(shape)
                    )
        return None

    # enumerate the next gate forwards, deduplicating by value
    j = built + 1
    seen: set[tuple] = {v.key() for v in prefix_vals}
    for gate, value in _forward_gate_candidates(
        prefix_vals, exp_bound, const_bound
    ):
        key = value.key()
        if key in seen:
            continue
        seen.add(key)
        found = _search_at_s(
            f,
            s,
            exp_bound,
            const_bound,
            prefix_vals + [value],
            prefix_gates + [gate],
        )
        if found is not None:
            return found
    return None


def _forward_gate_candidates(
    prefix: list[SparsePoly], exp_bound: int, const_bound: int
) -> Iterator[tuple[Gate, SparsePoly]]:
    """All next-gate values over the prefix, in a fixed scan order.

    The scan is exhaustive over shapes and constants within bounds; cost
    grows steeply with the prefix length, which is why deeper searches
    are practical only for small bounds."""
    k = len(prefix)
    shapes: list[tuple[int, ...]] = [()]
    for _ in range(k):
        shapes = [s + (e,) for s in shapes for e in range(exp_bound + 1)]
    powers = []
    for v in prefix:
        col = [SparsePoly.one()]
        for _ in range(exp_bound):
            col.append(col[-1] * v)
        powers.append(col)
    monos = []
    for s in shapes:
        acc = SparsePoly.one()
        for i, e in enumerate(s):
            if e:
                acc = acc * powers[i][e]
        monos.append(acc)
    consts = [c for c in range(-const_bound, const_bound + 1) if c]
    for i1 in range(len(shapes)):
        m1 = monos[i1]
        for c in consts:
            base = c * m1
            # single-branch gate
            yield Gate(c, 0, list(shapes[i1]), [0] * k), base
            for i2 in range(i1, len(shapes)):
                m2 = monos[i2]
                for d in consts:
                    value = base + d * m2
                    if value.is_zero:
                        continue
                    yield Gate(c, d, list(shapes[i1]), list(shapes[i2])), value


def sigma_upper_search(
    f: SparsePoly,
    s_max: int,
    exp_bound: int = 6,
    const_bound: int = 100,
) -> tuple[int, AdditiveCircuit] | None:
    """Smallest gate count at most s_max admitting a presentation of f
    within the exponent and constant bounds, with a witness circuit.

    The result is an upper bound on the true gate-count measure: only
    presentations inside the stated bounds are searched, and no exact
    minimality beyond them is claimed."""
    if f.is_zero:
        raise UsageError("the zero polynomial has no meaningful presentation")
    if s_max < 0:
        raise UsageError("s_max must be nonnegative")
    if not f.is_integral():
        raise UsageError("presentation search expects integer coefficients")
    x = SparsePoly.x()
    for s in range(s_max + 1):
        found = _search_at_s(f, s, exp_bound, const_bound, [x], [])
        if found is not None:
            return s, found
    return None


# -- polynomial families ---------------------------------------------------


@dataclass(frozen=True)
class FamilySpec:
    """Selector for a named family: extremal (p, s), cyclotomic_shift (d),
    logistic (j), shub_smale (j)."""

    kind: str
    p: int | None = None
    s: int | None = None
    d: int | None = None
    j: int | None = None

    def __post_init__(self):
        kinds = ("extremal", "cyclotomic_shift", "logistic", "shub_smale")
        if self.kind not in kinds:
            raise UsageError(f"unknown family kind {self.kind!r}")
        if self.kind == "extremal":
            if self.p is None or self.s is None:
                raise UsageError("extremal family needs p and s")
            Prime(self.p)
            if self.s < 1:
                raise UsageError("extremal family needs s >= 1")
        elif self.kind == "cyclotomic_shift":
            if self.d is None or self.d < 1:
                raise UsageError("cyclotomic_shift family needs d >= 1")
        else:
            if self.j is None or self.j < 1:
                raise UsageError(f"{self.kind} family needs j >= 1")


class _SlpSketch:
    """Incremental program builder tracking node indices."""

    def __init__(self):
        self.instructions: list[tuple[str, int, int]] = []

    def emit(self, op: str, left: int, right: int) -> int:
        self.instructions.append((op, left, right))
        return len(self.instructions) + 1

    def const(self, n: int) -> int:
        """Emit instructions computing the positive integer n from node 0."""
        if n < 1:
            raise UsageError("constant builder expects a positive integer")
        if n == 1:
            return 0
        node = 0
        for bit in bin(n)[3:]:
            node = self.emit("add", node, node)
            if bit == "1":
                node = self.emit("add", node, 0)
        return node

    def power(self, base: int, e: int) -> int:
        """Square-and-multiply powering of an existing node."""
        if e < 1:
            raise UsageError("power builder expects a positive exponent")
        node = base
        for bit in bin(e)[3:]:
            node = self.emit("mul", node, node)
            if bit == "1":
                node = self.emit("mul", node, base)
        return node

    def build(self) -> Slp:
        return Slp(self.instructions)


def family_extremal(p: int, s: int) -> tuple[SparsePoly, Slp]:
    """prod_{i=0}^{s-1} (x - p^i): s roots with s distinct valuations."""
    p = int(Prime(p))
    roots = [p**i for i in range(s)]
    poly = SparsePoly.from_roots(roots)
    sk = _SlpSketch()
    acc = sk.emit("sub", 1, 0)  # x - 1
    if s > 1:
        p_node = sk.const(p)
        pw = p_node
        for i in range(1, s):
            if i > 1:
                pw = sk.emit("mul", pw, p_node)
            term = sk.emit("sub", 1, pw)
            acc = sk.emit("mul", acc, term)
    return poly, sk.build()


def extremal_circuit(p: int, s: int) -> AdditiveCircuit:
    """Product-chain presentation of the extremal family with s gates."""
    p = int(Prime(p))
    if s < 1:
        raise UsageError("extremal circuit needs s >= 1")
    gates = []
    for j in range(1, s + 1):
        m = [0] * j
        mp = [0] * j
        m[0] = 1
        if j > 1:
            m[j - 1] = 1
            mp[j - 1] = 1
        gates.append(Gate(1, -(p ** (j - 1)), m, mp))
    return AdditiveCircuit(gates, 1, [0] * s + [1])


def family_cyclotomic_shift(d: int) -> tuple[SparsePoly, Slp]:
    """(x+1)^d - 1: degree d with few distinct root sizes."""
    if d < 1:
        raise UsageError("cyclotomic_shift needs d >= 1")
    poly = (SparsePoly.x() + 1) ** d - 1
    sk = _SlpSketch()
    shifted = sk.emit("add", 1, 0)
    powered = sk.power(shifted, d)
    sk.emit("sub", powered, 0)
    return poly, sk.build()


def cyclotomic_shift_circuit(d: int) -> AdditiveCircuit:
    """Two-gate presentation of (x+1)^d - 1."""
    if d < 1:
        raise UsageError("cyclotomic_shift needs d >= 1")
    return AdditiveCircuit(
        [Gate(1, 1, [1], [0]), Gate(1, -1, [0, d], [0, 0])],
        1,
        [0, 0, 1],
    )


def logistic_iterate(j: int) -> SparsePoly:
    """j-th iterate of the quadratic map 4x(1-x)."""
    if j < 1:
        raise UsageError("logistic family needs j >= 1")
    x = SparsePoly.x()
    g = 4 * x * (1 - x)
    for _ in range(j - 1):
        g = 4 * g * (1 - g)
    return g


def family_logistic(j: int) -> tuple[SparsePoly, Slp]:
    """g_j(x) - x for the quadratic map iterates: 2^j fixed points in the
    unit interval, with a short constructive program."""
    poly = logistic_iterate(j) - SparsePoly.x()
    sk = _SlpSketch()
    g = 1
    for _ in range(j):
        u = sk.emit("sub", 0, g)  # 1 - g
        v = sk.emit("mul", g, u)
        w = sk.emit("add", v, v)
        g = sk.emit("add", w, w)  # 4 g (1 - g)
    sk.emit("sub", g, 1)
    return poly, sk.build()


def family_shub_smale(j: int) -> tuple[SparsePoly, Slp]:
    """prod_{k=1}^{2^j} (x - 2^k): 2^j integer roots from a program of
    length 3 * 2^j - 1."""
    if j < 1:
        raise UsageError("shub_smale family needs j >= 1")
    n = 2**j
    poly = SparsePoly.from_roots([2**k for k in range(1, n + 1)])
    sk = _SlpSketch()
    pw = sk.emit("add", 0, 0)  # 2
    acc = sk.emit("sub", 1, pw)  # x - 2
    for _ in range(2, n + 1):
        pw = sk.emit("add", pw, pw)
        term = sk.emit("sub", 1, pw)
        acc = sk.emit("mul", acc, term)
    return poly, sk.build()


def family(spec: FamilySpec) -> tuple[SparsePoly, Slp | None]:
    """Expanded polynomial and a constructive program for a named family."""
    if spec.kind == "extremal":
        return family_extremal(spec.p, spec.s)
    if spec.kind == "cyclotomic_shift":
        return family_cyclotomic_shift(spec.d)
    if spec.kind == "logistic":
        return family_logistic(spec.j)
    return family_shub_smale(spec.j)


# -- random corpus ---------------------------------------------------------


def random_circuit(
    s: int,
    seed: int,
    exp_bound: int = 6,
    const_bound: int = 100,
) -> AdditiveCircuit:
    """Deterministic pseudo-random circuit: nonzero constants up to
    const_bound in magnitude, exponents up to exp_bound."""
    if s < 0:
        raise UsageError("gate count must be nonnegative")
    if exp_bound < 0 or const_bound < 1:
        raise UsageError("bad corpus bounds")
    rng = random.Random(seed)

    def draw_const() -> int:
        return rng.choice((-1, 1)) * rng.randint(1, const_bound)

    gates = []
    for j in range(1, s + 1):
        c = draw_const()
        d = draw_const()
        m = [rng.randint(0, exp_bound) for _ in range(j)]
        mp = [rng.randint(0, exp_bound) for _ in range(j)]
        gates.append(Gate(c, d, m, mp))
    final_c = draw_const()
    final_m = [rng.randint(0, exp_bound) for _ in range(s + 1)]
    return AdditiveCircuit(gates, final_c, final_m)
