"""Command-line front end.

One subcommand per analysis; global flags select the prime, disk radius
exponent, degree cap, seed, cache directory, and output format.  Output
is deterministic: the same arguments and seed print the same bytes.
Exit codes: 0 success, 1 usage or parse error, 2 degree cap exceeded,
3 internal invariant violation (a bound violation during verification is
reported this way; it would refute the inequalities this package is
built around, so it is loud).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from .bounds import (
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
from .errors import (
    DegreeCapExceeded,
    InternalInvariantError,
    PadicrootsError,
    UsageError,
)
from .newton import (
    count_roots_in_disk,
    count_roots_qp,
    count_roots_zp,
    newton_polygon,
    valuation_profile,
)
from .padic import Infinity, Prime, digits, format_rational, ord_rat, parse_rational
from .polynomial import Interval, SparsePoly, set_degree_cap, sturm_count
from .search import (
    FamilySpec,
    cyclotomic_shift_circuit,
    enumerate_slps,
    extremal_circuit,
    family,
    random_circuit,
    sigma_upper_search,
    tau_of,
)

ENV_CACHE_DIR = "PADICROOTS_CACHE_DIR"

__all__ = ["RunConfig", "main"]


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters shared across subcommands."""

    prime: int | None
    radius: Fraction
    degree_cap: int | None
    max_len: int | None
    count: int | None
    seed: int
    cache_dir: str | None
    out_format: str

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        radius = _parse_cli_rational(getattr(args, "radius", "1"), "--radius")
        if radius <= 0:
            raise UsageError(f"--radius must be positive, got {radius}")
        degree_cap = getattr(args, "degree_cap", None)
        if degree_cap is not None and degree_cap < 1:
            raise UsageError("--degree-cap must be at least 1")
        max_len = getattr(args, "max_len", None)
        if max_len is not None and max_len < 0:
            raise UsageError("--max-len must be nonnegative")
        count = getattr(args, "count", None)
        if count is not None and count < 1:
            raise UsageError("--count must be at least 1")
        seed = getattr(args, "seed", 0)
        if seed < 0:
            raise UsageError("--seed must be nonnegative")
        prime = getattr(args, "prime", None)
        if prime is not None:
            prime = Prime(prime)
        cache_dir = getattr(args, "cache_dir", None) or os.environ.get(ENV_CACHE_DIR)
        return cls(
            prime=prime,
            radius=radius,
            degree_cap=degree_cap,
            max_len=max_len,
            count=count,
            seed=seed,
            cache_dir=cache_dir,
            out_format=getattr(args, "format", "text"),
        )

    def require_prime(self) -> int:
        if self.prime is None:
            raise UsageError("this command needs -p/--prime")
        return self.prime


def _parse_cli_rational(text, what: str) -> Fraction:
    try:
        return parse_rational(str(text))
    except PadicrootsError:
        raise
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"{what}: cannot parse rational {text!r}") from exc


def _parse_poly(text: str) -> SparsePoly:
    f = SparsePoly.from_text(text)
    if f.is_zero:
        raise UsageError("zero polynomial")
    return f


def _parse_int_list(text: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"{what}: expected comma-separated integers, got {text!r}") from exc


def _emit(cfg: RunConfig, obj, text: str) -> None:
    if cfg.out_format == "json":
        print(json.dumps(obj))
    else:
        print(text)


def _figure_dir(args) -> str | None:
    d = getattr(args, "figures", None)
    if d is None:
        return None
    os.makedirs(d, exist_ok=True)
    return d


def _ord_str(v) -> str:
    return "inf" if isinstance(v, Infinity) else str(v)


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------


def cmd_newton(args) -> int:
    cfg = RunConfig.from_args(args)
    p = cfg.require_prime()
    f = _parse_poly(args.poly)
    hull = newton_polygon(f, p)
    profile = valuation_profile(f, p)
    lines = []
    for a, v in hull.vertices:
        lines.append(f"vertex {a} {format_rational(v)}")
    for _s, _e, slope, width in hull.edges():
        lines.append(f"edge {format_rational(slope)} {width}")
    lines.append(f"zero-multiplicity {profile.zero_multiplicity}")
    for v, m in profile.pairs:
        lines.append(f"valuation {format_rational(v)} {m}")
    _emit(
        cfg,
        {"hull": hull.to_json_obj(), "profile": profile.to_json_obj()},
        "\n".join(lines),
    )
    fig_dir = _figure_dir(args)
    if fig_dir is not None:
        from .figures import hull_figure, save_figure

        save_figure(hull_figure(f, p), os.path.join(fig_dir, "hull.png"))
    return 0


def cmd_valuations(args) -> int:
    cfg = RunConfig.from_args(args)
    p = cfg.require_prime()
    rows = []
    lines = []
    for text in args.values:
        q = _parse_cli_rational(text, "value")
        v = ord_rat(q, p)
        rows.append({"value": format_rational(q), "ord": None if isinstance(v, Infinity) else v})
        lines.append(f"{format_rational(q)} {_ord_str(v)}")
    _emit(cfg, rows, "\n".join(lines))
    return 0


def cmd_disk_count(args) -> int:
    cfg = RunConfig.from_args(args)
    p = cfg.require_prime()
    f = _parse_poly(args.poly)
    n = count_roots_in_disk(f, p, cfg.radius, multiplicities=args.with_multiplicity)
    _emit(
        cfg,
        {"p": p, "r": format_rational(cfg.radius), "count": n},
        f"count {n}",
    )
    return 0


def cmd_zp_count(args) -> int:
    cfg = RunConfig.from_args(args)
    p = cfg.require_prime()
    f = _parse_poly(args.poly)
    n = count_roots_zp(f, p)
    _emit(cfg, {"p": p, "count": n}, f"count {n}")
    return 0


def cmd_qp_count(args) -> int:
    cfg = RunConfig.from_args(args)
    p = cfg.require_prime()
    f = _parse_poly(args.poly)
    n = count_roots_qp(f, p)
    _emit(cfg, {"p": p, "count": n}, f"count {n}")
    return 0


def cmd_tau(args) -> int:
    cfg = RunConfig.from_args(args)
    if cfg.max_len is None:
        raise UsageError("tau needs --max-len")
    f = _parse_poly(args.poly)
    value = tau_of(f, cfg.max_len, cache_dir=cfg.cache_dir)
    _emit(
        cfg,
        {"tau": value, "max_len": cfg.max_len},
        f"tau {'none' if value is None else value}",
    )
    return 0


def cmd_sigma_upper(args) -> int:
    cfg = RunConfig.from_args(args)
    f = _parse_poly(args.poly)
    found = sigma_upper_search(
        f, args.s_max, exp_bound=args.exp_bound, const_bound=args.const_bound
    )
    if found is None:
        _emit(cfg, {"sigma_upper": None, "circuit": None}, "sigma-upper none")
    else:
        s, circuit = found
        _emit(
            cfg,
            {"sigma_upper": s, "circuit": circuit.to_json_obj()},
            f"sigma-upper {s}",
        )
    return 0


def cmd_enumerate(args) -> int:
    cfg = RunConfig.from_args(args)
    if cfg.max_len is None:
        raise UsageError("enumerate needs --max-len")
    catalog = enumerate_slps(
        cfg.max_len,
        degree_cap=cfg.degree_cap,
        cache_dir=cfg.cache_dir,
        refresh=args.refresh,
    )
    prunes = dict(sorted(catalog.prunes.items()))
    lines = [
        f"entries {len(catalog)}",
        f"max-len {catalog.max_len}",
        f"degree-cap {catalog.degree_cap}",
        f"coeff-bit-cap {catalog.coeff_bit_cap}",
    ]
    for kind, n in prunes.items():
        lines.append(f"prune {kind} {n}")
    _emit(
        cfg,
        {
            "entries": len(catalog),
            "max_len": catalog.max_len,
            "degree_cap": catalog.degree_cap,
            "coeff_bit_cap": catalog.coeff_bit_cap,
            "prunes": prunes,
        },
        "\n".join(lines),
    )
    return 0


def _family_spec(args, cfg: RunConfig) -> FamilySpec:
    return FamilySpec(
        kind=args.kind,
        p=cfg.prime,
        s=args.s,
        d=args.d,
        j=args.j,
    )


def cmd_family(args) -> int:
    cfg = RunConfig.from_args(args)
    spec = _family_spec(args, cfg)
    poly, slp = family(spec)
    obj: dict = {"kind": args.kind, "poly": poly.to_text()}
    lines = [f"poly {poly.to_text()}"]
    if slp is not None:
        obj["slp_length"] = len(slp.instructions)
        lines.append(f"slp-length {len(slp.instructions)}")
    if args.analyze:
        if args.kind == "extremal":
            rep = verify_report(extremal_circuit(spec.p, spec.s), spec.p, cfg.radius)
            obj["report"] = rep.to_json_obj()
            lines.append(rep.to_text())
        elif args.kind == "cyclotomic_shift":
            p = cfg.require_prime()
            rep = verify_report(cyclotomic_shift_circuit(spec.d), p, cfg.radius)
            obj["report"] = rep.to_json_obj()
            lines.append(rep.to_text())
        elif args.kind == "logistic":
            zero, one = Fraction(0), Fraction(1)
            closed = sturm_count(poly, Interval(zero, one, True, True))
            opened = sturm_count(poly, Interval(zero, one, False, False))
            obj["sturm_closed"] = closed
            obj["sturm_open"] = opened
            lines.append(f"sturm-closed {closed}")
            lines.append(f"sturm-open {opened}")
        elif args.kind == "shub_smale":
            t = tau_ratio(
                poly,
                len(slp.instructions),
                tau_is_upper_bound=True,
                label=f"shub_smale j={args.j}",
            )
            obj["tau_ratio"] = t.to_json_obj()
            lines.append(f"integral-roots {t.integral_count}")
            lines.append(f"tau-upper {t.tau}")
            exp = "none" if t.implied_exponent is None else repr(t.implied_exponent)
            lines.append(f"implied-exponent {exp}")
    _emit(cfg, obj, "\n".join(lines))
    return 0


def cmd_verify(args) -> int:
    cfg = RunConfig.from_args(args)
    p = cfg.require_prime()
    if cfg.count is None:
        raise UsageError("verify needs --count")
    s_max = args.s
    if s_max < 0:
        raise UsageError("--s must be nonnegative")
    reports = []
    violations = 0
    skipped = 0
    degenerate = 0
    for i in range(cfg.count):
        c = random_circuit(i % (s_max + 1), seed=cfg.seed + i)
        try:
            rep = verify_report(c, p, cfg.radius)
        except DegreeCapExceeded:
            skipped += 1
            if cfg.out_format == "json":
                print(json.dumps({"index": i, "skipped": "degree cap"}))
            else:
                print(f"report {i} skipped degree-cap")
            continue
        reports.append(rep)
        degenerate += 1 if rep.degenerate else 0
        violations += len(rep.violations)
        if cfg.out_format == "json":
            obj = rep.to_json_obj()
            obj["index"] = i
            print(json.dumps(obj))
        else:
            tag = "degenerate" if rep.degenerate else ("ok" if rep.all_pass else "VIOLATION")
            print(f"report {i} s {rep.s} degree {rep.degree} {tag}")
    summary = {
        "count": cfg.count,
        "violations": violations,
        "skipped": skipped,
        "degenerate": degenerate,
    }
    if cfg.out_format == "json":
        print(json.dumps({"summary": summary}))
    else:
        print(
            f"summary count {cfg.count} violations {violations} "
            f"skipped {skipped} degenerate {degenerate}"
        )
    fig_dir = _figure_dir(args)
    if fig_dir is not None and any(not r.degenerate for r in reports):
        from .figures import report_summary_figure, save_figure

        save_figure(
            report_summary_figure(reports), os.path.join(fig_dir, "summary.png")
        )
    if violations:
        raise InternalInvariantError(
            f"{violations} bound violation(s) in the verification stream; "
            "this contradicts the proved inequalities and needs investigation"
        )
    return 0


def cmd_digits(args) -> int:
    cfg = RunConfig.from_args(args)
    p = cfg.require_prime()
    q = _parse_cli_rational(args.value, "value")
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    out = digits(q, p, args.n)
    _emit(
        cfg,
        {"value": format_rational(q), "p": p, "n": args.n, "digits": str(out)},
        str(out),
    )
    return 0


def _exact_bound_value(n: int) -> BoundValue:
    q = Fraction(n)
    return BoundValue(value=n, exact=q, enclosure=(q, q))


def cmd_bounds(args) -> int:
    cfg = RunConfig.from_args(args)
    kind = args.kind
    rows: list[tuple[str, BoundValue]] = []
    if kind in ("all", "np", "qp", "rational", "cx", "cx-chain"):
        if args.s is None:
            raise UsageError("this bound needs --s")
        s = args.s
        if kind in ("all", "np"):
            rows.append(("np", _exact_bound_value(bound_np(s))))
        if kind in ("all", "qp"):
            rows.append(("qp", bound_qp(cfg.require_prime(), s)))
        if kind in ("all", "rational"):
            rows.append(("rational", bound_rational(s)))
        if kind in ("all", "cx"):
            rows.append(("cx", bound_cx(cfg.require_prime(), s, cfg.radius)))
        if kind in ("all", "cx-chain"):
            rows.append(
                ("cx_chain", bound_cx_chain(cfg.require_prime(), s, cfg.radius))
            )
    elif kind == "amd":
        if args.m is None or args.counts is None:
            raise UsageError("amd needs --m and --counts")
        m = _parse_int_list(args.m, "--m")
        counts = _parse_int_list(args.counts, "--counts")
        rows.append(("amd", bound_amd(cfg.require_prime(), m, counts)))
    elif kind == "pcfew":
        if args.m is None or args.sets is None or args.r_vec is None:
            raise UsageError("pcfew needs --m, --sets, and --r-vec")
        m = _parse_int_list(args.m, "--m")
        n_sets = tuple(
            _parse_int_list(chunk, "--sets") for chunk in args.sets.split(";")
        )
        r_vec = tuple(
            _parse_cli_rational(x, "--r-vec") for x in args.r_vec.split(",")
        )
        rows.append(("pcfew", bound_pcfew(cfg.require_prime(), m, n_sets, r_vec)))
    else:
        raise UsageError(f"unknown bound kind {kind!r}")
    obj = [{"key": k, **v.to_json_obj()} for k, v in rows]
    lines = [
        f"{k} {'out-of-domain' if not v.domain_ok else v.value}" for k, v in rows
    ]
    _emit(cfg, obj, "\n".join(lines))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-p", "--prime", type=int, default=None)
    common.add_argument("--radius", default="1", help="disk radius exponent a/b")
    common.add_argument("--degree-cap", type=int, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cache-dir", default=None)
    common.add_argument("--format", choices=("json", "text"), default="text")

    parser = _Parser(prog="padicroots", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("newton", parents=[common])
    sp.add_argument("poly")
    sp.add_argument("--figures", default=None)
    sp.set_defaults(func=cmd_newton)

    sp = sub.add_parser("valuations", parents=[common])
    sp.add_argument("values", nargs="+")
    sp.set_defaults(func=cmd_valuations)

    sp = sub.add_parser("disk-count", parents=[common])
    sp.add_argument("poly")
    sp.add_argument("--with-multiplicity", action="store_true")
    sp.set_defaults(func=cmd_disk_count)

    sp = sub.add_parser("zp-count", parents=[common])
    sp.add_argument("poly")
    sp.set_defaults(func=cmd_zp_count)

    sp = sub.add_parser("qp-count", parents=[common])
    sp.add_argument("poly")
    sp.set_defaults(func=cmd_qp_count)

    sp = sub.add_parser("tau", parents=[common])
    sp.add_argument("poly")
    sp.add_argument("--max-len", type=int, default=None)
    sp.set_defaults(func=cmd_tau)

    sp = sub.add_parser("sigma-upper", parents=[common])
    sp.add_argument("poly")
    sp.add_argument("--s-max", type=int, required=True)
    sp.add_argument("--exp-bound", type=int, default=4)
    sp.add_argument("--const-bound", type=int, default=10)
    sp.set_defaults(func=cmd_sigma_upper)

    sp = sub.add_parser("enumerate", parents=[common])
    sp.add_argument("--max-len", type=int, default=None)
    sp.add_argument("--refresh", action="store_true")
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("family", parents=[common])
    sp.add_argument(
        "kind", choices=("extremal", "cyclotomic_shift", "logistic", "shub_smale")
    )
    sp.add_argument("--s", type=int, default=None)
    sp.add_argument("--d", type=int, default=None)
    sp.add_argument("--j", type=int, default=None)
    sp.add_argument("--analyze", action="store_true")
    sp.set_defaults(func=cmd_family)

    sp = sub.add_parser("verify", parents=[common])
    sp.add_argument("--s", type=int, required=True, help="maximum gate count")
    sp.add_argument("--count", type=int, default=None)
    sp.add_argument("--figures", default=None)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("digits", parents=[common])
    sp.add_argument("value")
    sp.add_argument("--n", type=int, default=10)
    sp.set_defaults(func=cmd_digits)

    sp = sub.add_parser("bounds", parents=[common])
    sp.add_argument(
        "--kind",
        choices=("all", "np", "qp", "rational", "cx", "cx-chain", "amd", "pcfew"),
        default="all",
    )
    sp.add_argument("--s", type=int, default=None)
    sp.add_argument("--m", default=None)
    sp.add_argument("--counts", default=None)
    sp.add_argument("--sets", default=None)
    sp.add_argument("--r-vec", default=None)
    sp.set_defaults(func=cmd_bounds)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    old_cap = None
    try:
        args = parser.parse_args(argv)
        cap = getattr(args, "degree_cap", None)
        if cap is not None:
            if cap < 1:
                raise UsageError("--degree-cap must be at least 1")
            old_cap = set_degree_cap(cap)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DegreeCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InternalInvariantError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    finally:
        if old_cap is not None:
            set_degree_cap(old_cap)


if __name__ == "__main__":
    sys.exit(main())
