"""Command-line front end: ``negmoments <subcommand> [flags]``.

Exit codes: 0 success, 1 bad input (unknown flag, malformed polynomial,
failed check), 2 refused because the family exceeds the resource cap.

Any flag may also come from a ``key=value`` file given with ``--config``
(keys are flag names without dashes, ``-`` or ``_`` alike); flags on the
command line win over the file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass
from decimal import Decimal, InvalidOperation
from pathlib import Path

from . import __version__
from .characters import jacobi_symbol
from .enumeration import KINDS, FamilySpec, family_count, iterate
from .errors import InfeasibleSchedule, ResourceCapError
from .euler import (
    a_const,
    euler_prediction,
    square_sum_oracle,
    square_sum_tail,
    tau_closed_form,
    tau_series_check,
    tau_square_sums,
)
from .fq import MonicPoly, check_q, decode
from .lfunction import (
    DEFAULT_RESOURCE_CAP,
    LPolynomial,
    ShiftSpec,
    check_cap,
    check_functional_equation,
    family_coeffs,
    get_family,
    l_coeffs,
    rh_deviation,
)
from .moments import compare_scan, moment_result
from .sieve import build_schedule, exceptional_fraction, power_identity

FORMAT_VERSION = 1
CACHE_ENV = "NEGMOMENTS_CACHE_DIR"
SCAN_COLUMNS = ["q", "g", "k", "beta", "t", "family_size", "moment", "rhs", "rel_error", "regime"]

log = logging.getLogger("negmoments")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


@dataclass
class RunConfig:
    command: str
    q: int | None = None
    g: int | None = None
    k: float | None = None
    beta: float | None = None
    t: float = 0.0
    eps: float = 0.1
    threads: int = 1
    cache_dir: str | None = None
    out: str | None = None
    format: str = "json"
    resource_cap: int = DEFAULT_RESOURCE_CAP

    def provenance(self) -> dict:
        # thread count never changes results, so it stays out of the record
        d = asdict(self)
        d.pop("threads")
        return d


# ---------------------------------------------------------------------------
# argument parsing


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return v


def parse_grid(text: str) -> list[float]:
    """'a:b:step' -> [a, a+step, ..., b], endpoints inclusive."""
    try:
        a, b, step = (Decimal(p) for p in text.split(":"))
    except (ValueError, InvalidOperation):
        raise argparse.ArgumentTypeError(f"grid must look like a:b:step, got {text!r}") from None
    if step <= 0 or b < a:
        raise argparse.ArgumentTypeError(f"grid needs step > 0 and b >= a, got {text!r}")
    n = int((b - a) / step)
    return [float(a + i * step) for i in range(n + 1)]


def _common(p: argparse.ArgumentParser, *names: str) -> None:
    spec = {
        "q": dict(type=int, help="odd prime field size"),
        "g": dict(type=int, help="genus; the family is H_{2g+1}"),
        "k": dict(type=float, help="moment exponent"),
        "beta": dict(type=float, help="horizontal shift (> 0)"),
        "t": dict(type=float, help="vertical shift"),
        "eps": dict(type=float, help="epsilon used by thresholds and schedules"),
    }
    for n in names:
        p.add_argument(f"--{n}", **spec[n])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="negmoments", description="Quadratic L-functions over F_q[x] and their negative moments.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_text, *common):
        p = sub.add_parser(name, help=help_text)
        _common(p, *common)
        p.add_argument("--config", help="key=value file with default flag values")
        p.add_argument("--threads", type=_positive_int, default=1)
        p.add_argument("--cache-dir", default=os.environ.get(CACHE_ENV))
        p.add_argument("--resource-cap", type=_positive_int, default=DEFAULT_RESOURCE_CAP)
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="json")
        return p

    p = add("enumerate", "list or count a polynomial family", "q")
    p.add_argument("--n", type=int, required=False)
    p.add_argument("--kind", choices=KINDS, default="monic")
    p.add_argument("--count-only", action="store_true")

    p = add("symbol", "Jacobi symbol (f/m)", "q")
    p.add_argument("--f")
    p.add_argument("--m")

    p = add("lpoly", "L-polynomial of one discriminant", "q")
    p.add_argument("--D")
    p.add_argument("--validate", action="store_true", help="sum every coefficient directly")

    p = add("rhcheck", "root check over a whole family", "q", "g")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--validate", action="store_true", help="also check the functional equation independently")

    add("moment", "one exhaustive negative moment", "q", "g", "k", "beta", "t", "eps")

    p = add("scan", "moments over a beta grid", "q", "g", "k", "t", "eps")
    p.add_argument("--beta-grid", type=parse_grid)

    p = add("aconst", "the Euler-product constant A(beta)", "q", "k", "beta")
    p.add_argument("--cutoff", type=int, default=40)

    p = add("sieve", "interval schedule for the prime sums", "q", "g", "k", "beta", "t", "eps")
    p.add_argument("--measure-exceptional", action="store_true")

    p = add("identity", "exact series identities", "q", "k", "beta")
    p.add_argument("--which", choices=("tau", "power", "square"))
    p.add_argument("--maxdeg", type=int, default=6)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--degrees", default="1", help="comma-separated prime degrees (power identity)")
    return parser


def _read_config(path: str) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def parse_args(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError(parser.format_usage() + "negmoments: error: a subcommand is required")
    if not args.config:
        return args
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, raw in _read_config(args.config).items():
        action = actions.get(key)
        if action is None or key in ("help", "config"):
            raise UsageError(f"{args.config}: unknown key {key!r} for {args.command}")
        if action.nargs == 0:
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
            continue
        try:
            value = action.type(raw) if action.type else raw
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"{args.config}: bad value for {key}: {exc}") from None
        if action.choices is not None and value not in action.choices:
            raise UsageError(f"{args.config}: {key} must be one of {list(action.choices)}")
        defaults[key] = value
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError(f"{args.command}: missing required value(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _config(args) -> RunConfig:
    return RunConfig(
        command=args.command,
        q=getattr(args, "q", None),
        g=getattr(args, "g", None),
        k=getattr(args, "k", None),
        beta=getattr(args, "beta", None),
        t=getattr(args, "t", None) or 0.0,
        eps=getattr(args, "eps", None) if getattr(args, "eps", None) is not None else 0.1,
        threads=args.threads,
        cache_dir=args.cache_dir,
        out=args.out,
        format=args.format,
        resource_cap=args.resource_cap,
    )


# ---------------------------------------------------------------------------
# output


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    return x


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        Path(cfg.out).parent.mkdir(parents=True, exist_ok=True)
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def emit_json(cfg: RunConfig, result) -> None:
    doc = {"format_version": FORMAT_VERSION, "config": cfg.provenance(), "result": result}
    _emit(cfg, json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n")


def rows_to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def emit_rows(cfg: RunConfig, rows: list[dict], columns: list[str]) -> None:
    if cfg.format == "csv":
        _emit(cfg, rows_to_csv(rows, columns))
    else:
        emit_json(cfg, rows)


# ---------------------------------------------------------------------------
# subcommands


def cmd_enumerate(args, cfg):
    _require(args, "q", "n")
    spec = FamilySpec(args.q, args.n, args.kind)
    if args.count_only:
        _emit(cfg, f"{family_count(spec)}\n")
        return 0
    if family_count(spec) > cfg.resource_cap:
        raise ResourceCapError(f"family has {family_count(spec)} members, cap is {cfg.resource_cap}")
    _emit(cfg, "".join(f.encode() + "\n" for f in iterate(spec)))
    return 0


def cmd_symbol(args, cfg):
    _require(args, "q", "f", "m")
    check_q(args.q)
    f = decode(args.f, args.q)
    m = MonicPoly.parse(args.m, args.q)
    _emit(cfg, f"{jacobi_symbol(f, m)}\n")
    return 0


def _lpoly_record(L: LPolynomial) -> dict:
    return {"q": L.q, "g": L.g, "coeffs": list(L.coeffs), "functional_equation": check_functional_equation(L)}


def cmd_lpoly(args, cfg):
    _require(args, "q", "D")
    check_q(args.q)
    D = MonicPoly.parse(args.D, args.q)
    L = l_coeffs(D, validate=args.validate)
    rec = {"D": D.encode(), **_lpoly_record(L), "validated": args.validate}
    emit_json(cfg, rec)
    return 0 if rec["functional_equation"] else 1


def cmd_rhcheck(args, cfg):
    _require(args, "q", "g")
    check_q(args.q)
    if args.g < 1:
        raise ValueError("rhcheck needs g >= 1")
    check_cap(args.q, args.g, cfg.resource_cap)
    if args.validate:
        fam = family_coeffs(args.q, args.g, validate=True, threads=cfg.threads, cap=cfg.resource_cap)
    else:
        fam = get_family(args.q, args.g, cfg.cache_dir, cfg.threads, cfg.resource_cap)
    full = fam.full()
    worst, failures, fe_fail = 0.0, [], 0
    for i in range(fam.size):
        L = LPolynomial(args.q, args.g, tuple(int(c) for c in full[i]))
        if args.validate and tuple(int(c) for c in fam.coeffs[i]) != L.coeffs:
            fe_fail += 1
        dev = rh_deviation(L)
        worst = max(worst, dev)
        if dev > args.tol:
            failures.append(fam.poly(i).encode())
    result = {
        "family_size": fam.size,
        "tol": args.tol,
        "max_deviation": worst,
        "failures": len(failures),
        "failing_D": failures[:20],
    }
    if args.validate:
        result["functional_equation_failures"] = fe_fail
    emit_json(cfg, result)
    return 0 if not failures and not fe_fail else 1


def cmd_moment(args, cfg):
    _require(args, "q", "g", "k", "beta")
    check_q(args.q)
    shift = ShiftSpec(args.beta, cfg.t, args.k)
    fam = get_family(args.q, args.g, cfg.cache_dir, cfg.threads, cfg.resource_cap)
    res = moment_result(fam, shift, cfg.eps, cfg.threads)
    if cfg.format == "csv":
        emit_rows(cfg, [res.row()], SCAN_COLUMNS)
    else:
        emit_json(cfg, res.row())
    return 0


def cmd_scan(args, cfg):
    _require(args, "q", "g", "k", "beta_grid")
    check_q(args.q)
    results = compare_scan(
        args.q, args.g, args.k, args.beta_grid, cfg.t, cfg.eps, cfg.threads, cfg.resource_cap, cfg.cache_dir
    )
    emit_rows(cfg, [r.row() for r in results], SCAN_COLUMNS)
    return 0


def cmd_aconst(args, cfg):
    _require(args, "q", "k", "beta")
    A = a_const(args.k, args.beta, args.cutoff, args.q)
    emit_json(cfg, {"value": A.value, "tail_bound": A.tail_bound, "cutoff_degree": A.cutoff_degree})
    return 0


def cmd_sieve(args, cfg):
    _require(args, "q", "g", "k", "beta")
    check_q(args.q)
    sched = build_schedule(args.q, args.g, args.k, args.beta, cfg.eps, cfg.t)
    total, mixed = sched.budget_terms()
    result = {"schedule": sched.to_dict(), "budget": {"sum_ell_N": total, "mixed": mixed, "limit": 2 * args.g}}
    if args.measure_exceptional:
        result["exceptional_fraction"] = exceptional_fraction(args.q, args.g, sched, cfg.threads, cfg.resource_cap)
    emit_json(cfg, result)
    return 0


def cmd_identity(args, cfg):
    _require(args, "q", "which")
    check_q(args.q)
    q = args.q
    if args.which == "tau":
        beta = args.beta or 0.0
        sums = tau_square_sums(q, args.maxdeg)
        coeffs = [{"n": n, "brute": s, "closed": str(tau_closed_form(q, 0, n))} for n, s in enumerate(sums)]
        ok = tau_series_check(q, beta, args.maxdeg)
        emit_json(cfg, {"which": "tau", "beta": beta, "match": ok, "beta0_coefficients": coeffs})
    elif args.which == "power":
        degrees = [int(d) for d in args.degrees.split(",")]
        lhs, rhs = power_identity(q, degrees, args.s)
        ok = lhs == rhs
        emit_json(cfg, {"which": "power", "s": args.s, "degrees": degrees, "lhs": str(lhs), "rhs": str(rhs), "match": ok})
    else:
        _require(args, "k", "beta")
        k = int(args.k)
        oracle = square_sum_oracle(k, args.beta, args.maxdeg, q, cfg.resource_cap)
        pred = euler_prediction(k, args.beta, q)
        allowance = square_sum_tail(k, args.beta, args.maxdeg, q) + pred.tail_bound
        ok = abs(oracle - pred.value) <= allowance
        emit_json(cfg, {"which": "square", "oracle": oracle, "prediction": pred.value, "difference": abs(oracle - pred.value), "allowance": allowance, "match": ok})
    return 0 if ok else 1


COMMANDS = {
    "enumerate": cmd_enumerate,
    "symbol": cmd_symbol,
    "lpoly": cmd_lpoly,
    "rhcheck": cmd_rhcheck,
    "moment": cmd_moment,
    "scan": cmd_scan,
    "aconst": cmd_aconst,
    "sieve": cmd_sieve,
    "identity": cmd_identity,
}


def run(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args = parse_args(argv)
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except ResourceCapError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 2
    except (InfeasibleSchedule, ValueError, TypeError, ZeroDivisionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
