"""``permred`` command line.

Results go to stdout as ``key value`` lines; explanations go to stderr.
Exit codes: 0 success, 2 input/parse error, 3 budget refusal,
4 verification mismatch.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .boolcirc import delta, parse_boolfunc
from .errors import BudgetError, ParseError, PermredError, RealnessError
from .klm import VARIANTS
from .numerics import DEFAULT_PRECISION, MIN_PRECISION, precision, round_nearest_int
from .permanent import RYSER_MAX_N, parse_matrix_text, per_naive, per_ryser
from .qcirc import STATEVECTOR_MAX_K, amp00
from .reduce import dump_instance, load_instance, recover, recovery_quotient, reduce_trace
from .selftest import run_selftest
from .signsearch import SignOracle, determine_delta

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_MISMATCH = 4

PRECISION_ENV = "PERMRED_PRECISION"


class _Mismatch(Exception):
    pass


def _emit(key, value):
    print(f"{key} {value}")


def _say(args, message):
    if not args.quiet:
        print(message, file=sys.stderr)


def _precision(args) -> int:
    p = args.precision
    if p is None:
        env = os.environ.get(PRECISION_ENV)
        if env:
            try:
                p = int(env)
            except ValueError:
                raise ParseError(f"{PRECISION_ENV}={env!r} is not an integer") from None
    p = DEFAULT_PRECISION if p is None else p
    if p < MIN_PRECISION:
        raise ParseError(f"precision must be at least {MIN_PRECISION} bits, got {p}")
    return p


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _load_bf(path):
    try:
        return parse_boolfunc(_read(path))
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _budget(args):
    if not 1 <= args.max_n <= RYSER_MAX_N:
        raise ParseError(f"--max-n must be in 1..{RYSER_MAX_N}")
    return args.max_n


def _check_n(inst, args):
    limit = _budget(args)
    if inst.N > limit:
        raise BudgetError(f"N={inst.N} exceeds the budget N_max={limit} (2^{inst.N} = {1 << inst.N} Ryser terms)")


# -- subcommands -------------------------------------------------------------


def cmd_compile(args):
    C = _load_bf(args.bf)
    R = reduce_trace(C, args.variant, _precision(args))
    inst = R.instance
    out = Path(args.out) if args.out else Path(args.bf).with_suffix(".pm.json")
    out.write_text(dump_instance(inst), encoding="utf-8")
    for key, val in (("n", inst.n), ("k", inst.k), ("gamma", inst.gamma), ("m", R.L.layout.m),
                     ("N", inst.N), ("b", inst.b), ("variant", inst.variant), ("out", out)):
        _emit(key, val)
    _say(args, f"wrote {inst.N}x{inst.N} instance with {inst.b} fractional bits to {out}")
    return EXIT_OK


def cmd_permanent(args):
    text = _read(args.matrix)
    if text.lstrip().startswith("{"):
        rows = [list(r) for r in load_instance(text).A]
    else:
        rows = parse_matrix_text(text)
    if args.algo == "naive":
        value = per_naive(rows)
    else:
        if len(rows) > _budget(args):
            raise BudgetError(f"N={len(rows)} exceeds the budget N_max={args.max_n} (2^{len(rows)} Ryser terms)")
        value = per_ryser(rows, workers=args.threads)
    _emit("N", len(rows))
    _emit("permanent", value)
    return EXIT_OK


def cmd_recover(args):
    inst = load_instance(_read(args.pm))
    _check_n(inst, args)
    per_A = per_ryser(inst.A, workers=args.threads)
    q = recovery_quotient(inst, per_A)
    d = round_nearest_int(q)
    _emit("N", inst.N)
    _emit("delta", d)
    _say(args, f"rounding error {float(abs(q - d)):.3e}")
    return EXIT_OK


def cmd_verify(args):
    C = _load_bf(args.bf)
    p = _precision(args)
    variants = VARIANTS if args.variant == "both" else (args.variant,)
    brute = delta(C)
    _emit("delta_brute", brute)
    ok = True
    for v in variants:
        R = reduce_trace(C, v, p)
        if R.Q.k > STATEVECTOR_MAX_K:
            raise BudgetError(f"statevector check refuses k={R.Q.k} > {STATEVECTOR_MAX_K}")
        with precision(R.p):
            a = amp00(R.Q) * (1 << C.n)
        amp_value = round_nearest_int(a.real)
        _check_n(R.instance, args)
        perm = recover(R.instance, args.threads)
        agree = brute == amp_value == perm
        ok &= agree
        _emit(f"delta_amp_{v}", amp_value)
        _emit(f"delta_perm_{v}", perm)
        _emit(f"status_{v}", "OK" if agree else "MISMATCH")
    _emit("result", "OK" if ok else "MISMATCH")
    if not ok:
        raise _Mismatch(f"{args.bf}: the three evaluations of delta disagree")
    return EXIT_OK


def cmd_signsearch(args):
    C = _load_bf(args.bf)
    oracle = SignOracle(args.backend, args.variant, _budget(args), args.threads)
    res = determine_delta(oracle, C)
    for k, s in res.probes:
        _emit("probe", f"{k} {s:+d}" if s else f"{k} 0")
    _emit("calls", res.calls)
    _emit("delta", res.delta)
    _say(args, f"Δ_C = {res.delta} after {res.calls} sign queries")
    return EXIT_OK


def cmd_selftest(args):
    results = run_selftest(quick=args.quick, p=_precision(args), corrupt_w=args.corrupt_w)
    for r in results:
        _emit(r.name, "PASS" if r.passed else "FAIL")
        _say(args, f"{r.name}: {r.detail}")
    failed = [r.name for r in results if not r.passed]
    _emit("result", "FAIL" if failed else "PASS")
    if failed:
        raise _Mismatch(f"failed checks: {', '.join(failed)}")
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=None,
                        help=f"working precision in bits (default: ${PRECISION_ENV} or {DEFAULT_PRECISION})")
    common.add_argument("--threads", type=int, default=1, help="worker processes for the Ryser kernel")
    common.add_argument("--max-n", type=int, default=RYSER_MAX_N, dest="max_n",
                        help=f"largest permanent dimension to evaluate (<= {RYSER_MAX_N})")
    common.add_argument("-q", "--quiet", action="store_true", help="suppress stderr commentary")

    parser = argparse.ArgumentParser(prog="permred", description="Boolean functions to integer permanents and back.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", parents=[common], help="emit the .pm.json permanent instance of a .bf file")
    p.add_argument("bf")
    p.add_argument("--variant", choices=VARIANTS, default="w")
    p.add_argument("--out", help="output path (default: input with .pm.json suffix)")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("permanent", parents=[common], help="permanent of a plain matrix file or .pm.json instance")
    p.add_argument("matrix")
    p.add_argument("--algo", choices=("ryser", "naive"), default="ryser")
    p.set_defaults(func=cmd_permanent)

    p = sub.add_parser("recover", parents=[common], help="recover delta from a .pm.json instance")
    p.add_argument("pm")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("verify", parents=[common], help="compare delta by enumeration, amplitude and permanent")
    p.add_argument("bf")
    p.add_argument("--variant", choices=VARIANTS + ("both",), default="both")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("signsearch", parents=[common], help="find delta from sign queries only")
    p.add_argument("bf")
    p.add_argument("--backend", choices=("brute", "permanent"), default="brute")
    p.add_argument("--variant", choices=VARIANTS, default="w")
    p.set_defaults(func=cmd_signsearch)

    p = sub.add_parser("selftest", parents=[common], help="run the built-in invariant checks")
    p.add_argument("--quick", action="store_true", help="smaller random samples, skip the Toffoli check")
    p.add_argument("--corrupt-w", action="store_true", dest="corrupt_w", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"permred: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetError as exc:
        print(f"permred: budget refusal: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (_Mismatch, RealnessError) as exc:
        print(f"permred: verification failed: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except PermredError as exc:
        print(f"permred: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
