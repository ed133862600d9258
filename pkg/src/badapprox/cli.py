"""Command-line front end.

Exit codes: 0 success, 2 mathematical rejection, 3 scope violation,
4 unreadable input or bad usage.
"""

import argparse
import hashlib
import logging
import sys
import time

from . import io
from .errors import BadApproxError, ParseError, RejectionError, ScopeError, ZeroHankelError
from .generate import MAX_DEGREE, random_instance
from .grid import DEFAULT_GRID
from .hankel import TRUNCATION_CAP, check_badly_approximable, norm_and_maximizer
from .pipeline import construct_phi, dual_extremal, factorize, reconstruction_residual, verify_dual_extremal
from .symbols import linf_norm

EXIT_OK = 0
EXIT_REJECTED = 2
EXIT_SCOPE = 3
EXIT_PARSE = 4

log = logging.getLogger("badapprox")

LIMITS_NOTE = (
    "Only symbols whose Hankel operator attains its norm are handled; badly approximable "
    "symbols without a maximizing vector cannot be detected from finite truncations."
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


class _Context:
    def __init__(self, args):
        self.args = args
        self.start = time.perf_counter()

    def report(self, command, **fields):
        rep = {"command": command}
        rep.update(fields)
        rep.update(
            grid=self.args.grid,
            tol=self.args.tol,
            truncation_cap=self.args.truncation_cap,
        )
        if self.args.timing:
            rep["duration_seconds"] = time.perf_counter() - self.start
        return rep


def _digest(path):
    try:
        with open(path, "rb") as fh:
            return hashlib.sha256(fh.read()).hexdigest()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from exc


def _load_phi(path):
    phi = io.load_symbol(path)
    if phi.is_zero:
        raise RejectionError("zero symbol")
    return phi


def cmd_norm(ctx):
    a = ctx.args
    phi = _load_phi(a.input)
    sup = linf_norm(phi, a.grid)
    try:
        md = norm_and_maximizer(phi, tol=a.tol, cap=a.truncation_cap)
        hn, trunc, warnings = md.sigma, md.truncation, list(md.warnings)
    except ZeroHankelError:
        hn, trunc, warnings = 0.0, 0, ["P_- Phi = 0"]
    gap = sup - hn
    return EXIT_OK, ctx.report(
        "norm",
        input=a.input,
        input_sha256=_digest(a.input),
        linf_norm=sup,
        hankel_norm=hn,
        gap=gap,
        badly_approximable=bool(gap <= a.tol * sup),
        truncation=trunc,
        warnings=warnings,
    )


def cmd_factorize(ctx):
    a = ctx.args
    phi = _load_phi(a.input)
    digest = _digest(a.input)
    try:
        data = factorize(phi, tol=a.tol, N=a.grid, cap=a.truncation_cap)
    except RejectionError as exc:
        return EXIT_REJECTED, ctx.report(
            "factorize",
            input=a.input,
            input_sha256=digest,
            certified=False,
            error=str(exc),
            gap=getattr(exc, "gap", None),
            residual=getattr(exc, "residual", None),
        )
    invariants = data.invariant_residuals(a.grid)
    rec = reconstruction_residual(phi, data)
    if a.output:
        io.save_data(a.output, data)
    return EXIT_OK, ctx.report(
        "factorize",
        input=a.input,
        input_sha256=digest,
        output=a.output,
        certified=True,
        t=data.t,
        residuals=dict(data.residuals),
        invariants=invariants,
        reconstruction_residual=rec,
        truncation=data.truncation,
        warnings=list(data.warnings),
    )


def cmd_dual(ctx):
    a = ctx.args
    obj = io.load_json(a.input)
    digest = _digest(a.input)
    if io.is_data_file(obj):
        data = io.load_data(a.input)
        phi = construct_phi(data)
    else:
        phi = _load_phi(a.input)
        try:
            data = factorize(phi, tol=a.tol, N=a.grid, cap=a.truncation_cap)
        except RejectionError as exc:
            return EXIT_REJECTED, ctx.report(
                "dual", input=a.input, input_sha256=digest, certified=False, error=str(exc),
                gap=getattr(exc, "gap", None),
            )
    cert = dual_extremal(data, phi, tol=a.tol, N=a.grid)
    if a.output:
        io.save_symbol(a.output, cert.psi)
    if a.certificate:
        io.write_json(a.certificate, io.certificate_to_obj(cert))
    code = EXIT_OK if cert.certified else EXIT_REJECTED
    return code, ctx.report(
        "dual",
        input=a.input,
        input_sha256=digest,
        output=a.output,
        certified=cert.certified,
        pairing=io.complex_pair(cert.pairing),
        dist=cert.dist,
        norm_residual=cert.norm_residual,
        pairing_residual=cert.pairing_residual,
        max_second_singular=cert.max_second_singular,
        truncation=cert.truncation,
    )


def cmd_verify(ctx):
    a = ctx.args
    phi = _load_phi(a.phi)
    psi = io.load_symbol(a.psi)
    cert = verify_dual_extremal(phi, psi, tol=a.tol, N=a.grid, cap=a.truncation_cap)
    code = EXIT_OK if cert.certified else EXIT_REJECTED
    return code, ctx.report(
        "verify",
        phi=a.phi,
        psi=a.psi,
        phi_sha256=_digest(a.phi),
        psi_sha256=_digest(a.psi),
        certified=cert.certified,
        pairing=io.complex_pair(cert.pairing),
        dist=cert.dist,
        norm_residual=cert.norm_residual,
        pairing_residual=cert.pairing_residual,
        max_second_singular=cert.max_second_singular,
        truncation=cert.truncation,
    )


def cmd_generate(ctx):
    a = ctx.args
    if not 1 <= a.degree <= MAX_DEGREE:
        raise ScopeError(f"degree must lie in 1..{MAX_DEGREE}, got {a.degree}")
    data, phi = random_instance(a.seed, a.degree, a.t)
    diag = check_badly_approximable(phi, tol=a.tol, N=a.grid, cap=a.truncation_cap)
    if not diag.verdict:
        raise RejectionError(f"generated symbol failed certification (gap {diag.gap:.3g})")
    payload = {
        "kind": "generated",
        "seed": a.seed,
        "degree": a.degree,
        "t": a.t,
        "data": io.data_to_obj(data),
        "phi": io.symbol_to_obj(phi),
    }
    if a.output:
        io.write_json(a.output, payload)
    if a.phi:
        io.save_symbol(a.phi, phi)
    return EXIT_OK, ctx.report(
        "generate",
        seed=a.seed,
        degree=a.degree,
        t=a.t,
        output=a.output,
        phi=a.phi,
        hankel_norm=diag.hankel_norm,
        linf_norm=diag.linf_norm,
        gap=diag.gap,
        terms=len(phi.terms),
    )


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=int, default=DEFAULT_GRID, help="circle grid size")
    common.add_argument("--tol", type=float, default=1e-8, help="certification tolerance")
    common.add_argument("--truncation-cap", type=int, default=TRUNCATION_CAP,
                        help="largest Hankel truncation")
    common.add_argument("--report", help="also write the run report to this path")
    common.add_argument("--timing", action="store_true", help="include wall-clock duration")

    parser = _Parser(prog="badapprox", description=__doc__.splitlines()[0], epilog=LIMITS_NOTE)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("norm", parents=[common], help="L-infinity and Hankel norms")
    p.add_argument("input")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("factorize", parents=[common], help="thematic factorization")
    p.add_argument("input")
    p.add_argument("-o", "--output", help="factorization data file")
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("dual", parents=[common], help="dual extremal function")
    p.add_argument("input", help="symbol file or factorization data file")
    p.add_argument("-o", "--output", help="Psi symbol file")
    p.add_argument("--certificate", help="certificate file")
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("verify", parents=[common], help="check a dual extremal candidate")
    p.add_argument("phi")
    p.add_argument("psi")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", parents=[common], help="random badly approximable instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("-o", "--output", help="combined data + symbol file")
    p.add_argument("--phi", help="standalone symbol file")
    p.set_defaults(func=cmd_generate)
    return parser


def _emit(report, path):
    text = io.dumps(report) + "\n"
    sys.stdout.write(text)
    if path:
        io.write_json(path, report)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    ctx = _Context(args)
    try:
        code, report = args.func(ctx)
    except ParseError as exc:
        code, report = EXIT_PARSE, ctx.report(args.command, error=str(exc))
    except ScopeError as exc:
        code, report = EXIT_SCOPE, ctx.report(args.command, error=str(exc))
    except BadApproxError as exc:
        code, report = EXIT_REJECTED, ctx.report(args.command, error=str(exc))
    try:
        _emit(report, args.report)
    except ParseError as exc:
        sys.stderr.write(f"badapprox: {exc}\n")
        return EXIT_PARSE
    if "error" in report:
        sys.stderr.write(f"badapprox: {report['error']}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
