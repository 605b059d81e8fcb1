"""
Command-line front end.

Exit status is 0 on success, 1 for usage, validation and file errors, 2 for
computation errors and 3 when ``compare`` finds a difference. Artifacts go to
stdout or ``--output``; diagnostics go to stderr.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import NoReturn, Optional, Sequence

import mpmath

from .arith import is_odd_prime, make_context
from .ccr import (
    DIRECT_ELLS,
    LINEAR_MAX_ELL,
    compute_ccr_crt,
    compute_ccr_direct,
    compute_ccr_float,
    compute_ccr_linear,
    compute_ccr_series,
    compute_numerators,
)
from .floateval import evaluate_at_q, evaluate_eisenstein
from .polynomials import Kind, WeightedPoly, height_stats, read_polynomial
from .volcano import compute_u_mod_p, read_class_polynomial

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COMPUTATION = 2
EXIT_DIFFERENT = 3

METHODS = ("series", "float", "crt", "linear", "direct", "volcano")
FORMATS = ("text", "json")


class JobConfig:
    """
    Validated parameters of one ``compute`` or ``numerators`` run.

    Parameters
    ----------
    command : str
        ``compute`` or ``numerators``.
    kind : Kind
        U, V or W.
    ell : int
        Odd prime.
    method : str
        One of :data:`METHODS`.
    p : int, optional
        Volcano prime.
    D : int, optional
        Discriminant for the volcano method.
    hd_path : Path, optional
        File holding H_D; the packaged data is used when omitted.
    guard_bits : int, optional
        Guard bits of the float method.
    prec_cap : int, optional
        Largest precision of the float method.
    primes : list of int, optional
        Primes for the crt and direct methods.
    prime_bits : int
        Size of random primes.
    seed : int
        Seed of all random choices.
    fmt : str
        ``text`` or ``json``.
    output : Path, optional
        Output file; stdout when omitted.
    u_path : Path, optional
        U_ell file for ``numerators``.

    """

    def __init__(
            self,
            command: str,
            kind: Kind = Kind.U,
            ell: int = 3,
            method: str = "series",
            p: Optional[int] = None,
            D: Optional[int] = None,
            hd_path: Optional[Path] = None,
            guard_bits: Optional[int] = None,
            prec_cap: Optional[int] = None,
            primes: Optional[list[int]] = None,
            prime_bits: int = 30,
            seed: int = 0,
            fmt: str = "text",
            output: Optional[Path] = None,
            u_path: Optional[Path] = None,
    ) -> None:
        if command not in ("compute", "numerators"):
            raise ValueError(f"'command' must be 'compute' or 'numerators', got {command!r}")
        if not is_odd_prime(ell):
            raise ValueError(f"'ell' must be an odd prime, got {ell}")
        if method not in METHODS:
            raise ValueError(f"'method' must be one of {METHODS}, got {method!r}")
        if fmt not in FORMATS:
            raise ValueError(f"'format' must be one of {FORMATS}, got {fmt!r}")
        if method == "volcano" and (p is None or D is None):
            raise ValueError("the volcano method needs '--p' and '--D'")
        if method != "volcano" and (p is not None or D is not None or hd_path is not None):
            raise ValueError("'--p', '--D' and '--hd' only apply to the volcano method")
        if method == "linear" and ell > LINEAR_MAX_ELL:
            raise ValueError(f"the linear method supports ell <= {LINEAR_MAX_ELL}, got {ell}")
        if method == "direct" and (kind is not Kind.U or ell not in DIRECT_ELLS):
            raise ValueError(f"the direct method computes U_ell for ell in {DIRECT_ELLS}")
        if guard_bits is not None and guard_bits < 0:
            raise ValueError(f"'guard_bits' must be >= 0, got {guard_bits}")
        if prec_cap is not None and prec_cap < 1:
            raise ValueError(f"'prec_cap' must be >= 1, got {prec_cap}")
        if command == "numerators" and method != "series":
            raise ValueError("numerators are computed by the series method only")
        if u_path is not None and command != "numerators":
            raise ValueError("'--u' only applies to numerators")

        self.command = command
        self.kind = Kind(kind)
        self.ell = ell
        self.method = method
        self.p = p
        self.D = D
        self.hd_path = hd_path
        self.guard_bits = guard_bits
        self.prec_cap = prec_cap
        self.primes = primes
        self.prime_bits = prime_bits
        self.seed = seed
        self.fmt = fmt
        self.output = output
        self.u_path = u_path

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "JobConfig":
        return cls(
            args.command,
            kind=getattr(args, "kind", Kind.U),
            ell=args.ell,
            method=getattr(args, "method", "series"),
            p=getattr(args, "p", None),
            D=getattr(args, "D", None),
            hd_path=getattr(args, "hd", None),
            guard_bits=getattr(args, "guard_bits", None),
            prec_cap=getattr(args, "prec_cap", None),
            primes=getattr(args, "primes", None),
            prime_bits=getattr(args, "prime_bits", 30),
            seed=args.seed,
            fmt=args.format,
            output=args.output,
            u_path=getattr(args, "u", None),
        )


# ---------------------------------------------------------------- commands

def _emit(poly: WeightedPoly, fmt: str, output: Optional[Path]) -> None:
    text = poly.to_text() if fmt == "text" else poly.to_json()
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text)
        logger.info("wrote %s to %s", poly.header(), output)


def run_method(config: JobConfig) -> WeightedPoly:
    """The polynomial requested by a ``compute`` configuration."""
    kind, ell = config.kind, config.ell
    if config.method == "series":
        return compute_ccr_series(kind, ell)
    if config.method == "float":
        if config.guard_bits is None:
            return compute_ccr_float(kind, ell, prec_cap=config.prec_cap)
        return compute_ccr_float(kind, ell, guard_bits=config.guard_bits, prec_cap=config.prec_cap)
    if config.method == "crt":
        return compute_ccr_crt(kind, ell, config.primes, config.prime_bits, config.seed)
    if config.method == "linear":
        return compute_ccr_linear(kind, ell)
    if config.method == "direct":
        return compute_ccr_direct(ell, config.primes, config.prime_bits, config.seed)
    class_poly = read_class_polynomial(config.hd_path) if config.hd_path is not None else None
    return compute_u_mod_p(kind, ell, config.D, config.p, class_poly, config.seed)


def cmd_compute(config: JobConfig) -> int:
    _emit(run_method(config), config.fmt, config.output)
    return EXIT_OK


def _suffixed(path: Path, which: str) -> Path:
    return path.with_name(f"{path.stem}_{which}{path.suffix}")


def cmd_numerators(config: JobConfig) -> int:
    u_poly = read_polynomial(config.u_path) if config.u_path is not None else None
    pair = compute_numerators(config.ell, u_poly)
    for which, poly in (("A", pair.n_a), ("B", pair.n_b)):
        _emit(poly, config.fmt, None if config.output is None else _suffixed(config.output, which))
    return EXIT_OK


def parse_point(text: str, ctx: mpmath.MPContext) -> mpmath.mpc:
    """Parse a real or complex number such as ``i``, ``1.2i``, ``0.5+2i`` or ``0.01``."""
    body = text.strip().lower().replace(" ", "")
    if not body.endswith(("i", "j")):
        return ctx.mpf(body.lstrip("+"))
    body = body[:-1]
    split = max((k for k, ch in enumerate(body) if ch in "+-" and k > 0 and body[k - 1] != "e"), default=0)
    real, imag = body[:split], body[split:]
    if imag in ("", "+", "-"):
        imag += "1"
    return ctx.mpc(ctx.mpf(real.lstrip("+")) if real else 0, ctx.mpf(imag.lstrip("+")))


def cmd_eval(args: argparse.Namespace) -> int:
    ctx = make_context(args.prec)
    try:
        if args.tau is not None:
            values = evaluate_eisenstein(parse_point(args.tau, ctx), args.prec)
        else:
            values = evaluate_at_q(parse_point(args.q, ctx), args.prec)
    except (ValueError, TypeError) as err:
        raise ValueError(f"bad evaluation point: {err}") from err
    digits = max(15, int(args.prec * 0.30103))
    for name, value in (("E2", values.e2), ("E4", values.e4), ("E6", values.e6), ("j", values.j)):
        print(f"{name} = {mpmath.nstr(value, digits)}")
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    poly = read_polynomial(args.file)
    stats = height_stats(poly)
    print(poly.header())
    print(f"H = {stats.height:.6f}")
    print(f"H_hat = {stats.relative_height:.6f}")
    print(f"S = {stats.bits}")
    return EXIT_OK


def first_difference(first: WeightedPoly, second: WeightedPoly) -> Optional[str]:
    """Description of the first differing monomial, or None when equal."""
    if (first.kind, first.which, first.ell) != (second.kind, second.which, second.ell):
        return f"headers differ: {first.header()!r} vs {second.header()!r}"
    if first.modulus != second.modulus:
        if first.modulus is None:
            first = first.reduce_mod(second.modulus)
        elif second.modulus is None:
            second = second.reduce_mod(first.modulus)
        else:
            return f"moduli differ: {first.modulus} vs {second.modulus}"
    for mono in sorted(set(first.terms) | set(second.terms), reverse=True):
        a, b = first.coefficient(mono), second.coefficient(mono)
        if a != b:
            return f"monomial {mono}: {a} vs {b}"
    return None


def cmd_compare(args: argparse.Namespace) -> int:
    difference = first_difference(read_polynomial(args.first), read_polynomial(args.second))
    if difference is None:
        print("identical")
        return EXIT_OK
    print(f"different: {difference}")
    return EXIT_DIFFERENT


# ---------------------------------------------------------------- parsing

class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _kind(text: str) -> Kind:
    try:
        return Kind[text.upper()]
    except KeyError as err:
        raise argparse.ArgumentTypeError(f"kind must be U, V or W, got {text!r}") from err


def _primes(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"primes must be comma-separated integers, got {text!r}") from err


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="ccrpoly", description="CCR modular polynomials and isogeny numerators.")
    parser.add_argument("--verbose", "-v", action="store_true", help="log progress to stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    compute = commands.add_parser("compute", help="compute U, V or W")
    compute.add_argument("--kind", type=_kind, default=Kind.U)
    compute.add_argument("--ell", type=int, required=True)
    compute.add_argument("--method", choices=METHODS, default="series")
    compute.add_argument("--p", type=int, help="volcano prime")
    compute.add_argument("--D", type=int, help="discriminant of the volcano crater")
    compute.add_argument("--hd", type=Path, help="class polynomial file (default: packaged data)")
    compute.add_argument("--guard-bits", type=int, help="guard bits of the float method")
    compute.add_argument("--prec-cap", type=int, help="largest precision of the float method")
    compute.add_argument("--primes", type=_primes, help="comma-separated primes for crt/direct")
    compute.add_argument("--prime-bits", type=int, default=30)

    numerators = commands.add_parser("numerators", help="compute N_A and N_B")
    numerators.add_argument("--ell", type=int, required=True)
    numerators.add_argument("--u", type=Path, help="U_ell file (default: computed)")

    for sub in (compute, numerators):
        sub.add_argument("--seed", type=int, default=0)
        sub.add_argument("--format", choices=FORMATS, default="text")
        sub.add_argument("--output", "-o", type=Path)

    evaluate = commands.add_parser("eval", help="evaluate E2, E4, E6 and j")
    point = evaluate.add_mutually_exclusive_group(required=True)
    point.add_argument("--tau", help="point of the upper half plane, e.g. 'i' or '0.5+1.2i'")
    point.add_argument("--q", help="point of the unit disc")
    evaluate.add_argument("--prec", type=int, default=128, help="precision in bits")

    stats = commands.add_parser("stats", help="height statistics of a polynomial file")
    stats.add_argument("file", type=Path)

    compare = commands.add_parser("compare", help="compare two polynomial files")
    compare.add_argument("first", type=Path)
    compare.add_argument("second", type=Path)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(name)s [%(levelname)s] %(message)s",
    )
    try:
        if args.command in ("compute", "numerators"):
            config = JobConfig.from_args(args)
            return cmd_compute(config) if config.command == "compute" else cmd_numerators(config)
        if args.command == "eval":
            if args.prec < 16:
                raise ValueError(f"'prec' must be >= 16, got {args.prec}")
            return cmd_eval(args)
        if args.command == "stats":
            return cmd_stats(args)
        return cmd_compare(args)
    except (ValueError, OSError) as err:
        logger.error("%s", err)
        return EXIT_USAGE
    except ArithmeticError as err:
        logger.error("computation failed: %s", err)
        return EXIT_COMPUTATION


if __name__ == "__main__":
    raise SystemExit(main())
