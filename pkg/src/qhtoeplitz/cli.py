"""Command-line front end: ``qhtoeplitz <subcommand> [options]``.

Exit status is 0 on success, 1 for domain or parse errors (and for an
inconclusive verification verdict), 2 for internal invariant violations.
Errors are reported on stderr as ``error: <category>: <detail>``.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import commutant, operator, verify
from .mellin import DivergenceError, mellin_eval, mellin_quadrature
from .radial import DomainError, RadialFunction, UnsupportedIntegral, l1_membership, l1_singular_part
from .scalar import format_float, parse_scalar


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _radial_arg(args) -> RadialFunction:
    if args.symbol is not None:
        return RadialFunction.from_text(args.symbol.replace(";", "\n"))
    if args.file is not None:
        return RadialFunction.from_text(Path(args.file).read_text())
    raise UsageError("one of --symbol or --file is required")


def _symbol_file(path: str) -> operator.PolarSymbol:
    return operator.PolarSymbol.from_text(Path(path).read_text())


def _point(text: str):
    s = parse_scalar(text)
    if s.is_rational():
        return Fraction(s.as_fraction())
    return complex(s)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_mellin(args) -> int:
    f = _radial_arg(args)
    z = _point(args.z)
    value = mellin_quadrature(f, z, args.tol) if args.quadrature else mellin_eval(f, z)
    print(value.to_text())
    return 0


def cmd_l1check(args) -> int:
    f = _radial_arg(args)
    ok, norm = l1_membership(f)
    if ok:
        print(f"l1=true norm={format_float(norm)}")
    else:
        obs = " ".join(f"r^{e}" + (f"*ln^{b}r" if b else "") + f":{c.to_text()}"
                       for (e, b), c in l1_singular_part(f).items())
        print(f"l1=false obstruction={obs}")
    return 0


def cmd_apply(args) -> int:
    sym = _symbol_file(args.symbol)
    for degree, coeff in operator.apply(sym, args.n):
        print(f"{degree},{coeff.to_text()}")
    return 0


def cmd_matrix(args) -> int:
    sym = _symbol_file(args.symbol)
    M = (operator.adjoint_matrix if args.adjoint else operator.assemble_matrix)(sym, args.nmax)
    _emit(M.to_csv(), args.out)
    return 0


def cmd_commutator(args) -> int:
    M = operator.commutator(_symbol_file(args.f), _symbol_file(args.g), args.nmax)
    _emit(M.to_csv(), args.out)
    return 0


def cmd_solve(args) -> int:
    text = Path(args.problem).read_text() if args.problem else ""
    problem = commutant.parse_problem(text, n_max=args.nmax)
    result = commutant.solve(problem, args.threads)
    print(result.summary())
    if result.warning:
        print(f"warning: {result.warning}")
    for i, sym in enumerate(result.symbols, 1):
        body = sym.to_text()
        if args.out:
            Path(args.out).mkdir(parents=True, exist_ok=True)
            path = Path(args.out) / f"kernel_{i}.sym"
            path.write_text(body)
            print(f"wrote {path}")
        else:
            print(f"# kernel vector {i}")
            sys.stdout.write(body)
    return 0


_CASES = {
    "functional/N=1": lambda t: [verify.verify_functional_step(1)],
    "functional/N=3": lambda t: [verify.verify_functional_step(3)],
    "functional/N=5": lambda t: [verify.verify_functional_step(5)],
    "odd/N=1": lambda t: [verify.verify_odd_elimination(1, threads=t)],
    "odd/N=3": lambda t: [verify.verify_odd_elimination(3, threads=t)],
    "odd/N=5": lambda t: [verify.verify_odd_elimination(5, threads=t)],
    "even/N=6": lambda t: [verify.verify_even_bound(6, threads=t)],
    "even/N=8": lambda t: [verify.verify_even_bound(8, threads=t)],
    "cascade": lambda t: verify.verify_theorem_cascade(t),
}


def cmd_verify(args) -> int:
    if args.table:
        _emit(verify.table_csv(), args.out)
        return 0
    if args.case:
        if args.case not in _CASES:
            raise UsageError(f"unknown case {args.case!r}; choose from {', '.join(_CASES)}")
        reports = _CASES[args.case](args.threads)
    else:
        reports = verify.all_reports(args.threads)
    text = "\n".join(r.to_text() for r in reports)
    _emit(text, args.out)
    return 1 if any(r.verdict == "inconclusive" for r in reports) else 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qhtoeplitz", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads for assembly (output is unaffected)")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def radial_opts(sp):
        sp.add_argument("--symbol", help="radial terms, one per line or ';'-separated")
        sp.add_argument("--file", help="file in the radial text format")

    sp = sub.add_parser("mellin", help="Mellin transform of a radial function")
    radial_opts(sp)
    sp.add_argument("--z", required=True, help="argument: integer, p/q, decimal or complex")
    sp.add_argument("--quadrature", action="store_true", help="use the quadrature oracle")
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.set_defaults(func=cmd_mellin)

    sp = sub.add_parser("l1check", help="membership in L^1([0,1], r dr)")
    radial_opts(sp)
    sp.set_defaults(func=cmd_l1check)

    sp = sub.add_parser("apply", help="image of z^n as degree,coefficient lines")
    sp.add_argument("--symbol", required=True, help="symbol file")
    sp.add_argument("--n", type=int, required=True)
    sp.set_defaults(func=cmd_apply)

    sp = sub.add_parser("matrix", help="truncated matrix as CSV")
    sp.add_argument("--symbol", required=True, help="symbol file")
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--adjoint", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_matrix)

    sp = sub.add_parser("commutator", help="matrix of T_f T_g - T_g T_f as CSV")
    sp.add_argument("--f", required=True, help="symbol file")
    sp.add_argument("--g", required=True, help="symbol file")
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_commutator)

    sp = sub.add_parser("solve", help="commutant of g within an ansatz")
    sp.add_argument("--problem", help="problem file with [g], [ansatz], [range]")
    sp.add_argument("--nmax", type=int, help="overrides [range] n_max")
    sp.add_argument("--out", help="directory for kernel_<i>.sym files")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("verify", help="proof-step replays and constants table")
    sp.add_argument("--case", help="single case id (default: all)")
    sp.add_argument("--table", action="store_true", help="emit the constants table as CSV")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_verify)
    return p


def _fail(category: str, detail) -> int:
    print(f"error: {category}: {detail}", file=sys.stderr)
    return 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        if args.threads < 1:
            raise UsageError("--threads must be positive")
        return args.func(args)
    except UsageError as e:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        return _fail("usage", e)
    except (OSError, UnicodeDecodeError) as e:
        return _fail("io", e)
    except DivergenceError as e:
        return _fail("divergence", e)
    except DomainError as e:
        return _fail("domain", e)
    except UnsupportedIntegral as e:
        return _fail("unsupported", e)
    except (ValueError, TypeError, ZeroDivisionError) as e:
        return _fail("parse", e)
    except Exception as e:  # invariant violations and bugs
        print(f"error: internal: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
