"""Command line entry point: ``quanta run|repl|parse``."""

from __future__ import annotations

import argparse
import os
import sys

from .errors import LexError, ParseError, QuantaError
from .parser import parse_program
from .serialize import to_source
from .shell import EXIT_OK, EXIT_PARSE, EXIT_USAGE, Session, interact, render_error, run_file


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quanta", description="Normalize Quanta programs.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="normalize a .qta file and print its normal form")
    run.add_argument("file")
    run.add_argument("--trace", action="store_true", help="print the rewrite trace")
    run.add_argument("--budget", type=int, default=10 ** 6, metavar="N",
                     help="step budget before giving up (default 1000000)")
    run.add_argument("--prelude", action="append", default=[], metavar="FILE")

    repl = sub.add_parser("repl", help="interactive shell")
    repl.add_argument("--prelude", action="append", default=[], metavar="FILE")

    parse = sub.add_parser("parse", help="print the canonical form of a file")
    parse.add_argument("file")
    return p


def _parse_cmd(path: str) -> int:
    try:
        with open(path, encoding="utf-8") as fh:
            tree = parse_program(fh.read())
    except OSError as exc:
        sys.stderr.write("quanta: cannot read %s: %s\n" % (path, exc.strerror or exc))
        return EXIT_USAGE
    except (ParseError, LexError) as exc:
        sys.stderr.write("%s: %s\n" % (path, render_error(exc)))
        return EXIT_PARSE
    print(to_source(tree))
    return EXIT_OK


def main(argv=None) -> int:
    try:
        return _main(argv)
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head)
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return EXIT_OK


def _main(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage; 2 is reserved for parse errors here
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.command == "run":
        if args.budget <= 0:
            sys.stderr.write("quanta: --budget must be positive\n")
            return EXIT_USAGE
        return run_file(args.file, trace=args.trace, budget=args.budget, preludes=args.prelude)
    if args.command == "repl":
        try:
            session = Session(args.prelude)
        except OSError as exc:
            sys.stderr.write("quanta: cannot read prelude: %s\n" % exc)
            return EXIT_USAGE
        except QuantaError as exc:
            sys.stderr.write("quanta: prelude failed: %s\n" % render_error(exc))
            return EXIT_USAGE
        return interact(session)
    return _parse_cmd(args.file)


if __name__ == "__main__":
    sys.exit(main())
