"""Sessions, batch runs and the interactive loop."""

from __future__ import annotations

import io
import sys
from typing import Optional, TextIO

from .context import Context, create_context, object_table
from .errors import (
    ParseError, LexError, QuantaError, TraceDisabledError, UnknownHandleError,
)
from .normalizer import EffectChannel, NormalizeResult, normalize
from .parser import parse_program
from .serialize import to_source

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_NORMALIZE = 0, 1, 2, 3

PROMPT = "quanta> "


class Session:
    """A fresh World plus the objects normalized in it.

    Each evaluation is a child of the previous one, so names bound on one
    line stay visible on the next.
    """

    def __init__(self, preludes=(), trace: bool = True, budget: int = 10 ** 6,
                 stream: Optional[TextIO] = None):
        self.world = create_context()
        self.current: Context = self.world
        self.trace = trace
        self.budget = budget
        self.stream = stream
        self.results: dict[str, NormalizeResult] = {}
        self.traced: dict[str, bool] = {}
        self.alive = True
        self.last_handle: Optional[str] = None
        for path in preludes:
            self.load(path)

    @property
    def objects(self):
        return object_table(self.world)

    def evaluate(self, source: str) -> NormalizeResult:
        """Parse and normalize ``source`` as the next object."""
        tree = parse_program(source)
        result = normalize(self.current, tree, budget=self.budget, trace=self.trace,
                           effects=EffectChannel(self.stream))
        self.current = result.context
        self.results[result.handle] = result
        self.traced[result.handle] = self.trace
        self.last_handle = result.handle
        return result

    def load(self, path: str) -> NormalizeResult:
        with open(path, encoding="utf-8") as fh:
            return self.evaluate(fh.read())

    def show(self, handle: str) -> str:
        value = self.objects.get(handle)[1]
        return "%s => %s" % (handle, to_source(value))

    def delete(self, handle: str) -> None:
        self.objects.delete(handle)
        self.results.pop(handle, None)


def show_trace(session: Session, handle: str) -> str:
    """The rewrite log of ``handle``, one step per line."""
    if handle not in session.results:
        raise UnknownHandleError("unknown object reference %s" % handle)
    if not session.traced[handle]:
        raise TraceDisabledError("%s was normalized with tracing off" % handle)
    return session.results[handle].trace_text()


def render_error(exc: Exception) -> str:
    return "error: %s: %s" % (type(exc).__name__, exc)


def _directive(session: Session, line: str) -> str:
    parts = line[1:].split(None, 1)
    if not parts:
        return "error: empty directive"
    cmd, arg = parts[0].lower(), (parts[1].strip() if len(parts) > 1 else "")
    if cmd in ("quit", "q", "exit"):
        session.alive = False
        return ""
    if cmd == "load":
        if not arg:
            return "error: usage :load FILE"
        result = session.load(arg)
        return _display(result)
    if cmd == "trace":
        if arg in ("on", "off"):
            session.trace = arg == "on"
            return "trace %s" % arg
        return show_trace(session, arg or session.last_handle or "")
    if cmd == "delete":
        session.delete(arg)
        return "deleted %s" % arg
    if cmd == "show":
        if arg:
            return session.show(arg)
        return "\n".join(session.show(h) for h in session.objects.entries)
    return "error: unknown directive :%s" % cmd


def _display(result: NormalizeResult) -> str:
    effects = "".join(result.effects)
    return effects + to_source(result.value)


def repl_step(session: Session, line: str) -> str:
    """Evaluate one line or directive; errors are rendered, never raised."""
    line = line.strip()
    if not line:
        return ""
    try:
        if line.startswith(":"):
            return _directive(session, line)
        return _display(session.evaluate(line))
    except (QuantaError, OSError, RecursionError) as exc:
        return render_error(exc)


def run_file(path: str, trace: bool = False, budget: int = 10 ** 6, preludes=(),
             out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    """Normalize a file under a fresh World; print handle and normal form."""
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        with open(path, encoding="utf-8") as fh:
            source = fh.read()
    except OSError as exc:
        err.write("quanta: cannot read %s: %s\n" % (path, exc.strerror or exc))
        return EXIT_USAGE
    try:
        session = Session(preludes, trace=trace, budget=budget, stream=out)
    except OSError as exc:
        err.write("quanta: cannot read prelude: %s\n" % exc)
        return EXIT_USAGE
    except QuantaError as exc:
        err.write("quanta: prelude failed: %s\n" % render_error(exc))
        return EXIT_USAGE
    try:
        result = session.evaluate(source)
    except (ParseError, LexError) as exc:
        err.write("%s: %s\n" % (path, render_error(exc)))
        return EXIT_PARSE
    except QuantaError as exc:
        err.write("%s: %s\n" % (path, render_error(exc)))
        return EXIT_NORMALIZE
    out.write("%s => %s\n" % (result.handle, to_source(result.value)))
    if trace and result.trace:
        out.write(result.trace_text() + "\n")
    return EXIT_OK


def run_lines(lines, preludes=()) -> str:
    """Feed ``lines`` through a fresh session; the transcript as text."""
    session = Session(preludes, stream=None)
    out = io.StringIO()
    for line in lines:
        text = repl_step(session, line)
        if text:
            out.write(text + "\n")
        if not session.alive:
            break
    return out.getvalue()


def interact(session: Session, stdin: Optional[TextIO] = None,
             stdout: Optional[TextIO] = None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    try:
        import readline  # noqa: F401
    except ImportError:
        pass
    tty = stdin.isatty()
    while session.alive:
        if tty:
            try:
                line = input(PROMPT)
            except EOFError:
                break
            except KeyboardInterrupt:
                stdout.write("\n")
                continue
        else:
            line = stdin.readline()
            if not line:
                break
        text = repl_step(session, line)
        if text:
            stdout.write(text + ("" if text.endswith("\n") else "\n"))
            stdout.flush()
    return EXIT_OK
