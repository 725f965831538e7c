import io
import subprocess
import sys

import pytest

from quanta.cli import main
from quanta.shell import Session, repl_step, run_file, run_lines, show_trace
from quanta.errors import TraceDisabledError, UnknownHandleError

from conftest import CORPUS, run


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    old = sys.stdout, sys.stderr
    sys.stdout, sys.stderr = out, err
    try:
        code = main(list(argv))
    finally:
        sys.stdout, sys.stderr = old
    return code, out.getvalue(), err.getvalue()


def test_run_prints_handle_and_normal_form(tmp_path):
    code, out, _ = run_cli("run", write(tmp_path, "a.qta", "2+3"))
    assert (code, out) == (0, "obj:1 => 5\n")


def test_run_with_trace(tmp_path):
    code, out, _ = run_cli("run", "--trace", write(tmp_path, "a.qta", "3+2"))
    assert out.splitlines()[1:] == [
        "RULE SHORTCUT %x + %y == %y + %x AT /: 3 + 2 => 2 + 3",
        "RULE AUTONAME sum AT /: 2 + 3 => 5",
    ]


def test_exit_codes(tmp_path):
    assert run_cli("run", write(tmp_path, "bad.qta", "{<a> == ;}"))[0] == 2
    assert run_cli("run", write(tmp_path, "div.qta", "1/0"))[0] == 3
    assert run_cli("run", str(tmp_path / "missing.qta"))[0] == 1
    assert run_cli("frobnicate")[0] == 1
    assert run_cli("run", "--budget", "0", write(tmp_path, "a.qta", "1"))[0] == 1


def test_parse_error_has_position(tmp_path):
    _, _, err = run_cli("run", write(tmp_path, "bad.qta", "{<a> == ;}"))
    assert "1:9" in err and "ParseError" in err


def test_budget_flag(tmp_path):
    src = "{for x:<ints> :: <f.%x> == <g.%x>; for x:<ints> :: <g.%x> == <f.%x>; <f.1>;}"
    code, _, err = run_cli("run", "--budget", "100", write(tmp_path, "loop.qta", src))
    assert code == 3 and "DivergenceError" in err


def test_prelude(tmp_path):
    prelude = write(tmp_path, "p.qta", "<Base> == 40;")
    code, out, _ = run_cli("run", "--prelude", prelude, write(tmp_path, "a.qta", "Base + 2"))
    assert code == 0 and out.endswith("=> 42\n")


def test_parse_command(tmp_path):
    code, out, _ = run_cli("parse", write(tmp_path, "a.qta", "{a;b}"))
    assert (code, out) == (0, "{a, b}\n")


def test_effects_precede_result(tmp_path):
    _, out, _ = run_cli("run", str(CORPUS / "hello.qta"))
    assert out == "Hello World\nobj:1 => {}\n"


def test_runs_are_deterministic():
    first = run_cli("run", str(CORPUS / "templates.qta"))
    assert run_cli("run", str(CORPUS / "templates.qta")) == first


def test_repl_bindings_persist():
    s = Session()
    assert repl_step(s, "<x>==4;") == "{<x> == 4;}"
    assert repl_step(s, "x+1") == "5"


def test_repl_errors_do_not_end_the_session():
    s = Session()
    assert repl_step(s, "1/0").startswith("error: DivisionByZeroError")
    assert repl_step(s, "{<a> ==").startswith("error: ParseError")
    assert repl_step(s, "2+2") == "4"


def test_repl_directives(tmp_path):
    s = Session()
    repl_step(s, "5")
    assert repl_step(s, ":show obj:1") == "obj:1 => 5"
    assert repl_step(s, ":delete obj:1") == "deleted obj:1"
    assert repl_step(s, ":show obj:1") == "error: UnknownHandleError: unknown object reference obj:1"
    assert repl_step(s, ":load " + write(tmp_path, "a.qta", "2*3")) == "6"
    assert repl_step(s, ":bogus").startswith("error")
    repl_step(s, ":quit")
    assert not s.alive


def test_repl_unknown_system_is_false():
    assert repl_step(Session(), "<OurSystem.EveningStar>==<OurSystem.MorningStar>?") == "false"


def test_show_trace():
    s = Session()
    repl_step(s, "2+3")
    repl_step(s, "3+2")
    repl_step(s, "5")
    assert show_trace(s, "obj:1") == "RULE AUTONAME sum AT /: 2 + 3 => 5"
    assert len(show_trace(s, "obj:2").splitlines()) == 2
    assert show_trace(s, "obj:3") == ""
    with pytest.raises(UnknownHandleError):
        show_trace(s, "obj:99")
    repl_step(s, ":trace off")
    repl_step(s, "1+1")
    with pytest.raises(TraceDisabledError):
        show_trace(s, "obj:4")
    assert repl_step(s, ":trace obj:4").startswith("error: TraceDisabledError")


def test_repl_effects_before_result():
    assert repl_step(Session(), 'writeln("hi")!') == "hi\n{}"


def test_batch_and_repl_agree():
    lines = ["<ints> $: <Age> == 35;", "<Age> == <Age> + 1;", 'writeln("age ", Age)!', "Age * 2"]
    file_result = run("{%s}" % " ".join(l if l.endswith(";") else l + ";" for l in lines))
    s = Session()
    repl_values, repl_effects = [], []
    for line in lines:
        r = s.evaluate(line)
        repl_effects += r.effects
        repl_values += list(r.value.items) if hasattr(r.value, "items") else [r.value]
    assert list(file_result.value.items) == repl_values
    assert file_result.effects == repl_effects


def test_run_lines_transcript():
    assert run_lines(["<y> == 2;", "y * 21", ":quit", "7"]) == "{<y> == 2;}\n42\n"


def test_run_file_function(tmp_path):
    out, err = io.StringIO(), io.StringIO()
    assert run_file(write(tmp_path, "a.qta", "2+3"), out=out, err=err) == 0
    assert out.getvalue() == "obj:1 => 5\n"


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "quanta.cli", "run", write(tmp_path, "a.qta", "6*7")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "obj:1 => 42\n"


def test_interact_reads_piped_lines():
    from quanta.shell import interact

    s = Session()
    out = io.StringIO()
    assert interact(s, io.StringIO("<x>==4;\nx+1\n:quit\n9\n"), out) == 0
    assert out.getvalue() == "{<x> == 4;}\n5\n"
