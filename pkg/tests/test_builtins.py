import gmpy2
import pytest
from hypothesis import given, strategies as st

import quanta as q
from quanta.builtins import MemoryAdapter, arith, compare, register_adapter, render
from quanta.errors import DivisionByZeroError, EffectError, ImmutabilityError
from quanta.infons import Bool, Int

from conftest import nf, run

big = st.integers(-10 ** 30, 10 ** 30)

ORACLE = {
    "sum": lambda a, b: gmpy2.mpz(a) + b,
    "minus": lambda a, b: gmpy2.mpz(a) - b,
    "product": lambda a, b: gmpy2.mpz(a) * b,
    "quotient": lambda a, b: gmpy2.t_div(gmpy2.mpz(a), b),
}


@pytest.mark.parametrize("op", sorted(ORACLE))
@given(a=big, b=big)
def test_arith_matches_oracle(op, a, b):
    if op == "quotient" and b == 0:
        return
    assert arith(op, a, b) == int(ORACLE[op](a, b))


@pytest.mark.parametrize("src, want", [
    ("7/2", 3), ("-7/2", -3), ("7/-2", -3), ("-7/-2", 3), ("1-5", -4),
    ("123456789123456789 * 987654321987654321", 123456789123456789 * 987654321987654321),
])
def test_arith_through_the_engine(src, want):
    assert run(src).value == Int(want)


def test_division_by_zero():
    with pytest.raises(DivisionByZeroError):
        run("5/0")


@given(a=big, b=big)
def test_comparisons(a, b):
    for op, fn in [("gt", gmpy2.mpz.__gt__), ("lt", gmpy2.mpz.__lt__),
                   ("ge", gmpy2.mpz.__ge__), ("le", gmpy2.mpz.__le__)]:
        assert compare(op, a, b) == fn(gmpy2.mpz(a), gmpy2.mpz(b))
    assert compare("eq", a, b) == (a == b)


def test_symbolic_arguments_stay_symbolic():
    assert nf("<u> + 1") == "<u> + 1"


def test_console_output():
    r = run('write(1, " ", {a, b}, "x")!')
    assert r.effects == ["1 {a, b}x"]
    assert run('writeln("Hello World")!').effects == ["Hello World\n"]
    assert render(Int(-4)) == "-4"


def test_set_and_increment():
    assert nf("{<ints> $: <n> == 1; set(n, 5)!; <n>;}").endswith("5;}")
    assert nf("{<ints> $: <n> == 1; increment(n)!; <n>;}").endswith("2;}")
    with pytest.raises(ImmutabilityError):
        run("{<n> == 1; set(n, 5)!;}")


def test_builtin_classes():
    assert run("<strings> : abc?").value == Bool(True)
    assert run("<chars> : abc?").value == Bool(False)
    assert run("<bools> : true?").value == Bool(True)
    assert run("<ints> : {1, 2}?").value == Bool(True)


ADAPTED = """{
  <byte> == 0..255;
  <byte> $: <B>;
  <B> == <Dev.[ReadValue, B]>;
  for x: <byte> :: (<B> == %x!) == <Dev.[ChangeValue, B, %x]>;
  <B> == 10!;
  <B> == 12!;
}"""


def test_adapter_routes_reads_and_writes():
    world = q.create_context()
    dev = MemoryAdapter()
    register_adapter(world, "Dev", dev)
    r = run(ADAPTED, world)
    assert [c for c in dev.calls if c[0] == "write"] == [("write", "B", Int(10)), ("write", "B", Int(12))]
    assert nf("<B>", r.context) == "12"
    assert nf("<B> == 12?", r.context) == "true"


def test_adapter_failure_is_reported():
    world = q.create_context()
    register_adapter(world, "Dev", MemoryAdapter(reject={13}))
    r = run(ADAPTED, world)
    with pytest.raises(EffectError):
        run("<B> == 13!", r.context)


def test_adapter_writes_do_not_happen_in_queries():
    world = q.create_context()
    dev = MemoryAdapter()
    register_adapter(world, "Dev", dev)
    run("<Dev.[ChangeValue, B, 1]>?", world)
    assert dev.calls == []
