import random

import pytest

import quanta as q
from quanta.errors import (
    ContradictionError, DivergenceError, ImmutabilityError, QuantaTypeError,
    UnrealizableCommandError,
)
from quanta.infons import Bool, Int
from quanta.normalizer import QUERY, EffectChannel, Engine, replay

from conftest import corpus_files, nf, run

LOOP = "{for x:<ints> :: <f.%x> == <g.%x>; for x:<ints> :: <g.%x> == <f.%x>; <f.1>;}"


def test_literals_are_already_normal():
    r = run("5")
    assert r.value == Int(5) and r.trace == []


def test_shortcut_fires_before_autoname():
    r = run("7*0")
    assert r.value == Int(0)
    assert r.trace_text() == "RULE SHORTCUT %x * 0 == 0 AT /: 7 * 0 => 0"


def test_commutativity_only_sorts_once():
    r = run("3+2")
    assert r.trace_text().splitlines() == [
        "RULE SHORTCUT %x + %y == %y + %x AT /: 3 + 2 => 2 + 3",
        "RULE AUTONAME sum AT /: 2 + 3 => 5",
    ]
    assert [s.rule for s in run("2+3").trace] == ["AUTONAME sum"]


def test_user_rule_over_infinite_range():
    r = run("{for x: <ints> :: <dbl.%x> == %x * 2; <dbl.21>;}")
    assert r.value.items[-1] == Int(42)
    assert r.trace[0].text().startswith("RULE AXIOM <dbl.%x> == %x * 2 AT /1:")


def test_range_guard_blocks_non_members():
    assert nf("{for x: <ints> :: <dbl.%x> == %x * 2; <dbl.abc>;}").endswith("<dbl.abc>;}")


def test_for_over_finite_range_expands():
    assert nf("for x: 1..3 :: %x * 2") == "{2, 4, 6}"


def test_divergence_reports_recent_rules():
    with pytest.raises(DivergenceError) as exc:
        run(LOOP, budget=300)
    assert any("<f.%x> == <g.%x>" in r for r in exc.value.last_rules)


def test_conditionals():
    assert nf("#if (2 gt 1)? yes else no") == "{#yes}"
    assert nf("#if (2 lt 1)? yes else no") == "{#no}"


@pytest.mark.parametrize("src, want", [
    ("2+2?", True), ("3 gt 2?", True), ("(<a> == 1)?", False), ("{a,b} == {a,b}?", True),
    ('"abc" eq "abc"?', True), ("<ints> : a?", False), ("<ints> : 7?", True),
    ("5..10 : 7?", True), ("(complement {a}) : b?", True),
])
def test_queries_answer_bools(src, want):
    assert run(src).value == Bool(want)


def test_queries_have_no_effects():
    r = run('writeln("q")?')
    assert r.effects == [] and r.value == Bool(False)


def test_query_mode_check_direct():
    eng = Engine(trace=False)
    ctx = q.create_context()
    assert eng.check(q.parse_program("2+2 == 4"), ctx) is True
    assert eng.norm(q.parse_program("writeln(x)"), ctx, QUERY) == q.parse_program("writeln(x)")


def test_command_errors():
    with pytest.raises(ImmutabilityError):
        run("{<x> == 1; <x> == 2!;}")
    with pytest.raises(UnrealizableCommandError):
        run("<zz> == 3!")
    with pytest.raises(QuantaTypeError):
        run("{<ints> $: <x>; <x> == a!;}")


def test_assert_contradiction():
    with pytest.raises(ContradictionError):
        run("{<A> == 5; <A> == 6;}")


def test_mutable_names_accumulate():
    r = run("{<ints> $: <Bobs_Age> == 1; <Bobs_Age> == <Bobs_Age> + 1;}")
    assert q.to_source(r.value) == "${<ints> $: <Bobs_Age> == 1; <Bobs_Age> == 2;}"


def test_templates_expand():
    assert nf('{<n> == 3; $"n is %n%";}') == '{<n> == 3; "n is 3";}'


def test_reverse_mode_still_terminates():
    assert run("3+2", reverse=True).value == Int(5)


def test_trace_off_records_nothing():
    assert run("3+2", trace=False).trace == []


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.stem)
def test_corpus_replay(path):
    tree = q.parse_program(path.read_text())
    r = run(path.read_text())
    assert replay(tree, r.trace) == r.value


@pytest.mark.parametrize("path", corpus_files(), ids=lambda p: p.stem)
def test_corpus_fixed_point(path):
    world = q.create_context()
    r = run(path.read_text(), world)
    again = q.normalize(world, r.value, effects=EffectChannel(None))
    assert again.value == r.value


def test_random_site_order_is_confluent():
    rnd = random.Random(7)
    for _ in range(50):
        a, b, c = (rnd.randint(0, 99) for _ in range(3))
        src = "(%d + %d) * (%d - %d) + %d * 0" % (a, b, c, a, b)
        base = run(src).value
        assert all(run(src, seed=s).value == base for s in range(5))
