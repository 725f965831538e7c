import pytest

import quanta as q
from quanta.context import (
    UNBOUND, Context, Value, assert_fact, name_key, object_table, resolve_name,
)
from quanta.errors import AlreadyBoundError, ContradictionError, UnknownHandleError
from quanta.infons import Int, String
from quanta.rules import make_rule

from conftest import nf, run


def name(src):
    return q.parse_program(src)


def test_world_is_preloaded(world):
    assert world.is_world
    assert world.autoname("SUM") is not None
    assert any(r.source == "shortcut" for r in world.rules)


def test_lookup_falls_back_to_parent(world):
    child = Context(world)
    world.bindings[("x",)] = Value(Int(1))
    assert resolve_name(child, name("<x>")) == Int(1)
    child.bindings[("x",)] = Value(Int(2))
    assert resolve_name(child, name("<x>")) == Int(2)
    assert resolve_name(world, name("<x>")) == Int(1)


def test_unbound_names(world):
    assert resolve_name(world, name("<nothing.here>")) is UNBOUND


def test_longest_bound_prefix_then_select(world):
    r = run("{<Top> == {<MyInfon> == Hello;}; <A> == [red, green];}", world)
    ctx = r.context
    assert resolve_name(ctx, name("<Top.MyInfon>")) == String("Hello")
    assert resolve_name(ctx, name("<A.1>")) == String("green")


def test_contradiction_in_same_scope_shadow_in_child(world):
    ctx = Context(world)
    assert_fact(ctx, name("<x> == 1"))
    assert_fact(ctx, name("<x> == 1"))
    with pytest.raises(ContradictionError):
        assert_fact(ctx, name("<x> == 2"))
    child = Context(ctx)
    assert_fact(child, name("<x> == 2"))
    assert resolve_name(child, name("<x>")) == Int(2)
    assert resolve_name(ctx, name("<x>")) == Int(1)


def test_contradiction_through_the_engine():
    with pytest.raises(ContradictionError):
        run("{<x> == 1; <x> == 2;}")


def test_redeclaring_is_idempotent_but_allocating_twice_fails():
    assert nf("{<ints> : <x>; <ints> : <x>;}") == "{<ints> : <x>; <ints> : <x>;}"
    with pytest.raises(AlreadyBoundError):
        run("{<ints> : <x>; (<ints> : <x>)!;}")


def test_frozen_context_refuses_new_names(world):
    ctx = Context(world)
    ctx.bind(("a",), Value(Int(1)))
    ctx.freeze()
    ctx.bind(("a",), Value(Int(1)))
    with pytest.raises(ContradictionError):
        ctx.bind(("b",), Value(Int(1)))


def test_register_shortcut_is_idempotent(world):
    rule = make_rule((), name("<p> == <q>"), "shortcut")
    before = len(world.rules)
    q.register_shortcut(world, rule)
    q.register_shortcut(world, rule)
    assert len(world.rules) == before + 1


def test_names_persist_in_child_objects(world):
    first = run("<x> == 4;", world)
    assert nf("x + 1", first.context) == "5"


def test_handles_unique_and_never_reused(world):
    a = run("1", world).handle
    b = run("2", world).handle
    assert a != b
    q.delete_object(world, a)
    c = run("3", world).handle
    assert c not in (a, b)
    with pytest.raises(UnknownHandleError):
        q.deref_object(world, a)
    with pytest.raises(UnknownHandleError):
        q.delete_object(world, a)
    assert q.deref_object(world, b) == Int(2)


def test_delete_drops_bindings(world):
    r = run("<y> == 9;", world)
    q.delete_object(world, r.handle)
    assert r.context.deleted
    assert resolve_name(r.context, name("<y>")) is UNBOUND


def test_name_keys():
    assert name_key(name("<a.b.3>")) == ("a", "b", "3")
    assert object_table(Context(Context())) is not None
