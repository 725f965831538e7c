"""Context hierarchy: scopes, name bindings, asserted facts, shortcuts."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import ContradictionError, SequenceError
from .infons import (
    EMPTY, Array, Collection, Identity, Infon, Int, IntRange, Name, String,
)
from .sequences import (
    Node, SeqStore, is_sequence_like, seq_field, seq_node,
)
from .serialize import to_source


class _Unbound:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "UNBOUND"

    def __bool__(self) -> bool:
        return False


UNBOUND = _Unbound()


@dataclass
class Value:
    value: Infon


@dataclass
class Declared:
    """A name known to exist (and its class) whose value is not yet given."""

    cls: Optional[Infon] = None


@dataclass
class AutonameHandler:
    name: str
    fn: Callable
    effect: str = "pure"  # pure | reads-world | writes-world
    raw_args: bool = False
    arity: Optional[int] = None


def seg_key(seg: Infon) -> str:
    if isinstance(seg, String) and not seg.template:
        return seg.value
    if isinstance(seg, Int):
        return str(seg.value)
    return to_source(seg)


def name_key(name: Name) -> tuple[str, ...]:
    return tuple(seg_key(s) for s in name.segments)


def as_name(i: Infon) -> Optional[Name]:
    """Names, and bare tokens used where a name is expected."""
    if isinstance(i, Name):
        return i
    if isinstance(i, String) and i.bare and not i.template:
        return Name((i,))
    return None


_ctx_ids = itertools.count(1)


class Context:
    """A scope.  Lookups fall back to the parent; World has no parent."""

    def __init__(self, parent: Optional["Context"] = None, label: str = ""):
        self.parent = parent
        self.id = next(_ctx_ids)
        self.label = label or ("World" if parent is None else "ctx%d" % self.id)
        self.bindings: dict[tuple[str, ...], object] = {}
        self.facts: list[Infon] = []
        self.rules: list = []
        self.autonames: dict[str, AutonameHandler] = {}
        self.class_members: dict[str, list[Infon]] = {}
        self.status = "snapshot"
        self.deleted = False

    def __repr__(self) -> str:
        return "<Context %s>" % self.label

    @property
    def is_world(self) -> bool:
        return self.parent is None

    def chain(self):
        c = self
        while c is not None:
            yield c
            c = c.parent

    def lookup(self, key: tuple[str, ...]):
        for c in self.chain():
            b = c.bindings.get(key)
            if b is not None:
                return b, c
        return None

    def lookup_local(self, key: tuple[str, ...]):
        return self.bindings.get(key)

    def bind(self, key: tuple[str, ...], binding) -> None:
        if self.status == "normalized" and key not in self.bindings:
            raise ContradictionError("context %s is frozen" % self.label)
        self.bindings[key] = binding

    def freeze(self) -> None:
        self.status = "normalized"

    def autoname(self, head: str) -> Optional[AutonameHandler]:
        head = head.lower()
        for c in self.chain():
            h = c.autonames.get(head)
            if h is not None:
                return h
        return None

    def all_rules(self):
        for c in self.chain():
            yield from reversed(c.rules)

    def add_member_fact(self, cls: Infon, item: Infon) -> None:
        self.class_members.setdefault(to_source(cls), []).append(item)

    def member_facts(self, cls: Infon):
        key = to_source(cls)
        for c in self.chain():
            yield from c.class_members.get(key, ())


def create_context(parent: Optional[Context] = None) -> Context:
    """A child of ``parent``; with no parent, a World preloaded with builtins."""
    ctx = Context(parent)
    if parent is None:
        from . import builtins

        builtins.install(ctx)
    return ctx


def register_shortcut(ctx: Context, rule) -> None:
    for existing in ctx.rules:
        if existing.lhs == rule.lhs and existing.rhs == rule.rhs and existing.variables == rule.variables:
            return
    ctx.rules.append(rule)


def assert_fact(ctx: Context, stmt: Infon) -> None:
    """Record an already-normalized statement in ``ctx``.

    Raises ContradictionError when a closed identity conflicts with an
    existing one for the same name in the same scope.
    """
    from .infons import Contain

    if isinstance(stmt, Identity):
        name = as_name(stmt.left)
        if name is None:
            ctx.facts.append(stmt)
            return
        key = name_key(name)
        existing = ctx.lookup_local(key)
        if isinstance(existing, SeqStore):
            existing.write(stmt.right)
            return
        if isinstance(existing, Value) and existing.value != stmt.right:
            raise ContradictionError("%s is already %s, cannot also be %s"
                                     % (to_source(name), to_source(existing.value),
                                        to_source(stmt.right)))
        ctx.bind(key, Value(stmt.right))
        ctx.facts.append(stmt)
        return
    if isinstance(stmt, Contain):
        if stmt.item is not None:
            ctx.add_member_fact(stmt.cls, stmt.item)
            name = as_name(stmt.item)
            if name is not None and ctx.lookup_local(name_key(name)) is None:
                ctx.bind(name_key(name), SeqStore(stmt.cls, key=name_key(name)) if stmt.seq
                         else Declared(stmt.cls))
        ctx.facts.append(stmt)
        return
    ctx.facts.append(stmt)


# ----------------------------------------------------------- resolution


def binding_value(binding, whole: bool):
    if isinstance(binding, Value):
        return binding.value
    if isinstance(binding, SeqStore):
        if whole:
            return binding.snapshot()
        return binding.read()
    return UNBOUND


def select(cur, seg: Infon, whole: bool):
    """The member of ``cur`` picked out by one name segment."""
    key = seg_key(seg)
    if isinstance(cur, Node):
        if key == "next":
            return cur.next if cur.next is not None else EMPTY
        if key == "prev":
            return cur.prev if cur.prev is not None else EMPTY
        if key == "value":
            return cur.value
        cur = cur.value
    if isinstance(seg, Int) and isinstance(cur, Collection) and cur.seq:
        # integer segments on a sequence are positions, even if a field is named "3"
        return seq_node(cur, seg.value)
    if isinstance(cur, Collection) and cur.scope is not None:
        b = cur.scope.lookup_local((key,))
        if b is not None:
            return binding_value(b, whole)
    if isinstance(cur, (Collection, Array)):
        for item in cur.items:
            if isinstance(item, Identity):
                n = as_name(item.left)
                if n is not None and len(n.segments) == 1 and seg_key(n.segments[0]) == key:
                    return item.right
    if isinstance(cur, Array) and isinstance(seg, Int):
        if 0 <= seg.value < len(cur.items):
            return cur.items[seg.value]
        raise SequenceError("index %d out of bounds for array of %d" % (seg.value, len(cur.items)))
    if isinstance(cur, (Collection, String, IntRange)) and (is_sequence_like(cur) or isinstance(cur, Collection)):
        if key in ("first", "last"):
            node = seq_node(cur, key)
            return node if node is not None else EMPTY
        if key == "size":
            return seq_field(cur, "size")
        if isinstance(seg, Int):
            return seq_node(cur, seg.value)
        if isinstance(seg, Array) and len(seg.items) == 2 and all(isinstance(x, Int) for x in seg.items):
            return seq_field(cur, (seg.items[0].value, seg.items[1].value))
    return UNBOUND


def deref(v):
    return v.value if isinstance(v, Node) else v


def resolve_name(ctx: Context, name: Name):
    """The referent of ``name`` in ``ctx``, or UNBOUND.

    The longest bound prefix wins; remaining segments select members.
    """
    keys = name_key(name)
    found = None
    for k in range(len(keys), 0, -1):
        found = ctx.lookup(keys[:k])
        if found is not None:
            break
    if found is None:
        return UNBOUND
    binding, _owner = found
    cur = binding_value(binding, name.dollars[k - 1])
    if cur is UNBOUND:
        return UNBOUND
    for seg, dollar in zip(name.segments[k:], name.dollars[k:]):
        cur = select(cur, seg, dollar)
        if cur is UNBOUND:
            return UNBOUND
    return deref(cur)


def lvalue_target(ctx: Context, name: Name):
    """(owning context, key, existing binding or None) for writing ``name``."""
    keys = name_key(name)
    for k in range(len(keys), 0, -1):
        found = ctx.lookup(keys[:k])
        if found is None:
            continue
        binding, owner = found
        if k == len(keys):
            return owner, keys, binding
        cur = binding_value(binding, name.dollars[k - 1]) if not isinstance(binding, Declared) else UNBOUND
        if isinstance(cur, Collection) and cur.scope is not None:
            rest = Name(name.segments[k:], name.dollars[k:])
            return lvalue_target_local(cur.scope, rest)
        break
    return ctx, keys, None


def lvalue_target_local(scope: Context, name: Name):
    keys = name_key(name)
    b = scope.lookup_local(keys)
    if b is None and len(keys) > 1:
        head = scope.lookup_local(keys[:1])
        cur = binding_value(head, name.dollars[0]) if head is not None else UNBOUND
        if isinstance(cur, Collection) and cur.scope is not None:
            return lvalue_target_local(cur.scope, Name(name.segments[1:], name.dollars[1:]))
    return scope, keys, b


# ------------------------------------------------------------- objects


class ObjectTable:
    """Handles for normalized objects; never reused after deletion."""

    def __init__(self):
        self.counter = itertools.count(1)
        self.entries: dict[str, tuple[Context, object]] = {}

    def add(self, ctx: Context, value) -> str:
        handle = "obj:%d" % next(self.counter)
        self.entries[handle] = (ctx, value)
        return handle

    def get(self, handle: str):
        from .errors import UnknownHandleError

        try:
            return self.entries[handle]
        except KeyError:
            raise UnknownHandleError("unknown object reference %s" % handle) from None

    def delete(self, handle: str) -> None:
        ctx, _ = self.get(handle)
        del self.entries[handle]
        ctx.deleted = True
        ctx.bindings.clear()


def world_of(ctx: Context) -> Context:
    while ctx.parent is not None:
        ctx = ctx.parent
    return ctx


def object_table(ctx: Context) -> ObjectTable:
    world = world_of(ctx)
    table = getattr(world, "objects", None)
    if table is None:
        table = world.objects = ObjectTable()
    return table


def register_object(ctx: Context, value) -> str:
    return object_table(ctx).add(ctx, value)


def deref_object(ctx: Context, handle: str):
    """The normal form stored under ``handle``."""
    return object_table(ctx).get(handle)[1]


def delete_object(ctx: Context, handle: str) -> None:
    """Drop the object and its context subtree; a second delete fails."""
    object_table(ctx).delete(handle)
