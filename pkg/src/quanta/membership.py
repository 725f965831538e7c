"""Three-valued class membership and the set-theoretic constructors."""

from __future__ import annotations

from .context import UNBOUND, Declared, as_name, name_key, resolve_name
from .errors import EnumerationError
from .infons import (
    Array, Bool, Collection, Complement, Contain, Difference, Identity, Infon, Int,
    IntRange, Intersection, Match, Name, SequenceClass, String, UNKNOWN, members,
)
from .sequences import as_sequence

BUILTIN_CLASSES = ("ints", "numbers", "strings", "chars", "char", "bools")


def builtin_class(cls: Infon):
    if isinstance(cls, Name) and len(cls.segments) == 1 and isinstance(cls.segments[0], String):
        head = cls.segments[0].value.lower()
        if head in BUILTIN_CLASSES:
            return head
    return None


def _kind_test(head: str, item: Infon):
    if head in ("ints", "numbers"):
        return isinstance(item, Int)
    if head == "strings":
        return isinstance(item, String) and not item.template
    if head in ("chars", "char"):
        return isinstance(item, String) and len(item.value) == 1
    if head == "bools":
        return isinstance(item, Bool)
    return False


def _tri_and(values):
    out = True
    for v in values:
        if v is False:
            return False
        if v is UNKNOWN:
            out = UNKNOWN
    return out


def _tri_not(v):
    return UNKNOWN if v is UNKNOWN else (not v)


def is_member(ctx, cls: Infon, item: Infon):
    """True, False or UNKNOWN: is ``item`` a member of ``cls``?"""
    if isinstance(cls, Name) or (isinstance(cls, String) and cls.bare):
        name = as_name(cls)
        for fact in ctx.member_facts(name):
            if fact == item:
                return True
        found = ctx.lookup(name_key(name))
        head = builtin_class(name)
        if head is not None and (found is None or isinstance(found[0], Declared)):
            return _kind_of(head, item)
        value = resolve_name(ctx, name)
        if value is UNBOUND:
            return UNKNOWN
        return is_member(ctx, value, item)
    if isinstance(cls, SequenceClass):
        if isinstance(item, Collection) and item.seq:
            return _tri_and(is_member(ctx, cls.name, x) for x in members(item))
        return False
    if isinstance(cls, IntRange):
        if not isinstance(item, Int):
            return False
        if isinstance(cls.start, Int) and isinstance(cls.end, Int):
            lo, hi = sorted((cls.start.value, cls.end.value))
            return lo <= item.value <= hi
        return UNKNOWN
    if isinstance(cls, (Collection, Array, String)):
        ms = members(cls)
        if any(m == item for m in ms if m is not UNKNOWN):
            return True
        return UNKNOWN if UNKNOWN in ms else False
    if isinstance(cls, Match):
        return _match_member(ctx, cls, item)
    if isinstance(cls, Complement):
        return _tri_not(is_member(ctx, cls.arg, item))
    if isinstance(cls, Difference):
        return _tri_and([is_member(ctx, cls.left, item), _tri_not(is_member(ctx, cls.right, item))])
    if isinstance(cls, Intersection):
        ms = members(cls.arg)
        if UNKNOWN in ms:
            return UNKNOWN
        return _tri_and(is_member(ctx, m, item) for m in ms)
    return UNKNOWN


def _kind_of(head: str, item: Infon):
    if isinstance(item, Collection) and not item.open:
        # <ints> also holds sequences whose members are all integers
        return all(_kind_test(head, m) for m in members(item))
    if isinstance(item, (Name, )):
        return UNKNOWN
    return _kind_test(head, item)


def _match_member(ctx, cls: Match, item: Infon):
    """An item fits a description when every field it names agrees."""
    for fact in ctx.member_facts(cls):
        if fact == item:
            return True
    body = cls.body
    if not (isinstance(item, Collection) and item.scope is not None and isinstance(body, Collection)):
        return UNKNOWN
    verdicts = []
    for stmt in body.items:
        if isinstance(stmt, Contain) and isinstance(stmt.item, Identity):
            stmt = stmt.item
        if isinstance(stmt, Identity):
            name = as_name(stmt.left)
            if name is None:
                continue
            got = resolve_name(item.scope, name)
            if got is UNBOUND:
                verdicts.append(UNKNOWN)
            else:
                verdicts.append(got == stmt.right)
    return _tri_and(verdicts) if verdicts else UNKNOWN


def is_enumerable(i: Infon) -> bool:
    if isinstance(i, (Collection, Array)):
        return UNKNOWN not in members(i)
    if isinstance(i, IntRange):
        return isinstance(i.start, Int) and isinstance(i.end, Int)
    return isinstance(i, String)


def enumerate_members(i: Infon) -> list[Infon]:
    """Listed members of a finite class; intensional classes refuse."""
    if isinstance(i, (Complement, Match, Name)) or not is_enumerable(i):
        raise EnumerationError("cannot enumerate the members of %s" % (i,))
    if isinstance(i, Collection) and i.seq:
        return list(as_sequence(i))
    return [m for m in members(i)]


def eval_set_op(ctx, op: Infon) -> Infon:
    """Eager difference/intersection over enumerable operands; else unchanged."""
    if isinstance(op, Difference):
        if not is_enumerable(op.left):
            return op
        keep = []
        for m in enumerate_members(op.left):
            verdict = is_member(ctx, op.right, m)
            if verdict is UNKNOWN:
                return op
            if not verdict:
                keep.append(m)
        return Collection(tuple(keep))
    if isinstance(op, Intersection):
        if not is_enumerable(op.arg):
            return op
        parts = enumerate_members(op.arg)
        if not parts:
            return Collection()
        if not all(is_enumerable(p) for p in parts):
            return op
        first = enumerate_members(parts[0])
        keep = [m for m in first if all(is_member(ctx, p, m) is True for p in parts[1:])]
        return Collection(tuple(keep))
    return op
