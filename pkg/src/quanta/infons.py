"""Infon tree nodes, structural equality, membership and bit accounting.

Every node is an immutable dataclass.  Dataclass equality compares kind,
flags, literal payloads and children, and skips the identity tag, so ``==``
is structural equality ("equal, not necessarily identical").  Identity is
tracked by the ``tag`` field, which is assigned fresh on construction and
survives substitution because the same object is reused.
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Iterator, Optional

_tag_lock = threading.Lock()
_tag_counter = itertools.count(1)


def _fresh_tag() -> int:
    with _tag_lock:
        return next(_tag_counter)


class Infon:
    """Base class for all infon kinds."""

    # names of dataclass fields holding child infons (single or tuple)
    _child_fields: tuple[str, ...] = ()

    def children(self) -> tuple["Infon", ...]:
        out: list[Infon] = []
        for name in self._child_fields:
            value = getattr(self, name)
            if value is None:
                continue
            if isinstance(value, tuple):
                out.extend(value)
            else:
                out.append(value)
        return tuple(out)

    def with_children(self, new: tuple["Infon", ...] | list["Infon"]) -> "Infon":
        """Rebuild this node with replacement children (same arity, same order)."""
        it = iter(new)
        updates: dict[str, Any] = {}
        for name in self._child_fields:
            value = getattr(self, name)
            if value is None:
                continue
            if isinstance(value, tuple):
                updates[name] = tuple(next(it) for _ in value)
            else:
                updates[name] = next(it)
        rest = list(it)
        if rest:
            raise ValueError("too many children for %s" % type(self).__name__)
        if all(_same_objs(getattr(self, k), v) for k, v in updates.items()):
            return self
        return replace(self, **updates)

    @property
    def kind(self) -> str:
        return type(self).__name__

    def __str__(self) -> str:
        from .serialize import to_source

        return to_source(self)


def _same_objs(a: Any, b: Any) -> bool:
    if isinstance(a, tuple) and isinstance(b, tuple):
        return len(a) == len(b) and all(x is y for x, y in zip(a, b))
    return a is b


def _tag() -> int:
    return field(default_factory=_fresh_tag, compare=False, repr=False)


# ---------------------------------------------------------------- literals


@dataclass(frozen=True)
class Bool(Infon):
    value: bool
    tag: int = _tag()


@dataclass(frozen=True)
class Int(Infon):
    value: int
    tag: int = _tag()


@dataclass(frozen=True)
class String(Infon):
    value: str
    # ``$"..."`` strings carry %code% spans that expand during normalization
    template: bool = False
    # written as a bare token rather than quoted; presentation only
    bare: bool = field(default=False, compare=False, repr=False)
    tag: int = _tag()


# ------------------------------------------------------------- structures


@dataclass(frozen=True)
class Collection(Infon):
    items: tuple[Infon, ...] = ()
    flatten: tuple[bool, ...] = ()
    seq: bool = False
    open: bool = False
    # scope in which the members were normalized; gives live name lookup
    scope: Any = field(default=None, compare=False, repr=False)
    tag: int = _tag()
    _child_fields = ("items",)

    def __post_init__(self) -> None:
        if len(self.flatten) != len(self.items):
            if self.flatten:
                raise ValueError("flatten flags must match items")
            object.__setattr__(self, "flatten", (False,) * len(self.items))


@dataclass(frozen=True)
class Array(Infon):
    items: tuple[Infon, ...] = ()
    open: bool = False
    tag: int = _tag()
    _child_fields = ("items",)


@dataclass(frozen=True)
class Name(Infon):
    segments: tuple[Infon, ...]
    dollars: tuple[bool, ...] = ()
    tag: int = _tag()
    _child_fields = ("segments",)

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("a name needs at least one segment")
        if len(self.dollars) != len(self.segments):
            if self.dollars:
                raise ValueError("dollar flags must match segments")
            object.__setattr__(self, "dollars", (False,) * len(self.segments))

    @property
    def head(self) -> Optional[str]:
        seg = self.segments[0]
        if isinstance(seg, String):
            return seg.value
        return None


@dataclass(frozen=True)
class Var(Infon):
    token: str
    tag: int = _tag()


@dataclass(frozen=True)
class VarDef:
    token: str
    range: Infon
    seq: bool = False


@dataclass(frozen=True)
class For(Infon):
    vars: tuple[VarDef, ...]
    body: Infon
    seq: bool = False
    tag: int = _tag()
    _child_fields = ("body",)

    def children(self) -> tuple[Infon, ...]:
        return tuple(v.range for v in self.vars) + (self.body,)

    def with_children(self, new):
        new = tuple(new)
        n = len(self.vars)
        vars_ = tuple(VarDef(v.token, r, v.seq) for v, r in zip(self.vars, new[:n]))
        return replace(self, vars=vars_, body=new[n])


@dataclass(frozen=True)
class Identity(Infon):
    left: Infon
    right: Infon
    tag: int = _tag()
    _child_fields = ("left", "right")


@dataclass(frozen=True)
class PartialID(Infon):
    left: Infon
    right: Infon
    tag: int = _tag()
    _child_fields = ("left", "right")


@dataclass(frozen=True)
class Contain(Infon):
    """``Class : Item`` (item optional).  ``seq`` marks the ``$:`` form."""

    cls: Infon
    item: Optional[Infon] = None
    seq: bool = False
    tag: int = _tag()
    _child_fields = ("cls", "item")


@dataclass(frozen=True)
class SequenceClass(Infon):
    name: Infon
    tag: int = _tag()
    _child_fields = ("name",)


@dataclass(frozen=True)
class IntRange(Infon):
    start: Infon
    end: Infon
    seq: bool = False
    tag: int = _tag()
    _child_fields = ("start", "end")


@dataclass(frozen=True)
class Match(Infon):
    body: Infon
    scope: Any = field(default=None, compare=False, repr=False)
    tag: int = _tag()
    _child_fields = ("body",)


@dataclass(frozen=True)
class Conditional(Infon):
    cond: Infon
    then: Infon
    orelse: Optional[Infon] = None
    seq: bool = False
    tag: int = _tag()
    _child_fields = ("cond", "then", "orelse")


@dataclass(frozen=True)
class BoolQry(Infon):
    inner: Infon
    tag: int = _tag()
    _child_fields = ("inner",)


@dataclass(frozen=True)
class Command(Infon):
    inner: Infon
    tag: int = _tag()
    _child_fields = ("inner",)


@dataclass(frozen=True)
class Difference(Infon):
    left: Infon
    right: Infon
    tag: int = _tag()
    _child_fields = ("left", "right")


@dataclass(frozen=True)
class Intersection(Infon):
    arg: Infon
    tag: int = _tag()
    _child_fields = ("arg",)


@dataclass(frozen=True)
class Complement(Infon):
    arg: Infon
    tag: int = _tag()
    _child_fields = ("arg",)


KINDS: tuple[type, ...] = (
    Bool, Int, String, Array, Collection, Name, Var, IntRange, SequenceClass,
    Difference, Intersection, Complement, Match, Identity, PartialID, Contain,
    Conditional, For, BoolQry, Command,
)
_RANK = {k: i for i, k in enumerate(KINDS)}

EMPTY = Collection()
TRUE = Bool(True)
FALSE = Bool(False)


def empty(seq: bool = False) -> Collection:
    return Collection(seq=seq)


def structural_equal(a: Infon, b: Infon) -> bool:
    """Deep equality of kind, flags, payloads and children; identity tags ignored."""
    return a == b


def walk(i: Infon) -> Iterator[Infon]:
    yield i
    for c in i.children():
        yield from walk(c)


def contains_var(i: Infon) -> bool:
    return any(isinstance(n, Var) for n in walk(i))


# ------------------------------------------------------------ ordering


def order_key(i: Infon) -> tuple:
    """Sort key for the canonical total order: kind rank, payload, children."""
    rank = _RANK[type(i)]
    if isinstance(i, Int):
        return (rank, (i.value,))
    if isinstance(i, Bool):
        return (rank, (int(i.value),))
    if isinstance(i, String):
        return (rank, (i.value, int(i.template)))
    if isinstance(i, Var):
        return (rank, (i.token,))
    flags: tuple = ()
    if isinstance(i, Collection):
        flags = (int(i.seq), int(i.open)) + tuple(int(f) for f in i.flatten)
    elif isinstance(i, Name):
        flags = tuple(int(d) for d in i.dollars)
    elif isinstance(i, (Array,)):
        flags = (int(i.open),)
    elif isinstance(i, (IntRange, Conditional, Contain)):
        flags = (int(i.seq), int(getattr(i, "orelse", 0) is not None),
                 int(getattr(i, "item", 0) is not None))
    elif isinstance(i, For):
        flags = (int(i.seq),) + tuple((v.token, int(v.seq)) for v in i.vars)
    kids = tuple(order_key(c) for c in i.children())
    return (rank, (len(kids), flags, kids))


def canonical_order(items) -> list[Infon]:
    """Deterministic total ordering used as the sortedness criterion."""
    return sorted(items, key=order_key)


def unordered(i: Infon) -> Infon:
    """``i`` with the members of every non-sequence collection in canonical order.

    Two infons describe the same information when their unordered forms are equal.
    """
    kids = i.children()
    if not kids:
        return i
    if isinstance(i, Collection) and not i.seq:
        pairs = sorted(zip((unordered(k) for k in i.items), i.flatten),
                       key=lambda p: (order_key(p[0]), p[1]))
        return replace(i, items=tuple(p[0] for p in pairs), flatten=tuple(p[1] for p in pairs))
    return i.with_children(tuple(unordered(k) for k in kids))


def is_sorted(items) -> bool:
    keys = [order_key(x) for x in items]
    return all(a <= b for a, b in zip(keys, keys[1:]))


# ----------------------------------------------------------- membership


class _Unknown:
    """Marker for membership that cannot be decided exhaustively."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "UNKNOWN"

    def __bool__(self) -> bool:
        raise TypeError("UNKNOWN has no truth value")


UNKNOWN = _Unknown()


def members(i: Infon, ctx=None) -> list:
    """Known members of ``i``.  Open collections append the UNKNOWN marker.

    ``#``-flagged entries contribute their own members, recursively.
    """
    if isinstance(i, Collection):
        out: list = []
        for item, flat in zip(i.items, i.flatten):
            if flat:
                sub = members(item, ctx)
                out.extend(x for x in sub if x is not UNKNOWN)
                if any(x is UNKNOWN for x in sub):
                    out.append(UNKNOWN)
            else:
                out.append(item)
        if i.open and UNKNOWN not in out:
            out.append(UNKNOWN)
        return _dedupe_unknown(out)
    if isinstance(i, Array):
        return list(i.items) + ([UNKNOWN] if i.open else [])
    if isinstance(i, String):
        return [String(ch) for ch in i.value]
    if isinstance(i, IntRange) and isinstance(i.start, Int) and isinstance(i.end, Int):
        a, b = i.start.value, i.end.value
        step = 1 if b >= a else -1
        if not i.seq and step < 0:
            a, b, step = b, a, 1
        return [Int(v) for v in range(a, b + step, step)]
    return [UNKNOWN]


def _dedupe_unknown(out: list) -> list:
    seen = False
    res = []
    for x in out:
        if x is UNKNOWN:
            if seen:
                continue
            seen = True
        res.append(x)
    if seen and res[-1] is not UNKNOWN:
        res = [x for x in res if x is not UNKNOWN] + [UNKNOWN]
    return res


def check_acyclic(i: Infon) -> None:
    """Raise ValueError if some node is (transitively) its own member."""
    stack: set[int] = set()

    def visit(n: Infon) -> None:
        key = id(n)
        if key in stack:
            raise ValueError("infon membership cannot be circular")
        stack.add(key)
        for c in n.children():
            visit(c)
        stack.discard(key)

    visit(i)


# ------------------------------------------------------------- measure


@dataclass(frozen=True)
class InfoMeasure:
    bits: Fraction | float
    states: Optional[int] = None

    @classmethod
    def from_states(cls, states: int) -> "InfoMeasure":
        if states < 1:
            raise ValueError("a system has at least one state")
        if states & (states - 1) == 0:
            return cls(Fraction(states.bit_length() - 1), states)
        return cls(math.log2(states), states)

    @classmethod
    def from_bits(cls, bits) -> "InfoMeasure":
        bits = Fraction(bits)
        if bits.denominator == 1:
            return cls(bits, 2 ** int(bits))
        return cls(bits, None)

    def __add__(self, other: "InfoMeasure") -> "InfoMeasure":
        states = None
        if self.states is not None and other.states is not None:
            states = self.states * other.states
        bits = self.bits + other.bits
        if isinstance(bits, float) and states is not None and states & (states - 1) == 0:
            bits = Fraction(states.bit_length() - 1)
        return InfoMeasure(bits, states)


BOOL_CLASS_NAMES = ("bools",)


def info_measure(i: Infon, declared: Optional[dict] = None) -> Optional[InfoMeasure]:
    """Bits/states of ``i``, or None where no finite measure is defined.

    ``declared`` may map identity tags to explicit state counts.
    Shared members (same identity tag) are counted once.
    """
    return _measure(i, declared or {}, set())


def _measure(i: Infon, declared: dict, seen: set) -> Optional[InfoMeasure]:
    if i.tag in declared:
        return InfoMeasure.from_states(declared[i.tag])
    if isinstance(i, IntRange):
        if isinstance(i.start, Int) and isinstance(i.end, Int):
            return InfoMeasure.from_states(abs(i.end.value - i.start.value) + 1)
        return None
    if isinstance(i, Name) and len(i.segments) == 1 and i.head in BOOL_CLASS_NAMES:
        return InfoMeasure.from_states(2)
    if isinstance(i, (Identity, PartialID)):
        return _measure(i.right, declared, seen)
    if isinstance(i, Contain) and i.item is not None:
        return _measure(i.item if not isinstance(i.item, Name) else i.cls, declared, seen)
    if isinstance(i, Collection):
        if i.open:
            return None
        total = InfoMeasure(Fraction(0), 1)
        for m in members(i):
            target = m.right if isinstance(m, (Identity, PartialID)) else m
            if target.tag in seen:
                continue
            seen.add(target.tag)
            part = _measure(m, declared, seen)
            if part is None:
                return None
            total = total + part
        return total
    return None


__all__ = [name for name in dir() if not name.startswith("_")]
