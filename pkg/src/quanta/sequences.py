"""Doubly linked sequences, sequence fields and the L-value cursor store."""

from __future__ import annotations

from typing import Iterable, Iterator, Optional

from .errors import QuantaTypeError, SequenceError
from .infons import (
    EMPTY, Array, Collection, Infon, Int, IntRange, String, members, UNKNOWN,
)


class Node:
    __slots__ = ("value", "next", "prev")

    def __init__(self, value: Infon):
        self.value = value
        self.next: Optional[Node] = None
        self.prev: Optional[Node] = None

    def __repr__(self) -> str:
        return "Node(%s)" % (self.value,)


class Sequence:
    """A doubly linked list of infons with first/last/size."""

    def __init__(self, items: Iterable[Infon] = ()):
        self.first: Optional[Node] = None
        self.last: Optional[Node] = None
        self.size = 0
        for x in items:
            self.append(x)

    def append(self, value: Infon) -> Node:
        return self.insert_after(self.last, value)

    def insert_after(self, node: Optional[Node], value: Infon) -> Node:
        new = Node(value)
        if node is None:
            new.next = self.first
            if self.first is not None:
                self.first.prev = new
            self.first = new
        else:
            new.prev = node
            new.next = node.next
            if node.next is not None:
                node.next.prev = new
            node.next = new
        if new.next is None:
            self.last = new
        self.size += 1
        return new

    def nodes(self) -> Iterator[Node]:
        n = self.first
        while n is not None:
            yield n
            n = n.next

    def __iter__(self) -> Iterator[Infon]:
        return (n.value for n in self.nodes())

    def __len__(self) -> int:
        return self.size

    def node_at(self, index: int) -> Node:
        if not 0 <= index < self.size:
            raise SequenceError("index %d out of bounds for size %d" % (index, self.size))
        n = self.first
        for _ in range(index):
            n = n.next
        return n

    def subrange(self, start: int, count: int) -> "Sequence":
        if start < 0 or count < 0 or start + count > self.size:
            raise SequenceError("subrange [%d,%d] out of bounds for size %d"
                                % (start, count, self.size))
        return Sequence(list(self)[start:start + count])

    def to_collection(self) -> Collection:
        return Collection(tuple(self), seq=True)

    def check_links(self) -> None:
        """Assert the structural invariants of the linked list."""
        count = 0
        prev = None
        for n in self.nodes():
            assert n.prev is prev
            prev = n
            count += 1
        assert prev is self.last
        assert count == self.size
        if self.first is not None:
            assert self.first.prev is None
        if self.last is not None:
            assert self.last.next is None


def build_sequence(items: Iterable[Infon], flatten_flags: Optional[Iterable[bool]] = None) -> Sequence:
    """Link ``items`` in order, splicing ``#``-flagged sub-sequences inline."""
    items = list(items)
    flags = list(flatten_flags) if flatten_flags is not None else [False] * len(items)
    seq = Sequence()
    for item, flat in zip(items, flags):
        if not flat:
            seq.append(item)
            continue
        if not is_sequence_like(item):
            raise QuantaTypeError("'#' member of a sequence must itself be a sequence: %s" % (item,))
        for x in as_sequence(item):
            seq.append(x)
    return seq


def is_sequence_like(i: Infon) -> bool:
    if isinstance(i, Collection):
        return i.seq
    if isinstance(i, IntRange):
        return i.seq
    return isinstance(i, (String, Array))


def as_sequence(i) -> Sequence:
    """View an infon (or store) as a Sequence."""
    if isinstance(i, Sequence):
        return i
    if isinstance(i, SeqStore):
        return i.seq
    if isinstance(i, String):
        return string_as_sequence(i)
    if isinstance(i, Collection):
        return build_sequence(i.items, [f and is_sequence_like(x) for x, f in zip(i.items, i.flatten)])
    if isinstance(i, Array):
        return Sequence(i.items)
    if isinstance(i, IntRange):
        ms = members(i)
        if UNKNOWN in ms:
            raise SequenceError("range bounds are not literal: %s" % (i,))
        return Sequence(ms)
    return Sequence([i])


def string_as_sequence(s: String) -> Sequence:
    return Sequence(String(ch) for ch in s.value)


SEQ_FIELDS = ("first", "last", "size")


def seq_node(i, field) -> Optional[Node]:
    seq = as_sequence(i)
    if field == "first":
        return seq.first
    if field == "last":
        return seq.last
    if isinstance(field, int):
        return seq.node_at(field)
    raise SequenceError("no node field %r" % (field,))


def seq_field(i, field) -> Infon:
    """first | last | size | index n | (n, m) subrange, per the sequence fields.

    Strings answer subranges with strings; other sequences with ``${...}``.
    """
    if field == "size":
        return Int(len(as_sequence(i)))
    if isinstance(field, tuple):
        start, count = field
        sub = as_sequence(i).subrange(start, count)
        if isinstance(i, String):
            return String("".join(x.value for x in sub))
        return sub.to_collection()
    node = seq_node(i, field)
    return EMPTY if node is None else node.value


class SeqStore:
    """A named mutable sequence: the element class, its values, an L-value cursor."""

    def __init__(self, cls: Optional[Infon] = None, adapter=None, key=None):
        self.cls = cls
        self.seq = Sequence()
        self.cursor: Optional[Node] = None
        self.adapter = adapter
        self.key = key

    def read(self) -> Infon:
        """R-value: the element last written as an L-value."""
        if self.adapter is not None:
            return self.adapter.read(self.key_text)
        if self.cursor is None:
            raise SequenceError("sequence %s has no current element" % (self.key_text,))
        return self.cursor.value

    def write(self, value: Infon) -> Node:
        """L-value: a fresh node after the cursor; the cursor advances to it."""
        self.cursor = self.seq.insert_after(self.cursor, value)
        return self.cursor

    def write_all(self, values: Iterable[Infon]) -> None:
        for v in values:
            self.write(v)

    def snapshot(self) -> Collection:
        return self.seq.to_collection()

    @property
    def key_text(self) -> str:
        return ".".join(self.key) if self.key else "?"

    def __repr__(self) -> str:
        return "SeqStore(%s, %s)" % (self.key_text, list(self.seq))
