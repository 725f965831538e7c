"""Canonical Quanta surface syntax for any infon.

The output reparses to a structurally equal tree.
"""

from __future__ import annotations

import re

from .infons import (
    Array, Bool, BoolQry, Collection, Command, Complement, Conditional, Contain,
    Difference, For, Identity, Infon, Int, IntRange, Intersection, Match, Name,
    PartialID, SequenceClass, String, Var,
)
from .lexer import KEYWORDS
from .parser import OPERATOR_NAMES

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

# binding strength of each printed form; higher binds tighter
COMMAND, QUERY, CONTAIN, IDENT, COMPARE, RANGE, ADD, MUL, PREFIX, ATOM = range(10)

_OP_LEVEL = {"sum": ADD, "minus": ADD, "product": MUL, "quotient": MUL,
             "gt": COMPARE, "lt": COMPARE, "ge": COMPARE, "le": COMPARE, "eq": COMPARE}


def quote(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ch == "\r":
            out.append("\\r")
        elif ord(ch) < 32 or ord(ch) == 127:
            out.append("\\x%02x" % ord(ch))
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def is_word(s: str) -> bool:
    return bool(_IDENT.match(s)) and s.lower() not in KEYWORDS


def operator_form(i: Infon):
    """(op, left, right) if ``i`` is a name spelled with an infix operator."""
    if (isinstance(i, Name) and len(i.segments) == 2 and not any(i.dollars)
            and isinstance(i.segments[0], String) and not i.segments[0].template
            and i.segments[0].value in _OP_LEVEL
            and isinstance(i.segments[1], Array) and len(i.segments[1].items) == 2
            and not i.segments[1].open):
        left, right = i.segments[1].items
        return i.segments[0].value, left, right
    return None


def level(i: Infon) -> int:
    if isinstance(i, Command):
        return COMMAND
    if isinstance(i, BoolQry):
        return QUERY
    if isinstance(i, Contain):
        return CONTAIN
    if isinstance(i, (Identity, PartialID)):
        return IDENT
    if isinstance(i, (For, Conditional)):
        # prefix forms whose body extends to the right
        return COMMAND
    if isinstance(i, IntRange):
        return RANGE
    op = operator_form(i)
    if op:
        return _OP_LEVEL[op[0]]
    if isinstance(i, Int) and i.value < 0:
        return PREFIX
    if isinstance(i, (Match, SequenceClass, Intersection, Complement)):
        return PREFIX
    return ATOM


def wrap(i: Infon, need: int) -> str:
    text = to_source(i)
    return "(%s)" % text if level(i) < need else text


def segment(i: Infon) -> str:
    if isinstance(i, String) and not i.template:
        return i.value if is_word(i.value) or (_IDENT.match(i.value) and i.bare) else quote(i.value)
    if isinstance(i, Int) and i.value >= 0:
        return str(i.value)
    if isinstance(i, (Array, Name, Var)):
        return to_source(i)
    return "(%s)" % to_source(i)


def to_source(i: Infon) -> str:
    if isinstance(i, Bool):
        return "true" if i.value else "false"
    if isinstance(i, Int):
        return str(i.value)
    if isinstance(i, String):
        if i.template:
            return "$" + quote(i.value)
        if i.bare and is_word(i.value):
            return i.value
        return quote(i.value)
    if isinstance(i, Var):
        return "%" + i.token
    if isinstance(i, Array):
        parts = [to_source(x) for x in i.items]
        if i.open:
            parts.append("...")
        return "[" + ", ".join(parts) + "]"
    if isinstance(i, Collection):
        return _collection(i)
    if isinstance(i, Name):
        op = operator_form(i)
        if op:
            name, left, right = op
            lvl = _OP_LEVEL[name]
            return "%s %s %s" % (wrap(left, lvl), OPERATOR_NAMES[name], wrap(right, lvl + 1))
        segs = [segment(s) + ("$" if d else "") for s, d in zip(i.segments, i.dollars)]
        return "<" + ".".join(segs) + ">"
    if isinstance(i, IntRange):
        text = "%s..%s" % (wrap(i.start, ADD), wrap(i.end, ADD))
        return ("$" if i.seq else "") + text
    if isinstance(i, SequenceClass):
        if isinstance(i.name, Name) and not operator_form(i.name):
            return "$" + to_source(i.name)
        return "$(" + to_source(i.name) + ")"
    if isinstance(i, Difference):
        return "difference(%s, %s)" % (to_source(i.left), to_source(i.right))
    if isinstance(i, Intersection):
        return "intersection " + wrap(i.arg, PREFIX)
    if isinstance(i, Complement):
        return "complement " + wrap(i.arg, PREFIX)
    if isinstance(i, Match):
        return "@" + wrap(i.body, PREFIX)
    if isinstance(i, Identity):
        return "%s == %s" % (wrap(i.left, COMPARE), wrap(i.right, IDENT))
    if isinstance(i, PartialID):
        return "%s ::= %s" % (wrap(i.left, COMPARE), wrap(i.right, IDENT))
    if isinstance(i, Contain):
        op = "$:" if i.seq else ":"
        if i.item is None:
            return "%s %s" % (wrap(i.cls, IDENT), op)
        return "%s %s %s" % (wrap(i.cls, IDENT), op, wrap(i.item, IDENT))
    if isinstance(i, BoolQry):
        return wrap(i.inner, CONTAIN) + "?"
    if isinstance(i, Command):
        return wrap(i.inner, QUERY) + "!"
    if isinstance(i, Conditional):
        text = "if %s, %s" % (wrap(i.cond, CONTAIN) if not isinstance(i.cond, BoolQry)
                              else to_source(i.cond), _body(i.then, else_follows=i.orelse is not None))
        if i.orelse is not None:
            text += " else " + _body(i.orelse)
        return ("$" if i.seq else "") + text
    if isinstance(i, For):
        defs = ", ".join("%s%s: %s" % ("$" if v.seq else "", v.token, wrap(v.range, RANGE))
                         for v in i.vars)
        return "%sfor %s :: %s" % ("$" if i.seq else "", defs, _body(i.body))
    raise TypeError("cannot serialize %r" % (i,))


def _body(i: Infon, else_follows: bool = False) -> str:
    if else_follows and isinstance(i, (Conditional, For)):
        return "(" + to_source(i) + ")"
    return to_source(i)


def _simple(i: Infon) -> bool:
    return level(i) >= PREFIX and not isinstance(i, Collection)


def _collection(c: Collection) -> str:
    parts = []
    for item, flat in zip(c.items, c.flatten):
        text = to_source(item)
        if isinstance(item, (For, Conditional)):
            # a trailing prefix body must not swallow the separator's neighbour
            text = text
        parts.append(("#" if flat else "") + text)
    if c.open:
        parts.append("...")
    prefix = "$" if c.seq else ""
    if not parts:
        return prefix + "{}"
    if all(_simple(x) for x in c.items):
        return prefix + "{" + ", ".join(parts) + "}"
    return prefix + "{" + " ".join(p + ";" for p in parts) + "}"
