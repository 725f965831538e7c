"""Template strings and model-driven parsing/serialization of sequences.

A format model is a sequence collection whose members describe fields:
``<cls>:<name>`` reads one item of class ``cls``; ``<cls>:<name> == lit`` is a
fixed anchor; for-infons repeat; conditionals choose on fields already read;
names of ``@``-classes splice in their own model.
"""

from __future__ import annotations

import logging
from typing import Iterable, Optional

from .context import Context, Value, as_name, resolve_name, seg_key
from .errors import (
    MissingFieldError, ModelParseError, QuantaError, QuantaTypeError, TemplateError,
)
from .infons import (
    BoolQry, Collection, Conditional, Contain, For, Identity, Infon, Int,
    IntRange, Match, String,
)
from .membership import builtin_class, is_member
from .rules import substitute
from .serialize import to_source

log = logging.getLogger(__name__)

# ----------------------------------------------------------------- templates


def _render(i: Infon) -> Optional[str]:
    if isinstance(i, String):
        return i.value
    if isinstance(i, Int):
        return str(i.value)
    if isinstance(i, Collection) and i.scope is not None:
        b = i.scope.lookup_local(("asString",))
        if isinstance(b, Value) and isinstance(b.value, String):
            return b.value.value
    from .normalizer import _closed

    return to_source(i) if _closed(i) else None


def expand_template(ctx: Context, s: String, engine=None, depth: int = 0) -> String:
    """Replace each ``%code%`` span by the rendered normal form of ``code``.

    Spans that fail to render keep their source text and log a warning.
    """
    from .normalizer import Engine
    from .parser import parse_program

    if s.value.count("%") % 2:
        raise TemplateError("unbalanced '%' in template string")
    if engine is None:
        engine = Engine(trace=False)
    parts = s.value.split("%")
    out = []
    for k, part in enumerate(parts):
        if k % 2 == 0:
            out.append(part)
            continue
        if not part.strip():
            out.append("%")
            continue
        try:
            value = engine.norm(parse_program(part), ctx, "query")
            if isinstance(value, String) and value.template and depth < 32:
                value = expand_template(ctx, value, engine, depth + 1)
            text = _render(value)
        except QuantaError as exc:
            log.warning("template span %r failed: %s", part, exc)
            text = None
        if text is None:
            log.warning("template span %r did not render", part)
            text = "%" + part + "%"
        out.append(text)
    return String("".join(out))


# -------------------------------------------------------------- text streams


def encode_stream(items: Iterable[Infon]) -> str:
    """Comma-separated canonical literals: ``HEAD,A,5,a,b``."""
    return ",".join(to_source(x) for x in items)


def decode_stream(text: str) -> list[Infon]:
    from .parser import parse_program

    tree = parse_program(text)
    if isinstance(tree, Collection) and not tree.seq and (tree.items or not text.strip()):
        return list(tree.items)
    return [tree]


# ------------------------------------------------------------------- models


class _Reader:
    def __init__(self, items):
        self.items = list(items)
        self.pos = 0

    def next(self, what: str) -> Infon:
        if self.pos >= len(self.items):
            raise ModelParseError("premature end of input reading %s" % what, self.pos)
        v = self.items[self.pos]
        self.pos += 1
        return v


def _model_body(ctx: Context, m: Infon) -> Optional[Infon]:
    """The model a name or class stands for, if any."""
    name = as_name(m)
    if name is not None and builtin_class(name) is None:
        v = resolve_name(ctx, name)
        if isinstance(v, Match):
            return v.body
        if isinstance(v, Collection) and v.seq:
            return v
    if isinstance(m, Match):
        return m.body
    return None


def _field_name(item: Infon) -> Optional[str]:
    if isinstance(item, Int):
        return str(item.value)
    name = as_name(item)
    if name is not None:
        return ".".join(seg_key(s) for s in name.segments)
    if isinstance(item, String):
        return item.value
    return None


def _coerce(cls: Infon, v: Infon) -> Infon:
    """Read decimal integers (optional leading minus) from text items."""
    if builtin_class(cls) in ("ints", "numbers") and isinstance(v, String):
        text = v.value
        body = text[1:] if text.startswith("-") else text
        if body.isdigit():
            return Int(int(text))
    return v


def _fields_ctx(ctx: Context, fields: dict) -> Context:
    tmp = Context(ctx)
    for k, v in fields.items():
        tmp.bindings[(k,)] = Value(v)
    return tmp


def _bound(ctx: Context, fields: dict, i: Infon, offset: int) -> int:
    if isinstance(i, Int):
        return i.value
    key = _field_name(i)
    if key in fields and isinstance(fields[key], Int):
        return fields[key].value
    name = as_name(i)
    if name is not None:
        v = resolve_name(ctx, name)
        if isinstance(v, Int):
            return v.value
    raise ModelParseError("range bound %s is unresolvable" % to_source(i), offset)


def _range_values(ctx, fields, rng: Infon, offset: int) -> list[int]:
    """Values of a for-range.  An upper bound given by a field is exclusive."""
    if isinstance(rng, IntRange):
        lo = _bound(ctx, fields, rng.start, offset)
        hi = _bound(ctx, fields, rng.end, offset)
        if not isinstance(rng.end, Int):
            return list(range(lo, hi))
        return list(range(lo, hi + 1)) if hi >= lo else list(range(lo, hi - 1, -1))
    raise ModelParseError("unsupported repetition range %s" % to_source(rng), offset)


def _condition(ctx, fields, cond: Infon) -> bool:
    from .normalizer import Engine

    return Engine(trace=False).check(cond.inner if isinstance(cond, BoolQry) else cond,
                                     _fields_ctx(ctx, fields))


def _split_field(item: Infon):
    """(field name, anchor literal or None) of a containment member."""
    if isinstance(item, Identity):
        return _field_name(item.left), item.right
    return _field_name(item), None


def parse_by_model(ctx: Context, model: Infon, stream) -> dict[str, Infon]:
    """Read ``stream`` left to right as described by ``model``; return its fields."""
    if isinstance(stream, str):
        stream = decode_stream(stream)
    reader = _Reader(stream)
    fields: dict[str, Infon] = {}
    _parse(ctx, model, reader, fields)
    if reader.pos != len(reader.items):
        raise ModelParseError("%d unread items after the model ended"
                              % (len(reader.items) - reader.pos), reader.pos)
    return fields


def _parse(ctx, m: Infon, reader: _Reader, fields: dict) -> None:
    if isinstance(m, Collection):
        for item in m.items:
            _parse(ctx, item, reader, fields)
        return
    if isinstance(m, Contain):
        name, anchor = _split_field(m.item) if m.item is not None else (None, None)
        offset = reader.pos
        v = _coerce(m.cls, reader.next(name or to_source(m.cls)))
        if is_member(ctx, m.cls, v) is False:
            raise ModelParseError("%s is not a member of %s" % (to_source(v), to_source(m.cls)),
                                  offset)
        if anchor is not None and v != anchor:
            raise ModelParseError("expected %s, found %s" % (to_source(anchor), to_source(v)),
                                  offset)
        if name is not None:
            fields[name] = v
        return
    if isinstance(m, For):
        for env in _envs(ctx, fields, m, reader.pos):
            _parse(ctx, substitute(m.body, env), reader, fields)
        return
    if isinstance(m, Conditional):
        if _condition(ctx, fields, m.cond):
            _parse(ctx, m.then, reader, fields)
        elif m.orelse is not None:
            _parse(ctx, m.orelse, reader, fields)
        return
    body = _model_body(ctx, m)
    if body is not None:
        _parse(ctx, body, reader, fields)
        return
    offset = reader.pos
    v = reader.next(to_source(m))
    if v != m:
        raise ModelParseError("expected %s, found %s" % (to_source(m), to_source(v)), offset)


def _envs(ctx, fields, f: For, offset: int):
    envs = [{}]
    for vd in f.vars:
        values = _range_values(ctx, fields, vd.range, offset)
        envs = [dict(e, **{vd.token: Int(x)}) for e in envs for x in values]
    return envs


def serialize_by_model(ctx: Context, model: Infon, fields: dict) -> list[Infon]:
    """The item stream that ``parse_by_model`` maps back to ``fields``."""
    out: list[Infon] = []
    _emit(ctx, model, dict(fields), out)
    return out


def _emit(ctx, m: Infon, fields: dict, out: list) -> None:
    if isinstance(m, Collection):
        for item in m.items:
            _emit(ctx, item, fields, out)
        return
    if isinstance(m, Contain):
        name, anchor = _split_field(m.item) if m.item is not None else (None, None)
        if name is not None and name in fields:
            v = fields[name]
        elif anchor is not None:
            v = anchor
            if name is not None:
                fields[name] = v
        else:
            raise MissingFieldError("no value for field %s" % (name or to_source(m.cls)))
        if anchor is not None and v != anchor:
            raise QuantaTypeError("field %s must be %s" % (name, to_source(anchor)))
        if is_member(ctx, m.cls, v) is False:
            raise QuantaTypeError("field %s: %s is not a member of %s"
                                  % (name, to_source(v), to_source(m.cls)))
        out.append(v)
        return
    if isinstance(m, For):
        try:
            envs = _envs(ctx, fields, m, len(out))
        except ModelParseError as exc:
            raise MissingFieldError(str(exc)) from None
        for env in envs:
            _emit(ctx, substitute(m.body, env), fields, out)
        return
    if isinstance(m, Conditional):
        if _condition(ctx, fields, m.cond):
            _emit(ctx, m.then, fields, out)
        elif m.orelse is not None:
            _emit(ctx, m.orelse, fields, out)
        return
    body = _model_body(ctx, m)
    if body is not None:
        _emit(ctx, body, fields, out)
        return
    out.append(m)
