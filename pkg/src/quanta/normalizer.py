"""Normalization by directed substitution of identicals.

The engine works innermost first: children are normalized before any rule
is tried at their parent.  At a name site the order is shortcuts, then
autonames, then user rules, then plain name bindings.  Statement forms
(identities, containment, commands, for-infons) act on the context and
are logged as a single trace step.
"""

from __future__ import annotations

import logging
import random
import sys
from dataclasses import dataclass, field
from typing import Optional

from . import context as cx
from .context import (
    UNBOUND, Context, Declared, Value, as_name, lvalue_target, name_key,
    resolve_name,
)
from .errors import (
    AlreadyBoundError, ContradictionError, DivergenceError, EffectError,
    ImmutabilityError, NormalizeError, QuantaTypeError, UnknownClassError,
    UnrealizableCommandError,
)
from .infons import (
    EMPTY, FALSE, TRUE, Array, Bool, BoolQry, Collection, Command, Complement,
    Conditional, Contain, Difference, For, Identity, Infon, Int, IntRange,
    Intersection, Match, Name, PartialID, SequenceClass, String, Var, empty,
    members, unordered, walk, UNKNOWN,
)
from .membership import builtin_class, enumerate_members, eval_set_op, is_enumerable, is_member
from .rules import Rule, apply_rule, is_rule_shaped, make_rule, substitute, var_tokens
from .sequences import SeqStore, as_sequence, is_sequence_like
from .serialize import to_source

log = logging.getLogger(__name__)

ASSERT, COMMAND, QUERY = "assert", "command", "query"


@dataclass
class Step:
    rule: str
    path: tuple[int, ...]
    before: Infon
    after: Infon

    def text(self) -> str:
        where = "/" + "/".join(str(p) for p in self.path)
        return "RULE %s AT %s: %s => %s" % (self.rule, where, to_source(self.before),
                                          to_source(self.after))


@dataclass
class NormalizeResult:
    value: Infon
    handle: Optional[str] = None
    trace: list[Step] = field(default_factory=list)
    effects: list[str] = field(default_factory=list)
    context: Optional[Context] = None

    def trace_text(self) -> str:
        return "\n".join(s.text() for s in self.trace)


class ModelBinding:
    """A name bound to a format model awaiting a concrete sequence."""

    def __init__(self, model: Collection, scope: Context):
        self.model = model
        self.scope = scope


class EffectChannel:
    """Serialized sink for console output; captures when ``stream`` is None."""

    def __init__(self, stream=sys.stdout):
        self.stream = stream
        self.log: list[str] = []

    def emit(self, text: str) -> None:
        self.log.append(text)
        if self.stream is not None:
            self.stream.write(text)
            self.stream.flush()

    def text(self) -> str:
        return "".join(self.log)


def _closed(i: Infon) -> bool:
    """No unresolved names or free variables left."""
    for n in walk(i):
        if isinstance(n, (Name, Var)):
            return False
    return True


def _is_format_model(i: Infon) -> bool:
    if not (isinstance(i, Collection) and i.seq):
        return False
    for item in i.items:
        if isinstance(item, (Contain, For, Conditional)):
            return True
    return False


def replay(source: Infon, trace: list[Step]) -> Infon:
    """Apply ``trace`` step by step from ``source``; returns the final tree."""
    cur = source
    for step in trace:
        cur = _replace_at(cur, step.path, step)
    return cur


def _replace_at(tree: Infon, path: tuple[int, ...], step: Step) -> Infon:
    if not path:
        if tree != step.before:
            raise ValueError("trace step does not apply: expected %s, found %s"
                             % (to_source(step.before), to_source(tree)))
        return step.after
    kids = list(tree.children())
    kids[path[0]] = _replace_at(kids[path[0]], path[1:], step)
    return tree.with_children(tuple(kids))


class Engine:
    """One normalization job: options, trace and effect channel."""

    def __init__(self, budget: int = 10 ** 6, trace: bool = True, seed: Optional[int] = None,
                 reverse: bool = False, effects: Optional[EffectChannel] = None):
        self.budget = budget
        self.tracing = trace
        self.rng = random.Random(seed) if seed is not None else None
        self.reverse = reverse
        self.effects = effects if effects is not None else EffectChannel()
        self.trace: list[Step] = []
        self.steps = 0
        self.recent: list[str] = []

    # ------------------------------------------------------------ bookkeeping

    def _log(self, rule: str, path, before: Infon, after: Infon) -> None:
        self.steps += 1
        self.recent = (self.recent + [rule])[-5:]
        if self.steps > self.budget:
            raise DivergenceError("step budget of %d exhausted; last rules: %s"
                                  % (self.budget, ", ".join(self.recent)), self.recent)
        if self.tracing:
            self.trace.append(Step(rule, tuple(path), before, after))

    def _macro(self, rule: str, start: int, path, before: Infon, after: Infon) -> Infon:
        """Collapse the steps taken since ``start`` into one step."""
        del self.trace[start:]
        if after != before:
            self._log(rule, path, before, after)
        return after

    def emit(self, text: str) -> None:
        self.effects.emit(text)

    def _order(self, n: int) -> list[int]:
        idx = list(range(n))
        if self.rng is not None:
            self.rng.shuffle(idx)
        return idx

    # -------------------------------------------------------------- dispatch

    def normalize(self, i: Infon, ctx: Context, mode: str = ASSERT) -> Infon:
        return self.norm(i, ctx, mode, (), stmt=True)

    def norm(self, i: Infon, ctx: Context, mode: str, path=(), stmt: bool = False) -> Infon:
        if isinstance(i, (Bool, Int, Var)):
            return i
        if isinstance(i, String):
            return self._norm_string(i, ctx, mode, path)
        if isinstance(i, Name):
            return self._norm_name(i, ctx, mode, path, stmt)
        if isinstance(i, Collection):
            return self._norm_collection(i, ctx, mode, path)
        if isinstance(i, Array):
            return self._norm_children(i, ctx, mode, path)
        if isinstance(i, IntRange):
            return self._norm_children(i, ctx, QUERY if mode == QUERY else mode, path)
        if isinstance(i, Identity):
            return self._norm_identity(i, ctx, mode, path)
        if isinstance(i, PartialID):
            return self._norm_partial(i, ctx, mode, path)
        if isinstance(i, Contain):
            return self._norm_contain(i, ctx, mode, path)
        if isinstance(i, BoolQry):
            start = len(self.trace)
            return self._macro("query", start, path, i, TRUE if self.check(i.inner, ctx) else FALSE)
        if isinstance(i, Command):
            return self._norm_command(i, ctx, path)
        if isinstance(i, Conditional):
            return self._norm_conditional(i, ctx, mode, path)
        if isinstance(i, For):
            return self._norm_for(i, ctx, mode, path)
        if isinstance(i, Match):
            return i if i.scope is not None else Match(i.body, scope=ctx)
        if isinstance(i, (Difference, Intersection)):
            node = self._norm_children(i, ctx, QUERY, path)
            out = eval_set_op(ctx, node)
            if out is not node:
                self._log("set-op", path, node, out)
            return out
        if isinstance(i, (Complement, SequenceClass)):
            return self._norm_children(i, ctx, QUERY, path)
        raise QuantaTypeError("cannot normalize %r" % (i,))

    def _norm_children(self, i: Infon, ctx, mode, path) -> Infon:
        kids = list(i.children())
        for k in self._order(len(kids)):
            kids[k] = self.norm(kids[k], ctx, mode, path + (k,))
        return i.with_children(tuple(kids))

    # --------------------------------------------------------------- strings

    def _norm_string(self, s: String, ctx, mode, path) -> Infon:
        if s.template:
            from .formats import expand_template

            start = len(self.trace)
            return self._macro("template", start, path, s, expand_template(ctx, s, self))
        if s.bare:
            found = ctx.lookup((s.value,))
            out = None
            if found is not None and isinstance(found[0], Value):
                out = found[0].value
            elif found is not None and isinstance(found[0], SeqStore) \
                    and found[0].adapter is None and found[0].cursor is not None:
                out = found[0].read()
            if out is not None:
                self._log("FACT <%s>" % s.value, path, s, out)
                return out
        return s

    # ----------------------------------------------------------------- names

    def _norm_name(self, n: Name, ctx, mode, path, stmt=False) -> Infon:
        handler = ctx.autoname(n.head) if n.head is not None else None
        if handler is not None and handler.raw_args and len(n.segments) == 2:
            if mode == QUERY and handler.effect == "writes-world":
                return n
            start = len(self.trace)
            args = n.segments[1].items if isinstance(n.segments[1], Array) else (n.segments[1],)
            out = handler.fn(self, ctx, list(args), mode)
            if out is not None:
                return self._macro("AUTONAME %s" % handler.name, start, path, n, out)
        cur = self._norm_segments(n, ctx, mode, path)
        while True:
            nxt, rule = self._rewrite_name(cur, ctx, mode)
            if nxt is None:
                return cur
            self._log(rule, path, cur, nxt)
            if isinstance(nxt, Match) and stmt:
                return self._instantiate_call(nxt, ctx, mode, path)
            if rule.startswith("FACT"):
                if isinstance(nxt, Name) and nxt != cur:
                    cur = nxt
                    continue
                return nxt
            if isinstance(nxt, Name) and not self._raw_call(nxt, ctx):
                # iterate rather than recurse so long rewrite chains stay flat
                cur = self._norm_segments(nxt, ctx, mode, path)
                continue
            return self.norm(nxt, ctx, mode, path, stmt)

    def _norm_segments(self, n: Name, ctx, mode, path) -> Name:
        segs = list(n.segments)
        for k in self._order(len(segs)):
            seg = segs[k]
            if isinstance(seg, String) and not seg.template:
                continue
            segs[k] = self.norm(seg, ctx, mode, path + (k,))
        return n.with_children(tuple(segs))

    def _raw_call(self, n: Name, ctx) -> bool:
        handler = ctx.autoname(n.head) if n.head is not None else None
        return handler is not None and handler.raw_args

    def _rules(self, ctx):
        """Shortcuts in registration order, then user rules most recent first."""
        chain = list(ctx.chain())
        for c in chain:
            for r in c.rules:
                if r.source == "shortcut":
                    yield r
        for c in chain:
            for r in reversed(c.rules):
                if r.source != "shortcut":
                    yield r
                    if self.reverse:
                        yield r.reversed()

    def _rewrite_name(self, n: Name, ctx, mode):
        rules = list(self._rules(ctx))
        for r in rules:
            if r.source == "shortcut":
                out = apply_rule(r, n, ctx, is_member)
                if out is not None:
                    return out, "SHORTCUT " + r.name
        handler = ctx.autoname(n.head) if n.head is not None else None
        if handler is not None and not handler.raw_args:
            if not (mode == QUERY and handler.effect == "writes-world"):
                args = _args_of(n)
                if args is not None:
                    out = handler.fn(self, ctx, args, mode)
                    if out is not None:
                        return out, "AUTONAME " + handler.name
        for r in rules:
            if r.source != "shortcut":
                out = apply_rule(r, n, ctx, is_member)
                if out is not None:
                    return out, r.source.upper() + " " + r.name
        value = resolve_name(ctx, n)
        if value is not UNBOUND:
            return value, "FACT " + to_source(n)
        return None, ""

    def _instantiate_call(self, m: Match, ctx, mode, path) -> Infon:
        """A class named by itself as a statement: one member of it happens here."""
        start = len(self.trace)
        scope = Context(m.scope if m.scope is not None else ctx)
        out = self.norm(m.body, scope, mode, path, stmt=True)
        if any(isinstance(n, Command) for n in walk(out)):
            # the described events have happened; their record is the trace
            out = EMPTY
        return self._macro("instantiate", start, path, m, out)

    # ----------------------------------------------------------- collections

    def _norm_collection(self, c: Collection, ctx, mode, path, scope: Optional[Context] = None) -> Infon:
        sub = scope if scope is not None else Context(ctx)
        kids = []
        for k, item in enumerate(c.items):
            kids.append(self.norm(item, sub, mode, path + (k,), stmt=True))
        node = c.with_children(tuple(kids))
        items, flags = [], []
        # a block declaring member sequences is itself a sequence
        seq = c.seq or any(isinstance(x, Contain) and (x.seq or isinstance(x.cls, SequenceClass))
                           for x in c.items)
        for orig, v, flat in zip(c.items, kids, c.flatten):
            if flat and _spliceable(v):
                for m in _splice_members(v):
                    items.append(m)
                    flags.append(False)
                continue
            if seq and isinstance(v, Collection) and v.seq and not v.open:
                items.extend(v.items)
                flags.extend(v.flatten)
                continue
            if isinstance(v, Collection) and not v.items and not v.open and not isinstance(orig, Collection):
                continue
            items.append(v)
            flags.append(flat and not _spliceable(v))
        out = Collection(tuple(items), tuple(flags), seq, c.open, scope=sub)
        if out != node:
            self._log("collect", path, node, out)
        return out

    # ------------------------------------------------------------ identities

    def _chain(self, i: Infon) -> list[Infon]:
        parts = []
        while isinstance(i, Identity):
            parts.append(i.left)
            i = i.right
        parts.append(i)
        return parts

    def _norm_identity(self, i: Identity, ctx, mode, path) -> Infon:
        start = len(self.trace)
        if mode == QUERY:
            return self._macro("query", start, path, i, TRUE if self.check(i, ctx) else FALSE)
        parts = self._chain(i)
        if isinstance(parts[0], Command) or any(isinstance(p, Var) for p in parts[:-1]) \
                or (len(parts) == 2 and var_tokens(parts[0])):
            return self._macro("assert-rule", start, path, i, self._assert_rule(i, ctx))
        rhs = parts[-1]
        targets = parts[:-1]
        if len(targets) == 1 and _is_format_model(rhs) and as_name(targets[0]) is not None:
            found = lvalue_target(ctx, as_name(targets[0]))
            if found[2] is None:
                owner, key, _ = found
                owner.bind(key, ModelBinding(rhs, ctx))
                return self._macro("model", start, path, i, i)
        adapter = self._adapter_read(rhs, ctx)
        if adapter is not None:
            from .builtins import adapter_bind

            for t in targets:
                if as_name(t) is not None:
                    adapter_bind(ctx, self._norm_lname(as_name(t), ctx), adapter)
            return self._macro("adapter-map", start, path, i, i)
        value = self.norm(rhs, ctx, mode, path + ((1,) * len(targets)))
        out = value
        for t in reversed(targets):
            self._assign(t, value, ctx, mode)
            out = Identity(t, out)
        return self._macro("identity", start, path, i, out)

    def _assign(self, target: Infon, value: Infon, ctx, mode) -> None:
        name = as_name(target)
        if name is None:
            left = self.norm(target, ctx, QUERY)
            if left == value:
                return
            if _closed(left) and _closed(value):
                raise ContradictionError("%s cannot be identical to %s"
                                         % (to_source(left), to_source(value)))
            ctx.rules.append(Rule((), left, value, source="axiom"))
            return
        name = self._norm_lname(name, ctx)
        if mode == COMMAND:
            mapped = self._command_rule(Command(Identity(name, value)), ctx)
            if mapped is not None:
                return
        owner, key, binding = lvalue_target(ctx, name)
        whole = name.dollars[-1]
        if isinstance(binding, SeqStore):
            self._store_write(binding, value, whole, ctx)
            return
        if isinstance(binding, ModelBinding):
            from .formats import parse_by_model

            stream = list(as_sequence(value)) if is_sequence_like(value) else [value]
            fields = parse_by_model(binding.scope, binding.model, stream)
            scope = Context(binding.scope)
            for k, v in fields.items():
                scope.bind((k,), Value(v))
            owner.bindings[key] = Value(Collection(tuple(stream), seq=True, scope=scope))
            return
        if mode == COMMAND:
            if binding is None:
                raise UnrealizableCommandError("no mapping realizes %s == %s"
                                               % (to_source(name), to_source(value)))
            if isinstance(binding, Value) and binding.value == value:
                return
            raise ImmutabilityError("%s is constant; declare it with '$:' to change it"
                                    % to_source(name))
        if isinstance(binding, Value):
            if owner is ctx or owner.bindings is ctx.bindings:
                if binding.value != value:
                    raise ContradictionError("%s is already %s, cannot also be %s"
                                             % (to_source(name), to_source(binding.value),
                                                to_source(value)))
                return
            ctx.bind(key, Value(value))
            return
        if isinstance(binding, Declared):
            owner.bindings[key] = Value(value)
            return
        if isinstance(value, Command):
            return
        owner.bind(key, Value(value))

    def _adapter_read(self, rhs: Infon, ctx):
        """The adapter behind a ``<Id.[ReadValue, key]>`` right side, if any."""
        from .builtins import find_adapter

        if not (isinstance(rhs, Name) and rhs.head is not None and len(rhs.segments) == 2
                and isinstance(rhs.segments[1], Array) and rhs.segments[1].items):
            return None
        op = rhs.segments[1].items[0]
        if not (isinstance(op, String) and op.value.lower() == "readvalue"):
            return None
        return find_adapter(ctx, rhs.head)

    def _norm_lname(self, name: Name, ctx) -> Name:
        segs = []
        for s in name.segments:
            if isinstance(s, String) and not s.template:
                segs.append(s)
            else:
                segs.append(self.norm(s, ctx, QUERY))
        return name.with_children(tuple(segs))

    def _store_write(self, store: SeqStore, value: Infon, whole: bool, ctx) -> None:
        values = list(value.items) if (isinstance(value, Collection) and value.seq) or \
            (whole and isinstance(value, Collection)) else [value]
        for v in values:
            if store.cls is not None and is_member(ctx, store.cls, v) is False:
                raise QuantaTypeError("%s is not a member of %s"
                                      % (to_source(v), to_source(store.cls)))
            if store.adapter is not None:
                try:
                    store.adapter.write(store.key_text, v)
                except EffectError:
                    raise
                except Exception as exc:  # adapter faults surface as effect errors
                    raise EffectError("adapter failed writing %s: %s" % (store.key_text, exc))
            store.write(v)

    def _assert_rule(self, i: Identity, ctx) -> Infon:
        lhs = i.left
        rhs = i.right
        if not isinstance(lhs, Command):
            lhs = self._norm_pattern(lhs, ctx)
        rule = Rule((), lhs, rhs, source="axiom", scope=ctx)
        cx.register_shortcut(ctx, rule)
        return Identity(lhs, rhs)

    def _norm_pattern(self, p: Infon, ctx) -> Infon:
        return p

    def _norm_partial(self, p: PartialID, ctx, mode, path) -> Infon:
        start = len(self.trace)
        if mode == QUERY:
            return self._macro("query", start, path, p, TRUE if self.check(p, ctx) else FALSE)
        value = self.norm(p.right, ctx, mode, path + (1,))
        if isinstance(value, Collection) and not value.open:
            value = Collection(value.items, value.flatten, value.seq, True, scope=value.scope)
        self._assign(p.left, value, ctx, mode)
        return self._macro("partial-identity", start, path, p, PartialID(p.left, value))

    # ----------------------------------------------------------- containment

    def _class_known(self, cls: Infon, ctx) -> bool:
        if isinstance(cls, SequenceClass):
            return self._class_known(cls.name, ctx)
        name = as_name(cls)
        if name is None:
            return isinstance(cls, (IntRange, Collection, Array, Match, Complement,
                                    Difference, Intersection))
        if builtin_class(name) is not None:
            return True
        if ctx.lookup(name_key(name)) is not None:
            return True
        return any(True for _ in ctx.member_facts(name))

    def _class_value(self, cls: Infon, ctx) -> Optional[Infon]:
        name = as_name(cls)
        if name is None:
            return cls
        v = resolve_name(ctx, name)
        return None if v is UNBOUND else v

    def _norm_contain(self, c: Contain, ctx, mode, path) -> Infon:
        start = len(self.trace)
        if c.item is None:
            if mode == QUERY:
                return self._macro("query", start, path, c,
                                   TRUE if self.check(c, ctx) else FALSE)
            out = self.norm(c.cls, ctx, mode, path + (0,), stmt=True)
            return self._macro("call", start, path, c, out)
        if mode == QUERY:
            return self._macro("query", start, path, c, TRUE if self.check(c, ctx) else FALSE)
        if mode == COMMAND and not self._class_known(c.cls, ctx):
            raise UnknownClassError("unknown class %s" % to_source(c.cls))
        seq = c.seq or isinstance(c.cls, SequenceClass)
        elem_cls = c.cls.name if isinstance(c.cls, SequenceClass) else c.cls
        item = c.item
        ident = item if isinstance(item, Identity) else None
        target = as_name(ident.left if ident is not None else item)
        if target is None:
            value = self.norm(item, ctx, mode, path + (1,))
            ctx.add_member_fact(c.cls, value)
            return self._macro("contain", start, path, c, Contain(c.cls, value, c.seq))
        target = self._norm_lname(target, ctx)
        key = name_key(target)
        local = ctx.lookup_local(key)
        if mode == COMMAND and local is not None:
            raise AlreadyBoundError("%s is already bound" % to_source(target))
        cls_value = self._class_value(c.cls, ctx)
        if isinstance(cls_value, Match) and isinstance(cls_value.body, Collection) \
                and not cls_value.body.seq and not seq:
            overrides = ident.right if ident is not None else None
            obj, given = self._make_object(cls_value, overrides, ctx, mode, path)
            ctx.bind(key, Value(obj))
            ctx.add_member_fact(c.cls, target)
            ctx.add_member_fact(c.cls, obj)
            new_item = Identity(ident.left, given) if ident is not None else item
            return self._macro("instantiate-object", start, path, c, Contain(c.cls, new_item, c.seq))
        if seq:
            if not isinstance(local, SeqStore):
                ctx.bind(key, SeqStore(elem_cls, key=key))
        elif local is None:
            ctx.bind(key, Declared(c.cls))
        ctx.add_member_fact(c.cls, target)
        if ident is None:
            return self._macro("declare", start, path, c, c)
        new_ident = self._norm_identity(ident, ctx, mode, path + (1,))
        if mode != COMMAND and not seq and cls_value is None:
            pass
        return self._macro("declare", start, path, c, Contain(c.cls, new_ident, c.seq))

    def _make_object(self, cls: Match, overrides, ctx, mode, path):
        """A fresh member of ``cls``: run its body, then the given field values.

        Returns the object and the normalized overrides.
        """
        scope = Context(cls.scope if cls.scope is not None else ctx)
        body = self._norm_collection(cls.body, scope, mode, path, scope=scope)
        items = list(body.items)
        given = None
        if isinstance(overrides, Collection):
            given = self._norm_collection(overrides, scope, mode, path, scope=scope)
            items.extend(given.items)
        elif overrides is not None:
            given = self.norm(overrides, scope, mode, path)
            items.append(given)
        return Collection(tuple(items), scope=scope), given

    # --------------------------------------------------------------- queries

    def check(self, q: Infon, ctx) -> bool:
        """Truth of a boolean query: it holds as described in ``ctx``."""
        try:
            return self._truth(q, ctx)
        except NormalizeError as exc:
            log.debug("query failed: %s", exc)
            return False

    def _rvalue(self, i: Infon, ctx) -> Infon:
        return self.norm(i, ctx, QUERY)

    def _truth(self, q: Infon, ctx) -> bool:
        if isinstance(q, BoolQry):
            return self._truth(q.inner, ctx)
        if isinstance(q, Bool):
            return q.value
        if isinstance(q, Identity):
            values = [self._rvalue(p, ctx) for p in self._chain(q)]
            if not all(_closed(v) or isinstance(v, Match) for v in values):
                return False
            first = unordered(values[0])
            return all(unordered(v) == first for v in values[1:])
        if isinstance(q, PartialID):
            left, right = self._rvalue(q.left, ctx), self._rvalue(q.right, ctx)
            if not (_closed(left) and _closed(right)):
                return False
            have = members(left)
            return all(m in have for m in members(right) if m is not UNKNOWN)
        if isinstance(q, Contain):
            if q.item is None:
                return _closed(self._rvalue(q.cls, ctx))
            item = q.item
            if isinstance(item, Identity):
                if not self._truth(item, ctx):
                    return False
                item = item.left
            # a declared name is a member by fiat, whatever its value
            if isinstance(item, Name) and any(f == item for f in ctx.member_facts(q.cls)):
                return True
            value = self._rvalue(item, ctx)
            if is_member(ctx, q.cls, value) is True:
                return True
            cls = q.cls
            if as_name(cls) is None:
                cls = self._rvalue(cls, ctx)
                return is_member(ctx, cls, value) is True
            return False
        if isinstance(q, Collection):
            sub = Context(ctx)
            for item in q.items:
                if isinstance(item, (Identity, PartialID, Contain, BoolQry, Collection)):
                    if not self._truth(item, sub):
                        return False
                else:
                    v = self._rvalue(item, sub)
                    if isinstance(v, Bool):
                        if not v.value:
                            return False
                    elif not _closed(v):
                        return False
            return True
        v = self._rvalue(q, ctx)
        if isinstance(v, Bool):
            return v.value
        return _closed(v)

    # ------------------------------------------------------------ conditional

    def _norm_conditional(self, c: Conditional, ctx, mode, path) -> Infon:
        start = len(self.trace)
        cond = c.cond
        if isinstance(cond, (BoolQry, Identity, PartialID, Contain)):
            flag = self.check(cond, ctx)
        else:
            v = self.norm(cond, ctx, QUERY, path + (0,))
            if not isinstance(v, Bool):
                raise QuantaTypeError("condition is not boolean: %s" % to_source(v))
            flag = v.value
        if flag:
            out = self.norm(c.then, ctx, mode, path + (1,), stmt=True)
        elif c.orelse is not None:
            out = self.norm(c.orelse, ctx, mode, path + (2,), stmt=True)
        else:
            out = empty(c.seq)
        return self._macro("conditional", start, path, c, out)

    # -------------------------------------------------------------- commands

    def _command_rule(self, cmd: Command, ctx) -> Optional[Infon]:
        for r in self._rules(ctx):
            if not isinstance(r.lhs, Command):
                continue
            out = apply_rule(r, cmd, ctx, is_member)
            if out is not None:
                return self.norm(out, ctx, COMMAND)
        return None

    def _norm_command(self, c: Command, ctx, path) -> Infon:
        start = len(self.trace)
        out = self.norm(c.inner, ctx, COMMAND, path + (0,), stmt=True)
        if isinstance(out, Collection) and not out.items:
            result: Infon = out
        elif isinstance(out, (Identity, Contain, PartialID)):
            result = Command(out)
        else:
            result = out
        return self._macro("command", start, path, c, result)

    # ------------------------------------------------------------- for-infons

    def _norm_for(self, f: For, ctx, mode, path) -> Infon:
        start = len(self.trace)
        body_items = list(f.body.items) if isinstance(f.body, Collection) else [f.body]
        tokens = {v.token for v in f.vars}
        ruleish = [is_rule_shaped(f.vars, s) for s in body_items]
        plain = [not (var_tokens(s) & tokens) for s in body_items]
        if mode != QUERY and any(ruleish) and all(r or p for r, p in zip(ruleish, plain)):
            for stmt, is_rule in zip(body_items, ruleish):
                if is_rule:
                    source = "shortcut" if ctx.is_world else "axiom"
                    cx.register_shortcut(ctx, make_rule(f.vars, stmt, source, ctx))
                else:
                    self.norm(stmt, ctx, mode, path)
            return self._macro("for-rule", start, path, f, f)
        ranges = []
        for v in f.vars:
            rng = self.norm(v.range, ctx, QUERY)
            if not is_enumerable(rng):
                return self._macro("for", start, path, f, f)
            ranges.append(enumerate_members(rng))
        items = []
        for env in _product(f.vars, ranges):
            inst = substitute(f.body, env)
            items.append(self.norm(inst, ctx, mode, path + (len(f.vars),), stmt=True))
        out_items, flags = [], []
        for v in items:
            if isinstance(v, Collection) and not v.items and not v.open:
                continue
            out_items.append(v)
            flags.append(False)
        out = Collection(tuple(out_items), tuple(flags), seq=f.seq)
        return self._macro("for", start, path, f, out)


def _product(vars_, ranges):
    if not vars_:
        yield {}
        return
    first, rest = vars_[0], vars_[1:]
    for value in ranges[0]:
        for env in _product(rest, ranges[1:]):
            d = {first.token: value}
            d.update(env)
            yield d


def _args_of(n: Name):
    if len(n.segments) == 2 and isinstance(n.segments[1], Array):
        return list(n.segments[1].items)
    if len(n.segments) == 1:
        return []
    return None


def _spliceable(v: Infon) -> bool:
    return isinstance(v, (Collection, Array, IntRange)) and is_enumerable(v) or \
        (isinstance(v, Collection) and v.open)


def _splice_members(v: Infon):
    if isinstance(v, Collection):
        return [m for m in members(v) if m is not UNKNOWN]
    return enumerate_members(v)


_counter = [0]


def normalize(ctx: Context, i: Infon, budget: int = 10 ** 6, trace: bool = True,
              seed: Optional[int] = None, reverse: bool = False,
              effects: Optional[EffectChannel] = None, mode: str = ASSERT) -> NormalizeResult:
    """Normalize ``i`` as a new object in a child of ``ctx``."""
    engine = Engine(budget, trace, seed, reverse, effects)
    start = len(engine.effects.log)
    obj = Context(ctx)
    try:
        if isinstance(i, Collection):
            value = engine._norm_collection(i, obj, mode, (), scope=obj)
        else:
            value = engine.norm(i, obj, mode, (), stmt=True)
    except RecursionError:
        raise DivergenceError("rewriting nested too deeply after %d steps; last rules: %s"
                              % (engine.steps, ", ".join(engine.recent)), engine.recent) from None
    handle = cx.register_object(obj, value)
    return NormalizeResult(value, handle, engine.trace, engine.effects.log[start:], obj)
