"""World's preloaded autonames, shortcuts and the external adapter interface."""

from __future__ import annotations

from typing import Optional

from .context import (
    AutonameHandler, Context, Declared, as_name, lvalue_target, resolve_name, UNBOUND,
)
from .errors import (
    DivisionByZeroError, EffectError, ImmutabilityError, QuantaTypeError,
    UnrealizableCommandError,
)
from .infons import EMPTY, Bool, Identity, Infon, Int, Name, String
from .sequences import SeqStore
from .serialize import to_source

# --------------------------------------------------------------- arithmetic


def _ints(args) -> Optional[list[int]]:
    if len(args) != 2 or not all(isinstance(a, Int) for a in args):
        return None
    return [a.value for a in args]


def _tdiv(a: int, b: int) -> int:
    """Integer quotient truncated toward zero."""
    if b == 0:
        raise DivisionByZeroError("division by zero")
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


ARITH = {
    "sum": lambda a, b: a + b,
    "minus": lambda a, b: a - b,
    "product": lambda a, b: a * b,
    "quotient": _tdiv,
}

COMPARE = {
    "gt": lambda a, b: a > b,
    "lt": lambda a, b: a < b,
    "ge": lambda a, b: a >= b,
    "le": lambda a, b: a <= b,
}


def arith(op: str, a: int, b: int) -> int:
    return ARITH[op](a, b)


def compare(op: str, a: int, b: int) -> bool:
    if op == "eq":
        return a == b
    return COMPARE[op](a, b)


def _arith_handler(op):
    def fn(engine, ctx, args, mode):
        vals = _ints(args)
        if vals is None:
            return None
        return Int(ARITH[op](*vals))
    return fn


def _compare_handler(op):
    def fn(engine, ctx, args, mode):
        vals = _ints(args)
        if vals is not None:
            return Bool(compare(op, *vals))
        if op == "eq" and len(args) == 2 and all(_literal(a) for a in args):
            return Bool(args[0] == args[1])
        return None
    return fn


def _literal(i: Infon) -> bool:
    from .normalizer import _closed

    return _closed(i)


# ------------------------------------------------------------------ console


def render(i: Infon) -> str:
    """Text of an infon as written to the console."""
    if isinstance(i, String):
        return i.value
    if isinstance(i, Int):
        return str(i.value)
    return to_source(i)


def _writer(newline: bool):
    def fn(engine, ctx, args, mode):
        text = "".join(render(a) for a in args)
        engine.emit(text + ("\n" if newline else ""))
        return EMPTY
    return fn


# ------------------------------------------------------- set and increment


def _target(engine, ctx, arg: Infon):
    name = as_name(arg)
    if name is None:
        raise QuantaTypeError("expected a name, got %s" % to_source(arg))
    name = engine._norm_lname(name, ctx)
    return name, lvalue_target(ctx, name)


def set_value(engine, ctx: Context, name_arg: Infon, value: Infon) -> Infon:
    """Append ``value`` to the mutable store named by ``name_arg``."""
    name, (_owner, _key, binding) = _target(engine, ctx, name_arg)
    if binding is None:
        raise UnrealizableCommandError("%s is not allocated" % to_source(name))
    if not isinstance(binding, SeqStore):
        raise ImmutabilityError("%s is constant; declare it with '$:' to change it"
                                % to_source(name))
    engine._store_write(binding, value, False, ctx)
    return Identity(name, value)


def _set(engine, ctx, args, mode):
    if len(args) != 2:
        return None
    value = engine.norm(args[1], ctx, mode)
    return set_value(engine, ctx, args[0], value)


def _increment(engine, ctx, args, mode):
    if len(args) != 1:
        return None
    name, (_owner, _key, binding) = _target(engine, ctx, args[0])
    current = resolve_name(ctx, name)
    if current is UNBOUND or not isinstance(current, Int):
        raise QuantaTypeError("cannot increment %s" % to_source(name))
    set_value(engine, ctx, args[0], Int(current.value + 1))
    return Int(current.value + 1)


def allocate(ctx: Context, cls: Infon, name: Name, seq_flag: bool) -> None:
    """Install a const (``:``) or mutable (``$:``) binding for ``name``."""
    from .errors import AlreadyBoundError
    from .context import name_key

    key = name_key(name)
    if ctx.lookup_local(key) is not None:
        raise AlreadyBoundError("%s is already bound" % to_source(name))
    ctx.bind(key, SeqStore(cls, key=key) if seq_flag else Declared(cls))


# ----------------------------------------------------------------- adapters


class MemoryAdapter:
    """In-process stand-in for an external system: a key/value store.

    ``reject`` lists values whose writes fail, to simulate faults.
    """

    def __init__(self, reject=()):
        self.values: dict[str, Infon] = {}
        self.reject = set(reject)
        self.calls: list[tuple] = []

    def write(self, key: str, value: Infon) -> None:
        self.calls.append(("write", key, value))
        if isinstance(value, Int) and value.value in self.reject:
            raise EffectError("adapter rejected %s for %s" % (value.value, key))
        self.values[key] = value

    def read(self, key: str) -> Infon:
        self.calls.append(("read", key))
        if key not in self.values:
            raise EffectError("adapter has no value for %s" % key)
        return self.values[key]


def _key_text(i: Infon) -> str:
    if isinstance(i, String):
        return i.value
    name = as_name(i)
    if name is not None:
        return ".".join(render(s) for s in name.segments)
    return to_source(i)


def register_adapter(ctx: Context, adapter_id: str, adapter) -> None:
    """Expose ``adapter`` as the autoname ``<adapter_id.[op, key, value]>``.

    ``op`` is ChangeValue (writes) or ReadValue (reads).
    """

    def fn(engine, c, args, mode):
        if not args:
            return None
        op = render(args[0]).lower()
        if op == "changevalue" and len(args) >= 3:
            if mode == "query":
                return None
            adapter.write(_key_text(args[1]), args[-1])
            return EMPTY
        if op == "readvalue" and len(args) >= 2:
            return adapter.read(_key_text(args[1]))
        return None

    ctx.autonames[adapter_id.lower()] = AutonameHandler(adapter_id, fn, "writes-world")
    ctx.adapters = getattr(ctx, "adapters", {})
    ctx.adapters[adapter_id.lower()] = adapter


def find_adapter(ctx: Context, adapter_id: str):
    for c in ctx.chain():
        found = getattr(c, "adapters", {}).get(adapter_id.lower())
        if found is not None:
            return found
    return None


def adapter_bind(ctx: Context, name: Name, adapter) -> None:
    """Route reads and writes of ``name`` through ``adapter``."""
    owner, key, binding = lvalue_target(ctx, name)
    if isinstance(binding, SeqStore):
        binding.adapter = adapter
        return
    store = SeqStore(None, adapter=adapter, key=key)
    owner.bind(key, store)


# ------------------------------------------------------------------ install

SHORTCUTS = """
for x:<numbers> :: %x * 0 == 0;
for x:<numbers>, y:<numbers> :: %x + %y == %y + %x;
for x:<numbers>, y:<numbers> :: %x * %y == %y * %x;
"""

CLASSES = ("ints", "numbers", "strings", "chars", "char", "bools")


def install(world: Context) -> None:
    """Preload World with arithmetic, comparison, console and state autonames."""
    for op in ARITH:
        world.autonames[op] = AutonameHandler(op, _arith_handler(op), "pure", arity=2)
    for op in ("gt", "lt", "ge", "le", "eq"):
        world.autonames[op] = AutonameHandler(op, _compare_handler(op), "pure", arity=2)
    world.autonames["write"] = AutonameHandler("write", _writer(False), "writes-world")
    world.autonames["writeln"] = AutonameHandler("writeln", _writer(True), "writes-world")
    world.autonames["print"] = AutonameHandler("print", _writer(True), "writes-world")
    world.autonames["set"] = AutonameHandler("set", _set, "writes-world", raw_args=True, arity=2)
    world.autonames["increment"] = AutonameHandler("increment", _increment, "writes-world",
                                                   raw_args=True, arity=1)
    for cls in CLASSES:
        world.bindings[(cls,)] = Declared(None)

    from .normalizer import Engine
    from .parser import parse_program

    engine = Engine(trace=False)
    prog = parse_program(SHORTCUTS)
    for stmt in prog.items:
        engine.norm(stmt, world, "assert")
