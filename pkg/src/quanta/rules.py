"""Directed identities: pattern matching, substitution and rule application."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .infons import Array, For, Identity, Infon, Name, Var, VarDef, is_sorted, walk
from .serialize import to_source


@dataclass
class Rule:
    """``lhs`` rewrites to ``rhs`` once every variable is bound within its range."""

    variables: tuple[VarDef, ...]
    lhs: Infon
    rhs: Infon
    order_sensitive: bool = False
    source: str = "axiom"  # shortcut | axiom | autoname
    name: str = ""
    scope: object = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.name:
            self.name = to_source(Identity(self.lhs, self.rhs))

    def reversed(self) -> "Rule":
        return Rule(self.variables, self.rhs, self.lhs, self.order_sensitive,
                    self.source, "reverse " + self.name, self.scope)


def var_tokens(i: Infon) -> set[str]:
    return {n.token for n in walk(i) if isinstance(n, Var)}


def call_args(i: Infon) -> Optional[tuple[Infon, ...]]:
    """The argument array of an operator-style name ``<op.[a, b, ...]>``."""
    if isinstance(i, Name) and len(i.segments) >= 2 and isinstance(i.segments[-1], Array):
        return i.segments[-1].items
    return None


def is_permutation_rule(lhs: Infon, rhs: Infon) -> bool:
    """True when rhs only reorders lhs's arguments (commutativity and kin)."""
    a, b = call_args(lhs), call_args(rhs)
    if a is None or b is None or lhs.segments[:-1] != rhs.segments[:-1]:
        return False
    if not all(isinstance(x, Var) for x in a + b):
        return False
    return Counter(x.token for x in a) == Counter(x.token for x in b) and a != b


def make_rule(vars_: tuple[VarDef, ...], ident: Identity, source: str = "axiom", scope=None) -> Rule:
    lhs, rhs = ident.left, ident.right
    return Rule(tuple(vars_), lhs, rhs, is_permutation_rule(lhs, rhs), source, scope=scope)


def is_rule_shaped(vars_, stmt: Infon) -> bool:
    """An identity whose left side mentions the variables and binds every rhs variable."""
    if not isinstance(stmt, Identity):
        return False
    tokens = {v.token for v in vars_}
    left = var_tokens(stmt.left)
    return bool(left & tokens) and var_tokens(stmt.right) <= left


def substitute(i: Infon, env: dict[str, Infon]) -> Infon:
    """Replace free VarInfons by their bound values."""
    if not env:
        return i
    if isinstance(i, Var):
        return env.get(i.token, i)
    if isinstance(i, For):
        inner = {k: v for k, v in env.items() if k not in {d.token for d in i.vars}}
        ranges = tuple(substitute(v.range, env) for v in i.vars)
        body = substitute(i.body, inner)
        return i.with_children(ranges + (body,))
    kids = i.children()
    if not kids:
        return i
    return i.with_children(tuple(substitute(k, env) for k in kids))


def match_pattern(pattern: Infon, subject: Infon, ctx, variables=(), member=None,
                  env: Optional[dict] = None) -> Optional[dict]:
    """Bindings making ``pattern`` structurally equal to ``subject``, or None.

    ``member(ctx, cls, item)`` decides range guards; a binding needs a
    definite yes.
    """
    env = {} if env is None else env
    ranges = {v.token: v.range for v in variables}
    if _match(pattern, subject, ctx, ranges, member, env):
        return env
    return None


def _match(p: Infon, s: Infon, ctx, ranges, member, env) -> bool:
    if isinstance(p, Var) and (p.token in ranges or not ranges):
        bound = env.get(p.token)
        if bound is not None:
            return bound == s
        rng = ranges.get(p.token)
        if rng is not None and member is not None and member(ctx, rng, s) is not True:
            return False
        env[p.token] = s
        return True
    if type(p) is not type(s):
        return False
    pk, sk = p.children(), s.children()
    if len(pk) != len(sk):
        return False
    if not pk:
        return p == s
    # shallow comparison: same kind and flags once children are aligned
    if p.with_children(sk) != s:
        return False
    return all(_match(a, b, ctx, ranges, member, env) for a, b in zip(pk, sk))


def apply_rule(rule: Rule, site: Infon, ctx, member=None) -> Optional[Infon]:
    """Instantiated rhs if ``rule`` fires at ``site``; None for no change."""
    env = match_pattern(rule.lhs, site, ctx, rule.variables, member)
    if env is None:
        return None
    if rule.order_sensitive:
        args = call_args(site)
        if args is not None and is_sorted(args):
            return None
    return substitute(rule.rhs, env)
