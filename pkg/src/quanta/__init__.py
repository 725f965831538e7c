"""Quanta: an information-structure language normalized by substitution of identicals."""

from .context import (
    Context, create_context, delete_object, deref_object, register_shortcut,
    resolve_name, assert_fact,
)
from .errors import *  # noqa: F401,F403
from .formats import expand_template, parse_by_model, serialize_by_model
from .infons import *  # noqa: F401,F403
from .lexer import tokenize
from .membership import enumerate_members, eval_set_op, is_member
from .normalizer import Engine, EffectChannel, NormalizeResult, Step, normalize, replay
from .parser import parse_infon, parse_program, parse_tree
from .rules import Rule, apply_rule, match_pattern
from .serialize import to_source

serialize = to_source

__version__ = "0.1.0"
