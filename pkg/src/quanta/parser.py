"""Recursive-descent parser producing infon trees.

Precedence, loosest first::

    !            command (postfix)
    ?            boolean query (postfix)
    :  $:        containment, item optional
    ==  =  ::=   identity / partial identity, right associative
    gt lt ge le eq
    ..           integer range
    +  -
    *  /
    prefix: $ @ # - difference intersection complement not for if
    primary: literals, <names>, calls, (…), {…}, […], %var

Operators become names: ``2+3`` is ``<sum.[2,3]>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError
from .infons import (
    Array, Bool, BoolQry, Collection, Command, Complement, Conditional, Contain,
    Difference, For, Identity, Infon, Int, IntRange, Intersection, Match, Name,
    PartialID, SequenceClass, String, Var, VarDef,
)
from .lexer import Token, tokenize

BINARY_NAMES = {"+": "sum", "-": "minus", "*": "product", "/": "quotient"}
COMPARE_NAMES = ("gt", "lt", "ge", "le", "eq")
OPERATOR_NAMES = {v: k for k, v in BINARY_NAMES.items()}
OPERATOR_NAMES.update({c: c for c in COMPARE_NAMES})


def op_name(op: str, left: Infon, right: Infon) -> Name:
    return Name((String(op, bare=True), Array((left, right))))


@dataclass
class SyntaxTree:
    root: Infon
    source_span_map: dict = field(default_factory=dict)


class Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0
        self.spans: dict[int, tuple[int, int]] = {}

    # ------------------------------------------------------------ helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k) if k else self.tok
        return t.kind == "punct" and t.text == text

    def at_kw(self, word: str) -> bool:
        return self.tok.kind == "keyword" and self.tok.text.lower() == word

    def next(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail("expected %r" % text, [text])
        return self.next()

    def fail(self, message: str, expected=()):
        t = self.tok
        found = t.text if t.kind != "eof" else "end of input"
        raise ParseError("%s, found %r" % (message, found), t.line, t.col, expected)

    def mark(self, node: Infon, tok: Token) -> Infon:
        self.spans.setdefault(id(node), (tok.line, tok.col))
        return node

    # ------------------------------------------------------------ program

    def program(self) -> Infon:
        items, flags, is_open, separated = self.item_list(end=None)
        if len(items) == 1 and not separated and not flags[0] and not is_open:
            return items[0]
        return Collection(tuple(items), tuple(flags), open=is_open)

    def item_list(self, end: str | None):
        items: list[Infon] = []
        flags: list[bool] = []
        is_open = False
        separated = False

        def at_end() -> bool:
            return self.tok.kind == "eof" if end is None else self.at(end)

        while not at_end():
            if self.at("..."):
                self.next()
                is_open = True
            else:
                flat = False
                if self.at("#"):
                    self.next()
                    flat = True
                items.append(self.statement())
                flags.append(flat)
            if self.at(";") or self.at(","):
                self.next()
                separated = True
                continue
            if at_end():
                break
            if self.peek(-1).kind == "punct" and self.peek(-1).text == "}":
                continue
            self.fail("unexpected token", [";", ",", end or "end of input"])
        return items, flags, is_open, separated

    # --------------------------------------------------------- statements

    def statement(self) -> Infon:
        """Command level: a query-level infon optionally followed by ``!``."""
        start = self.tok
        node = self.query()
        while self.at("!"):
            self.next()
            node = self.mark(Command(node), start)
        return node

    def query(self) -> Infon:
        start = self.tok
        node = self.contain()
        while self.at("?"):
            self.next()
            node = self.mark(BoolQry(node), start)
        return node

    def _contain_op(self):
        """Return (seq_flag, token_count) if a containment operator starts here."""
        if self.at(":"):
            return False, 1
        if self.at("$") and self.at(":", 1):
            return True, 2
        if self.at("$") and self.at(".", 1) and self.at("<", 2):
            return True, 2
        if self.at(".") and self.at("<", 1):
            return False, 1
        return None

    def contain(self) -> Infon:
        start = self.tok
        node = self.identity()
        op = self._contain_op()
        if op is None:
            return node
        seq, count = op
        for _ in range(count):
            self.next()
        item = None
        if not self._at_item_end():
            item = self.identity()
        return self.mark(Contain(node, item, seq), start)

    def _at_item_end(self) -> bool:
        t = self.tok
        if t.kind == "eof":
            return True
        if t.kind == "keyword" and t.text.lower() == "else":
            return True
        return t.kind == "punct" and t.text in (";", ",", "}", ")", "]", "!", "?", "::")

    def identity(self) -> Infon:
        start = self.tok
        left = self.compare()
        if self.at("==") or self.at("="):
            self.next()
            right = self.identity()
            return self.mark(Identity(left, right), start)
        if self.at("::=") or self.at(":="):
            self.next()
            right = self.identity()
            return self.mark(PartialID(left, right), start)
        return left

    def compare(self) -> Infon:
        start = self.tok
        left = self.range_()
        while self.tok.kind == "keyword" and self.tok.text.lower() in COMPARE_NAMES:
            op = self.next().text.lower()
            right = self.range_()
            left = self.mark(op_name(op, left, right), start)
        return left

    def range_(self) -> Infon:
        start = self.tok
        left = self.additive()
        if self.at(".."):
            self.next()
            right = self.additive()
            return self.mark(IntRange(left, right), start)
        return left

    def additive(self) -> Infon:
        start = self.tok
        left = self.multiplicative()
        while self.at("+") or self.at("-"):
            op = BINARY_NAMES[self.next().text]
            right = self.multiplicative()
            left = self.mark(op_name(op, left, right), start)
        return left

    def multiplicative(self) -> Infon:
        start = self.tok
        left = self.unary()
        while self.at("*") or self.at("/"):
            op = BINARY_NAMES[self.next().text]
            right = self.unary()
            left = self.mark(op_name(op, left, right), start)
        return left

    # ------------------------------------------------------------- prefix

    def unary(self) -> Infon:
        start = self.tok
        t = self.tok
        if self.at("-"):
            self.next()
            operand = self.unary()
            if isinstance(operand, Int):
                return self.mark(Int(-operand.value), start)
            return self.mark(op_name("minus", Int(0), operand), start)
        if self.at("$"):
            self.next()
            return self.mark(self._dollar(self.range_()), start)
        if self.at("@"):
            self.next()
            return self.mark(Match(self.unary()), start)
        if t.kind == "keyword":
            word = t.text.lower()
            if word == "difference":
                self.next()
                self.expect("(")
                a = self.statement()
                self.expect(",")
                b = self.statement()
                self.expect(")")
                return self.mark(Difference(a, b), start)
            if word == "intersection":
                self.next()
                return self.mark(Intersection(self.unary()), start)
            if word in ("complement", "not"):
                self.next()
                return self.mark(Complement(self.unary()), start)
            if word == "for":
                return self.for_()
            if word == "if":
                return self.if_()
        return self.primary()

    def _dollar(self, node: Infon) -> Infon:
        if isinstance(node, Collection):
            return Collection(node.items, node.flatten, True, node.open)
        if isinstance(node, IntRange):
            return IntRange(node.start, node.end, True)
        if isinstance(node, For):
            return For(node.vars, node.body, True)
        if isinstance(node, Conditional):
            return Conditional(node.cond, node.then, node.orelse, True)
        if isinstance(node, Name):
            return SequenceClass(node)
        self.fail("'$' must prefix a collection, range, for, if or name")

    def for_(self) -> Infon:
        start = self.next()
        vars_ = [self.vardef()]
        while self.at(","):
            self.next()
            vars_.append(self.vardef())
        self.expect("::")
        body = self.statement()
        return self.mark(For(tuple(vars_), body), start)

    def vardef(self) -> VarDef:
        seq = False
        if self.at("$"):
            self.next()
            seq = True
        t = self.tok
        if t.kind not in ("ident", "keyword"):
            self.fail("expected a variable token", ["token"])
        self.next()
        self.expect(":")
        rng = self.range_()
        return VarDef(t.text, rng, seq)

    def if_(self) -> Infon:
        start = self.next()
        cond = self.contain()
        if self.at("?"):
            self.next()
            cond = BoolQry(cond)
        if self.at(","):
            self.next()
        then = self.statement()
        orelse = None
        if self.at_kw("else"):
            self.next()
            orelse = self.statement()
        return self.mark(Conditional(cond, then, orelse), start)

    # ------------------------------------------------------------ primary

    def primary(self) -> Infon:
        t = self.tok
        if t.kind == "int":
            self.next()
            return self.mark(Int(int(t.text)), t)
        if t.kind == "string":
            self.next()
            return self.mark(String(t.value), t)
        if t.kind == "template":
            self.next()
            if t.value.count("%") % 2:
                raise ParseError("unbalanced '%' in template string", t.line, t.col)
            return self.mark(String(t.value, template=True), t)
        if t.kind == "keyword" and t.text.lower() in ("true", "false"):
            self.next()
            return self.mark(Bool(t.text.lower() == "true"), t)
        if t.kind == "ident":
            return self.word()
        if self.at("<"):
            return self.name()
        if self.at("("):
            self.next()
            node = self.statement()
            self.expect(")")
            return node
        if self.at("{"):
            return self.collection()
        if self.at("["):
            return self.array()
        if self.at("%"):
            self.next()
            v = self.tok
            if v.kind not in ("ident", "keyword"):
                self.fail("expected a variable token after '%'", ["token"])
            self.next()
            return self.mark(Var(v.text), t)
        self.fail("expected an infon", ["infon"])

    def word(self) -> Infon:
        t = self.next()
        head = String(t.text, bare=True)
        if self.at("("):
            self.next()
            args = []
            while not self.at(")"):
                args.append(self.statement())
                if not self.at(")"):
                    self.expect(",")
            self.expect(")")
            return self.mark(Name((head, Array(tuple(args)))), t)
        if self.at(".") and not self.at("<", 1) and self._segment_start(1):
            segs = [head]
            dollars = [False]
            while self.at(".") and self._segment_start(1):
                self.next()
                seg, dollar = self.segment()
                segs.append(seg)
                dollars.append(dollar)
            return self.mark(Name(tuple(segs), tuple(dollars)), t)
        return self.mark(head, t)

    def _segment_start(self, k: int) -> bool:
        t = self.peek(k)
        if t.kind in ("ident", "int", "string", "keyword"):
            return True
        return t.kind == "punct" and t.text in ("[", "%", "(")

    def name(self) -> Infon:
        start = self.expect("<")
        segs = []
        dollars = []
        while True:
            seg, dollar = self.segment()
            segs.append(seg)
            dollars.append(dollar)
            if self.at("."):
                self.next()
                continue
            break
        self.expect(">")
        return self.mark(Name(tuple(segs), tuple(dollars)), start)

    def segment(self) -> tuple[Infon, bool]:
        t = self.tok
        if t.kind in ("ident", "keyword"):
            self.next()
            seg: Infon = String(t.text, bare=True)
        elif t.kind == "int":
            self.next()
            seg = Int(int(t.text))
        elif t.kind == "string":
            self.next()
            seg = String(t.value)
        elif self.at("["):
            seg = self.array()
        elif self.at("<"):
            seg = self.name()
        elif self.at("%"):
            self.next()
            v = self.next()
            seg = Var(v.text)
        elif self.at("("):
            self.next()
            seg = self.statement()
            self.expect(")")
        else:
            self.fail("expected a name segment", ["token", "integer", "[", "<", "%", "("])
        dollar = False
        if self.at("$") and not self.at(":", 1):
            self.next()
            dollar = True
        return seg, dollar

    def collection(self) -> Infon:
        start = self.expect("{")
        items, flags, is_open, _ = self.item_list(end="}")
        self.expect("}")
        return self.mark(Collection(tuple(items), tuple(flags), open=is_open), start)

    def array(self) -> Infon:
        start = self.expect("[")
        items = []
        is_open = False
        while not self.at("]"):
            if self.at("..."):
                self.next()
                is_open = True
            else:
                items.append(self.statement())
            if not self.at("]"):
                self.expect(",")
        self.expect("]")
        return self.mark(Array(tuple(items), is_open), start)


def parse_infon(tokens: list[Token]) -> Infon:
    """Parse exactly one infon from ``tokens``."""
    p = Parser(tokens)
    node = p.statement()
    if p.tok.kind != "eof":
        p.fail("unexpected token after infon", ["end of input"])
    return node


def parse_program(source: str) -> Infon:
    """Parse a whole file.  Several top-level statements form one collection."""
    return Parser(tokenize(source)).program()


def parse_tree(source: str) -> SyntaxTree:
    p = Parser(tokenize(source))
    root = p.program()
    return SyntaxTree(root, p.spans)
