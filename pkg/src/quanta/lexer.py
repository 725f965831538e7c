"""Tokenizer for Quanta source text."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import LexError

KEYWORDS = frozenset({
    "true", "false", "for", "if", "else", "difference", "intersection",
    "complement", "not", "gt", "lt", "ge", "le", "eq",
})

# longest first
PUNCT = (
    "::=", "...", "::", "==", "..", ":=",
    "{", "}", "(", ")", "[", "]", "<", ">", ",", ";", ":", ".", "$", "#",
    "%", "@", "?", "!", "+", "-", "*", "/", "=",
)

_ESCAPES = {
    "n": "\n", "t": "\t", "r": "\r", "0": "\0", "a": "\a", "b": "\b",
    "f": "\f", "v": "\v", "\\": "\\", "'": "'", '"': '"', "?": "?",
}

_OPEN_QUOTES = {'"': '"', "'": "'", "“": "”", "‘": "’"}


@dataclass(frozen=True)
class Token:
    kind: str  # ident | int | string | template | punct | keyword | eof
    text: str
    line: int
    col: int
    # string value after escape processing
    value: str = ""
    # no whitespace between this token and the previous one
    glued: bool = False

    @property
    def pos(self) -> str:
        return "%d:%d" % (self.line, self.col)

    def is_(self, kind: str, text: str | None = None) -> bool:
        if self.kind != kind:
            return False
        return text is None or self.text.lower() == text


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens, dropping comments and whitespace.

    The returned list always ends with an ``eof`` token.
    """
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)
    glued = False

    def advance(k: int) -> None:
        nonlocal i, line, col
        for ch in source[i:i + k]:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += k

    while i < n:
        ch = source[i]
        if ch.isspace():
            advance(1)
            glued = False
            continue
        if source.startswith("//", i):
            j = source.find("\n", i)
            advance((j if j >= 0 else n) - i)
            glued = False
            continue
        if source.startswith("/*", i):
            start = (line, col)
            depth = 0
            while True:
                if i >= n:
                    raise LexError("unterminated block comment", *start)
                if source.startswith("/*", i):
                    depth += 1
                    advance(2)
                elif source.startswith("*/", i):
                    depth -= 1
                    advance(2)
                    if depth == 0:
                        break
                else:
                    advance(1)
            glued = False
            continue

        start_line, start_col = line, col
        template = False
        if ch == "$" and i + 1 < n and source[i + 1] in _OPEN_QUOTES:
            template = True
            advance(1)
            ch = source[i]
        if ch in _OPEN_QUOTES:
            close = _OPEN_QUOTES[ch]
            j = i + 1
            buf = []
            while True:
                if j >= n:
                    raise LexError("unterminated string literal", start_line, start_col)
                c = source[j]
                if c == close:
                    break
                if c == "\\" and j + 1 < n:
                    nxt = source[j + 1]
                    if nxt in _ESCAPES:
                        buf.append(_ESCAPES[nxt])
                        j += 2
                        continue
                    if nxt == "x":
                        k = j + 2
                        while k < n and k < j + 4 and source[k] in "0123456789abcdefABCDEF":
                            k += 1
                        if k == j + 2:
                            raise LexError("bad \\x escape", start_line, start_col)
                        buf.append(chr(int(source[j + 2:k], 16)))
                        j = k
                        continue
                    if nxt in "01234567":
                        k = j + 1
                        while k < n and k < j + 4 and source[k] in "01234567":
                            k += 1
                        buf.append(chr(int(source[j + 1:k], 8)))
                        j = k
                        continue
                    buf.append(nxt)
                    j += 2
                    continue
                buf.append(c)
                j += 1
            text = source[i:j + 1]
            advance(j + 1 - i)
            toks.append(Token("template" if template else "string", text,
                              start_line, start_col, "".join(buf), glued))
            glued = True
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            toks.append(Token("int", source[i:j], line, col, source[i:j], glued))
            advance(j - i)
            glued = True
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            kind = "keyword" if word.lower() in KEYWORDS else "ident"
            toks.append(Token(kind, word, line, col, word, glued))
            advance(j - i)
            glued = True
            continue
        for p in PUNCT:
            if source.startswith(p, i):
                toks.append(Token("punct", p, line, col, p, glued))
                advance(len(p))
                glued = True
                break
        else:
            raise LexError("unexpected character %r" % ch, line, col)
    toks.append(Token("eof", "", line, col, "", glued))
    return toks
