"""Tokenizer for the Java subset.

Tokens carry 1-based line/column positions. Whitespace and comments
(``//`` and ``/* */``) are skipped and never produce tokens.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import LexError

# Keywords of the accepted subset plus constructs that are lexed but later
# rejected by the parser with a dedicated diagnostic.
KEYWORDS = frozenset({
    "int", "boolean", "long", "double", "char", "void", "String",
    "if", "else", "while", "for", "switch", "case", "default",
    "return", "break", "continue",
    "true", "false", "null",
    "public", "private", "protected", "static", "final",
    # lexed, rejected at parse time:
    "class", "interface", "extends", "implements", "import", "package",
    "try", "catch", "finally", "throw", "throws", "new",
})

OPERATORS = (
    "++", "--", "+=", "-=", "*=", "/=", "%=",
    "==", "!=", "<=", ">=", "&&", "||",
    "+", "-", "*", "/", "%", "<", ">", "=", "!",
)

PUNCT = "(){}[];,.:"

KIND_IDENT = "Ident"
KIND_KEYWORD = "Keyword"
KIND_INT = "IntLit"
KIND_STRING = "StringLit"
KIND_OP = "Operator"
KIND_PUNCT = "Punct"


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.col})"


def tokenize(source: str) -> list[Token]:
    """Split source into tokens; raises LexError on characters outside the alphabet."""
    toks: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def advance(k: int):
        nonlocal i, line, col
        for _ in range(k):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if source.startswith("//", i):
            j = source.find("\n", i)
            advance((j if j != -1 else n) - i)
            continue
        if source.startswith("/*", i):
            j = source.find("*/", i + 2)
            if j == -1:
                raise LexError(line, col, "unterminated block comment")
            advance(j + 2 - i)
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            kind = KIND_KEYWORD if text in KEYWORDS else KIND_IDENT
            toks.append(Token(kind, text, line, col))
            advance(j - i)
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            toks.append(Token(KIND_INT, source[i:j], line, col))
            advance(j - i)
            continue
        if ch == '"':
            j = i + 1
            while j < n and source[j] != '"':
                if source[j] == "\n":
                    raise LexError(line, col, "unterminated string literal")
                if source[j] == "\\" and j + 1 < n:
                    j += 1
                j += 1
            if j >= n:
                raise LexError(line, col, "unterminated string literal")
            toks.append(Token(KIND_STRING, source[i:j + 1], line, col))
            advance(j + 1 - i)
            continue
        for op in OPERATORS:
            if source.startswith(op, i):
                toks.append(Token(KIND_OP, op, line, col))
                advance(len(op))
                break
        else:
            if ch in PUNCT:
                toks.append(Token(KIND_PUNCT, ch, line, col))
                advance(1)
            else:
                raise LexError(line, col, f"unrecognized character {ch!r}")
    return toks
