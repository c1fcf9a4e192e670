"""Recursive-descent parser for the Java subset.

The grammar is documented in docs/grammar.ebnf. A fragment is a single
method declaration. Constructs outside the subset (classes, generics,
try/catch, imports, object creation) are rejected with a diagnostic.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError, UnsupportedConstruct
from .lexer import (KIND_IDENT, KIND_INT, KIND_KEYWORD, KIND_OP, KIND_PUNCT,
                    KIND_STRING, Token, tokenize)

TYPE_KEYWORDS = frozenset({"int", "boolean", "long", "double", "char", "void", "String"})
MODIFIERS = frozenset({"public", "private", "protected", "static", "final"})
REJECTED_KEYWORDS = frozenset({
    "class", "interface", "extends", "implements", "import", "package",
    "try", "catch", "finally", "throw", "throws", "new",
})

ASSIGN_OPS = frozenset({"=", "+=", "-=", "*=", "/=", "%="})

# node kind vocabulary
METHOD_DECLARATION = "MethodDeclaration"
PARAMETER = "Parameter"
TYPE_NAME = "TypeName"
BLOCK = "Block"
LOCAL_VARIABLE_DECLARATION = "LocalVariableDeclaration"
VARIABLE_DECLARATOR = "VariableDeclarator"
EXPRESSION_STATEMENT = "ExpressionStatement"
ASSIGNMENT = "Assignment"
IF_STATEMENT = "IfStatement"
WHILE_STATEMENT = "WhileStatement"
FOR_STATEMENT = "ForStatement"
SWITCH_STATEMENT = "SwitchStatement"
SWITCH_CASE = "SwitchCase"
RETURN_STATEMENT = "ReturnStatement"
BREAK_STATEMENT = "BreakStatement"
CONTINUE_STATEMENT = "ContinueStatement"
BINARY_OPERATION = "BinaryOperation"
UNARY_OPERATION = "UnaryOperation"
METHOD_INVOCATION = "MethodInvocation"
FIELD_ACCESS = "FieldAccess"
ARRAY_ACCESS = "ArrayAccess"
IDENTIFIER = "Identifier"
LITERAL = "Literal"


@dataclass
class AstNode:
    id: int
    kind: str
    token: str | None
    children: list[int]
    line: int = 0
    col: int = 0


@dataclass
class Ast:
    nodes: list[AstNode] = field(default_factory=list)
    root: int = -1

    def node(self, node_id: int) -> AstNode:
        return self.nodes[node_id]

    def children(self, node_id: int) -> list[AstNode]:
        return [self.nodes[c] for c in self.nodes[node_id].children]

    def preorder(self, start: int | None = None):
        """Yield nodes depth-first in source order."""
        stack = [self.root if start is None else start]
        while stack:
            nid = stack.pop()
            node = self.nodes[nid]
            yield node
            stack.extend(reversed(node.children))

    def subtree_tokens(self, node_id: int, kind: str) -> list[str]:
        return [n.token for n in self.preorder(node_id) if n.kind == kind and n.token is not None]

    def __len__(self):
        return len(self.nodes)


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.nodes: list[AstNode] = []

    # -- token helpers -------------------------------------------------

    def _peek(self, offset: int = 0) -> Token | None:
        idx = self.pos + offset
        return self.tokens[idx] if idx < len(self.tokens) else None

    def _at(self, kind: str, text: str | None = None) -> bool:
        tok = self._peek()
        if tok is None or tok.kind != kind:
            return False
        return text is None or tok.text == text

    def _advance(self) -> Token:
        tok = self._peek()
        if tok is None:
            self._fail("more input")
        self.pos += 1
        return tok

    def _expect(self, kind: str, text: str | None = None) -> Token:
        if not self._at(kind, text):
            self._fail(text if text is not None else kind)
        return self._advance()

    def _fail(self, expected: str):
        tok = self._peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            line = last.line if last else 1
            col = last.col + len(last.text) if last else 1
            raise ParseError(expected, "end of input", line, col)
        raise ParseError(expected, f"{tok.kind} {tok.text!r}", tok.line, tok.col)

    def _reject_unsupported(self):
        tok = self._peek()
        if tok is not None and tok.kind == KIND_KEYWORD and tok.text in REJECTED_KEYWORDS:
            raise UnsupportedConstruct(tok.text, tok.line, tok.col)

    # -- node construction ----------------------------------------------

    def _make(self, kind: str, token: str | None, children: list[int],
              line: int = 0, col: int = 0) -> int:
        nid = len(self.nodes)
        self.nodes.append(AstNode(nid, kind, token, list(children), line, col))
        return nid

    # -- grammar --------------------------------------------------------

    def parse_unit(self) -> Ast:
        method = self.parse_method()
        if self._peek() is not None:
            self._fail("end of input (one method per fragment)")
        return Ast(nodes=self.nodes, root=method)

    def parse_method(self) -> int:
        self._reject_unsupported()
        while self._at(KIND_KEYWORD) and self._peek().text in MODIFIERS:
            self._advance()
        ret_type = self.parse_type()
        name = self._expect(KIND_IDENT)
        self._expect(KIND_PUNCT, "(")
        params = []
        if not self._at(KIND_PUNCT, ")"):
            params.append(self.parse_param())
            while self._at(KIND_PUNCT, ","):
                self._advance()
                params.append(self.parse_param())
        self._expect(KIND_PUNCT, ")")
        body = self.parse_block()
        return self._make(METHOD_DECLARATION, name.text, [ret_type] + params + [body],
                          name.line, name.col)

    def parse_type(self) -> int:
        self._reject_unsupported()
        tok = self._peek()
        if tok is None or tok.kind != KIND_KEYWORD or tok.text not in TYPE_KEYWORDS:
            self._fail("a type")
        self._advance()
        text = tok.text
        while self._at(KIND_PUNCT, "[") and self._peek(1) is not None \
                and self._peek(1).kind == KIND_PUNCT and self._peek(1).text == "]":
            self._advance()
            self._advance()
            text += "[]"
        return self._make(TYPE_NAME, text, [], tok.line, tok.col)

    def parse_param(self) -> int:
        type_id = self.parse_type()
        name = self._expect(KIND_IDENT)
        return self._make(PARAMETER, name.text, [type_id], name.line, name.col)

    def parse_block(self) -> int:
        open_tok = self._expect(KIND_PUNCT, "{")
        stmts = []
        while not self._at(KIND_PUNCT, "}"):
            if self._peek() is None:
                self._fail("'}'")
            stmts.append(self.parse_statement())
        self._expect(KIND_PUNCT, "}")
        return self._make(BLOCK, None, stmts, open_tok.line, open_tok.col)

    def parse_statement(self) -> int:
        self._reject_unsupported()
        tok = self._peek()
        if tok is None:
            self._fail("a statement")
        if tok.kind == KIND_PUNCT and tok.text == "{":
            return self.parse_block()
        if tok.kind == KIND_KEYWORD:
            if tok.text == "if":
                return self.parse_if()
            if tok.text == "while":
                return self.parse_while()
            if tok.text == "for":
                return self.parse_for()
            if tok.text == "switch":
                return self.parse_switch()
            if tok.text == "return":
                self._advance()
                children = []
                if not self._at(KIND_PUNCT, ";"):
                    children.append(self.parse_expression())
                self._expect(KIND_PUNCT, ";")
                return self._make(RETURN_STATEMENT, None, children, tok.line, tok.col)
            if tok.text == "break":
                self._advance()
                self._expect(KIND_PUNCT, ";")
                return self._make(BREAK_STATEMENT, None, [], tok.line, tok.col)
            if tok.text == "continue":
                self._advance()
                self._expect(KIND_PUNCT, ";")
                return self._make(CONTINUE_STATEMENT, None, [], tok.line, tok.col)
            if tok.text in TYPE_KEYWORDS:
                decl = self.parse_local_declaration()
                self._expect(KIND_PUNCT, ";")
                return decl
        stmt_expr = self.parse_statement_expression()
        semi = self._expect(KIND_PUNCT, ";")
        return self._make(EXPRESSION_STATEMENT, None, [stmt_expr], tok.line, tok.col)

    def parse_local_declaration(self) -> int:
        tok = self._peek()
        type_id = self.parse_type()
        decls = [self.parse_declarator()]
        while self._at(KIND_PUNCT, ","):
            self._advance()
            decls.append(self.parse_declarator())
        return self._make(LOCAL_VARIABLE_DECLARATION, None, [type_id] + decls,
                          tok.line, tok.col)

    def parse_declarator(self) -> int:
        name = self._expect(KIND_IDENT)
        children = []
        if self._at(KIND_OP, "="):
            self._advance()
            children.append(self.parse_expression())
        return self._make(VARIABLE_DECLARATOR, name.text, children, name.line, name.col)

    def parse_if(self) -> int:
        tok = self._expect(KIND_KEYWORD, "if")
        self._expect(KIND_PUNCT, "(")
        cond = self.parse_expression()
        self._expect(KIND_PUNCT, ")")
        then = self.parse_statement()
        children = [cond, then]
        if self._at(KIND_KEYWORD, "else"):
            self._advance()
            children.append(self.parse_statement())
        return self._make(IF_STATEMENT, None, children, tok.line, tok.col)

    def parse_while(self) -> int:
        tok = self._expect(KIND_KEYWORD, "while")
        self._expect(KIND_PUNCT, "(")
        cond = self.parse_expression()
        self._expect(KIND_PUNCT, ")")
        body = self.parse_statement()
        return self._make(WHILE_STATEMENT, None, [cond, body], tok.line, tok.col)

    def parse_for(self) -> int:
        # all three clauses are required in this subset
        tok = self._expect(KIND_KEYWORD, "for")
        self._expect(KIND_PUNCT, "(")
        if self._at(KIND_KEYWORD) and self._peek().text in TYPE_KEYWORDS:
            init = self.parse_local_declaration()
        else:
            init = self.parse_statement_expression()
        self._expect(KIND_PUNCT, ";")
        cond = self.parse_expression()
        self._expect(KIND_PUNCT, ";")
        update = self.parse_statement_expression()
        self._expect(KIND_PUNCT, ")")
        body = self.parse_statement()
        return self._make(FOR_STATEMENT, None, [init, cond, update, body], tok.line, tok.col)

    def parse_switch(self) -> int:
        tok = self._expect(KIND_KEYWORD, "switch")
        self._expect(KIND_PUNCT, "(")
        selector = self.parse_expression()
        self._expect(KIND_PUNCT, ")")
        self._expect(KIND_PUNCT, "{")
        cases = []
        while not self._at(KIND_PUNCT, "}"):
            cases.append(self.parse_switch_case())
        self._expect(KIND_PUNCT, "}")
        return self._make(SWITCH_STATEMENT, None, [selector] + cases, tok.line, tok.col)

    def parse_switch_case(self) -> int:
        tok = self._peek()
        if self._at(KIND_KEYWORD, "case"):
            self._advance()
            label = self.parse_expression()
            self._expect(KIND_PUNCT, ":")
            children = [label]
            word = "case"
        elif self._at(KIND_KEYWORD, "default"):
            self._advance()
            self._expect(KIND_PUNCT, ":")
            children = []
            word = "default"
        else:
            self._fail("'case' or 'default'")
        while not (self._at(KIND_PUNCT, "}") or self._at(KIND_KEYWORD, "case")
                   or self._at(KIND_KEYWORD, "default")):
            children.append(self.parse_statement())
        return self._make(SWITCH_CASE, word, children, tok.line, tok.col)

    def parse_statement_expression(self) -> int:
        """An expression allowed in statement position: assignment, call, ++/--."""
        self._reject_unsupported()
        start = self._peek()
        target = self.parse_unary()
        if self._at(KIND_OP) and self._peek().text in ASSIGN_OPS:
            op = self._advance()
            lhs_kind = self.nodes[target].kind
            if lhs_kind not in (IDENTIFIER, FIELD_ACCESS, ARRAY_ACCESS):
                raise ParseError("an assignable target", lhs_kind, op.line, op.col)
            value = self.parse_expression()
            return self._make(ASSIGNMENT, op.text, [target, value], op.line, op.col)
        kind = self.nodes[target].kind
        if kind == METHOD_INVOCATION:
            return target
        if kind == UNARY_OPERATION and self.nodes[target].token in ("++", "--"):
            return target
        if start is not None:
            raise ParseError("a statement", f"{start.kind} {start.text!r}",
                             start.line, start.col)
        self._fail("a statement")

    # expression grammar, precedence climbing
    _BINARY_LEVELS = (("||",), ("&&",), ("==", "!="), ("<", "<=", ">", ">="),
                      ("+", "-"), ("*", "/", "%"))

    def parse_expression(self, level: int = 0) -> int:
        if level == len(self._BINARY_LEVELS):
            return self.parse_unary()
        ops = self._BINARY_LEVELS[level]
        left = self.parse_expression(level + 1)
        while self._at(KIND_OP) and self._peek().text in ops:
            op = self._advance()
            right = self.parse_expression(level + 1)
            left = self._make(BINARY_OPERATION, op.text, [left, right], op.line, op.col)
        return left

    def parse_unary(self) -> int:
        if self._at(KIND_OP) and self._peek().text in ("!", "-", "+"):
            op = self._advance()
            operand = self.parse_unary()
            return self._make(UNARY_OPERATION, op.text, [operand], op.line, op.col)
        return self.parse_postfix()

    def parse_postfix(self) -> int:
        node = self.parse_primary()
        while True:
            if self._at(KIND_PUNCT, "."):
                self._advance()
                name = self._expect(KIND_IDENT)
                if self._at(KIND_PUNCT, "("):
                    args = self.parse_arguments()
                    node = self._make(METHOD_INVOCATION, name.text, [node] + args,
                                      name.line, name.col)
                else:
                    node = self._make(FIELD_ACCESS, name.text, [node], name.line, name.col)
            elif self._at(KIND_PUNCT, "["):
                open_tok = self._advance()
                index = self.parse_expression()
                self._expect(KIND_PUNCT, "]")
                node = self._make(ARRAY_ACCESS, None, [node, index],
                                  open_tok.line, open_tok.col)
            elif self._at(KIND_OP) and self._peek().text in ("++", "--"):
                op = self._advance()
                node = self._make(UNARY_OPERATION, op.text, [node], op.line, op.col)
            else:
                return node

    def parse_arguments(self) -> list[int]:
        self._expect(KIND_PUNCT, "(")
        args = []
        if not self._at(KIND_PUNCT, ")"):
            args.append(self.parse_expression())
            while self._at(KIND_PUNCT, ","):
                self._advance()
                args.append(self.parse_expression())
        self._expect(KIND_PUNCT, ")")
        return args

    def parse_primary(self) -> int:
        self._reject_unsupported()
        tok = self._peek()
        if tok is None:
            self._fail("an expression")
        if tok.kind == KIND_INT or tok.kind == KIND_STRING:
            self._advance()
            return self._make(LITERAL, tok.text, [], tok.line, tok.col)
        if tok.kind == KIND_KEYWORD and tok.text in ("true", "false", "null"):
            self._advance()
            return self._make(LITERAL, tok.text, [], tok.line, tok.col)
        if tok.kind == KIND_IDENT:
            self._advance()
            if self._at(KIND_PUNCT, "("):
                args = self.parse_arguments()
                return self._make(METHOD_INVOCATION, tok.text, args, tok.line, tok.col)
            return self._make(IDENTIFIER, tok.text, [], tok.line, tok.col)
        if tok.kind == KIND_PUNCT and tok.text == "(":
            self._advance()
            inner = self.parse_expression()
            self._expect(KIND_PUNCT, ")")
            return inner
        self._fail("an expression")


def parse(tokens: list[Token]) -> Ast:
    """Parse a token stream into an Ast whose root is a MethodDeclaration."""
    return _Parser(tokens).parse_unit()


def parse_source(source: str) -> Ast:
    return parse(tokenize(source))
