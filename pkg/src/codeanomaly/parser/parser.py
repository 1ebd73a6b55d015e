"""Recursive-descent parser for the supported Kotlin subset."""
from __future__ import annotations

from contextlib import contextmanager
from typing import Optional

from .lexer import Token, TokenKind, tokenize
from .nodes import DEEP_RECURSION, SyntaxNode, recursion_headroom

K, I, OP, P = TokenKind.KEYWORD, TokenKind.IDENTIFIER, TokenKind.OPERATOR, TokenKind.PUNCTUATION

MODIFIERS = frozenset({
    "public", "private", "protected", "internal", "open", "final", "abstract",
    "override", "suspend", "inline", "data", "enum", "sealed", "companion",
    "lateinit", "const", "operator", "infix", "tailrec", "external", "inner",
    "vararg", "noinline", "crossinline", "annotation", "value", "expect", "actual",
})
DECLARATION_KEYWORDS = frozenset({"fun", "val", "var", "class", "interface", "object", "typealias"})
ASSIGNMENT_OPERATORS = frozenset({"=", "+=", "-=", "*=", "/=", "%="})
UNSUPPORTED = {
    "typealias": "type aliases are outside the supported subset",
    "typeof": "typeof is outside the supported subset",
}
_MAX_RECURSION = DEEP_RECURSION


class ParseError(Exception):
    """Input is not in the supported subset, with position and expected tokens."""

    def __init__(self, message: str, line: int, column: int, expected=()):
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        detail = f" (expected {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{message} at {line}:{column}{detail}")


class _Backtrack(Exception):
    pass


class Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = [t for t in tokens if t.kind is not TokenKind.COMMENT]
        self.pos = 0
        # True while inside ( ) or [ ], where line breaks are insignificant
        self.nl_stack = [False]
        if self.toks:
            last = self.toks[-1]
            eof_line, eof_col = last.end_line, last.column + len(last.text)
        else:
            eof_line, eof_col = 1, 1
        self.eof = Token(P, "<EOF>", eof_line, eof_col, -1)

    # ------------------------------------------------------------------ helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.pos] if self.pos < len(self.toks) else self.eof

    def peek(self, k: int = 1) -> Token:
        i = self.pos + k
        return self.toks[i] if i < len(self.toks) else self.eof

    def at(self, text: str, kind: Optional[TokenKind] = None) -> bool:
        t = self.tok
        return t is not self.eof and t.text == text and (kind is None or t.kind is kind)

    def at_eof(self) -> bool:
        return self.pos >= len(self.toks)

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            return self.advance()
        return None

    def advance(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def error(self, message: str, expected=()):
        t = self.tok
        found = "end of input" if t is self.eof else repr(t.text)
        return ParseError(f"{message}, found {found}", t.line, t.column, expected)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}", {text})
        return self.advance()

    def expect_ident(self) -> Token:
        if self.tok.kind is not I or self.at_eof():
            raise self.error("expected identifier", {"<identifier>"})
        return self.advance()

    def newline_before(self, i: Optional[int] = None) -> bool:
        i = self.pos if i is None else i
        if self.nl_stack[-1] or i == 0 or i > len(self.toks):
            return False
        cur = self.toks[i] if i < len(self.toks) else None
        if cur is None:
            return True
        return cur.line > self.toks[i - 1].end_line

    def adjacent(self, i: int) -> bool:
        """Token i starts exactly where token i-1 ends."""
        if i <= 0 or i >= len(self.toks):
            return False
        a, b = self.toks[i - 1], self.toks[i]
        return a.offset + len(a.text) == b.offset

    def node(self, kind: str, children, start: int, text=None) -> SyntaxNode:
        first = self.toks[start] if start < len(self.toks) else self.eof
        end_i = max(start, self.pos - 1)
        last = self.toks[end_i] if end_i < len(self.toks) else self.eof
        return SyntaxNode(kind, [c for c in children if c is not None], text,
                          (first.line, max(first.line, last.end_line)))

    def leaf(self, kind: str, tok: Token) -> SyntaxNode:
        return SyntaxNode(kind, [], tok.text, (tok.line, tok.end_line))

    @contextmanager
    def group(self, insensitive: bool):
        self.nl_stack.append(insensitive)
        try:
            yield
        finally:
            self.nl_stack.pop()

    def mark(self):
        return self.pos, len(self.nl_stack)

    def reset(self, mark):
        self.pos = mark[0]
        del self.nl_stack[mark[1]:]

    # ------------------------------------------------------------- file level
    def parse_file(self) -> SyntaxNode:
        children = []
        if self.at("package", K):
            start = self.pos
            self.advance()
            children.append(self.node("PACKAGE_DIRECTIVE", self.dotted_name(), start))
            self.end_of_statement()
        while self.at("import", K):
            start = self.pos
            self.advance()
            parts = self.dotted_name(allow_star=True)
            if self.at("as", K):
                a = self.pos
                self.advance()
                parts.append(self.node("IMPORT_ALIAS", [self.leaf("IDENTIFIER", self.expect_ident())], a))
            children.append(self.node("IMPORT_DIRECTIVE", parts, start))
            self.end_of_statement()
        while not self.at_eof():
            if self.accept(";"):
                continue
            decl = self.declaration()
            if decl is None:
                raise self.error("expected a declaration", DECLARATION_KEYWORDS - {"typealias"})
            children.append(decl)
        return SyntaxNode("FILE", children, None, (1, self.eof.line))

    def dotted_name(self, allow_star: bool = False) -> list[SyntaxNode]:
        parts = [self.leaf("IDENTIFIER", self.expect_ident())]
        while self.at("."):
            self.advance()
            if allow_star and self.at("*"):
                parts.append(self.leaf("OPERATION", self.advance()))
                break
            parts.append(self.leaf("IDENTIFIER", self.expect_ident()))
        return parts

    def end_of_statement(self) -> None:
        if self.at_eof() or self.at("}") or self.accept(";"):
            return
        if not self.newline_before():
            raise self.error("expected end of statement", {";", "<newline>"})

    # ------------------------------------------------------------ declarations
    def declaration_ahead(self, i: Optional[int] = None) -> bool:
        i = self.pos if i is None else i
        toks = self.toks
        while i < len(toks):
            t = toks[i]
            if t.kind is K and t.text in DECLARATION_KEYWORDS:
                return True
            if t.kind is I and t.text in MODIFIERS:
                i += 1
            elif t.text == "@" and t.kind is P:
                i = self._skip_annotation(i)
                if i < 0:
                    return False
            else:
                return False
        return False

    def _skip_annotation(self, i: int) -> int:
        toks = self.toks
        i += 1
        if i >= len(toks) or toks[i].kind is not I:
            return -1
        i += 1
        while i + 1 < len(toks) and toks[i].text == "." and toks[i + 1].kind is I:
            i += 2
        if i < len(toks) and toks[i].text == "(" and toks[i].line == toks[i - 1].end_line:
            depth = 0
            while i < len(toks):
                if toks[i].text in ("(", "[") and toks[i].kind is P:
                    depth += 1
                elif toks[i].text in (")", "]") and toks[i].kind is P:
                    depth -= 1
                    if depth == 0:
                        return i + 1
                i += 1
            return -1
        return i

    def annotation(self) -> SyntaxNode:
        start = self.pos
        self.expect("@")
        parts = self.dotted_name()
        if self.at("(") and not self.newline_before():
            parts.append(self.value_arguments())
        return self.node("ANNOTATION", parts, start)

    def modifier_list(self, extra=frozenset()) -> Optional[SyntaxNode]:
        start = self.pos
        items = []
        while True:
            t = self.tok
            if t.kind is P and t.text == "@":
                items.append(self.annotation())
            elif t.kind is I and t.text in MODIFIERS and self._modifier_position():
                items.append(self.leaf("MODIFIER", self.advance()))
            elif t.kind is K and t.text in extra:
                items.append(self.leaf("MODIFIER", self.advance()))
            else:
                break
        return self.node("MODIFIER_LIST", items, start) if items else None

    def _modifier_position(self) -> bool:
        nxt = self.peek()
        if nxt is self.eof:
            return False
        if nxt.kind is K and nxt.text in DECLARATION_KEYWORDS | {"val", "var"}:
            return True
        if nxt.kind is I:
            # `vararg x: Int`, `private val`, `override suspend fun`
            return True
        return nxt.text == "@"

    def declaration(self, local: bool = False) -> Optional[SyntaxNode]:
        if not self.declaration_ahead():
            return None
        start = self.pos
        mods = self.modifier_list()
        t = self.tok
        if t.text in UNSUPPORTED and t.kind is K:
            raise self.error(UNSUPPORTED[t.text])
        if t.text == "fun":
            return self.function(start, mods)
        if t.text in ("val", "var"):
            return self.property(start, mods, accessors=not local)
        if t.text == "class":
            return self.class_decl(start, mods)
        if t.text == "interface":
            return self.interface_decl(start, mods)
        if t.text == "object":
            return self.object_decl(start, mods)
        raise self.error("expected a declaration", DECLARATION_KEYWORDS - {"typealias"})

    def receiver_and_name(self) -> list[SyntaxNode]:
        """`foo`, `String.foo`, `List<T>.foo`, `String?.foo` -> [RECEIVER_TYPE?, IDENTIFIER]."""
        start = self.pos
        segments = [self.expect_ident()]
        type_args = None
        nullable = None
        while True:
            if self.at("<") and type_args is None:
                type_args = self.type_arguments()
                continue
            if self.at("?", OP) and self.peek().text == ".":
                nullable = self.leaf("OPERATION", self.advance())
                continue
            if self.at(".") and self.peek().kind is I:
                self.advance()
                if type_args is not None or nullable is not None:
                    name = self.expect_ident()
                    ref = [self.leaf("IDENTIFIER", s) for s in segments] + [type_args, nullable]
                    rstart = start
                    recv = SyntaxNode("RECEIVER_TYPE", [
                        SyntaxNode("TYPE_REFERENCE", [c for c in ref if c is not None], None,
                                   (self.toks[rstart].line, self.toks[rstart].line))],
                        None, (self.toks[rstart].line, self.toks[rstart].line))
                    return [recv, self.leaf("IDENTIFIER", name)]
                segments.append(self.expect_ident())
                continue
            break
        if type_args is not None or nullable is not None:
            raise self.error("expected '.' after receiver type", {"."})
        name = segments.pop()
        out = []
        if segments:
            line = segments[0].line
            ref = SyntaxNode("TYPE_REFERENCE", [self.leaf("IDENTIFIER", s) for s in segments], None,
                             (line, line))
            out.append(SyntaxNode("RECEIVER_TYPE", [ref], None, (line, line)))
        out.append(self.leaf("IDENTIFIER", name))
        return out

    def function(self, start: int, mods) -> SyntaxNode:
        self.expect("fun")
        children = [mods]
        if self.at("<"):
            children.append(self.type_parameters())
        if self.at("("):
            raise self.error("anonymous functions are outside the supported subset")
        children.extend(self.receiver_and_name())
        children.append(self.parameters())
        if self.accept(":"):
            children.append(self.type_ref())
        if self.at("{"):
            children.append(self.block())
        elif self.accept("="):
            children.append(self.expression())
        return self.node("FUNCTION", children, start)

    def parameters(self, constructor: bool = False) -> SyntaxNode:
        start = self.pos
        self.expect("(")
        params = []
        with self.group(True):
            while not self.at(")"):
                params.append(self.parameter(constructor))
                if not self.accept(","):
                    break
            self.expect(")")
        return self.node("PARAMETER_LIST", params, start)

    def parameter(self, constructor: bool) -> SyntaxNode:
        start = self.pos
        mods = self.modifier_list(frozenset({"val", "var"}) if constructor else frozenset())
        name = self.leaf("IDENTIFIER", self.expect_ident())
        self.expect(":")
        children = [mods, name, self.type_ref()]
        if self.accept("="):
            children.append(self.expression())
        return self.node("PARAMETER", children, start)

    def type_parameters(self) -> SyntaxNode:
        start = self.pos
        self.expect("<")
        params = []
        with self.group(True):
            while True:
                pstart = self.pos
                items = []
                while (self.tok.kind is I and self.tok.text in ("reified", "out")
                       and self.peek().kind is I) or (self.at("in", K) and self.peek().kind is I):
                    items.append(self.leaf("MODIFIER", self.advance()))
                items.append(self.leaf("IDENTIFIER", self.expect_ident()))
                if self.accept(":"):
                    items.append(self.type_ref())
                params.append(self.node("TYPE_PARAMETER", items, pstart))
                if not self.accept(","):
                    break
            self.expect(">")
        return self.node("TYPE_PARAMETER_LIST", params, start)

    def property(self, start: int, mods, accessors: bool = True) -> SyntaxNode:
        children = [mods, self.leaf("KEYWORD", self.advance())]
        if self.at("<"):
            children.append(self.type_parameters())
        if self.at("("):
            children.append(self.destructuring())
        else:
            children.extend(self.receiver_and_name())
        if self.accept(":"):
            children.append(self.type_ref())
        if self.at("by") and self.tok.kind is I and not self.newline_before():
            dstart = self.pos
            self.advance()
            children.append(self.node("DELEGATE", [self.expression()], dstart))
        elif self.accept("="):
            children.append(self.expression())
        while accessors and self.accessor_ahead():
            children.append(self.accessor())
        return self.node("PROPERTY", children, start)

    def accessor_ahead(self) -> bool:
        i = self.pos
        while i < len(self.toks) and self.toks[i].kind is I and self.toks[i].text in MODIFIERS:
            i += 1
        if i >= len(self.toks):
            return False
        t = self.toks[i]
        if not (t.kind is I and t.text in ("get", "set")):
            return False
        nxt = self.toks[i + 1] if i + 1 < len(self.toks) else None
        if nxt is None or nxt.line > t.line:
            return True
        return nxt.text in ("(", ";", "}") or nxt.kind is K or nxt.text in ("get", "set")

    def accessor(self) -> SyntaxNode:
        start = self.pos
        mods = []
        mstart = self.pos
        while self.tok.kind is I and self.tok.text in MODIFIERS:
            mods.append(self.leaf("MODIFIER", self.advance()))
        children = [self.node("MODIFIER_LIST", mods, mstart) if mods else None,
                    self.leaf("KEYWORD", self.advance())]
        if self.at("(") and not self.newline_before():
            pstart = self.pos
            self.advance()
            params = []
            with self.group(True):
                if not self.at(")"):
                    p0 = self.pos
                    ident = self.leaf("IDENTIFIER", self.expect_ident())
                    ptype = self.type_ref() if self.accept(":") else None
                    params.append(self.node("PARAMETER", [ident, ptype], p0))
                self.expect(")")
            children.append(self.node("PARAMETER_LIST", params, pstart))
            if self.accept(":"):
                children.append(self.type_ref())
            if self.at("{"):
                children.append(self.block())
            else:
                self.expect("=")
                children.append(self.expression())
        return self.node("PROPERTY_ACCESSOR", children, start)

    def destructuring(self) -> SyntaxNode:
        start = self.pos
        self.expect("(")
        names = []
        with self.group(True):
            while True:
                pstart = self.pos
                ident = self.leaf("IDENTIFIER", self.expect_ident())
                ptype = self.type_ref() if self.accept(":") else None
                names.append(self.node("PARAMETER", [ident, ptype], pstart))
                if not self.accept(","):
                    break
            self.expect(")")
        return self.node("DESTRUCTURING", names, start)

    def class_decl(self, start: int, mods) -> SyntaxNode:
        self.expect("class")
        children = [mods, self.leaf("IDENTIFIER", self.expect_ident())]
        if self.at("<"):
            children.append(self.type_parameters())
        if self.at("(") and not self.newline_before():
            cstart = self.pos
            children.append(self.node("PRIMARY_CONSTRUCTOR", [self.parameters(constructor=True)], cstart))
        children.append(self.supertypes())
        is_enum = mods is not None and any(m.kind == "MODIFIER" and m.text == "enum" for m in mods.children)
        if self.at("{"):
            children.append(self.class_body(is_enum))
        return self.node("CLASS", children, start)

    def interface_decl(self, start: int, mods) -> SyntaxNode:
        self.expect("interface")
        children = [mods, self.leaf("IDENTIFIER", self.expect_ident())]
        if self.at("<"):
            children.append(self.type_parameters())
        children.append(self.supertypes())
        if self.at("{"):
            children.append(self.class_body(False))
        return self.node("INTERFACE", children, start)

    def object_decl(self, start: int, mods) -> SyntaxNode:
        self.expect("object")
        children = [mods]
        if self.tok.kind is I:
            children.append(self.leaf("IDENTIFIER", self.advance()))
        elif mods is None:
            raise self.error("object expressions are outside the supported subset")
        children.append(self.supertypes())
        if self.at("{"):
            children.append(self.class_body(False))
        return self.node("OBJECT", children, start)

    def supertypes(self) -> Optional[SyntaxNode]:
        if not self.at(":"):
            return None
        start = self.pos
        self.advance()
        items = []
        while True:
            sstart = self.pos
            parts = [self.type_ref()]
            if self.at("(") and not self.newline_before():
                parts.append(self.value_arguments())
            if self.at("by") and self.tok.kind is I:
                dstart = self.pos
                self.advance()
                parts.append(self.node("DELEGATE", [self.expression()], dstart))
            items.append(self.node("SUPERTYPE", parts, sstart))
            if not self.accept(","):
                break
        return self.node("SUPERTYPE_LIST", items, start)

    def class_body(self, is_enum: bool) -> SyntaxNode:
        start = self.pos
        self.expect("{")
        members = []
        with self.group(False):
            if is_enum:
                while self.tok.kind is I or self.at("@"):
                    members.append(self.enum_entry())
                    if not self.accept(","):
                        break
                self.accept(";")
            while not self.at("}"):
                if self.at_eof():
                    raise self.error("unclosed class body", {"}"})
                if self.accept(";"):
                    continue
                if self.at("init") and self.tok.kind is I and self.peek().text == "{":
                    istart = self.pos
                    self.advance()
                    members.append(self.node("INITIALIZER", [self.block()], istart))
                    continue
                decl = self.declaration()
                if decl is None:
                    raise self.error("expected a member declaration", DECLARATION_KEYWORDS - {"typealias"})
                members.append(decl)
            self.expect("}")
        return self.node("CLASS_BODY", members, start)

    def enum_entry(self) -> SyntaxNode:
        start = self.pos
        mods = None
        if self.at("@"):
            mstart = self.pos
            anns = []
            while self.at("@"):
                anns.append(self.annotation())
            mods = self.node("MODIFIER_LIST", anns, mstart)
        children = [mods, self.leaf("IDENTIFIER", self.expect_ident())]
        if self.at("("):
            children.append(self.value_arguments())
        if self.at("{"):
            children.append(self.class_body(False))
        return self.node("ENUM_ENTRY", children, start)

    # ------------------------------------------------------------------ types
    def type_ref(self) -> SyntaxNode:
        start = self.pos
        children = []
        if self.at("suspend") and self.tok.kind is I and self.peek().text == "(":
            children.append(self.leaf("MODIFIER", self.advance()))
        if self.at("("):
            fstart = self.pos
            self.advance()
            params = []
            with self.group(True):
                while not self.at(")"):
                    params.append(self.type_ref())
                    if not self.accept(","):
                        break
                self.expect(")")
            if self.accept("->"):
                ret = self.type_ref()
                children.append(self.node("FUNCTION_TYPE", params + [ret], fstart))
                return self.node("TYPE_REFERENCE", children, start)
            if (len(params) == 1 and params[0].children
                    and params[0].children[-1].kind == "FUNCTION_TYPE" and self.at("?", OP)):
                children.extend(params[0].children)
                children.append(self.leaf("OPERATION", self.advance()))
                return self.node("TYPE_REFERENCE", children, start)
            raise self.error("expected '->' in function type", {"->"})
        if children:
            raise self.error("expected function type", {"("})
        children.extend(self.dotted_name())
        if self.at("<"):
            children.append(self.type_arguments())
        if self.at("?", OP) and not self.newline_before():
            children.append(self.leaf("OPERATION", self.advance()))
        return self.node("TYPE_REFERENCE", children, start)

    def type_arguments(self) -> SyntaxNode:
        start = self.pos
        self.expect("<")
        args = []
        with self.group(True):
            while True:
                if self.at("*", OP):
                    args.append(self.leaf("STAR_PROJECTION", self.advance()))
                else:
                    astart = self.pos
                    variance = None
                    if ((self.at("out") and self.tok.kind is I) or self.at("in", K)) and \
                            self.peek().kind is I:
                        variance = self.leaf("MODIFIER", self.advance())
                    ref = self.type_ref()
                    if variance is not None:
                        ref = self.node("TYPE_REFERENCE", [variance] + ref.children, astart)
                    args.append(ref)
                if not self.accept(","):
                    break
            self.expect(">")
        return self.node("TYPE_ARGUMENT_LIST", args, start)

    # -------------------------------------------------------------- statements
    def block(self) -> SyntaxNode:
        start = self.pos
        self.expect("{")
        with self.group(False):
            stmts = self.statements()
            self.expect("}")
        return self.node("BLOCK", stmts, start)

    def statements(self) -> list[SyntaxNode]:
        stmts = []
        while True:
            while self.accept(";"):
                pass
            if self.at("}") or self.at_eof():
                return stmts
            stmts.append(self.statement())
            self.end_of_statement()

    def statement(self, allow_declarations: bool = True) -> SyntaxNode:
        t = self.tok
        if t.kind is K and t.text in UNSUPPORTED:
            raise self.error(UNSUPPORTED[t.text])
        if allow_declarations:
            decl = self.declaration(local=True)
            if decl is not None:
                return decl
        if t.kind is K:
            if t.text == "for":
                return self.for_loop()
            if t.text == "while":
                return self.while_loop()
            if t.text == "do":
                return self.do_while()
        start = self.pos
        expr = self.expression()
        if self.tok.kind is OP and self.tok.text in ASSIGNMENT_OPERATORS and not self.newline_before():
            op = self.leaf("OPERATION", self.advance())
            return self.node("ASSIGNMENT", [expr, op, self.expression()], start)
        return expr

    def control_body(self) -> SyntaxNode:
        if self.at("{"):
            return self.block()
        if self.at(";") or self.at("}") or self.at_eof():
            raise self.error("expected a statement", {"{", "<statement>"})
        return self.statement(allow_declarations=False)

    def for_loop(self) -> SyntaxNode:
        start = self.pos
        self.expect("for")
        self.expect("(")
        with self.group(True):
            if self.at("("):
                var = self.destructuring()
            else:
                pstart = self.pos
                ident = self.leaf("IDENTIFIER", self.expect_ident())
                ptype = self.type_ref() if self.accept(":") else None
                var = self.node("PARAMETER", [ident, ptype], pstart)
            self.expect("in")
            iterable = self.expression()
            self.expect(")")
        return self.node("FOR_LOOP", [var, iterable, self.control_body()], start)

    def while_loop(self) -> SyntaxNode:
        start = self.pos
        self.expect("while")
        cond = self.paren_expression()
        return self.node("WHILE_LOOP", [cond, self.control_body()], start)

    def do_while(self) -> SyntaxNode:
        start = self.pos
        self.expect("do")
        body = self.control_body()
        self.expect("while")
        return self.node("DO_WHILE_LOOP", [body, self.paren_expression()], start)

    def paren_expression(self) -> SyntaxNode:
        self.expect("(")
        with self.group(True):
            expr = self.expression()
            self.expect(")")
        return expr

    # ------------------------------------------------------------- expressions
    def expression(self) -> SyntaxNode:
        return self.binary_left(self.conjunction, ("||",), newline_ok=True)

    def conjunction(self) -> SyntaxNode:
        return self.binary_left(self.equality, ("&&",), newline_ok=True)

    def equality(self) -> SyntaxNode:
        return self.binary_left(self.comparison, ("==", "!=", "===", "!=="))

    def comparison(self) -> SyntaxNode:
        return self.binary_left(self.named_check, ("<", ">", "<=", ">="))

    def binary_left(self, operand, ops, newline_ok: bool = False) -> SyntaxNode:
        start = self.pos
        left = operand()
        while self.tok.kind is OP and self.tok.text in ops and (newline_ok or not self.newline_before()):
            op = self.leaf("OPERATION", self.advance())
            right = operand()
            left = self.node("BINARY_EXPR", [left, op, right], start)
        return left

    def _negated_keyword(self, word: str) -> bool:
        return (self.at("!", OP) and self.peek().kind is K and self.peek().text == word
                and self.adjacent(self.pos + 1))

    def named_check(self) -> SyntaxNode:
        start = self.pos
        left = self.elvis()
        while not self.newline_before():
            if self.at("in", K) or self._negated_keyword("in"):
                op_tok = self._keyword_operator()
                left = self.node("BINARY_EXPR", [left, op_tok, self.elvis()], start)
            elif self.at("is", K) or self._negated_keyword("is"):
                op_tok = self._keyword_operator()
                left = self.node("IS_EXPR", [left, op_tok, self.type_ref()], start)
            else:
                break
        return left

    def _keyword_operator(self) -> SyntaxNode:
        first = self.advance()
        if first.text == "!":
            kw = self.advance()
            return SyntaxNode("OPERATION", [], "!" + kw.text, (first.line, first.line))
        return self.leaf("OPERATION", first)

    def elvis(self) -> SyntaxNode:
        return self.binary_left(self.infix_call, ("?:",), newline_ok=True)

    def infix_call(self) -> SyntaxNode:
        start = self.pos
        left = self.range_expr()
        while self.tok.kind is I and not self.newline_before() and self.tok.text not in ("by",):
            op = self.leaf("OPERATION", self.advance())
            left = self.node("BINARY_EXPR", [left, op, self.range_expr()], start)
        return left

    def range_expr(self) -> SyntaxNode:
        return self.binary_left(self.additive, ("..", "..<"))

    def additive(self) -> SyntaxNode:
        return self.binary_left(self.multiplicative, ("+", "-"))

    def multiplicative(self) -> SyntaxNode:
        return self.binary_left(self.as_expr, ("*", "/", "%"))

    def as_expr(self) -> SyntaxNode:
        start = self.pos
        left = self.prefix()
        while self.at("as", K) and not self.newline_before():
            as_tok = self.advance()
            if self.at("?", OP) and self.adjacent(self.pos):
                self.advance()
                op = SyntaxNode("OPERATION", [], "as?", (as_tok.line, as_tok.line))
            else:
                op = self.leaf("OPERATION", as_tok)
            left = self.node("AS_EXPR", [left, op, self.type_ref()], start)
        return left

    def prefix(self) -> SyntaxNode:
        if self.tok.kind is OP and self.tok.text in ("-", "+", "!", "++", "--"):
            start = self.pos
            op = self.leaf("OPERATION", self.advance())
            return self.node("PREFIX_EXPR", [op, self.prefix()], start)
        return self.postfix()

    def postfix(self) -> SyntaxNode:
        start = self.pos
        expr = self.primary()
        while True:
            t = self.tok
            if t is self.eof:
                return expr
            nl = self.newline_before()
            if t.text in (".", "?.") and t.kind in (P, OP):
                self.advance()
                selector = self.call_suffixes(self.pos, self.selector())
                kind = "DOT_QUALIFIED" if t.text == "." else "SAFE_QUALIFIED"
                expr = self.node(kind, [expr, selector], start)
            elif nl:
                return expr
            elif t.text == "(" and t.kind is P:
                expr = self.call_suffixes(start, expr)
            elif t.text == "<" and expr.kind == "IDENTIFIER" and self._type_args_call_ahead():
                expr = self.call_suffixes(start, expr)
            elif t.text == "{" and expr.kind == "IDENTIFIER":
                expr = self.call_suffixes(start, expr)
            elif t.text == "[" and t.kind is P:
                self.advance()
                idx = []
                with self.group(True):
                    while True:
                        idx.append(self.expression())
                        if not self.accept(","):
                            break
                    self.expect("]")
                expr = self.node("INDEX_EXPR", [expr] + idx, start)
            elif t.text == "::":
                self.advance()
                if self.at("class", K):
                    self.advance()
                    expr = self.node("CLASS_LITERAL", [expr], start)
                else:
                    expr = self.node("CALLABLE_REFERENCE", [expr, self.leaf("IDENTIFIER", self.expect_ident())],
                                     start)
            elif t.kind is OP and t.text in ("!!", "++", "--"):
                op = self.leaf("OPERATION", self.advance())
                expr = self.node("POSTFIX_EXPR", [expr, op], start)
            else:
                return expr

    def selector(self) -> SyntaxNode:
        if self.tok.kind is I:
            return self.leaf("IDENTIFIER", self.advance())
        raise self.error("expected member name", {"<identifier>"})

    def _type_args_call_ahead(self) -> bool:
        m = self.mark()
        try:
            self.type_arguments()
            ok = (self.at("(") or self.at("{") or self.at("::")) and not self.newline_before()
        except ParseError:
            ok = False
        self.reset(m)
        return ok

    def call_suffixes(self, start: int, callee: SyntaxNode) -> SyntaxNode:
        """Type arguments, value arguments and a trailing lambda after a callee."""
        parts = [callee]
        if self.at("<") and not self.newline_before() and self._type_args_call_ahead():
            parts.append(self.type_arguments())
        if self.at("(") and not self.newline_before():
            parts.append(self.value_arguments())
        if self.at("{") and not self.newline_before():
            parts.append(self.lambda_literal())
        if len(parts) == 1:
            return callee
        if len(parts) == 2 and parts[1].kind == "TYPE_ARGUMENT_LIST":
            raise self.error("expected call arguments after type arguments", {"(", "{"})
        return self.node("CALL_EXPR", parts, start)

    def value_arguments(self) -> SyntaxNode:
        start = self.pos
        self.expect("(")
        args = []
        with self.group(True):
            while not self.at(")"):
                astart = self.pos
                if self.tok.kind is I and self.peek().text == "=" and self.peek().kind is OP:
                    name = self.leaf("IDENTIFIER", self.advance())
                    self.advance()
                    args.append(self.node("VALUE_ARGUMENT", [name, self.expression()], astart))
                elif self.at("*", OP):
                    star = self.leaf("OPERATION", self.advance())
                    args.append(self.node("VALUE_ARGUMENT", [star, self.expression()], astart))
                else:
                    args.append(self.node("VALUE_ARGUMENT", [self.expression()], astart))
                if not self.accept(","):
                    break
            self.expect(")")
        return self.node("VALUE_ARGUMENT_LIST", args, start)

    def primary(self) -> SyntaxNode:
        t = self.tok
        start = self.pos
        if t is self.eof:
            raise self.error("expected an expression", {"<expression>"})
        if t.kind in (TokenKind.LITERAL_INT, TokenKind.LITERAL_STRING):
            return self.leaf("LITERAL", self.advance())
        if t.kind is I:
            return self.leaf("IDENTIFIER", self.advance())
        if t.kind is P and t.text in ('"', '"""'):
            return self.string_template()
        if t.kind is P and t.text == "(":
            self.advance()
            with self.group(True):
                inner = self.expression()
                self.expect(")")
            return self.node("PARENTHESIZED", [inner], start)
        if t.kind is P and t.text == "{":
            return self.lambda_literal()
        if t.text == "::" and t.kind is OP:
            self.advance()
            return self.node("CALLABLE_REFERENCE", [self.leaf("IDENTIFIER", self.expect_ident())], start)
        if t.kind is K:
            word = t.text
            if word in ("true", "false", "null"):
                return self.leaf("LITERAL", self.advance())
            if word == "this":
                self.advance()
                return self.node("THIS", [self.label()], start)
            if word == "super":
                self.advance()
                return self.node("SUPER", [], start)
            if word == "if":
                return self.if_expr()
            if word == "when":
                return self.when_expr()
            if word == "try":
                return self.try_expr()
            if word in ("return", "throw", "break", "continue"):
                return self.jump()
            if word in UNSUPPORTED:
                raise self.error(UNSUPPORTED[word])
            if word == "object":
                raise self.error("object expressions are outside the supported subset")
            if word == "fun":
                raise self.error("anonymous functions are outside the supported subset")
        raise self.error("expected an expression", {"<expression>"})

    def label(self) -> Optional[SyntaxNode]:
        if self.at("@") and self.adjacent(self.pos) and self.peek().kind is I and self.adjacent(self.pos + 1):
            self.advance()
            return self.leaf("LABEL", self.advance())
        return None

    def can_start_expression(self) -> bool:
        t = self.tok
        if t is self.eof or self.newline_before():
            return False
        if t.kind in (TokenKind.LITERAL_INT, TokenKind.LITERAL_STRING, I):
            return True
        if t.kind is K:
            return t.text in ("true", "false", "null", "this", "super", "if", "when", "try",
                              "return", "throw", "break", "continue")
        if t.kind is P:
            return t.text in ("(", "{", '"', '"""')
        return t.text in ("-", "+", "!", "++", "--", "::")

    def jump(self) -> SyntaxNode:
        start = self.pos
        word = self.advance().text
        kind = {"return": "RETURN", "throw": "THROW", "break": "BREAK", "continue": "CONTINUE"}[word]
        children = []
        if word != "throw":
            children.append(self.label())
        if word == "throw":
            children.append(self.expression())
        elif word == "return" and self.can_start_expression():
            children.append(self.expression())
        return self.node(kind, children, start)

    def if_expr(self) -> SyntaxNode:
        start = self.pos
        self.expect("if")
        children = [self.paren_expression(), self.control_body()]
        m = self.mark()
        self.accept(";")
        if self.at("else", K):
            self.advance()
            children.append(self.control_body())
        else:
            self.reset(m)
        return self.node("IF_EXPR", children, start)

    def when_expr(self) -> SyntaxNode:
        start = self.pos
        self.expect("when")
        children = []
        if self.at("("):
            children.append(self.paren_expression())
        self.expect("{")
        with self.group(False):
            while True:
                while self.accept(";"):
                    pass
                if self.at("}"):
                    break
                children.append(self.when_entry())
            self.expect("}")
        return self.node("WHEN_EXPR", children, start)

    def when_entry(self) -> SyntaxNode:
        start = self.pos
        conds = []
        if self.at("else", K):
            conds.append(self.leaf("WHEN_ELSE", self.advance()))
        else:
            with self.group(True):
                while True:
                    cstart = self.pos
                    if self.at("in", K) or self._negated_keyword("in"):
                        op = self._keyword_operator()
                        conds.append(self.node("WHEN_CONDITION", [op, self.expression()], cstart))
                    elif self.at("is", K) or self._negated_keyword("is"):
                        op = self._keyword_operator()
                        conds.append(self.node("WHEN_CONDITION", [op, self.type_ref()], cstart))
                    else:
                        conds.append(self.node("WHEN_CONDITION", [self.expression()], cstart))
                    if not self.accept(","):
                        break
        self.expect("->")
        return self.node("WHEN_ENTRY", conds + [self.control_body()], start)

    def try_expr(self) -> SyntaxNode:
        start = self.pos
        self.expect("try")
        children = [self.block()]
        while self.at("catch", K):
            cstart = self.pos
            self.advance()
            self.expect("(")
            with self.group(True):
                pstart = self.pos
                ident = self.leaf("IDENTIFIER", self.expect_ident())
                self.expect(":")
                param = self.node("PARAMETER", [ident, self.type_ref()], pstart)
                self.expect(")")
            children.append(self.node("CATCH_CLAUSE", [param, self.block()], cstart))
        if self.at("finally", K):
            fstart = self.pos
            self.advance()
            children.append(self.node("FINALLY_CLAUSE", [self.block()], fstart))
        if len(children) == 1:
            raise self.error("try needs catch or finally", {"catch", "finally"})
        return self.node("TRY_EXPR", children, start)

    def lambda_literal(self) -> SyntaxNode:
        start = self.pos
        self.expect("{")
        with self.group(False):
            children = [self.lambda_parameters()]
            bstart = self.pos
            stmts = self.statements()
            children.append(self.node("BLOCK", stmts, bstart))
            self.expect("}")
        return self.node("LAMBDA", children, start)

    def lambda_parameters(self) -> Optional[SyntaxNode]:
        m = self.mark()
        start = self.pos
        params = []
        try:
            with self.group(True):
                if not self.at("->"):
                    while True:
                        if self.at("("):
                            params.append(self.destructuring())
                        else:
                            pstart = self.pos
                            if self.tok.kind is not I:
                                raise _Backtrack
                            ident = self.leaf("IDENTIFIER", self.advance())
                            ptype = self.type_ref() if self.accept(":") else None
                            params.append(self.node("PARAMETER", [ident, ptype], pstart))
                        if not self.accept(","):
                            break
                if not self.at("->"):
                    raise _Backtrack
            self.advance()
        except (_Backtrack, ParseError):
            self.reset(m)
            return None
        return self.node("LAMBDA_PARAMETERS", params, start)

    def string_template(self) -> SyntaxNode:
        start = self.pos
        quote = self.advance()
        children = [self.leaf("OPEN_QUOTE", quote)]
        while True:
            t = self.tok
            if t is self.eof:
                raise self.error("unterminated string template", {quote.text})
            if t.kind is P and t.text == quote.text:
                self.advance()
                break
            if t.kind is TokenKind.LITERAL_STRING:
                children.append(self.leaf("STRING_ENTRY", self.advance()))
            elif t.kind is P and t.text == "$":
                estart = self.pos
                self.advance()
                ref = self.advance()
                inner = SyntaxNode("THIS", [], None, (ref.line, ref.line)) if ref.text == "this" \
                    else self.leaf("IDENTIFIER", ref)
                children.append(self.node("SHORT_TEMPLATE_EXPR", [inner], estart))
            elif t.kind is P and t.text == "${":
                estart = self.pos
                self.advance()
                with self.group(True):
                    inner = self.expression()
                    self.expect("}")
                children.append(self.node("LONG_TEMPLATE_EXPR", [inner], estart))
            else:
                raise self.error("unexpected token in string template")
        return self.node("STRING_TEMPLATE", children, start)


def parse(tokens: list[Token]) -> SyntaxNode:
    """Parse a token list (comments are dropped) into a FILE-rooted tree."""
    p = Parser(tokens)
    with recursion_headroom(_MAX_RECURSION):
        try:
            return p.parse_file()
        except RecursionError:
            t = p.tok
            raise ParseError("nesting too deep", t.line, t.column) from None


def parse_source(source: str) -> SyntaxNode:
    return parse(tokenize(source))
