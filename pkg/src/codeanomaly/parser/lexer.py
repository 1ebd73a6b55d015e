from __future__ import annotations

import enum
from dataclasses import dataclass

KEYWORDS = frozenset({
    "as", "break", "class", "continue", "do", "else", "false", "for", "fun", "if",
    "in", "interface", "is", "null", "object", "package", "return", "super", "this",
    "throw", "true", "try", "typealias", "typeof", "val", "var", "when", "while",
    "catch", "finally", "import",
})

# longest first
OPERATORS = (
    "===", "!==", "..<",
    "?.", "?:", "::", "->", "==", "!=", "<=", ">=", "&&", "||", "++", "--",
    "+=", "-=", "*=", "/=", "%=", "!!", "..",
    "+", "-", "*", "/", "%", "=", "<", ">", "!", "?", "&",
)
PUNCTUATION = frozenset("()[]{},;:.@")


class TokenKind(enum.Enum):
    KEYWORD = "keyword"
    IDENTIFIER = "identifier"
    LITERAL_INT = "literal-int"
    LITERAL_STRING = "literal-string"
    OPERATOR = "operator"
    PUNCTUATION = "punctuation"
    COMMENT = "comment"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    line: int
    column: int
    offset: int = 0

    @property
    def end_line(self) -> int:
        return self.line + self.text.count("\n")

    def is_(self, kind: TokenKind, text: str | None = None) -> bool:
        return self.kind is kind and (text is None or self.text == text)


class LexError(Exception):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at {line}:{column}")
        self.line = line
        self.column = column


class UnterminatedString(LexError):
    pass


class IllegalCharacter(LexError):
    pass


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_part(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


class _Lexer:
    def __init__(self, source: str):
        self.src = source
        self.pos = 0
        self.line = 1
        self.col = 1
        self.tokens: list[Token] = []
        # each entry: ["code", depth] | ["str", line, col] | ["raw", line, col]
        self.modes: list[list] = [["code", 0]]

    def peek(self, k: int = 0) -> str:
        i = self.pos + k
        return self.src[i] if i < len(self.src) else ""

    def advance(self, n: int) -> str:
        text = self.src[self.pos:self.pos + n]
        for ch in text:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += n
        return text

    def emit(self, kind: TokenKind, n: int) -> None:
        line, col, off = self.line, self.col, self.pos
        self.tokens.append(Token(kind, self.advance(n), line, col, off))

    def run(self) -> list[Token]:
        while self.pos < len(self.src):
            mode = self.modes[-1]
            if mode[0] == "code":
                self.lex_code(mode)
            else:
                self.lex_string(mode)
        top = self.modes[-1]
        if top[0] in ("str", "raw"):
            raise UnterminatedString("unterminated string", top[1], top[2])
        if len(self.modes) > 1:
            # inside ${ ... } when input ended
            outer = self.modes[-2]
            raise UnterminatedString("unterminated string", outer[1], outer[2])
        return self.tokens

    def lex_code(self, mode: list) -> None:
        ch = self.peek()
        if ch in " \t\r\n\f":
            self.advance(1)
            return
        if ch == "/" and self.peek(1) == "/":
            end = self.src.find("\n", self.pos)
            end = len(self.src) if end < 0 else end
            self.emit(TokenKind.COMMENT, end - self.pos)
            return
        if ch == "/" and self.peek(1) == "*":
            self.emit(TokenKind.COMMENT, self._block_comment_length())
            return
        if ch == '"':
            if self.src.startswith('"""', self.pos):
                self.modes.append(["raw", self.line, self.col])
                self.emit(TokenKind.PUNCTUATION, 3)
            else:
                self.modes.append(["str", self.line, self.col])
                self.emit(TokenKind.PUNCTUATION, 1)
            return
        if ch == "'":
            self.emit(TokenKind.LITERAL_STRING, self._char_length())
            return
        if ch.isdigit():
            self.emit(TokenKind.LITERAL_INT, self._number_length())
            return
        if _is_ident_start(ch):
            n = 1
            while _is_ident_part(self.peek(n)):
                n += 1
            word = self.src[self.pos:self.pos + n]
            self.emit(TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENTIFIER, n)
            return
        if ch == "`":
            end = self.src.find("`", self.pos + 1)
            nl = self.src.find("\n", self.pos + 1)
            if end < 0 or (0 <= nl < end) or end == self.pos + 1:
                raise IllegalCharacter("unterminated backtick identifier", self.line, self.col)
            self.emit(TokenKind.IDENTIFIER, end - self.pos + 1)
            return
        if ch == "{":
            mode[1] += 1
            self.emit(TokenKind.PUNCTUATION, 1)
            return
        if ch == "}":
            if len(self.modes) > 1 and mode[1] == 0:
                # closes a ${ ... } template expression
                self.modes.pop()
            else:
                mode[1] -= 1
            self.emit(TokenKind.PUNCTUATION, 1)
            return
        for op in OPERATORS:
            if self.src.startswith(op, self.pos):
                self.emit(TokenKind.OPERATOR, len(op))
                return
        if ch in PUNCTUATION:
            self.emit(TokenKind.PUNCTUATION, 1)
            return
        raise IllegalCharacter(f"illegal character {ch!r}", self.line, self.col)

    def _block_comment_length(self) -> int:
        depth, i = 0, self.pos
        while i < len(self.src):
            if self.src.startswith("/*", i):
                depth += 1
                i += 2
            elif self.src.startswith("*/", i):
                depth -= 1
                i += 2
                if depth == 0:
                    return i - self.pos
            else:
                i += 1
        raise IllegalCharacter("unterminated comment", self.line, self.col)

    def _char_length(self) -> int:
        i = self.pos + 1
        if self.peek(1) == "\\":
            i += 6 if self.peek(2) == "u" else 2
        else:
            i += 1
        if i >= len(self.src) or self.src[i] != "'" or self.src[self.pos + 1] in "\n'":
            raise UnterminatedString("malformed character literal", self.line, self.col)
        return i + 1 - self.pos

    def _number_length(self) -> int:
        s, i = self.src, self.pos
        if s.startswith(("0x", "0X", "0b", "0B"), i):
            i += 2
            while i < len(s) and (s[i].isalnum() or s[i] == "_") and s[i] not in "lL":
                i += 1
        else:
            while i < len(s) and (s[i].isdigit() or s[i] == "_"):
                i += 1
            if i + 1 < len(s) and s[i] == "." and s[i + 1].isdigit():
                i += 1
                while i < len(s) and (s[i].isdigit() or s[i] == "_"):
                    i += 1
            if i < len(s) and s[i] in "eE":
                j = i + 1
                if j < len(s) and s[j] in "+-":
                    j += 1
                if j < len(s) and s[j].isdigit():
                    i = j
                    while i < len(s) and s[i].isdigit():
                        i += 1
            if i < len(s) and s[i] in "fFdD":
                i += 1
        if i < len(s) and s[i] in "lLuU":
            i += 1
            if i < len(s) and s[i] in "lL":
                i += 1
        return i - self.pos

    def lex_string(self, mode: list) -> None:
        raw = mode[0] == "raw"
        start = self.pos
        s = self.src
        i = self.pos
        while i < len(s):
            ch = s[i]
            if raw and s.startswith('"""', i) and not s.startswith('""""', i):
                break
            if not raw and ch == '"':
                break
            if ch == "$" and i + 1 < len(s) and (s[i + 1] == "{" or _is_ident_start(s[i + 1])):
                break
            if not raw and ch == "\n":
                raise UnterminatedString("unterminated string", mode[1], mode[2])
            if not raw and ch == "\\":
                i += 2
                continue
            i += 1
        if i > start:
            self.emit(TokenKind.LITERAL_STRING, i - start)
        if self.pos >= len(s):
            return
        if s.startswith("${", self.pos):
            self.emit(TokenKind.PUNCTUATION, 2)
            self.modes.append(["code", 0])
        elif s[self.pos] == "$":
            self.emit(TokenKind.PUNCTUATION, 1)
            n = 1
            while _is_ident_part(self.peek(n)):
                n += 1
            word = s[self.pos:self.pos + n]
            self.emit(TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENTIFIER, n)
        else:
            self.modes.pop()
            self.emit(TokenKind.PUNCTUATION, 3 if raw else 1)


def tokenize(source: str) -> list[Token]:
    """Split Kotlin-subset source into tokens, comments included.

    String literals are split into their parts: an opening quote, literal
    runs, ``$``/``${`` template markers with the embedded tokens, and a
    closing quote.
    """
    return _Lexer(source).run()
