"""Tokenizer and parser for a Kotlin subset producing :class:`SyntaxNode` trees."""
from .lexer import IllegalCharacter, LexError, Token, TokenKind, UnterminatedString, tokenize
from .nodes import NODE_KINDS, SyntaxNode, UnknownNodeKind, height
from .parser import ParseError, parse, parse_source
from .printer import to_source
from .subset import Grammar, supported_subset

__all__ = [
    "NODE_KINDS", "Grammar", "IllegalCharacter", "LexError", "ParseError", "SyntaxNode",
    "Token", "TokenKind", "UnknownNodeKind", "UnterminatedString", "height", "parse",
    "parse_source", "supported_subset", "to_source", "tokenize",
]
