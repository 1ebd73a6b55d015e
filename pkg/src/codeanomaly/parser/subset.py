from __future__ import annotations

from dataclasses import dataclass, field

from .lexer import KEYWORDS, LexError, tokenize
from .parser import MODIFIERS, ParseError, parse

# EBNF-ish; terminals quoted, NL = line break acting as a separator
_RULES = {
    "kotlinFile": "packageHeader? importHeader* topLevelDeclaration*",
    "packageHeader": "'package' identifier ('.' identifier)*",
    "importHeader": "'import' identifier ('.' identifier)* ('.' '*')? ('as' identifier)?",
    "topLevelDeclaration": "functionDeclaration | classDeclaration | interfaceDeclaration"
                           " | objectDeclaration | propertyDeclaration",
    "modifiers": "(annotation | modifier)+",
    "modifier": " | ".join(f"'{m}'" for m in sorted(MODIFIERS)),
    "annotation": "'@' identifier ('.' identifier)* valueArguments?",
    "functionDeclaration": "modifiers? 'fun' typeParameters? (receiverType '.')? identifier"
                           " functionValueParameters (':' type)? functionBody?",
    "functionBody": "block | '=' expression",
    "functionValueParameters": "'(' (parameter (',' parameter)* ','?)? ')'",
    "parameter": "modifiers? identifier ':' type ('=' expression)?",
    "typeParameters": "'<' typeParameter (',' typeParameter)* '>'",
    "typeParameter": "('reified' | 'in' | 'out')* identifier (':' type)?",
    "classDeclaration": "modifiers? 'class' identifier typeParameters? primaryConstructor?"
                        " (':' delegationSpecifiers)? classBody?",
    "interfaceDeclaration": "modifiers? 'interface' identifier typeParameters?"
                            " (':' delegationSpecifiers)? classBody?",
    "objectDeclaration": "modifiers? 'object' identifier? (':' delegationSpecifiers)? classBody?",
    "primaryConstructor": "'(' (classParameter (',' classParameter)* ','?)? ')'",
    "classParameter": "modifiers? ('val' | 'var')? identifier ':' type ('=' expression)?",
    "delegationSpecifiers": "delegationSpecifier (',' delegationSpecifier)*",
    "delegationSpecifier": "userType valueArguments? ('by' expression)?",
    "classBody": "'{' enumEntries? (classMemberDeclaration | ';')* '}'",
    "enumEntries": "enumEntry (',' enumEntry)* ';'?",
    "enumEntry": "annotation* identifier valueArguments? classBody?",
    "classMemberDeclaration": "topLevelDeclaration | 'init' block",
    "propertyDeclaration": "modifiers? ('val' | 'var') typeParameters? (receiverType '.')?"
                           " (identifier | destructuring) (':' type)?"
                           " ('=' expression | 'by' expression)? getterOrSetter*",
    "getterOrSetter": "modifier* ('get' | 'set') ('(' parameter? ')' (':' type)? functionBody)?",
    "destructuring": "'(' identifier (':' type)? (',' identifier (':' type)?)* ')'",
    "type": "'suspend'? (functionType | '(' functionType ')' '?' | userType '?'?)",
    "userType": "identifier ('.' identifier)* typeArguments?",
    "functionType": "'(' (type (',' type)*)? ')' '->' type",
    "typeArguments": "'<' typeProjection (',' typeProjection)* '>'",
    "typeProjection": "'*' | ('in' | 'out')? type",
    "block": "'{' statements '}'",
    "statements": "(statement ((';' | NL) statement)*)?",
    "statement": "declaration | forStatement | whileStatement | doWhileStatement"
                 " | assignment | expression",
    "assignment": "expression ('=' | '+=' | '-=' | '*=' | '/=' | '%=') expression",
    "forStatement": "'for' '(' (identifier (':' type)? | destructuring) 'in' expression ')'"
                    " controlStructureBody",
    "whileStatement": "'while' '(' expression ')' controlStructureBody",
    "doWhileStatement": "'do' controlStructureBody 'while' '(' expression ')'",
    "controlStructureBody": "block | statement",
    "expression": "disjunction",
    "disjunction": "conjunction ('||' conjunction)*",
    "conjunction": "equality ('&&' equality)*",
    "equality": "comparison (('==' | '!=' | '===' | '!==') comparison)*",
    "comparison": "namedCheck (('<' | '>' | '<=' | '>=') namedCheck)*",
    "namedCheck": "elvis (('in' | '!in') elvis | ('is' | '!is') type)*",
    "elvis": "infixCall ('?:' infixCall)*",
    "infixCall": "rangeExpression (identifier rangeExpression)*",
    "rangeExpression": "additive (('..' | '..<') additive)*",
    "additive": "multiplicative (('+' | '-') multiplicative)*",
    "multiplicative": "asExpression (('*' | '/' | '%') asExpression)*",
    "asExpression": "prefixUnary (('as' | 'as?') type)*",
    "prefixUnary": "('-' | '+' | '!' | '++' | '--')* postfixUnary",
    "postfixUnary": "primary (callSuffix | indexSuffix | navigationSuffix"
                    " | '::' (identifier | 'class') | '!!' | '++' | '--')*",
    "callSuffix": "typeArguments? valueArguments? lambdaLiteral?",
    "valueArguments": "'(' (valueArgument (',' valueArgument)* ','?)? ')'",
    "valueArgument": "(identifier '=')? '*'? expression",
    "indexSuffix": "'[' expression (',' expression)* ']'",
    "navigationSuffix": "('.' | '?.') identifier callSuffix",
    "primary": "literal | stringTemplate | identifier | '(' expression ')' | lambdaLiteral"
               " | '::' identifier | 'this' label? | 'super' | ifExpr | whenExpr | tryExpr | jump",
    "ifExpr": "'if' '(' expression ')' controlStructureBody (';'? 'else' controlStructureBody)?",
    "whenExpr": "'when' ('(' expression ')')? '{' whenEntry* '}'",
    "whenEntry": "(whenCondition (',' whenCondition)* | 'else') '->' controlStructureBody",
    "whenCondition": "expression | ('in' | '!in') expression | ('is' | '!is') type",
    "tryExpr": "'try' block ('catch' '(' identifier ':' type ')' block)* ('finally' block)?",
    "jump": "'throw' expression | 'return' label? expression? | ('break' | 'continue') label?",
    "label": "'@' identifier",
    "lambdaLiteral": "'{' (lambdaParameters? '->')? statements '}'",
    "lambdaParameters": "(identifier (':' type)? | destructuring)"
                        " (',' (identifier (':' type)? | destructuring))*",
    "stringTemplate": "('\"' | '\"\"\"') (stringContent | '$' identifier | '${' expression '}')*"
                      " ('\"' | '\"\"\"')",
    "literal": "integerLiteral | realLiteral | characterLiteral | 'true' | 'false' | 'null'",
}

_EXCLUDED = (
    "typealias", "typeof", "anonymous functions", "object expressions",
    "secondary constructors", "where clauses", "labelled loops and lambdas",
    "use-site annotation targets", "annotated expressions", "context receivers",
)


@dataclass(frozen=True)
class Grammar:
    rules: dict = field(default_factory=lambda: dict(_RULES))
    keywords: frozenset = KEYWORDS
    modifiers: frozenset = MODIFIERS
    excluded: tuple = _EXCLUDED

    def has_rule(self, name: str) -> bool:
        return name in self.rules

    def accepts(self, source: str) -> bool:
        try:
            parse(tokenize(source))
        except (ParseError, LexError):
            return False
        return True

    def to_dict(self) -> dict:
        return {
            "rules": dict(self.rules),
            "keywords": sorted(self.keywords),
            "modifiers": sorted(self.modifiers),
            "excluded": list(self.excluded),
        }


def supported_subset() -> Grammar:
    """Machine-readable description of the parsed Kotlin subset."""
    return Grammar()
