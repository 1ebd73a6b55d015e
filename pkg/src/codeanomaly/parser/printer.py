"""Render syntax trees back to Kotlin-subset source.

Output re-parses to a structurally identical tree. Layout is canonical
(one statement per line, four-space indents), not the original formatting.
"""
from __future__ import annotations

from .nodes import SyntaxNode, recursion_headroom

INDENT = "    "
_LEAVES = {"OPERATION", "IDENTIFIER", "LITERAL", "LABEL", "KEYWORD", "MODIFIER",
           "OPEN_QUOTE", "STRING_ENTRY", "STAR_PROJECTION", "WHEN_ELSE"}


def to_source(node: SyntaxNode) -> str:
    with recursion_headroom():
        if node.kind == "FILE":
            parts = [_p(c, 0) for c in node.children]
            return "\n\n".join(parts) + ("\n" if parts else "")
        return _p(node, 0)


def _p(n: SyntaxNode, ind: int) -> str:
    if n.kind in _LEAVES:
        return n.text or ""
    fn = _PRINTERS.get(n.kind)
    if fn is None:
        raise ValueError(f"cannot print node kind {n.kind}")
    return fn(n, ind)


def _join(nodes, ind, sep=", "):
    return sep.join(_p(c, ind) for c in nodes)


def _mods(n: SyntaxNode, ind: int) -> str:
    m = n.child("MODIFIER_LIST")
    return _p(m, ind) + " " if m is not None else ""


def _block_lines(stmts, ind: int) -> str:
    pad = INDENT * (ind + 1)
    body = "".join(pad + _p(s, ind + 1) + "\n" for s in stmts)
    return "{\n" + body + INDENT * ind + "}"


def _block(n, ind):
    if not n.children:
        return "{}"
    return _block_lines(n.children, ind)


def _dotted(n, ind):
    return ".".join(_p(c, ind) for c in n.children if c.kind in ("IDENTIFIER", "OPERATION"))


def _import(n, ind):
    alias = n.child("IMPORT_ALIAS")
    out = "import " + _dotted(n, ind)
    if alias is not None:
        out += " as " + alias.children[0].text
    return out


def _function(n, ind):
    out = _mods(n, ind) + "fun "
    after_params = False
    for c in n.children:
        k = c.kind
        if k == "MODIFIER_LIST":
            continue
        if k == "TYPE_PARAMETER_LIST":
            out += _p(c, ind) + " "
        elif k == "RECEIVER_TYPE":
            out += _p(c, ind) + "."
        elif k == "IDENTIFIER" and not after_params:
            out += c.text
        elif k == "PARAMETER_LIST":
            out += _p(c, ind)
            after_params = True
        elif k == "TYPE_REFERENCE" and after_params:
            out += ": " + _p(c, ind)
        elif k == "BLOCK":
            out += " " + _block(c, ind)
        else:
            out += " = " + _p(c, ind)
    return out


def _modifier_list(n, ind):
    return " ".join(_p(c, ind) for c in n.children)


def _annotation(n, ind):
    args = n.child("VALUE_ARGUMENT_LIST")
    return "@" + _dotted(n, ind) + (_p(args, ind) if args is not None else "")


def _parameter(n, ind):
    out = _mods(n, ind)
    named = False
    for c in n.children:
        if c.kind == "MODIFIER_LIST":
            continue
        if not named:
            out += c.text
            named = True
        elif c.kind == "TYPE_REFERENCE":
            out += ": " + _p(c, ind)
        else:
            out += " = " + _p(c, ind)
    return out


def _type_parameter(n, ind):
    out = ""
    for c in n.children:
        if c.kind == "MODIFIER":
            out += c.text + " "
        elif c.kind == "IDENTIFIER":
            out += c.text
        else:
            out += " : " + _p(c, ind)
    return out


def _type_ref(n, ind):
    mods = "".join(c.text + " " for c in n.children if c.kind == "MODIFIER")
    rest = [c for c in n.children if c.kind != "MODIFIER"]
    nullable = bool(rest) and rest[-1].kind == "OPERATION" and rest[-1].text == "?"
    if rest and rest[0].kind == "FUNCTION_TYPE":
        ft = _p(rest[0], ind)
        return mods + ("(" + ft + ")?" if nullable else ft)
    out = ".".join(c.text for c in rest if c.kind == "IDENTIFIER")
    targs = n.child("TYPE_ARGUMENT_LIST")
    if targs is not None:
        out += _p(targs, ind)
    return mods + out + ("?" if nullable else "")


def _function_type(n, ind):
    *params, ret = n.children
    return "(" + _join(params, ind) + ") -> " + _p(ret, ind)


def _property(n, ind):
    out = _mods(n, ind)
    named = False
    for c in n.children:
        k = c.kind
        if k == "MODIFIER_LIST":
            continue
        if k == "KEYWORD":
            out += c.text + " "
        elif k == "TYPE_PARAMETER_LIST":
            out += _p(c, ind) + " "
        elif k == "RECEIVER_TYPE":
            out += _p(c, ind) + "."
        elif k in ("IDENTIFIER", "DESTRUCTURING") and not named:
            out += _p(c, ind)
            named = True
        elif k == "TYPE_REFERENCE":
            out += ": " + _p(c, ind)
        elif k == "DELEGATE":
            out += " by " + _p(c.children[0], ind)
        elif k == "PROPERTY_ACCESSOR":
            out += "\n" + INDENT * (ind + 1) + _p(c, ind + 1)
        else:
            out += " = " + _p(c, ind)
    return out


def _accessor(n, ind):
    out = _mods(n, ind)
    for c in n.children:
        k = c.kind
        if k == "MODIFIER_LIST":
            continue
        if k in ("KEYWORD", "PARAMETER_LIST"):
            out += _p(c, ind)
        elif k == "TYPE_REFERENCE":
            out += ": " + _p(c, ind)
        elif k == "BLOCK":
            out += " " + _block(c, ind)
        else:
            out += " = " + _p(c, ind)
    return out


def _classlike(keyword):
    def render(n, ind):
        out = _mods(n, ind) + keyword
        for c in n.children:
            k = c.kind
            if k == "MODIFIER_LIST":
                continue
            if k == "IDENTIFIER":
                out += " " + c.text
            elif k in ("TYPE_PARAMETER_LIST", "PRIMARY_CONSTRUCTOR"):
                out += _p(c, ind)
            elif k == "SUPERTYPE_LIST":
                out += " : " + _p(c, ind)
            elif k == "CLASS_BODY":
                out += " " + _p(c, ind)
        return out
    return render


def _class_body(n, ind):
    if not n.children:
        return "{}"
    pad = INDENT * (ind + 1)
    entries = [c for c in n.children if c.kind == "ENUM_ENTRY"]
    members = [c for c in n.children if c.kind != "ENUM_ENTRY"]
    lines = []
    if entries:
        lines.append(",\n".join(pad + _p(e, ind + 1) for e in entries) + ";")
    lines.extend(pad + _p(m, ind + 1) for m in members)
    return "{\n" + "\n".join(lines) + "\n" + INDENT * ind + "}"


def _enum_entry(n, ind):
    out = _mods(n, ind)
    for c in n.children:
        if c.kind == "IDENTIFIER":
            out += c.text
        elif c.kind == "VALUE_ARGUMENT_LIST":
            out += _p(c, ind)
        elif c.kind == "CLASS_BODY":
            out += " " + _p(c, ind)
    return out


def _supertype(n, ind):
    out = ""
    for c in n.children:
        if c.kind == "DELEGATE":
            out += " by " + _p(c.children[0], ind)
        else:
            out += _p(c, ind)
    return out


def _body(n, ind):
    return _block(n, ind) if n.kind == "BLOCK" else _p(n, ind)


def _if(n, ind):
    out = "if (" + _p(n.children[0], ind) + ") " + _body(n.children[1], ind)
    if len(n.children) > 2:
        out += " else " + _body(n.children[2], ind)
    return out


def _when(n, ind):
    entries = [c for c in n.children if c.kind == "WHEN_ENTRY"]
    subject = [c for c in n.children if c.kind != "WHEN_ENTRY"]
    out = "when"
    if subject:
        out += " (" + _p(subject[0], ind) + ")"
    if not entries:
        return out + " {}"
    return out + " " + _block_lines(entries, ind)


def _when_entry(n, ind):
    *conds, body = n.children
    return _join(conds, ind) + " -> " + _body(body, ind)


def _when_condition(n, ind):
    if len(n.children) == 2:
        return n.children[0].text + " " + _p(n.children[1], ind)
    return _p(n.children[0], ind)


def _try(n, ind):
    out = "try " + _block(n.children[0], ind)
    for c in n.children[1:]:
        if c.kind == "CATCH_CLAUSE":
            out += " catch (" + _p(c.children[0], ind) + ") " + _block(c.children[1], ind)
        else:
            out += " finally " + _block(c.children[0], ind)
    return out


def _for(n, ind):
    var, iterable, body = n.children
    return "for (" + _p(var, ind) + " in " + _p(iterable, ind) + ") " + _body(body, ind)


def _jump(word):
    def render(n, ind):
        out = word
        for c in n.children:
            if c.kind == "LABEL":
                out += "@" + c.text
            else:
                out += " " + _p(c, ind)
        return out
    return render


def _prefix(n, ind):
    op, operand = n.children
    inner = _p(operand, ind)
    if inner[:1] in "+-!":
        inner = " " + inner
    return op.text + inner


def _lambda(n, ind):
    params = n.child("LAMBDA_PARAMETERS")
    body = n.child("BLOCK")
    head = "{"
    if params is not None:
        head += " " + _join(params.children, ind) + (" ->" if params.children else "->")
    if not body.children:
        return head + (" }" if params is not None else "}")
    # render each statement once; a one-line rendering is indentation-independent
    stmts = [_p(s, ind + 1) for s in body.children]
    if len(stmts) == 1 and "\n" not in stmts[0]:
        return head + " " + stmts[0] + " }"
    pad = INDENT * (ind + 1)
    return head + "\n" + "".join(pad + s + "\n" for s in stmts) + INDENT * ind + "}"


def _string(n, ind):
    quote = n.children[0].text
    return quote + "".join(_p(c, ind) for c in n.children[1:]) + quote


def _call(n, ind):
    out = ""
    for c in n.children:
        if c.kind == "LAMBDA":
            out += " " + _p(c, ind)
        else:
            out += _p(c, ind)
    return out


def _value_argument(n, ind):
    if len(n.children) == 2:
        first, expr = n.children
        if first.kind == "OPERATION":
            return "*" + _p(expr, ind)
        return first.text + " = " + _p(expr, ind)
    return _p(n.children[0], ind)


def _binary(n, ind):
    left, op, right = n.children
    if op.kind == "OPERATION" and op.text in ("..", "..<"):
        return _p(left, ind) + op.text + _p(right, ind)
    return " ".join(_p(c, ind) for c in n.children)


_PRINTERS = {
    "PACKAGE_DIRECTIVE": lambda n, ind: "package " + _dotted(n, ind),
    "IMPORT_DIRECTIVE": _import,
    "FUNCTION": _function,
    "MODIFIER_LIST": _modifier_list,
    "ANNOTATION": _annotation,
    "PARAMETER_LIST": lambda n, ind: "(" + _join(n.children, ind) + ")",
    "PARAMETER": _parameter,
    "DESTRUCTURING": lambda n, ind: "(" + _join(n.children, ind) + ")",
    "TYPE_PARAMETER_LIST": lambda n, ind: "<" + _join(n.children, ind) + ">",
    "TYPE_PARAMETER": _type_parameter,
    "RECEIVER_TYPE": lambda n, ind: _p(n.children[0], ind),
    "TYPE_REFERENCE": _type_ref,
    "TYPE_ARGUMENT_LIST": lambda n, ind: "<" + _join(n.children, ind) + ">",
    "FUNCTION_TYPE": _function_type,
    "PROPERTY": _property,
    "PROPERTY_ACCESSOR": _accessor,
    "CLASS": _classlike("class"),
    "INTERFACE": _classlike("interface"),
    "OBJECT": _classlike("object"),
    "PRIMARY_CONSTRUCTOR": lambda n, ind: _p(n.children[0], ind),
    "SUPERTYPE_LIST": lambda n, ind: _join(n.children, ind),
    "SUPERTYPE": _supertype,
    "CLASS_BODY": _class_body,
    "ENUM_ENTRY": _enum_entry,
    "INITIALIZER": lambda n, ind: "init " + _block(n.children[0], ind),
    "BLOCK": _block,
    "IF_EXPR": _if,
    "WHEN_EXPR": _when,
    "WHEN_ENTRY": _when_entry,
    "WHEN_CONDITION": _when_condition,
    "TRY_EXPR": _try,
    "FOR_LOOP": _for,
    "WHILE_LOOP": lambda n, ind: "while (" + _p(n.children[0], ind) + ") " + _body(n.children[1], ind),
    "DO_WHILE_LOOP": lambda n, ind: "do " + _body(n.children[0], ind) + " while (" + _p(n.children[1], ind) + ")",
    "RETURN": _jump("return"),
    "THROW": _jump("throw"),
    "BREAK": _jump("break"),
    "CONTINUE": _jump("continue"),
    "ASSIGNMENT": _binary,
    "BINARY_EXPR": _binary,
    "IS_EXPR": _binary,
    "AS_EXPR": _binary,
    "PREFIX_EXPR": _prefix,
    "POSTFIX_EXPR": lambda n, ind: _p(n.children[0], ind) + n.children[1].text,
    "CALL_EXPR": _call,
    "VALUE_ARGUMENT_LIST": lambda n, ind: "(" + _join(n.children, ind) + ")",
    "VALUE_ARGUMENT": _value_argument,
    "DOT_QUALIFIED": lambda n, ind: _p(n.children[0], ind) + "." + _p(n.children[1], ind),
    "SAFE_QUALIFIED": lambda n, ind: _p(n.children[0], ind) + "?." + _p(n.children[1], ind),
    "INDEX_EXPR": lambda n, ind: _p(n.children[0], ind) + "[" + _join(n.children[1:], ind) + "]",
    "CALLABLE_REFERENCE": lambda n, ind: (_p(n.children[0], ind) if len(n.children) == 2 else "")
    + "::" + n.children[-1].text,
    "CLASS_LITERAL": lambda n, ind: _p(n.children[0], ind) + "::class",
    "LAMBDA": _lambda,
    "LAMBDA_PARAMETERS": lambda n, ind: _join(n.children, ind),
    "PARENTHESIZED": lambda n, ind: "(" + _p(n.children[0], ind) + ")",
    "THIS": lambda n, ind: "this" + "".join("@" + c.text for c in n.children),
    "SUPER": lambda n, ind: "super",
    "STRING_TEMPLATE": _string,
    "SHORT_TEMPLATE_EXPR": lambda n, ind: "$" + _p(n.children[0], ind),
    "LONG_TEMPLATE_EXPR": lambda n, ind: "${" + _p(n.children[0], ind) + "}",
}
