"""Seeded generator of Kotlin corpora with planted anomalies.

Ordinary functions come from 20 templates with randomized names, literals
and sizes. Planted functions are extreme on purpose (a 4000-branch
``when``, a 150-parameter signature, ...) so detector recall can be checked.
A matching bytecode listing can be produced for compiler-induced runs.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from pathlib import Path

_WORDS = ("item", "value", "count", "node", "user", "order", "price", "name", "index", "total",
          "cache", "entry", "token", "limit", "score", "state", "event", "buffer", "config", "result")


def _name(rng: random.Random, prefix: str = "") -> str:
    a, b = rng.sample(_WORDS, 2)
    word = a + b.capitalize() + str(rng.randrange(1000))
    return (prefix + word[0].upper() + word[1:]) if prefix else word


def _t_getter(r):
    return f"fun {_name(r, 'get')}(): Int = {_name(r)} + {r.randrange(100)}"


def _t_sum_loop(r):
    v = _name(r)
    return (f"fun {_name(r, 'sum')}(xs: List<Int>): Int {{\n    var {v} = 0\n"
            f"    for (x in xs) {{\n        {v} += x * {r.randrange(1, 9)}\n    }}\n    return {v}\n}}")


def _t_when(r):
    branches = "\n".join(f"        {i} -> \"{_name(r)}\"" for i in range(r.randrange(3, 7)))
    return (f"fun {_name(r, 'label')}(code: Int): String {{\n    return when (code) {{\n{branches}\n"
            f"        else -> \"unknown\"\n    }}\n}}")


def _t_if_chain(r):
    n = r.randrange(2, 5)
    body = "\n".join(f"    {'if' if i == 0 else 'else if'} (x > {10 * (n - i)}) return {i}" for i in range(n))
    return f"fun {_name(r, 'rank')}(x: Int): Int {{\n{body}\n    return -1\n}}"


def _t_template(r):
    a, b = _name(r), _name(r)
    return f"fun {_name(r, 'describe')}({a}: String, {b}: Int): String = \"{a}=${a}, {b}=${{{b} + 1}}\""


def _t_try(r):
    return (f"fun {_name(r, 'parse')}(s: String): Int {{\n    try {{\n        return s.toInt()\n"
            f"    }} catch (e: NumberFormatException) {{\n        return {r.randrange(-5, 5)}\n    }}\n}}")


def _t_lambda_chain(r):
    steps = r.randrange(1, 4)
    chain = "".join(r.choice([f".map {{ it + {r.randrange(9)} }}", ".filter { it > 0 }",
                              f".map {{ x -> x * {r.randrange(2, 5)} }}"]) for _ in range(steps))
    return f"fun {_name(r, 'transform')}(xs: List<Int>): List<Int> = xs{chain}"


def _t_elvis(r):
    return f"fun {_name(r, 'lengthOf')}(s: String?): Int = s?.length ?: {r.randrange(10)}"


def _t_locals(r):
    names = [_name(r) for _ in range(r.randrange(2, 6))]
    lines = [f"    val {names[0]} = x * {r.randrange(1, 9)}"]
    for prev, cur in zip(names, names[1:]):
        lines.append(f"    val {cur} = {prev} + {r.randrange(1, 99)}")
    return f"fun {_name(r, 'compute')}(x: Int): Int {{\n" + "\n".join(lines) + f"\n    return {names[-1]}\n}}"


def _t_while(r):
    return (f"fun {_name(r, 'countdown')}(start: Int): Int {{\n    var i = start\n    var steps = 0\n"
            f"    while (i > {r.randrange(3)}) {{\n        i -= {r.randrange(1, 4)}\n        steps++\n    }}\n"
            f"    return steps\n}}")


def _t_extension(r):
    return f"fun String.{_name(r, 'with')}(): String = this + \"{_name(r)}\""


def _t_suspend(r):
    return (f"suspend fun {_name(r, 'load')}(id: Int): String {{\n    val raw = fetch(id)\n"
            f"    return raw.trim()\n}}")


def _t_generic(r):
    return f"fun <T> {_name(r, 'firstOr')}(xs: List<T>, fallback: T): T = if (xs.isEmpty()) fallback else xs[0]"


def _t_recursive(r):
    f = _name(r, "fact")
    return f"fun {f}(n: Int): Long = if (n <= 1) 1L else n * {f}(n - 1)"


def _t_logic(r):
    ops = [r.choice(["&&", "||"]) for _ in range(r.randrange(1, 4))]
    expr = "a"
    for i, op in enumerate(ops):
        expr += f" {op} {'!' if r.random() < 0.3 else ''}{'bcd'[i]}"
    return f"fun {_name(r, 'check')}(a: Boolean, b: Boolean, c: Boolean, d: Boolean): Boolean = {expr}"


def _t_concat(r):
    parts = " + ".join(f"\"{_name(r)}\"" for _ in range(r.randrange(2, 5)))
    return f"fun {_name(r, 'joined')}(): String = {parts}"


def _t_index(r):
    return (f"fun {_name(r, 'pick')}(xs: IntArray, i: Int): Int {{\n    val j = i % xs.size\n"
            f"    return xs[j] + xs[0] * {r.randrange(1, 5)}\n}}")


def _t_throw(r):
    return (f"fun {_name(r, 'validate')}(x: Int): Int {{\n    if (x < {r.randrange(5)}) throw "
            f"IllegalArgumentException(\"{_name(r)}\")\n    return x\n}}")


def _t_calls(r):
    return (f"fun {_name(r, 'log')}(msg: String) {{\n    println(msg)\n"
            f"    println(msg.length + {r.randrange(9)})\n}}")


def _t_local_fun(r):
    return (f"fun {_name(r, 'outer')}(x: Int): Int {{\n    fun inner(y: Int): Int = y * {r.randrange(2, 7)}\n"
            f"    return inner(x) + {r.randrange(9)}\n}}")


_EXPR_BODY = re.compile(r"^(fun [^\n]*?\)(?:: [^=\n]+)?) = ([^\n]*)$")


def _vary(src: str, r: random.Random) -> str:
    """Shape noise so template instances do not collapse onto a few identical metric vectors."""
    m = _EXPR_BODY.match(src)
    if m and r.random() < 0.5:
        src = f"{m.group(1)} {{\n    return {m.group(2)}\n}}"
    elif m:
        notes = "".join(f"    // {_name(r)}\n" for _ in range(r.randrange(12)))
        src = f"{m.group(1)} =\n{notes}    {m.group(2)}"
    extra = r.randrange(4)
    if extra:
        open_at = src.index("(", src.index("fun ") + 4)
        close_at = src.index(")", open_at)
        added = ", ".join(f"opt{i}: Int = {r.randrange(10)}" for i in range(extra))
        sep = ", " if close_at > open_at + 1 else ""
        src = src[:close_at] + sep + added + src[close_at:]
    if "{\n" in src:
        notes = "".join(f"    // {_name(r)}\n" for _ in range(r.randrange(12)))
        head = src.index("{\n") + 2
        src = src[:head] + notes + src[head:]
    return src


TEMPLATES = (
    _t_getter, _t_sum_loop, _t_when, _t_if_chain, _t_template, _t_try, _t_lambda_chain, _t_elvis,
    _t_locals, _t_while, _t_extension, _t_suspend, _t_generic, _t_recursive, _t_logic, _t_concat,
    _t_index, _t_throw, _t_calls, _t_local_fun,
)
assert len(TEMPLATES) == 20


def _p_huge_when(r):
    branches = "\n".join(f"        {i} -> {i * 7 % 13}" for i in range(4000))
    return "fun plantedHugeWhen(x: Int): Int {\n    return when (x) {\n" + branches + "\n        else -> 0\n    }\n}"


def _p_many_params(r):
    params = ", ".join(f"p{i}: Int = {i}" for i in range(150))
    return f"fun plantedManyParams({params}): Int = p0 + p149"


def _p_deep_ifs(r):
    depth = 60
    body = "".join("    " * (i + 1) + f"if (x > {i}) {{\n" for i in range(depth))
    body += "    " * (depth + 1) + "return x\n"
    body += "".join("    " * (depth - i) + "}\n" for i in range(depth))
    return "fun plantedDeepIfs(x: Int): Int {\n" + body + "    return 0\n}"


def _p_call_chain(r):
    chain = "".join(f".map {{ it + {i} }}.filter {{ it > {i} }}" for i in range(250))
    return f"fun plantedCallChain(xs: List<Int>): List<Int> = xs{chain}"


def _p_nested_lambdas(r):
    depth = 150
    inner = "x"
    for i in range(depth):
        inner = f"run {{ try {{ {inner} }} catch (e: Exception) {{ {i} }} }}"
    return f"fun plantedNestedLambdas(x: Int): Int = {inner}"


PLANTED = (_p_huge_when, _p_many_params, _p_deep_ifs, _p_call_chain, _p_nested_lambdas)
PLANTED_NAMES = ("plantedHugeWhen", "plantedManyParams", "plantedDeepIfs", "plantedCallChain",
                 "plantedNestedLambdas")
# built from constructs that occur in ordinary code, but nested far beyond it
STRUCTURALLY_UNIQUE = "plantedNestedLambdas"


@dataclass
class SyntheticCorpus:
    files: dict[str, str] = field(default_factory=dict)
    planted: tuple[str, ...] = PLANTED_NAMES

    def write(self, root) -> Path:
        root = Path(root)
        for rel, text in self.files.items():
            p = root / rel
            p.parent.mkdir(parents=True, exist_ok=True)
            p.write_text(text, encoding="utf-8")
        return root


def generate_corpus(n_functions: int = 5000, seed: int = 0, per_file: int = 25,
                    planted: bool = True) -> SyntheticCorpus:
    """``n_functions`` template-derived functions plus, optionally, the 5 planted ones."""
    r = random.Random(seed)
    funcs = [_vary(TEMPLATES[i % len(TEMPLATES)](r), r) for i in range(n_functions)]
    r.shuffle(funcs)
    files = {}
    for k in range(0, len(funcs), per_file):
        idx = k // per_file
        body = "\n\n".join(funcs[k:k + per_file])
        files[f"gen/pkg{idx % 10}/file{idx:04d}.kt"] = f"package gen.pkg{idx % 10}\n\n{body}\n"
    if planted:
        body = "\n\n".join(p(r) for p in PLANTED)
        files["gen/planted/planted.kt"] = f"package gen.planted\n\n{body}\n"
    return SyntheticCorpus(files)


_PATTERNS = (
    ("aload_0", "getfield", "areturn"),
    ("iload_0", "iload_1", "iadd", "ireturn"),
    ("new", "dup", "invokespecial", "astore_1"),
    ("aload_1", "invokevirtual", "pop"),
    ("iconst_0", "istore_2", "goto", "iload_2", "ifeq"),
    ("ldc", "invokestatic", "areturn"),
    ("aload_0", "invokeinterface", "checkcast", "areturn"),
)


def synthetic_listing(class_names, seed: int = 0, inflate: dict | None = None) -> str:
    """Bytecode listing with one class per name; ``inflate`` maps a class to a repeat factor."""
    r = random.Random(seed)
    inflate = inflate or {}
    out = []
    for name in class_names:
        out.append(f"class {name}")
        for m in range(r.randrange(2, 5)):
            out.append(f"method m{m}")
            for _ in range(r.randrange(2, 6)):
                out.extend(r.choice(_PATTERNS))
            out.append("return")
        # inflation reuses ordinary patterns so the extra grams survive document-frequency filtering
        for i in range(inflate.get(name, 0)):
            out.append(f"method synthetic{i}")
            for _ in range(50):
                out.extend(r.choice(_PATTERNS))
        out.append("")
    return "\n".join(out) + "\n"
