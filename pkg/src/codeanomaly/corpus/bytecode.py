"""JVM instruction listings: opcode table, listing reader, javap converter.

Listing format (one class per paragraph)::

    class com.example.FooKt
    method add
    iload_0
    iload_1
    iadd
    ireturn

Anything after the mnemonic on an instruction line is treated as operands
and dropped. Lines starting with ``#`` are comments.
"""
from __future__ import annotations

import logging
import re
from pathlib import Path
from typing import Iterable, Optional

from .units import BytecodeUnit, class_unit_id

log = logging.getLogger(__name__)


def _families(prefixes: str, suffixes: Iterable[str], stem: str) -> list[str]:
    return [f"{p}{stem}{s}" for p in prefixes for s in suffixes]


JVM_OPCODES = frozenset(
    [
        "nop", "aconst_null", "iconst_m1", "bipush", "sipush", "ldc", "ldc_w", "ldc2_w",
        "pop", "pop2", "dup", "dup_x1", "dup_x2", "dup2", "dup2_x1", "dup2_x2", "swap",
        "iinc", "i2l", "i2f", "i2d", "l2i", "l2f", "l2d", "f2i", "f2l", "f2d", "d2i", "d2l",
        "d2f", "i2b", "i2c", "i2s", "lcmp", "fcmpl", "fcmpg", "dcmpl", "dcmpg",
        "ifeq", "ifne", "iflt", "ifge", "ifgt", "ifle", "if_icmpeq", "if_icmpne", "if_icmplt",
        "if_icmpge", "if_icmpgt", "if_icmple", "if_acmpeq", "if_acmpne", "goto", "jsr", "ret",
        "tableswitch", "lookupswitch", "return", "getstatic", "putstatic", "getfield",
        "putfield", "invokevirtual", "invokespecial", "invokestatic", "invokeinterface",
        "invokedynamic", "new", "newarray", "anewarray", "arraylength", "athrow", "checkcast",
        "instanceof", "monitorenter", "monitorexit", "wide", "multianewarray", "ifnull",
        "ifnonnull", "goto_w", "jsr_w", "breakpoint", "impdep1", "impdep2",
    ]
    + [f"iconst_{i}" for i in range(6)]
    + ["lconst_0", "lconst_1", "fconst_0", "fconst_1", "fconst_2", "dconst_0", "dconst_1"]
    + _families("ilfda", [""] + [f"_{i}" for i in range(4)], "load")
    + _families("ilfda", [""] + [f"_{i}" for i in range(4)], "store")
    + _families("ilfdabcs", [""], "aload")
    + _families("ilfdabcs", [""], "astore")
    + _families("ilfd", [""], "add") + _families("ilfd", [""], "sub")
    + _families("ilfd", [""], "mul") + _families("ilfd", [""], "div")
    + _families("ilfd", [""], "rem") + _families("ilfd", [""], "neg")
    + _families("il", [""], "shl") + _families("il", [""], "shr") + _families("il", [""], "ushr")
    + _families("il", [""], "and") + _families("il", [""], "or") + _families("il", [""], "xor")
    + _families("ilfda", [""], "return")
)


class FormatError(ValueError):
    def __init__(self, message: str, path=None, line: Optional[int] = None):
        where = f"{path}:{line}: " if path is not None and line is not None else ""
        super().__init__(where + message)
        self.path = path
        self.line = line


def parse_listing(text: str, path: str = "<listing>", issues: Optional[list] = None) -> list[BytecodeUnit]:
    """Read the bytecode listing format into one unit per class, order preserved."""
    units: list[BytecodeUnit] = []
    current: Optional[dict] = None

    def close(lineno: int):
        nonlocal current
        if current is None:
            return
        if not current["instructions"]:
            msg = f"class {current['name']} has no instructions; skipped"
            log.warning("%s:%d: %s", path, lineno, msg)
            if issues is not None:
                issues.append({"path": path, "line": lineno, "issue": "empty-class", "detail": msg})
        else:
            units.append(BytecodeUnit(class_unit_id(current["name"], current["instructions"]),
                                      current["name"], current["instructions"],
                                      methods=current["methods"]))
        current = None

    lines = text.splitlines()
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            close(lineno)
            continue
        if line.startswith("#"):
            continue
        head, _, rest = line.partition(" ")
        if head == "class":
            if current is not None:
                raise FormatError("class header inside an open class (missing blank line)", path, lineno)
            name = rest.strip().replace("/", ".")
            if not name or " " in name:
                raise FormatError("malformed class header", path, lineno)
            current = {"name": name, "instructions": [], "methods": []}
        elif head == "method":
            if current is None:
                raise FormatError("method header outside a class", path, lineno)
            if not rest.strip():
                raise FormatError("method header without a name", path, lineno)
            current["methods"].append(rest.strip())
        else:
            if current is None or not current["methods"]:
                raise FormatError(f"instruction {head!r} outside a method", path, lineno)
            mnemonic = head.lower()
            if mnemonic not in JVM_OPCODES:
                log.warning("%s:%d: unknown mnemonic %r kept verbatim", path, lineno, head)
                if issues is not None:
                    issues.append({"path": path, "line": lineno, "issue": "unknown-mnemonic",
                                   "detail": head})
                mnemonic = head
            current["instructions"].append(mnemonic)
    close(len(lines) + 1)
    return units


def ingest_bytecode(path, issues: Optional[list] = None) -> list[BytecodeUnit]:
    path = Path(path)
    return parse_listing(path.read_text(encoding="utf-8"), str(path), issues)


_JAVAP_CLASS = re.compile(r"^(?:[a-z]+\s+)*(?:class|interface|enum)\s+([\w.$]+)")
_JAVAP_METHOD = re.compile(r"^\s+(?:[\w.$<>\[\],?\s]+\s)?([\w.$<>]+)\((.*)\)(?:\s+throws\s+.*)?;$")
_JAVAP_INSN = re.compile(r"^\s*\d+:\s+([a-z][a-z0-9_]*)\b")


def javap_to_listing(text: str) -> str:
    """Convert ``javap -c`` output into the bytecode listing format."""
    out: list[str] = []
    cls = None
    for raw in text.splitlines():
        if cls is None:
            m = _JAVAP_CLASS.match(raw.strip())
            if m and raw.rstrip().endswith("{"):
                cls = m.group(1)
                out.append(f"class {cls}")
            continue
        if raw.strip() == "}":
            out.append("")
            cls = None
            continue
        if raw.strip() == "static {};":
            out.append("method <clinit>")
            continue
        m = _JAVAP_METHOD.match(raw)
        if m and not raw.startswith("    "):
            name = m.group(1)
            if name == cls:
                name = "<init>"
            else:
                name = name.rsplit(".", 1)[-1]
            out.append(f"method {name}")
            continue
        m = _JAVAP_INSN.match(raw)
        if m:
            out.append(m.group(1))
    if cls is not None:
        out.append("")
    return "\n".join(out) + ("\n" if out else "")
