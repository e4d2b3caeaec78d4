"""Reader and writer for the OpenQASM 2.0 subset used for circuits.

Accepted statements (one per ``;``)::

    OPENQASM 2.0;                 optional, before qreg
    include "qelib1.inc";         optional, before qreg
    qreg q[N];                    exactly once, before any gate
    h|x|s|sdg|t|tdg q[i];
    cx q[i],q[j];
    measure q[i];

``//`` starts a comment running to end of line.
"""
from __future__ import annotations

import re

from .circuit import Circuit, CircuitError, Gate, GateKind


class CircuitSyntaxError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_REF = rf"({_NAME})\s*\[\s*(\d+)\s*\]"
_HEADER = re.compile(r"OPENQASM\s+2(?:\.0)?")
_INCLUDE = re.compile(r'include\s+"[^"]*"')
_QREG = re.compile(rf"qreg\s+({_NAME})\s*\[\s*(\d+)\s*\]")
_ONE = re.compile(rf"({_NAME})\s+{_REF}")
_CX = re.compile(rf"cx\s+{_REF}\s*,\s*{_REF}")
_WORD = re.compile(_NAME)

_SINGLE = {k.value: k for k in GateKind if k.is_single}


def _strip_comments(text: str) -> str:
    # blank comments out so offsets still map to the original line/column
    return "\n".join(re.sub(r"//.*", lambda m: " " * len(m.group()), ln)
                     for ln in text.split("\n"))


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def _statements(text: str):
    start = 0
    for m in re.finditer(";", text):
        yield start, text[start:m.start()]
        start = m.end()
    tail = text[start:]
    if tail.strip():
        off = start + len(tail) - len(tail.lstrip())
        line, col = _position(text, off)
        raise CircuitSyntaxError("statement not terminated by ';'", line, col)


def parse_circuit(text: str) -> Circuit:
    """Parse circuit source text into a :class:`Circuit`."""
    text = _strip_comments(text)
    reg: tuple[str, int] | None = None
    gates: list[Gate] = []
    measured: set[int] = set()

    for start, raw in _statements(text):
        body = raw.strip()
        if not body:
            continue
        off = start + len(raw) - len(raw.lstrip())
        line, col = _position(text, off)

        def fail(msg, sub_off=0):
            ln, cl = _position(text, off + sub_off)
            raise CircuitSyntaxError(msg, ln, cl)

        if reg is None:
            if _HEADER.fullmatch(body) or _INCLUDE.fullmatch(body):
                continue
            m = _QREG.fullmatch(body)
            if not m:
                fail("expected 'qreg <name>[<size>]' before any gate")
            reg = (m.group(1), int(m.group(2)))
            continue
        if _QREG.fullmatch(body):
            fail("qreg may only be declared once")

        word = _WORD.match(body)
        if word is None:
            fail(f"cannot parse statement {body!r}")
        name = word.group()

        if name == "cx":
            m = _CX.fullmatch(body)
            if not m:
                fail("expected 'cx <reg>[i],<reg>[j]'")
            refs = [(m.group(1), m.group(2), m.start(1)), (m.group(3), m.group(4), m.start(3))]
            kind = GateKind.CNOT
        elif name == "measure" or name in _SINGLE:
            m = _ONE.fullmatch(body)
            if not m:
                fail(f"expected '{name} <reg>[i]'")
            refs = [(m.group(2), m.group(3), m.start(2))]
            kind = GateKind.MEASURE if name == "measure" else _SINGLE[name]
        else:
            fail(f"unknown gate {name!r}")

        operands = []
        for rname, idx, pos in refs:
            if rname != reg[0]:
                fail(f"unknown register {rname!r}", pos)
            q = int(idx)
            if q >= reg[1]:
                fail(f"operand {rname}[{q}] out of range for register of size {reg[1]}", pos)
            if q in measured:
                fail(f"gate after measure on {rname}[{q}]", pos)
            operands.append(q)
        try:
            gate = Gate(kind, tuple(operands), len(gates))
        except CircuitError as e:
            fail(str(e))
        gates.append(gate)
        if kind is GateKind.MEASURE:
            measured.add(operands[0])

    if reg is None:
        raise CircuitSyntaxError("missing qreg declaration", *_position(text, len(text)))
    return Circuit(reg[1], tuple(gates))


def emit_circuit(c: Circuit, reg: str = "q") -> str:
    lines = [f"qreg {reg}[{c.num_vars}];"]
    for g in c.gates:
        args = ",".join(f"{reg}[{q}]" for q in g.operands)
        lines.append(f"{g.kind.value} {args};")
    return "\n".join(lines) + "\n"
