"""OpenQASM 2.0 reader/writer for the gate subset used here."""
from __future__ import annotations

import re

from .circuit import Circuit, CircuitError, Gate, Kind

_NAMED = {
    "h": Kind.H,
    "x": Kind.X,
    "t": Kind.T,
    "tdg": Kind.TDG,
    "s": Kind.S,
    "sdg": Kind.SDG,
}
_TWO_QUBIT = {"cx": Kind.CNOT, "CX": Kind.CNOT, "swap": Kind.SWAP}
# names qelib1.inc already declares; anything else is emitted as opaque
_QELIB = {"u3", "u2", "u1", "u", "U", "id", "y", "z", "rx", "ry", "sx", "sxdg", "p"}

_STATEMENT = re.compile(
    r"""^(?P<name>[A-Za-z_][A-Za-z0-9_]*)
        \s*(?:\((?P<params>[^()]*(?:\([^()]*\)[^()]*)*)\))?
        \s*(?P<args>.*)$""",
    re.X | re.S,
)
_QARG = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*\[\s*(\d+)\s*\]$")


class QasmError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.col = col


def _statements(text: str):
    """Yield (statement, line, col) with comments stripped."""
    text = re.sub(r"//[^\n]*", lambda m: " " * len(m.group()), text)
    line, col = 1, 1
    start = None
    buf = []
    for ch in text:
        if start is None and not ch.isspace():
            start = (line, col)
        if ch == ";":
            yield "".join(buf).strip(), *(start or (line, col))
            buf, start = [], None
        else:
            buf.append(ch)
        if ch == "\n":
            line, col = line + 1, 1
        else:
            col += 1
    if "".join(buf).strip():
        raise QasmError("missing ';' at end of input", *start)


def parse_qasm(text: str) -> Circuit:
    reg_name = None
    n = 0
    gates: list[Gate] = []
    for stmt, line, col in _statements(text):
        if not stmt:
            continue
        if stmt.startswith("OPENQASM"):
            if stmt.split()[-1] != "2.0":
                raise QasmError(f"unsupported version {stmt!r}", line, col)
            continue
        if stmt.startswith("include"):
            continue
        if stmt.startswith("opaque"):
            continue
        if stmt.startswith("qreg"):
            m = re.fullmatch(r"qreg\s+([A-Za-z_][A-Za-z0-9_]*)\s*\[\s*(\d+)\s*\]", stmt)
            if not m:
                raise QasmError(f"malformed register declaration {stmt!r}", line, col)
            if reg_name is not None:
                raise QasmError("only one quantum register is supported", line, col)
            reg_name, n = m.group(1), int(m.group(2))
            continue
        m = _STATEMENT.match(stmt)
        if not m:
            raise QasmError(f"cannot parse {stmt!r}", line, col)
        name, params, args = m.group("name"), m.group("params"), m.group("args").strip()
        if name in ("creg", "measure", "reset", "gate", "if"):
            raise QasmError(f"unsupported statement {name!r}", line, col)
        if reg_name is None:
            raise QasmError("gate before qreg declaration", line, col)
        if name == "barrier":
            continue
        qubits = []
        for a in filter(None, (s.strip() for s in args.split(","))):
            qm = _QARG.match(a)
            if not qm:
                raise QasmError(f"bad qubit argument {a!r}", line, col)
            if qm.group(1) != reg_name:
                raise QasmError(f"unknown register {qm.group(1)!r}", line, col)
            q = int(qm.group(2))
            if q >= n:
                raise QasmError(f"qubit index {q} out of range for {reg_name}[{n}]", line, col)
            qubits.append(q)
        try:
            gates.append(_make_gate(name, params, tuple(qubits), line, col))
        except CircuitError as e:
            raise QasmError(str(e), line, col) from None
    if reg_name is None:
        raise QasmError("no qreg declared", 1, 1)
    return Circuit.of(n, gates)


def _make_gate(name, params, qubits, line, col) -> Gate:
    if name in _TWO_QUBIT:
        if params is not None:
            raise QasmError(f"{name} takes no parameters", line, col)
        return Gate(_TWO_QUBIT[name], qubits)
    if len(qubits) != 1:
        raise QasmError(f"unsupported {len(qubits)}-qubit gate {name!r}", line, col)
    if name == "rz":
        if params is None or "," in params:
            raise QasmError("rz takes exactly one angle", line, col)
        return Gate(Kind.RZ, qubits, " ".join(params.split()))
    if name in _NAMED and params is None:
        return Gate(_NAMED[name], qubits)
    label = name if params is None else f"{name}({' '.join(params.split())})"
    return Gate(Kind.U, qubits, label)


def _opaque_name(label: str) -> str:
    return label.split("(", 1)[0]


def emit_qasm(c: Circuit, reg: str = "q") -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    opaque = []
    for g in c.gates:
        if g.kind is Kind.U:
            name = _opaque_name(g.arg)
            if name not in _QELIB and name not in opaque:
                opaque.append(name)
    for name in opaque:
        lines.append(f"opaque {name} a;")
    lines.append(f"qreg {reg}[{c.num_qubits}];")
    for g in c.gates:
        args = ",".join(f"{reg}[{q}]" for q in g.qubits)
        if g.kind is Kind.U:
            head = g.arg
        elif g.kind is Kind.RZ:
            head = f"rz({g.arg})"
        else:
            head = g.kind.value
        lines.append(f"{head} {args};")
    return "\n".join(lines) + "\n"
