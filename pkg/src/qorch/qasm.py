"""OpenQASM 2.0 subset parser and serializer.

Accepted programs start with ``OPENQASM 2.0;`` and may use the built-in gate
vocabulary (see gates.GateKind), register declarations, measure, reset,
barrier, and ``if (creg == n)`` conditioned gates.  Register operands
broadcast per the language rules.  Gate parameters are restricted to numeric
literals and pi fractions (``pi``, ``pi/2``, ``3*pi/4``, ``-pi``, ...).

Custom gate definitions, opaque declarations, includes other than
``qelib1.inc`` and general parameter expressions are rejected with
UnsupportedFeature.  All errors carry a 1-based line and column.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .circuit import Barrier, Circuit, Gate, Instruction, Measure, Reset, ValidationError
from .gates import GateKind


class QasmError(Exception):
    """Base for positioned QASM errors."""

    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


class QasmSyntaxError(QasmError):
    pass


class UnsupportedFeature(QasmError):
    pass


_KEYWORDS = {"OPENQASM", "include", "qreg", "creg", "measure", "reset", "barrier", "if", "gate", "opaque"}

_SYMBOLS = ("->", "==", ";", ",", "(", ")", "[", "]", "+", "-", "*", "/", "{", "}")


@dataclass(frozen=True)
class _Token:
    kind: str  # ID INT REAL STR SYM EOF
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == '"':
            j = text.find('"', i + 1)
            if j < 0 or "\n" in text[i:j]:
                raise QasmSyntaxError(start_line, start_col, "unterminated string")
            tokens.append(_Token("STR", text[i + 1 : j], start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            seen_dot = seen_exp = False
            while j < n:
                d = text[j]
                if d.isdigit():
                    j += 1
                elif d == "." and not seen_dot and not seen_exp:
                    seen_dot = True
                    j += 1
                elif d in "eE" and not seen_exp and j > i:
                    seen_exp = True
                    j += 1
                    if j < n and text[j] in "+-":
                        j += 1
                else:
                    break
            lit = text[i:j]
            kind = "REAL" if (seen_dot or seen_exp) else "INT"
            tokens.append(_Token(kind, lit, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ID", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(_Token("SYM", sym, start_line, start_col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise QasmSyntaxError(start_line, start_col, f"unexpected character {ch!r}")
    tokens.append(_Token("EOF", "", line, col))
    return tokens


_GATE_ALIASES = {"U": GateKind.U, "CX": GateKind.CX}
# qelib1 names outside the supported vocabulary; recognized so the error says
# "unsupported" rather than "unknown".
_KNOWN_UNSUPPORTED = {
    "u0", "u1", "u2", "u3", "p", "sx", "sxdg", "cy", "ch", "ccx", "cswap",
    "crx", "cry", "crz", "cu1", "cp", "cu3", "csx", "cu", "rxx", "rzz",
    "rccx", "rc3x", "c3x", "c3sqrtx", "c4x",
}


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.qregs: list[tuple[str, int, int]] = []  # name, size, offset
        self.cregs: list[tuple[str, int]] = []
        self.names: set[str] = set()
        self.num_qubits = 0
        self.instructions: list[Instruction] = []

    # token helpers ------------------------------------------------------
    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> _Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind
            got = tok.text if tok.kind != "EOF" else "end of input"
            raise QasmSyntaxError(tok.line, tok.col, f"expected {want!r}, found {got!r}")
        return self.next()

    def at_sym(self, sym: str) -> bool:
        tok = self.peek()
        return tok.kind == "SYM" and tok.text == sym

    # grammar ------------------------------------------------------------
    def parse(self) -> Circuit:
        tok = self.peek()
        if not (tok.kind == "ID" and tok.text == "OPENQASM"):
            raise QasmSyntaxError(tok.line, tok.col, "program must begin with 'OPENQASM 2.0;'")
        self.next()
        version = self.peek()
        if version.kind not in ("REAL", "INT"):
            raise QasmSyntaxError(version.line, version.col, "expected version number")
        if version.text != "2.0":
            raise UnsupportedFeature(
                version.line, version.col, f"only OpenQASM 2.0 is supported, got {version.text}"
            )
        self.next()
        self.expect("SYM", ";")
        while self.peek().kind != "EOF":
            self.statement()
        try:
            return Circuit(self.num_qubits, tuple(self.cregs), tuple(self.instructions))
        except ValidationError as exc:  # parser checks should make this unreachable
            raise QasmSyntaxError(1, 1, str(exc)) from exc

    def statement(self) -> None:
        tok = self.peek()
        if tok.kind != "ID":
            raise QasmSyntaxError(tok.line, tok.col, f"expected statement, found {tok.text!r}")
        if tok.text == "include":
            self.next()
            path = self.expect("STR")
            if path.text != "qelib1.inc":
                raise UnsupportedFeature(path.line, path.col, f"cannot include {path.text!r}")
            self.expect("SYM", ";")
        elif tok.text in ("qreg", "creg"):
            self.register_decl(tok.text)
        elif tok.text in ("gate", "opaque"):
            raise UnsupportedFeature(tok.line, tok.col, f"{tok.text} definitions are not supported")
        elif tok.text == "if":
            self.if_statement()
        elif tok.text == "measure":
            self.measure_statement()
        elif tok.text == "reset":
            self.reset_statement()
        elif tok.text == "barrier":
            self.barrier_statement()
        else:
            self.gate_statement(condition=None)

    def register_decl(self, which: str) -> None:
        self.next()
        name_tok = self.expect("ID")
        if name_tok.text in _KEYWORDS:
            raise QasmSyntaxError(name_tok.line, name_tok.col, f"invalid register name {name_tok.text!r}")
        self.expect("SYM", "[")
        size_tok = self.expect("INT")
        self.expect("SYM", "]")
        self.expect("SYM", ";")
        size = int(size_tok.text)
        if size < 1:
            raise ValidationError(
                f"line {size_tok.line}, column {size_tok.col}: register size must be positive"
            )
        if name_tok.text in self.names:
            raise ValidationError(
                f"line {name_tok.line}, column {name_tok.col}: duplicate register name {name_tok.text!r}"
            )
        self.names.add(name_tok.text)
        if which == "qreg":
            self.qregs.append((name_tok.text, size, self.num_qubits))
            self.num_qubits += size
        else:
            self.cregs.append((name_tok.text, size))

    def argument(self) -> tuple[_Token, int | None]:
        """Register reference: bare name or name[index]."""
        name = self.expect("ID")
        index = None
        if self.at_sym("["):
            self.next()
            idx = self.expect("INT")
            self.expect("SYM", "]")
            index = int(idx.text)
        return name, index

    def resolve_qubits(self, name: _Token, index: int | None) -> list[int]:
        for rname, size, offset in self.qregs:
            if rname == name.text:
                if index is None:
                    return [offset + i for i in range(size)]
                if not 0 <= index < size:
                    raise ValidationError(
                        f"line {name.line}, column {name.col}: index {index} out of "
                        f"range for qreg {rname}[{size}]"
                    )
                return [offset + index]
        raise ValidationError(
            f"line {name.line}, column {name.col}: unknown qreg {name.text!r}"
        )

    def resolve_bits(self, name: _Token, index: int | None) -> list[tuple[str, int]]:
        for rname, size in self.cregs:
            if rname == name.text:
                if index is None:
                    return [(rname, i) for i in range(size)]
                if not 0 <= index < size:
                    raise ValidationError(
                        f"line {name.line}, column {name.col}: index {index} out of "
                        f"range for creg {rname}[{size}]"
                    )
                return [(rname, index)]
        raise ValidationError(
            f"line {name.line}, column {name.col}: unknown creg {name.text!r}"
        )

    def creg_lookup(self, name: _Token) -> tuple[str, int]:
        for rname, size in self.cregs:
            if rname == name.text:
                return rname, size
        raise ValidationError(
            f"line {name.line}, column {name.col}: unknown creg {name.text!r}"
        )

    def angle(self) -> float:
        """Numeric literal or pi fraction with optional sign."""
        sign = 1.0
        while self.at_sym("-") or self.at_sym("+"):
            if self.next().text == "-":
                sign = -sign
        tok = self.peek()
        if tok.kind in ("INT", "REAL"):
            self.next()
            value = float(tok.text)
            # forms like 3*pi or 3*pi/4
            if self.at_sym("*"):
                star = self.next()
                pi_tok = self.peek()
                if not (pi_tok.kind == "ID" and pi_tok.text == "pi"):
                    raise UnsupportedFeature(
                        star.line, star.col, "only pi fractions are supported in parameters"
                    )
                self.next()
                value *= math.pi
                if self.at_sym("/"):
                    self.next()
                    den = self.peek()
                    if den.kind not in ("INT", "REAL"):
                        raise QasmSyntaxError(den.line, den.col, "expected denominator")
                    self.next()
                    value /= float(den.text)
            return sign * value
        if tok.kind == "ID" and tok.text == "pi":
            self.next()
            value = math.pi
            if self.at_sym("*"):
                self.next()
                num = self.peek()
                if num.kind not in ("INT", "REAL"):
                    raise QasmSyntaxError(num.line, num.col, "expected factor after '*'")
                self.next()
                value *= float(num.text)
            if self.at_sym("/"):
                self.next()
                den = self.peek()
                if den.kind not in ("INT", "REAL"):
                    raise QasmSyntaxError(den.line, den.col, "expected denominator")
                self.next()
                value /= float(den.text)
            return sign * value
        raise UnsupportedFeature(
            tok.line, tok.col,
            f"parameter {tok.text!r} is not a numeric literal or pi fraction",
        )

    def gate_statement(self, condition: tuple[str, int] | None) -> None:
        name = self.expect("ID")
        kind: GateKind | None = None
        if name.text in _GATE_ALIASES:
            kind = _GATE_ALIASES[name.text]
        else:
            try:
                kind = GateKind(name.text)
            except ValueError:
                kind = None
        if kind is None:
            if name.text in _KNOWN_UNSUPPORTED:
                raise UnsupportedFeature(
                    name.line, name.col, f"gate {name.text!r} is outside the supported set"
                )
            raise UnsupportedFeature(name.line, name.col, f"unknown gate {name.text!r}")

        params: list[float] = []
        if self.at_sym("("):
            self.next()
            if not self.at_sym(")"):
                params.append(self.angle())
                while self.at_sym(","):
                    self.next()
                    params.append(self.angle())
            self.expect("SYM", ")")
        if len(params) != kind.num_params:
            raise ValidationError(
                f"line {name.line}, column {name.col}: gate '{kind.value}' expects "
                f"{kind.num_params} parameter(s), got {len(params)}"
            )

        args = [self.argument()]
        while self.at_sym(","):
            self.next()
            args.append(self.argument())
        self.expect("SYM", ";")
        if len(args) != kind.num_qubits:
            raise ValidationError(
                f"line {name.line}, column {name.col}: gate '{kind.value}' expects "
                f"{kind.num_qubits} operand(s), got {len(args)}"
            )

        resolved = [self.resolve_qubits(tok, idx) for tok, idx in args]
        reg_sizes = {len(r) for r in resolved if len(r) > 1}
        if len(reg_sizes) > 1:
            raise ValidationError(
                f"line {name.line}, column {name.col}: broadcast operands must have equal size"
            )
        width = reg_sizes.pop() if reg_sizes else 1
        for i in range(width):
            qubits = tuple(r[i] if len(r) > 1 else r[0] for r in resolved)
            if len(set(qubits)) != len(qubits):
                raise ValidationError(
                    f"line {name.line}, column {name.col}: gate operands must be distinct"
                )
            self.instructions.append(Gate(kind, tuple(params), qubits, condition))

    def if_statement(self) -> None:
        if_tok = self.next()
        self.expect("SYM", "(")
        creg_tok = self.expect("ID")
        creg_name, _ = self.creg_lookup(creg_tok)
        self.expect("SYM", "==")
        value_tok = self.expect("INT")
        self.expect("SYM", ")")
        body = self.peek()
        if body.kind == "ID" and body.text in ("measure", "reset", "barrier", "if"):
            raise UnsupportedFeature(
                body.line, body.col, f"conditioned {body.text!r} is not supported"
            )
        if body.kind != "ID":
            raise QasmSyntaxError(body.line, body.col, "expected gate after if(...)")
        del if_tok
        self.gate_statement(condition=(creg_name, int(value_tok.text)))

    def measure_statement(self) -> None:
        m_tok = self.next()
        src = self.argument()
        self.expect("SYM", "->")
        dst = self.argument()
        self.expect("SYM", ";")
        qubits = self.resolve_qubits(*src)
        bits = self.resolve_bits(*dst)
        if len(qubits) != len(bits):
            raise ValidationError(
                f"line {m_tok.line}, column {m_tok.col}: measure operands differ in "
                f"size ({len(qubits)} vs {len(bits)})"
            )
        for q, (creg, bit) in zip(qubits, bits):
            self.instructions.append(Measure(q, creg, bit))

    def reset_statement(self) -> None:
        self.next()
        arg = self.argument()
        self.expect("SYM", ";")
        for q in self.resolve_qubits(*arg):
            self.instructions.append(Reset(q))

    def barrier_statement(self) -> None:
        b_tok = self.next()
        args = [self.argument()]
        while self.at_sym(","):
            self.next()
            args.append(self.argument())
        self.expect("SYM", ";")
        qubits: list[int] = []
        for arg in args:
            qubits.extend(self.resolve_qubits(*arg))
        if len(set(qubits)) != len(qubits):
            raise ValidationError(
                f"line {b_tok.line}, column {b_tok.col}: barrier qubits must be distinct"
            )
        self.instructions.append(Barrier(tuple(qubits)))


def parse_qasm(text: str) -> Circuit:
    """Parse OpenQASM 2.0 source into a validated Circuit.

    Qubits from all qreg declarations are flattened into one index space in
    declaration order; creg declaration order is preserved.
    """
    return _Parser(text).parse()


def _format_angle(value: float) -> str:
    return f"{value:.17g}"


def serialize_qasm(c: Circuit) -> str:
    """Emit OpenQASM 2.0 such that parse_qasm round-trips structurally."""
    lines = ['OPENQASM 2.0;', 'include "qelib1.inc";']
    if c.num_qubits > 0:
        lines.append(f"qreg q[{c.num_qubits}];")
    for name, size in c.cregs:
        lines.append(f"creg {name}[{size}];")
    for instr in c.instructions:
        if isinstance(instr, Gate):
            prefix = ""
            if instr.condition is not None:
                prefix = f"if({instr.condition[0]}=={instr.condition[1]}) "
            params = ""
            if instr.params:
                params = "(" + ",".join(_format_angle(p) for p in instr.params) + ")"
            operands = ",".join(f"q[{q}]" for q in instr.qubits)
            lines.append(f"{prefix}{instr.kind.value}{params} {operands};")
        elif isinstance(instr, Measure):
            lines.append(f"measure q[{instr.qubit}] -> {instr.creg}[{instr.bit}];")
        elif isinstance(instr, Reset):
            lines.append(f"reset q[{instr.qubit}];")
        elif isinstance(instr, Barrier):
            operands = ",".join(f"q[{q}]" for q in instr.qubits)
            lines.append(f"barrier {operands};")
    return "\n".join(lines) + "\n"
