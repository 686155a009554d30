"""A small language for optical benches.

    bench  := source stmt*
    source := "source" (V|H) (V|H) ";"
    stmt   := ident "(" [arg ("," arg)*] ")" ";"
    arg    := (number | ident) ["deg" | "rad"]

``#`` starts a comment running to the end of the line. Identifier arguments are
symbolic and resolved from bindings at compile time (radians, unless a unit
suffix is given). Example::

    source V H;
    bs-pair(45 deg, 45 deg, phi);
    dove(beta); hwp(alpha);
    mzim(chi); pbs(even); pbs(odd);
    detector-bank();
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .core import SpinOrbitState, basis_state
from .optics import (
    DetectorRecord,
    OpticalOperator,
    detect,
    dove_prism,
    half_wave_plate,
    mach_zehnder,
    mirror,
    phase_shift,
    polarizer_projection,
)

ARITY = {
    "hwp": 1,
    "dove": 1,
    "phase": 1,
    "mzim": 1,
    "bs-pair": 3,
    "pbs": 1,
    "detector-bank": 0,
}
UNITS = {"deg": math.pi / 180, "rad": 1.0}
PORTS = ("even", "odd")


class BenchError(ValueError):
    pass


class ParseError(BenchError):
    def __init__(self, message: str, line: int, column: int, token: str):
        self.message, self.line, self.column, self.token = message, line, column, token
        shown = "end of input" if token == "" else repr(token)
        super().__init__(f"line {line}, column {column}: {message} (at {shown})")


class CompileError(BenchError):
    pass


@dataclass(frozen=True)
class Arg:
    value: float | str
    unit: str | None = None

    @property
    def symbolic(self) -> bool:
        return isinstance(self.value, str)

    def __str__(self):
        v = self.value if self.symbolic else repr(float(self.value))
        return f"{v} {self.unit}" if self.unit else str(v)


@dataclass(frozen=True)
class Source:
    transverse: str
    polarization: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Element:
    kind: str
    args: tuple[Arg, ...] = ()
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BenchAst:
    source: Source
    elements: tuple[Element, ...] = ()

    def symbols(self) -> set[str]:
        return {a.value for e in self.elements for a in e.args if a.symbolic and e.kind != "pbs"}


# ---- lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<number>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z_][A-Za-z0-9_]*)*)
  | (?P<punct>[(),;])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError("unexpected character", line, col, text[pos])
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, chunk, line, col))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# ---- parser

class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, msg, tok=None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.column, tok.text)

    def take(self, kind, text=None, what=None) -> Token:
        tok = self.tok
        if tok.kind != kind or (text is not None and tok.text != text):
            self.fail(f"expected {what or repr(text or kind)}")
        self.i += 1
        return tok

    def parse(self) -> BenchAst:
        if not (self.tok.kind == "ident" and self.tok.text == "source"):
            self.fail("missing source declaration")
        src_tok = self.take("ident", "source")
        labels = []
        for what in ("transverse label V or H", "polarization label V or H"):
            tok = self.tok
            if tok.kind != "ident" or tok.text.upper() not in ("V", "H"):
                self.fail(f"expected {what}")
            labels.append(tok.text.upper())
            self.i += 1
        self.take("punct", ";")
        source = Source(*labels, line=src_tok.line, column=src_tok.column)

        elements = []
        while self.tok.kind != "eof":
            elements.append(self.statement(elements))
        return BenchAst(source, tuple(elements))

    def statement(self, previous) -> Element:
        tok = self.tok
        if tok.kind != "ident":
            self.fail("expected an element name")
        if tok.text == "source":
            self.fail("duplicate source declaration")
        if tok.text not in ARITY:
            self.fail(f"unknown element {tok.text!r}")
        if previous and previous[-1].kind == "detector-bank":
            self.fail("detector-bank must be the last element")
        self.i += 1
        self.take("punct", "(")
        args = []
        if not (self.tok.kind == "punct" and self.tok.text == ")"):
            args.append(self.argument())
            while self.tok.kind == "punct" and self.tok.text == ",":
                self.i += 1
                args.append(self.argument())
        self.take("punct", ")", what="')' or ','")
        if len(args) != ARITY[tok.text]:
            self.fail(f"{tok.text} takes {ARITY[tok.text]} argument(s), got {len(args)}", tok)
        if tok.text == "pbs":
            a = args[0]
            if not a.symbolic or a.value not in PORTS or a.unit:
                self.fail("pbs expects a port name: even or odd", tok)
        self.take("punct", ";")
        return Element(tok.text, tuple(args), tok.line, tok.column)

    def argument(self) -> Arg:
        tok = self.tok
        if tok.kind == "number":
            value = float(tok.text)
        elif tok.kind == "ident" and tok.text not in UNITS:
            value = tok.text
        else:
            self.fail("expected a number or parameter name")
        self.i += 1
        unit = None
        if self.tok.kind == "ident" and self.tok.text in UNITS:
            unit = self.tok.text
            self.i += 1
        return Arg(value, unit)


def parse(text: str) -> BenchAst:
    return _Parser(text).parse()


def pretty(ast: BenchAst) -> str:
    lines = [f"source {ast.source.transverse} {ast.source.polarization};"]
    for e in ast.elements:
        lines.append(f"{e.kind}({', '.join(str(a) for a in e.args)});")
    return "\n".join(lines) + "\n"


# ---- compiler

@dataclass(frozen=True)
class Step:
    kind: str
    op: OpticalOperator | None = None
    arms: tuple[OpticalOperator, OpticalOperator] | None = None
    port: str | None = None


@dataclass(frozen=True)
class Pipeline:
    source: SpinOrbitState
    steps: tuple[Step, ...]

    def run(self) -> DetectorRecord:
        """Propagate the source and return intensities normalized to their total."""
        v = self.source.vector
        if not self.steps:
            return _normalized(detect(v, 0.0))
        ports = None
        for st in self.steps:
            if st.kind == "op":
                v = st.op.apply(v)
            elif st.kind == "bs-pair":
                _, v = mach_zehnder(v, *st.arms)
            elif st.kind == "mzim":
                odd, even = mach_zehnder(v, *st.arms)
                ports = {"even": even, "odd": odd}
        power = lambda port, pol: float(np.sum(np.abs(polarizer_projection(pol).apply(ports[port])) ** 2))
        rec = DetectorRecord(power("odd", "H"), power("odd", "V"), power("even", "V"), power("even", "H"))
        return _normalized(rec)


def _normalized(rec: DetectorRecord) -> DetectorRecord:
    tot = rec.i_tot
    if not tot > 0:
        raise BenchError("no light reaches the detectors")
    return DetectorRecord(*(x / tot for x in rec.as_tuple()))


def _value(arg: Arg, bindings) -> float:
    if arg.symbolic:
        if arg.value not in bindings:
            raise CompileError(f"unbound parameter {arg.value!r}")
        v = float(bindings[arg.value])
    else:
        v = float(arg.value)
    return v * UNITS[arg.unit or "rad"]


def compile_bench(ast: BenchAst, bindings=None) -> Pipeline:
    bindings = bindings or {}
    src = basis_state(ast.source.transverse + ast.source.polarization)
    steps = []
    split = False
    split_ports = set()
    for e in ast.elements:
        where = f"line {e.line}: " if e.line else ""
        if split and e.kind not in ("pbs", "detector-bank"):
            raise CompileError(f"{where}{e.kind} cannot follow mzim; only pbs and detector-bank act on its ports")
        vals = [] if e.kind == "pbs" else [_value(a, bindings) for a in e.args]
        if e.kind == "hwp":
            steps.append(Step("op", half_wave_plate(vals[0])))
        elif e.kind == "dove":
            steps.append(Step("op", dove_prism(vals[0])))
        elif e.kind == "phase":
            steps.append(Step("op", phase_shift(vals[0])))
        elif e.kind == "bs-pair":
            h, d, phi = vals
            steps.append(Step("bs-pair", arms=(phase_shift(phi) @ half_wave_plate(h), dove_prism(d))))
        elif e.kind == "mzim":
            steps.append(Step("mzim", arms=(OpticalOperator(np.eye(4)), phase_shift(vals[0]) @ mirror())))
            split = True
        elif e.kind == "pbs":
            if not split:
                raise CompileError(f"{where}pbs needs a preceding mzim")
            port = e.args[0].value
            if port in split_ports:
                raise CompileError(f"{where}port {port!r} already has a pbs")
            split_ports.add(port)
            steps.append(Step("pbs", port=port))
        elif e.kind == "detector-bank":
            if split_ports != set(PORTS):
                raise CompileError(f"{where}detector-bank needs pbs on both mzim ports")
    if ast.elements and ast.elements[-1].kind != "detector-bank":
        raise CompileError("detector bank absent")
    return Pipeline(src, tuple(steps))


def load(path) -> BenchAst:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())
