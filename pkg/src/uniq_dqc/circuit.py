"""CNOT-only circuit representation, parsers, precedence DAG and interaction graph."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import (
    DuplicateOperand,
    MalformedDocument,
    OperandOutOfRange,
    ParseError,
    UnsupportedStatement,
)


@dataclass(frozen=True)
class Gate:
    id: int  # 1-based position in program order
    control: int
    target: int

    @property
    def qubits(self) -> tuple[int, int]:
        return (self.control, self.target)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        if self.num_qubits < 0:
            raise MalformedDocument("qubit count must be non-negative")
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.num_qubits:
                    raise OperandOutOfRange(
                        f"gate {g.id}: qubit {q} outside 0..{self.num_qubits - 1}")
            if g.control == g.target:
                raise DuplicateOperand(f"gate {g.id}: control equals target ({g.control})")

    @classmethod
    def from_pairs(cls, num_qubits: int, pairs) -> Circuit:
        gates = tuple(Gate(k + 1, int(a), int(b)) for k, (a, b) in enumerate(pairs))
        return cls(num_qubits, gates)

    @property
    def m(self) -> int:
        return len(self.gates)

    def pairs(self) -> list[tuple[int, int]]:
        return [g.qubits for g in self.gates]

    def to_doc(self) -> dict[str, Any]:
        return {"qubits": self.num_qubits, "gates": [list(p) for p in self.pairs()]}


@dataclass(frozen=True)
class PrecedenceDag:
    """Immediate-predecessor edges (g', g) keyed by 1-based gate id."""
    m: int
    edges: frozenset[tuple[int, int]]

    def predecessors(self) -> list[list[int]]:
        """preds[g] for g in 1..m (index 0 unused)."""
        preds: list[list[int]] = [[] for _ in range(self.m + 1)]
        for a, b in sorted(self.edges):
            preds[b].append(a)
        return preds

    def successors(self) -> list[list[int]]:
        succ: list[list[int]] = [[] for _ in range(self.m + 1)]
        for a, b in sorted(self.edges):
            succ[a].append(b)
        return succ


@dataclass(frozen=True)
class InteractionGraph:
    weights: np.ndarray

    def total_weight(self) -> np.ndarray:
        """W(q) = sum_j w_qj for every qubit."""
        return self.weights.sum(axis=1)

    def neighbors(self) -> list[list[tuple[int, int]]]:
        out = []
        for row in self.weights:
            nz = np.flatnonzero(row)
            out.append([(int(j), int(row[j])) for j in nz])
        return out


def parse_gate_list(doc: str | bytes | dict) -> Circuit:
    """Build a circuit from a ``{"qubits": n, "gates": [[c, t], ...]}`` document."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "qubits" not in doc or "gates" not in doc:
        raise MalformedDocument("document must declare 'qubits' and 'gates'")
    n = doc["qubits"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise MalformedDocument("'qubits' must be an integer")
    pairs = []
    for k, entry in enumerate(doc["gates"]):
        if (not isinstance(entry, (list, tuple)) or len(entry) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool) for x in entry)):
            raise MalformedDocument(f"gate #{k + 1} must be a pair of integers, got {entry!r}")
        pairs.append((entry[0], entry[1]))
    return Circuit.from_pairs(n, pairs)


def dump_gate_list(c: Circuit) -> str:
    return json.dumps(c.to_doc())


_QREG = re.compile(r"^qreg\s+([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]$")
_OPERAND = re.compile(r"^([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]$")
_HEAD = re.compile(r"^([A-Za-z_]\w*)(\s*\([^)]*\))?\s*(.*)$", re.S)
_IGNORED = {"OPENQASM", "include", "barrier", "creg", "measure", "reset"}


def _statements(text: str):
    """Yield (statement, line, column) with // comments stripped."""
    buf: list[str] = []
    start = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0]
        for col, ch in enumerate(line, start=1):
            if ch == ";":
                stmt = "".join(buf).strip()
                if stmt:
                    yield stmt, start[0], start[1]
                buf, start = [], None
                continue
            if start is None and not ch.isspace():
                start = (lineno, col)
            buf.append(ch)
        buf.append("\n")
    rest = "".join(buf).strip()
    if rest:
        raise ParseError("statement missing terminating ';'", *start)


def parse_qasm_subset(text: str) -> Circuit:
    """Extract the ``cx`` gates of a single-register QASM-like source.

    Single-qubit statements are dropped. Anything touching two or more
    qubits other than ``cx`` is rejected, as are classical ``if`` and a
    second ``qreg``.
    """
    reg: tuple[str, int] | None = None
    pairs: list[tuple[int, int]] = []
    for stmt, line, col in _statements(text):
        if stmt.startswith("qreg"):
            if reg is not None:
                raise UnsupportedStatement(f"second register declaration at line {line}")
            mt = _QREG.match(stmt)
            if not mt:
                raise ParseError(f"bad register declaration {stmt!r}", line, col)
            reg = (mt.group(1), int(mt.group(2)))
            continue
        if stmt.startswith("if"):
            raise UnsupportedStatement(f"classical control at line {line}")
        head = _HEAD.match(stmt)
        if not head:
            raise ParseError(f"cannot parse {stmt!r}", line, col)
        name, args = head.group(1), head.group(3).strip()
        if name in _IGNORED:
            continue
        if reg is None:
            raise ParseError(f"gate {name!r} before qreg declaration", line, col)
        operands = []
        for arg in (a.strip() for a in args.split(",")) if args else ():
            mo = _OPERAND.match(arg)
            if not mo:
                raise ParseError(f"bad operand {arg!r}", line, col)
            if mo.group(1) != reg[0]:
                raise UnsupportedStatement(
                    f"operand {arg!r} refers to undeclared register at line {line}")
            operands.append(int(mo.group(2)))
        if name.lower() == "cx":
            if len(operands) != 2:
                raise ParseError(f"cx needs two operands, got {len(operands)}", line, col)
            pairs.append((operands[0], operands[1]))
        elif len(operands) >= 2:
            raise UnsupportedStatement(f"{len(operands)}-qubit gate {name!r} at line {line}")
        elif len(operands) == 0:
            raise ParseError(f"gate {name!r} without operands", line, col)
    if reg is None:
        raise ParseError("no qreg declaration", 1, 1)
    return Circuit.from_pairs(reg[1], pairs)


def build_precedence(c: Circuit) -> PrecedenceDag:
    """Per-qubit last-writer edges; their closure is the full overlap order."""
    last: dict[int, int] = {}
    edges = set()
    for g in c.gates:
        for q in g.qubits:
            if q in last:
                edges.add((last[q], g.id))
            last[q] = g.id
    return PrecedenceDag(c.m, frozenset(edges))


def build_interaction_graph(c: Circuit) -> InteractionGraph:
    w = np.zeros((c.num_qubits, c.num_qubits), dtype=np.int64)
    if c.m:
        a = np.fromiter((g.control for g in c.gates), dtype=np.int64, count=c.m)
        b = np.fromiter((g.target for g in c.gates), dtype=np.int64, count=c.m)
        np.add.at(w, (a, b), 1)
        w = w + w.T
    w.setflags(write=False)
    return InteractionGraph(w)


def random_circuit(num_qubits: int, num_gates: int, seed: int) -> Circuit:
    """Each gate draws two distinct qubits uniformly at random."""
    if num_qubits < 2 and num_gates > 0:
        raise MalformedDocument("need at least two qubits to place a CNOT")
    rng = np.random.default_rng(seed)
    pairs = [tuple(int(x) for x in rng.choice(num_qubits, size=2, replace=False))
             for _ in range(num_gates)]
    return Circuit.from_pairs(num_qubits, pairs)
