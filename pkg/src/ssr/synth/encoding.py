"""CNF encoding of depth-bounded CNOT synthesis on a connectivity graph."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple

from ..arch import ArchitectureGraph
from ..circuit import Circuit, cnot
from ..gf2 import GF2Matrix, identity


@dataclass(frozen=True)
class MatrixVar:
    i: int
    k: int
    d: int


@dataclass(frozen=True)
class GateVar:
    c: int
    t: int
    d: int


@dataclass(frozen=True)
class DoneVar:
    """True when the matrix already equals the target at layer ``d``."""

    d: int


class BlockedPosition(NamedTuple):
    d: int
    q: int


class EncodingError(RuntimeError):
    pass


@dataclass
class CnfInstance:
    num_qubits: int
    depth: int
    edges: tuple[tuple[int, int], ...]
    clauses: list[list[int]] = field(default_factory=list)
    var_map: dict = field(default_factory=dict)

    @property
    def var_count(self) -> int:
        return len(self.var_map)

    def var(self, key) -> int:
        v = self.var_map.get(key)
        if v is None:
            v = self.var_map[key] = len(self.var_map) + 1
        return v

    def add(self, *lits: int) -> None:
        self.clauses.append(list(lits))

    def gate_vars(self, d: int):
        return [(e, self.var_map[GateVar(*e, d)]) for e in self.edges if GateVar(*e, d) in self.var_map]

    def to_dimacs(self) -> str:
        out = [f"p cnf {self.var_count} {len(self.clauses)}"]
        out += [" ".join(map(str, cl)) + " 0" for cl in self.clauses]
        return "\n".join(out) + "\n"


def parse_dimacs(text: str) -> tuple[int, list[list[int]]]:
    nvars = None
    clauses, cur = [], []
    for line in text.splitlines():
        line = line.strip()
        if not line or line[0] in "c%":
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad DIMACS header {line!r}")
            nvars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(cur)
                cur = []
            else:
                cur.append(lit)
    if cur:
        clauses.append(cur)
    if nvars is None:
        raise ValueError("missing DIMACS header")
    return nvars, clauses


def encode(
    target: GF2Matrix,
    ag: ArchitectureGraph,
    depth: int,
    blocked=(),
) -> CnfInstance:
    """Satisfiable iff ``target`` is reachable in ``depth`` CNOT layers on ``ag``.

    Without blocked positions every layer before the target is reached must
    hold a gate. With blocked positions idle layers are allowed anywhere,
    since waiting for a busy qubit is then meaningful.
    """
    n = target.n
    if ag.num_qubits != n:
        raise EncodingError(f"graph has {ag.num_qubits} nodes, target is {n}x{n}")
    if depth < 0:
        raise EncodingError("depth must be non-negative")
    inst = CnfInstance(n, depth, tuple(ag.directed_edges()))
    blocked = {(b[0], b[1]) for b in blocked}

    m = [[[inst.var(MatrixVar(i, k, d)) for k in range(n)] for i in range(n)] for d in range(depth + 1)]
    for d in range(depth):
        for c, t in inst.edges:
            if (d, c) not in blocked and (d, t) not in blocked:
                inst.var(GateVar(c, t, d))

    eye = identity(n)
    for i in range(n):
        for k in range(n):
            inst.add(m[0][i][k] if eye[i, k] else -m[0][i][k])
            inst.add(m[depth][i][k] if target[i, k] else -m[depth][i][k])

    for d in range(depth):
        gates = inst.gate_vars(d)
        if not blocked:
            # at least one gate per layer unless the target is already reached
            done = inst.var(DoneVar(d))
            for i in range(n):
                for k in range(n):
                    inst.add(-done, m[d][i][k] if target[i, k] else -m[d][i][k])
            inst.add(done, *(v for _, v in gates))
        # at most one gate per qubit per layer
        for q in range(n):
            touching = [v for (c, t), v in gates if q in (c, t)]
            for a, b in combinations(touching, 2):
                inst.add(-a, -b)
        # conditional row update
        for (c, t), g in gates:
            for j in range(n):
                x, a, b = m[d + 1][t][j], m[d][t][j], m[d][c][j]
                inst.add(-g, -x, a, b)
                inst.add(-g, -x, -a, -b)
                inst.add(-g, x, -a, b)
                inst.add(-g, x, a, -b)
        # a row changes only if some gate targets it
        for k in range(n):
            causes = [v for (c, t), v in gates if t == k]
            for j in range(n):
                x, a = m[d + 1][k][j], m[d][k][j]
                inst.add(-x, a, *causes)
                inst.add(x, -a, *causes)
    return inst


def decode_layers(inst: CnfInstance, model) -> list[list[tuple[int, int]]]:
    true = {lit for lit in model if lit > 0}
    layers = []
    for d in range(inst.depth):
        layer = sorted(e for e, v in inst.gate_vars(d) if v in true)
        used = [q for e in layer for q in e]
        if len(used) != len(set(used)):
            raise EncodingError(f"overlapping gates in layer {d}: {layer}")
        layers.append(layer)
    return layers


def decode(inst: CnfInstance, model) -> Circuit:
    """CNOT circuit read off a satisfying assignment, layer by layer."""
    gates = [cnot(c, t) for layer in decode_layers(inst, model) for c, t in layer]
    return Circuit.of(inst.num_qubits, gates)
