"""Extraction of contiguous CNOT/SWAP blocks, scoring and selection."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .arch import ArchitectureGraph, induced_subgraph
from .circuit import Circuit, Kind, asap_starts
from .gf2 import GF2Matrix, from_circuit


@dataclass(frozen=True)
class SweepParams:
    n_q: int = 5
    n_t: float = 0.5

    def __post_init__(self):
        if self.n_q < 2:
            raise ValueError("n_q must be at least 2")
        if not 0 < self.n_t <= 1:
            raise ValueError("n_t must lie in (0, 1]")


@dataclass(frozen=True)
class SubcircuitWindow:
    gate_ids: tuple[int, ...]
    qubits: tuple[int, ...]
    anchor: int
    span: tuple[int, int]
    cnot_count: int

    @property
    def is_singleton(self) -> bool:
        return self.cnot_count < 2


@dataclass(frozen=True)
class SubcircuitScore:
    window: SubcircuitWindow
    score: float
    d_opt_est: int


class _Units:
    """Convex groups of gates with transitive ancestor sets.

    Every single-qubit gate is its own unit, every CNOT/SWAP block is one unit.
    Merging is allowed only when no outside unit lies on a path between two
    members, so every block stays contractible to a single node.
    """

    def __init__(self, n: int):
        self.anc: dict[int, set[int]] = {}
        self.gates: dict[int, list[int]] = {}
        self.qubits: dict[int, set[int]] = {}
        self.last_pos: dict[int, int] = {}
        self.last_on = [None] * n
        self.owner: list[int | None] = [None] * n
        self.next_id = 0

    def ancestors_of(self, qubits) -> set[int]:
        out: set[int] = set()
        for q in qubits:
            u = self.last_on[q]
            if u is not None:
                out.add(u)
                out |= self.anc[u]
        return out

    def convex_merge(self, members: set[int], gate_anc: set[int]) -> bool:
        # units are numbered in creation order, so only units newer than the
        # oldest member can descend from a member
        lo = min(members)
        pool = {z for z in gate_anc if z > lo}
        for m in members:
            pool.update(z for z in self.anc[m] if z > lo)
        return all(not (self.anc[z] & members) for z in pool - members)

    def new_unit(self, pos: int, qubits, gate_anc: set[int]) -> int:
        u = self.next_id
        self.next_id += 1
        self.anc[u] = gate_anc
        self.gates[u] = [pos]
        self.qubits[u] = set(qubits)
        self.last_pos[u] = pos
        for q in qubits:
            self.last_on[q] = u
        return u

    def merge(self, members: list[int], pos: int, qubits, gate_anc: set[int]) -> int:
        keep = min(members)
        mset = set(members)
        anc = set(gate_anc)
        for m in members:
            anc |= self.anc[m]
        anc -= mset
        gates = sorted(p for m in members for p in self.gates[m]) + [pos]
        qs = set(qubits).union(*(self.qubits[m] for m in members))
        for m in members:
            if m != keep:
                for d in (self.anc, self.gates, self.qubits, self.last_pos):
                    del d[m]
        self.anc[keep], self.gates[keep], self.qubits[keep], self.last_pos[keep] = anc, gates, qs, pos
        for u, a in self.anc.items():
            if u > keep and a & mset:
                self.anc[u] = (a - mset) | {keep}
        for q in range(len(self.last_on)):
            if self.last_on[q] in mset:
                self.last_on[q] = keep
            if self.owner[q] in mset:
                self.owner[q] = keep
        for q in qubits:
            self.last_on[q] = keep
        return keep

    def close(self, u: int) -> None:
        self.owner = [None if o == u else o for o in self.owner]


def _blocks(c: Circuit, n_q: int) -> list[list[int]]:
    units = _Units(c.num_qubits)
    blocks: set[int] = set()
    for pos, g in enumerate(c.gates):
        gate_anc = units.ancestors_of(g.qubits)
        if not g.is_linear:
            units.new_unit(pos, g.qubits, gate_anc)
            for q in g.qubits:
                units.owner[q] = None
            continue
        cands = sorted({units.owner[q] for q in g.qubits if units.owner[q] is not None})
        while True:
            if cands:
                qs = set(g.qubits).union(*(units.qubits[u] for u in cands))
                if len(qs) <= n_q and units.convex_merge(set(cands), gate_anc):
                    u = units.merge(cands, pos, g.qubits, gate_anc)
                    break
                # close the candidate whose latest gate is oldest, then retry
                oldest = min(cands, key=lambda v: units.last_pos[v])
                units.close(oldest)
                cands.remove(oldest)
                continue
            u = units.new_unit(pos, g.qubits, gate_anc)
            blocks.add(u)
            break
        blocks = {b for b in blocks if b in units.gates}
        for q in g.qubits:
            units.owner[q] = u
    return sorted((units.gates[b] for b in blocks), key=lambda ps: ps[0])


def extract_subcircuits(c: Circuit, ag: ArchitectureGraph | None = None, n_q: int = 5) -> list[SubcircuitWindow]:
    """Greedy left-to-right partition of the linear gates into windows."""
    starts, _ = asap_starts(c.gates, c.num_qubits)
    out = []
    for positions in _blocks(c, n_q):
        gs = [c.gates[p] for p in positions]
        out.append(
            SubcircuitWindow(
                gate_ids=tuple(g.id for g in gs),
                qubits=tuple(sorted({q for g in gs for q in g.qubits})),
                anchor=positions[0],
                span=(min(starts[p] for p in positions), max(starts[p] + c.gates[p].duration for p in positions)),
                cnot_count=sum(3 if g.kind is Kind.SWAP else 1 for g in gs),
            )
        )
    return out


def count_sub(c: Circuit, n_q: int = 5) -> int:
    return len(_blocks(c, n_q))


def window_problem(c: Circuit, w: SubcircuitWindow, ag: ArchitectureGraph):
    """Local synthesis problem: (target matrix, local graph, host qubits)."""
    local_ag, mapping = induced_subgraph(ag, w.qubits)
    gates = [c.gate(i) for i in w.gate_ids]
    local = Circuit.of(len(w.qubits), [g.__class__(g.kind, tuple(mapping[q] for q in g.qubits)) for g in gates])
    return from_circuit(local), local_ag, w.qubits


def score_window(c: Circuit, w: SubcircuitWindow, predictor, ag: ArchitectureGraph) -> SubcircuitScore:
    """score = d(C) - d(C without w) - predicted optimal depth of w."""
    target, local_ag, _ = window_problem(c, w, ag)
    d_opt = int(predictor.predict(target, local_ag))
    if w.is_singleton:
        return SubcircuitScore(w, -math.inf, d_opt)
    return SubcircuitScore(w, c.depth - c.without(w.gate_ids).depth - d_opt, d_opt)


def select_top(scores: list[SubcircuitScore], n_t: float) -> list[SubcircuitWindow]:
    """The ceil(n_t * k) best of the k eligible windows; ties go to the earlier anchor."""
    eligible = [s for s in scores if s.score != -math.inf]
    k = math.ceil(n_t * len(eligible))
    ranked = sorted(eligible, key=lambda s: (-s.score, s.window.anchor, s.window.gate_ids))
    return [s.window for s in ranked[:k]]


def local_matrix(c: Circuit, w: SubcircuitWindow) -> GF2Matrix:
    return window_problem(c, w, ArchitectureGraph.from_edges(c.num_qubits, []))[0]
