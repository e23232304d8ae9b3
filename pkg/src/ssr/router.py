"""A deliberately simple router used to build hardware-compliant test inputs."""
from __future__ import annotations

import random

from .arch import ArchError, ArchitectureGraph
from .circuit import Circuit, Gate, Kind, swap


def is_compliant(c: Circuit, ag: ArchitectureGraph) -> bool:
    return c.num_qubits <= ag.num_qubits and all(
        ag.has_edge(*g.qubits) for g in c.gates if g.kind.arity == 2
    )


def naive_route(logical: Circuit, ag: ArchitectureGraph, seed: int | None = None) -> Circuit:
    """Identity initial layout; walk the control along a shortest path with SWAPs.

    ``seed`` is accepted for interface symmetry; routing is deterministic.
    """
    if logical.num_qubits > ag.num_qubits:
        raise ArchError(f"{logical.num_qubits} logical qubits do not fit on {ag.num_qubits} physical")
    if is_compliant(logical, ag):
        return Circuit.of(ag.num_qubits, logical.gates)
    phys = list(range(ag.num_qubits))  # logical -> physical
    log_of = list(range(ag.num_qubits))  # physical -> logical
    out: list[Gate] = []
    for g in logical.gates:
        if g.kind.arity == 2:
            a, b = g.qubits
            path = ag.shortest_path(phys[a], phys[b])
            for u, v in zip(path[:-2], path[1:-1]):
                out.append(swap(u, v))
                la, lb = log_of[u], log_of[v]
                log_of[u], log_of[v] = lb, la
                phys[la], phys[lb] = v, u
        out.append(Gate(g.kind, tuple(phys[q] for q in g.qubits), g.arg))
    return Circuit.of(ag.num_qubits, out)


_ONE_QUBIT = (Kind.H, Kind.X, Kind.T, Kind.TDG, Kind.S, Kind.SDG)


def random_circuit(num_qubits: int, num_gates: int, cnot_fraction: float = 0.5, seed: int = 0) -> Circuit:
    """Random logical circuit; two-qubit gates are CNOTs on arbitrary pairs."""
    rng = random.Random(seed)
    gates = []
    for _ in range(num_gates):
        if num_qubits >= 2 and rng.random() < cnot_fraction:
            gates.append(Gate(Kind.CNOT, tuple(rng.sample(range(num_qubits), 2))))
        else:
            gates.append(Gate(rng.choice(_ONE_QUBIT), (rng.randrange(num_qubits),)))
    return Circuit.of(num_qubits, gates)
