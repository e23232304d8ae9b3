"""Exhaustive breadth-first search over GL(n, 2) for n <= 5.

Used as an independent optimality oracle and to label training data. A step
applies one layer: any non-empty set of qubit-disjoint directed edge CNOTs.
Distances from the identity are tabulated once per graph isomorphism class.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..arch import ArchitectureGraph, canonical_form
from ..gf2 import GF2Matrix

MAX_ORACLE_QUBITS = 5
UNREACHED = 255


class OracleError(ValueError):
    pass


def layer_moves(ag: ArchitectureGraph) -> list[tuple[tuple[int, int], ...]]:
    """Every non-empty matching of ``ag`` with each edge given a direction."""
    edges = ag.sorted_edges()
    out = []

    def extend(start, used, acc):
        if acc:
            out.append(tuple(acc))
        for idx in range(start, len(edges)):
            a, b = edges[idx]
            if a in used or b in used:
                continue
            for e in ((a, b), (b, a)):
                extend(idx + 1, used | {a, b}, acc + [e])

    extend(0, frozenset(), [])
    return out


def _apply_move(states: np.ndarray, move, n: int) -> np.ndarray:
    mask = (1 << n) - 1
    out = states.copy()
    for c, t in move:
        out ^= ((states >> (n * c)) & mask) << (n * t)
    return out


def _identity_index(n: int) -> int:
    return sum(1 << (n * i + i) for i in range(n))


@lru_cache(maxsize=None)
def distance_table(key: str) -> np.ndarray:
    """Layer distance from the identity for every packed n x n matrix.

    ``key`` is a canonical graph key; unreachable entries hold ``UNREACHED``.
    """
    n_text, bits = key.split(":")
    n = int(n_text)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    ag = ArchitectureGraph.from_edges(n, [p for p, b in zip(pairs, bits) if b == "1"])
    moves = layer_moves(ag)
    dist = np.full(1 << (n * n), UNREACHED, dtype=np.uint8)
    start = _identity_index(n)
    dist[start] = 0
    frontier = np.array([start], dtype=np.int64)
    level = 0
    while frontier.size:
        level += 1
        for mv in moves:
            nxt = _apply_move(frontier, mv, n)
            dist[nxt[dist[nxt] == UNREACHED]] = level
        frontier = np.flatnonzero(dist == level).astype(np.int64)
    dist.setflags(write=False)
    return dist


def _check(target: GF2Matrix, ag: ArchitectureGraph) -> None:
    if target.n != ag.num_qubits:
        raise OracleError(f"graph has {ag.num_qubits} nodes, target is {target.n}x{target.n}")
    if target.n > MAX_ORACLE_QUBITS:
        raise OracleError(f"oracle limited to {MAX_ORACLE_QUBITS} qubits, got {target.n}")


def optimal_depth(target: GF2Matrix, ag: ArchitectureGraph) -> int | None:
    """Minimal layer count, or ``None`` if the target is unreachable on ``ag``."""
    _check(target, ag)
    key, perm = canonical_form(ag)
    d = int(distance_table(key)[target.permuted(perm).pack()])
    return None if d == UNREACHED else d


def bfs_oracle(target: GF2Matrix, ag: ArchitectureGraph, max_depth: int = 64, blocked=None) -> int | None:
    """Minimal depth reaching ``target``, honoring blocked (d, q) slots.

    Returns ``None`` when no circuit of depth <= ``max_depth`` exists. With
    blocked positions a layer may also stay empty.
    """
    _check(target, ag)
    if not blocked:
        d = optimal_depth(target, ag)
        return d if d is not None and d <= max_depth else None
    n = target.n
    goal = target.pack()
    blocked = {(b[0], b[1]) for b in blocked}
    moves = layer_moves(ag)
    reach = np.array([_identity_index(n)], dtype=np.int64)
    for d in range(max_depth + 1):
        if np.any(reach == goal):
            return d
        if d == max_depth:
            break
        parts = [reach]
        for mv in moves:
            if any((d, q) in blocked for e in mv for q in e):
                continue
            parts.append(_apply_move(reach, mv, n))
        nxt = np.unique(np.concatenate(parts))
        if nxt.size == reach.size and not any(b[0] >= d for b in blocked):
            # fixed point with no more blocks ahead: nothing new is reachable
            break
        reach = nxt
    return None
