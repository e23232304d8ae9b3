"""Depth search around a predicted optimum, and blocked-slot derivation."""
from __future__ import annotations

import math
from dataclasses import dataclass

from ..arch import ArchitectureGraph
from ..circuit import Circuit, asap_starts
from ..gf2 import GF2Matrix, is_invertible
from .backends import solve
from .encoding import BlockedPosition, decode, decode_layers, encode


class SynthesisError(RuntimeError):
    def __init__(self, msg: str, sat_calls: int = 0):
        super().__init__(msg)
        self.sat_calls = sat_calls


@dataclass(frozen=True)
class SynthesisResult:
    circuit: Circuit
    achieved_depth: int
    sat_calls: int
    layers: tuple[tuple[tuple[int, int], ...], ...] = ()


class _Trials:
    def __init__(self, target, ag, blocked, backend):
        self.target, self.ag, self.blocked, self.backend = target, ag, blocked, backend
        self.calls = 0

    def __call__(self, depth: int) -> SynthesisResult | None:
        inst = encode(self.target, self.ag, depth, self.blocked)
        self.calls += 1
        model = solve(inst, self.backend)
        if model is None:
            return None
        layers = tuple(tuple(layer) for layer in decode_layers(inst, model))
        return SynthesisResult(decode(inst, model), depth, self.calls, layers)


def _prepare(target: GF2Matrix, ag: ArchitectureGraph, blocked, max_depth):
    if not is_invertible(target):
        raise SynthesisError("target matrix is singular")
    n = target.n
    blocked = sorted({BlockedPosition(int(b[0]), int(b[1])) for b in blocked})
    if any(b.q >= n or b.d < 0 for b in blocked):
        raise SynthesisError("blocked position outside the window")
    if max_depth is None:
        max_depth = max(1, n * n) + (blocked[-1].d + 1 if blocked else 0)
    # from here on every remaining layer is fully blocked (no edge usable)
    edges = ag.sorted_edges()
    bset = set(blocked)
    dead_from = max_depth
    for d in range(max_depth - 1, -1, -1):
        if all((d, a) in bset or (d, b) in bset for a, b in edges):
            dead_from = d
        else:
            break
    return blocked, max_depth, dead_from


def synthesize(
    target: GF2Matrix,
    ag: ArchitectureGraph,
    blocked=(),
    d_pred: int = 0,
    backend=None,
    max_depth: int | None = None,
) -> SynthesisResult:
    """Minimal-depth CNOT circuit for ``target`` starting the search at ``d_pred``.

    If ``d_pred`` is satisfiable the depth is lowered until the first UNSAT
    answer; otherwise it is raised until the first SAT answer. Raises
    ``SynthesisError`` when nothing fits below ``max_depth``.
    """
    blocked, max_depth, dead_from = _prepare(target, ag, blocked, max_depth)
    trial = _Trials(target, ag, blocked, backend)
    depth = min(max(0, d_pred), max_depth)
    best = trial(depth)
    if best is not None:
        while depth > 0:
            depth -= 1
            res = trial(depth)
            if res is None:
                break
            best = res
    else:
        while best is None:
            depth += 1
            if depth > max_depth or depth - 1 >= dead_from:
                raise SynthesisError(f"no circuit within depth {depth - 1}", trial.calls)
            best = trial(depth)
    return SynthesisResult(best.circuit, best.achieved_depth, trial.calls, best.layers)


def synthesize_from_below(
    target: GF2Matrix, ag: ArchitectureGraph, blocked=(), start: int = 1, backend=None, max_depth=None
) -> SynthesisResult:
    """Trial-and-error baseline: try depth ``start``, ``start + 1``, ... until SAT."""
    blocked, max_depth, dead_from = _prepare(target, ag, blocked, max_depth)
    trial = _Trials(target, ag, blocked, backend)
    depth = start
    while depth <= max_depth and depth - 1 < dead_from:
        res = trial(depth)
        if res is not None:
            return SynthesisResult(res.circuit, depth, trial.calls, res.layers)
        depth += 1
    raise SynthesisError(f"no circuit within depth {max_depth}", trial.calls)


def window_timing(c: Circuit, window_ids, target_depth: int | None = None):
    """Host-layer timing around a window.

    Returns ``(start, qubits, ready, due)``: the window's earliest ASAP layer,
    its sorted qubits, and per qubit the layer its last outside predecessor
    finishes and the latest layer its first outside successor may start
    without pushing the circuit past ``target_depth`` (``inf`` if none).
    """
    ids = set(window_ids)
    starts, frontier = asap_starts(c.gates, c.num_qubits)
    host_depth = max(frontier, default=0)
    if target_depth is None:
        target_depth = host_depth - 1
    qubits = sorted({q for g in c.gates if g.id in ids for q in g.qubits})
    start = min(s for g, s in zip(c.gates, starts) if g.id in ids)

    ready = {q: 0 for q in qubits}
    first_win = {}
    last_win = {}
    for p, g in enumerate(c.gates):
        for q in g.qubits:
            if q not in ready:
                continue
            if g.id in ids:
                first_win.setdefault(q, p)
                last_win[q] = p
            elif q not in first_win:
                ready[q] = starts[p] + g.duration

    # ALAP latest starts over the rest of the circuit
    latest_finish = [target_depth] * c.num_qubits
    latest_start = {}
    for p in range(len(c.gates) - 1, -1, -1):
        g = c.gates[p]
        if g.id in ids:
            continue
        ls = min(latest_finish[q] for q in g.qubits) - g.duration
        latest_start[p] = ls
        for q in g.qubits:
            latest_finish[q] = ls

    due = {}
    for q in qubits:
        nxt = next(
            (p for p in range(last_win[q] + 1, len(c.gates)) if q in c.gates[p].qubits and c.gates[p].id not in ids),
            None,
        )
        due[q] = math.inf if nxt is None else latest_start[nxt]
    return start, qubits, ready, due


def blocked_positions(c: Circuit, w, depth: int, target_depth: int | None = None) -> list[BlockedPosition]:
    """Slots (relative layer, local qubit) a replacement for ``w`` must avoid.

    The replacement is aligned to start at the window's first host layer.
    A qubit is blocked before its outside predecessor finishes and from the
    point where its outside successor would have to start to keep the
    circuit within ``target_depth`` (default: one layer shallower).
    """
    ids = w.gate_ids if hasattr(w, "gate_ids") else w
    start, qubits, ready, due = window_timing(c, ids, target_depth)
    out = []
    for d in range(depth):
        for local, q in enumerate(qubits):
            if start + d < ready[q] or start + d >= due[q]:
                out.append(BlockedPosition(d, local))
    return out
