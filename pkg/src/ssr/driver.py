"""The outer optimization loop: commute, sweep, resynthesize, repeat."""
from __future__ import annotations

import json
import logging
import time
from dataclasses import asdict, dataclass, field, replace

from .arch import ArchitectureGraph
from .circuit import Circuit, CircuitError, Gate, splice
from .commute import GaParams, ga_optimize
from .predictor import make_predictor
from .router import is_compliant
from .sweep import SweepParams, extract_subcircuits, score_window, select_top, window_problem
from .synth import SynthesisError, blocked_positions, synthesize
from .verify import MAX_EQUIV_QUBITS, equivalent, linear_equivalent

log = logging.getLogger(__name__)


class NonCompliantError(ValueError):
    pass


class InvariantError(RuntimeError):
    pass


@dataclass(frozen=True)
class SsrParams:
    ga: GaParams = GaParams()
    sweep: SweepParams = SweepParams()
    predictor_mode: str = "oracle"
    models: tuple = ()
    max_outer_iters: int = 20
    seed: int = 0
    safety_verify: bool = False
    use_ga: bool = True
    use_blocking: bool = True
    backend: object = None


@dataclass
class OptimizationReport:
    original_depth: int
    final_depth: int
    original_gate_count: int
    final_gate_count: int
    depth_improvement_fraction: float
    gate_improvement_fraction: float
    sat_calls: int
    runtime_seconds: float
    outer_iterations: int
    rewrites_applied: int = 0

    def to_dict(self, include_runtime: bool = True) -> dict:
        d = asdict(self)
        if not include_runtime:
            d.pop("runtime_seconds")
        return d

    def to_json(self, include_runtime: bool = True) -> str:
        return json.dumps(self.to_dict(include_runtime), indent=2, sort_keys=True) + "\n"


def improvement(ori: float, opt: float) -> float:
    return (ori - opt) / ori if ori else 0.0


@dataclass
class _Stats:
    sat_calls: int = 0
    rewrites: int = 0
    log: list = field(default_factory=list)


def _window_depth(c: Circuit, ids) -> int:
    return Circuit(c.num_qubits, tuple(c.gate(i) for i in ids)).depth


def _try_window(current: Circuit, w, ag, predictor, params: SsrParams, stats: _Stats) -> Circuit | None:
    """Best accepted rewrite of one window, or ``None``."""
    target, local_ag, qubits = window_problem(current, w, ag)
    d_pred = predictor.predict(target, local_ag)
    n = len(qubits)
    base_depth = current.depth
    win_depth = _window_depth(current, w.gate_ids)
    old_cnots = w.cnot_count

    if params.use_blocking:
        # a replacement deeper than the window's host span cannot help
        horizon = w.span[1] - w.span[0]
        if d_pred > horizon:
            return None
        deadlines = [base_depth - 1]
        if d_pred < win_depth:
            deadlines.append(base_depth)
        attempts = [(blocked_positions(current, w.gate_ids, horizon, T), horizon) for T in deadlines]
    else:
        attempts = [((), None)]

    for blocked, cap in attempts:
        try:
            res = synthesize(target, local_ag, blocked, d_pred, params.backend, max_depth=cap)
        except SynthesisError as e:
            stats.sat_calls += e.sat_calls
            continue
        stats.sat_calls += res.sat_calls
        replacement = [Gate(g.kind, tuple(qubits[q] for q in g.qubits)) for g in res.circuit.gates]
        if params.safety_verify:
            original = [current.gate(i) for i in w.gate_ids]
            local = Circuit.of(n, [Gate(g.kind, tuple(qubits.index(q) for q in g.qubits)) for g in original])
            if not linear_equivalent(local, res.circuit, n):
                raise InvariantError(f"synthesized block for window {w.gate_ids} is not equivalent")
        try:
            cand = splice(current, w.gate_ids, replacement)
        except CircuitError as e:
            log.debug("window %s no longer contractible: %s", w.gate_ids, e)
            return None
        new_cnots = len(replacement)
        if cand.depth < base_depth or (cand.depth == base_depth and new_cnots < old_cnots):
            return cand
    return None


def ssr_optimize(c0: Circuit, ag: ArchitectureGraph, params: SsrParams = SsrParams()):
    """Reduce the depth of a hardware-compliant circuit.

    Returns ``(circuit, report)``. Depth never increases; the result is the
    circuit at the end of the last iteration that lowered the depth.
    """
    t0 = time.perf_counter()
    if not is_compliant(c0, ag):
        raise NonCompliantError("input has two-qubit gates off the architecture graph")
    predictor = make_predictor(params.predictor_mode, params.models)
    stats = _Stats()
    best = c0.renumber()
    iters = 0
    for it in range(1, params.max_outer_iters + 1):
        iters = it
        start_depth = best.depth
        if start_depth == 0:
            break
        current = best
        rewrites = 0
        if params.use_ga:
            ga = replace(params.ga, seed=(params.seed * 1_000_003 + params.ga.seed) * 1_009 + it)
            res = ga_optimize(current, ag, ga, params.sweep.n_q)
            if res.circuit.depth <= current.depth:
                current = res.circuit
        windows = extract_subcircuits(current, ag, params.sweep.n_q)
        scores = [score_window(current, w, predictor, ag) for w in windows]
        for w in select_top(scores, params.sweep.n_t):
            if any(i not in current.position for i in w.gate_ids):
                continue
            cand = _try_window(current, w, ag, predictor, params, stats)
            if cand is not None:
                current = cand
                rewrites += 1
        current = current.renumber()
        if not is_compliant(current, ag):
            raise InvariantError("optimized circuit left the architecture graph")
        if current.depth < start_depth:
            best = current
            stats.rewrites += rewrites
        else:
            break
    if params.safety_verify and best.num_qubits <= MAX_EQUIV_QUBITS and not equivalent(c0, best):
        raise InvariantError("optimized circuit is not equivalent to the input")
    report = OptimizationReport(
        original_depth=c0.depth,
        final_depth=best.depth,
        original_gate_count=c0.gate_count(),
        final_gate_count=best.gate_count(),
        depth_improvement_fraction=improvement(c0.depth, best.depth),
        gate_improvement_fraction=improvement(c0.gate_count(), best.gate_count()),
        sat_calls=stats.sat_calls,
        runtime_seconds=time.perf_counter() - t0,
        outer_iterations=iters,
        rewrites_applied=stats.rewrites,
    )
    return best, report
