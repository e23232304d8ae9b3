"""Acceptance criteria 1-10, one PASS/FAIL line each."""
import contextlib
import math
import random
import time

import numpy as np
import pytest
from pysat.solvers import Solver

from ssr.arch import complete, cycle, grid, path
from ssr.circuit import Circuit, Gate, Kind, cnot, decompose_swaps, splice, swap
from ssr.commute import GaParams, ga_optimize
from ssr.driver import SsrParams, ssr_optimize
from ssr.gf2 import GF2Matrix, from_circuit, is_invertible
from ssr.predictor import OraclePredictor, loss
from ssr.qasm import emit_qasm
from ssr.router import is_compliant, naive_route, random_circuit
from ssr.sweep import extract_subcircuits, window_problem
from ssr.synth import (
    GateVar,
    SynthesisError,
    blocked_positions,
    decode_layers,
    encode,
    solve,
    synthesize,
    synthesize_from_below,
)
from ssr.synth.oracle import bfs_oracle
from ssr.verify import equivalent, simulate

from conftest import SWAP_EX, LOWER3, COMMUTE_EX, BLOCK_EX, random_compliant, random_linear


@contextlib.contextmanager
def criterion(capsys, n, budget=None):
    """Print one verdict line for criterion ``n``; collect details in the yielded dict."""
    info = {}
    t0 = time.perf_counter()
    try:
        yield info
        elapsed = time.perf_counter() - t0
        if budget is not None:
            assert elapsed < budget, f"took {elapsed:.1f}s, budget {budget}s"
    except BaseException as e:
        with capsys.disabled():
            print(f"\ncriterion {n}: FAIL ({type(e).__name__}: {e})")
        raise
    with capsys.disabled():
        detail = ", ".join(f"{k}={v}" for k, v in info.items())
        print(f"\ncriterion {n}: PASS ({detail}; {time.perf_counter() - t0:.1f}s)")


def test_c1_swap_and_matrix_semantics(capsys):
    with criterion(capsys, 1, budget=1.0) as info:
        assert from_circuit(Circuit.of(3, [cnot(0, 1), cnot(1, 2)])) == LOWER3
        worst = 0.0
        for a, b, n in [(0, 1, 2), (1, 0, 2), (0, 2, 3), (2, 1, 3)]:
            c = Circuit.of(n, [swap(a, b)])
            for basis in range(2**n):
                diff = np.abs(simulate(c, basis) - simulate(decompose_swaps(c), basis)).max()
                worst = max(worst, diff)
        assert worst <= 1e-12
        info["max_amplitude_diff"] = worst


def _gl(n):
    return [m for m in (GF2Matrix.unpack(n, v) for v in range(1 << (n * n))) if is_invertible(m)]


@pytest.mark.slow
def test_c2_sat_optimality_vs_oracle(capsys):
    with criterion(capsys, 2, budget=300) as info:
        rng = random.Random(2024)
        checked = 0
        gl3 = _gl(3)
        assert len(gl3) == 168
        for ag in (path(3), complete(3)):
            for m in gl3:
                res = synthesize(m, ag, d_pred=rng.randint(0, 6))
                assert res.achieved_depth == bfs_oracle(m, ag), m
                assert from_circuit(res.circuit) == m
                checked += 1
        gl4 = []
        while len(gl4) < 500:
            m = GF2Matrix.unpack(4, rng.getrandbits(16))
            if is_invertible(m):
                gl4.append(m)
        for ag in (path(4), cycle(4)):
            for m in gl4:
                res = synthesize(m, ag, d_pred=rng.randint(0, 8))
                assert res.achieved_depth == bfs_oracle(m, ag), m
                assert from_circuit(res.circuit) == m
                checked += 1
        info["instances"] = checked


def test_c3_worked_instance(capsys):
    with criterion(capsys, 3) as info:
        inst = encode(LOWER3, path(3), 2)
        model = solve(inst)
        assert model is not None
        assert solve(encode(LOWER3, path(3), 1)) is None
        layers = decode_layers(inst, model)
        assert [set(layer) for layer in layers] == [{(0, 1)}, {(1, 2)}]
        info["layers"] = layers


def _lifted(res, qubits):
    return [Gate(g.kind, tuple(qubits[q] for q in g.qubits)) for g in res]


def _optimal_solutions(target, ag, depth, blocked=()):
    """Every gate layout of the given depth satisfying the encoding."""
    inst = encode(target, ag, depth, blocked)
    gates = [v for k, v in inst.var_map.items() if isinstance(k, GateVar)]
    found = []
    with Solver(name="cadical153", bootstrap_with=inst.clauses) as s:
        while s.solve():
            model = s.get_model()
            found.append(decode_layers(inst, model))
            s.add_clause([-v if model[v - 1] > 0 else v for v in gates])
    return found


def test_c4_reference_regressions(capsys):
    with criterion(capsys, 4, budget=30) as info:
        ag = path(3)
        for name, circ, want in (("swap", SWAP_EX, 4), ("commute", COMMUTE_EX, 4), ("block", BLOCK_EX, 8)):
            out, rep = ssr_optimize(circ, ag, SsrParams(safety_verify=True))
            assert (rep.original_depth, out.depth) == (circ.depth, want), name
            assert equivalent(out, circ, tol=1e-9)
            info[name] = f"{circ.depth}->{out.depth}"

        # BLOCK_EX window: CNOT(0,1), SWAP(1,2), CNOT(1,0), CNOT(2,1)
        window = (1, 2, 3, 5)
        w = next(x for x in extract_subcircuits(BLOCK_EX, ag) if x.gate_ids == window)
        target, local_ag, qubits = window_problem(BLOCK_EX, w, ag)
        free = _optimal_solutions(target, local_ag, 5)
        stuck = [[(0, 1)], [(1, 0)], [(2, 1)], [(1, 2)], [(1, 0)]]
        assert stuck in free
        spliced = {}
        for layers in free:
            gates = [cnot(c, t) for layer in layers for c, t in layer]
            out = splice(BLOCK_EX, window, _lifted(gates, qubits))
            assert equivalent(out, BLOCK_EX)
            spliced[str(layers)] = out.depth
        # without position constraints this rewrite leaves the circuit at depth 9
        assert spliced[str(stuck)] == 9
        blocks = blocked_positions(BLOCK_EX, w, 6)
        constrained = _optimal_solutions(target, local_ag, 5, blocks)
        assert constrained and stuck not in constrained
        for layers in constrained:
            gates = [cnot(c, t) for layer in layers for c, t in layer]
            out = splice(BLOCK_EX, window, _lifted(gates, qubits))
            assert out.depth == 8 and equivalent(out, BLOCK_EX)
        info["block_ex_unblocked_splices"] = sorted(spliced.values())
        info["block_ex_blocked_splices"] = 8
        # reported only: which optimum the solver happens to return decides this one
        out, _ = ssr_optimize(BLOCK_EX, ag, SsrParams(use_blocking=False))
        info["block_ex_driver_without_blocking"] = out.depth


def test_c5_blocked_position_soundness(capsys):
    with criterion(capsys, 5, budget=120) as info:
        rng = random.Random(55)
        windows = 0
        infeasible = 0
        while windows < 200:
            ag = rng.choice([path(4), cycle(4), path(5), grid(2, 3)])
            c = random_compliant(ag, rng.randint(10, 25), rng, cnot_fraction=0.7)
            for w in extract_subcircuits(c, ag, 4):
                if w.is_singleton or windows >= 200:
                    continue
                windows += 1
                target, local_ag, _ = window_problem(c, w, ag)
                horizon = w.span[1] - w.span[0] + rng.randint(0, 2)
                blocks = blocked_positions(c, w, horizon, target_depth=c.depth - rng.randint(0, 2))
                assert all(b.d < horizon and b.q < len(w.qubits) for b in blocks)
                free = synthesize(target, local_ag).achieved_depth
                subset = [b for b in blocks if rng.random() < 0.5]
                depths = []
                for bl in (subset, blocks):
                    try:
                        res = synthesize(target, local_ag, bl, d_pred=rng.randint(0, 6))
                    except SynthesisError:
                        depths.append(math.inf)
                        continue
                    slots = set(bl)
                    for d, layer in enumerate(res.layers):
                        for e in layer:
                            assert not any((d, q) in slots for q in e), (d, e, bl)
                    assert from_circuit(res.circuit) == target
                    depths.append(res.achieved_depth)
                assert free <= depths[0] <= depths[1]
                infeasible += depths[1] == math.inf
        info["windows"] = windows
        info["infeasible_with_all_blocks"] = infeasible


def test_c6_ga_properties(capsys):
    with criterion(capsys, 6, budget=120) as info:
        candidates = 0
        for seed in range(20):
            rng = random.Random(seed)
            ag = [path(5), grid(2, 3), grid(2, 4), cycle(6)][seed % 4]
            c0 = random_compliant(ag, 24, rng, cnot_fraction=0.5)

            def check(genome, circ):
                nonlocal candidates
                candidates += 1
                assert is_compliant(circ, ag)
                assert equivalent(circ, c0, tol=1e-9)

            res = ga_optimize(c0, ag, GaParams(seed=seed, t_max=15, t_idle=15), on_candidate=check)
            assert all(a <= b for a, b in zip(res.history, res.history[1:]))
            assert equivalent(res.circuit, c0)
        info["runs"] = 20
        info["intermediates_checked"] = candidates


def test_c7_loss_asymmetry(capsys):
    with criterion(capsys, 7) as info:
        rng = random.Random(7)
        for _ in range(100):
            # dyadic values keep y +- delta exact, so equality is exact
            y = rng.randint(0, 25 << 20) / (1 << 20)
            delta = rng.randint(1, 5 << 20) / (1 << 20)
            beta = rng.uniform(0.01, 10)
            assert loss([y + delta], [y], beta) == (1 + beta) * loss([y - delta], [y], beta)
        info["samples"] = 100


def test_c8_predictor_reduces_sat_calls(capsys):
    with criterion(capsys, 8, budget=300) as info:
        rng = random.Random(8)
        ag = path(5)
        oracle = OraclePredictor()
        guided = baseline = 0
        for _ in range(20):
            while True:
                target = from_circuit(random_linear(5, rng.randint(6, 18), rng, ag))
                if not target.is_identity():
                    break
            a = synthesize(target, ag, d_pred=oracle.predict(target, ag))
            b = synthesize_from_below(target, ag, start=1)
            assert a.achieved_depth == b.achieved_depth
            guided += a.sat_calls
            baseline += b.sat_calls
        assert guided < baseline
        info["sat_calls_oracle"] = guided
        info["sat_calls_from_depth_1"] = baseline


N9, GATES9 = 9, 100
_RUNS = {}


def _criterion9_run():
    ag = grid(3, 3)
    outs = []
    for seed in range(10):
        logical = random_circuit(N9, GATES9, cnot_fraction=0.5, seed=seed)
        routed = naive_route(logical, ag)
        out, rep = ssr_optimize(routed, ag, SsrParams(seed=seed))
        outs.append((routed, out, rep))
    return outs


@pytest.mark.slow
def test_c9_end_to_end_improvement(capsys):
    with criterion(capsys, 9, budget=600) as info:
        runs = _RUNS.setdefault("first", _criterion9_run())
        ratios = []
        for routed, out, rep in runs:
            assert rep.final_depth <= rep.original_depth
            assert is_compliant(out, grid(3, 3))
            assert equivalent(out, routed, tol=1e-9)
            ratios.append(rep.final_depth / rep.original_depth)
        geo = 1 - math.exp(sum(map(math.log, ratios)) / len(ratios))
        info["geomean_depth_improvement"] = f"{100 * geo:.1f}%"
        info["per_circuit"] = [f"{r.original_depth}->{r.final_depth}" for _, _, r in runs]
        assert geo >= 0.10


@pytest.mark.slow
def test_c10_determinism(capsys):
    with criterion(capsys, 10) as info:
        first = _RUNS.setdefault("first", _criterion9_run())
        second = _criterion9_run()
        for (_, a, ra), (_, b, rb) in zip(first, second):
            assert emit_qasm(a) == emit_qasm(b)
            assert ra.to_json(include_runtime=False) == rb.to_json(include_runtime=False)
        info["circuits_compared"] = len(second)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
