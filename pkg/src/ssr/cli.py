"""Command-line entry point: ``ssr optimize | synth | train | bench``."""
from __future__ import annotations

import argparse
import logging
import random
import re
import sys
from pathlib import Path

from .arch import ArchError, bundled, cycle, from_edge_list, grid, path
from .bench import run_benchmark
from .commute import GaParams
from .driver import InvariantError, NonCompliantError, SsrParams, ssr_optimize
from .gf2 import GF2Error, GF2Matrix
from .predictor import ModelError, TrainParams, generate_dataset, load_model, model_key, pad_graph, save_model, train, dataset_to_text
from .qasm import QasmError, emit_qasm, parse_qasm
from .router import naive_route
from .sweep import SweepParams
from .synth import ExternalBackend, SolverError, SynthesisError, synthesize
from .synth.oracle import optimal_depth

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2


class UsageError(ValueError):
    pass


def parse_ag(tokens) -> "ArchitectureGraph":
    """``grid RxC``, ``path N``, ``cycle N``, ``file PATH`` or a bundled device name."""
    words = " ".join(tokens).split()
    if not words:
        raise UsageError("empty --ag")
    kind, rest = words[0].lower(), words[1:]
    if kind == "grid" and len(rest) == 1:
        m = re.fullmatch(r"(\d+)x(\d+)", rest[0])
        if not m:
            raise UsageError(f"grid size must look like 3x3, got {rest[0]!r}")
        return grid(int(m.group(1)), int(m.group(2)))
    if kind in ("path", "cycle") and len(rest) == 1 and rest[0].isdigit():
        return (path if kind == "path" else cycle)(int(rest[0]))
    if kind == "file" and len(rest) == 1:
        return from_edge_list(Path(rest[0]).read_text())
    if not rest:
        return bundled(kind)
    raise UsageError(f"cannot interpret --ag {' '.join(words)!r}")


def _add_ag(p):
    p.add_argument("--ag", nargs="+", required=True, metavar="SPEC", help="grid RxC | path N | cycle N | file PATH | sycamore | rochester | heron")


def _add_ssr_params(p):
    p.add_argument("--nq", type=int, default=5)
    p.add_argument("--nt", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=0.9)
    p.add_argument("--mu", type=float, default=0.4)
    p.add_argument("--nspecies", type=int, default=10)
    p.add_argument("--tmax", type=int, default=50)
    p.add_argument("--tidle", type=int, default=15)
    p.add_argument("--max-iters", type=int, default=20)
    p.add_argument("--predictor", choices=("mlp", "oracle"), default="oracle")
    p.add_argument("--model", action="append", default=[], help="trained model file (repeatable)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--verify", action="store_true", help="check equivalence of every rewrite")
    p.add_argument("--no-ga", action="store_true")
    p.add_argument("--no-blocking", action="store_true")
    p.add_argument("--solver", nargs="+", help="external DIMACS solver command")


def _params(args) -> SsrParams:
    models = tuple(load_model(Path(m).read_text()) for m in args.model)
    return SsrParams(
        ga=GaParams(args.nspecies, args.alpha, args.mu, args.tmax, args.tidle, args.seed),
        sweep=SweepParams(args.nq, args.nt),
        predictor_mode=args.predictor,
        models=models,
        max_outer_iters=args.max_iters,
        seed=args.seed,
        safety_verify=args.verify,
        use_ga=not args.no_ga,
        use_blocking=not args.no_blocking,
        backend=ExternalBackend(tuple(args.solver)) if args.solver else None,
    )


def cmd_optimize(args) -> int:
    ag = parse_ag(args.ag)
    c = parse_qasm(Path(args.input).read_text())
    if args.route:
        c = naive_route(c, ag)
    out, report = ssr_optimize(c, ag, _params(args))
    Path(args.output).write_text(emit_qasm(out))
    if args.report:
        Path(args.report).write_text(report.to_json())
    print(
        f"depth {report.original_depth} -> {report.final_depth} "
        f"({100 * report.depth_improvement_fraction:.2f}%), "
        f"gates {report.original_gate_count} -> {report.final_gate_count}, "
        f"{report.sat_calls} SAT calls, {report.outer_iterations} iterations"
    )
    return EXIT_OK


def _read_blocked(text: str):
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise UsageError(f"blocked file line {lineno}: expected 'd q'")
        out.append((int(parts[0]), int(parts[1])))
    return out


def cmd_synth(args) -> int:
    ag = parse_ag(args.ag)
    target = GF2Matrix.from_text(Path(args.matrix).read_text())
    if ag.num_qubits != target.n:
        raise UsageError(f"matrix is {target.n}x{target.n} but the graph has {ag.num_qubits} nodes")
    blocked = _read_blocked(Path(args.blocked).read_text()) if args.blocked else ()
    d_pred = args.d_pred
    if d_pred is None:
        d_pred = optimal_depth(target, ag) if target.n <= 5 else 0
        d_pred = 0 if d_pred is None else d_pred
    backend = ExternalBackend(tuple(args.solver)) if args.solver else None
    res = synthesize(target, ag, blocked, d_pred, backend)
    sys.stdout.write(emit_qasm(res.circuit))
    print(f"// depth {res.achieved_depth}, {res.sat_calls} SAT calls")
    return EXIT_OK


def cmd_train(args) -> int:
    ag = pad_graph(parse_ag(args.ag))
    samples = generate_dataset(ag, args.count, random.Random(args.seed))
    if args.dataset_out:
        Path(args.dataset_out).write_text(dataset_to_text(samples))
    model = train(samples, TrainParams(args.beta, args.max_iter, args.seed), model_key(ag))
    Path(args.out).write_text(save_model(model))
    print(f"trained on {len(samples)} samples, loss {model.loss_history[0]:.4g} -> {model.loss_history[-1]:.4g}")
    return EXIT_OK


def cmd_bench(args) -> int:
    ag = parse_ag(args.ag)
    table = run_benchmark(args.dir, ag, _params(args), route=args.route)
    sys.stdout.write(table.to_text())
    if args.json:
        Path(args.json).write_text(table.to_json())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ssr", description="Depth reduction for routed quantum circuits.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    o = sub.add_parser("optimize", help="optimize one QASM circuit")
    o.add_argument("--input", required=True)
    o.add_argument("--output", required=True)
    o.add_argument("--report", help="write the JSON report here")
    o.add_argument("--route", action="store_true", help="route the input with the naive router first")
    _add_ag(o)
    _add_ssr_params(o)
    o.set_defaults(func=cmd_optimize)

    s = sub.add_parser("synth", help="depth-optimal CNOT circuit for a matrix")
    s.add_argument("--matrix", required=True)
    s.add_argument("--blocked")
    s.add_argument("--d-pred", type=int)
    s.add_argument("--solver", nargs="+")
    _add_ag(s)
    s.set_defaults(func=cmd_synth)

    t = sub.add_parser("train", help="train a depth predictor for one topology")
    t.add_argument("--count", type=int, required=True)
    t.add_argument("--beta", type=float, default=1.0)
    t.add_argument("--max-iter", type=int, default=500)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", required=True)
    t.add_argument("--dataset-out")
    _add_ag(t)
    t.set_defaults(func=cmd_train)

    b = sub.add_parser("bench", help="optimize every QASM file in a directory")
    b.add_argument("--dir", required=True)
    b.add_argument("--json")
    b.add_argument("--route", action="store_true")
    _add_ag(b)
    _add_ssr_params(b)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (InvariantError, SolverError, AssertionError) as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except (
        UsageError,
        QasmError,
        ArchError,
        GF2Error,
        ModelError,
        NonCompliantError,
        SynthesisError,
        OSError,
        ValueError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
