"""Benchmark harness: optimize every QASM file in a directory."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .arch import ArchError, ArchitectureGraph
from .driver import NonCompliantError, OptimizationReport, SsrParams, ssr_optimize
from .qasm import QasmError, emit_qasm, parse_qasm
from .router import is_compliant, naive_route


@dataclass
class BenchRow:
    name: str
    report: OptimizationReport
    output_qasm: str = ""


@dataclass
class BenchTable:
    rows: list[BenchRow] = field(default_factory=list)
    errors: dict[str, str] = field(default_factory=dict)

    def geomean_ratio(self, attr_ori: str, attr_opt: str) -> float | None:
        ratios = [getattr(r.report, attr_opt) / getattr(r.report, attr_ori) for r in self.rows if getattr(r.report, attr_ori)]
        if not ratios or any(x <= 0 for x in ratios):
            return None
        return math.exp(sum(math.log(x) for x in ratios) / len(ratios))

    def summary(self) -> dict:
        """Geometric-mean improvements, computed as 1 - geomean(opt / ori)."""
        out = {"circuits": len(self.rows), "errors": len(self.errors)}
        for label, ori, opt in (
            ("depth", "original_depth", "final_depth"),
            ("gate", "original_gate_count", "final_gate_count"),
        ):
            g = self.geomean_ratio(ori, opt)
            out[f"geomean_{label}_improvement"] = None if g is None else 1.0 - g
        return out

    def to_json(self, include_runtime: bool = True) -> str:
        doc = {
            "rows": [{"name": r.name, **r.report.to_dict(include_runtime)} for r in self.rows],
            "errors": self.errors,
            "summary": self.summary(),
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        head = ("circuit", "depth", "opt", "imp", "gates", "opt", "imp", "sat", "secs")
        lines = [
            (
                r.name,
                str(r.report.original_depth),
                str(r.report.final_depth),
                f"{100 * r.report.depth_improvement_fraction:.2f}%",
                str(r.report.original_gate_count),
                str(r.report.final_gate_count),
                f"{100 * r.report.gate_improvement_fraction:.2f}%",
                str(r.report.sat_calls),
                f"{r.report.runtime_seconds:.2f}",
            )
            for r in self.rows
        ]
        widths = [max(len(x) for x in col) for col in zip(head, *lines)]
        fmt = lambda cells: "  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(cells, widths)))
        out = [fmt(head)] + [fmt(line) for line in lines]
        s = self.summary()
        for label in ("depth", "gate"):
            v = s[f"geomean_{label}_improvement"]
            out.append(f"geomean {label} improvement: " + ("n/a" if v is None else f"{100 * v:.2f}%"))
        for name, err in sorted(self.errors.items()):
            out.append(f"error {name}: {err}")
        return "\n".join(out) + "\n"


def run_benchmark(directory, ag: ArchitectureGraph, params: SsrParams = SsrParams(), route: bool = False) -> BenchTable:
    """Optimize each ``*.qasm`` file; failures are recorded per file."""
    table = BenchTable()
    for path in sorted(Path(directory).glob("*.qasm")):
        try:
            c = parse_qasm(path.read_text())
            if route and not is_compliant(c, ag):
                c = naive_route(c, ag)
            out, report = ssr_optimize(c, ag, params)
        except (QasmError, ArchError, NonCompliantError, OSError) as e:
            table.errors[path.name] = str(e)
            continue
        table.rows.append(BenchRow(path.stem, report, emit_qasm(out)))
    return table
