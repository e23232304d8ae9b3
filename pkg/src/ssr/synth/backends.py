"""SAT backends: an in-process CDCL solver or any DIMACS solver executable."""
from __future__ import annotations

import os
import subprocess
import tempfile
from dataclasses import dataclass

from pysat.solvers import Solver

from .encoding import CnfInstance, parse_dimacs


class SolverError(RuntimeError):
    """The backend failed; distinct from an UNSAT answer."""


@dataclass(frozen=True)
class PysatBackend:
    name: str = "cadical153"

    def solve_clauses(self, nvars: int, clauses) -> list[int] | None:
        try:
            with Solver(name=self.name, bootstrap_with=clauses) as s:
                if not s.solve():
                    return None
                model = s.get_model() or []
        except (RuntimeError, NotImplementedError, ValueError) as e:
            raise SolverError(f"pysat backend {self.name!r} failed: {e}") from e
        seen = {abs(lit) for lit in model}
        # pad unconstrained variables so the model covers 1..nvars
        return list(model) + [-v for v in range(1, nvars + 1) if v not in seen]


@dataclass(frozen=True)
class ExternalBackend:
    """Runs ``command + [cnf_path]`` and reads competition-format output."""

    command: tuple[str, ...]
    timeout: float | None = None

    def solve_clauses(self, nvars: int, clauses) -> list[int] | None:
        text = f"p cnf {nvars} {len(clauses)}\n" + "".join(" ".join(map(str, c)) + " 0\n" for c in clauses)
        fd, path = tempfile.mkstemp(suffix=".cnf")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            try:
                proc = subprocess.run(
                    [*self.command, path], capture_output=True, text=True, timeout=self.timeout, check=False
                )
            except (OSError, subprocess.TimeoutExpired) as e:
                raise SolverError(f"external solver failed: {e}") from e
        finally:
            os.unlink(path)
        return _parse_solver_output(proc.stdout, proc.returncode, nvars)


def _parse_solver_output(out: str, code: int, nvars: int) -> list[int] | None:
    status = None
    model = []
    for line in out.splitlines():
        if line.startswith("s "):
            status = line[2:].strip()
        elif line.startswith("v "):
            model += [int(tok) for tok in line[2:].split() if tok != "0"]
    if status == "UNSATISFIABLE":
        return None
    if status != "SATISFIABLE":
        raise SolverError(f"external solver gave no verdict (exit code {code})")
    seen = {abs(lit) for lit in model}
    return model + [-v for v in range(1, nvars + 1) if v not in seen]


DEFAULT_BACKEND = PysatBackend()


def solve(instance: CnfInstance | str, backend=None) -> list[int] | None:
    """Satisfying assignment as signed literals, or ``None`` when UNSAT.

    ``instance`` may also be DIMACS text.
    """
    backend = backend or DEFAULT_BACKEND
    if isinstance(instance, str):
        nvars, clauses = parse_dimacs(instance)
    else:
        nvars, clauses = instance.var_count, instance.clauses
    if any(not cl for cl in clauses):
        return None
    return backend.solve_clauses(nvars, clauses)
