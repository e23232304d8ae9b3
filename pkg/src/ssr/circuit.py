"""Circuit representation, ASAP layering and structural edits.

A circuit is an immutable sequence of gates acting on physical qubits. Gate
ids are stable labels (the genetic search refers to gates by id while they
move around), so the list order and the ids are independent of each other.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Iterable, Sequence


class Kind(str, Enum):
    H = "h"
    X = "x"
    T = "t"
    TDG = "tdg"
    S = "s"
    SDG = "sdg"
    RZ = "rz"
    U = "u"
    CNOT = "cx"
    SWAP = "swap"

    @property
    def arity(self) -> int:
        return 2 if self in (Kind.CNOT, Kind.SWAP) else 1


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    """One gate. For CNOT ``qubits`` is ``(control, target)``.

    ``arg`` holds the angle text of an Rz gate or the label of an opaque
    single-qubit gate; it is ``None`` for every other kind.
    """

    kind: Kind
    qubits: tuple[int, ...]
    arg: str | None = None
    id: int = -1

    def __post_init__(self):
        if len(self.qubits) != self.kind.arity:
            raise CircuitError(f"{self.kind.value} expects {self.kind.arity} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"repeated qubit in {self.kind.value}{self.qubits}")
        if self.kind in (Kind.RZ, Kind.U) and self.arg is None:
            raise CircuitError(f"{self.kind.value} gate needs an argument")

    @property
    def is_linear(self) -> bool:
        return self.kind in (Kind.CNOT, Kind.SWAP)

    @property
    def duration(self) -> int:
        """Layers occupied once SWAPs are decomposed into three CNOTs."""
        return 3 if self.kind is Kind.SWAP else 1

    def key(self) -> tuple:
        """Identity of the operation, ignoring the id."""
        return (self.kind, self.qubits, self.arg)

    def with_id(self, gid: int) -> Gate:
        return replace(self, id=gid)

    def __str__(self) -> str:
        name = self.kind.value if self.kind is not Kind.U else self.arg
        if self.kind is Kind.RZ:
            name = f"rz({self.arg})"
        return f"{name}{list(self.qubits)}#{self.id}"


def h(q: int) -> Gate:
    return Gate(Kind.H, (q,))


def x(q: int) -> Gate:
    return Gate(Kind.X, (q,))


def t(q: int) -> Gate:
    return Gate(Kind.T, (q,))


def rz(angle: str, q: int) -> Gate:
    return Gate(Kind.RZ, (q,), str(angle))


def u(label: str, q: int) -> Gate:
    return Gate(Kind.U, (q,), label)


def cnot(control: int, target: int) -> Gate:
    return Gate(Kind.CNOT, (control, target))


def swap(a: int, b: int) -> Gate:
    return Gate(Kind.SWAP, (a, b))


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        gates = tuple(self.gates)
        if any(g.id < 0 for g in gates):
            # unnumbered gates get their list position as id
            gates = tuple(g.with_id(i) for i, g in enumerate(gates))
        object.__setattr__(self, "gates", gates)
        ids = set()
        for g in gates:
            if any(q < 0 or q >= self.num_qubits for q in g.qubits):
                raise CircuitError(f"gate {g} outside register of {self.num_qubits} qubits")
            if g.id in ids:
                raise CircuitError(f"duplicate gate id {g.id}")
            ids.add(g.id)

    @classmethod
    def of(cls, num_qubits: int, gates: Iterable[Gate]) -> Circuit:
        """Build a circuit numbering gates by position."""
        return cls(num_qubits, tuple(g.with_id(i) for i, g in enumerate(gates)))

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    @cached_property
    def position(self) -> dict[int, int]:
        return {g.id: i for i, g in enumerate(self.gates)}

    def gate(self, gid: int) -> Gate:
        return self.gates[self.position[gid]]

    def renumber(self) -> Circuit:
        return Circuit.of(self.num_qubits, self.gates)

    def same_gates(self, other: Circuit) -> bool:
        """Equality of the operation sequence, ignoring gate ids."""
        return self.num_qubits == other.num_qubits and [g.key() for g in self.gates] == [
            g.key() for g in other.gates
        ]

    @cached_property
    def depth(self) -> int:
        return depth(self)

    def cnot_count(self) -> int:
        """Gate count after SWAP decomposition, two-qubit gates only."""
        return sum(3 if g.kind is Kind.SWAP else 1 for g in self.gates if g.is_linear)

    def gate_count(self) -> int:
        """Total gate count after SWAP decomposition."""
        return sum(g.duration for g in self.gates)

    def without(self, ids: Iterable[int]) -> Circuit:
        drop = set(ids)
        return Circuit(self.num_qubits, tuple(g for g in self.gates if g.id not in drop))


@dataclass(frozen=True)
class Layering:
    """ASAP schedule. A SWAP occupies three consecutive layers starting at
    ``layer_of[id]``; its id is listed in each of them."""

    layers: tuple[frozenset[int], ...]
    layer_of: dict[int, int] = field(hash=False)

    def __len__(self) -> int:
        return len(self.layers)


def decompose_swaps(c: Circuit) -> Circuit:
    out = []
    for g in c.gates:
        if g.kind is Kind.SWAP:
            a, b = g.qubits
            out += [cnot(a, b), cnot(b, a), cnot(a, b)]
        else:
            out.append(g)
    return Circuit.of(c.num_qubits, out)


def asap_starts(gates: Sequence[Gate], num_qubits: int) -> tuple[list[int], list[int]]:
    """Start layer of every gate and the final frontier per qubit."""
    frontier = [0] * num_qubits
    starts = []
    for g in gates:
        s = max(frontier[q] for q in g.qubits)
        starts.append(s)
        for q in g.qubits:
            frontier[q] = s + g.duration
    return starts, frontier


def depth(c: Circuit) -> int:
    if not c.gates:
        return 0
    _, frontier = asap_starts(c.gates, c.num_qubits)
    return max(frontier)


def layering(c: Circuit) -> Layering:
    starts, frontier = asap_starts(c.gates, c.num_qubits)
    n_layers = max(frontier, default=0)
    buckets: list[set[int]] = [set() for _ in range(n_layers)]
    layer_of = {}
    for g, s in zip(c.gates, starts):
        layer_of[g.id] = s
        for k in range(s, s + g.duration):
            buckets[k].add(g.id)
    return Layering(tuple(frozenset(b) for b in buckets), layer_of)


def check_window(c: Circuit, window: Iterable[int]) -> list[int]:
    """Validate that ``window`` can be contracted to a single block.

    Returns the window positions in ``c``. Raises if another gate sits between
    two window gates on a shared qubit, or if a path leaves the window and
    re-enters it (the contracted block would then have to precede itself).
    """
    ids = set(window)
    missing = ids - c.position.keys()
    if missing:
        raise CircuitError(f"unknown gate ids {sorted(missing)}")
    positions = sorted(c.position[i] for i in ids)
    if not positions:
        return positions
    wq = {q for p in positions for q in c.gates[p].qubits}
    seen_window: set[int] = set()
    closed: set[int] = set()
    # qubits whose state depends on a window gate through an outside gate
    tainted: set[int] = set()
    for p in range(positions[0], positions[-1] + 1):
        g = c.gates[p]
        qs = set(g.qubits)
        if g.id in ids:
            if qs & closed:
                raise CircuitError("window is not contiguous on its qubits")
            if qs & tainted:
                raise CircuitError("window is not convex: an outside path re-enters it")
            seen_window |= qs
        else:
            hit = qs & (seen_window | tainted)
            if hit:
                tainted |= qs
                closed |= hit & wq
    return positions


def splice(c: Circuit, window: Iterable[int], replacement: Sequence[Gate]) -> Circuit:
    """Replace the window by ``replacement`` keeping untouched gate ids.

    New gates get fresh ids above the current maximum. Gates located between
    the first and last window gate that depend on the window are moved after
    the replacement; everything else keeps its relative order.
    """
    ids = set(window)
    positions = check_window(c, ids)
    wq = {q for p in positions for q in c.gates[p].qubits}
    for g in replacement:
        if not set(g.qubits) <= wq:
            raise CircuitError(f"replacement gate {g} touches qubits outside the window {sorted(wq)}")
    next_id = max((g.id for g in c.gates), default=-1) + 1
    fresh = [g.with_id(next_id + k) for k, g in enumerate(replacement)]
    if not positions:
        return Circuit(c.num_qubits, c.gates + tuple(fresh))
    first, last = positions[0], positions[-1]
    before, after = [], []
    tainted: set[int] = set()
    for p in range(first, last + 1):
        g = c.gates[p]
        if g.id in ids:
            tainted |= set(g.qubits)
        elif tainted & set(g.qubits):
            tainted |= set(g.qubits)
            after.append(g)
        else:
            before.append(g)
    gates = c.gates[:first] + tuple(before) + tuple(fresh) + tuple(after) + c.gates[last + 1 :]
    return Circuit(c.num_qubits, gates)


def replace_window(c: Circuit, window: Iterable[int], replacement: Circuit) -> Circuit:
    """Swap a contiguous block of gates for an equivalent one.

    ``replacement`` is expressed on the host's qubit indices. The result is
    renumbered with dense ids in list order.
    """
    if replacement.num_qubits > c.num_qubits:
        raise CircuitError("replacement has more qubits than the host circuit")
    return splice(c, window, replacement.gates).renumber()
