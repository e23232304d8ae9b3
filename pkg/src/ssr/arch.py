"""Architecture graphs (qubit connectivity)."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from itertools import permutations


class ArchError(ValueError):
    pass


@dataclass(frozen=True)
class ArchitectureGraph:
    num_qubits: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        norm = set()
        for a, b in self.edges:
            if a == b:
                raise ArchError(f"self-loop on {a}")
            if not (0 <= a < self.num_qubits and 0 <= b < self.num_qubits):
                raise ArchError(f"edge ({a}, {b}) outside 0..{self.num_qubits - 1}")
            norm.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, num_qubits: int, edges) -> ArchitectureGraph:
        return cls(num_qubits, frozenset(tuple(e) for e in edges))

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        adj = [set() for _ in range(self.num_qubits)]
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return tuple(frozenset(s) for s in adj)

    def neighbors(self, q: int) -> frozenset[int]:
        return self.adjacency[q]

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def directed_edges(self) -> list[tuple[int, int]]:
        return sorted([(a, b) for a, b in self.edges] + [(b, a) for a, b in self.edges])

    def shortest_path(self, a: int, b: int) -> list[int]:
        prev = {a: None}
        queue = deque([a])
        while queue:
            v = queue.popleft()
            if v == b:
                break
            for w in sorted(self.adjacency[v]):
                if w not in prev:
                    prev[w] = v
                    queue.append(w)
        if b not in prev:
            raise ArchError(f"qubits {a} and {b} are disconnected")
        path = [b]
        while path[-1] != a:
            path.append(prev[path[-1]])
        return path[::-1]

    def is_connected(self) -> bool:
        if self.num_qubits == 0:
            return True
        seen = {0}
        stack = [0]
        while stack:
            for w in self.adjacency[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.num_qubits

    def to_edge_list(self) -> str:
        return f"{self.num_qubits}\n" + "".join(f"{a} {b}\n" for a, b in self.sorted_edges())


def grid(rows: int, cols: int) -> ArchitectureGraph:
    if rows < 1 or cols < 1:
        raise ArchError("grid dimensions must be positive")
    edges = []
    for r in range(rows):
        for c in range(cols):
            q = r * cols + c
            if c + 1 < cols:
                edges.append((q, q + 1))
            if r + 1 < rows:
                edges.append((q, q + cols))
    return ArchitectureGraph.from_edges(rows * cols, edges)


def path(n: int) -> ArchitectureGraph:
    return ArchitectureGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> ArchitectureGraph:
    return ArchitectureGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> ArchitectureGraph:
    return ArchitectureGraph.from_edges(n, [(a, b) for a in range(n) for b in range(a + 1, n)])


def from_edge_list(text: str) -> ArchitectureGraph:
    """Parse the edge-list format: node count, then one ``a b`` pair per line.

    ``#`` starts a comment; blank lines are ignored; duplicate edges collapse.
    """
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise ArchError(f"line {lineno}: expected integers, got {raw!r}") from None
        if n is None:
            if len(nums) != 1 or nums[0] < 0:
                raise ArchError(f"line {lineno}: first line must be the node count")
            n = nums[0]
            continue
        if len(nums) != 2:
            raise ArchError(f"line {lineno}: expected 'a b', got {raw!r}")
        a, b = nums
        if not (0 <= a < n and 0 <= b < n):
            raise ArchError(f"line {lineno}: index out of range for {n} nodes")
        if a == b:
            raise ArchError(f"line {lineno}: self-loop")
        edges.append((a, b))
    if n is None:
        raise ArchError("empty edge list")
    return ArchitectureGraph.from_edges(n, edges)


BUNDLED = {"sycamore": "sycamore54.edges", "rochester": "rochester53.edges", "heron": "heron156.edges"}


def bundled(name: str) -> ArchitectureGraph:
    """Load one of the shipped device graphs (sycamore, rochester, heron)."""
    try:
        fname = BUNDLED[name]
    except KeyError:
        raise ArchError(f"unknown device {name!r}; choose from {sorted(BUNDLED)}") from None
    return from_edge_list(resources.files("ssr.data").joinpath(fname).read_text())


def induced_subgraph(ag: ArchitectureGraph, qubits) -> tuple[ArchitectureGraph, dict[int, int]]:
    """Relabel ``qubits`` to 0..k-1 (in the given order) keeping edges among them."""
    qubits = list(qubits)
    if len(set(qubits)) != len(qubits):
        raise ArchError("induced_subgraph needs distinct qubits")
    mapping = {q: i for i, q in enumerate(qubits)}
    edges = [(mapping[a], mapping[b]) for a, b in ag.edges if a in mapping and b in mapping]
    return ArchitectureGraph.from_edges(len(qubits), edges), mapping


def _adjacency_bits(n: int, edges, perm) -> str:
    adj = {(min(perm[a], perm[b]), max(perm[a], perm[b])) for a, b in edges}
    return "".join("1" if (i, j) in adj else "0" for i in range(n) for j in range(i + 1, n))


def canonical_form(ag: ArchitectureGraph) -> tuple[str, tuple[int, ...]]:
    """Isomorphism-invariant key and a relabeling onto the canonical graph.

    Tries every permutation (n <= 5) and keeps the lexicographically smallest
    upper-triangle adjacency string. ``perm[v]`` is the canonical label of v.
    """
    n = ag.num_qubits
    if n > 5:
        raise ArchError("canonical keys are only defined for graphs with at most 5 nodes")
    best = None
    for perm in permutations(range(n)):
        bits = _adjacency_bits(n, ag.edges, perm)
        if best is None or bits < best[0]:
            best = (bits, perm)
    bits, perm = best if best else ("", ())
    return f"{n}:{bits}", tuple(perm)


def canonical_key(ag: ArchitectureGraph) -> str:
    return canonical_form(ag)[0]
