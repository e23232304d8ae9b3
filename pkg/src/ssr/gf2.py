"""Invertible Boolean matrices: the functional semantics of CNOT/SWAP circuits.

Row ``i`` is an int bitset whose bit ``k`` is entry (i, k). A CNOT(c, t)
adds row c into row t, so running a circuit left to right is a sequence of
row operations on the identity (left multiplication by elementary matrices).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .circuit import Circuit, Kind


class GF2Error(ValueError):
    pass


@dataclass(frozen=True)
class GF2Matrix:
    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise GF2Error(f"expected {self.n} rows, got {len(self.rows)}")
        limit = 1 << self.n
        if any(r < 0 or r >= limit for r in self.rows):
            raise GF2Error("row wider than the matrix")

    @classmethod
    def from_lists(cls, entries: Iterable[Iterable[int]]) -> GF2Matrix:
        rows = [list(r) for r in entries]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise GF2Error("matrix must be square")
        return cls(n, tuple(sum((v & 1) << k for k, v in enumerate(r)) for r in rows))

    def to_lists(self) -> list[list[int]]:
        return [[(r >> k) & 1 for k in range(self.n)] for r in self.rows]

    def __getitem__(self, ik: tuple[int, int]) -> int:
        i, k = ik
        return (self.rows[i] >> k) & 1

    def pack(self) -> int:
        """Whole matrix as one integer, row i at bit offset n*i."""
        return sum(r << (self.n * i) for i, r in enumerate(self.rows))

    @classmethod
    def unpack(cls, n: int, value: int) -> GF2Matrix:
        mask = (1 << n) - 1
        return cls(n, tuple((value >> (n * i)) & mask for i in range(n)))

    def to_text(self) -> str:
        return "".join("".join(str(v) for v in row) + "\n" for row in self.to_lists())

    @classmethod
    def from_text(cls, text: str) -> GF2Matrix:
        # rows of 0/1, optionally separated by whitespace; '#' starts a comment
        lines = ["".join(ln.split("#", 1)[0].split()) for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if any(set(ln) - {"0", "1"} for ln in lines):
            raise GF2Error("matrix text may only contain 0 and 1")
        return cls.from_lists([[int(ch) for ch in ln] for ln in lines])

    def __str__(self) -> str:
        return self.to_text().rstrip("\n")

    def is_identity(self) -> bool:
        return all(r == 1 << i for i, r in enumerate(self.rows))

    def permuted(self, perm) -> GF2Matrix:
        """Relabel qubits: entry (i, k) moves to (perm[i], perm[k])."""
        out = [0] * self.n
        for i in range(self.n):
            for k in range(self.n):
                if (self.rows[i] >> k) & 1:
                    out[perm[i]] |= 1 << perm[k]
        return GF2Matrix(self.n, tuple(out))

    def embed(self, size: int) -> GF2Matrix:
        """Pad with identity rows/columns up to ``size``."""
        if size < self.n:
            raise GF2Error("cannot embed into a smaller matrix")
        return GF2Matrix(size, self.rows + tuple(1 << i for i in range(self.n, size)))


def identity(n: int) -> GF2Matrix:
    if n < 1:
        raise GF2Error("dimension must be positive")
    return GF2Matrix(n, tuple(1 << i for i in range(n)))


def apply_cnot(m: GF2Matrix, control: int, target: int) -> GF2Matrix:
    if control == target or not (0 <= control < m.n and 0 <= target < m.n):
        raise GF2Error(f"invalid CNOT({control}, {target}) on {m.n} qubits")
    rows = list(m.rows)
    rows[target] ^= rows[control]
    return GF2Matrix(m.n, tuple(rows))


def from_circuit(c: Circuit, n: int | None = None) -> GF2Matrix:
    n = c.num_qubits if n is None else n
    rows = [1 << i for i in range(n)]
    for g in c.gates:
        if g.kind is Kind.CNOT:
            a, b = g.qubits
            rows[b] ^= rows[a]
        elif g.kind is Kind.SWAP:
            a, b = g.qubits
            rows[a], rows[b] = rows[b], rows[a]
        else:
            raise GF2Error(f"non-linear gate {g} in CNOT circuit")
    return GF2Matrix(n, tuple(rows))


def multiply(a: GF2Matrix, b: GF2Matrix) -> GF2Matrix:
    if a.n != b.n:
        raise GF2Error("dimension mismatch")
    out = []
    for row in a.rows:
        acc = 0
        k = 0
        while row:
            if row & 1:
                acc ^= b.rows[k]
            row >>= 1
            k += 1
        out.append(acc)
    return GF2Matrix(a.n, tuple(out))


def _eliminate(m: GF2Matrix) -> tuple[bool, list[int]]:
    """Gauss-Jordan on [m | I]; returns (invertible, right half)."""
    n = m.n
    work = list(m.rows)
    inv = [1 << i for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if (work[r] >> col) & 1), None)
        if pivot is None:
            return False, inv
        work[col], work[pivot] = work[pivot], work[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        for r in range(n):
            if r != col and (work[r] >> col) & 1:
                work[r] ^= work[col]
                inv[r] ^= inv[col]
    return True, inv


def is_invertible(m: GF2Matrix) -> bool:
    return _eliminate(m)[0]


def inverse(m: GF2Matrix) -> GF2Matrix:
    ok, inv = _eliminate(m)
    if not ok:
        raise GF2Error("matrix is singular over GF(2)")
    return GF2Matrix(m.n, tuple(inv))
