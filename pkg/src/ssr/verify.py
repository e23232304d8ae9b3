"""Equivalence oracles: GF(2) matrices for linear blocks, statevectors otherwise.

Qubit q is bit q of the basis-state index (little-endian).
"""
from __future__ import annotations

import ast
import hashlib
import math
import operator
from functools import lru_cache

import numpy as np

from .circuit import Circuit, Kind
from .gf2 import from_circuit

MAX_SIM_QUBITS = 12
MAX_EQUIV_QUBITS = 10

_S2 = 1 / math.sqrt(2)
_FIXED = {
    Kind.H: np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    Kind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    Kind.T: np.diag([1, np.exp(1j * math.pi / 4)]),
    Kind.TDG: np.diag([1, np.exp(-1j * math.pi / 4)]),
    Kind.S: np.diag([1, 1j]),
    Kind.SDG: np.diag([1, -1j]),
}

_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
}


def eval_angle(text: str) -> float:
    """Evaluate an angle expression such as ``-3*pi/4`` or ``0.125``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError(f"unsupported angle expression {text!r}")

    return ev(ast.parse(text, mode="eval"))


@lru_cache(maxsize=None)
def label_unitary(label: str) -> np.ndarray:
    """Deterministic pseudo-random 2x2 unitary for an opaque gate label."""
    seed = int.from_bytes(hashlib.sha256(label.encode()).digest()[:8], "little")
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    q.setflags(write=False)
    return q


def gate_matrix(g) -> np.ndarray:
    if g.kind in _FIXED:
        return _FIXED[g.kind]
    if g.kind is Kind.RZ:
        th = eval_angle(g.arg)
        return np.diag([np.exp(-0.5j * th), np.exp(0.5j * th)])
    if g.kind is Kind.U:
        return label_unitary(g.arg)
    raise ValueError(f"{g.kind} is not a single-qubit gate")


def _apply(states: np.ndarray, c: Circuit) -> np.ndarray:
    """Apply ``c`` to a batch of states shaped (2,)*n + (batch,)."""
    n = c.num_qubits
    for g in c.gates:
        if g.kind is Kind.CNOT:
            ctl, tgt = (n - 1 - q for q in g.qubits)
            idx = [slice(None)] * (n + 1)
            idx[ctl] = 1
            sub = states[tuple(idx)]
            # tgt axis shifts down by one when the control axis precedes it
            axis = tgt - 1 if ctl < tgt else tgt
            states[tuple(idx)] = np.flip(sub, axis=axis)
        elif g.kind is Kind.SWAP:
            a, b = (n - 1 - q for q in g.qubits)
            states = np.swapaxes(states, a, b)
        else:
            ax = n - 1 - g.qubits[0]
            states = np.moveaxis(np.tensordot(gate_matrix(g), states, axes=([1], [ax])), 0, ax)
    return states


def simulate(c: Circuit, input_basis_state: int = 0) -> np.ndarray:
    n = c.num_qubits
    if n > MAX_SIM_QUBITS:
        raise ValueError(f"simulation limited to {MAX_SIM_QUBITS} qubits, got {n}")
    psi = np.zeros(2**n, dtype=complex)
    psi[input_basis_state] = 1.0
    out = _apply(psi.reshape((2,) * n + (1,)), c)
    return np.ascontiguousarray(out).reshape(-1)


def unitary(c: Circuit) -> np.ndarray:
    """Full unitary; column j is the image of basis state j."""
    n = c.num_qubits
    if n > MAX_EQUIV_QUBITS:
        raise ValueError(f"unitary limited to {MAX_EQUIV_QUBITS} qubits, got {n}")
    dim = 2**n
    out = _apply(np.eye(dim, dtype=complex).reshape((2,) * n + (dim,)), c)
    return np.ascontiguousarray(out).reshape(dim, dim)


def equivalent(c1: Circuit, c2: Circuit, tol: float = 1e-9) -> bool:
    """Unitary equality up to a single global phase."""
    if c1.num_qubits != c2.num_qubits:
        return False
    u1, u2 = unitary(c1), unitary(c2)
    flat1, flat2 = u1.reshape(-1), u2.reshape(-1)
    k = int(np.argmax(np.abs(flat1) > tol))
    if abs(flat1[k]) <= tol:
        return bool(np.all(np.abs(flat2) <= tol))
    ratio = flat2[k] / flat1[k]
    if abs(abs(ratio) - 1) > tol:
        return False
    return bool(np.allclose(u2, ratio * u1, rtol=0, atol=tol))


def linear_equivalent(c1: Circuit, c2: Circuit, n: int | None = None) -> bool:
    n = max(c1.num_qubits, c2.num_qubits) if n is None else n
    return from_circuit(c1, n) == from_circuit(c2, n)
