import random

import pytest

from ssr.arch import path
from ssr.circuit import Circuit, Gate, Kind, cnot, h, swap, u, x
from ssr.gf2 import GF2Matrix

LOWER3 = GF2Matrix.from_lists([[1, 0, 0], [1, 1, 0], [1, 1, 1]])

# small hardware-compliant reference circuits, all on path(3) unless noted
SWAP_EX = Circuit.of(3, [h(0), cnot(0, 1), swap(0, 1), cnot(1, 2)])
SWAP_EX_OPT = Circuit.of(3, [h(0), cnot(1, 0), cnot(0, 1), cnot(1, 2)])
COMMUTE_EX = Circuit.of(3, [h(2), cnot(1, 0), cnot(0, 1), swap(1, 2), x(1), cnot(1, 2)])
COMMUTE_EX_OPT = Circuit.of(3, [h(2), x(2), cnot(1, 0), cnot(0, 1), swap(1, 2), cnot(1, 2)])
# path(4)
CROSS_EX = Circuit.of(
    4, [h(2), cnot(1, 0), cnot(0, 1), cnot(1, 2), swap(1, 2), x(2), swap(2, 3), cnot(2, 3), cnot(1, 2)]
)
BLOCK_EX = Circuit.of(
    3, [h(2), cnot(0, 1), swap(1, 2), cnot(1, 0), h(0), cnot(2, 1), u("t", 0), h(1), cnot(1, 0), cnot(2, 1)]
)


def random_linear(n, count, rng, ag=None):
    """Random CNOT/SWAP circuit, restricted to ``ag`` edges when given."""
    pairs = ag.directed_edges() if ag is not None else [(a, b) for a in range(n) for b in range(n) if a != b]
    gates = []
    for _ in range(count):
        a, b = rng.choice(pairs)
        gates.append(Gate(Kind.SWAP if rng.random() < 0.2 else Kind.CNOT, (a, b)))
    return Circuit.of(n, gates)


def random_compliant(ag, count, rng, cnot_fraction=0.5):
    one = [Kind.H, Kind.X, Kind.T, Kind.S, Kind.TDG]
    edges = ag.directed_edges()
    gates = []
    for _ in range(count):
        r = rng.random()
        if r < cnot_fraction:
            gates.append(Gate(Kind.CNOT, rng.choice(edges)))
        elif r < cnot_fraction + 0.1:
            gates.append(Gate(Kind.SWAP, rng.choice(edges)))
        else:
            gates.append(Gate(rng.choice(one), (rng.randrange(ag.num_qubits),)))
    return Circuit.of(ag.num_qubits, gates)


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def p3():
    return path(3)
