import itertools
import random

import pytest

from ssr.arch import (
    ArchError,
    ArchitectureGraph,
    bundled,
    canonical_key,
    complete,
    cycle,
    from_edge_list,
    grid,
    induced_subgraph,
    path,
)
from ssr.circuit import Circuit, cnot, h, swap
from ssr.gf2 import (
    GF2Error,
    GF2Matrix,
    apply_cnot,
    from_circuit,
    identity,
    inverse,
    is_invertible,
    multiply,
)

from conftest import LOWER3, random_linear


@pytest.mark.parametrize("rows, cols, nodes, edges", [(5, 4, 20, 31), (1, 1, 1, 0), (3, 3, 9, 12)])
def test_grid_sizes(rows, cols, nodes, edges):
    ag = grid(rows, cols)
    assert (ag.num_qubits, len(ag.edges)) == (nodes, edges)


def test_grid_row_major():
    ag = grid(2, 3)
    assert ag.has_edge(0, 1) and ag.has_edge(1, 0) and ag.has_edge(0, 3)
    assert not ag.has_edge(2, 3)


def test_edge_list_parse():
    ag = from_edge_list("3\n0 1\n1 2\n")
    assert ag == path(3)
    assert from_edge_list("# comment\n3\n0 1 # x\n1 0\n\n1 2\n") == path(3)
    for bad in ("3\n0 1 2\n", "3\n0 3\n", "x\n", "3\n1 1\n"):
        with pytest.raises(ArchError):
            from_edge_list(bad)
    assert from_edge_list(path(4).to_edge_list()) == path(4)


@pytest.mark.parametrize("name, n", [("sycamore", 54), ("rochester", 53), ("heron", 156)])
def test_bundled(name, n):
    ag = bundled(name)
    assert ag.num_qubits == n
    assert ag.is_connected()


def test_induced_subgraph():
    sub, mapping = induced_subgraph(path(3), [0, 1])
    assert sub.edges == path(2).edges and mapping == {0: 0, 1: 1}
    sub, _ = induced_subgraph(grid(2, 2), [0, 1, 2, 3])
    assert canonical_key(sub) == canonical_key(cycle(4))
    sub, _ = induced_subgraph(path(3), [0, 2])
    assert sub.num_qubits == 2 and not sub.edges
    ag = grid(3, 3)
    qs = [1, 4, 5, 8]
    sub, mapping = induced_subgraph(ag, qs)
    for a, b in itertools.combinations(qs, 2):
        assert sub.has_edge(mapping[a], mapping[b]) == ag.has_edge(a, b)


def test_canonical_key_invariance():
    assert canonical_key(path(3)) == canonical_key(ArchitectureGraph.from_edges(3, [(0, 2), (2, 1)]))
    assert canonical_key(path(3)) != canonical_key(complete(3))
    g = ArchitectureGraph.from_edges(5, [(0, 1), (1, 2), (1, 3), (3, 4)])
    keys = set()
    for perm in itertools.permutations(range(5)):
        keys.add(canonical_key(ArchitectureGraph.from_edges(5, [(perm[a], perm[b]) for a, b in g.edges])))
    assert len(keys) == 1
    with pytest.raises(ArchError):
        canonical_key(path(6))


def test_21_connected_classes_on_five_nodes():
    pairs = list(itertools.combinations(range(5), 2))
    keys = set()
    for mask in range(1 << len(pairs)):
        ag = ArchitectureGraph.from_edges(5, [p for i, p in enumerate(pairs) if mask >> i & 1])
        if ag.is_connected():
            keys.add(canonical_key(ag))
    assert len(keys) == 21


def test_apply_cnot_lower_triangular():
    m1 = apply_cnot(identity(3), 0, 1)
    assert m1.to_lists() == [[1, 0, 0], [1, 1, 0], [0, 0, 1]]
    m2 = apply_cnot(m1, 1, 2)
    assert m2 == LOWER3
    assert apply_cnot(m2, 1, 2) == m1
    with pytest.raises(GF2Error):
        apply_cnot(identity(3), 1, 1)


def test_from_circuit_examples():
    assert from_circuit(Circuit.of(3, [cnot(0, 1), cnot(1, 2)])) == LOWER3
    assert from_circuit(Circuit.of(3, [])) == identity(3)
    assert identity(1).to_lists() == [[1]]
    assert from_circuit(Circuit.of(2, [swap(0, 1)])).to_lists() == [[0, 1], [1, 0]]
    with pytest.raises(GF2Error):
        from_circuit(Circuit.of(2, [h(0)]))


def test_gl32_count():
    mats = [GF2Matrix.unpack(3, v) for v in range(512)]
    assert sum(map(is_invertible, mats)) == 168


def test_inverse_and_homomorphism():
    rng = random.Random(3)
    for _ in range(100):
        c1 = random_linear(5, rng.randint(0, 15), rng)
        c2 = random_linear(5, rng.randint(0, 15), rng)
        m1, m2 = from_circuit(c1), from_circuit(c2)
        assert is_invertible(m1)
        assert multiply(m1, inverse(m1)) == identity(5)
        assert multiply(identity(5), m1) == m1
        joined = Circuit.of(5, list(c1.gates) + list(c2.gates))
        assert from_circuit(joined) == multiply(m2, m1)
    with pytest.raises(GF2Error):
        inverse(GF2Matrix.from_lists([[1, 1], [1, 1]]))


def test_swap_decomposition_matrix():
    from ssr.circuit import decompose_swaps

    rng = random.Random(8)
    for _ in range(200):
        c = random_linear(4, rng.randint(0, 12), rng)
        assert from_circuit(c) == from_circuit(decompose_swaps(c))


def test_text_format():
    assert GF2Matrix.from_text(LOWER3.to_text()) == LOWER3
    assert GF2Matrix.from_text("1 0 0\n1 1 0\n1 1 1\n") == LOWER3
    with pytest.raises(GF2Error):
        GF2Matrix.from_text("12\n01\n")
    with pytest.raises(GF2Error):
        GF2Matrix.from_text("10\n011\n")
