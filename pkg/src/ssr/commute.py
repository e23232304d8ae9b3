"""SWAP/CNOT commutation rules and the genetic search over rule sequences."""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .arch import ArchitectureGraph
from .circuit import Circuit, Gate, Kind
from .sweep import count_sub


@dataclass(frozen=True)
class Rejection:
    reason: str

    def __bool__(self) -> bool:
        return False


def _rule(a: Gate, b: Gate) -> tuple[Gate, Gate] | Rejection:
    """For ``a`` then ``b``, the pair ``(b', a')`` with a·b == b'·a'."""
    ka, kb = a.kind, b.kind
    if ka is Kind.CNOT and kb is Kind.CNOT:
        (ca, ta), (cb, tb) = a.qubits, b.qubits
        if (ca == cb and ta != tb) or (ta == tb and ca != cb):
            if len(set(a.qubits) & set(b.qubits)) == 1:
                return b, a
        return Rejection("CNOTs do not share only a control or only a target")
    if Kind.SWAP in (ka, kb):
        if ka is kb:
            return Rejection("no rule for two SWAPs")
        sw, other = (a, b) if ka is Kind.SWAP else (b, a)
        x, y = sw.qubits
        perm = {x: y, y: x}
        if other.kind is not Kind.CNOT and other.kind.arity != 1:
            return Rejection(f"no rule for {other.kind.value}")
        moved = Gate(other.kind, tuple(perm.get(q, q) for q in other.qubits), other.arg, other.id)
        return (moved, a) if sw is a else (b, moved)
    return Rejection(f"no rule for {ka.value} and {kb.value}")


def _legal(g: Gate, ag: ArchitectureGraph) -> bool:
    return g.kind is not Kind.CNOT or ag.has_edge(*g.qubits)


def _plan(c: Circuit, ag: ArchitectureGraph, pa: int, pb: int):
    """Rewrite plan for gates at positions ``pa < pb``, or a Rejection."""
    a, b = c.gates[pa], c.gates[pb]
    shared = set(a.qubits) & set(b.qubits)
    if not shared:
        return Rejection("gates share no qubit")
    out = _rule(a, b)
    if not out:
        return out
    nb, na = out
    if not (_legal(nb, ag) and _legal(na, ag)):
        return Rejection("rewritten CNOT is not on an architecture edge")
    before, after = [], []
    tainted = set(a.qubits)
    dep_qubits: set[int] = set()
    for p in range(pa + 1, pb):
        g = c.gates[p]
        qs = set(g.qubits)
        if qs & shared:
            return Rejection("gates are not adjacent")
        if qs & tainted:
            tainted |= qs
            dep_qubits |= qs
            after.append(g)
        else:
            before.append(g)
    if dep_qubits & set(b.qubits):
        return Rejection("gates are not adjacent: connected through other gates")
    return before, nb, na, after


def try_commute(c: Circuit, ag: ArchitectureGraph, pair) -> Circuit | Rejection:
    """Exchange the two gates of ``pair`` (ids, either order) via the commutation rules.

    Gate ids are kept, so the same pair can be applied again to undo it.
    """
    i, j = pair
    if i not in c.position or j not in c.position:
        return Rejection("unknown gate id")
    pa, pb = sorted((c.position[i], c.position[j]))
    if pa == pb:
        return Rejection("a gate cannot commute with itself")
    plan = _plan(c, ag, pa, pb)
    if not plan:
        return plan
    before, nb, na, after = plan
    gates = c.gates[:pa] + tuple(before) + (nb, na) + tuple(after) + c.gates[pb + 1 :]
    return Circuit(c.num_qubits, gates)


def applicable_pairs(c: Circuit, ag: ArchitectureGraph) -> list[tuple[int, int]]:
    """All pairs (earlier id, later id) that ``try_commute`` would accept."""
    nxt_on: dict[int, int] = {}
    following = [dict() for _ in c.gates]
    for p in range(len(c.gates) - 1, -1, -1):
        for q in c.gates[p].qubits:
            if q in nxt_on:
                following[p][q] = nxt_on[q]
            nxt_on[q] = p
    out = []
    for pa, nexts in enumerate(following):
        for pb in sorted(set(nexts.values())):
            if _plan(c, ag, pa, pb):
                out.append((c.gates[pa].id, c.gates[pb].id))
    return out


@dataclass(frozen=True)
class GaParams:
    n_species: int = 10
    alpha: float = 0.9
    alpha_mu: float = 0.4
    t_max: int = 50
    t_idle: int = 15
    seed: int = 0

    def __post_init__(self):
        if self.n_species < 1:
            raise ValueError("n_species must be positive")
        if not (0 <= self.alpha <= 1 and 0 <= self.alpha_mu <= 1):
            raise ValueError("alpha and alpha_mu must lie in [0, 1]")


@dataclass(frozen=True)
class FitnessBreakdown:
    r_dpt: float
    r_sub: float
    fit: float


@dataclass(frozen=True)
class CommutationGenome:
    pairs: tuple[tuple[int, int], ...] = ()

    def __len__(self) -> int:
        return len(self.pairs)


class GenomeError(ValueError):
    pass


def replay(genome: CommutationGenome, c0: Circuit, ag: ArchitectureGraph) -> Circuit:
    c = c0
    for pair in genome.pairs:
        nxt = try_commute(c, ag, pair)
        if not nxt:
            raise GenomeError(f"pair {pair} rejected during replay: {nxt.reason}")
        c = nxt
    return c


def fitness(base: Circuit, candidate: Circuit, ag, alpha: float, n_q: int = 5) -> FitnessBreakdown:
    d0 = base.depth
    if d0 == 0:
        raise ValueError("fitness undefined for a zero-depth base circuit")
    s0 = count_sub(base, n_q)
    r_dpt = (d0 - candidate.depth) / d0
    r_sub = (s0 - count_sub(candidate, n_q)) / max(1, s0)
    return FitnessBreakdown(r_dpt, r_sub, alpha * r_dpt + (1 - alpha) * r_sub)


def _extend_random(c, genome, ag, rng, k):
    pairs = list(genome.pairs)
    for _ in range(k):
        options = applicable_pairs(c, ag)
        if not options:
            break
        pair = options[rng.randrange(len(options))]
        c = try_commute(c, ag, pair)
        pairs.append(pair)
    return CommutationGenome(tuple(pairs)), c


def mutate(genome: CommutationGenome, c0: Circuit, ag, rng: random.Random, current: Circuit | None = None):
    """Append 1..3 random applicable commutations."""
    c = current if current is not None else replay(genome, c0, ag)
    return _extend_random(c, genome, ag, rng, rng.randint(1, 3))[0]


def crossover(base_genome: CommutationGenome, donor: CommutationGenome, c0: Circuit, ag, current=None):
    """Append the donor's pairs that are new and still applicable."""
    c = current if current is not None else replay(base_genome, c0, ag)
    return _cross(base_genome, donor, c, ag)[0]


def _cross(base_genome, donor, c, ag):
    pairs = list(base_genome.pairs)
    seen = {frozenset(p) for p in pairs}
    for pair in donor.pairs:
        if frozenset(pair) in seen:
            continue
        nxt = try_commute(c, ag, pair)
        if not nxt:
            continue
        c = nxt
        pairs.append(pair)
        seen.add(frozenset(pair))
    return CommutationGenome(tuple(pairs)), c


@dataclass
class _Individual:
    genome: CommutationGenome
    circuit: Circuit
    fit: FitnessBreakdown
    order: int


@dataclass
class GaResult:
    circuit: Circuit
    genome: CommutationGenome
    fitness: FitnessBreakdown
    history: list[float] = field(default_factory=list)
    iterations: int = 0

    def __iter__(self):
        return iter((self.circuit, self.genome))


def ga_optimize(
    c0: Circuit, ag: ArchitectureGraph, params: GaParams = GaParams(), n_q: int = 5, on_candidate=None
) -> GaResult:
    """Genetic search over commutation sequences maximizing ``fitness``.

    ``on_candidate(genome, circuit)``, if given, sees every individual created.
    """
    rng = random.Random(params.seed)
    counter = iter(range(1 << 62))
    empty = FitnessBreakdown(0.0, 0.0, 0.0)
    if c0.depth == 0:
        return GaResult(c0, CommutationGenome(), empty, [0.0])

    def make(genome, circuit):
        if on_candidate is not None:
            on_candidate(genome, circuit)
        return _Individual(genome, circuit, fitness(c0, circuit, ag, params.alpha, n_q), next(counter))

    def rank(pop):
        return sorted(pop, key=lambda s: (-s.fit.fit, len(s.genome), s.order))

    pop = []
    for _ in range(3 * params.n_species):
        genome, circuit = _extend_random(c0, CommutationGenome(), ag, rng, rng.randint(1, 8))
        pop.append(make(genome, circuit))
    pop = rank(pop)[: params.n_species]
    best = pop[0]
    history = [best.fit.fit]
    idle = 0
    it = 0
    for it in range(1, params.t_max + 1):
        n_mut = int(params.alpha_mu * len(pop))
        shuffled = pop[:]
        rng.shuffle(shuffled)
        offspring = []
        for s in shuffled[:n_mut]:
            offspring.append(make(*_extend_random(s.circuit, s.genome, ag, rng, rng.randint(1, 3))))
        for s in shuffled[n_mut:]:
            partner = pop[rng.randrange(len(pop))]
            offspring.append(make(*_cross(s.genome, partner.genome, s.circuit, ag)))
        pop = rank(pop + offspring)[: params.n_species]
        if pop[0].fit.fit > best.fit.fit:
            best, idle = pop[0], 0
        else:
            idle += 1
        history.append(best.fit.fit)
        if idle >= params.t_idle:
            break
    return GaResult(best.circuit, best.genome, best.fit, history, it)
