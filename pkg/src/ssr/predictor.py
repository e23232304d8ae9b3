"""Optimal-depth estimation for small CNOT windows.

Two predictors share one interface, ``predict(target, ag) -> int``: the exact
BFS oracle and a multilayer perceptron trained with an asymmetric loss that
penalizes overestimates more than underestimates.
"""
from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from .arch import ArchitectureGraph, canonical_form
from .gf2 import GF2Matrix, apply_cnot, identity
from .synth.oracle import optimal_depth

log = logging.getLogger(__name__)

FRAME = 5
LAYER_DIMS = (25, 200, 50, 100, 50, 1)
MAX_PREDICTION = FRAME * FRAME
SCHEMA = "ssr-mlp/1"


class ModelError(ValueError):
    pass


def pad_graph(ag: ArchitectureGraph, size: int = FRAME) -> ArchitectureGraph:
    if ag.num_qubits > size:
        raise ModelError(f"graph has {ag.num_qubits} nodes, frame holds {size}")
    return ArchitectureGraph(size, ag.edges)


@lru_cache(maxsize=4096)
def _canon(ag: ArchitectureGraph):
    return canonical_form(pad_graph(ag))


def model_key(ag: ArchitectureGraph) -> str:
    """Topology key of ``ag`` padded with isolated nodes to five."""
    return _canon(ag)[0]


def featurize(m: GF2Matrix) -> np.ndarray:
    """5x5 identity-padded matrix flattened row-major."""
    if m.n > FRAME:
        raise ModelError(f"matrices larger than {FRAME}x{FRAME} are not supported")
    p = m.embed(FRAME)
    return np.array([(p.rows[i] >> k) & 1 for i in range(FRAME) for k in range(FRAME)], dtype=float)


def canonical_features(m: GF2Matrix, ag: ArchitectureGraph) -> np.ndarray:
    """Features after relabeling qubits onto the canonical form of ``ag``."""
    _, perm = _canon(ag)
    return featurize(m.embed(FRAME).permuted(perm))


def loss(preds, labels, beta: float) -> float:
    """Mean squared error with overestimates weighted by ``1 + beta``."""
    preds = np.asarray(preds, dtype=float)
    labels = np.asarray(labels, dtype=float)
    if preds.size == 0 or preds.shape != labels.shape:
        raise ValueError("loss needs equal-length, non-empty inputs")
    err = preds - labels
    w = np.where(err > 0, 1.0 + beta, 1.0)
    return float(np.mean(w * np.square(err)))


@dataclass(frozen=True)
class TrainParams:
    beta: float = 1.0
    max_iter: int = 500
    seed: int = 0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")


@dataclass
class MlpModel:
    ag_key: str
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    layer_dims: tuple[int, ...] = LAYER_DIMS
    loss_history: list[float] = field(default_factory=list, compare=False)

    def __post_init__(self):
        dims = tuple(self.layer_dims)
        if len(self.weights) != len(dims) - 1 or len(self.biases) != len(dims) - 1:
            raise ModelError("layer count does not match layer_dims")
        for w, b, i, o in zip(self.weights, self.biases, dims[:-1], dims[1:]):
            if w.shape != (i, o) or b.shape != (o,):
                raise ModelError(f"parameter shape mismatch for layer {i}->{o}")
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ModelError("non-finite parameters")

    def forward(self, x: np.ndarray) -> np.ndarray:
        h = np.atleast_2d(x)
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            h = np.maximum(h @ w + b, 0.0)
        return (h @ self.weights[-1] + self.biases[-1])[:, 0]

    def __eq__(self, other):
        if not isinstance(other, MlpModel):
            return NotImplemented
        return (
            self.ag_key == other.ag_key
            and tuple(self.layer_dims) == tuple(other.layer_dims)
            and all(np.array_equal(a, b) for a, b in zip(self.weights, other.weights))
            and all(np.array_equal(a, b) for a, b in zip(self.biases, other.biases))
        )


def _shapes(dims):
    return [((i, o), (o,)) for i, o in zip(dims[:-1], dims[1:])]


def _unflatten(theta, dims):
    ws, bs, k = [], [], 0
    for (ws_shape, bs_shape) in _shapes(dims):
        n = ws_shape[0] * ws_shape[1]
        ws.append(theta[k : k + n].reshape(ws_shape))
        k += n
        bs.append(theta[k : k + bs_shape[0]])
        k += bs_shape[0]
    return ws, bs


def _loss_and_grad(theta, X, y, beta, dims):
    ws, bs = _unflatten(theta, dims)
    acts = [X]
    h = X
    for w, b in zip(ws[:-1], bs[:-1]):
        h = np.maximum(h @ w + b, 0.0)
        acts.append(h)
    out = (h @ ws[-1] + bs[-1])[:, 0]
    err = out - y
    wgt = np.where(err > 0, 1.0 + beta, 1.0)
    n = len(y)
    value = float(np.mean(wgt * np.square(err)))
    delta = (2.0 / n * wgt * err)[:, None]
    grads = []
    for layer in range(len(ws) - 1, -1, -1):
        a = acts[layer]
        grads.append((a.T @ delta, delta.sum(axis=0)))
        if layer:
            delta = (delta @ ws[layer].T) * (acts[layer] > 0)
    flat = []
    for gw, gb in reversed(grads):
        flat += [gw.ravel(), gb]
    return value, np.concatenate(flat)


@dataclass(frozen=True)
class LabeledSample:
    matrix: GF2Matrix
    label: int


def train(dataset, params: TrainParams = TrainParams(), ag_key: str = "", dims=LAYER_DIMS) -> MlpModel:
    """Full-batch L-BFGS on the asymmetric loss.

    ``dataset`` is a sequence of ``(features, label)`` pairs or of
    ``LabeledSample`` (features taken as-is, i.e. already canonical).
    """
    if not dataset:
        raise ValueError("empty dataset")
    X = np.array([featurize(s.matrix) if isinstance(s, LabeledSample) else s[0] for s in dataset], dtype=float)
    y = np.array([s.label if isinstance(s, LabeledSample) else s[1] for s in dataset], dtype=float)
    rng = np.random.default_rng(params.seed)
    parts = []
    for (i, o), _ in _shapes(dims):
        limit = math.sqrt(6.0 / (i + o))
        parts += [rng.uniform(-limit, limit, size=i * o), np.zeros(o)]
    theta0 = np.concatenate(parts)
    history = []
    cache = {}

    def fun(theta):
        v, g = _loss_and_grad(theta, X, y, params.beta, dims)
        if not math.isfinite(v):
            raise FloatingPointError("training loss diverged")
        cache["last"] = v
        return v, g

    history.append(fun(theta0)[0])
    res = minimize(
        fun,
        theta0,
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": params.max_iter, "gtol": 1e-10, "ftol": 1e-15},
        callback=lambda xk: history.append(cache["last"]),
    )
    theta = res.x
    final = _loss_and_grad(theta, X, y, params.beta, dims)[0]
    if final > history[0]:
        theta, final = theta0, history[0]
    history.append(final)
    ws, bs = _unflatten(theta, dims)
    return MlpModel(ag_key, [w.copy() for w in ws], [b.copy() for b in bs], tuple(dims), history)


def _round_clamp(v: float) -> int:
    return int(min(MAX_PREDICTION, max(0, math.floor(v + 0.5))))


class OraclePredictor:
    """Exact optimal depth via breadth-first search."""

    def predict(self, target: GF2Matrix, ag: ArchitectureGraph) -> int:
        d = optimal_depth(target, ag)
        return MAX_PREDICTION if d is None else d


class MlpPredictor:
    """Per-topology MLPs, with the oracle as fallback for unseen topologies."""

    def __init__(self, models=(), fallback=None):
        self.models = {m.ag_key: m for m in models}
        self.fallback = fallback or OraclePredictor()
        self._warned: set[str] = set()

    def predict(self, target: GF2Matrix, ag: ArchitectureGraph) -> int:
        if target.is_identity():
            return 0
        key = model_key(ag)
        model = self.models.get(key)
        if model is None:
            if key not in self._warned:
                log.warning("no model for topology %s; using exact search", key)
                self._warned.add(key)
            return self.fallback.predict(target, ag)
        return _round_clamp(model.forward(canonical_features(target, ag))[0])


def make_predictor(mode: str = "oracle", models=()):
    if mode == "oracle":
        return OraclePredictor()
    if mode == "mlp":
        return MlpPredictor(models)
    raise ValueError(f"unknown predictor mode {mode!r}")


def _fmt(values) -> str:
    return "[" + ",".join("%.17g" % v for v in np.ravel(values)) + "]"


def save_model(model: MlpModel) -> str:
    layers = ",\n".join(
        f'    {{"weights": {_fmt(w)}, "biases": {_fmt(b)}}}' for w, b in zip(model.weights, model.biases)
    )
    return (
        "{\n"
        f'  "schema": {json.dumps(SCHEMA)},\n'
        f'  "ag_key": {json.dumps(model.ag_key)},\n'
        f'  "layer_dims": {json.dumps(list(model.layer_dims))},\n'
        f'  "layers": [\n{layers}\n  ]\n'
        "}\n"
    )


def load_model(text: str) -> MlpModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelError(f"model file is not valid JSON: {e}") from None
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
        raise ModelError(f"expected schema {SCHEMA!r}")
    try:
        dims = tuple(int(d) for d in doc["layer_dims"])
        key = doc["ag_key"]
        if not isinstance(key, str):
            raise TypeError("ag_key")
        ws, bs = [], []
        for layer, (wshape, bshape) in zip(doc["layers"], _shapes(dims)):
            ws.append(np.array(layer["weights"], dtype=float).reshape(wshape))
            bs.append(np.array(layer["biases"], dtype=float).reshape(bshape))
    except (KeyError, TypeError, ValueError) as e:
        raise ModelError(f"malformed model file: {e}") from None
    return MlpModel(key, ws, bs, dims)


def random_walk_matrix(ag: ArchitectureGraph, steps: int, rng: random.Random) -> GF2Matrix:
    edges = ag.directed_edges()
    m = identity(ag.num_qubits)
    for _ in range(steps):
        c, t = edges[rng.randrange(len(edges))]
        m = apply_cnot(m, c, t)
    return m


def generate_dataset(ag: ArchitectureGraph, count: int, rng: random.Random, harvest=()) -> list[LabeledSample]:
    """Oracle-labeled samples in the canonical frame of ``ag``.

    Random matrices come from 1..20 random edge CNOTs applied to the
    identity; ``harvest`` adds matrices taken from real circuits. The
    identity is always included; duplicates are dropped.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if not ag.edges:
        raise ValueError("graph has no edges")
    mats = [identity(ag.num_qubits)]
    seen = {mats[0]}
    for m in harvest:
        if m.n != ag.num_qubits:
            raise ValueError("harvested matrix does not match the graph")
        if m not in seen:
            seen.add(m)
            mats.append(m)
    produced, attempts = 0, 0
    while produced < count and attempts < 50 * count:
        attempts += 1
        m = random_walk_matrix(ag, rng.randint(1, 20), rng)
        if m not in seen:
            seen.add(m)
            mats.append(m)
            produced += 1
    _, perm = _canon(ag)
    out = []
    for m in mats:
        d = optimal_depth(m, ag)
        if d is not None:
            out.append(LabeledSample(m.embed(FRAME).permuted(perm), d))
    return out


def dataset_to_text(samples) -> str:
    return "".join(
        "".join(str(int(v)) for v in featurize(s.matrix)) + f" {s.label}\n" for s in samples
    )


def dataset_from_text(text: str) -> list[LabeledSample]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            bits, label = line.split()
            n = math.isqrt(len(bits))
            if n * n != len(bits) or set(bits) - {"0", "1"}:
                raise ValueError("bad matrix bits")
            m = GF2Matrix.from_lists([[int(ch) for ch in bits[i * n : (i + 1) * n]] for i in range(n)])
            out.append(LabeledSample(m, int(label)))
        except ValueError as e:
            raise ValueError(f"dataset line {lineno}: {e}") from None
    return out
