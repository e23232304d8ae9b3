from .backends import ExternalBackend, PysatBackend, SolverError, solve
from .encoding import (
    BlockedPosition,
    CnfInstance,
    DoneVar,
    EncodingError,
    GateVar,
    MatrixVar,
    decode,
    decode_layers,
    encode,
    parse_dimacs,
)
from .oracle import OracleError, bfs_oracle, layer_moves, optimal_depth
from .search import (
    SynthesisError,
    SynthesisResult,
    blocked_positions,
    synthesize,
    synthesize_from_below,
    window_timing,
)

__all__ = [
    "BlockedPosition",
    "CnfInstance",
    "DoneVar",
    "EncodingError",
    "ExternalBackend",
    "GateVar",
    "MatrixVar",
    "OracleError",
    "PysatBackend",
    "SolverError",
    "SynthesisError",
    "SynthesisResult",
    "bfs_oracle",
    "blocked_positions",
    "decode",
    "decode_layers",
    "encode",
    "layer_moves",
    "optimal_depth",
    "parse_dimacs",
    "solve",
    "synthesize",
    "synthesize_from_below",
    "window_timing",
]
