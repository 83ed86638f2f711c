"""Monte-Carlo simulator of entanglement-based QKD on grid repeater networks.

Rounds proceed in stages: elementary links survive fiber loss, a
routing algorithm (global shortest-path or one of two local
per-repeater rules) chains them into party-to-party paths, swap success
and decoherence turn paths into channels, and sifting accrues raw key
per party pair.  One final distillation plus max-flow relay yields the
Alice-to-Bob key rate.
"""

from .channel import Channel, ChannelSet, realize_channels
from .engine import (
    SweepConfig,
    TrialConfig,
    TrialResult,
    derive_seed,
    run_sweep,
    run_trial,
)
from .entanglement import (
    DEFAULT_ALPHA_DB_PER_KM,
    EntanglementState,
    generate_entanglement,
    link_success_probability,
)
from .errors import (
    ConfigError,
    InconsistentPairing,
    InvalidGridSize,
    InvalidNode,
    InvalidParameter,
    InvalidPlacement,
    QKDSimError,
)
from .qkd import (
    PairKeyStore,
    SecretKeyGraph,
    binary_entropy,
    distill,
    max_key_flow,
    sift_round,
)
from .routing import (
    AlgorithmKind,
    PairingSet,
    Path,
    PathSet,
    extract_paths,
    repeater_decision,
    route_global,
    route_local,
    route_paths,
)
from .streams import RoundStreams, stream
from .topology import (
    GridTopology,
    Placement,
    PlacementKind,
    build_grid,
    report_user_distance,
    trusted_node_ids,
)

__version__ = "0.1.0"

__all__ = [
    "AlgorithmKind",
    "Channel",
    "ChannelSet",
    "ConfigError",
    "DEFAULT_ALPHA_DB_PER_KM",
    "EntanglementState",
    "GridTopology",
    "InconsistentPairing",
    "InvalidGridSize",
    "InvalidNode",
    "InvalidParameter",
    "InvalidPlacement",
    "PairKeyStore",
    "PairingSet",
    "Path",
    "PathSet",
    "Placement",
    "PlacementKind",
    "QKDSimError",
    "RoundStreams",
    "SecretKeyGraph",
    "SweepConfig",
    "TrialConfig",
    "TrialResult",
    "binary_entropy",
    "build_grid",
    "derive_seed",
    "distill",
    "extract_paths",
    "generate_entanglement",
    "link_success_probability",
    "max_key_flow",
    "realize_channels",
    "repeater_decision",
    "report_user_distance",
    "route_global",
    "route_local",
    "route_paths",
    "run_sweep",
    "run_trial",
    "sift_round",
    "stream",
    "trusted_node_ids",
]
