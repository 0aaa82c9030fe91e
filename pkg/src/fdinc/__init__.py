"""fdinc: discovery and incremental maintenance of minimal functional
dependencies over growing CSV datasets.

The engine discovers the complete set of minimal, non-trivial FDs of a
relation and keeps it current under batch tuple insertions, trading full
re-runs for per-attribute hypergraphs of difference sets, resumable minimal
hitting set enumeration, and a two-step validation strategy backed by a
bounded cache of high-frequency LHS-to-RHS value mappings.
"""

from ._kernels import active_backend
from .discovery import DiscoveryState, FDSet, discover
from .incremental import update
from .oracle import brute_fds, brute_mhs, check_fd
from .relation import (
    DeltaRelation,
    EncodedRelation,
    Schema,
    append_batch,
    build_sorted_views,
    ingest_csv,
    merge,
    read_delta_csv,
)

__version__ = "0.1.0"

__all__ = [
    "DiscoveryState",
    "DeltaRelation",
    "EncodedRelation",
    "FDSet",
    "Schema",
    "__version__",
    "active_backend",
    "append_batch",
    "brute_fds",
    "brute_mhs",
    "build_sorted_views",
    "check_fd",
    "discover",
    "ingest_csv",
    "merge",
    "read_delta_csv",
    "update",
]
