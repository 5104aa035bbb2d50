"""Spanke/Clos switching-fabric models, wavelength admission, blocking
simulation, analytic limits, and Spine-Leaf datacenter variants."""

from .admission import (
    Assignment,
    Connection,
    ConnectionRequest,
    Policy,
    admissible_assignments,
    admit,
    awg_route,
)
from .dcn import (
    MulticastConnection,
    MulticastRequest,
    SpineKind,
    SpineLeafFabric,
    SpineLeafSpec,
    admit_multicast,
    build_spine_leaf,
    fold_clos,
    ring_adjacency,
    substitute_spine,
    unfold,
)
from .errors import (
    FabricError,
    IndexOutOfRange,
    InvalidConfig,
    InvalidInput,
    InvalidRequest,
    InvalidSpec,
    NoSplitterSpine,
    ResourceConflict,
    UnknownConnection,
    UnknownFiber,
)
from .fabric import (
    ElementCounts,
    ElementDescriptor,
    Fabric,
    FabricKind,
    FabricSpec,
    FiberRef,
    IngressToMiddle,
    LineIn,
    LineOut,
    MiddleKind,
    MiddleToEgress,
    Stage,
    build_fabric,
    count_elements,
    count_fibers,
)
from .sim import (
    SimConfig,
    SimStats,
    confidence_interval,
    derive_seed,
    run,
    sweep,
)
from .theory import (
    BlockingLimit,
    ComplexityReport,
    SpatialNonblockingThreshold,
    compare_complexity,
    erlang_b,
    rearrangeable_threshold,
    spatial_nonblocking_threshold,
    theoretical_limit,
    wavelength_doubling_requirement,
)

__version__ = "0.1.0"
