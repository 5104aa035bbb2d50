"""Folded-Clos (Spine-Leaf) topologies and their passive-spine variants.

Folding v(M,L,D) stacks each ingress/egress element pair into one leaf,
growing it from L x M to (L+M) x (L+M); the M middle elements become
D x D spine switches.  A spine slot can then be swapped for an optical
splitter (passive 1-to-D broadcast, which makes multicast a single
uplink wavelength instead of one unicast per destination) or for direct
round-robin fibers that stitch the leaves into a 1-D torus ring.

Splitter occupancy is conservative: a splitter carries at most one
connection per wavelength, and that connection owns the wavelength on
every downlink because the power really is broadcast everywhere.  Ring
slots are topology-only here; no traffic is modeled across them.  For
unicast through switch spines, unfold the spec and drive the regular
admission module on the resulting Clos fabric.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from types import MappingProxyType
from typing import Mapping, Optional

from .errors import (
    IndexOutOfRange,
    InvalidRequest,
    InvalidSpec,
    NoSplitterSpine,
    UnknownConnection,
    UnknownFiber,
)
from .fabric import FabricKind, FabricSpec, MiddleKind


class SpineKind(str, Enum):
    SWITCH = "switch"
    SPLITTER = "splitter"
    DIRECT_RING = "ring"


@dataclass(frozen=True, slots=True)
class SpineLeafSpec:
    """A Spine-Leaf network: `leaves` leaf switches of size
    leaf_size x leaf_size (leaf_size = host_ports + spine count), one
    spine slot per middle element of the unfolded Clos."""

    leaves: int
    host_ports: int
    w: int
    spines: tuple[SpineKind, ...]

    def __post_init__(self) -> None:
        if self.leaves < 2:
            raise InvalidSpec(f"need at least 2 leaves, got {self.leaves}")
        if self.host_ports < 1:
            raise InvalidSpec(f"need at least 1 host port, got {self.host_ports}")
        if self.w < 1:
            raise InvalidSpec(f"need at least 1 wavelength, got {self.w}")
        if not self.spines:
            raise InvalidSpec("need at least one spine slot")

    @property
    def leaf_size(self) -> int:
        return self.host_ports + len(self.spines)


def fold_clos(spec: FabricSpec) -> SpineLeafSpec:
    """Fold a Clos fabric spec into its Spine-Leaf form."""
    if spec.kind is not FabricKind.CLOS:
        raise InvalidSpec("only Clos fabrics fold into Spine-Leaf form")
    return SpineLeafSpec(
        leaves=spec.d,
        host_ports=spec.l,
        w=spec.w,
        spines=(SpineKind.SWITCH,) * spec.m,
    )


def unfold(spec: SpineLeafSpec, middle_kind: MiddleKind = MiddleKind.WSS) -> FabricSpec:
    """Recover the three-stage Clos spec behind a Spine-Leaf network.

    Substituted spine slots unfold by size only; the returned spec always
    has `middle_kind` switches in the middle stage.
    """
    return FabricSpec.clos(
        d=spec.leaves,
        l=spec.host_ports,
        m=len(spec.spines),
        w=spec.w,
        middle_kind=middle_kind,
    )


def substitute_spine(spec: SpineLeafSpec, index: int, kind: SpineKind) -> SpineLeafSpec:
    """Replace one spine slot; returns a new spec."""
    if not 0 <= index < len(spec.spines):
        raise IndexOutOfRange(f"spine index {index} outside 0..{len(spec.spines) - 1}")
    spines = list(spec.spines)
    spines[index] = kind
    return replace(spec, spines=tuple(spines))


def ring_adjacency(leaves: int) -> list[tuple[int, int]]:
    """Round-robin direct-connection pattern: leaf i feeds leaf (i+1) mod D."""
    return [(i, (i + 1) % leaves) for i in range(leaves)]


@dataclass(frozen=True, slots=True)
class Uplink:
    """Fiber from a leaf up to a spine slot."""

    leaf: int
    spine: int

    def __str__(self) -> str:
        return f"uplink:{self.leaf}.{self.spine}"


@dataclass(frozen=True, slots=True)
class Downlink:
    """Fiber from a spine slot down to a leaf."""

    spine: int
    leaf: int

    def __str__(self) -> str:
        return f"downlink:{self.spine}.{self.leaf}"


@dataclass(frozen=True, slots=True)
class MulticastRequest:
    """One source host port fanning out to host ports on other leaves."""

    src_leaf: int
    src_port: int
    dst: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if not self.dst:
            raise InvalidRequest("multicast needs at least one destination")
        leaves = [leaf for leaf, _ in self.dst]
        if len(set(leaves)) != len(leaves):
            raise InvalidRequest(f"duplicate destination leaves in {leaves}")
        if self.src_leaf in leaves:
            raise InvalidRequest("source leaf cannot be a destination")


@dataclass(frozen=True, slots=True)
class MulticastConnection:
    id: int
    request: MulticastRequest
    splitter: int
    wavelength: int
    resources: tuple[tuple[object, int], ...]


class SpineLeafFabric:
    """Occupancy state over the leaf/spine links of a Spine-Leaf spec.

    Switch and splitter slots get one uplink and one downlink per leaf;
    ring slots carry no occupancy (construction only).
    """

    def __init__(self, spec: SpineLeafSpec) -> None:
        self.spec = spec
        self._slots: dict[object, list[Optional[int]]] = {}
        for s, kind in enumerate(spec.spines):
            if kind is SpineKind.DIRECT_RING:
                continue
            for leaf in range(spec.leaves):
                self._slots[Uplink(leaf, s)] = [None] * spec.w
                self._slots[Downlink(s, leaf)] = [None] * spec.w
        self._connections: dict[int, MulticastConnection] = {}
        self._next_id = 0

    @property
    def connections(self) -> Mapping[int, MulticastConnection]:
        return MappingProxyType(self._connections)

    def splitter_indices(self) -> list[int]:
        return [
            s for s, k in enumerate(self.spec.spines) if k is SpineKind.SPLITTER
        ]

    def free_wavelengths(self, ref) -> set[int]:
        try:
            table = self._slots[ref]
        except KeyError:
            raise UnknownFiber(f"no link {ref} in this fabric") from None
        return {w for w, cid in enumerate(table) if cid is None}

    def occupied_slots(self) -> dict[tuple[object, int], int]:
        return {
            (ref, w): cid
            for ref, table in self._slots.items()
            for w, cid in enumerate(table)
            if cid is not None
        }

    def splitter_wavelengths(self, spine: int) -> set[int]:
        """Distinct wavelengths currently broadcast by one splitter."""
        taken = set()
        for leaf in range(self.spec.leaves):
            table = self._slots[Downlink(spine, leaf)]
            taken.update(w for w, cid in enumerate(table) if cid is not None)
        return taken

    def release(self, connection_id: int) -> MulticastConnection:
        try:
            connection = self._connections.pop(connection_id)
        except KeyError:
            raise UnknownConnection(f"no connection {connection_id}") from None
        for ref, w in connection.resources:
            self._slots[ref][w] = None
        return connection


def admit_multicast(
    fabric: SpineLeafFabric, request: MulticastRequest
) -> Optional[MulticastConnection]:
    """First-fit a multicast over (wavelength, splitter).

    Needs wavelength w free on the source uplink and on every destination
    downlink of some splitter s; the admitted broadcast then owns w on
    the uplink and on all D downlinks of s.  Returns None when blocked.
    """
    spec = fabric.spec
    splitters = fabric.splitter_indices()
    if not splitters:
        raise NoSplitterSpine("no splitter spine slot in this fabric")
    if not 0 <= request.src_leaf < spec.leaves:
        raise InvalidRequest(f"source leaf {request.src_leaf} out of range")
    if not 0 <= request.src_port < spec.host_ports:
        raise InvalidRequest(f"source port {request.src_port} out of range")
    for leaf, port in request.dst:
        if not 0 <= leaf < spec.leaves:
            raise InvalidRequest(f"destination leaf {leaf} out of range")
        if not 0 <= port < spec.host_ports:
            raise InvalidRequest(f"destination port {port} out of range")

    dst_leaves = [leaf for leaf, _ in request.dst]
    for w in range(spec.w):
        for s in splitters:
            if fabric._slots[Uplink(request.src_leaf, s)][w] is not None:
                continue
            if any(fabric._slots[Downlink(s, leaf)][w] is not None for leaf in dst_leaves):
                continue
            cid = fabric._next_id
            fabric._next_id += 1
            resources = [(Uplink(request.src_leaf, s), w)]
            resources += [(Downlink(s, leaf), w) for leaf in range(spec.leaves)]
            connection = MulticastConnection(
                id=cid,
                request=request,
                splitter=s,
                wavelength=w,
                resources=tuple(resources),
            )
            for ref, ww in connection.resources:
                fabric._slots[ref][ww] = cid
            fabric._connections[cid] = connection
            return connection
    return None


def build_spine_leaf(spec: SpineLeafSpec) -> SpineLeafFabric:
    return SpineLeafFabric(spec)
