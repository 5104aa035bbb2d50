"""Switching-fabric construction and per-wavelength occupancy state.

Two architectures are modeled. A Spanke fabric gives every line fiber its
own 1 x ((D-1)*L) ingress element (and the mirror on egress) with a
dedicated internal fiber per ordered ingress/egress fiber pair. A Clos
fabric interposes M middle elements between D ingress and D egress
elements, one internal fiber per (ingress, middle) and (middle, egress)
pair.

Spanke internal fibers are counted by formula but never stored: each one
is dedicated to a single (line-in, line-out) pair, so its occupancy is
fully implied by the line fibers.  Clos internal links carry the same W
wavelengths as line fibers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import TYPE_CHECKING, Iterator, Mapping, Optional

from .errors import InvalidSpec, ResourceConflict, UnknownConnection, UnknownFiber

if TYPE_CHECKING:
    from .admission import Connection


class FabricKind(str, Enum):
    SPANKE = "spanke"
    CLOS = "clos"


class MiddleKind(str, Enum):
    """Middle-stage element flavor of a Clos fabric."""

    WSS = "wss"
    TWC_WSS = "twc-wss"
    AWG = "awg"
    TWC_AWG = "twc-awg"
    TWC_AWG_TWC = "twc-awg-twc"


class Stage(str, Enum):
    INGRESS = "ingress"
    MIDDLE = "middle"
    EGRESS = "egress"


@dataclass(frozen=True, slots=True)
class FabricSpec:
    """Declarative description of a fabric.

    d: directional degrees; l: fiber degrees per directional degree;
    w: wavelengths per fiber; m / middle_kind: middle stage (Clos only,
    m is 0 and middle_kind None for Spanke).
    """

    kind: FabricKind
    d: int
    l: int
    w: int
    m: int = 0
    middle_kind: Optional[MiddleKind] = None

    def __post_init__(self) -> None:
        if self.d < 2:
            raise InvalidSpec(f"need at least 2 directional degrees, got d={self.d}")
        if self.l < 1:
            raise InvalidSpec(f"need at least 1 fiber degree, got l={self.l}")
        if self.w < 1:
            raise InvalidSpec(f"need at least 1 wavelength, got w={self.w}")
        if self.kind is FabricKind.SPANKE:
            if self.m != 0 or self.middle_kind is not None:
                raise InvalidSpec("Spanke fabrics have no middle stage")
        else:
            if self.m < 1:
                raise InvalidSpec(f"Clos fabrics need m >= 1, got m={self.m}")
            if self.middle_kind is None:
                raise InvalidSpec("Clos fabrics need a middle_kind")

    @classmethod
    def spanke(cls, d: int, l: int, w: int) -> "FabricSpec":
        return cls(kind=FabricKind.SPANKE, d=d, l=l, w=w)

    @classmethod
    def clos(
        cls,
        d: int,
        l: int,
        m: int,
        w: int,
        middle_kind: MiddleKind = MiddleKind.WSS,
    ) -> "FabricSpec":
        return cls(kind=FabricKind.CLOS, d=d, l=l, w=w, m=m, middle_kind=middle_kind)


@dataclass(frozen=True, slots=True)
class ElementDescriptor:
    """A switching element: stage, ordinal within the stage, port counts."""

    stage: Stage
    index: int
    rows: int
    cols: int


# ---------------------------------------------------------------------------
# Fiber references.  Four address spaces, all zero-based; frozen dataclasses
# so they can key occupancy maps.
# ---------------------------------------------------------------------------


class FiberRef:
    """Marker base class for fiber addresses."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class LineIn(FiberRef):
    """Incoming line fiber `fiber` on directional degree `degree`."""

    degree: int
    fiber: int

    def __str__(self) -> str:
        return f"line-in:{self.degree}.{self.fiber}"


@dataclass(frozen=True, slots=True)
class LineOut(FiberRef):
    """Outgoing line fiber `fiber` on directional degree `degree`."""

    degree: int
    fiber: int

    def __str__(self) -> str:
        return f"line-out:{self.degree}.{self.fiber}"


@dataclass(frozen=True, slots=True)
class IngressToMiddle(FiberRef):
    """Internal Clos fiber from ingress element `ingress` to middle `middle`."""

    ingress: int
    middle: int

    def __str__(self) -> str:
        return f"ingress-middle:{self.ingress}.{self.middle}"


@dataclass(frozen=True, slots=True)
class MiddleToEgress(FiberRef):
    """Internal Clos fiber from middle element `middle` to egress `egress`."""

    middle: int
    egress: int

    def __str__(self) -> str:
        return f"middle-egress:{self.middle}.{self.egress}"


@dataclass(frozen=True, slots=True)
class ElementCounts:
    ingress: int
    middle: int
    egress: int
    total: int


def count_elements(spec: FabricSpec) -> ElementCounts:
    """Closed-form element counts per stage.

    Spanke needs 2*D*L elements (one 1 x (D-1)L per line fiber, mirrored);
    Clos needs 2*D + M.
    """
    if spec.kind is FabricKind.SPANKE:
        per_side = spec.d * spec.l
        return ElementCounts(per_side, 0, per_side, 2 * per_side)
    return ElementCounts(spec.d, spec.m, spec.d, 2 * spec.d + spec.m)


def count_fibers(spec: FabricSpec) -> int:
    """Closed-form internal fiber count.

    Spanke: (D^2 - D) * L^2, one dedicated fiber per ordered pair of line
    fibers on distinct degrees.  Clos: 2*D*M, one per (ingress, middle)
    plus one per (middle, egress).
    """
    if spec.kind is FabricKind.SPANKE:
        return (spec.d * spec.d - spec.d) * spec.l * spec.l
    return 2 * spec.d * spec.m


class Fabric:
    """A materialized fabric with exact per-wavelength occupancy state.

    Occupancy is kept as one slot table per stored fiber (line fibers for
    both kinds, plus the internal links for Clos).  Slot w of a table
    holds the occupying connection id, or None when free.  Mutation goes
    through apply()/release() only; both keep the table and the
    connection registry consistent with each other.

    Not thread-safe for mutation; read-only queries are safe on a fabric
    that no thread is mutating.
    """

    __slots__ = (
        "spec",
        "elements",
        "_slots",
        "_line_in",
        "_line_out",
        "_ing_mid",
        "_mid_egr",
        "_line_in_refs",
        "_line_out_refs",
        "_connections",
        "_next_id",
    )

    def __init__(self, spec: FabricSpec) -> None:
        self.spec = spec
        d, l, w, m = spec.d, spec.l, spec.w, spec.m
        self.elements: tuple[ElementDescriptor, ...] = tuple(_element_roster(spec))

        # One occupancy list per fiber, shared between the ref-keyed map
        # and the integer-indexed tables used on the admission hot path.
        self._slots: dict[FiberRef, list[Optional[int]]] = {}
        self._line_in: list[list[list[Optional[int]]]] = []
        self._line_out: list[list[list[Optional[int]]]] = []
        self._line_in_refs: list[list[LineIn]] = []
        self._line_out_refs: list[list[LineOut]] = []
        for dd in range(d):
            in_row, out_row, in_refs, out_refs = [], [], [], []
            for ll in range(l):
                ref_in, ref_out = LineIn(dd, ll), LineOut(dd, ll)
                slots_in: list[Optional[int]] = [None] * w
                slots_out: list[Optional[int]] = [None] * w
                self._slots[ref_in] = slots_in
                self._slots[ref_out] = slots_out
                in_row.append(slots_in)
                out_row.append(slots_out)
                in_refs.append(ref_in)
                out_refs.append(ref_out)
            self._line_in.append(in_row)
            self._line_out.append(out_row)
            self._line_in_refs.append(in_refs)
            self._line_out_refs.append(out_refs)

        # _ing_mid[a][m] and _mid_egr[m][b]; empty for Spanke.
        self._ing_mid: list[list[list[Optional[int]]]] = []
        self._mid_egr: list[list[list[Optional[int]]]] = []
        if spec.kind is FabricKind.CLOS:
            for a in range(d):
                row = []
                for mm in range(m):
                    slots: list[Optional[int]] = [None] * w
                    self._slots[IngressToMiddle(a, mm)] = slots
                    row.append(slots)
                self._ing_mid.append(row)
            for mm in range(m):
                row = []
                for b in range(d):
                    slots = [None] * w
                    self._slots[MiddleToEgress(mm, b)] = slots
                    row.append(slots)
                self._mid_egr.append(row)

        self._connections: dict[int, "Connection"] = {}
        self._next_id = 0

    # -- queries ------------------------------------------------------------

    @property
    def connections(self) -> Mapping[int, "Connection"]:
        return MappingProxyType(self._connections)

    def fiber_refs(self) -> Iterator[FiberRef]:
        """All stored fibers: line fibers plus Clos internal links."""
        return iter(self._slots)

    def internal_fiber_refs(self) -> list[FiberRef]:
        return [r for r in self._slots if not isinstance(r, (LineIn, LineOut))]

    def line_in_ref(self, degree: int, fiber: int) -> LineIn:
        return self._line_in_refs[degree][fiber]

    def line_out_ref(self, degree: int, fiber: int) -> LineOut:
        return self._line_out_refs[degree][fiber]

    def has_fiber(self, ref: FiberRef) -> bool:
        return ref in self._slots

    def slot_table(self, ref: FiberRef) -> list[Optional[int]]:
        """The live occupancy list for one fiber (do not mutate)."""
        try:
            return self._slots[ref]
        except KeyError:
            raise UnknownFiber(f"no fiber {ref} in this fabric") from None

    def free_wavelengths(self, ref: FiberRef) -> set[int]:
        """Wavelength indices with no occupying connection on `ref`."""
        table = self.slot_table(ref)
        return {w for w, cid in enumerate(table) if cid is None}

    def is_free(self, ref: FiberRef, wavelength: int) -> bool:
        return self.slot_table(ref)[wavelength] is None

    def occupancy(self) -> dict[tuple[FiberRef, int], Optional[int]]:
        """Full (fiber, wavelength) -> connection-id-or-None snapshot."""
        return {
            (ref, w): cid
            for ref, table in self._slots.items()
            for w, cid in enumerate(table)
        }

    def occupied_slots(self) -> dict[tuple[FiberRef, int], int]:
        """Only the occupied slots; cheap state fingerprint for tests."""
        return {
            (ref, w): cid
            for ref, table in self._slots.items()
            for w, cid in enumerate(table)
            if cid is not None
        }

    # -- mutation -----------------------------------------------------------

    def issue_id(self) -> int:
        """Next unused connection id."""
        cid = self._next_id
        while cid in self._connections:
            cid += 1
        self._next_id = cid + 1
        return cid

    def apply(self, connection: "Connection") -> None:
        """Mark every resource of `connection` occupied by its id.

        Raises ResourceConflict (before any mutation) if the id is taken
        or any listed slot is occupied; raises UnknownFiber for a resource
        on a fiber this fabric does not store.
        """
        if connection.id in self._connections:
            raise ResourceConflict(f"connection id {connection.id} already applied")
        # Validate everything first so a conflict leaves no partial marks.
        for ref, w in connection.resources:
            table = self.slot_table(ref)
            if not 0 <= w < self.spec.w:
                raise UnknownFiber(f"wavelength {w} out of range on {ref}")
            if table[w] is not None:
                raise ResourceConflict(
                    f"slot ({ref}, w={w}) already held by connection {table[w]}"
                )
        for ref, w in connection.resources:
            self._slots[ref][w] = connection.id
        self._connections[connection.id] = connection

    def release(self, connection_id: int) -> "Connection":
        """Free exactly the slots of a stored connection and forget it."""
        try:
            connection = self._connections.pop(connection_id)
        except KeyError:
            raise UnknownConnection(f"no connection {connection_id}") from None
        for ref, w in connection.resources:
            self._slots[ref][w] = None
        return connection

    def validate(self) -> None:
        """Check slot-table / connection-registry bidirectional consistency."""
        seen: dict[tuple[FiberRef, int], int] = {}
        for ref, table in self._slots.items():
            for w, cid in enumerate(table):
                if cid is None:
                    continue
                if cid not in self._connections:
                    raise AssertionError(f"slot ({ref},{w}) held by unknown id {cid}")
                seen[(ref, w)] = cid
        for cid, conn in self._connections.items():
            for ref, w in conn.resources:
                if seen.pop((ref, w), None) != cid:
                    raise AssertionError(
                        f"connection {cid} resource ({ref},{w}) not marked"
                    )
        if seen:
            raise AssertionError(f"orphan occupied slots: {sorted(seen)[:5]}")


def _element_roster(spec: FabricSpec) -> Iterator[ElementDescriptor]:
    d, l, m = spec.d, spec.l, spec.m
    if spec.kind is FabricKind.SPANKE:
        fanout = (d - 1) * l
        for i in range(d * l):
            yield ElementDescriptor(Stage.INGRESS, i, 1, fanout)
        for i in range(d * l):
            yield ElementDescriptor(Stage.EGRESS, i, fanout, 1)
        return
    for a in range(d):
        yield ElementDescriptor(Stage.INGRESS, a, l, m)
    for mm in range(m):
        yield ElementDescriptor(Stage.MIDDLE, mm, d, d)
    for b in range(d):
        yield ElementDescriptor(Stage.EGRESS, b, m, l)


def build_fabric(spec: FabricSpec) -> Fabric:
    """Materialize an empty-occupancy fabric for `spec`."""
    return Fabric(spec)
