"""Connection admission under per-architecture wavelength constraints.

A request joins one incoming line fiber to one outgoing line fiber on a
different directional degree.  What counts as an admissible assignment
depends on the middle stage:

* Spanke: any wavelength free on both line fibers (one dedicated internal
  fiber per pair, so the line fibers are the whole constraint).
* Clos WSS: one wavelength end to end (continuity), through some middle
  element with that wavelength free on both internal links.
* Clos TWC-WSS: converters at the middle-stage inputs relax continuity;
  ingress and egress wavelengths are chosen independently.
* Clos AWG: continuity plus the passive cyclic-router constraint; the
  wavelength must route the ingress element onto the egress element.
* Clos TWC-AWG: the output-side wavelength is pinned to the class that
  routes ingress to egress; the input-side wavelength is free.
* Clos TWC-AWG-TWC: converters on both AWG sides; equivalent to TWC-WSS
  (the internal AWG hop is contention-free inside the module).

Converters sit only at middle-stage boundaries, so line-fiber wavelengths
always equal the adjacent internal-link wavelengths.  Admission is
greedy: nothing is ever rearranged to make room.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

from .errors import InvalidRequest
from .fabric import (
    Fabric,
    FabricKind,
    FiberRef,
    IngressToMiddle,
    LineIn,
    LineOut,
    MiddleKind,
    MiddleToEgress,
)


class Policy(str, Enum):
    """Assignment-selection policy among admissible candidates."""

    FIRST_FIT = "first-fit"
    RANDOM = "random"


@dataclass(frozen=True, slots=True)
class ConnectionRequest:
    """A point-to-point request between two line fibers on distinct degrees."""

    src: LineIn
    dst: LineOut

    def __post_init__(self) -> None:
        if self.src.degree == self.dst.degree:
            raise InvalidRequest(
                "endpoints share directional degree "
                f"{self.src.degree}; same-degree fibers are not interconnected"
            )


@dataclass(frozen=True, slots=True)
class Assignment:
    """Concrete resource choice: ingress wavelength, middle element, egress
    wavelength.  `middle` is None for Spanke; continuity-bound kinds always
    have w_in == w_out."""

    w_in: int
    middle: Optional[int]
    w_out: int


@dataclass(frozen=True, slots=True)
class Connection:
    """An admitted request plus the exact slots it occupies."""

    id: int
    request: Optional[ConnectionRequest]
    assignment: Optional[Assignment]
    resources: tuple[tuple[FiberRef, int], ...]


def awg_route(p_in: int, wavelength: int, ports: int) -> int:
    """Cyclic-router output port: (p_in + wavelength) mod ports."""
    return (p_in + wavelength) % ports


def _validate_request(fabric: Fabric, request: ConnectionRequest) -> None:
    spec = fabric.spec
    src, dst = request.src, request.dst
    if not (0 <= src.degree < spec.d and 0 <= dst.degree < spec.d):
        raise InvalidRequest(f"degree out of range for d={spec.d}: {src} -> {dst}")
    if not (0 <= src.fiber < spec.l and 0 <= dst.fiber < spec.l):
        raise InvalidRequest(f"fiber index out of range for l={spec.l}: {src} -> {dst}")
    if src.degree == dst.degree:
        raise InvalidRequest("endpoints share a directional degree")


def _iter_candidates(
    fabric: Fabric, request: ConnectionRequest
) -> Iterator[tuple[int, Optional[int], int]]:
    """Yield admissible (w_in, middle, w_out) in ascending order.

    Freeness is read straight off the live slot tables, so the iterator
    must be consumed before the fabric is mutated.
    """
    spec = fabric.spec
    d_s, l_s = request.src.degree, request.src.fiber
    d_t, l_t = request.dst.degree, request.dst.fiber
    src = fabric._line_in[d_s][l_s]
    dst = fabric._line_out[d_t][l_t]
    w_count = spec.w

    if spec.kind is FabricKind.SPANKE:
        for w in range(w_count):
            if src[w] is None and dst[w] is None:
                yield (w, None, w)
        return

    m_count = spec.m
    itm = fabric._ing_mid[d_s]
    mte = [fabric._mid_egr[mm][d_t] for mm in range(m_count)]
    kind = spec.middle_kind

    if kind is MiddleKind.WSS:
        for w in range(w_count):
            if src[w] is None and dst[w] is None:
                for mm in range(m_count):
                    if itm[mm][w] is None and mte[mm][w] is None:
                        yield (w, mm, w)
    elif kind is MiddleKind.AWG:
        # Continuity plus routing: only wavelengths steering d_s onto d_t.
        for w in range(w_count):
            if (d_s + w) % spec.d != d_t:
                continue
            if src[w] is None and dst[w] is None:
                for mm in range(m_count):
                    if itm[mm][w] is None and mte[mm][w] is None:
                        yield (w, mm, w)
    elif kind is MiddleKind.TWC_AWG:
        # Converter before the AWG frees w_in; the AWG pins the output
        # side to the congruence class routing d_s -> d_t.
        routed = [w for w in range(w_count) if (d_s + w) % spec.d == d_t]
        for w_in in range(w_count):
            if src[w_in] is None:
                for mm in range(m_count):
                    if itm[mm][w_in] is None:
                        out_row = mte[mm]
                        for w_out in routed:
                            if out_row[w_out] is None and dst[w_out] is None:
                                yield (w_in, mm, w_out)
    else:
        # TWC_WSS and TWC_AWG_TWC: full conversion, independent ends.
        for w_in in range(w_count):
            if src[w_in] is None:
                for mm in range(m_count):
                    if itm[mm][w_in] is None:
                        out_row = mte[mm]
                        for w_out in range(w_count):
                            if out_row[w_out] is None and dst[w_out] is None:
                                yield (w_in, mm, w_out)


def admissible_assignments(
    fabric: Fabric, request: ConnectionRequest
) -> list[Assignment]:
    """Every assignment satisfying the architecture's constraints, in
    ascending (w_in, middle, w_out) order."""
    _validate_request(fabric, request)
    return [Assignment(*c) for c in _iter_candidates(fabric, request)]


def _build_connection(
    fabric: Fabric, request: ConnectionRequest, cand: tuple[int, Optional[int], int]
) -> Connection:
    w_in, middle, w_out = cand
    src_ref = fabric.line_in_ref(request.src.degree, request.src.fiber)
    dst_ref = fabric.line_out_ref(request.dst.degree, request.dst.fiber)
    resources: tuple[tuple[FiberRef, int], ...]
    if middle is None:
        resources = ((src_ref, w_in), (dst_ref, w_out))
    else:
        resources = (
            (src_ref, w_in),
            (IngressToMiddle(request.src.degree, middle), w_in),
            (MiddleToEgress(middle, request.dst.degree), w_out),
            (dst_ref, w_out),
        )
    return Connection(
        id=fabric.issue_id(),
        request=request,
        assignment=Assignment(w_in, middle, w_out),
        resources=resources,
    )


def admit(
    fabric: Fabric,
    request: ConnectionRequest,
    policy: Policy = Policy.FIRST_FIT,
    rng: Optional[random.Random] = None,
) -> Optional[Connection]:
    """Admit `request` if possible; returns the applied Connection, or
    None (blocked) with the fabric untouched.

    FIRST_FIT takes the first candidate in (w_in, middle, w_out) order.
    RANDOM draws uniformly from the full candidate list using `rng`.
    """
    _validate_request(fabric, request)
    if policy is Policy.FIRST_FIT:
        cand = next(_iter_candidates(fabric, request), None)
    else:
        if rng is None:
            raise InvalidRequest("random policy needs a seeded rng")
        cands = list(_iter_candidates(fabric, request))
        cand = cands[rng.randrange(len(cands))] if cands else None
    if cand is None:
        return None
    connection = _build_connection(fabric, request, cand)
    fabric.apply(connection)
    return connection
