"""Closed-form blocking analytics and complexity comparisons.

The port-limited blocking floor of a fabric treats each end of a
connection as an independent w-server loss system: input-side blocking
is Erlang-B at the offered per-fiber load, output-side blocking is
Erlang-B at the load thinned by the input stage, and the combined floor
is the complement of both ends being free.  Loads are offered load per
line fiber, in Erlang.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInput
from .fabric import FabricSpec, count_elements, count_fibers


def erlang_b(rho: float, servers: int) -> float:
    """Erlang-B blocking probability for offered load `rho` on `servers`
    circuits.

    Computed with the stable recurrence B_0 = 1,
    B_k = rho * B_{k-1} / (k + rho * B_{k-1}), which avoids the factorial
    overflow of the direct sum.
    """
    if rho < 0:
        raise InvalidInput(f"offered load must be >= 0, got {rho}")
    if servers < 0:
        raise InvalidInput(f"server count must be >= 0, got {servers}")
    b = 1.0
    for k in range(1, servers + 1):
        b = rho * b / (k + rho * b)
    return b


@dataclass(frozen=True, slots=True)
class BlockingLimit:
    """Port-limited blocking floor with its two stage components."""

    rho: float
    w: int
    input_blocking: float
    output_blocking: float
    value: float


def theoretical_limit(rho: float, w: int) -> BlockingLimit:
    """Best achievable blocking for a fabric whose only losses are full
    end ports: B = 1 - (1 - B_i)(1 - B_o) with B_i = E_B(rho, w) and
    B_o = E_B(rho * (1 - B_i), w)."""
    if rho < 0:
        raise InvalidInput(f"offered load must be >= 0, got {rho}")
    if w < 1:
        raise InvalidInput(f"wavelength count must be >= 1, got {w}")
    b_i = erlang_b(rho, w)
    b_o = erlang_b(rho * (1.0 - b_i), w)
    return BlockingLimit(rho, w, b_i, b_o, 1.0 - (1.0 - b_i) * (1.0 - b_o))


@dataclass(frozen=True, slots=True)
class SpatialNonblockingThreshold:
    """Middle-stage count making a Clos fabric spatially strictly
    non-blocking: `bound` is the classical 2L-1 figure, `operating` the
    2L value used throughout for comparisons."""

    bound: int
    operating: int


def spatial_nonblocking_threshold(l: int) -> SpatialNonblockingThreshold:
    if l < 1:
        raise InvalidInput(f"fiber degree count must be >= 1, got {l}")
    return SpatialNonblockingThreshold(bound=2 * l - 1, operating=2 * l)


def rearrangeable_threshold(l: int) -> int:
    """Middle-stage count for rearrangeable non-blocking: M = L."""
    if l < 1:
        raise InvalidInput(f"fiber degree count must be >= 1, got {l}")
    return l


def wavelength_doubling_requirement(w_port: int) -> int:
    """Internal wavelength count needed to keep a continuity-constrained
    Clos fabric strictly non-blocking: twice the per-port count.

    Informational only; built fabrics carry the same W internally as on
    their line fibers.
    """
    if w_port < 1:
        raise InvalidInput(f"port wavelength count must be >= 1, got {w_port}")
    return 2 * w_port


@dataclass(frozen=True, slots=True)
class ComplexityReport:
    """Spanke vs Clos element/fiber counts and relative savings."""

    d: int
    l: int
    m: int
    spanke_elements: int
    clos_elements: int
    spanke_fibers: int
    clos_fibers: int
    element_savings: float
    fiber_savings: float


def compare_complexity(d: int, l: int, m: int) -> ComplexityReport:
    """Closed-form counts for s(D,L) vs v(M,L,D), with savings ratios
    1 - clos/spanke (negative when the Clos build is larger)."""
    spanke = FabricSpec.spanke(d, l, w=1)
    clos = FabricSpec.clos(d, l, m, w=1)
    spanke_elements = count_elements(spanke).total
    clos_elements = count_elements(clos).total
    spanke_fibers = count_fibers(spanke)
    clos_fibers = count_fibers(clos)
    return ComplexityReport(
        d=d,
        l=l,
        m=m,
        spanke_elements=spanke_elements,
        clos_elements=clos_elements,
        spanke_fibers=spanke_fibers,
        clos_fibers=clos_fibers,
        element_savings=1.0 - clos_elements / spanke_elements,
        fiber_savings=1.0 - clos_fibers / spanke_fibers,
    )
