"""Geometry of the periodic square lattice with spins on edges.

Vertices live at integer points (x, y) with 0 <= x < lx, 0 <= y < ly and
periodic wrapping in both directions (a torus).  The edge east of vertex
(x, y) is the horizontal edge H(x, y); the edge north of it is the vertical
edge V(x, y).  Every edge carries one spin, so there are n = 2*lx*ly spins,
and stars (vertices) and plaquettes (faces) each number lx*ly.

Spin indexing is fixed once and for all by :func:`edge_index` so that cached
states and multiplier vectors are portable between runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Sequence


class LatticeError(ValueError):
    """Invalid lattice size or out-of-range coordinate."""


class RegionError(ValueError):
    """Malformed region: duplicate edges, empty, or wrong lattice."""


class Orientation(str, Enum):
    H = "H"
    V = "V"


class Topology(str, Enum):
    """User-declared topology tag; never inferred by the library."""

    DISK = "disk"
    ANNULUS = "annulus"
    NONCONTRACTIBLE = "noncontractible"
    OTHER = "other"


@dataclass(frozen=True, order=True)
class EdgeCoord:
    x: int
    y: int
    orient: Orientation

    def __repr__(self) -> str:
        return f"{self.orient.value}({self.x},{self.y})"


def H(x: int, y: int) -> EdgeCoord:
    return EdgeCoord(x, y, Orientation.H)


def V(x: int, y: int) -> EdgeCoord:
    return EdgeCoord(x, y, Orientation.V)


@dataclass(frozen=True)
class LatticeSpec:
    lx: int
    ly: int

    def __post_init__(self) -> None:
        if self.lx < 2 or self.ly < 2:
            raise LatticeError(f"lattice must be at least 2x2, got {self.lx}x{self.ly}")

    @property
    def n_spins(self) -> int:
        return 2 * self.lx * self.ly

    @property
    def n_stars(self) -> int:
        return self.lx * self.ly

    @property
    def n_plaquettes(self) -> int:
        return self.lx * self.ly

    def vertices(self) -> Iterator[tuple[int, int]]:
        for y in range(self.ly):
            for x in range(self.lx):
                yield (x, y)

    faces = vertices

    def edges(self) -> Iterator[EdgeCoord]:
        for y in range(self.ly):
            for x in range(self.lx):
                yield H(x, y)
                yield V(x, y)


def edge_index(spec: LatticeSpec, e: EdgeCoord) -> int:
    """Bijection EdgeCoord -> [0, 2*lx*ly); H before V at each (x, y)."""
    if not (0 <= e.x < spec.lx and 0 <= e.y < spec.ly):
        raise LatticeError(f"edge {e} out of range for {spec.lx}x{spec.ly} lattice")
    return (e.y * spec.lx + e.x) * 2 + (0 if e.orient is Orientation.H else 1)


def edge_from_index(spec: LatticeSpec, idx: int) -> EdgeCoord:
    """Inverse of :func:`edge_index`."""
    if not (0 <= idx < spec.n_spins):
        raise LatticeError(f"edge index {idx} out of range")
    cell, bit = divmod(idx, 2)
    y, x = divmod(cell, spec.lx)
    return EdgeCoord(x, y, Orientation.H if bit == 0 else Orientation.V)


def star_support(spec: LatticeSpec, vertex: tuple[int, int]) -> tuple[EdgeCoord, ...]:
    """The 4 edges meeting at a vertex (the support of a star operator)."""
    x, y = vertex
    if not (0 <= x < spec.lx and 0 <= y < spec.ly):
        raise LatticeError(f"vertex {vertex} out of range")
    return (
        H(x, y),
        H((x - 1) % spec.lx, y),
        V(x, y),
        V(x, (y - 1) % spec.ly),
    )


def plaquette_support(spec: LatticeSpec, face: tuple[int, int]) -> tuple[EdgeCoord, ...]:
    """The 4 edges bounding a face (the support of a plaquette operator)."""
    x, y = face
    if not (0 <= x < spec.lx and 0 <= y < spec.ly):
        raise LatticeError(f"face {face} out of range")
    return (
        H(x, y),
        H(x, (y + 1) % spec.ly),
        V(x, y),
        V((x + 1) % spec.lx, y),
    )


@dataclass(frozen=True)
class Region:
    """An ordered, duplicate-free set of edges plus a user-declared topology tag."""

    edges: tuple[EdgeCoord, ...]
    topology: Topology = Topology.OTHER

    def __init__(self, edges: Iterable[EdgeCoord], topology: Topology | str = Topology.OTHER):
        edges = tuple(edges)
        if not edges:
            raise RegionError("region must contain at least one edge")
        if len(set(edges)) != len(edges):
            raise RegionError("region contains duplicate edges")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "topology", Topology(topology))

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[EdgeCoord]:
        return iter(self.edges)

    def spin_indices(self, spec: LatticeSpec) -> tuple[int, ...]:
        return tuple(edge_index(spec, e) for e in self.edges)


def validate_region(spec: LatticeSpec, region: Region) -> None:
    """Raise if any edge is out of range (duplicates are rejected at construction)."""
    for e in region.edges:
        edge_index(spec, e)


@dataclass(frozen=True)
class PartitionABC:
    """Three pairwise-disjoint regions partitioning an analyzed region."""

    a: Region
    b: Region
    c: Region

    def __post_init__(self) -> None:
        sets = [set(self.a.edges), set(self.b.edges), set(self.c.edges)]
        for i in range(3):
            for j in range(i + 1, 3):
                if sets[i] & sets[j]:
                    raise RegionError("partition parts overlap")

    def union_region(self, topology: Topology | str = Topology.OTHER) -> Region:
        return Region(self.a.edges + self.b.edges + self.c.edges, topology)

    def index_triple(
        self, spec: LatticeSpec
    ) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
        return (
            self.a.spin_indices(spec),
            self.b.spin_indices(spec),
            self.c.spin_indices(spec),
        )


@dataclass(frozen=True)
class LogicalSupports:
    """Supports of the four logical loop operators of the torus.

    ``x_loop_h``/``x_loop_v`` carry the X-type logicals; they are loops of the
    dual lattice (the horizontal one crosses the vertical edges of one row,
    the vertical one crosses the horizontal edges of one column).
    ``z_loop_h``/``z_loop_v`` carry the Z-type logicals on direct-lattice
    loops (horizontal edges of one row / vertical edges of one column).
    Pairing: x_loop_h shares exactly one edge with z_loop_v, and x_loop_v
    with z_loop_h; all other pairs are disjoint.
    """

    x_loop_h: Region
    z_loop_v: Region
    x_loop_v: Region
    z_loop_h: Region


def logical_supports(spec: LatticeSpec, row: int = 0, col: int = 0) -> LogicalSupports:
    x_h = Region((V(x, row) for x in range(spec.lx)), Topology.NONCONTRACTIBLE)
    z_v = Region((V(col, y) for y in range(spec.ly)), Topology.NONCONTRACTIBLE)
    x_v = Region((H(col, y) for y in range(spec.ly)), Topology.NONCONTRACTIBLE)
    z_h = Region((H(x, row) for x in range(spec.lx)), Topology.NONCONTRACTIBLE)
    return LogicalSupports(x_h, z_v, x_v, z_h)


def domino_loop(
    spec: LatticeSpec, anchor: tuple[int, int] = (0, 0), orient: str = "horizontal"
) -> Region:
    """The 6 boundary edges of a 1x2 block of plaquettes, in cyclic walk order.

    The edge shared by the two plaquettes is excluded; the result is a closed
    loop enclosing that edge (topology tag ``annulus``).  Raises
    :class:`RegionError` when the wrap makes the loop degenerate (the block
    must not wrap onto itself).
    """
    x, y = anchor
    if not (0 <= x < spec.lx and 0 <= y < spec.ly):
        raise LatticeError(f"anchor {anchor} out of range")
    lx, ly = spec.lx, spec.ly
    if orient == "horizontal":
        boundary = [
            H(x, y),
            H((x + 1) % lx, y),
            V((x + 2) % lx, y),
            H((x + 1) % lx, (y + 1) % ly),
            H(x, (y + 1) % ly),
            V(x, y),
        ]
        interior = V((x + 1) % lx, y)
    elif orient == "vertical":
        boundary = [
            V(x, y),
            V(x, (y + 1) % ly),
            H(x, (y + 2) % ly),
            V((x + 1) % lx, (y + 1) % ly),
            V((x + 1) % lx, y),
            H(x, y),
        ]
        interior = H(x, (y + 1) % ly)
    else:
        raise ValueError(f"orient must be 'horizontal' or 'vertical', got {orient!r}")
    if len(set(boundary)) != 6 or interior in boundary:
        raise RegionError(
            f"domino loop at {anchor} ({orient}) degenerates under wrap on "
            f"a {lx}x{ly} lattice"
        )
    return Region(boundary, Topology.ANNULUS)


def default_loop(spec: LatticeSpec) -> Region:
    """The default 6-spin hole-enclosing loop used by field sweeps.

    Horizontal domino at the origin when the lattice admits it, else the
    vertical one.
    """
    try:
        return domino_loop(spec, (0, 0), "horizontal")
    except RegionError:
        return domino_loop(spec, (0, 0), "vertical")


# --- region file format -----------------------------------------------------

def region_to_json(spec: LatticeSpec, region: Region) -> dict:
    return {
        "lx": spec.lx,
        "ly": spec.ly,
        "topology": region.topology.value,
        "edges": [[e.x, e.y, e.orient.value] for e in region.edges],
    }


def region_from_json(data: dict) -> tuple[LatticeSpec, Region]:
    try:
        spec = LatticeSpec(int(data["lx"]), int(data["ly"]))
        edges = [EdgeCoord(int(x), int(y), Orientation(o)) for x, y, o in data["edges"]]
        region = Region(edges, Topology(data.get("topology", "other")))
    except (KeyError, TypeError) as exc:
        raise RegionError(f"malformed region file: {exc}") from exc
    validate_region(spec, region)
    return spec, region


def save_region(path: str, spec: LatticeSpec, region: Region) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(region_to_json(spec, region), fh, indent=1)
        fh.write("\n")


def load_region(path: str) -> tuple[LatticeSpec, Region]:
    with open(path, encoding="utf-8") as fh:
        return region_from_json(json.load(fh))
