"""Rectangular lattice geometry for the J1-J2 model.

Sites are indexed row-major from zero: the site in row ``r``, column ``c``
has index ``r * cols + c``. Nearest-neighbor (NN) edges run along the grid
axes and carry the J1 coupling; next-nearest-neighbor (NNN) edges run along
plaquette diagonals and carry J2. Edge lists are deterministic so that
circuits built on top of them have a fixed gate order.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

Edge = tuple[int, int]


class Boundary(Enum):
    OPEN = "open"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class Lattice:
    """Spin grid with precomputed NN and NNN edge lists.

    Edges are normalized to (i, j) with i < j. NN edges are ordered
    horizontal row-major, then vertical row-major; on periodic lattices the
    wrap edges follow the interior edges in the same scan order. NNN edges
    are ordered row-major by plaquette, down-right diagonal before down-left
    within each plaquette, wrap plaquettes after interior ones.
    """

    rows: int
    cols: int
    boundary: Boundary
    nn_edges: tuple[Edge, ...]
    nnn_edges: tuple[Edge, ...]

    @property
    def n_sites(self) -> int:
        return self.rows * self.cols

    def site(self, r: int, c: int) -> int:
        """Index of the site in row r, column c (wrapping if periodic)."""
        if self.boundary is Boundary.PERIODIC:
            r, c = r % self.rows, c % self.cols
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise ValueError(f"cell ({r}, {c}) outside {self.rows}x{self.cols} grid")
        return r * self.cols + c


def _append_unique(edges: list[Edge], seen: set[Edge], i: int, j: int) -> None:
    # wrap on a side of length 2 produces each edge twice; emit it once
    e = (i, j) if i < j else (j, i)
    if e not in seen:
        seen.add(e)
        edges.append(e)


def build_lattice(rows: int, cols: int, boundary: Boundary = Boundary.OPEN) -> Lattice:
    """Construct the lattice geometry for a rows x cols spin grid.

    Args:
        rows: number of rows, at least 1.
        cols: number of columns, at least 1.
        boundary: open edges or periodic wrap-around. Periodic lattices
            need both sides of length at least 2.

    Returns:
        A :class:`Lattice` with deterministic, duplicate-free edge lists.
    """
    if rows < 1 or cols < 1:
        raise ValueError(f"lattice dimensions must be positive, got {rows}x{cols}")
    if boundary is Boundary.PERIODIC and (rows < 2 or cols < 2):
        raise ValueError(
            f"periodic boundaries need both sides >= 2, got {rows}x{cols}"
        )
    periodic = boundary is Boundary.PERIODIC

    def site(r: int, c: int) -> int:
        return (r % rows) * cols + (c % cols)

    nn: list[Edge] = []
    nn_seen: set[Edge] = set()
    # interior bonds: horizontal row-major, then vertical row-major
    for r in range(rows):
        for c in range(cols - 1):
            _append_unique(nn, nn_seen, site(r, c), site(r, c + 1))
    for r in range(rows - 1):
        for c in range(cols):
            _append_unique(nn, nn_seen, site(r, c), site(r + 1, c))
    if periodic:
        for r in range(rows):
            _append_unique(nn, nn_seen, site(r, cols - 1), site(r, 0))
        for c in range(cols):
            _append_unique(nn, nn_seen, site(rows - 1, c), site(0, c))

    nnn: list[Edge] = []
    nnn_seen: set[Edge] = set()
    # interior plaquettes (top-left corner at (r, c)), then wrap plaquettes
    for r in range(rows - 1):
        for c in range(cols - 1):
            _append_unique(nnn, nnn_seen, site(r, c), site(r + 1, c + 1))
            _append_unique(nnn, nnn_seen, site(r, c + 1), site(r + 1, c))
    if periodic:
        for r in range(rows):
            for c in range(cols):
                if r < rows - 1 and c < cols - 1:
                    continue
                _append_unique(nnn, nnn_seen, site(r, c), site(r + 1, c + 1))
                _append_unique(nnn, nnn_seen, site(r, c + 1), site(r + 1, c))

    return Lattice(
        rows=rows,
        cols=cols,
        boundary=boundary,
        nn_edges=tuple(nn),
        nnn_edges=tuple(nnn),
    )
