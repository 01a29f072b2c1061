import pytest

from j1j2vqe.lattice import Boundary, build_lattice


def brute_force_edges(rows, cols, periodic, diagonal):
    """Unordered adjacency oracle from coordinate offsets."""
    offsets = [(1, 1), (1, -1), (-1, 1), (-1, -1)] if diagonal else [
        (0, 1), (0, -1), (1, 0), (-1, 0)
    ]
    pairs = set()
    for r in range(rows):
        for c in range(cols):
            for dr, dc in offsets:
                rr, cc = r + dr, c + dc
                if periodic:
                    rr, cc = rr % rows, cc % cols
                elif not (0 <= rr < rows and 0 <= cc < cols):
                    continue
                i, j = r * cols + c, rr * cols + cc
                if i != j:
                    pairs.add((min(i, j), max(i, j)))
    return pairs


def test_3x4_open_counts():
    lat = build_lattice(3, 4, Boundary.OPEN)
    assert len(lat.nn_edges) == 17
    assert len(lat.nnn_edges) == 12


def test_1x2_open_is_single_bond():
    lat = build_lattice(1, 2, Boundary.OPEN)
    assert lat.nn_edges == ((0, 1),)
    assert lat.nnn_edges == ()


def test_4x4_periodic_counts():
    lat = build_lattice(4, 4, Boundary.PERIODIC)
    assert len(lat.nn_edges) == 32
    assert len(lat.nnn_edges) == 32


def test_site_indexing_row_major():
    lat = build_lattice(3, 4, Boundary.OPEN)
    assert lat.site(0, 0) == 0
    assert lat.site(1, 0) == 4
    assert lat.site(2, 3) == 11


def test_edge_ordering_3x3_open():
    lat = build_lattice(3, 3, Boundary.OPEN)
    # horizontal row-major first, then vertical row-major
    assert lat.nn_edges[:6] == ((0, 1), (1, 2), (3, 4), (4, 5), (6, 7), (7, 8))
    assert lat.nn_edges[6:] == ((0, 3), (1, 4), (2, 5), (3, 6), (4, 7), (5, 8))
    # plaquette scan, down-right diagonal before down-left
    assert lat.nnn_edges[:4] == ((0, 4), (1, 3), (1, 5), (2, 4))


def test_periodic_wrap_edges_appended_after_interior():
    lat = build_lattice(3, 3, Boundary.PERIODIC)
    open_lat = build_lattice(3, 3, Boundary.OPEN)
    assert lat.nn_edges[: len(open_lat.nn_edges)] == open_lat.nn_edges
    assert lat.nnn_edges[: len(open_lat.nnn_edges)] == open_lat.nnn_edges


@pytest.mark.parametrize("rows", range(1, 9))
@pytest.mark.parametrize("cols", range(1, 9))
def test_open_matches_brute_force(rows, cols):
    lat = build_lattice(rows, cols, Boundary.OPEN)
    assert set(lat.nn_edges) == brute_force_edges(rows, cols, False, False)
    assert set(lat.nnn_edges) == brute_force_edges(rows, cols, False, True)
    assert len(set(lat.nn_edges)) == len(lat.nn_edges)
    assert len(set(lat.nnn_edges)) == len(lat.nnn_edges)
    assert len(lat.nn_edges) == rows * (cols - 1) + (rows - 1) * cols
    assert len(lat.nnn_edges) == 2 * (rows - 1) * (cols - 1)


@pytest.mark.parametrize("rows", range(2, 9))
@pytest.mark.parametrize("cols", range(2, 9))
def test_periodic_matches_brute_force(rows, cols):
    lat = build_lattice(rows, cols, Boundary.PERIODIC)
    assert set(lat.nn_edges) == brute_force_edges(rows, cols, True, False)
    assert set(lat.nnn_edges) == brute_force_edges(rows, cols, True, True)
    assert len(set(lat.nn_edges)) == len(lat.nn_edges)
    assert len(set(lat.nnn_edges)) == len(lat.nnn_edges)
    if rows >= 3 and cols >= 3:
        assert len(lat.nn_edges) == 2 * rows * cols
        assert len(lat.nnn_edges) == 2 * rows * cols


@pytest.mark.parametrize("boundary", [Boundary.OPEN, Boundary.PERIODIC])
def test_edge_lists_disjoint_and_in_range(boundary):
    for rows in range(2, 7):
        for cols in range(2, 7):
            lat = build_lattice(rows, cols, boundary)
            n = lat.n_sites
            for i, j in lat.nn_edges + lat.nnn_edges:
                assert 0 <= i < j < n
            assert not set(lat.nn_edges) & set(lat.nnn_edges)


def test_determinism():
    a = build_lattice(4, 5, Boundary.PERIODIC)
    b = build_lattice(4, 5, Boundary.PERIODIC)
    assert a.nn_edges == b.nn_edges
    assert a.nnn_edges == b.nnn_edges


def test_every_nnn_edge_is_a_plaquette_diagonal():
    for rows in range(2, 6):
        for cols in range(2, 6):
            for boundary in (Boundary.OPEN, Boundary.PERIODIC):
                lat = build_lattice(rows, cols, boundary)
                periodic = boundary is Boundary.PERIODIC
                for i, j in lat.nnn_edges:
                    r1, c1 = divmod(i, cols)
                    r2, c2 = divmod(j, cols)
                    dr = (r2 - r1) % rows if periodic else r2 - r1
                    dc = (c2 - c1) % cols if periodic else c2 - c1
                    if periodic:
                        assert dr in (1, rows - 1) and dc in (1, cols - 1)
                    else:
                        assert abs(dr) == 1 and abs(dc) == 1


@pytest.mark.parametrize(
    "rows,cols,boundary",
    [
        (0, 3, Boundary.OPEN),
        (3, 0, Boundary.OPEN),
        (1, 5, Boundary.PERIODIC),
        (5, 1, Boundary.PERIODIC),
    ],
)
def test_invalid_dimensions_rejected(rows, cols, boundary):
    with pytest.raises(ValueError):
        build_lattice(rows, cols, boundary)


def test_length_two_torus_deduplicates_wrap_edges():
    lat = build_lattice(2, 2, Boundary.PERIODIC)
    assert lat.nn_edges == ((0, 1), (2, 3), (0, 2), (1, 3))
    assert lat.nnn_edges == ((0, 3), (1, 2))
