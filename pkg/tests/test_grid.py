import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planetbench.grid import (
    SQRT2,
    OccupancyGrid,
    is_feasible,
    is_free,
    line_of_sight,
    neighbors,
    path_length,
    supercover,
)

from oracles import brute_los, touched_cells


def grid(rows):
    return OccupancyGrid.from_rows(rows)


@st.composite
def grids(draw, max_side=8):
    h = draw(st.integers(1, max_side))
    w = draw(st.integers(1, max_side))
    bits = draw(st.lists(st.integers(0, 1), min_size=h * w, max_size=h * w))
    return OccupancyGrid(np.array(bits, dtype=np.uint8).reshape(h, w))


@st.composite
def grid_and_cells(draw, max_side=8):
    g = draw(grids(max_side))
    cell = st.tuples(st.integers(0, g.height - 1), st.integers(0, g.width - 1))
    return g, draw(cell), draw(cell)


class TestOccupancyGrid:
    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            OccupancyGrid(np.array([[0, 2]]))

    def test_rejects_bad_resolution(self):
        with pytest.raises(ValueError):
            OccupancyGrid(np.zeros((2, 2)), resolution_m=0.0)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            OccupancyGrid(np.zeros((0, 3)))

    def test_is_immutable(self):
        g = grid([[0, 1]])
        with pytest.raises(ValueError):
            g.cells[0, 0] = 1

    def test_input_array_is_copied(self):
        a = np.zeros((2, 2), dtype=np.uint8)
        g = OccupancyGrid(a)
        a[0, 0] = 1
        assert is_free(g, (0, 0))

    def test_shape(self):
        g = grid([[0, 0, 0], [1, 1, 1]])
        assert (g.height, g.width) == (2, 3)


class TestIsFree:
    def test_single_free(self):
        assert is_free(grid([[0]]), (0, 0))

    def test_single_occupied(self):
        assert not is_free(grid([[1]]), (0, 0))

    def test_out_of_bounds(self):
        g = grid([[0, 0], [0, 0]])
        assert not is_free(g, (5, 5))
        assert not is_free(g, (-1, 0))


class TestNeighbors:
    def test_open_center(self):
        nb = neighbors(grid([[0] * 3] * 3), (1, 1))
        assert len(nb) == 8
        costs = sorted(c for _, c in nb)
        assert costs == [1.0] * 4 + [SQRT2] * 4

    def test_corner(self):
        nb = neighbors(grid([[0] * 3] * 3), (0, 0))
        assert sorted(c for c, _ in nb) == [(0, 1), (1, 0), (1, 1)]

    def test_corner_rule_blocks_diagonal(self):
        g = grid([[0, 1, 0], [1, 0, 0], [0, 0, 0]])
        assert neighbors(g, (0, 0)) == []

    def test_single_flank_blocks_diagonal(self):
        g = grid([[0, 1], [0, 0]])
        assert sorted(c for c, _ in neighbors(g, (0, 0))) == [(1, 0)]

    def test_occupied_has_no_neighbors(self):
        assert neighbors(grid([[1, 0]]), (0, 0)) == []

    @given(grid_and_cells())
    def test_symmetric_and_free(self, gc):
        g, a, _ = gc
        for b, cost in neighbors(g, a):
            assert is_free(g, b)
            assert any(n == a and c == cost for n, c in neighbors(g, b))


class TestSupercover:
    def test_horizontal(self):
        assert list(supercover((0, 0), (0, 3))) == [(0, 0), (0, 1), (0, 2), (0, 3)]

    def test_diagonal_reports_corner_cells(self):
        assert set(supercover((0, 0), (1, 1))) == {(0, 0), (0, 1), (1, 0), (1, 1)}

    @given(
        st.tuples(st.integers(-6, 6), st.integers(-6, 6)),
        st.tuples(st.integers(-6, 6), st.integers(-6, 6)),
    )
    @settings(max_examples=300)
    def test_matches_exact_geometry(self, a, b):
        assert set(supercover(a, b)) == touched_cells(a, b)


class TestLineOfSight:
    def test_degenerate(self):
        assert line_of_sight(grid([[0]]), (0, 0), (0, 0))

    def test_degenerate_occupied(self):
        assert not line_of_sight(grid([[1]]), (0, 0), (0, 0))

    def test_wall(self):
        assert not line_of_sight(grid([[0, 1, 0]]), (0, 0), (0, 2))

    def test_center_blocks_diagonal(self):
        g = grid([[0, 0, 0], [0, 1, 0], [0, 0, 0]])
        assert not line_of_sight(g, (0, 0), (2, 2))

    def test_corner_graze_blocks(self):
        # segment (0,0)->(2,1) touches no corner; (0,0)->(2,2) does
        g = grid([[0, 0, 0], [0, 0, 1], [0, 0, 0]])
        assert line_of_sight(g, (0, 0), (2, 1))
        g2 = grid([[0, 1, 0], [0, 0, 0], [0, 0, 0]])
        assert not line_of_sight(g2, (0, 0), (1, 1))

    def test_open_long_segment(self):
        g = OccupancyGrid(np.zeros((10, 10), dtype=np.uint8))
        assert line_of_sight(g, (0, 0), (9, 6))

    @given(grid_and_cells())
    @settings(max_examples=300)
    def test_symmetric(self, gc):
        g, a, b = gc
        assert line_of_sight(g, a, b) == line_of_sight(g, b, a)

    @given(grid_and_cells())
    @settings(max_examples=300)
    def test_matches_brute_force(self, gc):
        g, a, b = gc
        assert line_of_sight(g, a, b) == brute_los(g.cells, a, b)

    @given(grid_and_cells())
    def test_grid_moves_are_visible(self, gc):
        g, a, _ = gc
        for b, _ in neighbors(g, a):
            assert line_of_sight(g, a, b)


class TestPathLength:
    def test_single_point(self):
        assert path_length([(0, 0)]) == 0

    def test_straight(self):
        assert path_length([(0, 0), (0, 3)]) == 3

    def test_diagonal_then_straight(self):
        assert path_length([(0, 0), (1, 1), (1, 2)]) == pytest.approx(math.sqrt(2) + 1, abs=1e-12)

    def test_empty_raises(self):
        with pytest.raises(ValueError):
            path_length([])

    @given(st.lists(st.tuples(st.integers(-20, 20), st.integers(-20, 20)), min_size=1, max_size=12))
    def test_reversal(self, path):
        assert path_length(path) == pytest.approx(path_length(path[::-1]), abs=1e-9)

    @given(
        st.lists(st.tuples(st.integers(-20, 20), st.integers(-20, 20)), min_size=1, max_size=8),
        st.lists(st.tuples(st.integers(-20, 20), st.integers(-20, 20)), min_size=0, max_size=8),
    )
    def test_additive(self, p, q):
        joined = p + q
        assert path_length(joined) == pytest.approx(path_length(p) + path_length([p[-1]] + q), abs=1e-9)


class TestIsFeasible:
    def test_identity(self):
        assert is_feasible(grid([[0]]), [(0, 0)], (0, 0), (0, 0))

    def test_wrong_endpoint(self):
        g = grid([[0, 0, 0]])
        assert not is_feasible(g, [(0, 0), (0, 1)], (0, 0), (0, 2))

    def test_wrong_start(self):
        g = grid([[0, 0, 0]])
        assert not is_feasible(g, [(0, 1), (0, 2)], (0, 0), (0, 2))

    def test_wall_between_waypoints(self):
        assert not is_feasible(grid([[0, 1, 0]]), [(0, 0), (0, 2)], (0, 0), (0, 2))

    def test_empty_path(self):
        assert not is_feasible(grid([[0]]), [], (0, 0), (0, 0))

    @given(grid_and_cells())
    def test_lower_bound(self, gc):
        g, a, b = gc
        path = [a, b]
        if is_feasible(g, path, a, b):
            assert path_length(path) >= math.dist(a, b) - 1e-12
