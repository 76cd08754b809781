import itertools

import numpy as np
import pytest

from roadgen.tiles import (
    DEGREE, DIRECTIONS, IS_CROSSING, IS_TURN, ROTATE_CW, Direction, TileClass,
    classify, compatible, decode, degree, encode, rotate_ccw, rotate_cw, rotate_grid_cw,
)

CODES = range(16)


@pytest.mark.parametrize("bits,code", [((1, 0, 1, 0), 10), ((0, 0, 0, 0), 0), ((1, 1, 1, 1), 15)])
def test_encode(bits, code):
    assert encode(*bits) == code
    assert decode(code) == bits


def test_encode_rejects_non_bits():
    with pytest.raises(ValueError):
        encode(2, 0, 0, 0)


@pytest.mark.parametrize("code,k", [(10, 2), (15, 4), (0, 0)])
def test_degree(code, k):
    assert degree(code) == k


@pytest.mark.parametrize("code,rotated", [(10, 5), (15, 15), (8, 4)])
def test_rotate_cw(code, rotated):
    assert rotate_cw(code) == rotated


@pytest.mark.parametrize("code,cls", [(5, TileClass.STRAIGHT), (6, TileClass.TURN),
                                      (14, TileClass.CROSSING3), (15, TileClass.CROSSING4),
                                      (0, TileClass.EMPTY), (2, TileClass.DEAD_END)])
def test_classify(code, cls):
    assert classify(code) is cls


@pytest.mark.parametrize("a,b,d,ok", [(10, 10, Direction.S, True), (10, 5, Direction.S, False),
                                      (0, 0, Direction.E, True)])
def test_compatible(a, b, d, ok):
    assert compatible(a, b, d) is ok


def test_out_of_range_code():
    with pytest.raises(ValueError):
        degree(16)
    with pytest.raises(ValueError):
        rotate_cw(-1)


def test_rotation_laws_exhaustive():
    for t in CODES:
        r = t
        for _ in range(4):
            r = rotate_cw(r)
        assert r == t
        assert degree(rotate_cw(t)) == degree(t)
        assert rotate_ccw(rotate_cw(t)) == t
        assert classify(rotate_cw(t)) is classify(t)


def test_rotation_moves_each_arm_clockwise():
    step = {Direction.N: Direction.E, Direction.E: Direction.S,
            Direction.S: Direction.W, Direction.W: Direction.N}
    for t in CODES:
        expected = sum(step[d].bit for d in DIRECTIONS if t & d.bit)
        assert rotate_cw(t) == expected


def test_compatibility_symmetric_exhaustive():
    for a, b, d in itertools.product(CODES, CODES, DIRECTIONS):
        assert compatible(a, b, d) == compatible(b, a, d.opposite)


def test_direction_geometry():
    for d in DIRECTIONS:
        dr, dc = d.offset
        odr, odc = d.opposite.offset
        assert (dr + odr, dc + odc) == (0, 0)
    assert sorted(d.bit for d in DIRECTIONS) == [1, 2, 4, 8]


def test_lookup_tables_match_functions():
    assert DEGREE.tolist() == [degree(t) for t in CODES]
    assert ROTATE_CW.tolist() == [rotate_cw(t) for t in CODES]
    assert IS_TURN.tolist() == [classify(t) is TileClass.TURN for t in CODES]
    assert IS_CROSSING.tolist() == [degree(t) >= 3 for t in CODES]


def test_rotate_grid_cw_moves_cells_and_codes():
    g = np.array([[4, 1, 0]])  # E-W pair plus an empty cell
    r = rotate_grid_cw(g)
    assert r.shape == (3, 1)
    # the pair now runs N-S: top tile points S, the one under it points N
    assert r[:, 0].tolist() == [2, 8, 0]
