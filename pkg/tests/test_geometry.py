"""Distance and noise-free ToA model."""

import math

import numpy as np
import pytest

from irlspos import (
    SPEED_OF_LIGHT_M_S,
    BaseStation,
    GeometryError,
    Position2D,
    euclidean_distance,
    true_first_toa,
)
from irlspos.geometry import check_station_layout


def test_distance_identity():
    assert euclidean_distance(Position2D(0, 0), Position2D(0, 0)) == 0.0


def test_distance_3_4_5():
    assert euclidean_distance(Position2D(0, 0), Position2D(3, 4)) == 5.0


def test_distance_3_4_5_translated():
    assert euclidean_distance(Position2D(1, 1), Position2D(-2, 5)) == 5.0


def test_toa_3_4_5():
    bs = BaseStation(1, Position2D(3, 4))
    toa = true_first_toa(Position2D(0, 0), bs)
    assert toa == pytest.approx(5.0 / SPEED_OF_LIGHT_M_S, rel=1e-15)
    assert toa == pytest.approx(1.6678e-8, rel=1e-4)


def test_toa_colocated_is_zero():
    bs = BaseStation(1, Position2D(10, 10))
    assert true_first_toa(Position2D(10, 10), bs) == 0.0


def test_toa_aoi_corner():
    # direct evaluation of the propagation model at the far corner
    expected = math.sqrt(1466.0) / SPEED_OF_LIGHT_M_S
    bs = BaseStation(1, Position2D(29, 25))
    assert true_first_toa(Position2D(0, 0), bs) == pytest.approx(expected, rel=1e-15)
    assert expected == pytest.approx(1.2771628643891133e-07, rel=1e-15)


def test_distance_symmetry_random():
    rng = np.random.default_rng(1)
    for _ in range(200):
        a = Position2D(*rng.uniform(-100, 100, 2))
        b = Position2D(*rng.uniform(-100, 100, 2))
        assert euclidean_distance(a, b) == euclidean_distance(b, a)


def test_triangle_inequality_random():
    rng = np.random.default_rng(2)
    for _ in range(200):
        a, b, c = (Position2D(*rng.uniform(-50, 50, 2)) for _ in range(3))
        assert euclidean_distance(a, c) <= (
            euclidean_distance(a, b) + euclidean_distance(b, c) + 1e-12
        )


def test_toa_scales_linearly():
    rng = np.random.default_rng(3)
    for _ in range(50):
        ue = rng.uniform(-20, 20, 2)
        bs = rng.uniform(-20, 20, 2)
        toa = true_first_toa(Position2D(*ue), BaseStation(1, Position2D(*bs)))
        toa2 = true_first_toa(Position2D(*(2 * ue)), BaseStation(1, Position2D(*(2 * bs))))
        assert toa2 == pytest.approx(2 * toa, rel=1e-12)


def test_position_rejects_non_finite():
    with pytest.raises(ValueError):
        Position2D(float("nan"), 0.0)
    with pytest.raises(ValueError):
        Position2D(0.0, float("inf"))


def test_layout_needs_three_stations():
    sts = [BaseStation(1, Position2D(0, 0)), BaseStation(2, Position2D(1, 0))]
    with pytest.raises(GeometryError, match="under-determined"):
        check_station_layout(sts)


def test_layout_rejects_duplicate_ids():
    sts = [
        BaseStation(1, Position2D(0, 0)),
        BaseStation(1, Position2D(1, 0)),
        BaseStation(2, Position2D(0, 1)),
    ]
    with pytest.raises(GeometryError, match="unique"):
        check_station_layout(sts)


def test_layout_rejects_collinear():
    sts = [BaseStation(i, Position2D(float(i), 2.0 * i)) for i in range(1, 5)]
    with pytest.raises(GeometryError, match="collinear"):
        check_station_layout(sts)


def test_layout_sorts_by_id(stations):
    shuffled = [stations[2], stations[0], stations[3], stations[1]]
    assert [s.id for s in check_station_layout(shuffled)] == [1, 2, 3, 4]
