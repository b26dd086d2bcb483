import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import brute_force_mode
from vesseleta.construct import (HistoricalSet, ScanError, ScanMethod, ScanParams, lat_scan, latlon_scan,
                                 lon_scan, scan_coords)
from vesseleta.construct.scan import lat_scan_coords, latlon_scan_coords, lon_scan_coords
from vesseleta.geo import GeoPoint, haversine_angle
from vesseleta.pipeline import prepare_journeys
from vesseleta.synth import demo_ports, demo_route, generate_voyages


def K_from(coords) -> HistoricalSet:
    return HistoricalSet(np.asarray(coords, dtype=float), 1)


def test_params_validation():
    with pytest.raises(ValueError):
        ScanParams(0.0)
    with pytest.raises(ValueError):
        ScanParams(0.1, min_bin_count=0)
    p = ScanParams(0.5, "lon")
    assert p.method is ScanMethod.LON
    assert p.eta_rad == pytest.approx(math.radians(0.5))
    assert ScanParams.from_radians(p.eta_rad, "lon").eta == pytest.approx(0.5)


def test_historical_set_validation():
    with pytest.raises(ValueError):
        HistoricalSet(np.empty((0, 2)), 0)
    with pytest.raises(ValueError):
        HistoricalSet(np.array([[2.0, 0.0]]), 1)
    K = HistoricalSet.from_points([GeoPoint(0.1, 0.2)], 1)
    assert K.points == [GeoPoint(0.1, 0.2)]


def test_meridian_segment_constant_longitude():
    lat = np.linspace(0.0, 0.1, 1000)
    K = K_from(np.column_stack([lat, np.full(1000, 1.0)]))
    out = lat_scan_coords(K, ScanParams.from_radians(0.01, "lat"))
    assert len(out) == 11
    assert np.all(out[:, 1] == 1.0)
    np.testing.assert_allclose(out[:, 0], np.arange(11) * 0.01, atol=1e-15)


def test_equatorial_segment_constant_latitude():
    lon = np.linspace(0.0, 0.1, 1000)
    K = K_from(np.column_stack([np.zeros(1000), lon]))
    out = lon_scan_coords(K, ScanParams.from_radians(0.01, "lon"))
    assert np.all(out[:, 0] == 0.0)


def test_denser_track_wins_every_line():
    rng = np.random.default_rng(7)
    a = np.column_stack([rng.uniform(0, 0.1, 300), np.full(300, 1.00)])
    b = np.column_stack([rng.uniform(0, 0.1, 100), np.full(100, 1.05)])
    K = K_from(np.vstack([a, b]))
    out = lat_scan_coords(K, ScanParams.from_radians(0.01, "lat"))
    assert np.all(out[:, 1] == 1.00)
    rotated = K_from(K.coords[:, ::-1])
    out = lon_scan_coords(rotated, ScanParams.from_radians(0.01, "lon"))
    assert np.all(out[:, 0] == 1.00)


def test_sparse_line_absent():
    coords = np.array([[0.0, 1.0]] * 3 + [[0.05, 1.0]] * 2 + [[0.1, 1.0]] * 3)
    out = lat_scan_coords(K_from(coords), ScanParams.from_radians(0.05, "lat"))
    np.testing.assert_allclose(out[:, 0], [0.0, 0.1])


def test_too_coarse_raises():
    coords = np.array([[0.0, 1.0], [0.01, 1.0], [0.02, 1.0]])
    with pytest.raises(ScanError):
        lat_scan_coords(K_from(coords), ScanParams.from_radians(1.0, "lat"))


def test_half_open_windows_capture_each_point_once():
    # lines at 0, 1, 2 (scaled); 0.5 falls in line 1's window, not line 0's
    eta = 0.01
    vals = np.array([0.0, 0.0, 0.0, 0.5, 0.5, 0.5, 1.0, 1.49, 2.0, 2.0, 2.0]) * eta
    coords = np.column_stack([vals, np.arange(len(vals)) * 1e-3])
    out = lat_scan_coords(K_from(coords), ScanParams.from_radians(eta, "lat", min_bin_count=1))
    assert len(out) == 3
    assert out[1, 1] == brute_force_mode(coords[3:8, 1])


def test_latlon_is_deduplicated_union():
    rng = np.random.default_rng(1)
    t = rng.uniform(0, 1, 2000)
    coords = np.column_stack([-0.2 * t, 1.7 + 0.2 * t + rng.normal(0, 1e-4, 2000)])
    K = K_from(coords)
    p = ScanParams(0.5)
    lat = lat_scan_coords(K, p)
    lon = lon_scan_coords(K, p)
    both = latlon_scan_coords(K, p)
    assert len(both) <= len(lat) + len(lon)
    np.testing.assert_array_equal(both[:len(lat)], lat)
    for row in both[len(lat):]:
        assert any(np.array_equal(row, r) for r in lon)
    sep = haversine_angle(both[:, None, 0], both[:, None, 1], both[None, :, 0], both[None, :, 1])
    for i in range(len(lat), len(both)):
        others = np.delete(sep[i], i)
        assert np.all(others >= p.eta_rad / 10)


def test_latlon_without_duplicates_is_concatenation():
    # sparse points placed so no lon-scan point lands within eta/10 of a lat-scan point
    K = K_from([[0.0, 0.06], [0.33, 0.0], [0.62, 0.53]])
    p = ScanParams.from_radians(0.1, min_bin_count=1)
    lat = lat_scan_coords(K, p)
    lon = lon_scan_coords(K, p)
    np.testing.assert_allclose(lat, [[0.0, 0.06], [0.3, 0.0], [0.6, 0.53]], atol=1e-12)
    np.testing.assert_allclose(lon, [[0.33, 0.0], [0.0, 0.1], [0.62, 0.5]], atol=1e-12)
    np.testing.assert_array_equal(latlon_scan_coords(K, p), np.vstack([lat, lon]))


def test_point_wrappers_and_dispatch():
    lat = np.linspace(0.0, 0.1, 100)
    K = K_from(np.column_stack([lat, lat + 1.0]))
    p = ScanParams.from_radians(0.01)
    assert lat_scan(K, p) == [GeoPoint(*r) for r in lat_scan_coords(K, p)]
    assert lon_scan(K, p) == [GeoPoint(*r) for r in lon_scan_coords(K, p)]
    assert latlon_scan(K, p) == [GeoPoint(*r) for r in latlon_scan_coords(K, p)]
    for m in ScanMethod:
        assert len(scan_coords(K, ScanParams.from_radians(0.01, m))) >= 2


def test_synthetic_voyages_stay_in_bounding_box():
    fleet = generate_voyages(demo_route(), 6, seed=9)
    ports = {p.name: p for p in demo_ports()}
    K = HistoricalSet.from_journeys(prepare_journeys(fleet.reports, ports["SGP"], ports["PER"]))
    lo_lat, hi_lat, lo_lon, hi_lon = K.bounds()
    out = lat_scan_coords(K, ScanParams(0.3, "lat"))
    assert np.all((out[:, 0] >= lo_lat) & (out[:, 0] <= hi_lat))
    assert np.all((out[:, 1] >= lo_lon) & (out[:, 1] <= hi_lon))


coords_strategy = st.lists(st.tuples(st.floats(-0.5, 0.5), st.floats(1.0, 2.0)), min_size=3, max_size=120)


@given(coords_strategy, st.sampled_from(list(ScanMethod)), st.floats(0.01, 0.2), st.integers(1, 4))
def test_scan_output_properties(rows, method, eta_rad, min_count):
    coords = np.array(rows)
    K = K_from(coords)
    p = ScanParams.from_radians(eta_rad, method, min_count)
    try:
        out = scan_coords(K, p)
    except ScanError:
        return
    lo_lat, hi_lat, lo_lon, hi_lon = K.bounds()
    half = eta_rad / 2
    assert np.all((out[:, 0] >= lo_lat - half) & (out[:, 0] <= hi_lat + half))
    assert np.all((out[:, 1] >= lo_lon - half) & (out[:, 1] <= hi_lon + half))
    lat_vals, lon_vals = set(coords[:, 0]), set(coords[:, 1])
    for phi, lam in out:
        # one coordinate sits on a scan line, the other is a captured sample value
        on_lat_line = abs(((phi - lo_lat) / eta_rad) - round((phi - lo_lat) / eta_rad)) < 1e-6
        on_lon_line = abs(((lam - lo_lon) / eta_rad) - round((lam - lo_lon) / eta_rad)) < 1e-6
        assert (on_lat_line and lam in lon_vals) or (on_lon_line and phi in lat_vals)


def _line_of(v, lo, eta, n_lines):
    for k in range(n_lines):
        c = lo + k * eta
        if c - eta / 2 <= v < c + eta / 2:
            return k
    return None


@given(coords_strategy, st.floats(0.01, 0.2))
def test_one_point_per_occupied_line(rows, eta_rad):
    # with min_bin_count 1 every line that captures anything emits
    coords = np.array(rows)
    p = ScanParams.from_radians(eta_rad, "lat", 1)
    try:
        out = lat_scan_coords(K_from(coords), p)
    except ScanError:
        return
    eta = p.eta_rad
    lo, hi = coords[:, 0].min(), coords[:, 0].max()
    n_lines = 1
    while lo + n_lines * eta <= hi + 1e-9 * eta:
        n_lines += 1
    lines = {_line_of(v, lo, eta, n_lines) for v in coords[:, 0]} - {None}
    np.testing.assert_allclose(out[:, 0], [lo + k * eta for k in sorted(lines)], rtol=0, atol=1e-15)
