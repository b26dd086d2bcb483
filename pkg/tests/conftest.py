import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from vesseleta.geo import GeoPoint  # noqa: E402
from vesseleta.ingest import PortGeofence  # noqa: E402
from vesseleta.synth import RouteSpec, generate_voyages  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

A = GeoPoint.from_degrees(0.0, 100.0)
B = GeoPoint.from_degrees(-15.0, 115.0)


@pytest.fixture(scope="session")
def diagonal_corridor():
    """Zero-noise straight corridor, 10 vessels, ports with 10 km geofences."""
    spec = RouteSpec((A, B), speed_knots=14.0, report_interval_minutes=30.0)
    fleet = generate_voyages(spec, 10, seed=1)
    return spec, fleet, PortGeofence("A", A, 10.0), PortGeofence("B", B, 10.0)


@pytest.fixture(scope="session")
def noisy_corridor():
    spec = RouteSpec((A, B), speed_knots=14.0, speed_jitter=0.05, cross_track_sigma_km=3.0,
                     report_interval_minutes=30.0)
    fleet = generate_voyages(spec, 12, seed=11)
    return spec, fleet, PortGeofence("A", A, 25.0), PortGeofence("B", B, 25.0)


_CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record the outcome of an acceptance criterion for the terminal summary."""
    def record(number: int, ok: bool, detail: str) -> bool:
        _CRITERIA[number] = (bool(ok), detail)
        print(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        return bool(ok)
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        ok, detail = _CRITERIA[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
