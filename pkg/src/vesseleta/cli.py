"""Command-line entry point: simulate, construct, predict, evaluate."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .construct import ConstructionError, KalmanParams, ScanMethod, ScanParams, read_trajectory, trajectory_stem
from .construct.trajectory import write_trajectory
from .eta import DEFAULT_MIN_SPEED_KNOTS, SpeedBelowThreshold, VesselState, predict_eta
from .geo import EarthModel, GeoPoint
from .ingest import (DEFAULT_MAX_REPORT_GAP_HOURS, IngestError, PortGeofence, PositionReport, StopPolicy,
                     format_timestamp, load_ports, read_reports, save_ports)
from .metrics import MetricsError, render_table, table_rows, write_table_csv
from .pipeline import construct_from_journeys, evaluate_od, od_label, prepare_journeys
from .synth import RouteSpec, demo_ports, demo_route, generate_voyages

log = logging.getLogger("vesseleta")

ETA_SWEEP = (0.1, 0.3, 0.6, 0.9, 1.0)


class CommandError(Exception):
    pass


@dataclass
class RunConfig:
    ports: dict[str, PortGeofence] = field(default_factory=dict)
    reports: list[Path] = field(default_factory=list)
    od: list[tuple[str, str]] = field(default_factory=list)
    methods: list[ScanMethod] = field(default_factory=lambda: [ScanMethod.LATLON])
    etas: list[float] = field(default_factory=lambda: [0.1])
    kalman: KalmanParams = field(default_factory=KalmanParams)
    stop: StopPolicy = field(default_factory=StopPolicy)
    max_gap_hours: float = DEFAULT_MAX_REPORT_GAP_HOURS
    earth: EarthModel = field(default_factory=EarthModel)
    out: Path = Path("out")
    seed: int = 0
    jobs: int = 1
    min_speed_kn: float = DEFAULT_MIN_SPEED_KNOTS

    @classmethod
    def from_args(cls, args) -> RunConfig:
        cfg = cls()
        if getattr(args, "ports", None):
            if not Path(args.ports).exists():
                raise CommandError(f"ports file not found: {args.ports}")
            cfg.ports = load_ports(args.ports)
        for p in getattr(args, "reports", None) or []:
            if not Path(p).exists():
                raise CommandError(f"report file not found: {p}")
            cfg.reports.append(Path(p))
        for od in getattr(args, "od", None) or []:
            origin, sep, dest = od.partition(":")
            if not sep or not origin or not dest:
                raise CommandError(f"--od expects ORIGIN:DESTINATION, got {od!r}")
            for name in (origin, dest):
                if name not in cfg.ports:
                    raise CommandError(f"port {name!r} not in ports file")
            cfg.od.append((origin, dest))
        methods = getattr(args, "method", None) or ["latlon"]
        cfg.methods = list(ScanMethod) if "all" in methods else [ScanMethod(m) for m in methods]
        cfg.etas = [float(e) for e in (getattr(args, "eta_deg", None) or [0.1])]
        if any(e <= 0 for e in cfg.etas):
            raise CommandError("--eta-deg values must be positive")
        cfg.kalman = KalmanParams(args.process_noise, args.measurement_noise)
        cfg.stop = StopPolicy(args.stop_max_kn, args.stop_min_h)
        cfg.max_gap_hours = args.max_gap_h
        cfg.earth = EarthModel(args.earth_radius_km)
        cfg.out = Path(args.out)
        cfg.seed = args.seed
        cfg.jobs = max(1, args.jobs)
        cfg.min_speed_kn = args.min_speed_kn
        return cfg

    def load_reports(self) -> list[PositionReport]:
        reports = []
        for path in self.reports:
            reports.extend(read_reports(path).reports)
        return reports


# --- commands --------------------------------------------------------------

def _route_from_file(path) -> tuple[RouteSpec, list[PortGeofence]]:
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    wps, ports = [], []
    for w in doc["waypoints"]:
        p = GeoPoint.from_degrees(w["lat"], w["lon"])
        wps.append(p)
        if w.get("name"):
            ports.append(PortGeofence(w["name"], p, float(w.get("radius_km", 25.0))))
    spec = RouteSpec(tuple(wps), doc.get("speed_knots", 14.0), doc.get("speed_jitter", 0.0),
                     doc.get("cross_track_sigma_km", 0.0), doc.get("report_interval_minutes", 30.0),
                     tuple(tuple(s) for s in doc.get("stops", ())))
    return spec, ports


def cmd_simulate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.route:
        spec, ports = _route_from_file(args.route)
    else:
        spec = demo_route(args.speed_kn, args.speed_jitter, args.cross_track_km, args.interval_min, args.stop_hours)
        ports = demo_ports()
    fleet = generate_voyages(spec, args.n_vessels, args.seed, voyages_per_vessel=args.voyages_per_vessel,
                             earth=EarthModel(args.earth_radius_km))
    fleet.write(out / "reports.csv", out / "truth.csv")
    if ports:
        save_ports(ports, out / "ports.json")
    print(f"wrote {len(fleet.reports)} reports for {len(fleet.truth)} voyages to {out}")
    return 0


def _journeys(cfg: RunConfig, reports, origin: str, dest: str):
    o, d = cfg.ports[origin], cfg.ports[dest]
    journeys = prepare_journeys(reports, o, d, cfg.stop, cfg.max_gap_hours, cfg.earth)
    if not journeys:
        raise CommandError(f"no journeys found from geofence {o.name!r} (radius {o.radius_km:g} km) "
                           f"to geofence {d.name!r} (radius {d.radius_km:g} km)")
    return journeys


def cmd_construct(args) -> int:
    cfg = RunConfig.from_args(args)
    if not cfg.od:
        raise CommandError("construct needs at least one --od")
    reports = cfg.load_reports()
    combos = []
    for origin, dest in cfg.od:
        journeys = _journeys(cfg, reports, origin, dest)
        for method in cfg.methods:
            for eta in cfg.etas:
                combos.append((origin, dest, journeys, ScanParams(eta, method)))

    def run(combo):
        origin, dest, journeys, scan = combo
        try:
            return construct_from_journeys(journeys, scan, cfg.kalman, cfg.ports[origin], cfg.ports[dest],
                                           cfg.earth), None
        except ConstructionError as exc:
            return None, str(exc)

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as ex:
            results = list(ex.map(run, combos))
    else:
        results = [run(c) for c in combos]

    ok = 0
    for (origin, dest, journeys, scan), (traj, err) in zip(combos, results):
        stem = trajectory_stem(origin, dest, scan)
        if traj is None:
            print(f"FAILED {stem}: {err}", file=sys.stderr)
            continue
        write_trajectory(traj, cfg.out, stem, origin=origin, destination=dest, journeys=len(journeys))
        ok += 1
        print(f"wrote {stem} ({len(traj)} points, {traj.length_km:.1f} km, {len(journeys)} journeys)")
    if ok == 0:
        raise CommandError("every construction failed")
    return 0


def cmd_predict(args) -> int:
    traj = read_trajectory(args.trajectory)
    earth = EarthModel(args.earth_radius_km) if args.earth_radius_km is not None else traj.earth
    state = VesselState(GeoPoint.from_degrees(args.lat, args.lon), args.sog)
    pred = predict_eta(state, traj, earth, args.min_speed_kn)
    print(json.dumps(pred.as_dict()))
    return 0


def cmd_evaluate(args) -> int:
    cfg = RunConfig.from_args(args)
    if not cfg.od:
        raise CommandError("evaluate needs at least one --od")
    if len(cfg.methods) != 1 or len(cfg.etas) != 1:
        raise CommandError("evaluate takes a single --method and a single --eta-deg")
    scan = ScanParams(cfg.etas[0], cfg.methods[0])
    fixed = read_trajectory(args.trajectory) if args.trajectory else None
    if fixed is not None and len(cfg.od) != 1:
        raise CommandError("--trajectory applies to exactly one --od")
    reports = cfg.load_reports()
    queries, by_label = [], {}
    for origin, dest in cfg.od:
        journeys = _journeys(cfg, reports, origin, dest)
        q = evaluate_od(journeys, scan, cfg.kalman, cfg.ports[origin], cfg.ports[dest], seed=cfg.seed,
                        n_queries=args.queries, min_speed_knots=cfg.min_speed_kn, earth=cfg.earth,
                        trajectory=fixed, jobs=cfg.jobs)
        queries.extend(q)
        by_label[od_label(origin, dest)] = [x.pair() for x in q]
    groups = {}
    for g in args.group or []:
        name, _, members = g.partition("=")
        labels = [m.strip() for m in members.split(",") if m.strip()]
        missing = [m for m in labels if m not in by_label]
        if not name or not labels or missing:
            raise CommandError(f"bad --group {g!r}")
        groups[name] = labels
    rows = table_rows(by_label, groups)
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_table_csv(rows, cfg.out / "metrics.csv")
    with open(cfg.out / "queries.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["label", "vessel_id", "journey", "timestamp", "ata_days", "eta_days", "remaining_km"])
        for x in queries:
            w.writerow([x.label, x.vessel_id, x.journey_index,
                        format_timestamp(datetime.fromtimestamp(x.epoch, timezone.utc)),
                        repr(x.ata_days), repr(x.eta_days), repr(x.remaining_km)])
    sys.stdout.write(render_table(rows))
    return 0


# --- argument parsing ------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file of option defaults (flags override it)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--earth-radius-km", type=float, default=6371.0)
    p.add_argument("-v", "--verbose", action="store_true")


def _pipeline(p: argparse.ArgumentParser, multi: bool) -> None:
    nargs = "+" if multi else None
    p.add_argument("--reports", nargs="+", required=True, help="report CSV file(s)")
    p.add_argument("--ports", required=True, help="ports JSON file")
    p.add_argument("--od", action="append", required=True, metavar="ORIGIN:DEST")
    p.add_argument("--method", nargs=nargs, choices=["lat", "lon", "latlon"] + (["all"] if multi else []),
                   default=["latlon"])
    p.add_argument("--eta-deg", nargs=nargs, type=float, default=[0.1], help="scanning interval(s), degrees")
    p.add_argument("--process-noise", type=float, default=KalmanParams().process_noise)
    p.add_argument("--measurement-noise", type=float, default=KalmanParams().measurement_noise)
    p.add_argument("--stop-max-kn", type=float, default=StopPolicy().max_speed_knots)
    p.add_argument("--stop-min-h", type=float, default=StopPolicy().min_duration_hours)
    p.add_argument("--max-gap-h", type=float, default=DEFAULT_MAX_REPORT_GAP_HOURS)
    p.add_argument("--min-speed-kn", type=float, default=DEFAULT_MIN_SPEED_KNOTS)
    p.add_argument("--jobs", type=int, default=1, help="worker threads")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="vesseleta", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = subs["simulate"] = sub.add_parser("simulate", help="generate a synthetic fleet")
    _common(p)
    p.add_argument("--route", help="route JSON (default: Singapore-Perth-Adelaide demo)")
    p.add_argument("--n-vessels", type=int, default=20)
    p.add_argument("--voyages-per-vessel", type=int, default=2)
    p.add_argument("--speed-kn", type=float, default=14.0)
    p.add_argument("--speed-jitter", type=float, default=0.05)
    p.add_argument("--cross-track-km", type=float, default=5.0)
    p.add_argument("--interval-min", type=float, default=30.0)
    p.add_argument("--stop-hours", type=float, default=18.0)
    p.set_defaults(func=cmd_simulate)

    p = subs["construct"] = sub.add_parser("construct", help="build trajectories for OD pairs")
    _common(p)
    _pipeline(p, multi=True)
    p.set_defaults(func=cmd_construct)

    p = subs["predict"] = sub.add_parser("predict", help="ETA for one vessel state")
    p.add_argument("--config", help="JSON file of option defaults (flags override it)")
    p.add_argument("--trajectory", required=True, help="trajectory .geojson or sidecar .csv")
    p.add_argument("--lat", type=float, required=True, help="degrees")
    p.add_argument("--lon", type=float, required=True, help="degrees")
    p.add_argument("--sog", type=float, required=True, help="knots")
    p.add_argument("--min-speed-kn", type=float, default=DEFAULT_MIN_SPEED_KNOTS)
    p.add_argument("--earth-radius-km", type=float, default=None)
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_predict)

    p = subs["evaluate"] = sub.add_parser("evaluate", help="leave-one-journey-out ETA evaluation")
    _common(p)
    _pipeline(p, multi=False)
    p.add_argument("--queries", type=int, default=10, help="query timestamps per journey")
    p.add_argument("--group", action="append", metavar="NAME=LABEL,LABEL", help="aggregate row over OD labels")
    p.add_argument("--trajectory", help="evaluate against this fixed trajectory instead of leave-one-out")
    p.set_defaults(func=cmd_evaluate)
    return parser, subs


def parse_args(argv=None) -> argparse.Namespace:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as f:
            cfg = {k.replace("-", "_"): v for k, v in json.load(f).items()}
        subs[args.command].set_defaults(**cfg)
        args = parser.parse_args(argv)
    for key in ("method", "eta_deg"):
        value = getattr(args, key, None)
        if value is not None and not isinstance(value, list):
            setattr(args, key, [value])
    return args


def main(argv=None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except SpeedBelowThreshold as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (CommandError, ConstructionError, IngestError, MetricsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
