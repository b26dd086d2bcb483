"""ETA evaluation statistics and the evaluation table."""
from __future__ import annotations

import csv
import math
from dataclasses import astuple, dataclass, fields
from typing import Iterable, Mapping, Sequence


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class EvalPair:
    ata_days: float
    eta_days: float
    trajectory_label: str = ""

    def __post_init__(self):
        if self.ata_days < 0 or self.eta_days < 0:
            raise ValueError("ATA and ETA must be non-negative")


@dataclass(frozen=True)
class MetricsReport:
    mae: float
    mse: float
    rmse: float
    mape: float
    acc: float
    r_squared: float
    mu_e: float
    sigma_e: float
    n: int


def evaluate(pairs: Sequence[EvalPair]) -> MetricsReport:
    """Error statistics of predicted vs actual remaining time (days).

    ``acc`` is ``1 - mape`` and ``sigma_e`` is the population standard
    deviation of the signed errors ``eta - ata``.
    """
    pairs = list(pairs)
    n = len(pairs)
    if n < 2:
        raise MetricsError("need at least two (ATA, ETA) pairs")
    ata = [p.ata_days for p in pairs]
    if any(a <= 0 for a in ata):
        raise MetricsError("MAPE undefined: an actual arrival time is zero")
    e = [p.eta_days - p.ata_days for p in pairs]
    mean_ata = math.fsum(ata) / n
    ss_tot = math.fsum((a - mean_ata) ** 2 for a in ata)
    if ss_tot == 0:
        raise MetricsError("R-squared undefined: all actual arrival times are equal")
    sse = math.fsum(x * x for x in e)
    mae = math.fsum(abs(x) for x in e) / n
    mse = sse / n
    mape = math.fsum(abs(x) / a for x, a in zip(e, ata)) / n
    mu = math.fsum(e) / n
    sigma = math.sqrt(math.fsum((x - mu) ** 2 for x in e) / n)
    return MetricsReport(mae=mae, mse=mse, rmse=math.sqrt(mse), mape=mape, acc=1.0 - mape,
                         r_squared=1.0 - sse / ss_tot, mu_e=mu, sigma_e=sigma, n=n)


def table_rows(pairs_by_label: Mapping[str, Sequence[EvalPair]],
               groups: Mapping[str, Sequence[str]] | None = None,
               overall: str | None = "OVERALL") -> list[tuple[str, MetricsReport]]:
    """Per-label rows, then one row per group and an overall row.

    Aggregate rows are evaluated over the pooled pairs of their members,
    never by averaging member rows.
    """
    rows = [(label, evaluate(p)) for label, p in pairs_by_label.items()]
    for name, members in (groups or {}).items():
        pooled = [p for m in members for p in pairs_by_label[m]]
        rows.append((name, evaluate(pooled)))
    if overall and len(pairs_by_label) > 1:
        rows.append((overall, evaluate([p for ps in pairs_by_label.values() for p in ps])))
    return rows


def format_percent(x: float) -> str:
    return f"{100 * x:.2f}%"


HEADERS = ("Trajectory", "MAE", "MSE", "RMSE", "MAPE", "ACC", "R-Squared", "mu_e", "sigma_e", "n")


def render_table(rows: Iterable[tuple[str, MetricsReport]]) -> str:
    body = []
    for label, r in rows:
        body.append((label, f"{r.mae:.3f}", f"{r.mse:.3f}", f"{r.rmse:.3f}", format_percent(r.mape),
                     format_percent(r.acc), f"{r.r_squared:.3f}", f"{r.mu_e:.3f}", f"{r.sigma_e:.3f}", str(r.n)))
    widths = [max(len(h), *(len(row[i]) for row in body)) if body else len(h) for i, h in enumerate(HEADERS)]
    def line(cells):
        return "  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(cells, widths)))
    rule = "-" * len(line(HEADERS))
    return "\n".join([line(HEADERS), rule, *(line(row) for row in body)]) + "\n"


CSV_COLUMNS = ("label", "mae", "mse", "rmse", "mape", "acc", "r2", "mu_e", "sigma_e", "n")


def write_table_csv(rows: Iterable[tuple[str, MetricsReport]], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for label, r in rows:
            w.writerow([label, *(repr(v) for v in astuple(r)[:-1]), r.n])


def read_table_csv(path) -> list[tuple[str, MetricsReport]]:
    names = [f.name for f in fields(MetricsReport)]
    with open(path, newline="", encoding="utf-8") as f:
        out = []
        for row in csv.DictReader(f):
            vals = [float(row[c]) for c in CSV_COLUMNS[1:-1]] + [int(row["n"])]
            out.append((row["label"], MetricsReport(**dict(zip(names, vals)))))
    return out
