"""Experiment metric records with bit-exact CSV/JSON round-trips."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

RECORD_HEADER = ["experiment", "seed", "grid", "metrics"]


@dataclass(frozen=True)
class MetricRecord:
    """One (experiment, grid point, seed) outcome."""

    experiment: str
    seed: int
    grid: dict
    metrics: dict

    def to_row(self) -> list:
        return [
            self.experiment,
            self.seed,
            json.dumps(self.grid, sort_keys=True),
            json.dumps(self.metrics, sort_keys=True),
        ]

    @classmethod
    def from_row(cls, row: list) -> "MetricRecord":
        return cls(
            experiment=row[0],
            seed=int(row[1]),
            grid=json.loads(row[2]),
            metrics=json.loads(row[3]),
        )


def write_records_csv(records: list[MetricRecord], path: str | Path) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RECORD_HEADER)
    for r in records:
        writer.writerow(r.to_row())
    Path(path).write_text(buf.getvalue())


def read_records_csv(path: str | Path) -> list[MetricRecord]:
    reader = csv.reader(io.StringIO(Path(path).read_text()))
    header = next(reader, None)
    if header != RECORD_HEADER:
        raise ValueError(f"bad records header {header!r}")
    return [MetricRecord.from_row(row) for row in reader if row]


def write_records_json(records: list[MetricRecord], path: str | Path) -> None:
    payload = [
        {
            "experiment": r.experiment,
            "seed": r.seed,
            "grid": r.grid,
            "metrics": r.metrics,
        }
        for r in records
    ]
    Path(path).write_text(json.dumps(payload, indent=2))


def read_records_json(path: str | Path) -> list[MetricRecord]:
    payload = json.loads(Path(path).read_text())
    return [
        MetricRecord(
            experiment=item["experiment"],
            seed=item["seed"],
            grid=item["grid"],
            metrics=item["metrics"],
        )
        for item in payload
    ]


@dataclass
class ExperimentReport:
    """Everything one experiment run produces."""

    name: str
    records: list[MetricRecord]
    assertions: list[tuple[str, bool, str]] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.assertions)

    def summary_payload(self) -> dict:
        return {
            "experiment": self.name,
            "passed": self.passed,
            "assertions": [
                {"name": name, "passed": ok, "detail": detail}
                for name, ok, detail in self.assertions
            ],
            "summary": self.summary,
        }

    def write(self, out_dir: str | Path) -> dict[str, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {
            "records_csv": out / f"{self.name}_records.csv",
            "records_json": out / f"{self.name}_records.json",
            "summary": out / f"{self.name}_summary.json",
        }
        write_records_csv(self.records, paths["records_csv"])
        write_records_json(self.records, paths["records_json"])
        paths["summary"].write_text(json.dumps(self.summary_payload(), indent=2))
        return paths
