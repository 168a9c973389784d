"""Trajectory recording and CSV export/import.

Wire format (one row per agent per tick)::

    frame,time_s,agent_id,lane,x_m,y_m,speed_mps,class

Floats are written with ``repr`` so a read-back reproduces them bit-exactly.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

CSV_HEADER = ["frame", "time_s", "agent_id", "lane", "x_m", "y_m", "speed_mps", "class"]


@dataclass(frozen=True)
class TrajectoryRow:
    frame: int
    time_s: float
    agent_id: int
    lane: int
    x_m: float
    y_m: float
    speed_mps: float
    class_tag: str


class Trajectory:
    """Ordered trajectory rows for a whole simulation run."""

    def __init__(self, rows: list[TrajectoryRow] | None = None, metadata: dict | None = None):
        self.rows: list[TrajectoryRow] = rows or []
        self.metadata: dict = metadata or {}

    def record(self, world) -> None:
        """Append one row per vehicle from a sim world snapshot."""
        t = world.time_s
        for v in sorted(world.vehicles, key=lambda s: s.id):
            self.rows.append(
                TrajectoryRow(
                    frame=world.tick,
                    time_s=t,
                    agent_id=v.id,
                    lane=v.lane,
                    x_m=v.x,
                    y_m=v.y,
                    speed_mps=v.v,
                    class_tag=v.class_tag,
                )
            )

    def frames(self) -> list[int]:
        seen: dict[int, None] = {}
        for r in self.rows:
            seen.setdefault(r.frame, None)
        return list(seen)

    def agent_ids(self) -> list[int]:
        seen: dict[int, None] = {}
        for r in self.rows:
            seen.setdefault(r.agent_id, None)
        return sorted(seen)

    def positions_by_frame(self) -> dict[int, dict[int, tuple[float, float]]]:
        """frame -> {agent_id: (x, y)}; the input to graph construction."""
        out: dict[int, dict[int, tuple[float, float]]] = {}
        for r in self.rows:
            out.setdefault(r.frame, {})[r.agent_id] = (r.x_m, r.y_m)
        return out

    def series(self, agent_id: int, column: str) -> list[float]:
        return [getattr(r, column) for r in self.rows if r.agent_id == agent_id]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            writer.writerow(
                [
                    r.frame,
                    repr(r.time_s),
                    r.agent_id,
                    r.lane,
                    repr(r.x_m),
                    repr(r.y_m),
                    repr(r.speed_mps),
                    r.class_tag,
                ]
            )
        return buf.getvalue()

    def write_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv())

    @classmethod
    def from_csv(cls, text: str) -> "Trajectory":
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("empty trajectory file: missing header") from None
        if header != CSV_HEADER:
            raise ValueError(f"bad trajectory header {header!r}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(CSV_HEADER):
                raise ValueError(f"row {lineno}: expected {len(CSV_HEADER)} fields, got {len(rec)}")
            try:
                rows.append(
                    TrajectoryRow(
                        frame=int(rec[0]),
                        time_s=float(rec[1]),
                        agent_id=int(rec[2]),
                        lane=int(rec[3]),
                        x_m=float(rec[4]),
                        y_m=float(rec[5]),
                        speed_mps=float(rec[6]),
                        class_tag=rec[7],
                    )
                )
            except ValueError as exc:
                raise ValueError(f"row {lineno}: {exc}") from None
        return cls(rows)

    @classmethod
    def read_csv(cls, path: str | Path) -> "Trajectory":
        return cls.from_csv(Path(path).read_text())
