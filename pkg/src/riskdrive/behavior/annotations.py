"""Annotator interval aggregation and the time-deviation error.

Each of M annotators marks a [start, end] frame interval for the maneuver;
per-frame counters over [min start, max end] are normalized into a
probability mass whose expectation is the consensus frame. The counters
must be normalized: the raw counter sum is not a distribution and its
"expectation" would escape the frame bounds.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .metrics import BehaviorProfile, sle_argmax_frame

ANNOTATION_HEADER = ["annotator_id", "start_frame", "end_frame"]


@dataclass(frozen=True)
class AnnotationSet:
    """Start/end frames from M annotators for one recording."""

    starts: tuple[int, ...]
    ends: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.starts) != len(self.ends):
            raise ValueError("starts and ends must have equal length")
        if not self.starts:
            raise ValueError("annotation set is empty")
        for s, e in zip(self.starts, self.ends):
            if s > e:
                raise ValueError(f"start {s} after end {e}")

    @property
    def m(self) -> int:
        return len(self.starts)

    @classmethod
    def from_csv(cls, text: str) -> "AnnotationSet":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header != ANNOTATION_HEADER:
            raise ValueError(f"bad annotation header {header!r}")
        starts, ends = [], []
        for rec in reader:
            if not rec:
                continue
            starts.append(int(rec[1]))
            ends.append(int(rec[2]))
        return cls(starts=tuple(starts), ends=tuple(ends))

    @classmethod
    def read_csv(cls, path: str | Path) -> "AnnotationSet":
        return cls.from_csv(Path(path).read_text())


def frame_counters(ann: AnnotationSet) -> tuple[np.ndarray, int]:
    """Per-frame coverage counters c_t over [min start, max end]."""
    lo = min(ann.starts)
    hi = max(ann.ends)
    counters = np.zeros(hi - lo + 1)
    for s, e in zip(ann.starts, ann.ends):
        counters[s - lo : e - lo + 1] += 1.0
    return counters, lo


def expected_aggressive_frame(ann: AnnotationSet) -> float:
    """Expected maneuver frame E[T] under the normalized counter mass."""
    counters, lo = frame_counters(ann)
    mass = counters / counters.sum()
    frames = np.arange(lo, lo + counters.size)
    return float(frames @ mass)


def tde(profile: BehaviorProfile, ann: AnnotationSet) -> float:
    """Time-deviation error |t_SLE - E[T]| in frames."""
    t0, t1 = profile.window
    if max(ann.ends) < t0 or min(ann.starts) > t1:
        raise ValueError("profile window does not overlap the annotation range")
    return abs(sle_argmax_frame(profile) - expected_aggressive_frame(ann))
