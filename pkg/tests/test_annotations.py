import numpy as np
import pytest

from riskdrive.behavior import (
    AnnotationSet,
    compute_profile,
    expected_aggressive_frame,
    frame_counters,
    tde,
)
from riskdrive.graph import GraphHistory


def brute_force_expectation(starts, ends):
    """Tally counters frame by frame and take the normalized expectation."""
    lo, hi = min(starts), max(ends)
    weighted = 0.0
    total = 0.0
    for t in range(lo, hi + 1):
        c = sum(1 for s, e in zip(starts, ends) if s <= t <= e)
        weighted += t * c
        total += c
    return weighted / total


def test_single_annotator_uniform():
    ann = AnnotationSet(starts=(10,), ends=(12,))
    assert expected_aggressive_frame(ann) == pytest.approx(11.0)


def test_two_annotators_overlapping():
    ann = AnnotationSet(starts=(10, 12), ends=(12, 14))
    counters, lo = frame_counters(ann)
    assert lo == 10
    assert list(counters) == [1, 1, 2, 1, 1]
    assert expected_aggressive_frame(ann) == pytest.approx(12.0)


def test_point_mass():
    ann = AnnotationSet(starts=(7, 7, 7), ends=(7, 7, 7))
    assert expected_aggressive_frame(ann) == 7.0


def test_random_sets_match_brute_force_and_bounds():
    rng = np.random.default_rng(17)
    for _ in range(300):
        m = int(rng.integers(1, 8))
        starts = rng.integers(0, 80, size=m)
        ends = starts + rng.integers(0, 40, size=m)
        ann = AnnotationSet(starts=tuple(int(s) for s in starts), ends=tuple(int(e) for e in ends))
        et = expected_aggressive_frame(ann)
        assert et == pytest.approx(brute_force_expectation(ann.starts, ann.ends))
        assert min(ann.starts) <= et <= max(ann.ends)


def test_validation():
    with pytest.raises(ValueError):
        AnnotationSet(starts=(), ends=())
    with pytest.raises(ValueError):
        AnnotationSet(starts=(5,), ends=(3,))
    with pytest.raises(ValueError):
        AnnotationSet(starts=(5, 6), ends=(7,))


def test_csv_round_trip():
    text = "annotator_id,start_frame,end_frame\n0,10,12\n1,12,14\n"
    ann = AnnotationSet.from_csv(text)
    assert ann.starts == (10, 12)
    assert ann.ends == (12, 14)
    with pytest.raises(ValueError):
        AnnotationSet.from_csv("wrong,header\n1,2\n")


def profile_with_peak(peak_frame, n=30):
    """Scripted two-vehicle history whose closeness rate peaks at a known frame.

    The inter-vehicle distance follows 1/sigmoid, so the closeness series is
    exactly a sigmoid centered on ``peak_frame``: its sampled central
    difference is strictly largest at the center.
    """
    import math

    hist = GraphHistory(mu=50.0)
    for t in range(n):
        closeness = 0.1 + 0.05 / (1.0 + math.exp(-(t - peak_frame)))
        hist.append([(0.0, 0.0), (1.0 / closeness, 0.0)])
    return compute_profile(hist, 0, dt=1.0)


def test_tde_perfect_agreement():
    profile = profile_with_peak(11)
    ann = AnnotationSet(starts=(11,), ends=(11,))
    assert tde(profile, ann) == 0.0


def test_tde_absolute_difference():
    profile = profile_with_peak(15)
    ann = AnnotationSet(starts=(10,), ends=(12,))
    assert tde(profile, ann) == pytest.approx(4.0)


def test_tde_end_to_end_scripted_maneuver():
    # maneuver at frame 20, annotated by construction around it
    profile = profile_with_peak(20)
    ann = AnnotationSet(starts=(18, 19, 20), ends=(22, 21, 20))
    # hand computation: counters over [18, 22] are (1,2,3,2,1) -> E[T] = 20
    assert expected_aggressive_frame(ann) == pytest.approx(20.0)
    assert tde(profile, ann) == pytest.approx(0.0)


def test_tde_requires_overlap():
    profile = profile_with_peak(5, n=10)
    ann = AnnotationSet(starts=(50,), ends=(60,))
    with pytest.raises(ValueError):
        tde(profile, ann)
