"""Signed excursion scanning."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from isdtwin import ConfigError
from isdtwin.peaks import find_excursions


def test_bipolar_pulse_gives_two_excursions():
    x = np.array([0.0, 0.2, 1.0, 0.4, -0.3, -1.2, -0.4, 0.0])
    exc = find_excursions(x, threshold=0.8, hysteresis=0.5)
    assert len(exc) == 2
    pos, neg = exc
    assert pos.sign == 1 and neg.sign == -1
    assert pos.peak_value == 1.0 and neg.peak_value == -1.2
    assert pos.peak_index == 2 and neg.peak_index == 5
    # Runs extend down to the exit level (0.4), not the full threshold.
    assert (pos.start, pos.end) == (2, 4)
    assert (neg.start, neg.end) == (5, 7)


def test_subthreshold_runs_are_dropped():
    x = np.array([0.0, 0.5, 0.7, 0.5, 0.0])
    assert find_excursions(x, threshold=0.8, hysteresis=0.5) == []
    # Same run qualifies once the peak reaches threshold.
    x[2] = 0.81
    assert len(find_excursions(x, threshold=0.8, hysteresis=0.5)) == 1


def test_hysteresis_merges_ripple_near_threshold():
    # Dips to 0.5 stay above the exit level 0.4, so this is one excursion.
    x = np.array([0.0, 0.9, 0.5, 0.95, 0.5, 0.9, 0.0])
    exc = find_excursions(x, threshold=0.8, hysteresis=0.5)
    assert len(exc) == 1
    assert exc[0].peak_value == 0.95
    # With hysteresis 1.0 the dips leave the band: three excursions.
    assert len(find_excursions(x, threshold=0.8, hysteresis=1.0)) == 3


def test_sign_flip_splits_runs():
    x = np.array([1.0, -1.0, 1.0])
    exc = find_excursions(x, threshold=0.5)
    assert [e.sign for e in exc] == [1, -1, 1]


def test_edges_count_as_run_boundaries():
    x = np.array([2.0, 2.0, 0.0, -2.0])
    exc = find_excursions(x, threshold=1.0)
    assert exc[0].start == 0
    assert exc[-1].end == 4


def test_empty_and_quiet_inputs():
    assert find_excursions(np.array([]), threshold=1.0) == []
    assert find_excursions(np.zeros(64), threshold=1.0) == []


def test_validation():
    x = np.zeros(4)
    with pytest.raises(ConfigError):
        find_excursions(x, threshold=0.0)
    with pytest.raises(ConfigError):
        find_excursions(x, threshold=1.0, hysteresis=0.0)
    with pytest.raises(ConfigError):
        find_excursions(x, threshold=1.0, hysteresis=1.5)


@settings(max_examples=200, deadline=None)
@given(
    x=hnp.arrays(np.float64, st.integers(0, 200), elements=st.floats(-10, 10)),
    threshold=st.floats(0.1, 5.0),
    hysteresis=st.floats(0.1, 1.0),
)
def test_excursions_are_ordered_disjoint_and_qualified(x, threshold, hysteresis):
    exc = find_excursions(x, threshold, hysteresis)
    prev_end = 0
    for e in exc:
        assert 0 <= e.start < e.end <= x.size
        assert e.start >= prev_end
        prev_end = e.end
        assert e.start <= e.peak_index < e.end
        assert e.peak_value == x[e.peak_index]
        assert abs(e.peak_value) >= threshold
        assert np.sign(e.peak_value) == e.sign
        # Every sample in the run stays beyond the exit level on one side.
        seg = x[e.start : e.end]
        assert np.all(e.sign * seg >= hysteresis * threshold)
