import math

import pytest

from collapsemc.relativity import (C, Event, Frame, InvalidGeometryError,
                                   SuperluminalFrameError, activation_gap, boost,
                                   detection_events, first_detector, gamma,
                                   min_separation)

V99 = 0.99 * C


def sig_figs_equal(x: float, y: float, n: int) -> bool:
    """Agreement to n significant figures: |x - y| <= 0.5 * 10**(1-n) * |y|."""
    return abs(x - y) <= 0.5 * 10.0 ** (1 - n) * abs(y)


def test_gamma_values():
    assert gamma(0.0) == 1.0
    assert gamma(0.6 * C) == pytest.approx(1.25, rel=1e-12)
    assert gamma(V99) == pytest.approx(7.08881, rel=1e-6)
    assert gamma(-V99) == gamma(V99)


def test_gamma_superluminal():
    with pytest.raises(SuperluminalFrameError):
        gamma(C)
    with pytest.raises(SuperluminalFrameError):
        gamma(-1.01 * C)


def test_boost_origin_fixed():
    for v in (0.0, 0.5 * C, -V99):
        out = boost(Event(0.0, 0.0), v)
        assert (out.t, out.x) == (0.0, 0.0)


def test_boost_detection_event_frame_a():
    e1, _ = detection_events(1000.0)
    out = boost(e1, V99)
    assert sig_figs_equal(out.t, 2.3646e-7, 5)
    assert sig_figs_equal(out.x, 70.888, 5)
    # the detection event is light-like and stays light-like
    assert abs(C * out.t - out.x) <= 1e-6


def test_boost_detection_event_frame_b():
    e1, _ = detection_events(1000.0)
    out = boost(e1, -V99)
    assert sig_figs_equal(out.t, 4.7055e-5, 5)


def test_detection_events_geometry():
    e1, e2 = detection_events(1000.0)
    assert e1.t == e2.t == pytest.approx(3.33564e-6, rel=1e-6)
    assert (e1.x, e2.x) == (1000.0, -1000.0)
    one_second = detection_events(C)[0]
    assert one_second.t == 1.0
    with pytest.raises(InvalidGeometryError):
        detection_events(0.0)


def test_events_simultaneous_in_frame0():
    e1, e2 = detection_events(2500.0)
    assert boost(e1, 0.0).t == boost(e2, 0.0).t


def test_activation_gap_value_and_consistency():
    dt = activation_gap(1000.0, V99)
    assert sig_figs_equal(dt, 4.6819e-5, 5)
    e1, e2 = detection_events(1000.0)
    from_boosts = abs(boost(e2, V99).t - boost(e1, V99).t)
    assert dt == pytest.approx(from_boosts, rel=1e-12)


def test_activation_gap_limits():
    assert activation_gap(1000.0, 1e-3) < 1e-16
    assert activation_gap(2000.0, V99) == pytest.approx(
        2.0 * activation_gap(1000.0, V99), rel=1e-14)
    with pytest.raises(InvalidGeometryError):
        activation_gap(-1.0, V99)
    with pytest.raises(SuperluminalFrameError):
        activation_gap(1000.0, C)
    with pytest.raises(SuperluminalFrameError):
        activation_gap(1000.0, -V99)


def test_min_separation_value():
    d = min_separation(1e-4, V99)
    assert d == pytest.approx(2135.9056, rel=1e-6)
    # same order as a kilometre
    assert 1e3 < d < 1e4


def test_min_separation_round_trip():
    for tau in (1e-6, 1e-4, 3e-3):
        for v in (0.3 * C, 0.9 * C, V99):
            d = min_separation(tau, v)
            assert activation_gap(d, v) == pytest.approx(tau, rel=1e-12)


def test_min_separation_validation():
    with pytest.raises(InvalidGeometryError):
        min_separation(0.0, V99)
    with pytest.raises(SuperluminalFrameError):
        min_separation(1e-4, 1.5 * C)


def test_first_detector_per_frame():
    assert first_detector(Frame(V99, "A"), 1000.0) == "D1"
    assert first_detector(Frame(-V99, "B"), 1000.0) == "D2"
    assert first_detector(Frame(0.0, "frame0"), 1000.0) == "simultaneous"


@pytest.mark.parametrize("beta", [0.1, 0.5, 0.9, 0.99, 0.999])
@pytest.mark.parametrize("d", [1.0, 1000.0, 2.99792458e8])
def test_boost_round_trip(beta, d):
    v = beta * C
    for e in detection_events(d):
        back = boost(boost(e, v), -v)
        assert back.t == pytest.approx(e.t, rel=1e-12)
        assert back.x == pytest.approx(e.x, rel=1e-12)


@pytest.mark.parametrize("beta", [0.1, 0.6, 0.99])
def test_interval_invariance(beta):
    v = beta * C
    events = [Event(3.3e-6, 700.0), Event(1.0, -2e8), Event(-2e-5, 40.0)]
    for e in events:
        out = boost(e, v)
        assert out.interval2() == pytest.approx(e.interval2(), rel=1e-9)
    # near-null events: absolute tolerance in m^2
    e1, _ = detection_events(1000.0)
    assert abs(boost(e1, v).interval2() - e1.interval2()) <= 1e-6 + 1e-9 * abs(e1.interval2())


@pytest.mark.parametrize("beta", [0.2, 0.99])
def test_first_detector_antisymmetry(beta):
    a = first_detector(Frame(beta * C), 1000.0)
    b = first_detector(Frame(-beta * C), 1000.0)
    assert {a, b} == {"D1", "D2"}


def test_frame_validation():
    with pytest.raises(SuperluminalFrameError):
        Frame(C, "A")
    with pytest.raises(ValueError):
        Frame(1.0, "frame0")
    with pytest.raises(ValueError):
        Frame(-1.0, "A")
    with pytest.raises(ValueError):
        Frame(1.0, "B")
    with pytest.raises(ValueError):
        Frame(1.0, "other")
    assert Frame(0.0, "frame0").v == 0.0


def test_event_validation():
    with pytest.raises(ValueError):
        Event(math.inf, 0.0)
    with pytest.raises(ValueError):
        Event(0.0, math.nan)
