import pytest
from hypothesis import given, strategies as st

from surgery_cert.slopes import (IDENTITY_FRAME, LONGITUDE, MERIDIAN, FdtcData, FramingChange, TorusSlope,
                                 change_frame, degeneracy_from_fdtc, delta, format_slope, intersection,
                                 parse_rational, parse_slope)
from oracles import expand_intersection

coords = st.integers(-10**6, 10**6)
slopes = st.tuples(coords, coords).filter(lambda t: t != (0, 0)).map(lambda t: TorusSlope(*t))
unimodular = st.sampled_from([
    ((1, 0), (0, 1)), ((-1, 2), (0, -1)), ((1, 2), (0, 1)), ((0, 1), (1, 0)), ((2, 1), (1, 1)),
    ((1, 0), (0, -1)), ((3, 5), (1, 2)), ((-1, 0), (0, 1)),
]).map(FramingChange)


def test_longitude_meets_meridian_positively():
    assert intersection(LONGITUDE, MERIDIAN) == 1


def test_self_intersection_vanishes():
    assert intersection(TorusSlope(3, 5), TorusSlope(3, 5)) == 0


def test_birkhoff_case_zero_instance():
    a, b = TorusSlope(7, 2), TorusSlope(2, -1)
    assert intersection(a, b) == 11 == 7 + 2 * 2
    assert intersection(a, b) == expand_intersection((7, 2), (2, -1))


@pytest.mark.parametrize("d, r, expected", [
    ((1, 0), (1, 0), 0),
    ((-6, 1), (33, 4), 57),
    ((2, 0), (33, 4), 8),
])
def test_delta_examples(d, r, expected):
    assert delta(TorusSlope(*d), TorusSlope(*r)) == expected


def test_zero_pair_rejected():
    with pytest.raises(ValueError):
        TorusSlope(0, 0)


def test_multiplicity_and_primitive_part():
    s = TorusSlope(8, -2)
    assert s.multiplicity == 2
    assert s.primitive_part() == TorusSlope(4, -1)


def test_identity_frame():
    assert change_frame(TorusSlope(5, 7), IDENTITY_FRAME) == (TorusSlope(5, 7), 1)


def test_frame_zero_sends_4mu_minus_lam_to_degeneracy():
    f = FramingChange.from_images(TorusSlope(-1, 0), TorusSlope(2, -1))
    image, sign = change_frame(TorusSlope(4, -1), f)
    assert image == TorusSlope(-6, 1)
    assert sign == 1


def test_frame_two_longitude():
    f = FramingChange.from_images(TorusSlope(1, 0), TorusSlope(2, 1))
    assert change_frame(LONGITUDE, f)[0] == TorusSlope(2, 1)


def test_non_unimodular_frame_rejected():
    with pytest.raises(ValueError):
        FramingChange(((2, 0), (0, 1)))


def test_frame_inverse_and_compose():
    f = FramingChange(((3, 5), (1, 2)))
    assert f.compose(f.inverse()) == IDENTITY_FRAME
    s = TorusSlope(4, -9)
    assert change_frame(change_frame(s, f)[0], f.inverse())[0] == s


@pytest.mark.parametrize("fd, expected, mult", [
    (FdtcData(5, 0), TorusSlope(5, 0), 5),
    (FdtcData(4, -1), TorusSlope(4, -1), 1),
    (FdtcData(8, -2), TorusSlope(8, -2), 2),
])
def test_degeneracy_from_fdtc(fd, expected, mult):
    d = degeneracy_from_fdtc(fd)
    assert d == expected
    assert d.multiplicity == mult


def test_fdtc_needs_a_prong():
    with pytest.raises(ValueError):
        FdtcData(0, 1)


@given(slopes, slopes)
def test_antisymmetry(a, b):
    assert intersection(a, b) == -intersection(b, a)


@given(slopes, slopes, slopes)
def test_bilinearity(a, b, c):
    if (a.p + c.p, a.q + c.q) == (0, 0):
        return
    assert intersection(a + c, b) == intersection(a, b) + intersection(c, b)


@given(slopes, slopes)
def test_matches_expanded_pairing(a, b):
    assert intersection(a, b) == expand_intersection((a.p, a.q), (b.p, b.q))


@given(slopes, slopes, unimodular)
def test_frame_changes_scale_pairing_by_det(a, b, f):
    fa, sa = change_frame(a, f)
    fb, _ = change_frame(b, f)
    assert intersection(fa, fb) == sa * intersection(a, b)


@given(slopes, slopes)
def test_delta_ignores_orientation(a, b):
    assert delta(a, b) == delta(-a, b) == delta(a, -b) == delta(-a, -b)


@pytest.mark.parametrize("text, expected", [("5/4", (5, 4)), ("3", (3, 1)), ("-7/2", (-7, 2)), ("7/-2", (-7, 2))])
def test_parse_slope(text, expected):
    assert parse_slope(text) == TorusSlope(*expected)


def test_inf_rejected():
    with pytest.raises(ValueError):
        parse_slope("inf")
    with pytest.raises(ValueError):
        parse_rational("inf")


def test_format_canonical():
    assert format_slope(TorusSlope(-3, -4)) == "3/4"
    assert format_slope(TorusSlope(1, 0)) == "inf"
