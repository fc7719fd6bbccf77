import math

import pytest
from hypothesis import given, settings, strategies as st

import oracles as orc
from phimod.errors import DivisionByZero, FieldMismatch, InsufficientPrecision
from phimod.fields import FieldSpec
from phimod.series import (DEFAULT_PRECISION, INF, LaurentSeries,
                           format_series, parse_series)

F2 = FieldSpec(2)
F3 = FieldSpec(3)
F4 = FieldSpec(2, 2, modulus=(1, 1, 1))
F4T = FieldSpec(2, 2, modulus=(1, 1, 1), coeff_frobenius=True)


def S(field, text):
    return parse_series(field, text)


def test_geometric_inverse_window():
    a = S(F2, "1 + u")
    assert format_series(a.inv(5)) == "1 + u + u^2 + u^3 + u^4 + O(u^5)"


def test_twist_examples():
    assert format_series(S(F2, "1 + u").apply_phi()) == "1 + u^2"
    assert format_series(S(F4, "t*u").apply_phi()) == "t*u^2"
    assert format_series(S(F4T, "t*u").apply_phi()) == "(t+1)*u^2"


def test_parse_format_roundtrip():
    for text in ["0", "1", "u", "u^-1 + 1 + u^2", "2*u^-3 + u + 2",
                 "u^2 + O(u^5)"]:
        s = S(F3, text)
        assert format_series(S(F3, format_series(s))) == format_series(s)
    s = S(F4, "(t+1)*u^-2 + t + u^3")
    assert S(F4, format_series(s)) == s


def test_parse_window_markers():
    s = S(F2, "1 + u + O(u^3)")
    assert s.prec == 3
    assert s.coeff(2) == 0
    with pytest.raises(InsufficientPrecision):
        s.coeff(3)


def test_monomial_inverse_is_exact():
    m = LaurentSeries.u_power(F3, -4, 2)
    inv = m.inv()
    assert inv.prec == INF
    assert format_series(inv) == "2*u^4"
    assert (m * inv).eq3(LaurentSeries.one(F3)) == "equal"


def test_inverse_precision_cap():
    a = S(F2, "u^2 + u^3 + O(u^10)")
    b = a.inv()
    # a has window length 8 past its valuation; the inverse cannot know
    # more than that, shifted to start at -2
    assert b.val == -2
    assert b.prec == 10 - 2 * 2
    assert (a * b).eq3(LaurentSeries.one(F2)) == "unknown"
    assert (a * b - LaurentSeries.one(F2)).known_nonzero() is False


def test_default_inverse_window():
    a = S(F2, "1 + u^3")
    b = a.inv()
    assert b.prec == DEFAULT_PRECISION
    assert ((a * b).eq3(LaurentSeries.one(F2))) == "unknown"


def test_mul_precision_law():
    a = S(F2, "u^-1 + 1 + O(u^4)")
    b = S(F2, "u^2 + O(u^7)")
    c = a * b
    assert c.prec == min(4 + 2, 7 + (-1))
    d = S(F2, "u^3") * a
    assert d.prec == 4 + 3


def test_phi_scales_window():
    a = S(F3, "u^-1 + 1 + O(u^4)")
    b = a.apply_phi()
    assert b.val == -3 and b.prec == 12


def test_eq3_trichotomy():
    one = LaurentSeries.one(F2)
    assert one.eq3(LaurentSeries.one(F2)) == "equal"
    assert one.eq3(S(F2, "1 + u")) == "unequal"
    assert one.eq3(S(F2, "1 + O(u^9)")) == "unknown"
    a = S(F2, "u + O(u^3)")
    assert a.eq3(S(F2, "u + u^3 + O(u^4)")) == "unknown"
    assert a.eq3(S(F2, "u + u^2")) == "unequal"


def test_certified_zero_has_no_valuation():
    z = S(F2, "O(u^5)")
    assert not z.known_nonzero()
    assert not z.is_structural_zero()
    with pytest.raises(InsufficientPrecision):
        z.valuation()
    with pytest.raises(DivisionByZero):
        LaurentSeries.zero(F2).valuation()
    with pytest.raises(InsufficientPrecision):
        z.inv()


def test_structural_zero_annihilates():
    z = LaurentSeries.zero(F2)
    fuzzy = S(F2, "1 + O(u^2)")
    assert (z * fuzzy).is_structural_zero()
    a = S(F2, "1 + u")
    assert (a - a).is_structural_zero()


def test_split_and_exact_part():
    s = S(F3, "u^-2 + 2 + u^3 + O(u^6)")
    low, high = s.split_at(1)
    assert format_series(low) == "u^-2 + 2"
    assert low.prec == INF or low.prec >= 1
    assert high.val == 3
    e = s.exact_part(4)
    assert e.prec == INF
    assert format_series(e) == "u^-2 + 2 + u^3"
    with pytest.raises(InsufficientPrecision):
        s.exact_part(7)


def test_field_mismatch_detected():
    with pytest.raises(FieldMismatch):
        LaurentSeries.one(F2) + LaurentSeries.one(F3)


def test_scale_and_shift():
    s = S(F3, "1 + 2*u")
    assert format_series(s.scale(2)) == "2 + u"
    assert format_series(s.shift(-3)) == "u^-3 + 2*u^-2"


coeff2 = st.integers(min_value=0, max_value=1)
coeff4 = st.integers(min_value=0, max_value=3)


def build(field, val, digits):
    return LaurentSeries.from_pairs(field, list(enumerate(digits, start=val)),
                                    math.inf)


@given(st.integers(-4, 4), st.lists(coeff2, min_size=0, max_size=7),
       st.integers(-4, 4), st.lists(coeff2, min_size=0, max_size=7),
       st.integers(-4, 4), st.lists(coeff2, min_size=0, max_size=7))
@settings(max_examples=120, deadline=None)
def test_exact_ring_axioms_f2(v1, c1, v2, c2, v3, c3):
    a, b, c = build(F2, v1, c1), build(F2, v2, c2), build(F2, v3, c3)
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_structural_zero()


@given(st.integers(-3, 3), st.lists(coeff4, min_size=0, max_size=5),
       st.integers(-3, 3), st.lists(coeff4, min_size=0, max_size=5))
@settings(max_examples=80, deadline=None)
def test_exact_ring_axioms_f4(v1, c1, v2, c2):
    a, b = build(F4, v1, c1), build(F4, v2, c2)
    assert a * b == b * a
    assert (a + b) * (a + b) == a * a + a * b + b * a + b * b
    pa, pb = a.apply_phi(), b.apply_phi()
    assert (a * b).apply_phi() == pa * pb
    assert (a + b).apply_phi() == pa + pb


@given(st.integers(-3, 3), st.lists(st.integers(0, 2), min_size=1, max_size=8),
       st.integers(-3, 3), st.lists(st.integers(0, 2), min_size=1, max_size=8))
@settings(max_examples=120, deadline=None)
def test_packed_convolution_matches_oracle(v1, c1, v2, c2):
    """The stride-packed bigint product agrees with schoolbook dicts."""
    a, b = build(F3, v1, c1), build(F3, v2, c2)
    OF = orc.OracleField(3)
    oa = orc.lp_from_packed(OF, orc.series_to_dict(a))
    ob = orc.lp_from_packed(OF, orc.series_to_dict(b))
    got = orc.series_to_dict(a * b)
    want = {k: OF.to_packed(v) for k, v in orc.lp_mul(OF, oa, ob).items()}
    assert got == want


@given(st.lists(st.integers(0, 4), min_size=1, max_size=6), st.integers(-3, 3))
@settings(max_examples=60, deadline=None)
def test_inverse_really_inverts(c, v):
    f = FieldSpec(5)
    s = build(f, v, c)
    if not s.known_nonzero():
        return
    t = s.inv(20)
    prod = s * t
    diff = prod - LaurentSeries.one(f)
    assert not diff.known_nonzero()
    assert diff.prec >= 15
