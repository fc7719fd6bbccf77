import pytest

import oracles as orc
from phimod.errors import InsufficientPrecision, Singular, ValidationError
from phimod.fields import FieldSpec
from phimod.matrices import (Coweight, Lattice, SeriesMatrix, cartan_type,
                             lattice_hnf, pole_bound, relative_position)
from phimod.samples import random_invertible, rng
from phimod.series import LaurentSeries, parse_series

F2 = FieldSpec(2)
F3 = FieldSpec(3)
F4 = FieldSpec(2, 2, modulus=(1, 1, 1))


def M(field, grid):
    return SeriesMatrix.from_literals(field, grid)


def oracle_field(field):
    return orc.OracleField(field.p, field.r,
                           field.modulus if field.r > 1 else None)


def oracle_type(field, mat):
    OF = oracle_field(field)
    return orc.oracle_divisor_type(OF, orc.matrix_to_dicts(OF, mat))


def test_cartan_type_examples():
    assert cartan_type(M(F2, [["u^2", "0"], ["0", "u^-1"]])).components == (2, -1)
    assert cartan_type(M(F2, [["0", "u"], ["u^3", "0"]])).components == (3, 1)
    assert cartan_type(M(F2, [["1", "1"], ["0", "u^2"]])).components == (2, 0)
    assert cartan_type(M(F3, [["u^-2"]])).components == (-2,)


@pytest.mark.parametrize("field,d,seed", [
    (F2, 2, 11), (F2, 3, 12), (F3, 2, 13), (F3, 3, 14), (F4, 2, 15),
    (F2, 4, 16), (F3, 4, 17),
])
def test_cartan_type_matches_oracle(field, d, seed):
    rnd = rng(seed)
    for _ in range(12):
        a, _ = random_invertible(rnd, field, d)
        assert cartan_type(a).components == oracle_type(field, a)


def test_cartan_type_of_inverse_is_dual():
    rnd = rng(21)
    for _ in range(15):
        a, ainv = random_invertible(rnd, F3, 3)
        assert cartan_type(ainv) == cartan_type(a).dual()


def test_determinant_matches_oracle():
    rnd = rng(31)
    OF = orc.OracleField(3)
    for _ in range(10):
        a, _ = random_invertible(rnd, F3, 3)
        want = orc.mat_det(OF, orc.matrix_to_dicts(OF, a))
        got = orc.lp_from_packed(OF, orc.series_to_dict(a.det()))
        assert got == want


def test_inverse_round_trip():
    rnd = rng(41)
    ident = SeriesMatrix.identity(F2, 3)
    for _ in range(8):
        a, ainv = random_invertible(rnd, F2, 3)
        assert (a * ainv).eq3(ident) == "equal"
        b = a.inverse()
        assert (a * b).eq3(ident) in ("equal", "unknown")
        assert (a * b - ident).min_val_lower_bound() > 10


def test_triangular_monomial_inverse_is_exact():
    t = M(F2, [["u^2", "1 + u"], ["0", "u^-1"]])
    ti = t.inverse()
    assert all(e.prec == float("inf") for row in ti.rows for e in row)
    assert (t * ti).eq3(SeriesMatrix.identity(F2, 2)) == "equal"


def test_singular_matrix_rejected():
    with pytest.raises(Singular):
        cartan_type(M(F2, [["1", "1"], ["1", "1"]]))
    with pytest.raises(Singular):
        M(F2, [["1", "1"], ["1", "1"]]).inverse()


def test_cartan_needs_certified_entries():
    fuzzy = parse_series(F2, "O(u^1)")
    exact = parse_series(F2, "u^2")
    m = SeriesMatrix(F2, [[exact, fuzzy], [fuzzy, exact]])
    with pytest.raises(InsufficientPrecision):
        cartan_type(m)


def test_coweight_rules():
    w = Coweight((3, 1, 0))
    assert w.total() == 4
    assert w.dual().components == (0, -1, -3)
    assert w.dual().dual() == w
    assert Coweight((1, 0)).leq(Coweight((2, -1)))
    assert not Coweight((2, -1)).leq(Coweight((1, 0)))
    assert not Coweight((1, 1)).leq(Coweight((1, 0)))  # totals differ
    assert (Coweight((1, 0)) + Coweight((2, 1))).components == (3, 1)
    with pytest.raises(ValidationError):
        Coweight((0, 1))


def test_hnf_canonical_hand_example():
    gens = M(F2, [["u^-1", "0"], ["1", "u"]])
    lat = lattice_hnf(gens)
    assert lat.to_literals() == [["1", "u^-1"], ["0", "1"]]
    assert lat.diag == (0, 0)


def test_hnf_idempotent_and_shuffle_invariant():
    rnd = rng(51)
    for field in (F2, F3, F4):
        for _ in range(10):
            g, _ = random_invertible(rnd, field, 2)
            lat = lattice_hnf(g)
            assert lattice_hnf(lat.basis) == lat
            swapped = SeriesMatrix(field, [list(reversed(r)) for r in g.rows])
            assert lattice_hnf(swapped) == lat


def test_hnf_invariant_under_integral_recombination():
    rnd = rng(61)
    for _ in range(10):
        g, _ = random_invertible(rnd, F3, 3)
        lat = lattice_hnf(g)
        u_mix, _ = random_invertible(rnd, F3, 3, diag_range=(0, 0))
        assert lattice_hnf(g * u_mix) == lat


def test_hnf_redundant_generators():
    g = M(F2, [["u^-1", "0", "u^-1"], ["1", "u", "1 + u"]])
    assert lattice_hnf(g) == lattice_hnf(M(F2, [["u^-1", "0"], ["1", "u"]]))


def test_hnf_rank_deficient():
    with pytest.raises(Singular):
        lattice_hnf(M(F2, [["1", "u"], ["0", "0"]]).transpose())
    with pytest.raises(Singular):
        lattice_hnf(M(F2, [["1"], ["1"]]))


def test_hnf_honest_about_truncation():
    # a window too short to pin down the off-diagonal digits must refuse
    # rather than guess; inexact input disables the automatic retries
    g = M(F2, [["u", "1 + O(u^1)"], ["0", "1"]])
    with pytest.raises(InsufficientPrecision):
        lattice_hnf(g)


def test_hnf_unit_tail_is_irrelevant():
    # a diagonal unit spans the same lattice whatever its unknown tail,
    # and the determination bound is sharp enough to certify that
    g = M(F2, [["1 + O(u^2)", "0"], ["0", "1"]])
    assert lattice_hnf(g) == Lattice.standard(F2, 2)


def test_lattice_validation():
    with pytest.raises(ValidationError):
        Lattice(M(F2, [["u", "u"], ["0", "1"]]))  # offdiag not below u^1
    with pytest.raises(ValidationError):
        Lattice(M(F2, [["1 + u", "0"], ["0", "1"]]))  # diagonal not monomial
    lat = Lattice(M(F2, [["u", "1 + u^-1"], ["0", "u^-2"]]))
    assert lat.diag == (1, -2)
    assert lat.det_val() == -1


def test_containment_matches_relative_position_sign():
    rnd = rng(71)
    L0 = Lattice.standard(F3, 2)
    for _ in range(25):
        g, _ = random_invertible(rnd, F3, 2)
        lat = lattice_hnf(g)
        rel = relative_position(L0, lat)
        assert L0.contains(lat) == (min(rel.components) >= 0)
        assert lat.contains(L0) == (max(rel.components) <= 0)


def test_relative_position_laws():
    rnd = rng(81)
    L0 = Lattice.standard(F2, 2)
    assert relative_position(L0, L0).components == (0, 0)
    for _ in range(12):
        g1, _ = random_invertible(rnd, F2, 2)
        g2, _ = random_invertible(rnd, F2, 2)
        a, b = lattice_hnf(g1), lattice_hnf(g2)
        assert relative_position(a, b) == relative_position(b, a).dual()
        common, _ = random_invertible(rnd, F2, 2)
        a2 = lattice_hnf(common * a.basis)
        b2 = lattice_hnf(common * b.basis)
        assert relative_position(a2, b2) == relative_position(a, b)


def test_scaling_shifts_position():
    L0 = Lattice.standard(F2, 3)
    assert relative_position(L0, L0.scale(2)).components == (2, 2, 2)
    assert L0.contains(L0.scale(1)) and not L0.scale(1).contains(L0)


def test_pole_bound():
    a, ainv = random_invertible(rng(91), F2, 2, diag_range=(-2, 2))
    m = pole_bound(a, ainv)
    assert m >= 0
    for mat in (a, ainv):
        for row in mat.rows:
            for e in row:
                assert not e.known_nonzero() or e.val >= -m
