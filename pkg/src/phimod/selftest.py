"""Built in consistency battery.

Runs a sequence of random and curated checks across the whole library
and prints one line per check.  Returns the number of failures, so the
command line can exit nonzero when something is off.  A fixed seed makes
the battery reproducible; by default each run draws a fresh one.
"""

import os

from .conjugacy import conj_residual, conj_solve, isom_test
from .fields import FieldSpec
from .grassmannian import flat_points, kisin_points, local_model_count
from .matrices import SeriesMatrix, cartan_type, lattice_hnf, pole_bound
from .samples import random_invertible, random_series, rng
from .series import LaurentSeries
from .tree import (displacement_profile, min_displacement, standard_vertex,
                   tree_distance)


def _check_field_axioms(rnd):
    for field in (FieldSpec(2), FieldSpec(5),
                  FieldSpec(2, 2, modulus=(1, 1, 1))):
        elems = list(field.elements())
        for _ in range(40):
            a, b, c = (elems[rnd.randrange(len(elems))] for _ in range(3))
            assert field.mul(a, field.add(b, c)) == \
                field.add(field.mul(a, b), field.mul(a, c))
            if a:
                assert field.mul(a, field.inv(a)) == 1


def _check_series_inverse(rnd):
    field = FieldSpec(3)
    for _ in range(10):
        x = random_series(rnd, field, val_range=(-3, 3), digits=5)
        unit = x + LaurentSeries.u_power(field, -4)
        prod = unit * unit.inv(24)
        one = LaurentSeries.one(field)
        diff = prod - one
        assert not diff.known_nonzero()


def _check_hnf_idempotent(rnd):
    field = FieldSpec(2)
    for _ in range(6):
        a, _ = random_invertible(rnd, field, 3, diag_range=(-1, 1))
        lat = lattice_hnf(a)
        again = lattice_hnf(lat.basis)
        assert lat == again


def _check_cartan_duality(rnd):
    field = FieldSpec(3)
    for _ in range(6):
        a, ainv = random_invertible(rnd, field, 3, diag_range=(-1, 1))
        assert cartan_type(ainv) == cartan_type(a).dual()


def _check_conj_round_trip(rnd):
    field = FieldSpec(2)
    for _ in range(4):
        a, _ = random_invertible(rnd, field, 2, diag_range=(-1, 1))
        m = pole_bound(a)
        n = 2 * m + 1
        pert = [[random_series(rnd, field, val_range=(n, n + 1), digits=2)
                 for _ in range(2)] for _ in range(2)]
        h = SeriesMatrix.identity(field, 2) + SeriesMatrix(field, pert)
        g = conj_solve(a, h, n=n, prec=40)
        back = conj_residual(a, g, prec=100)
        diff = back - h
        assert not any(e.known_nonzero() and e.val < 36
                       for row in diff.rows for e in row)


def _check_isom_round_trip(rnd):
    field = FieldSpec(3)
    for _ in range(4):
        a, _ = random_invertible(rnd, field, 2, diag_range=(-1, 1))
        g, ginv = random_invertible(rnd, field, 2, diag_range=(-1, 1))
        rep = isom_test(a, g * a * ginv.apply_phi(), prec=32)
        assert rep.verdict == "isomorphic"


def _check_kisin_box(rnd):
    field = FieldSpec(2)
    a = SeriesMatrix.from_literals(field, [["u", "1"], ["0", "u"]])
    base = kisin_points(a, (2, 0))
    wide = kisin_points(a, (2, 0), box_margin=1)
    assert base.points == wide.points
    flat = flat_points(a, 1, 1)
    assert all(0 <= t[-1] and t[0] <= 1 for t in flat.types)


def _check_local_model(rnd):
    assert local_model_count(FieldSpec(2), 2, 1, 1).count == 5
    assert local_model_count(FieldSpec(3), 1, 2, 1).count == 3


def _check_tree_sandwich(rnd):
    field = FieldSpec(2)
    for _ in range(3):
        a, _ = random_invertible(rnd, field, 2, diag_range=(-1, 1), digits=2)
        x0, m_min = min_displacement(a)
        prof = displacement_profile(a, center=x0, radius=2)
        for v, _, disp in prof.rows():
            d = tree_distance(v, x0)
            assert (field.p - 1) * d - m_min <= disp
            assert disp <= (field.p + 1) * d + m_min


CHECKS = [
    ("field axioms", _check_field_axioms),
    ("series inverse", _check_series_inverse),
    ("hermite idempotence", _check_hnf_idempotent),
    ("divisor duality", _check_cartan_duality),
    ("conjugation round trip", _check_conj_round_trip),
    ("isomorphism round trip", _check_isom_round_trip),
    ("point search box stability", _check_kisin_box),
    ("local model counts", _check_local_model),
    ("displacement sandwich", _check_tree_sandwich),
]


def run_selftest(seed=None, out=print):
    if seed is None:
        seed = int.from_bytes(os.urandom(4), "big")
    out(f"selftest seed {seed}")
    failures = 0
    for name, check in CHECKS:
        try:
            check(rng(seed))
        except Exception as exc:  # noqa: BLE001  - report and keep going
            failures += 1
            out(f"FAIL {name}: {exc!r}")
        else:
            out(f"ok   {name}")
    out(f"{len(CHECKS) - failures}/{len(CHECKS)} checks passed")
    return failures
