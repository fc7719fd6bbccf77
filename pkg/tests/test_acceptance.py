"""Acceptance gate: nine scripted checks over the whole library.

Each criterion is one test that prints a single pass line on success;
run with `pytest tests/test_acceptance.py -v -s` to see them.  The two
criteria with stated time budgets enforce them with asserts.
"""

import time

from oracles import (OracleField, matrix_to_dicts, oracle_flat_points_d2,
                     oracle_kisin_points_d2, oracle_line_count_d2,
                     oracle_submodule_count)
from phimod.conjugacy import conj_residual, conj_solve_report, isom_test
from phimod.fields import FieldSpec, find_irreducible
from phimod.grassmannian import flat_points, kisin_points, local_model_count
from phimod.matrices import (SeriesMatrix, lattice_hnf, pole_bound,
                             relative_position)
from phimod.samples import random_invertible, random_series, rng
from phimod.series import parse_series
from phimod.tree import (ball, classify, displacement_profile,
                         frobenius_vertex, rank_one_subs, standard_vertex,
                         tree_distance)

F2 = FieldSpec(2)
F3 = FieldSpec(3)
F5 = FieldSpec(5)

M = SeriesMatrix.from_literals


def report(num, detail):
    print(f"criterion {num}: PASS  ({detail})")


def random_instance(rnd, field, d, prec=64):
    """(a, m, n, h) with h a known-solvable residual target in U_n."""
    a, ainv = random_invertible(rnd, field, d, diag_range=(-2, 2), digits=3,
                                density=0.6)
    m = pole_bound(a, ainv)
    n = 2 * m // (field.p - 1) + 1
    rows = [[random_series(rnd, field, (n, n + 2), 3) for _ in range(d)]
            for _ in range(d)]
    g = SeriesMatrix.identity(field, d) + SeriesMatrix(field, rows)
    h = conj_residual(a, g, prec=prec)
    return a, m, n, h


def assert_window_zero(mat):
    for row in mat.rows:
        for e in row:
            assert not e.known_nonzero()


def canonical_triples(rep):
    """d=2 points as (a, b, f digit items), the oracle's exchange format."""
    out = []
    for lat in rep.points:
        f = lat.basis.rows[0][1]
        if f.known_nonzero():
            items = tuple(sorted((f.val + k, c)
                                 for k, c in enumerate(f.coeffs) if c))
        else:
            items = ()
        out.append((lat.diag[0], lat.diag[1], items))
    return tuple(sorted(out))


def test_criterion_1_solver_certificates():
    """200 random solves: witness residual matches, iterates stay in
    their congruence subgroups, all inside the 10 second budget."""
    rnd = rng(1001)
    fields = [F2, F3, F5]
    start = time.perf_counter()
    for i in range(200):
        field = fields[i % 3]
        d = 1 + i % 3
        a, m, n, h = random_instance(rnd, field, d)
        assert m <= 2
        rep = conj_solve_report(a, h, n, prec=64)
        for it, kappa in zip(rep.iterates, rep.kappas):
            assert it.congruent_to_identity(min(kappa, 60))
        diff = conj_residual(a, rep.witness, prec=64) - h
        assert_window_zero(diff)
        for row in diff.rows:
            for e in row:
                assert e.prec >= 64 - 4 * m
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0
    report(1, f"200 instances, p in 2/3/5, d up to 3, {elapsed:.2f}s")


def test_criterion_2_order_determinism():
    """Sequential and balanced accumulation give byte-identical
    witnesses, and solving the solver's own residual reproduces it."""
    rnd = rng(1002)
    fields = [F2, F3]
    for i in range(100):
        field = fields[i % 2]
        d = 1 + i % 3
        a, m, n, h = random_instance(rnd, field, d)
        seq = conj_solve_report(a, h, n, prec=48, order="sequential")
        bal = conj_solve_report(a, h, n, prec=48, order="balanced")
        assert seq.witness.to_literals() == bal.witness.to_literals()
        assert seq.kappas == bal.kappas
        diff = conj_residual(a, seq.witness, prec=48) - h
        assert_window_zero(diff)
    report(2, "100 instances, identical witnesses across orders")


def test_criterion_3_point_counts():
    """Frozen counts for the named search problems, each cross-checked
    against the exhaustive oracle two digits past the library's box."""
    start = time.perf_counter()
    scalar = M(F2, [["u", "0"], ["0", "u"]])
    rep = kisin_points(scalar, (1, 1))
    assert rep.count == 1
    F = OracleField(2)
    orc = oracle_kisin_points_d2(F, matrix_to_dicts(F, scalar), False,
                                 (1, 1), rep.box + 2)
    assert canonical_triples(rep) == orc

    du = M(F2, [["u", "0"], ["0", "1"]])
    rep = kisin_points(du, (1, 0))
    assert rep.count == 3
    orc = oracle_kisin_points_d2(F, matrix_to_dicts(F, du), False,
                                 (1, 0), rep.box + 2)
    assert canonical_triples(rep) == orc

    rep4 = kisin_points(du, (1, 0), ext=2)
    assert rep4.count == 5
    mod = find_irreducible(2, 2)
    F4 = FieldSpec(2, 2, modulus=mod)
    OF4 = OracleField(2, 2, mod)
    du4 = M(F4, [["u", "0"], ["0", "1"]])
    orc4 = oracle_kisin_points_d2(OF4, matrix_to_dicts(OF4, du4), False,
                                  (1, 0), rep4.box + 2)
    assert canonical_triples(rep4) == orc4

    repf = flat_points(du, 1, 1)
    assert repf.count == 5
    orcf = oracle_flat_points_d2(F, matrix_to_dicts(F, du), False, 1, 1,
                                 repf.box + 2)
    assert canonical_triples(repf) == orcf
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    report(3, f"counts 1/3/5/5 vs exhaustive oracle, {elapsed:.1f}s")


def test_criterion_4_box_soundness():
    """Enlarging the search box by two digits changes no member set."""
    rnd = rng(1004)
    fields = [F2, F3]
    kept = 0
    tries = 0
    while kept < 20:
        tries += 1
        assert tries < 400
        field = fields[tries % 2]
        a, _ = random_invertible(rnd, field, 2, diag_range=(0, 1), digits=2,
                                 density=0.5)
        v_a = a.det().valuation()
        n1 = v_a // 2 + 1
        nu = (max(n1, v_a - n1), min(n1, v_a - n1))
        rep = kisin_points(a, nu)
        if rep.box > 2:
            continue
        wide = kisin_points(a, nu, box_margin=2)
        assert [l.to_literals() for l in rep.points] == \
               [l.to_literals() for l in wide.points]
        assert wide.searched >= rep.searched
        kept += 1
    report(4, f"20 random searches stable under box margin 2 ({tries} draws)")


def test_criterion_5_metric_laws():
    """phi scales tree distance by p on radius 3 balls, and relative
    position is antisymmetric with a triangle bound on 500 triples."""
    for field in (F2, F3):
        verts, _, _ = ball(standard_vertex(field), 3)
        for i in range(len(verts)):
            fi = frobenius_vertex(verts[i])
            for j in range(i + 1, len(verts)):
                d0 = tree_distance(verts[i], verts[j])
                assert tree_distance(fi, frobenius_vertex(verts[j])) == \
                    field.p * d0

    rnd = rng(1005)
    for i in range(500):
        field = (F2, F3)[i % 2]
        lats = []
        for _ in range(3):
            mat, _ = random_invertible(rnd, field, 3, diag_range=(-2, 2),
                                       digits=2, density=0.5)
            lats.append(lattice_hnf(mat))
        l1, l2, l3 = lats
        r12 = list(relative_position(l1, l2))
        r21 = list(relative_position(l2, l1))
        assert r21 == [-c for c in reversed(r12)]
        sup = lambda r: r[0] - r[-1]
        assert sup(list(relative_position(l1, l3))) <= \
            sup(r12) + sup(list(relative_position(l2, l3)))
    report(5, "scaling on radius 3 balls, 500 random rank 3 triples")


DISPLACEMENT_CASES = [
    (F2, [["u", "0"], ["0", "1"]]),
    (F2, [["0", "1"], ["u", "0"]]),
    (F2, [["1", "u^-1"], ["0", "1"]]),
    (F2, [["u", "0"], ["0", "u"]]),
    (F2, [["1", "0"], ["0", "1"]]),
]


def test_criterion_6_displacement_laws():
    """Sandwich law around the displacement minimum: the universal form
    with slack m_min everywhere, the strict form when m_min = 0, and
    the radial upper branch for modules with no stable line."""
    cases = list(DISPLACEMENT_CASES)
    cases.append((F3, [["0", "1"], ["u", "0"]]))
    rnd = rng(1006)
    for i in range(20):
        field = (F2, F3)[i % 2]
        a, _ = random_invertible(rnd, field, 2, diag_range=(-1, 1), digits=3,
                                 density=0.6)
        cases.append((field, a.to_literals()))
    radial_seen = 0
    for field, grid in cases:
        a = M(field, grid)
        p = field.p
        prof = displacement_profile(a)
        x0, mmin = prof.minimum()
        for v, disp in zip(prof.vertices, prof.displacements):
            dist = tree_distance(v, x0)
            assert (p - 1) * dist - mmin <= disp <= (p + 1) * dist + mmin
            if mmin == 0:
                assert (p - 1) * dist <= disp <= (p + 1) * dist
        if classify(a).verdict == "Simple":
            radial_seen += 1
            for v, disp in zip(prof.vertices, prof.displacements):
                if disp >= p + 1:
                    dist = tree_distance(v, x0)
                    assert abs(disp - (p + 1) * dist) <= mmin
    assert radial_seen >= 2
    report(6, f"{len(cases)} matrices, radial law on {radial_seen} simple ones")


def test_criterion_7_isomorphism_round_trips():
    """Random twisted conjugates test isomorphic with a certified
    witness; the two named small examples behave as frozen."""
    rnd = rng(1007)
    for i in range(100):
        field = (F2, F3)[i % 2]
        a, _ = random_invertible(rnd, field, 2, diag_range=(-1, 1), digits=2,
                                 density=0.6)
        g, _ = random_invertible(rnd, field, 2, diag_range=(-1, 1), digits=2,
                                 density=0.6)
        b = (g * a) * g.apply_phi().inverse()
        rep = isom_test(a, b)
        assert rep.verdict == "isomorphic"
        w = rep.witness
        assert_window_zero(w * a - b * w.apply_phi())

    rep = isom_test(M(F2, [["1 + u", "0"], ["0", "1"]]),
                    SeriesMatrix.identity(F2, 2))
    assert rep.verdict == "isomorphic"
    target = parse_series(F2, "1 + u")
    hit = any(not (e - target).known_nonzero()
              for row in rep.witness.rows for e in row)
    assert hit
    rep = isom_test(M(F3, [["u", "0"], ["0", "1"]]),
                    SeriesMatrix.identity(F3, 2))
    assert rep.verdict == "non_isomorphic"
    assert rep.reason == "det_valuation"
    report(7, "100 conjugation round trips, both named examples frozen")


CLASSIFY_CASES = [
    (F2, [["u", "0"], ["0", "1"]], "Decomposable"),
    (F2, [["0", "1"], ["u", "0"]], "Simple"),
    (F2, [["1", "u^-1"], ["0", "1"]], "A3/B1"),
    (F2, [["u", "0"], ["0", "u"]], "Decomposable"),
    (F2, [["1", "0"], ["0", "1"]], "Decomposable"),
    (F2, [["1", "1"], ["0", "1"]], "NonSplit"),
    (F2, [["0", "1"], ["1", "1"]], "NotAbsolutelySimple"),
]


def test_criterion_8_classification():
    """Verdicts match an exhaustive independent stable-line count."""
    for field, grid, expected in CLASSIFY_CASES:
        a = M(field, grid)
        rep = classify(a)
        assert rep.verdict == expected, (grid, rep.verdict)
        F = OracleField(field.p)
        orc = oracle_line_count_d2(F, matrix_to_dicts(F, a), False)
        assert rank_one_subs(a).count == orc
        mmin = rep.minimum
        if mmin > 0:
            mapped = {0: "Simple", 1: "A3/B1"}.get(orc, "Decomposable")
        else:
            mapped = {0: "NotAbsolutelySimple", 1: "NonSplit"}.get(
                orc, "Decomposable")
        assert mapped == expected
    report(8, f"{len(CLASSIFY_CASES)} curated modules vs line oracle")


def test_criterion_9_local_model_counts():
    """Lattice counts of the bounded local models against the
    exhaustive submodule oracle and the rank 1 chain law."""
    rep = local_model_count(F2, 2, 1, 1)
    assert rep.count == 5 == oracle_submodule_count(OracleField(2), 2, 1)
    rep = local_model_count(F2, 2, 2, 1)
    assert rep.count == 15 == oracle_submodule_count(OracleField(2), 2, 2)
    for field, e, h in [(F2, 1, 1), (F3, 2, 1), (F2, 3, 1), (F5, 1, 2)]:
        rep = local_model_count(field, 1, e, h)
        assert rep.count == e * h + 1
        assert rep.count == oracle_submodule_count(
            OracleField(field.p), 1, e * h)
    report(9, "counts 5 and 15, rank 1 chain law at four sizes")
