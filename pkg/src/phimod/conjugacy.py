"""Twisted conjugation over F_q((u)): residuals, the successive
approximation solver, and the module isomorphism test.

Conventions (d x d matrices, phi the u -> u^p twist):

* base change by g sends A to g^-1 A phi(g);
* conj_residual(A, g) is h := A phi(g)^-1 A^-1 g, so conjugating A by
  the returned g of conj_solve(A, h, n) yields h^-1 A;
* isom_test(A, B) looks for invertible g with g A = B phi(g), i.e. a
  base change carrying B to A.

The isomorphism test rests on two bounds proved from
g = B phi(g) A^-1: any solution's valuation lies in [-T, T] for
T = floor((m_A + m_B)/(p - 1)) with m the pole bounds, and the digit-a
equations for a <= T involve only the digits in that window.  The digit
block is a finite linear system; each of its solutions extends uniquely
upward, so the block is decisive.
"""

from .errors import (BoxTooLarge, FieldMismatch, HypothesisViolated,
                     InsufficientPrecision, IterateEscaped, PhimodError,
                     ValidationError)
from .fields import FieldSpec
from .matrices import SeriesMatrix, pole_bound
from .series import DEFAULT_PRECISION, LaurentSeries, format_series


def phi_conjugate(a: SeriesMatrix, g: SeriesMatrix,
                  g_inv: SeriesMatrix | None = None) -> SeriesMatrix:
    """The base change g^-1 A phi(g)."""
    if g_inv is None:
        g_inv = g.inverse()
    return g_inv * a * g.apply_phi()


def detval_class(a: SeriesMatrix) -> int:
    """val(det A) mod (p - 1); unchanged by any base change.

    det(g^-1 A phi(g)) = det(A) phi(det g)/det(g), and the ratio has
    valuation (p - 1) val(det g).
    """
    p = a.field.p
    v = a.det().valuation()
    return v % (p - 1) if p > 2 else 0


def conj_residual(a: SeriesMatrix, g: SeriesMatrix, prec=None) -> SeriesMatrix:
    """h = A phi(g)^-1 A^-1 g; the identity iff g phi-centralizes A."""
    a._check_square()
    if a.field != g.field:
        raise FieldMismatch("matrices over different fields")
    return a * g.apply_phi().inverse(prec) * a.inverse(prec) * g


class ConjReport:
    """Solver transcript: witness plus each iterate's congruence level."""

    __slots__ = ("witness", "kappas", "iterates", "pole", "prec")

    def __init__(self, witness, kappas, iterates, pole, prec):
        self.witness = witness
        self.kappas = kappas
        self.iterates = iterates
        self.pole = pole
        self.prec = prec

    def __repr__(self):
        return f"<ConjReport levels={self.kappas} pole={self.pole}>"


def conj_solve_report(a: SeriesMatrix, h: SeriesMatrix, n: int,
                      prec=None, order="sequential") -> ConjReport:
    """Find g with conj_residual(A, g) = h modulo u^prec.

    Requires h in U_n (congruent to the identity mod u^n) with
    (p - 1) n > 2 m for m the pole bound of A; the iterates
    h_i = A phi(h_{i-1}) A^-1 then stay in U_kappa(i) for
    kappa(i) = p kappa(i-1) - 2m, and g is their descending product
    h_N ... h_1 h_0.  `order` picks the bracketing ("sequential" or
    "balanced"); the product is the same either way.
    """
    a._check_square()
    if a.field != h.field:
        raise FieldMismatch("matrices over different fields")
    if n < 1:
        raise ValidationError("congruence level n must be >= 1")
    if order not in ("sequential", "balanced"):
        raise ValidationError(f"unknown accumulation order {order!r}")
    p = a.field.p
    if prec is None:
        prec = DEFAULT_PRECISION
    m = pole_bound(a)
    if (p - 1) * n <= 2 * m:
        raise HypothesisViolated(f"need (p-1)n > 2m: n={n}, m={m}, p={p}")
    if not h.congruent_to_identity(n):
        raise HypothesisViolated(f"h is not congruent to 1 mod u^{n}")
    workprec = prec + 4 * m + 4
    a_inv = a.inverse(workprec + 2 * m)
    iterates = [h.truncate(workprec)]
    kappas = [n]
    while p * kappas[-1] - 2 * m < prec:
        nxt = (a * iterates[-1].apply_phi() * a_inv).truncate(workprec)
        level = p * kappas[-1] - 2 * m
        if not nxt.congruent_to_identity(level):
            raise IterateEscaped(f"iterate {len(kappas)} left U_{level}")
        iterates.append(nxt)
        kappas.append(level)
    factors = list(reversed(iterates))  # highest congruence level first
    if order == "sequential":
        g = factors[0]
        for f in factors[1:]:
            g = (g * f).truncate(workprec)
    else:
        layer = factors
        while len(layer) > 1:
            merged = [(layer[i] * layer[i + 1]).truncate(workprec)
                      for i in range(0, len(layer) - 1, 2)]
            if len(layer) % 2:
                merged.append(layer[-1])
            layer = merged
        g = layer[0]
    return ConjReport(g.truncate(prec), kappas, iterates, m, prec)


def conj_solve(a, h, n, prec=None, order="sequential") -> SeriesMatrix:
    return conj_solve_report(a, h, n, prec, order).witness


# ---------------------------------------------------------------------------
# isomorphism testing

class IsomReport:
    """Outcome of isom_test.

    verdict: "isomorphic", "non_isomorphic", or "undecided".
    witness: for the positive verdict, an invertible g with
             g A = B phi(g), entries certified to `window` digits.
    reason:  "witness", "det_valuation", "empty_solution_space", or
             "all_candidates_singular_to_window".
    """

    __slots__ = ("verdict", "witness", "reason", "window", "candidates_tried")

    def __init__(self, verdict, witness, reason, window, candidates_tried=0):
        self.verdict = verdict
        self.witness = witness
        self.reason = reason
        self.window = window
        self.candidates_tried = candidates_tried

    def as_dict(self):
        out = {"verdict": self.verdict, "reason": self.reason,
               "window": self.window,
               "candidates_tried": self.candidates_tried}
        if self.witness is not None:
            out["witness"] = [[format_series(e) for e in row]
                              for row in self.witness.rows]
            out["witness_equation"] = "g*A = B*phi(g)"
        return out

    def __repr__(self):
        return f"<IsomReport {self.verdict} ({self.reason})>"


def _digit_matrix(m, k):
    return [[e.coeff(k) for e in row] for row in m.rows]


def _seed_pairs(a_inv, b, d, field, t_bound, m_a, m_b):
    """Per-equation coefficient pairs (alpha, beta) on the digit block.

    An equation reads sum_u alpha[u] c_u + beta[u] phi(c_u) = 0 over the
    unknowns c_u = g_i[r][s], |i| <= T, flattened by `unk`.  They are the
    digits a <= T of g - B phi(g) A^-1 = 0.
    """
    p = field.p
    lmax = (p + 1) * t_bound + m_a
    kmax = (p + 1) * t_bound + m_b
    b_digits = {l: _digit_matrix(b, l) for l in range(-m_b, lmax + 1)}
    ainv_digits = {k: _digit_matrix(a_inv, k) for k in range(-m_a, kmax + 1)}
    a_lo = -p * t_bound - m_a - m_b

    # conv[e][x][rr][ss][y] = sum_{l+k=e} B_l[x][rr] Ainv_k[ss][y]
    conv = {}
    e_vals = sorted({a - p * i for a in range(a_lo, t_bound + 1)
                     for i in range(-t_bound, t_bound + 1)})
    for e in e_vals:
        acc = [[[[0] * d for _ in range(d)] for _ in range(d)]
               for _ in range(d)]
        nonzero = False
        for l in range(max(-m_b, e - kmax), min(lmax, e + m_a) + 1):
            bl = b_digits[l]
            ak = ainv_digits[e - l]
            for x in range(d):
                for rr in range(d):
                    c1 = bl[x][rr]
                    if not c1:
                        continue
                    tgt = acc[x][rr]
                    for ss in range(d):
                        for y in range(d):
                            c2 = ak[ss][y]
                            if c2:
                                tgt[ss][y] = field.add(tgt[ss][y],
                                                       field.mul(c1, c2))
                                nonzero = True
        if nonzero:
            conv[e] = acc

    span = 2 * t_bound + 1
    n_unk = span * d * d

    def unk(i, rr, ss):
        return ((i + t_bound) * d + rr) * d + ss

    pairs = []
    for a_exp in range(a_lo, t_bound + 1):
        for x in range(d):
            for y in range(d):
                alpha = [0] * n_unk
                beta = [0] * n_unk
                if -t_bound <= a_exp:
                    alpha[unk(a_exp, x, y)] = 1
                for i in range(-t_bound, t_bound + 1):
                    block = conv.get(a_exp - p * i)
                    if block is None:
                        continue
                    for rr in range(d):
                        for ss in range(d):
                            c = block[x][rr][ss][y]
                            if c:
                                idx = unk(i, rr, ss)
                                beta[idx] = field.sub(beta[idx], c)
                if any(alpha) or any(beta):
                    pairs.append((alpha, beta))
    return pairs, n_unk, unk


def _expand_rows(field, pairs, n_unk, linearize):
    """Scalar rows for the solver.

    Plain case: phi is trivial on coefficients, so the row is just
    alpha + beta over F_q.  Linearized case (coefficient Frobenius over
    a genuine extension): each F_q unknown splits into r components in
    F_p, c = sum_j c_j t^j, using phi(c) = sum_j c_j frob(t^j); each
    F_q equation splits into r component rows.
    """
    if not linearize:
        rows = [[field.add(x, y) for x, y in zip(alpha, beta)]
                for alpha, beta in pairs]
        return field, rows, 1
    p, r = field.p, field.r
    basis = [p ** j for j in range(r)]
    frob_basis = [field.frob(e) for e in basis]
    solver = FieldSpec(p)
    rows = []
    for alpha, beta in pairs:
        gammas = []
        for u in range(n_unk):
            per_comp = []
            for j in range(r):
                g = field.add(field.mul(alpha[u], basis[j]),
                              field.mul(beta[u], frob_basis[j]))
                per_comp.append(g)
            gammas.append(per_comp)
        for jj in range(r):
            row = []
            for u in range(n_unk):
                for j in range(r):
                    row.append((gammas[u][j] // p ** jj) % p)
            if any(row):
                rows.append(row)
    return solver, rows, r


def _nullspace(field, rows, ncols):
    """Reduced basis of the solution space of rows . x = 0."""
    ech = []
    pivots = {}
    for row in rows:
        row = row[:]
        for col, idx in pivots.items():
            c = row[col]
            if c:
                e = ech[idx]
                row = [field.sub(x, field.mul(c, y)) for x, y in zip(row, e)]
        lead = next((j for j, x in enumerate(row) if x), None)
        if lead is None:
            continue
        inv = field.inv(row[lead])
        row = [field.mul(inv, x) for x in row]
        for idx, e in enumerate(ech):
            c = e[lead]
            if c:
                ech[idx] = [field.sub(x, field.mul(c, y))
                            for x, y in zip(e, row)]
        pivots[lead] = len(ech)
        ech.append(row)
    basis = []
    for free in range(ncols):
        if free in pivots:
            continue
        v = [0] * ncols
        v[free] = 1
        for col, idx in pivots.items():
            v[col] = field.neg(ech[idx][free])
        basis.append(v)
    return basis


def _projective_coords(q, dim):
    """Canonical representatives of lines: first nonzero coordinate 1."""
    def rec(prefix, started):
        k = len(prefix)
        if k == dim:
            if started:
                yield tuple(prefix)
            return
        if not started:
            yield from rec(prefix + [0], False)
            yield from rec(prefix + [1], True)
        else:
            for c in range(q):
                yield from rec(prefix + [c], True)
    yield from rec([], False)


def _vector_to_seed(field, vec, d, t_bound, comp):
    """Unflatten a solution vector into the exact digit-block matrix."""
    p = field.p
    rows = []
    for x in range(d):
        row = []
        for y in range(d):
            pairs = []
            for i in range(-t_bound, t_bound + 1):
                base = ((i + t_bound) * d + x) * d + y
                if comp == 1:
                    c = vec[base]
                else:
                    c = sum(vec[base * comp + j] * p ** j
                            for j in range(comp))
                if c:
                    pairs.append((i, c))
            row.append(LaurentSeries.from_pairs(field, pairs, float("inf")))
        rows.append(row)
    return SeriesMatrix(field, rows)


def isom_test(a: SeriesMatrix, b: SeriesMatrix, prec=None,
              box_limit=10 ** 6) -> IsomReport:
    """Decide whether the modules with matrices A and B are isomorphic.

    Returns an IsomReport; "isomorphic" comes with a witness g solving
    g A = B phi(g), "non_isomorphic" is certified (either by the
    determinant valuation class or an empty solution space), and
    "undecided" means every candidate's determinant vanished to the
    working window.  Raises BoxTooLarge if the candidate line count
    exceeds box_limit.
    """
    a._check_square()
    b._check_square()
    if a.field != b.field:
        raise FieldMismatch("matrices over different fields")
    if a.nrows != b.nrows:
        raise ValidationError("matrices of different sizes")
    field, d, p = a.field, a.nrows, a.field.p
    if prec is None:
        prec = DEFAULT_PRECISION
    if p > 2 and detval_class(a) != detval_class(b):
        return IsomReport("non_isomorphic", None, "det_valuation", prec)
    m_a = pole_bound(a)
    m_b = pole_bound(b)
    t_bound = (m_a + m_b) // (p - 1)
    inv_window = (p + 1) * t_bound + m_a + m_b + prec + 8
    a_inv = a.inverse(inv_window)
    pairs, n_unk, _ = _seed_pairs(a_inv, b, d, field, t_bound, m_a, m_b)
    linearize = field.coeff_frobenius and field.r > 1
    solver, rows, comp = _expand_rows(field, pairs, n_unk, linearize)
    basis = _nullspace(solver, rows, n_unk * comp)
    if not basis:
        return IsomReport("non_isomorphic", None, "empty_solution_space",
                          prec)
    dim = len(basis)
    total = (solver.q ** dim - 1) // (solver.q - 1)
    if total > box_limit:
        raise BoxTooLarge(total, box_limit)
    tried = 0
    for coords in _projective_coords(solver.q, dim):
        vec = [0] * (n_unk * comp)
        for c, bas in zip(coords, basis):
            if c:
                vec = [solver.add(v, solver.mul(c, w))
                       for v, w in zip(vec, bas)]
        seed = _vector_to_seed(field, vec, d, t_bound, comp)
        g = _extend_seed(seed, a_inv, b, t_bound, m_a + m_b, prec)
        tried += 1
        det = g.det()
        if det.known_nonzero():
            _assert_witness(g, a, b)
            return IsomReport("isomorphic", g.truncate(prec), "witness",
                              prec, tried)
    return IsomReport("undecided", None, "all_candidates_singular_to_window",
                      prec, tried)


def _extend_seed(seed, a_inv, b, t_bound, m_sum, prec):
    """Fill the digits above T by iterating g <- B phi(g) A^-1.

    The error against the unique solution extending the seed starts at
    valuation T + 1 and each pass multiplies it by p and subtracts the
    pole losses, so finitely many passes certify the target window.
    """
    g = seed
    guaranteed = t_bound + 1
    p = b.field.p
    while guaranteed < prec:
        g = (b * g.apply_phi() * a_inv).truncate(prec)
        guaranteed = p * guaranteed - m_sum
    return g


def _assert_witness(g, a, b):
    res = g * a - b * g.apply_phi()
    for row in res.rows:
        for e in row:
            if e.known_nonzero():
                raise PhimodError(
                    "internal error: extended seed fails g A = B phi(g)")
