"""Finite searches for lattices with constrained semilinear type.

For an invertible matrix A over F_q((u)) and a full-rank lattice L with
column Hermite basis B, the map x -> A*phi(x) carries L to the lattice
spanned by A*phi(B), and the elementary divisor type of

    C = B^(-1) * A * phi(B)

measures their relative position.  The enumerators here list, over a
chosen coefficient field, the lattices whose type satisfies a membership
condition:

  * kisin_points: type equal to a fixed coweight nu (open condition) or
    dominated by nu (closed condition),
  * flat_points: every type entry inside the window [0, e*h],
  * local_model_count: no type condition at all, just the containment
    u^(e*h) * L0 <= L <= L0 around the standard lattice L0.

Each search is finite for two reasons.  First, valuations pin down the
basis determinant: val det C = val det A + (p - 1) * val det B, so a
prescribed type total leaves a single choice of val det B (or none).
Second, a triangle inequality confines the variety to a box, see
box_bound below.  The box is scanned exhaustively and every candidate is
tested by computing its type, so the only way the enumeration can be
wrong is the box being too small, not a filtering shortcut.
"""

from itertools import product

from .errors import BoxTooLarge, InsufficientPrecision, Singular, ValidationError
from .fields import FieldSpec
from .matrices import (Coweight, Lattice, SeriesMatrix, cartan_type,
                       relative_position)
from .series import INF, LaurentSeries

DEFAULT_BOX_LIMIT = 10 ** 7


def lattice_type(a_mat: SeriesMatrix, lat: Lattice) -> Coweight:
    """Elementary divisor type of A*phi acting on the lattice."""
    if a_mat.field != lat.field:
        raise ValidationError("matrix and lattice use different fields")
    b = lat.basis
    return cartan_type(b.inverse() * a_mat * b.apply_phi())


def box_bound(m: int, delta: int, p: int) -> int:
    """Sup-distance from the standard lattice L0 reachable by members.

    Write k for the largest absolute elementary divisor of a member L
    against L0, i.e. the sup metric d(L, L0).  Multiplication by a fixed
    matrix preserves relative position and phi scales it by p, so
    d(A*phi(L), A*phi(L0)) = p*k.  The membership condition bounds
    d(L, A*phi(L)) by m, and d(L0, A*L0) is delta, the largest absolute
    divisor of A itself.  The triangle inequality then gives
    p*k <= m + k + delta, so k <= (m + delta) / (p - 1).
    """
    return (m + delta) // (p - 1)


def _embed_matrix(a: SeriesMatrix, big: FieldSpec) -> SeriesMatrix:
    table = a.field.embed_into(big)
    rows = []
    for row in a.rows:
        rows.append([LaurentSeries(big, e.val, [table[c] for c in e.coeffs],
                                   e.prec) for e in row])
    return SeriesMatrix(big, rows)


def _det_valuation(a_mat: SeriesMatrix) -> int:
    det = a_mat.det()
    if det.known_nonzero():
        return det.valuation()
    if det.is_structural_zero():
        raise Singular("the acting matrix is singular")
    raise InsufficientPrecision(
        "determinant valuation is not determined by the given window")


def _diag_tuples(lo, hi, d, total):
    if d == 1:
        if lo <= total <= hi:
            yield (total,)
        return
    for a in range(lo, hi + 1):
        rest = total - a
        if rest < lo * (d - 1) or rest > hi * (d - 1):
            continue
        for tail in _diag_tuples(lo, hi, d - 1, rest):
            yield (a,) + tail


def _slots(diag, floor):
    out = []
    for j in range(1, len(diag)):
        for i in range(j):
            for exp in range(floor, diag[i]):
                out.append((i, j, exp))
    return out


def _tuple_floor(diag_total, floor, box_hi, d):
    # Members also satisfy u^box_hi * L0 <= L.  For d = 2 that reads
    # val(f) >= a + b - box_hi on the single off-diagonal entry, which
    # tightens the digit window; the inverse of a larger triangular
    # basis mixes entries, so past d = 2 only the ambient floor is safe.
    if d == 2:
        return max(floor, diag_total - box_hi)
    return floor


def _count_assignments(q, diag_iter, floor_fn):
    total = 0
    for diag in diag_iter:
        nslots = len(_slots(diag, floor_fn(diag)))
        total += q ** nslots
    return total


class PointReport:
    """Outcome of one box scan: the members and how hard the search was."""

    __slots__ = ("field", "points", "types", "searched", "box")

    def __init__(self, field, points, types, searched, box):
        order = sorted(range(len(points)), key=lambda i: points[i].sort_key())
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "points", tuple(points[i] for i in order))
        object.__setattr__(self, "types", tuple(types[i] for i in order))
        object.__setattr__(self, "searched", searched)
        object.__setattr__(self, "box", box)

    def __setattr__(self, *a):
        raise AttributeError("PointReport is immutable")

    @property
    def count(self):
        return len(self.points)

    def as_dict(self):
        return {
            "count": self.count,
            "box": self.box,
            "searched": self.searched,
            "points": [lat.to_literals() for lat in self.points],
            "types": [list(t) for t in self.types],
        }

    def __repr__(self):
        return f"<PointReport count={self.count} searched={self.searched}>"


def _scan(a_work, diag_plan, box, keep, box_limit):
    """Run the box scan.  diag_plan is a list of (diag_iterable, floor_fn)."""
    field = a_work.field
    q = field.q
    estimate = 0
    staged = []
    for diag_iter, floor_fn in diag_plan:
        diags = list(diag_iter)
        estimate += _count_assignments(q, diags, floor_fn)
        staged.append((diags, floor_fn))
    if estimate > box_limit:
        raise BoxTooLarge(estimate, box_limit)
    elements = list(field.elements())
    points, types = [], []
    searched = 0
    for diags, floor_fn in staged:
        for diag in diags:
            slots = _slots(diag, floor_fn(diag))
            for combo in product(elements, repeat=len(slots)):
                searched += 1
                offdiag = {}
                for (i, j, exp), c in zip(slots, combo):
                    if c:
                        offdiag.setdefault((i, j), []).append((exp, c))
                pairs = {key: LaurentSeries.from_pairs(field, val)
                         for key, val in offdiag.items()}
                lat = Lattice.from_diag_pairs(field, diag, pairs)
                t = lattice_type(a_work, lat)
                if keep(lat, t):
                    points.append(lat)
                    types.append(t)
    return PointReport(field, points, types, searched, box)


def kisin_points(a_mat: SeriesMatrix, nu, mode: str = "closed", ext: int = 1,
                 box_limit: int = DEFAULT_BOX_LIMIT,
                 box_margin: int = 0) -> PointReport:
    """Lattices whose type is nu (open) or dominated by nu (closed).

    ext enlarges the coefficient field to an extension of that degree
    before scanning, so counts over bigger residue fields come from the
    same box.  box_margin widens the search box past the proved bound;
    the result must not change, which makes it a cheap self check.
    Raises BoxTooLarge rather than starting a scan with more than
    box_limit candidates.
    """
    nu = nu if isinstance(nu, Coweight) else Coweight(nu)
    if mode not in ("closed", "open"):
        raise ValidationError(f"unknown membership mode {mode!r}")
    a_mat._check_square()
    if len(nu) != a_mat.nrows:
        raise ValidationError("coweight length must match the matrix size")
    field = a_mat.field
    p = field.p
    v_a = _det_valuation(a_mat)
    work = field.extension(ext)
    a_work = _embed_matrix(a_mat, work) if ext > 1 else a_mat
    delta = max(abs(c) for c in cartan_type(a_mat))
    m = max(abs(nu[0]), abs(nu[-1]))
    box = box_bound(m, delta, p) + box_margin
    if (nu.total() - v_a) % (p - 1):
        return PointReport(work, [], [], 0, box)
    v_star = (nu.total() - v_a) // (p - 1)
    d = a_mat.nrows

    def floor_fn(diag):
        return _tuple_floor(v_star, -box, box, d)

    plan = [(_diag_tuples(-box, box, d, v_star), floor_fn)]
    if mode == "closed":
        keep = lambda lat, t: t.leq(nu)
    else:
        keep = lambda lat, t: t == nu
    return _scan(a_work, plan, box, keep, box_limit)


def flat_points(a_mat: SeriesMatrix, e: int, h: int, ext: int = 1,
                box_limit: int = DEFAULT_BOX_LIMIT,
                box_margin: int = 0) -> PointReport:
    """Lattices whose type lies entirely inside the window [0, e*h].

    Such a lattice satisfies u^(e*h) * L <= A*phi(L) <= L, the integral
    condition of effective height at most e*h.  Type totals then range
    over 0 .. d*e*h and each admissible total fixes the basis
    determinant as in kisin_points.
    """
    if e < 1 or h < 1:
        raise ValidationError("e and h must be positive")
    a_mat._check_square()
    field = a_mat.field
    p = field.p
    d = a_mat.nrows
    v_a = _det_valuation(a_mat)
    work = field.extension(ext)
    a_work = _embed_matrix(a_mat, work) if ext > 1 else a_mat
    delta = max(abs(c) for c in cartan_type(a_mat))
    m = e * h
    box = box_bound(m, delta, p) + box_margin
    plan = []
    for type_total in range(0, d * e * h + 1):
        if (type_total - v_a) % (p - 1):
            continue
        v_t = (type_total - v_a) // (p - 1)
        plan.append((_diag_tuples(-box, box, d, v_t),
                     lambda diag, v=v_t: _tuple_floor(v, -box, box, d)))
    keep = lambda lat, t: t[-1] >= 0 and t[0] <= m
    return _scan(a_work, plan, box, keep, box_limit)


def local_model_count(field: FieldSpec, d: int, e: int, h: int,
                      box_limit: int = DEFAULT_BOX_LIMIT) -> PointReport:
    """All lattices between u^(e*h) * L0 and L0, no semilinear condition.

    The reported types are relative positions against L0, handy for
    histogram output.  For d = 1 the count is e*h + 1, the chain of
    ideals; in general it is the number of u-stable submodules of
    (F_q[u] / u^(e*h))^d.
    """
    if d < 1 or e < 1 or h < 1:
        raise ValidationError("d, e and h must be positive")
    n = e * h
    q = field.q
    estimate = 0
    diags = []
    for total in range(0, d * n + 1):
        for diag in _diag_tuples(0, n, d, total):
            floor = _tuple_floor(total, 0, n, d)
            estimate += q ** len(_slots(diag, floor))
            diags.append((diag, floor))
    if estimate > box_limit:
        raise BoxTooLarge(estimate, box_limit)
    std_scaled = Lattice.standard(field, d).scale(n)
    elements = list(field.elements())
    points, types = [], []
    searched = 0
    for diag, floor in diags:
        slots = _slots(diag, floor)
        for combo in product(elements, repeat=len(slots)):
            searched += 1
            offdiag = {}
            for (i, j, exp), c in zip(slots, combo):
                if c:
                    offdiag.setdefault((i, j), []).append((exp, c))
            pairs = {key: LaurentSeries.from_pairs(field, val)
                     for key, val in offdiag.items()}
            lat = Lattice.from_diag_pairs(field, diag, pairs)
            if d > 2 and not lat.contains(std_scaled):
                continue
            points.append(lat)
            types.append(relative_position(Lattice.standard(field, d), lat))
    return PointReport(field, points, types, searched, n)
