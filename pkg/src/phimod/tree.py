"""The regular tree of rank-2 lattice classes and semilinear displacement.

Vertices are homothety classes of lattices in F_q((u))^2.  Each class
holds a unique representative whose determinant valuation is 0 or 1,
and a class has q + 1 neighbors, one per line in L / uL.  An invertible
matrix A acts on classes by L -> A * phi(L), and the displacement
d(x, A phi x) grows linearly away from its minimum locus, so a breadth
first scan of a ball certifies the minimum.  The shape of that minimum
describes the module (F_q((u))^2, v -> A phi(v)):

  * at a vertex with A * phi(L) = u^s L the action drops to a residue
    matrix on P^1(L / uL) whose fixed lines are the rank-one subobjects
    visible there,
  * when no vertex satisfies that, stable lines (1 : x) are searched
    for directly by growing the coordinate x digit by digit.
"""

import json
from collections import deque

from .errors import InsufficientPrecision, ValidationError
from .matrices import (Lattice, SeriesMatrix, cartan_type, lattice_hnf,
                       pole_bound, relative_position)
from .series import LaurentSeries, format_series


class TreeVertex:
    """Homothety class of rank-2 lattices, held by its reduced member."""

    __slots__ = ("lattice",)

    def __init__(self, lat: Lattice):
        if lat.d != 2:
            raise ValidationError("tree vertices come from rank-2 lattices")
        dv = lat.det_val()
        shift = ((dv % 2) - dv) // 2
        object.__setattr__(self, "lattice", lat.scale(shift) if shift else lat)

    def __setattr__(self, *a):
        raise AttributeError("TreeVertex is immutable")

    @property
    def field(self):
        return self.lattice.field

    @property
    def diag(self):
        return self.lattice.diag

    def to_literals(self):
        return self.lattice.to_literals()

    def __eq__(self, other):
        if not isinstance(other, TreeVertex):
            return NotImplemented
        return self.lattice == other.lattice

    def __hash__(self):
        return hash(self.lattice)

    def __repr__(self):
        return f"<TreeVertex diag=u^{self.diag}>"


def standard_vertex(field) -> TreeVertex:
    return TreeVertex(Lattice.standard(field, 2))


def neighbors(v: TreeVertex):
    """The q + 1 adjacent classes, ordered by their reduced bases."""
    field = v.field
    basis = v.lattice.basis
    one = LaurentSeries.one(field)
    zero = LaurentSeries.zero(field)
    u = LaurentSeries.u_power(field, 1)
    steps = [SeriesMatrix(field, [[u, zero], [zero, one]])]
    for c in field.elements():
        steps.append(SeriesMatrix(
            field, [[one, zero], [LaurentSeries.constant(field, c), u]]))
    out = [TreeVertex(lattice_hnf(basis * s)) for s in steps]
    out.sort(key=lambda w: w.lattice.sort_key())
    return tuple(out)


def tree_distance(x: TreeVertex, y: TreeVertex) -> int:
    r = relative_position(x.lattice, y.lattice)
    return r[0] - r[1]


def frobenius_vertex(v: TreeVertex) -> TreeVertex:
    """The class of phi(L); distances scale by p under this map."""
    return TreeVertex(v.lattice.apply_phi())


def phi_vertex(a_mat: SeriesMatrix, v: TreeVertex) -> TreeVertex:
    if a_mat.field != v.field:
        raise ValidationError("matrix and vertex use different fields")
    return TreeVertex(lattice_hnf(a_mat * v.lattice.basis.apply_phi()))


def displacement(a_mat: SeriesMatrix, v: TreeVertex) -> int:
    return tree_distance(v, phi_vertex(a_mat, v))


class BallProfile:
    """A ball in the tree with the displacement of every vertex."""

    __slots__ = ("center", "radius", "vertices", "distances",
                 "displacements", "edges")

    def __init__(self, center, radius, vertices, distances, displacements,
                 edges):
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", radius)
        object.__setattr__(self, "vertices", tuple(vertices))
        object.__setattr__(self, "distances", tuple(distances))
        object.__setattr__(self, "displacements", tuple(displacements))
        object.__setattr__(self, "edges", tuple(edges))

    def __setattr__(self, *a):
        raise AttributeError("BallProfile is immutable")

    def rows(self):
        return tuple(zip(self.vertices, self.distances, self.displacements))

    def minimum(self):
        """(vertex, displacement) minimizing displacement, ties broken
        by breadth first discovery order, so closest to the center."""
        best = min(range(len(self.vertices)),
                   key=lambda i: (self.displacements[i], i))
        return self.vertices[best], self.displacements[best]

    def as_dict(self):
        return {
            "radius": self.radius,
            "vertices": [{
                "id": i,
                "diag": list(v.diag),
                "basis": v.to_literals(),
                "distance": self.distances[i],
                "displacement": self.displacements[i],
            } for i, v in enumerate(self.vertices)],
            "edges": [list(e) for e in self.edges],
        }


def ball(center: TreeVertex, radius: int):
    """Vertices, center distances and edges of the closed ball."""
    if radius < 0:
        raise ValidationError("radius must be >= 0")
    vertices = [center]
    index = {center: 0}
    dist = [0]
    edges = set()
    queue = deque([0])
    while queue:
        i = queue.popleft()
        if dist[i] == radius:
            continue
        for w in neighbors(vertices[i]):
            j = index.get(w)
            if j is None:
                j = len(vertices)
                index[w] = j
                vertices.append(w)
                dist.append(dist[i] + 1)
                queue.append(j)
            edges.add((min(i, j), max(i, j)))
    return vertices, dist, sorted(edges)


def displacement_profile(a_mat: SeriesMatrix, center: TreeVertex = None,
                         radius: int = None) -> BallProfile:
    """Displacement over a ball; the default radius certifies the minimum.

    Displacement grows at least linearly with slope p - 1 away from its
    minimum locus, so vertices past 2 * d(center, A phi center) / (p - 1)
    cannot improve on the center and the default ball is large enough.
    """
    a_mat._check_square()
    if a_mat.nrows != 2:
        raise ValidationError("displacement profiles need 2x2 matrices")
    if center is None:
        center = standard_vertex(a_mat.field)
    if radius is None:
        d0 = displacement(a_mat, center)
        radius = -(-2 * d0 // (a_mat.field.p - 1))
    vertices, dist, edges = ball(center, radius)
    disp = [displacement(a_mat, v) for v in vertices]
    return BallProfile(center, radius, vertices, dist, disp, edges)


def min_displacement(a_mat: SeriesMatrix, center: TreeVertex = None,
                     radius: int = None):
    """(vertex, value) with the smallest displacement in the search ball."""
    return displacement_profile(a_mat, center, radius).minimum()


# -- rank-one stable lines ----------------------------------------------------


class RankOneReport:
    """Stable lines found by the digit search.

    Entries of `lines` are exact leading segments of the coordinate x of
    a stable line (1 : x), or None for the line (0 : 1).  Counts are
    certified within the search depth: a surviving prefix has residual
    zero below the exponent its next digit could reach.
    """

    __slots__ = ("lines", "depth")

    def __init__(self, lines, depth):
        object.__setattr__(self, "lines", tuple(lines))
        object.__setattr__(self, "depth", depth)

    def __setattr__(self, *a):
        raise AttributeError("RankOneReport is immutable")

    @property
    def count(self):
        return len(self.lines)

    def as_dict(self):
        return {
            "count": self.count,
            "depth": self.depth,
            "lines": ["infinity" if x is None else format_series(x)
                      for x in self.lines],
        }


def rank_one_subs(a_mat: SeriesMatrix, depth: int = 8) -> RankOneReport:
    """Search for lines of F_q((u))^2 carried to themselves by A*phi.

    The line (1 : x) is stable exactly when
        a21 + a22 phi(x) - a11 x - a12 x phi(x) = 0,
    and (0 : 1) is stable exactly when a12 = 0.  Solutions are grown
    digit by digit from each possible leading exponent w; a partial x is
    abandoned once the residual is nonzero below the smallest exponent
    any later digit could still touch.
    """
    a_mat._check_square()
    if a_mat.nrows != 2:
        raise ValidationError("rank-one line search needs a 2x2 matrix")
    if depth < 1:
        raise ValidationError("depth must be >= 1")
    field = a_mat.field
    p = field.p
    for row in a_mat.rows:
        for e in row:
            if e.prec != float("inf"):
                raise InsufficientPrecision(
                    "the line search needs exact matrix entries")
    a11, a12 = a_mat.rows[0]
    a21, a22 = a_mat.rows[1]
    m = pole_bound(a_mat)

    def residual(x):
        phix = x.apply_phi()
        return a21 + a22 * phix - a11 * x - a12 * (x * phix)

    def impact(t, w):
        # smallest exponent a digit of x at u^t can reach in the residual
        opts = []
        if a11.known_nonzero():
            opts.append(t + a11.val)
        if a22.known_nonzero():
            opts.append(p * t + a22.val)
        if a12.known_nonzero():
            opts.append(min(t + a12.val + p * w, p * t + a12.val + w,
                            (p + 1) * t + a12.val))
        return min(opts) if opts else None

    def certified_below(r, floor):
        # residual digits below `floor` are all zero
        return not (r.known_nonzero() and r.val < floor)

    lines = []
    if a21.is_structural_zero():
        lines.append(LaurentSeries.zero(field))
    if a12.is_structural_zero():
        lines.append(None)

    nonzero = [c for c in field.elements() if c]
    span = m + depth
    for w in range(-span, span + 1):
        flo = impact(w, w)
        if flo is None:
            continue

        def grow(x, k):
            r = residual(x)
            floor = impact(w + k, w)
            if not certified_below(r, floor):
                return
            if k == depth:
                lines.append(x)
                return
            for c in field.elements():
                nxt = x + LaurentSeries.u_power(field, w + k, c) if c else x
                grow(nxt, k + 1)

        for c in nonzero:
            grow(LaurentSeries.u_power(field, w, c), 1)
    return RankOneReport(lines, depth)


# -- classification -----------------------------------------------------------


VERDICT_DECOMPOSABLE = "Decomposable"
VERDICT_NONSPLIT = "NonSplit"
VERDICT_NOT_ABS_SIMPLE = "NotAbsolutelySimple"
VERDICT_SIMPLE = "Simple"
VERDICT_EXTENSION = "A3/B1"


class ClassifyReport:
    __slots__ = ("verdict", "minimum", "center", "radius", "detail")

    def __init__(self, verdict, minimum, center, radius, detail):
        object.__setattr__(self, "verdict", verdict)
        object.__setattr__(self, "minimum", minimum)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", radius)
        object.__setattr__(self, "detail", dict(detail))

    def __setattr__(self, *a):
        raise AttributeError("ClassifyReport is immutable")

    def as_dict(self):
        return {
            "verdict": self.verdict,
            "min_displacement": self.minimum,
            "center": self.center.to_literals(),
            "search_radius": self.radius,
            **self.detail,
        }


def _residue_fixed_lines(field, bbar):
    """Fixed points of (x0 : x1) -> bbar * (phi x0, phi x1) on P^1(F_q)."""
    count = 0
    points = [(1, x) for x in field.elements()] + [(0, 1)]
    for x0, x1 in points:
        y0 = field.add(field.mul(bbar[0][0], field.phi_coeff(x0)),
                       field.mul(bbar[0][1], field.phi_coeff(x1)))
        y1 = field.add(field.mul(bbar[1][0], field.phi_coeff(x0)),
                       field.mul(bbar[1][1], field.phi_coeff(x1)))
        if x0 == 0:
            fixed = y0 == 0
        else:
            fixed = y0 != 0 and field.mul(y1, field.inv(y0)) == x1
        count += fixed
    return count


def classify(a_mat: SeriesMatrix, depth: int = 8,
             radius: int = None) -> ClassifyReport:
    """Decide the module structure of (F_q((u))^2, v -> A phi(v)).

    A displacement minimum of zero reduces the question to counting
    fixed lines of the residue action at a stable vertex.  Otherwise
    rank-one stable lines are counted directly; one stable line with a
    positive minimum leaves two module shapes that this invariant does
    not separate, reported as the merged verdict "A3/B1".
    """
    profile = displacement_profile(a_mat, radius=radius)
    center, m_min = profile.minimum()
    if m_min == 0:
        g = center.lattice.basis
        c = g.inverse() * a_mat * g.apply_phi()
        s = cartan_type(c)[0]
        b = c.shift(-s)
        bbar = [[b.rows[i][j].coeff(0) for j in range(2)] for i in range(2)]
        fixed = _residue_fixed_lines(a_mat.field, bbar)
        if fixed >= 2:
            verdict = VERDICT_DECOMPOSABLE
        elif fixed == 1:
            verdict = VERDICT_NONSPLIT
        else:
            verdict = VERDICT_NOT_ABS_SIMPLE
        detail = {"fixed_lines": fixed, "scaling": s}
    else:
        report = rank_one_subs(a_mat, depth=depth)
        if report.count == 0:
            verdict = VERDICT_SIMPLE
        elif report.count >= 2:
            verdict = VERDICT_DECOMPOSABLE
        else:
            verdict = VERDICT_EXTENSION
        detail = {"rank_one_lines": report.count,
                  "lines": report.as_dict()["lines"]}
    return ClassifyReport(verdict, m_min, center, profile.radius, detail)


# -- export -------------------------------------------------------------------


def export_ball(a_mat: SeriesMatrix, radius: int = None, fmt: str = "dot",
                center: TreeVertex = None, depth: int = 8) -> str:
    """Render a displacement ball as Graphviz dot or JSON text."""
    profile = displacement_profile(a_mat, center=center, radius=radius)
    if fmt == "dot":
        lines = ["graph ball {", "  node [shape=circle];"]
        for i, v in enumerate(profile.vertices):
            a, b = v.diag
            label = f"{a}-{b} / {profile.displacements[i]}"
            lines.append(f'  v{i} [label="{label}"];')
        for i, j in profile.edges:
            lines.append(f"  v{i} -- v{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"
    if fmt == "json":
        data = profile.as_dict()
        data["classification"] = classify(a_mat, depth=depth).as_dict()
        return json.dumps(data, indent=2, sort_keys=True) + "\n"
    raise ValidationError(f"unknown export format {fmt!r}")
