"""Matrices over F_q((u)), elementary-divisor types, and u-lattices.

A SeriesMatrix is an immutable grid of LaurentSeries.  The two canonical
forms here are the workhorses of everything downstream:

* ``cartan_type``: the non-increasing tuple (v_1 >= ... >= v_d) such that
  the matrix factors as k1 * diag(u^v_i) * k2 with k1, k2 invertible over
  F_q[[u]].  Computed by valuation-pivoted elimination; d <= 2 has a
  closed form (min entry valuation and the determinant valuation).

* ``lattice_hnf``: the unique column Hermite form of a full-rank lattice
  given by generators: upper triangular, diagonal u^(a_i), every entry to
  the right of u^(a_i) a Laurent polynomial supported below a_i.  This is
  a finite exact representation, so lattices hash and compare cheaply.
"""

from __future__ import annotations

from .errors import (DivisionByZero, FieldMismatch, InsufficientPrecision,
                     Singular, ValidationError)
from .fields import FieldSpec
from .series import DEFAULT_PRECISION, INF, LaurentSeries, format_series, parse_series


class Coweight:
    """A non-increasing integer vector; the value type of cartan_type."""

    __slots__ = ("components",)

    def __init__(self, components):
        components = tuple(int(c) for c in components)
        if any(a < b for a, b in zip(components, components[1:])):
            raise ValidationError(f"coweight {components} is not non-increasing")
        object.__setattr__(self, "components", components)

    def __setattr__(self, *a):
        raise AttributeError("Coweight is immutable")

    def total(self) -> int:
        return sum(self.components)

    def dual(self) -> "Coweight":
        """The type of the inverse relative position: negate and reverse."""
        return Coweight(tuple(-c for c in reversed(self.components)))

    def leq(self, other: "Coweight") -> bool:
        """Dominance order: equal totals and all prefix sums <= other's."""
        if len(self.components) != len(other.components):
            raise ValidationError("coweight lengths differ")
        if self.total() != other.total():
            return False
        run_a = run_b = 0
        for a, b in zip(self.components, other.components):
            run_a += a
            run_b += b
            if run_a > run_b:
                return False
        return True

    def __add__(self, other):
        return Coweight(tuple(a + b for a, b in zip(self.components, other.components)))

    def __eq__(self, other):
        return isinstance(other, Coweight) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __repr__(self):
        return f"Coweight{self.components}"


class SeriesMatrix:
    """Immutable matrix of LaurentSeries over one field."""

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field: FieldSpec, rows):
        rows = tuple(tuple(r) for r in rows)
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ValidationError("matrix rows must be non-empty and equal length")
        for r in rows:
            for e in r:
                if e.field != field:
                    raise FieldMismatch("matrix entry over a different field")
        self.field = field
        self.nrows = len(rows)
        self.ncols = len(rows[0])
        self.rows = rows

    # -- constructors --------------------------------------------------------

    @classmethod
    def identity(cls, field, d):
        one, zero = LaurentSeries.one(field), LaurentSeries.zero(field)
        return cls(field, [[one if i == j else zero for j in range(d)]
                           for i in range(d)])

    @classmethod
    def diagonal(cls, field, entries):
        entries = list(entries)
        zero = LaurentSeries.zero(field)
        return cls(field, [[entries[i] if i == j else zero
                            for j in range(len(entries))]
                           for i in range(len(entries))])

    @classmethod
    def u_diagonal(cls, field, exponents):
        return cls.diagonal(field, [LaurentSeries.u_power(field, k)
                                    for k in exponents])

    @classmethod
    def from_literals(cls, field, grid):
        return cls(field, [[parse_series(field, cell) for cell in row]
                           for row in grid])

    def to_literals(self):
        return [[format_series(e) for e in row] for row in self.rows]

    # -- basics ---------------------------------------------------------------

    def _check_square(self):
        if self.nrows != self.ncols:
            raise ValidationError("operation needs a square matrix")

    def _check(self, other):
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def entry(self, i, j) -> LaurentSeries:
        return self.rows[i][j]

    def __add__(self, other):
        self._check(other)
        return SeriesMatrix(self.field,
                            [[a + b for a, b in zip(ra, rb)]
                             for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other):
        self._check(other)
        return SeriesMatrix(self.field,
                            [[a - b for a, b in zip(ra, rb)]
                             for ra, rb in zip(self.rows, other.rows)])

    def __neg__(self):
        return SeriesMatrix(self.field, [[-a for a in r] for r in self.rows])

    def __mul__(self, other):
        self._check(other)
        if self.ncols != other.nrows:
            raise ValidationError("matrix shape mismatch")
        bt = list(zip(*other.rows))  # columns of other
        out = []
        for ra in self.rows:
            row = []
            for cb in bt:
                acc = ra[0] * cb[0]
                for a, b in zip(ra[1:], cb[1:]):
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return SeriesMatrix(self.field, out)

    def scale_series(self, s: LaurentSeries):
        return SeriesMatrix(self.field, [[e * s for e in r] for r in self.rows])

    def shift(self, k: int):
        """Multiply every entry by u^k."""
        return SeriesMatrix(self.field, [[e.shift(k) for e in r] for r in self.rows])

    def apply_phi(self):
        return SeriesMatrix(self.field, [[e.apply_phi() for e in r] for r in self.rows])

    def truncate(self, prec):
        return SeriesMatrix(self.field, [[e.truncate(prec) for e in r] for r in self.rows])

    def transpose(self):
        return SeriesMatrix(self.field, list(zip(*self.rows)))

    def min_val_lower_bound(self):
        return min(e.val_lower_bound() for r in self.rows for e in r)

    def certified_min_val(self) -> int:
        """Minimum entry valuation, certified; see module notes on windows."""
        entries = [e for r in self.rows for e in r]
        known = [e.val for e in entries if e.known_nonzero()]
        if not known:
            if all(e.is_structural_zero() for e in entries):
                raise Singular("zero matrix has no valuation")
            raise InsufficientPrecision("no entry with a certified leading term")
        cand = min(known)
        for e in entries:
            if not e.known_nonzero() and e.prec < cand:
                raise InsufficientPrecision(
                    "an entry certified only to u^%s could undercut valuation %d"
                    % (e.prec, cand))
        return cand

    def det(self) -> LaurentSeries:
        self._check_square()
        d = self.nrows
        if d == 1:
            return self.rows[0][0]
        if d == 2:
            (a, b), (c, e) = self.rows
            return a * e - b * c
        # Laplace over the first remaining row, memoized on column subsets
        cache = {}

        def minor(r, mask):
            key = mask
            if r == d - 1:
                j = mask.bit_length() - 1
                return self.rows[r][j]
            got = cache.get((r, key))
            if got is not None:
                return got
            acc = None
            sign = 1
            m = mask
            while m:
                low = m & (-m)
                j = low.bit_length() - 1
                term = self.rows[r][j] * minor(r + 1, mask ^ low)
                if sign < 0:
                    term = -term
                acc = term if acc is None else acc + term
                sign = -sign
                m ^= low
            cache[(r, key)] = acc
            return acc

        return minor(0, (1 << d) - 1)

    def is_triangular_with_monomial_diag(self) -> bool:
        self._check_square()
        for i in range(self.nrows):
            de = self.rows[i][i]
            if not (de.prec == INF and len(de.coeffs) == 1):
                return False
            for j in range(i):
                if not self.rows[i][j].is_structural_zero():
                    return False
        return True

    def inverse(self, prec=None) -> "SeriesMatrix":
        """Inverse matrix.

        Upper triangular with monomial diagonal inverts exactly (finite
        nilpotent expansion); otherwise adjugate over det with the usual
        certified-window bookkeeping.
        """
        self._check_square()
        field, d = self.field, self.nrows
        if d == 1:
            return SeriesMatrix(field, [[self.rows[0][0].inv(prec)]])
        if self.is_triangular_with_monomial_diag():
            dinv = SeriesMatrix.diagonal(
                field, [LaurentSeries(field, -e.val, (field.inv(e.coeffs[0]),))
                        for e in (self.rows[i][i] for i in range(d))])
            n = dinv * self - SeriesMatrix.identity(field, d)
            acc = SeriesMatrix.identity(field, d)
            power = None
            for _ in range(1, d):
                power = n if power is None else power * n
                acc = acc - power if _ % 2 == 1 else acc + power
            return acc * dinv
        det = self.det()
        if not det.known_nonzero():
            if det.is_structural_zero():
                raise Singular("matrix determinant is zero")
            raise InsufficientPrecision("determinant is zero to certified bound")
        det_inv = det.inv(prec)
        cof = []
        for i in range(d):
            row = []
            for j in range(d):
                sub = SeriesMatrix(field, [
                    [self.rows[r][c] for c in range(d) if c != j]
                    for r in range(d) if r != i])
                m = sub.det() if d > 1 else LaurentSeries.one(field)
                if (i + j) % 2:
                    m = -m
                row.append(m)
            cof.append(row)
        adj = SeriesMatrix(field, cof).transpose()
        return adj.scale_series(det_inv)

    def congruent_to_identity(self, n: int) -> bool:
        """Certified membership in U_n: matrix - I in u^n * M_d(O)."""
        self._check_square()
        one = LaurentSeries.one(self.field)
        for i in range(self.nrows):
            for j in range(self.ncols):
                e = self.rows[i][j] - one if i == j else self.rows[i][j]
                lb = e.val_lower_bound()
                if e.known_nonzero() and e.val < n:
                    return False
                if lb < n:
                    raise InsufficientPrecision(
                        f"entry ({i},{j}) certified only to u^{e.prec}, need u^{n}")
        return True

    def eq3(self, other) -> str:
        self._check(other)
        verdicts = {self.rows[i][j].eq3(other.rows[i][j])
                    for i in range(self.nrows) for j in range(self.ncols)}
        if "unequal" in verdicts:
            return "unequal"
        if "unknown" in verdicts:
            return "unknown"
        return "equal"

    def __eq__(self, other):
        if not isinstance(other, SeriesMatrix):
            return NotImplemented
        return self.field == other.field and self.rows == other.rows

    def __hash__(self):
        return hash((self.field, self.rows))

    def __repr__(self):
        body = "; ".join(", ".join(format_series(e) for e in r) for r in self.rows)
        return f"<SeriesMatrix [{body}]>"


def pole_bound(a: SeriesMatrix, a_inv: SeriesMatrix | None = None, prec=None) -> int:
    """Smallest certified m >= 0 with both a and a^-1 in u^-m * M_d(O)."""
    if a_inv is None:
        a_inv = a.inverse(prec)
    m = 0
    for mat in (a, a_inv):
        for row in mat.rows:
            for e in row:
                if e.known_nonzero():
                    m = max(m, -e.val)
                elif e.prec < 0:
                    raise InsufficientPrecision(
                        "entry certified only above its possible pole")
    return m


# ---------------------------------------------------------------------------
# cartan type (elementary divisor exponents)

def cartan_type(m: SeriesMatrix, prec=None) -> Coweight:
    """Elementary divisor exponents of an invertible matrix, non-increasing.

    d = 1 and d = 2 use closed forms; larger sizes run valuation-pivoted
    elimination over F_q[[u]] after clearing the minimal power of u.
    """
    m._check_square()
    d = m.nrows
    if d == 1:
        return Coweight((_certified_valuation(m.rows[0][0]),))
    if d == 2:
        m0 = m.certified_min_val()
        vdet = _certified_valuation(m.det())
        return Coweight((vdet - m0, m0))
    mu = m.certified_min_val()
    work = [[e.shift(-mu) for e in row] for row in m.rows]
    divisors = []
    size = d
    while size > 1:
        pi, pj = _find_pivot(work, size)
        if pi != 0:
            work[0], work[pi] = work[pi], work[0]
        if pj != 0:
            for row in work:
                row[0], row[pj] = row[pj], row[0]
        pivot = work[0][0]
        a = pivot.val
        unit_inv = pivot.shift(-a).inv(prec)
        # Row operations clear the pivot column.  The pivot row then sits
        # over an unchanged complement, and column operations that would
        # clear it cannot touch that complement, so the remaining divisors
        # are exactly those of the complement: recurse without clearing.
        for i in range(1, size):
            e = work[i][0]
            if e.known_nonzero():
                factor = (e * unit_inv).shift(-a)
                work[i] = [work[i][j] - factor * work[0][j]
                           for j in range(size)]
        divisors.append(a)
        work = [row[1:] for row in work[1:]]
        size -= 1
    divisors.append(_certified_valuation(work[0][0]))
    divisors = sorted(divisors)
    return Coweight(tuple(reversed([e + mu for e in divisors])))


def _certified_valuation(e: LaurentSeries) -> int:
    if e.known_nonzero():
        return e.val
    if e.is_structural_zero():
        raise Singular("matrix is not invertible")
    raise InsufficientPrecision("valuation not certified at this precision")


def _find_pivot(work, size):
    best = None
    for i in range(size):
        for j in range(size):
            e = work[i][j]
            if e.known_nonzero():
                if best is None or e.val < best[0]:
                    best = (e.val, i, j)
    if best is None:
        if all(e.is_structural_zero() for row in work for e in row[:size]):
            raise Singular("matrix is not invertible")
        raise InsufficientPrecision("no certified pivot entry")
    for i in range(size):
        for j in range(size):
            e = work[i][j]
            if not e.known_nonzero() and e.prec < best[0]:
                raise InsufficientPrecision("pivot choice not certified")
    return best[1], best[2]


# ---------------------------------------------------------------------------
# lattices

class Lattice:
    """Full-rank u-lattice in F_q((u))^d held by its column Hermite basis.

    The basis is upper triangular with diagonal u^(a_i) and each entry to
    the right of the diagonal an exact Laurent polynomial supported in
    exponents strictly below its row's a_i.  That form is unique, so
    equality and hashing are structural.
    """

    __slots__ = ("field", "d", "basis", "diag")

    def __init__(self, basis: SeriesMatrix):
        basis._check_square()
        d = basis.nrows
        diag = []
        for i in range(d):
            de = basis.rows[i][i]
            if not (de.prec == INF and len(de.coeffs) == 1
                    and de.coeffs[0] == 1):
                raise ValidationError("diagonal must be monic monomials u^a")
            diag.append(de.val)
            for j in range(d):
                e = basis.rows[i][j]
                if e.prec != INF:
                    raise ValidationError("Hermite basis entries must be exact")
                if j < i and not e.is_structural_zero():
                    raise ValidationError("basis must be upper triangular")
                if j > i and e.known_nonzero() and e.val + len(e.coeffs) - 1 >= diag[i]:
                    raise ValidationError(
                        f"entry ({i},{j}) not reduced below u^{diag[i]}")
        object.__setattr__(self, "field", basis.field)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "diag", tuple(diag))

    def __setattr__(self, *a):
        raise AttributeError("Lattice is immutable")

    @classmethod
    def standard(cls, field, d):
        return cls(SeriesMatrix.identity(field, d))

    @classmethod
    def from_diag_pairs(cls, field, diag, offdiag=()):
        """Basis from diagonal exponents plus {(i, j): series} overrides."""
        d = len(diag)
        rows = [[LaurentSeries.zero(field) for _ in range(d)] for _ in range(d)]
        for i, a in enumerate(diag):
            rows[i][i] = LaurentSeries.u_power(field, a)
        for (i, j), e in dict(offdiag).items():
            rows[i][j] = e
        return cls(SeriesMatrix(field, rows))

    def det_val(self) -> int:
        return sum(self.diag)

    def scale(self, k: int) -> "Lattice":
        """The lattice u^k * L."""
        return Lattice(self.basis.shift(k))

    def apply_phi(self) -> "Lattice":
        """The lattice spanned by phi of the basis.

        phi keeps the basis upper triangular with monic monomial diagonal
        u^(p*a_i), and digit support below a_i maps below p*a_i, so the
        image is already in Hermite form.
        """
        return Lattice(self.basis.apply_phi())

    def contains(self, other: "Lattice") -> bool:
        if self.field != other.field or self.d != other.d:
            raise FieldMismatch("lattices live in different spaces")
        change = self.basis.inverse() * other.basis
        for row in change.rows:
            for e in row:
                if e.known_nonzero() and e.val < 0:
                    return False
        return True

    def sort_key(self):
        flat = []
        for i in range(self.d):
            for j in range(i + 1, self.d):
                e = self.basis.rows[i][j]
                flat.append((e.val if e.known_nonzero() else 0, e.coeffs))
        return (self.det_val(), self.diag, tuple(flat))

    def to_literals(self):
        return self.basis.to_literals()

    def __eq__(self, other):
        if not isinstance(other, Lattice):
            return NotImplemented
        return self.basis == other.basis

    def __hash__(self):
        return hash(self.basis)

    def __repr__(self):
        return f"<Lattice diag=u^{self.diag}>"


def relative_position(a: Lattice, b: Lattice) -> Coweight:
    """Cartan type of the change of basis from a to b."""
    return cartan_type(a.basis.inverse() * b.basis)


def lattice_hnf(gens: SeriesMatrix, prec=None) -> Lattice:
    """Column Hermite form of the lattice spanned by the columns of gens.

    Works at a finite window and certifies the result: once every residual
    digit is provably divisible by u^K for K past the basis' own pole and
    diagonal bounds, the truncated triangular matrix spans the same
    lattice, so its entries can be re-marked exact.  Exact generators get
    automatic window retries; explicitly capped ones fail honestly.
    """
    if gens.ncols < gens.nrows:
        raise Singular("fewer generators than the ambient rank")
    exact_input = all(e.prec == INF for row in gens.rows for e in row)
    workprec = DEFAULT_PRECISION if prec is None else prec
    lowest = gens.min_val_lower_bound()
    if lowest < 0:
        workprec += -lowest * (gens.nrows + 1)
    attempts = 0
    while True:
        try:
            return _hnf_once(gens, workprec)
        except InsufficientPrecision:
            attempts += 1
            if not exact_input or prec is not None or attempts > 3:
                raise
            workprec *= 2


def _hnf_once(gens: SeriesMatrix, workprec: int) -> Lattice:
    field, d = gens.field, gens.nrows
    cols = [[gens.rows[i][j] for i in range(d)] for j in range(gens.ncols)]
    pool = list(range(gens.ncols))
    pivot_cols = {}
    diag = {}
    for r in range(d - 1, -1, -1):
        cand = None
        for j in pool:
            e = cols[j][r]
            if e.known_nonzero() and (cand is None or e.val < cols[cand][r].val):
                cand = j
        if cand is None:
            if all(cols[j][r].is_structural_zero() for j in pool):
                raise Singular("generators do not span a full-rank lattice")
            raise InsufficientPrecision(f"no certified pivot in row {r}")
        a = cols[cand][r].val
        for j in pool:
            e = cols[j][r]
            if not e.known_nonzero() and e.prec < a:
                raise InsufficientPrecision(f"pivot in row {r} not certified minimal")
        pool.remove(cand)
        unit_inv = cols[cand][r].shift(-a).inv(workprec)
        pivot = [e * unit_inv for e in cols[cand]]
        for j in pool:
            e = cols[j][r]
            if e.known_nonzero():
                factor = e.shift(-a)
                cols[j] = [cj - factor * pv for cj, pv in zip(cols[j], pivot)]
        pivot_cols[r] = pivot
        diag[r] = a
    # Determination bound: junk of valuation >= K cannot change the lattice.
    amax = max(diag.values())
    minv = 0
    for col in list(pivot_cols.values()) + [cols[j] for j in pool]:
        for e in col:
            minv = min(minv, e.val_lower_bound())
    bound = amax + (d - 1) * max(0, amax - minv) + 1
    for col in list(pivot_cols.values()) + [cols[j] for j in pool]:
        for e in col:
            if e.prec < bound:
                raise InsufficientPrecision(
                    f"window u^{e.prec} below determination bound u^{bound}")
    for j in pool:
        for e in cols[j]:
            if e.known_nonzero() and e.val < bound:
                raise Singular("leftover generator outside the triangular span")
    tri = [[None] * d for _ in range(d)]
    zero = LaurentSeries.zero(field)
    for r in range(d):
        col = pivot_cols[r]
        for i in range(d):
            if i < r:
                tri[i][r] = col[i].exact_part(bound)
            elif i == r:
                tri[i][r] = LaurentSeries.u_power(field, diag[r])
            else:
                tri[i][r] = zero
    # Off-diagonal reduction: exact polynomial column operations.
    for c in range(1, d):
        for i in range(c - 1, -1, -1):
            low, high = tri[i][c].split_at(diag[i])
            if high.known_nonzero():
                q = high.shift(-diag[i])
                for i2 in range(i + 1):
                    tri[i2][c] = tri[i2][c] - q * tri[i2][i]
    return Lattice(SeriesMatrix(field, tri))
