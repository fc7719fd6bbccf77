"""Laurent series over F_q with certified precision windows.

A series carries (val, coeffs, prec): coefficients for every exponent
below ``prec`` are known exactly, everything at or above is unknown.
``prec`` may be ``math.inf`` for fully exact values (Laurent polynomials
stay exact through ring operations).  Results never guess: an operation
that would need an uncertified digit raises InsufficientPrecision, and
equality is three-valued ("equal" / "unequal" / "unknown").

The twist sends sum(a_i u^i) to sum(phi(a_i) u^(p*i)) where phi acts on
coefficients through FieldSpec.phi_coeff.
"""

from __future__ import annotations

import math

from .errors import DivisionByZero, FieldMismatch, InsufficientPrecision, ParseError
from .fields import FieldSpec

INF = math.inf

# Certified window length used when an exact series is inverted and the
# caller gave no explicit precision.  CLI jobs override it per call.
DEFAULT_PRECISION = 64

_PACK = 3  # bytes per coefficient in the packed-int convolution


def _conv_mod_p(a, b, p, L):
    """First L coefficients of the product of coefficient lists, mod prime p.

    Packs each operand into one big integer (3 bytes per digit, little
    endian) so the convolution runs inside CPython's bignum multiply.
    Digit overflow needs p^2 * len < 2^24, comfortable for p <= 97 at the
    window lengths we use.
    """
    n, m = len(a), len(b)
    pa = bytearray(_PACK * n)
    pa[0::_PACK] = bytes(a)  # one byte per digit is enough for p <= 97
    pb = bytearray(_PACK * m)
    pb[0::_PACK] = bytes(b)
    raw = (int.from_bytes(pa, "little") * int.from_bytes(pb, "little"))
    raw = raw.to_bytes(_PACK * (n + m), "little")
    k = min(L, n + m - 1)
    fb = int.from_bytes
    return [fb(raw[_PACK * i: _PACK * i + _PACK], "little") % p for i in range(k)]


def _conv_generic(a, b, field, L):
    k = min(L, len(a) + len(b) - 1)
    out = [0] * k
    add, mul = field.add, field.mul
    for i, ai in enumerate(a):
        if ai and i < k:
            for j, bj in enumerate(b):
                if i + j >= k:
                    break
                if bj:
                    out[i + j] = add(out[i + j], mul(ai, bj))
    return out


def _inv_unit(w, field, L):
    """First L coefficients of the inverse of a unit power series."""
    lead = field.inv(w[0])
    if field.r == 1 and L > 8:
        # Newton doubling: y <- y*(2 - w*y), each step exact mod u^(2k)
        p = field.p
        y = [lead]
        k = 1
        while k < L:
            k2 = min(2 * k, L)
            wy = _conv_mod_p(w[:k2], y, p, k2)
            wy += [0] * (k2 - len(wy))
            t = [(2 - wy[0]) % p] + [(-c) % p for c in wy[1:]]
            y = _conv_mod_p(y, t, p, k2)
            y += [0] * (k2 - len(y))
            k = k2
        return y[:L]
    out = [lead]
    neg_lead = field.neg(lead)
    for k in range(1, L):
        s = 0
        for j in range(1, min(k, len(w) - 1) + 1):
            wj = w[j]
            if wj:
                s = field.add(s, field.mul(wj, out[k - j]))
        out.append(field.mul(neg_lead, s) if s else 0)
    return out


class LaurentSeries:
    """One element of F_q((u)) known on a certified exponent window."""

    __slots__ = ("field", "val", "coeffs", "prec")

    def __init__(self, field: FieldSpec, val: int, coeffs, prec=INF):
        coeffs = list(coeffs)
        if prec != INF:
            prec = int(prec)
            keep = prec - val
            if keep <= 0:
                coeffs = []
            elif len(coeffs) > keep:
                coeffs = coeffs[:keep]
        i, j = 0, len(coeffs)
        while i < j and coeffs[i] == 0:
            i += 1
        while j > i and coeffs[j - 1] == 0:
            j -= 1
        self.field = field
        if i == j:
            self.val = 0
            self.coeffs = ()
        else:
            self.val = val + i
            self.coeffs = tuple(coeffs[i:j])
        self.prec = prec

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, field, prec=INF):
        return cls(field, 0, (), prec)

    @classmethod
    def constant(cls, field, c, prec=INF):
        """Constant series; c is a packed element value, or an int mod p."""
        if not 0 <= c < field.q:
            c %= field.p
        return cls(field, 0, (c,), prec)

    @classmethod
    def one(cls, field):
        return cls(field, 0, (1,))

    @classmethod
    def u_power(cls, field, k, c=1):
        return cls(field, k, (c,))

    @classmethod
    def from_pairs(cls, field, pairs, prec=INF):
        """Build from an iterable of (exponent, coefficient)."""
        d = {}
        for e, c in pairs:
            d[e] = field.add(d.get(e, 0), c % field.q)
        if not d:
            return cls.zero(field, prec)
        lo, hi = min(d), max(d)
        return cls(field, lo, [d.get(e, 0) for e in range(lo, hi + 1)], prec)

    # -- predicates ----------------------------------------------------------

    def known_nonzero(self) -> bool:
        return bool(self.coeffs)

    def is_structural_zero(self) -> bool:
        return not self.coeffs and self.prec == INF

    def val_lower_bound(self):
        """A certified lower bound on the valuation (prec for zero-so-far)."""
        return self.val if self.coeffs else self.prec

    def valuation(self) -> int:
        if self.coeffs:
            return self.val
        if self.prec == INF:
            raise DivisionByZero("valuation of the zero series")
        raise InsufficientPrecision(
            f"no nonzero coefficient below certified bound u^{self.prec}")

    def eq3(self, other) -> str:
        """Three-valued equality: 'equal', 'unequal' or 'unknown'.

        'unknown' means the certified windows agree but at least one side
        has a finite window, so the values could still differ beyond it.
        """
        diff = self - other
        if diff.known_nonzero():
            return "unequal"
        return "equal" if diff.prec == INF else "unknown"

    def coeff(self, k: int) -> int:
        """Coefficient at exponent k; raises beyond the certified window."""
        if k >= self.prec:
            raise InsufficientPrecision(f"coefficient of u^{k} not certified")
        i = k - self.val
        if not self.coeffs or i < 0 or i >= len(self.coeffs):
            return 0
        return self.coeffs[i]

    def leading_coeff(self) -> int:
        if not self.coeffs:
            raise self._zero_error()
        return self.coeffs[0]

    def _zero_error(self):
        if self.prec == INF:
            return DivisionByZero("zero series")
        return InsufficientPrecision(
            f"series is zero to its certified bound u^{self.prec}")

    def _check(self, other):
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    # -- ring operations -----------------------------------------------------

    def __add__(self, other):
        self._check(other)
        field = self.field
        prec = min(self.prec, other.prec)
        if not self.coeffs:
            return LaurentSeries(other.field, other.val, other.coeffs, prec)
        if not other.coeffs:
            return LaurentSeries(field, self.val, self.coeffs, prec)
        lo = min(self.val, other.val)
        hi = max(self.val + len(self.coeffs), other.val + len(other.coeffs))
        if prec != INF:
            hi = min(hi, prec)
        if hi <= lo:
            return LaurentSeries.zero(field, prec)
        out = [0] * (hi - lo)
        for src in (self, other):
            a = src.val - lo
            if field.r == 1:
                p = field.p
                for i, c in enumerate(src.coeffs):
                    if a + i >= len(out):
                        break
                    out[a + i] = (out[a + i] + c) % p
            else:
                add = field.add
                for i, c in enumerate(src.coeffs):
                    if a + i >= len(out):
                        break
                    out[a + i] = add(out[a + i], c)
        return LaurentSeries(field, lo, out, prec)

    def __neg__(self):
        neg = self.field.neg
        return LaurentSeries(self.field, self.val,
                             [neg(c) for c in self.coeffs], self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        field = self.field
        if not self.coeffs or not other.coeffs:
            if self.is_structural_zero() or other.is_structural_zero():
                return LaurentSeries.zero(field)
            bound = min(self.prec + other.val_lower_bound(),
                        other.prec + self.val_lower_bound())
            return LaurentSeries.zero(field, bound)
        prec = min(self.prec + other.val, other.prec + self.val)
        val0 = self.val + other.val
        if prec == INF:
            L = len(self.coeffs) + len(other.coeffs) - 1
        else:
            L = prec - val0
            if L <= 0:
                return LaurentSeries.zero(field, prec)
        if field.r == 1:
            out = _conv_mod_p(self.coeffs, other.coeffs, field.p, L)
        else:
            out = _conv_generic(self.coeffs, other.coeffs, field, L)
        return LaurentSeries(field, val0, out, prec)

    def scale(self, c: int):
        """Multiply by a field element."""
        c %= self.field.q
        if c == 0:
            return LaurentSeries.zero(self.field, self.prec)
        if c == 1:
            return self
        mul = self.field.mul
        return LaurentSeries(self.field, self.val,
                             [mul(c, x) for x in self.coeffs], self.prec)

    def shift(self, k: int):
        """Multiply by u^k."""
        if k == 0:
            return self
        prec = self.prec if self.prec == INF else self.prec + k
        return LaurentSeries(self.field, self.val + k, self.coeffs, prec)

    def inv(self, prec=None):
        """Multiplicative inverse.

        The certified window of the result is capped by what the input
        supports (prec - 2*val); for exact non-monomial inputs the window
        defaults to DEFAULT_PRECISION digits from the leading term.
        """
        if not self.coeffs:
            raise self._zero_error()
        field, v = self.field, self.val
        if len(self.coeffs) == 1 and self.prec == INF:
            return LaurentSeries(field, -v, (field.inv(self.coeffs[0]),))
        cap = INF if self.prec == INF else self.prec - 2 * v
        if prec is None:
            res_prec = (-v + DEFAULT_PRECISION) if cap == INF else cap
        else:
            res_prec = min(prec, cap)
        if res_prec == INF:
            res_prec = -v + DEFAULT_PRECISION
        L = int(res_prec) + v  # window length from the result's valuation
        if L <= 0:
            raise InsufficientPrecision("inverse would have no certified digits")
        out = _inv_unit(self.coeffs, field, L)
        return LaurentSeries(field, -v, out, res_prec)

    def apply_phi(self):
        """The twist: u -> u^p, coefficients through phi_coeff."""
        field = self.field
        p = field.p
        prec = self.prec if self.prec == INF else p * self.prec
        if not self.coeffs:
            return LaurentSeries.zero(field, prec)
        out = [0] * ((len(self.coeffs) - 1) * p + 1)
        pc = field.phi_coeff
        for i, c in enumerate(self.coeffs):
            if c:
                out[i * p] = pc(c)
        return LaurentSeries(field, p * self.val, out, prec)

    def exact_part(self, upto):
        """The digits below u^upto as an exact series.

        Only legal when the window certifies all of them, i.e. prec >= upto.
        This deliberately forgets the tail; callers use it when an outside
        argument shows the tail cannot matter.
        """
        if self.prec < upto:
            raise InsufficientPrecision(
                f"digits below u^{upto} not certified (window ends at u^{self.prec})")
        if self.is_structural_zero() or self.val >= upto:
            return LaurentSeries.zero(self.field)
        return LaurentSeries(self.field, self.val,
                             self.coeffs[:upto - self.val], INF)

    def truncate(self, prec):
        if prec >= self.prec:
            return self
        return LaurentSeries(self.field, self.val, self.coeffs, prec)

    def split_at(self, k: int):
        """(low, high): digits below exponent k, exactly, and the rest.

        The low part is a finite certified polynomial, so it comes back
        exact; the high part keeps this series' window.  Splitting past
        the window would fabricate digits, hence the precision demand.
        """
        if self.prec < k:
            raise InsufficientPrecision(
                f"cannot split at u^{k}: window ends at u^{self.prec}")
        cut = max(0, k - self.val) if self.coeffs else 0
        low = LaurentSeries(self.field, self.val, self.coeffs[:cut], INF)
        high = LaurentSeries(self.field, self.val + cut,
                             self.coeffs[cut:], self.prec)
        return low, high

    # -- comparisons / hashing ------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (self.field == other.field and self.val == other.val
                and self.coeffs == other.coeffs and self.prec == other.prec)

    def __hash__(self):
        return hash((self.field, self.val, self.coeffs, self.prec))

    def __repr__(self):
        return f"<{format_series(self)} over F_{self.field.q}>"


# ---------------------------------------------------------------------------
# literal grammar: signed sums of c*u^k monomials, t-polynomials when r > 1

def format_series(s: LaurentSeries) -> str:
    field = s.field
    parts = []
    for i, c in enumerate(s.coeffs):
        if not c:
            continue
        e = s.val + i
        if field.r == 1:
            cs = str(c)
        else:
            cs = field.format_element(c)
            if "+" in cs or "-" in cs:
                cs = f"({cs})"
        if e == 0:
            parts.append(cs)
        else:
            up = "u" if e == 1 else f"u^{e}"
            parts.append(up if cs == "1" else f"{cs}*{up}")
    if s.prec != INF:
        parts.append(f"O(u^{s.prec})")
    if not parts:
        return "0"
    return " + ".join(parts)


def _split_terms(text):
    """Split a literal on top-level +/- (minus after '^' binds the exponent)."""
    terms = []
    depth = 0
    sign = 1
    start = 0
    i = 0
    if text and text[0] in "+-":
        sign = -1 if text[0] == "-" else 1
        start = i = 1
    prev = ""
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced parentheses")
        elif ch in "+-" and depth == 0 and prev != "^":
            terms.append((sign, text[start:i].strip()))
            sign = -1 if ch == "-" else 1
            start = i + 1
        if not ch.isspace():
            prev = ch
        i += 1
    if depth:
        raise ParseError("unbalanced parentheses")
    terms.append((sign, text[start:].strip()))
    return terms


def _split_factors(term):
    factors = []
    depth = 0
    start = 0
    for i, ch in enumerate(term):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "*" and depth == 0:
            factors.append(term[start:i])
            start = i + 1
    factors.append(term[start:])
    return [f.strip() for f in factors]


def _parse_exponent(text, what):
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"bad {what} exponent {text!r}") from None


def parse_series(field: FieldSpec, text: str) -> LaurentSeries:
    """Parse a series literal like ``u^-1 + 1 + 2*u^3`` or ``(t+1)*u^2``.

    An ``O(u^k)`` term marks the certification bound; without one the
    parsed value is exact.
    """
    if not isinstance(text, str):
        raise ParseError(f"series literal must be a string, got {type(text).__name__}")
    text = text.strip()
    if not text:
        raise ParseError("empty series literal")
    pairs = []
    prec = INF
    for sign, term in _split_terms(text):
        if not term:
            raise ParseError(f"empty term in {text!r}")
        if term.startswith("O(") and term.endswith(")"):
            inner = term[2:-1].strip()
            if inner == "u":
                k = 1
            elif inner.startswith("u^"):
                k = _parse_exponent(inner[2:], "precision")
            elif inner == "1":
                k = 0
            else:
                raise ParseError(f"bad precision marker {term!r}")
            prec = min(prec, k)
            continue
        coeff = 1
        expo = 0
        for factor in _split_factors(term):
            if not factor:
                raise ParseError(f"empty factor in term {term!r}")
            if factor == "u":
                expo += 1
            elif factor.startswith("u^"):
                expo += _parse_exponent(factor[2:], "u")
            elif factor.startswith("(") and factor.endswith(")"):
                coeff = field.mul(coeff, field.parse_element(factor[1:-1]))
            elif factor == "t" or factor.startswith("t^") or factor.isdigit():
                coeff = field.mul(coeff, field.parse_element(factor))
            else:
                raise ParseError(f"cannot read factor {factor!r}")
        if sign < 0:
            coeff = field.neg(coeff)
        pairs.append((expo, coeff))
    return LaurentSeries.from_pairs(field, pairs, prec)
