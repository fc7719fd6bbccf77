"""Finite coefficient fields F_q, q = p^r, with elements packed into ints.

An element of F_q is an int in [0, q): the polynomial sum(c_i * t^i) is
encoded as sum(c_i * p^i).  For r = 1 this is the residue itself.  All
arithmetic goes through a FieldSpec, which owns the modulus and the
lookup tables; series and matrices store bare ints and carry the
FieldSpec alongside.

The Frobenius here is the coefficient map a -> a^p.  Whether it
participates in the series-level twist is controlled by the
coeff_frobenius flag on the field (off: coefficients are fixed and only
u -> u^p twists; on: coefficients are raised to the p-th power as well).
"""

from __future__ import annotations

from .errors import DivisionByZero, FieldMismatch, ValidationError

# mul/add tables are only built below this field size; larger fields use
# log/antilog pairs which stay cheap to construct.
_ADD_TABLE_MAX_Q = 256

_TABLE_CACHE: dict[tuple, tuple] = {}


# ---------------------------------------------------------------------------
# dense polynomial helpers over F_p (coefficient lists, low degree first)

def _poly_trim(a):
    n = len(a)
    while n and a[n - 1] == 0:
        n -= 1
    return a[:n]


def _poly_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_mod(a, f, p):
    # f monic
    a = list(a)
    df = len(f) - 1
    for i in range(len(a) - 1, df - 1, -1):
        c = a[i] % p
        if c:
            for j in range(df + 1):
                a[i - df + j] = (a[i - df + j] - c * f[j]) % p
    return _poly_trim(a[:df])


def _poly_mulmod(a, b, f, p):
    return _poly_mod(_poly_mul(a, b, p), f, p)


def _poly_powmod(base, e, f, p):
    result = [1]
    acc = _poly_mod(base, f, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, acc, f, p)
        acc = _poly_mulmod(acc, acc, f, p)
        e >>= 1
    return result


def _poly_sub(a, b, p):
    n = max(len(a), len(b))
    return _poly_trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p
                       for i in range(n)])


def _poly_gcd(a, b, p):
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b:
        inv_lead = pow(b[-1], p - 2, p)
        bm = [(c * inv_lead) % p for c in b]
        a = _poly_mod(a, bm, p)
        a, b = b, a
    return a


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(f, p) -> bool:
    """Rabin test for a monic polynomial (low-first coefficient list) over F_p."""
    f = list(f)
    n = len(f) - 1
    if n < 1 or f[-1] != 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    if _poly_sub(_poly_powmod(x, p ** n, f, p), x, p):
        return False
    for ell in _prime_factors(n):
        diff = _poly_sub(_poly_powmod(x, p ** (n // ell), f, p), x, p)
        gcd = _poly_gcd(diff, f, p)
        if len(gcd) - 1 != 0:
            return False
    return True


def find_irreducible(p, n):
    """First monic irreducible of degree n over F_p in counter order.

    The low coefficients are enumerated as base-p digits of an increasing
    counter, so the result is deterministic across runs.
    """
    if n == 1:
        return (0, 1)
    for counter in range(p ** n):
        coeffs = []
        c = counter
        for _ in range(n):
            coeffs.append(c % p)
            c //= p
        f = coeffs + [1]
        if is_irreducible(f, p):
            return tuple(f)
    raise ValidationError(f"no irreducible of degree {n} over F_{p}")  # unreachable


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------

class FieldSpec:
    """Arithmetic context for F_q = F_p[t]/(modulus), elements packed as ints.

    p must be a prime in 2..97 and modulus a monic irreducible tuple of
    length r+1 (low degree first), given exactly when r > 1.
    """

    __slots__ = ("p", "r", "q", "modulus", "coeff_frobenius",
                 "_exp", "_log", "_frob", "_add", "_hash")

    def __init__(self, p: int, r: int = 1, modulus=None, coeff_frobenius: bool = False):
        if not _is_prime(p) or not 2 <= p <= 97:
            raise ValidationError(f"p must be a prime in 2..97, got {p}")
        if r < 1:
            raise ValidationError(f"r must be >= 1, got {r}")
        if r == 1:
            if modulus is not None:
                raise ValidationError("modulus is only accepted when r > 1")
        else:
            if modulus is None:
                raise ValidationError(f"degree-{r} field needs an explicit modulus")
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != r + 1 or modulus[-1] != 1:
                raise ValidationError("modulus must be monic of degree r")
            if not is_irreducible(list(modulus), p):
                raise ValidationError(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.r = r
        self.q = p ** r
        self.modulus = modulus
        self.coeff_frobenius = bool(coeff_frobenius)
        self._hash = hash((p, r, modulus, self.coeff_frobenius))
        self._exp = self._log = self._frob = self._add = None
        if r > 1:
            self._build_tables()

    def _build_tables(self):
        key = (self.p, self.r, self.modulus)
        cached = _TABLE_CACHE.get(key)
        if cached is None:
            cached = self._make_tables()
            _TABLE_CACHE[key] = cached
        self._exp, self._log, self._frob, self._add = cached

    def _make_tables(self):
        p, q, f = self.p, self.q, list(self.modulus)
        # find a generator of the multiplicative group
        factors = _prime_factors(q - 1)
        gen = None
        for cand in range(2, q):
            poly = self._decode(cand)
            if all(self._encode(_poly_powmod(poly, (q - 1) // ell, f, p)) != 1
                   for ell in factors):
                gen = poly
                break
        assert gen is not None
        exp = [0] * (2 * (q - 1))
        log = [0] * q
        cur = [1]
        for k in range(q - 1):
            e = self._encode(cur)
            exp[k] = e
            exp[k + q - 1] = e
            log[e] = k
            cur = _poly_mulmod(cur, gen, f, p)
        frob = [0] * q
        for a in range(1, q):
            frob[a] = exp[(log[a] * p) % (q - 1)]
        add = None
        if q <= _ADD_TABLE_MAX_Q:
            add = [0] * (q * q)
            for a in range(q):
                da = self._decode(a)
                da += [0] * (self.r - len(da))
                for b in range(q):
                    db = self._decode(b)
                    db += [0] * (self.r - len(db))
                    add[a * q + b] = self._encode([(x + y) % p for x, y in zip(da, db)])
        return exp, log, frob, add

    def _decode(self, x):
        out = []
        while x:
            out.append(x % self.p)
            x //= self.p
        return out

    def _encode(self, poly):
        x = 0
        for c in reversed(poly):
            x = x * self.p + c
        return x

    # -- element arithmetic (ints in [0, q)) --------------------------------

    def add(self, a, b):
        if self.r == 1:
            return (a + b) % self.p
        if self._add is not None:
            return self._add[a * self.q + b]
        da, db = self._decode(a), self._decode(b)
        if len(da) < len(db):
            da, db = db, da
        db += [0] * (len(da) - len(db))
        return self._encode([(x + y) % self.p for x, y in zip(da, db)])

    def neg(self, a):
        if self.r == 1:
            return (-a) % self.p
        return self._encode([(-c) % self.p for c in self._decode(a)])

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.r == 1:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of zero field element")
        if self.r == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def pow_(self, a, e):
        if a == 0:
            if e < 0:
                raise DivisionByZero("inverse of zero field element")
            return 0 if e else 1
        if self.r == 1:
            return pow(a, e % (self.p - 1), self.p) if e else 1
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def frob(self, a):
        """The p-power map a -> a^p."""
        if self.r == 1 or a == 0:
            return a
        return self._frob[a]

    def phi_coeff(self, a):
        """Action of the series twist on a coefficient."""
        return self.frob(a) if self.coeff_frobenius else a

    def elements(self):
        return range(self.q)

    # -- formatting ----------------------------------------------------------

    def format_element(self, a) -> str:
        """Render an element as an integer (r = 1) or a polynomial in t."""
        if self.r == 1:
            return str(a)
        poly = self._decode(a)
        if not poly:
            return "0"
        parts = []
        for i in range(len(poly) - 1, -1, -1):
            c = poly[i]
            if not c:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                tpow = "t" if i == 1 else f"t^{i}"
                parts.append(tpow if c == 1 else f"{c}*{tpow}")
        return "+".join(parts)

    def parse_element(self, text: str) -> int:
        """Inverse of format_element; accepts any signed sum of t-monomials."""
        from .errors import ParseError
        text = text.replace(" ", "")
        if not text:
            raise ParseError("empty coefficient")
        total = 0
        sign = 1
        i = 0
        if text[0] in "+-":
            sign = -1 if text[0] == "-" else 1
            i = 1
        while True:
            j = i
            while j < len(text) and text[j] not in "+-":
                j += 1
            term = text[i:j]
            if not term:
                raise ParseError(f"empty term in coefficient {text!r}")
            total = self.add(total, self._parse_term(term, sign))
            if j == len(text):
                break
            sign = -1 if text[j] == "-" else 1
            i = j + 1
        return total

    def _parse_term(self, term, sign):
        from .errors import ParseError
        coeff = 1
        if "*" in term:
            cpart, _, term = term.partition("*")
            if not cpart.isdigit():
                raise ParseError(f"bad coefficient factor {cpart!r}")
            coeff = int(cpart) % self.p
        if term.isdigit():
            val = (int(term) * coeff) % self.p
        elif term == "t":
            if self.r == 1:
                raise ParseError("t is not a symbol of a prime field")
            val = self.mul(coeff % self.p, self.p)
        elif term.startswith("t^"):
            if self.r == 1:
                raise ParseError("t is not a symbol of a prime field")
            e = term[2:]
            if not e.isdigit():
                raise ParseError(f"bad exponent in {term!r}")
            val = self.mul(coeff % self.p, self.pow_(self.p, int(e)))
        else:
            raise ParseError(f"cannot read coefficient term {term!r}")
        return self.neg(val) if sign < 0 else val

    # -- extensions ----------------------------------------------------------

    def extension(self, degree: int) -> "FieldSpec":
        """The field with q^degree elements, modulus searched deterministically."""
        if degree < 1:
            raise ValidationError("extension degree must be >= 1")
        if degree == 1:
            return self
        n = self.r * degree
        return FieldSpec(self.p, n, find_irreducible(self.p, n),
                         coeff_frobenius=self.coeff_frobenius)

    def embed_into(self, big: "FieldSpec"):
        """Table sending each element of self to its image in big.

        Uses the first root of our modulus in big (scan order), so the
        embedding is deterministic.  For prime fields this is the identity
        on packed values.
        """
        if big.p != self.p or big.r % self.r:
            raise FieldMismatch(f"no embedding of F_{self.q} into F_{big.q}")
        if self.r == 1:
            return list(range(self.p))
        root = None
        for x in big.elements():
            acc = 0
            xp = 1
            for c in self.modulus:
                if c:
                    acc = big.add(acc, big.mul(c, xp))
                xp = big.mul(xp, x)
            if acc == 0:
                root = x
                break
        if root is None:
            raise FieldMismatch("modulus has no root in the target field")
        table = [0] * self.q
        for a in self.elements():
            acc = 0
            xp = 1
            for c in self._decode(a):
                if c:
                    acc = big.add(acc, big.mul(c, xp))
                xp = big.mul(xp, root)
            table[a] = acc
        return table

    # ------------------------------------------------------------------------

    def check_same(self, other: "FieldSpec"):
        if self != other:
            raise FieldMismatch(f"{self} vs {other}")

    def __eq__(self, other):
        return (isinstance(other, FieldSpec)
                and self.p == other.p and self.r == other.r
                and self.modulus == other.modulus
                and self.coeff_frobenius == other.coeff_frobenius)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if self.r == 1:
            base = f"FieldSpec(p={self.p})"
        else:
            base = f"FieldSpec(p={self.p}, r={self.r}, modulus={self.modulus})"
        if self.coeff_frobenius:
            return base[:-1] + ", coeff_frobenius=True)"
        return base
