"""Deterministic random inputs for tests and the built-in self checks.

The key trick: random invertible matrices are built as products of unit
triangular matrices, permutations, scalar units, and a monomial diagonal.
Every factor has an exact closed-form inverse, so both the matrix and its
inverse are exact Laurent polynomials and reference computations never
hit precision loss.
"""

import random

from .fields import FieldSpec
from .matrices import SeriesMatrix
from .series import LaurentSeries


def rng(seed):
    return random.Random(seed)


def random_element(rnd, field, nonzero=False):
    lo = 1 if nonzero else 0
    return rnd.randrange(lo, field.q)


def random_series(rnd, field, val_range=(-3, 3), digits=5, nonzero=False):
    """An exact random Laurent polynomial."""
    coeffs = [random_element(rnd, field) for _ in range(digits)]
    if nonzero and not any(coeffs):
        coeffs[rnd.randrange(digits)] = random_element(rnd, field, nonzero=True)
    val = rnd.randint(*val_range)
    return LaurentSeries.from_pairs(field, list(enumerate(coeffs, start=val)),
                                    float("inf"))


def random_unit(rnd, field, digits=5):
    """Exact series with valuation zero."""
    s = random_series(rnd, field, val_range=(0, 0), digits=digits)
    if not (s.known_nonzero() and s.val == 0):
        s = s + LaurentSeries.constant(field, random_element(rnd, field, True))
    return s


def _unit_triangular(rnd, field, d, lower, digits, density):
    rows = [[LaurentSeries.one(field) if i == j else LaurentSeries.zero(field)
             for j in range(d)] for i in range(d)]
    for i in range(d):
        for j in range(d):
            want = i > j if lower else i < j
            if want and rnd.random() < density:
                rows[i][j] = random_series(rnd, field, val_range=(0, 2),
                                           digits=digits)
    return SeriesMatrix(field, rows)


def _triangular_inverse(m):
    field, d = m.field, m.nrows
    n = m - SeriesMatrix.identity(field, d)
    acc = SeriesMatrix.identity(field, d)
    power = SeriesMatrix.identity(field, d)
    for k in range(1, d):
        power = power * n
        acc = acc - power if k % 2 == 1 else acc + power
    return acc


def _permutation(rnd, field, d):
    perm = list(range(d))
    rnd.shuffle(perm)
    zero, one = LaurentSeries.zero(field), LaurentSeries.one(field)
    rows = [[one if perm[i] == j else zero for j in range(d)] for i in range(d)]
    return SeriesMatrix(field, rows)


def random_invertible(rnd, field, d, diag_range=(-2, 2), digits=4, density=0.7):
    """Exact invertible matrix plus its exact inverse.

    Shape: P1 L U diag(u^e) L' U' P2 with unit triangular L, U and random
    permutations; the pole bound of both the matrix and the inverse is at
    most max |e_i| plus the spread the triangular factors contribute.
    """
    left = [_permutation(rnd, field, d),
            _unit_triangular(rnd, field, d, True, digits, density),
            _unit_triangular(rnd, field, d, False, digits, density)]
    right = [_unit_triangular(rnd, field, d, True, digits, density),
             _unit_triangular(rnd, field, d, False, digits, density),
             _permutation(rnd, field, d)]
    exps = [rnd.randint(*diag_range) for _ in range(d)]
    mid = SeriesMatrix.u_diagonal(field, exps)
    mid_inv = SeriesMatrix.u_diagonal(field, [-e for e in exps])
    a = left[0]
    for f in left[1:] + [mid] + right:
        a = a * f
    inv_factors = ([right[2].transpose(), _triangular_inverse(right[1]),
                    _triangular_inverse(right[0]), mid_inv,
                    _triangular_inverse(left[2]), _triangular_inverse(left[1]),
                    left[0].transpose()])
    ainv = inv_factors[0]
    for f in inv_factors[1:]:
        ainv = ainv * f
    return a, ainv


def random_field(rnd, primes=(2, 3, 5), max_r=2, coeff_frobenius=None):
    p = rnd.choice(list(primes))
    r = rnd.randint(1, max_r)
    cf = rnd.random() < 0.5 if coeff_frobenius is None else coeff_frobenius
    if r == 1:
        return FieldSpec(p, coeff_frobenius=cf)
    from .fields import find_irreducible
    return FieldSpec(p, r, modulus=find_irreducible(p, r), coeff_frobenius=cf)


def random_type_total(rnd, field, d, v_det, span=2):
    """A non-increasing integer vector whose total is v_det mod (p - 1).

    Scans with a mismatched total are empty by the determinant constraint,
    so samplers aiming at nonempty searches fix the congruence here.
    """
    parts = sorted((rnd.randint(-span, span) for _ in range(d)), reverse=True)
    gap = (v_det - sum(parts)) % (field.p - 1) if field.p > 2 else 0
    parts[0] += gap
    return tuple(parts)
