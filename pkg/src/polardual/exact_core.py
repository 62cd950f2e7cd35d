"""Exact integer and rational matrix algebra.

Matrices are small immutable row-major containers of Python ``int`` or
``fractions.Fraction``; nothing here ever rounds.  The algorithms are the
classical ones: Bareiss elimination for determinants, Gauss-Jordan over
``Fraction`` for inverses, the Euclidean Smith normal form with both
transformation matrices, and congruence elimination for Pfaffians.

>>> J = IntMatrix([[0, 1], [-1, 0]])
>>> det(J), pfaffian(J)
(1, 1)
>>> inverse_rational(IntMatrix([[0, 2], [-2, 0]]))
RatMatrix([['0', '-1/2'], ['1/2', '0']])
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .errors import NonSquare, NotSkew, OddDimension, ShapeMismatch, Singular


class _Matrix:
    __slots__ = ("_rows",)
    _coerce = staticmethod(int)

    def __init__(self, rows: Iterable[Iterable]):
        data = tuple(tuple(self._coerce(x) for x in row) for row in rows)
        if not data or not data[0]:
            raise ShapeMismatch("matrix must have at least one row and column")
        width = len(data[0])
        if any(len(r) != width for r in data):
            raise ShapeMismatch("ragged rows")
        self._rows = data

    @classmethod
    def identity(cls, n: int):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int):
        return cls([[0] * cols for _ in range(rows)])

    @classmethod
    def diagonal(cls, entries: Sequence):
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def rows(self) -> int:
        return len(self._rows)

    @property
    def cols(self) -> int:
        return len(self._rows[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def row(self, i: int) -> tuple:
        return self._rows[i]

    def tolist(self) -> list[list]:
        return [list(r) for r in self._rows]

    def entries(self):
        for r in self._rows:
            yield from r

    @property
    def T(self):
        return type(self)(zip(*self._rows))

    def is_skew(self) -> bool:
        n = self.rows
        return self.is_square() and all(
            self._rows[i][j] == -self._rows[j][i] for i in range(n) for j in range(i, n)
        )

    def is_symmetric(self) -> bool:
        return self == self.T

    def __eq__(self, other):
        if not isinstance(other, _Matrix):
            return NotImplemented
        return self._rows == other._rows

    def __hash__(self):
        return hash(self._rows)

    def _result_type(self, other):
        if isinstance(self, RatMatrix) or isinstance(other, RatMatrix):
            return RatMatrix
        return IntMatrix

    def __add__(self, other):
        if not isinstance(other, _Matrix):
            return NotImplemented
        if self.shape != other.shape:
            raise ShapeMismatch(f"cannot add {self.shape} and {other.shape}")
        cls = self._result_type(other)
        return cls([a + b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows))

    def __neg__(self):
        return type(self)([-a for a in r] for r in self._rows)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, _Matrix):
            return NotImplemented
        cls = RatMatrix if isinstance(scalar, Fraction) else type(self)
        return cls([scalar * a for a in r] for r in self._rows)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, _Matrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
        cls = self._result_type(other)
        cols = list(zip(*other._rows))
        return cls([sum(a * b for a, b in zip(r, c)) for c in cols] for r in self._rows)

    def __repr__(self):
        return f"{type(self).__name__}({[[str(x) for x in r] for r in self._rows]!r})"


class IntMatrix(_Matrix):
    """Immutable matrix over Z."""

    __slots__ = ()

    @staticmethod
    def _coerce(x):
        if isinstance(x, bool):
            raise TypeError("booleans are not matrix entries")
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"non-integral entry {x}")
            return x.numerator
        if isinstance(x, str):
            return int(x.strip())
        if isinstance(x, int):
            return int(x)
        # numpy integers and the like
        if int(x) != x:
            raise ValueError(f"non-integral entry {x!r}")
        return int(x)


class RatMatrix(_Matrix):
    """Immutable matrix over Q; entries are always reduced ``Fraction``s."""

    __slots__ = ()

    @staticmethod
    def _coerce(x):
        if isinstance(x, float):
            raise TypeError("floats are not exact; pass a Fraction or a string")
        return Fraction(x)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.entries())

    def denominator_lcm(self) -> int:
        """Smallest positive integer ``m`` with ``m * self`` integral."""
        return lcm(*(x.denominator for x in self.entries()))

    def to_int(self) -> IntMatrix:
        if not self.is_integral():
            raise ValueError("matrix has non-integral entries")
        return IntMatrix(self._rows)


def as_rational(A: _Matrix) -> RatMatrix:
    return A if isinstance(A, RatMatrix) else RatMatrix(A.tolist())


def _require_square(A: _Matrix) -> int:
    if not A.is_square():
        raise NonSquare(f"expected a square matrix, got shape {A.shape}")
    return A.rows


def det(A: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = _require_square(A)
    if isinstance(A, RatMatrix):
        return det_rational(A)
    M = A.tolist()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = M[k][k]
        for i in range(k + 1, n):
            Mi, Mk = M[i], M[k]
            for j in range(k + 1, n):
                # exact by Sylvester's identity
                Mi[j] = (Mi[j] * pivot - Mi[k] * Mk[j]) // prev
            Mi[k] = 0
        prev = pivot
    return sign * M[n - 1][n - 1]


def det_rational(A: _Matrix) -> Fraction:
    n = _require_square(A)
    M = [list(map(Fraction, r)) for r in A.tolist()]
    result = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if M[i][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            M[k], M[p] = M[p], M[k]
            result = -result
        result *= M[k][k]
        for i in range(k + 1, n):
            f = M[i][k] / M[k][k]
            if f:
                M[i] = [a - f * b for a, b in zip(M[i], M[k])]
    return result


def inverse_rational(A: _Matrix) -> RatMatrix:
    """Exact inverse over Q by Gauss-Jordan elimination.

    Raises :class:`~polardual.errors.Singular` when ``det(A) == 0``.
    """
    n = _require_square(A)
    M = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(A.tolist())]
    for k in range(n):
        p = next((i for i in range(k, n) if M[i][k] != 0), None)
        if p is None:
            raise Singular("matrix is singular")
        M[k], M[p] = M[p], M[k]
        inv = 1 / M[k][k]
        M[k] = [x * inv for x in M[k]]
        for i in range(n):
            f = M[i][k]
            if i != k and f:
                Mk = M[k]
                M[i] = [a - f * b for a, b in zip(M[i], Mk)]
    return RatMatrix(r[n:] for r in M)


@dataclass(frozen=True)
class SnfResult:
    """``U @ A @ V == S`` with ``U``, ``V`` unimodular and ``S`` in Smith form."""

    S: IntMatrix
    U: IntMatrix
    V: IntMatrix

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return tuple(self.S[i, i] for i in range(min(self.S.shape)))


def smith_normal_form(A: IntMatrix) -> SnfResult:
    """Smith normal form with left and right transformation matrices.

    The diagonal of ``S`` is nonnegative and each entry divides the next;
    trailing zeros stand for the free part of a singular matrix.
    """
    m, n = A.shape
    M = A.tolist()
    U = IntMatrix.identity(m).tolist()
    V = IntMatrix.identity(n).tolist()

    def swap_rows(i, j):
        M[i], M[j] = M[j], M[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for R in (M, V):
            for r in R:
                r[i], r[j] = r[j], r[i]

    def add_row(dst, src, c):
        M[dst] = [a + c * b for a, b in zip(M[dst], M[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, c):
        for R in (M, V):
            for r in R:
                r[dst] += c * r[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    a = M[i][j]
                    if a and (best is None or abs(a) < best[0]):
                        best = (abs(a), i, j)
            if best is None:
                return SnfResult(IntMatrix(M), IntMatrix(U), IntMatrix(V))
            _, i, j = best
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            if M[t][t] < 0:
                M[t] = [-a for a in M[t]]
                U[t] = [-a for a in U[t]]
            p = M[t][t]
            clean = True
            for i in range(t + 1, m):
                if M[i][t]:
                    add_row(i, t, -(M[i][t] // p))
                    clean = clean and M[i][t] == 0
            for j in range(t + 1, n):
                if M[t][j]:
                    add_col(j, t, -(M[t][j] // p))
                    clean = clean and M[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, m)
                        if any(M[i][j] % p for j in range(t + 1, n))), None)
            if bad is None:
                break
            add_row(t, bad, 1)
    return SnfResult(IntMatrix(M), IntMatrix(U), IntMatrix(V))


def pfaffian(A: _Matrix) -> int | Fraction:
    """Pfaffian of a skew-symmetric matrix.

    Normalised so that ``pfaffian([[0, 1], [-1, 0]]) == 1``; this agrees with
    the first-row expansion ``Pf(A) = sum_j (-1)**j a[0][j] Pf(A minus rows
    and columns 0, j)`` (j counted from 1).  Computed by congruence
    elimination over ``Fraction``, so it is polynomial in the dimension.
    """
    n = _require_square(A)
    if not A.is_skew():
        raise NotSkew("pfaffian requires a skew-symmetric matrix")
    if n % 2:
        raise OddDimension(f"pfaffian requires even dimension, got {n}")
    M = [list(map(Fraction, r)) for r in A.tolist()]
    result = Fraction(1)
    for k in range(0, n, 2):
        p = next((j for j in range(k + 1, n) if M[k][j] != 0), None)
        if p is None:
            return 0
        if p != k + 1:
            # simultaneous row/column swap flips the Pfaffian
            M[k + 1], M[p] = M[p], M[k + 1]
            for r in M:
                r[k + 1], r[p] = r[p], r[k + 1]
            result = -result
        piv = M[k][k + 1]
        result *= piv
        for j in range(k + 2, n):
            # v_j -= (a_kj / a_k,k+1) v_{k+1} + (a_k+1,j / a_k+1,k) v_k
            a = M[k][j] / piv
            b = M[k + 1][j] / -piv
            if a or b:
                for r in M:
                    r[j] -= a * r[k + 1] + b * r[k]
                M[j] = [x - a * y - b * z for x, y, z in zip(M[j], M[k + 1], M[k])]
    if result.denominator == 1 and not isinstance(A, RatMatrix):
        return result.numerator
    return result


def random_unimodular(n: int, seed: int) -> IntMatrix:
    """Seeded unimodular matrix: ``20 * n`` random shears, then a random sign.

    Each shear adds ``c`` times one row to another with ``c`` a nonzero
    integer in ``[-3, 3]``.  A final coin flip negates the first row so that
    both determinant signs occur.  Uses :class:`random.Random` (MT19937), whose
    stream is fixed across platforms for a given integer seed.
    """
    if n < 1:
        raise ValueError("n must be positive")
    rng = random.Random(seed)
    M = IntMatrix.identity(n).tolist()
    if n > 1:
        for _ in range(20 * n):
            i, j = rng.sample(range(n), 2)
            c = rng.choice((-3, -2, -1, 1, 2, 3))
            M[i] = [a + c * b for a, b in zip(M[i], M[j])]
    if rng.random() < 0.5:
        M[0] = [-a for a in M[0]]
    return IntMatrix(M)


def is_unimodular(U: IntMatrix) -> bool:
    return U.is_square() and det(U) in (1, -1)
