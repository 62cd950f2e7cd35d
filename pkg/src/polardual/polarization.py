"""Polarizations as integral alternating forms.

A polarization ``lambda: Lambda -> dual(Lambda)`` of a g-dimensional abelian
variety is stored as its matrix ``E`` (2g x 2g, alternating, nondegenerate)
with respect to a basis of ``Lambda = Z^2g`` and the dual basis of the dual
lattice.  With that convention the inverse-isogeny polarization is the
literal matrix ``e * E^-1`` where ``e`` is the exponent, and the identities
relating the various duals become integer matrix identities.

Positivity (ampleness) cannot be seen from ``E`` alone; see
:mod:`polardual.complex_torus`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .errors import (
    IntegralityFailure,
    NotSkew,
    OddDimension,
    PairingViolation,
    ShapeMismatch,
    Singular,
    ValidationError,
)
from .exact_core import (
    IntMatrix,
    det,
    inverse_rational,
    pfaffian,
    smith_normal_form,
)
from .moduli_types import TypeVector, d_dual_type, delta_type, validate_type

__all__ = [
    "PolarizationForm",
    "TypeVector",
    "FiniteAbelianInvariants",
    "standard_form",
    "type_of",
    "exponent",
    "degree",
    "dual_d_form",
    "dual_delta_form",
    "line_bundle_dual_form",
    "kernel_invariants",
    "frobenius_basis",
    "verify_duality",
    "DualityReport",
]


@dataclass(frozen=True)
class PolarizationForm:
    """Nondegenerate integral alternating form ``E`` on ``Z^2g``."""

    E: IntMatrix
    g: int = field(default=0)

    def __post_init__(self):
        E = self.E
        if not isinstance(E, IntMatrix):
            E = IntMatrix(E)
            object.__setattr__(self, "E", E)
        if not E.is_square():
            raise ShapeMismatch(f"form must be square, got {E.shape}")
        if E.rows % 2:
            raise OddDimension(f"form must have even size, got {E.rows}")
        if self.g and self.g * 2 != E.rows:
            raise ShapeMismatch(f"g={self.g} does not match a {E.rows}x{E.rows} form")
        object.__setattr__(self, "g", E.rows // 2)
        if not E.is_skew():
            raise NotSkew("form is not alternating (E^T != -E)")
        if det(E) == 0:
            raise Singular("form is degenerate (det E = 0)")

    @classmethod
    def from_rows(cls, rows) -> "PolarizationForm":
        return cls(IntMatrix(rows))

    def conjugate(self, U: IntMatrix) -> "PolarizationForm":
        """The same polarization written in the basis given by the columns of ``U``."""
        return PolarizationForm(U.T @ self.E @ U)


@dataclass(frozen=True)
class FiniteAbelianInvariants:
    """Invariant factors of ``K(lambda) = coker(E)``, trivial factors included."""

    factors: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        f = self.factors
        if len(f) % 2 or any(f[2 * i] != f[2 * i + 1] for i in range(len(f) // 2)):
            raise PairingViolation(f"invariant factors {f} do not come in equal pairs")

    @property
    def order(self) -> int:
        out = 1
        for x in self.factors:
            out *= x
        return out

    def paired_type(self) -> TypeVector:
        return TypeVector(self.factors[::2])


def standard_form(t) -> PolarizationForm:
    """``[[0, D], [-D, 0]]`` with ``D = diag(t)``."""
    t = validate_type(t)
    g = t.g
    rows = [[0] * (2 * g) for _ in range(2 * g)]
    for i, d in enumerate(t):
        rows[i][g + i] = d
        rows[g + i][i] = -d
    return PolarizationForm(IntMatrix(rows))


def _as_form(P) -> PolarizationForm:
    if isinstance(P, PolarizationForm):
        return P
    return PolarizationForm(P if isinstance(P, IntMatrix) else IntMatrix(P))


def kernel_invariants(P) -> FiniteAbelianInvariants:
    P = _as_form(P)
    snf = smith_normal_form(P.E)
    return FiniteAbelianInvariants(snf.invariant_factors)


def type_of(P) -> TypeVector:
    """Type of ``P`` read off the Smith normal form of ``E``."""
    return kernel_invariants(P).paired_type()


def exponent(P) -> int:
    """Exponent ``e``: the largest invariant factor.

    Cross-checked against the other characterisation, the least ``e`` with
    ``e * E^-1`` integral.
    """
    P = _as_form(P)
    e = type_of(P).exponent
    minimal = inverse_rational(P.E).denominator_lcm()
    if minimal != e:
        raise IntegralityFailure(f"exponent {e} disagrees with minimal multiplier {minimal}")
    return e


def degree(P) -> int:
    """``|Pf(E)| = d1 * ... * dg``."""
    return abs(pfaffian(_as_form(P).E))


def _scaled_inverse(P: PolarizationForm, scale: int) -> IntMatrix:
    M = inverse_rational(P.E) * Fraction(scale)
    if not M.is_integral():
        raise IntegralityFailure(f"{scale} * E^-1 is not integral")
    return M.to_int()


def dual_d_form(P) -> PolarizationForm:
    """The polarization ``e * E^-1`` on the dual, composing with ``E`` to ``e``."""
    P = _as_form(P)
    e = exponent(P)
    ED = _scaled_inverse(P, e)
    eI = IntMatrix.identity(2 * P.g) * e
    if ED @ P.E != eI or P.E @ ED != eI:
        raise IntegralityFailure("e * E^-1 does not compose with E to e * I")
    return PolarizationForm(ED)


def dual_delta_form(P) -> PolarizationForm:
    """``d1 * e * E^-1``; applying it twice returns ``E`` exactly."""
    P = _as_form(P)
    t = type_of(P)
    return PolarizationForm(_scaled_inverse(P, t[0] * t.exponent))


def line_bundle_dual_form(P) -> PolarizationForm:
    """``d * E^-1`` with ``d`` the degree; equals ``d1...d(g-1)`` times the D-dual."""
    P = _as_form(P)
    d = degree(P)
    F = _scaled_inverse(P, d)
    if F @ P.E != IntMatrix.identity(2 * P.g) * d:
        raise IntegralityFailure("(d E^-1) E != d I")
    return PolarizationForm(F)


def frobenius_basis(P) -> tuple[IntMatrix, TypeVector]:
    """Symplectic basis: unimodular ``U`` with ``U^T E U == standard_form(t)``.

    Euclidean reduction on pairs of basis vectors.  At step ``k`` the entry of
    least absolute value is moved to position ``(2k, 2k+1)``, the rest of rows
    ``2k`` and ``2k+1`` is reduced modulo it, and whenever it fails to divide
    the remaining block a vector is added to ``v_2k`` to expose a smaller
    entry.  The pairs are interleaved during the reduction and put into
    ``(e_1..e_g, f_1..f_g)`` order at the end.
    """
    P = _as_form(P)
    n = 2 * P.g
    A = P.E.tolist()
    U = IntMatrix.identity(n).tolist()

    def swap(i, j):
        if i == j:
            return
        A[i], A[j] = A[j], A[i]
        for M in (A, U):
            for r in M:
                r[i], r[j] = r[j], r[i]

    def add(dst, src, c):
        # v_dst += c * v_src
        for M in (A, U):
            for r in M:
                r[dst] += c * r[src]
        A[dst] = [a + c * b for a, b in zip(A[dst], A[src])]

    for k in range(0, n, 2):
        p, q = k, k + 1
        while True:
            best = None
            for i in range(k, n):
                for j in range(i + 1, n):
                    a = A[i][j]
                    if a and (best is None or abs(a) < best[0]):
                        best = (abs(a), i, j)
            i, j = best[1], best[2]
            swap(p, i)
            swap(q, j if j != p else i)
            if A[p][q] < 0:
                swap(p, q)
            piv = A[p][q]
            clean = True
            for m in range(k + 2, n):
                if A[p][m]:
                    add(m, q, -(A[p][m] // piv))
                    clean = clean and A[p][m] == 0
                if A[q][m]:
                    add(m, p, A[q][m] // piv)
                    clean = clean and A[q][m] == 0
            if not clean:
                continue
            bad = next((i for i in range(k + 2, n)
                        if any(A[i][j] % piv for j in range(k + 2, n))), None)
            if bad is None:
                break
            add(p, bad, 1)

    order = list(range(0, n, 2)) + list(range(1, n, 2))
    Uf = IntMatrix([[row[c] for c in order] for row in U])
    t = TypeVector(tuple(A[k][k + 1] for k in range(0, n, 2)))
    return Uf, t


@dataclass
class DualityReport:
    checks: dict[str, bool] = field(default_factory=dict)
    details: dict[str, Any] = field(default_factory=dict)
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "checks": dict(self.checks),
            "details": self.details,
            "error": self.error,
        }


def verify_duality(P) -> DualityReport:
    """Replay every duality identity for ``P`` in exact arithmetic.

    Failures (including invalid input) are recorded in the report, never
    raised.
    """
    report = DualityReport()
    try:
        P = _as_form(P)
        t = type_of(P)
        e = exponent(P)
        n = 2 * P.g
        eI = IntMatrix.identity(n) * e
        lam_D = dual_d_form(P)
        lam_delta = dual_delta_form(P)
        U, t_frob = frobenius_basis(P)
    except (ValidationError, IntegralityFailure, ValueError) as exc:
        report.error = f"{type(exc).__name__}: {exc}"
        return report

    c = report.checks
    c["lambdaD_after_lambda"] = lam_D.E @ P.E == eI
    c["lambda_after_lambdaD"] = P.E @ lam_D.E == eI
    c["d_dual_type"] = type_of(lam_D) == d_dual_type(t)
    c["delta_dual_type"] = type_of(lam_delta) == delta_type(t)
    c["delta_involution"] = dual_delta_form(lam_delta).E == P.E
    c["delta_exponent"] = exponent(lam_delta) == e
    c["degree_pfaffian"] = degree(P) == t.degree and degree(P) ** 2 == det(P.E)
    c["frobenius_cross_check"] = t_frob == t and U.T @ P.E @ U == standard_form(t).E
    report.details = {
        "g": P.g,
        "type": [str(x) for x in t],
        "exponent": str(e),
        "degree": str(t.degree),
        "d_dual_type": [str(x) for x in type_of(lam_D)],
        "delta_type": [str(x) for x in type_of(lam_delta)],
    }
    return report
