"""Period matrices, Riemann relations and the dual complex torus.

A torus ``C^g / Pi Z^2g`` carries the polarization ``E`` (written in the
basis given by the columns of ``Pi``) when

* ``Pi E^-1 Pi^T = 0``, and
* ``i Pi E^-1 conj(Pi)^T`` is negative definite.

The sign in the second condition is this package's convention: it is the
one that makes the standard family ``Pi = (D | Z)``, ``E = [[0, D], [-D, 0]]``
with ``Im Z > 0`` pass, since there the matrix equals ``-2 Im Z``.

The dual torus is modelled on antilinear functionals ``l_w(v) = sum w_i
conj(v_i)`` paired with ``V`` by ``<l_w, v> = Im l_w(v)``.  Its lattice is
spanned by the ``w_j`` with ``<l_wj, pi_k> = delta_jk``.  In these
coordinates the polarization maps ``pi_k`` to ``sum_j w_j E[k, j]``, i.e. the
lattice map has matrix ``E^T``; and because ``dual(dual(Pi)) = -Pi``, the
dual polarization ``d1 e E^-1`` is written on the dual lattice as
``-d1 e E^-1``.  Both sign choices are frozen below and asserted on every
verification.

Everything here is double precision; conclusions about types are always
re-derived in exact arithmetic by :mod:`polardual.polarization`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import (
    ConventionMismatch,
    IllConditioned,
    NotPositive,
    NotSymmetric,
    ShapeMismatch,
)
from .exact_core import IntMatrix, inverse_rational
from .moduli_types import delta_type, validate_type
from .polarization import PolarizationForm, dual_delta_form, standard_form, type_of

DEFAULT_TOL = 1e-9
ROUND_TRIP_TOL = 1e-6
PAIRING_TOL = 1e-8
CONDITION_LIMIT = 1e12
SIEGEL_EPSILON = 0.1

# Frozen chart conventions (see module docstring).
LATTICE_MAP_CONVENTION = "E^T"
DUAL_FORM_SIGN = -1


@dataclass(frozen=True, eq=False)
class PeriodMatrix:
    """``g x 2g`` complex matrix whose columns span a lattice in ``C^g``."""

    Pi: np.ndarray

    def __post_init__(self):
        Pi = np.array(self.Pi, dtype=complex)
        if Pi.ndim != 2 or Pi.shape[1] != 2 * Pi.shape[0] or Pi.shape[0] == 0:
            raise ShapeMismatch(f"period matrix must be g x 2g, got {Pi.shape}")
        Pi.setflags(write=False)
        object.__setattr__(self, "Pi", Pi)
        cond = np.linalg.cond(self.real_stack())
        if not np.isfinite(cond) or cond > CONDITION_LIMIT:
            raise IllConditioned(f"columns do not span a lattice (cond = {cond:.3g})")

    @property
    def g(self) -> int:
        return self.Pi.shape[0]

    def real_stack(self) -> np.ndarray:
        """``[Re Pi; Im Pi]``: real coordinates of the lattice generators."""
        return np.vstack([self.Pi.real, self.Pi.imag])


@dataclass(frozen=True, eq=False)
class PolarizedTorus:
    Pi: PeriodMatrix
    P: PolarizationForm

    def __post_init__(self):
        if not isinstance(self.Pi, PeriodMatrix):
            object.__setattr__(self, "Pi", PeriodMatrix(self.Pi))
        if not isinstance(self.P, PolarizationForm):
            object.__setattr__(self, "P", PolarizationForm(IntMatrix(self.P)))
        if self.Pi.g != self.P.g:
            raise ShapeMismatch(f"period matrix has g={self.Pi.g}, form has g={self.P.g}")

    @property
    def g(self) -> int:
        return self.P.g

    def to_json(self) -> dict:
        return {
            "g": self.g,
            "pi_re": self.Pi.Pi.real.tolist(),
            "pi_im": self.Pi.Pi.imag.tolist(),
            "E": [[str(x) for x in r] for r in self.P.E.tolist()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PolarizedTorus":
        try:
            Pi = np.array(data["pi_re"], dtype=float) + 1j * np.array(data["pi_im"], dtype=float)
            E = IntMatrix(data["E"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ShapeMismatch(f"malformed torus record: {exc}") from exc
        T = cls(PeriodMatrix(Pi), PolarizationForm(E))
        if "g" in data and str(data["g"]) != str(T.g):
            raise ShapeMismatch("field g does not match the matrices")
        return T


def _float_matrix(M) -> np.ndarray:
    return np.array([[float(x) for x in r] for r in M.tolist()])


@dataclass
class TorusReport:
    checks: dict[str, bool] = field(default_factory=dict)
    values: dict[str, Any] = field(default_factory=dict)
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "checks": dict(self.checks),
            "values": dict(self.values),
            "error": self.error,
        }


def riemann_verify(T: PolarizedTorus, tol: float = DEFAULT_TOL) -> TorusReport:
    """Check both Riemann relations for ``(Pi, E)``.

    The first relation is measured relative to ``max|Pi|^2 * max|E^-1|``;
    the second passes when the largest eigenvalue of the Hermitian part of
    ``i Pi E^-1 conj(Pi)^T`` is below ``-tol``.
    """
    if not isinstance(T, PolarizedTorus):
        raise ShapeMismatch("riemann_verify expects a PolarizedTorus")
    Pi = T.Pi.Pi
    Einv = _float_matrix(inverse_rational(T.P.E))
    scale = max(1.0, np.abs(Pi).max() ** 2 * np.abs(Einv).max())
    R1 = Pi @ Einv @ Pi.T
    H = 1j * Pi @ Einv @ Pi.conj().T
    herm = (H + H.conj().T) / 2
    eig = np.linalg.eigvalsh(herm)
    r1 = float(np.abs(R1).max() / scale)
    r_herm = float(np.abs(H - herm).max() / scale)

    report = TorusReport()
    report.values = {
        "r1_residual": r1,
        "hermitian_residual": r_herm,
        "eig_max": float(eig.max()),
        "eig_min": float(eig.min()),
    }
    report.checks["R1"] = r1 < tol
    report.checks["R2"] = bool(-eig.max() > tol) and r_herm < tol
    return report


def _check_siegel(Z: np.ndarray) -> np.ndarray:
    Z = np.array(Z, dtype=complex)
    if Z.ndim != 2 or Z.shape[0] != Z.shape[1]:
        raise ShapeMismatch(f"Z must be square, got {Z.shape}")
    if np.abs(Z - Z.T).max() > 1e-12 * max(1.0, np.abs(Z).max()):
        raise NotSymmetric("Z is not symmetric")
    Y = Z.imag
    if np.linalg.eigvalsh((Y + Y.T) / 2).min() <= 0:
        raise NotPositive("Im Z is not positive definite")
    return Z


def siegel_standard_family(t, Z) -> PolarizedTorus:
    """``Pi = (diag(t) | Z)`` with the standard form of type ``t``."""
    t = validate_type(t)
    Z = _check_siegel(Z)
    if Z.shape[0] != t.g:
        raise ShapeMismatch(f"Z is {Z.shape[0]}x{Z.shape[0]} but the type has g={t.g}")
    Pi = np.hstack([np.diag(np.array(t.d, dtype=float)), Z])
    return PolarizedTorus(PeriodMatrix(Pi), standard_form(t))


def random_siegel_matrix(g: int, seed: int) -> np.ndarray:
    """Seeded point ``X + iY`` of Siegel space (numpy PCG64 stream).

    ``X`` is symmetric with entries uniform in ``[-1, 1]``; ``Y = A^T A + 0.1 I``
    with ``A`` uniform in ``[-1, 1]``.
    """
    rng = np.random.default_rng(seed)
    M = rng.uniform(-1.0, 1.0, size=(g, g))
    X = np.triu(M) + np.triu(M, 1).T
    A = rng.uniform(-1.0, 1.0, size=(g, g))
    Y = A.T @ A + SIEGEL_EPSILON * np.eye(g)
    Y = (Y + Y.T) / 2
    return X + 1j * Y


def random_siegel(t, seed: int) -> PolarizedTorus:
    t = validate_type(t)
    return siegel_standard_family(t, random_siegel_matrix(t.g, seed))


def dual_period_matrix(T) -> PeriodMatrix:
    """Period matrix of the dual torus in the basis dual to ``Pi``'s columns.

    Writing ``w = a + ib`` and ``v = x + iy`` we have ``Im(w^T conj(v)) =
    b.x - a.y``, so the conditions ``<l_wj, pi_k> = delta_jk`` say that the
    rows ``(b_j, -a_j)`` form the inverse of ``[Re Pi; Im Pi]``.
    """
    Pm = T.Pi if isinstance(T, PolarizedTorus) else T
    if not isinstance(Pm, PeriodMatrix):
        Pm = PeriodMatrix(Pm)
    g = Pm.g
    R = Pm.real_stack()
    cond = np.linalg.cond(R)
    if cond > CONDITION_LIMIT:
        raise IllConditioned(f"real period system has condition number {cond:.3g}")
    M = np.linalg.inv(R)
    b = M[:, :g]
    a = -M[:, g:]
    return PeriodMatrix((a + 1j * b).T)


def pairing_matrix(dual: PeriodMatrix, Pi: PeriodMatrix) -> np.ndarray:
    """``[j, k] -> Im(w_j^T conj(pi_k))``."""
    return (dual.Pi.T @ Pi.Pi.conj()).imag


def double_dual(T) -> PeriodMatrix:
    """Dualize twice and undo the sign from identifying ``V`` with its bidual."""
    Pm = T.Pi if isinstance(T, PolarizedTorus) else T
    dd = dual_period_matrix(dual_period_matrix(Pm))
    return PeriodMatrix(-dd.Pi)


def hermitian_form(T: PolarizedTorus) -> np.ndarray:
    """Matrix ``Hm`` of ``H(u, v) = E(iu, v) + i E(u, v) = u^T Hm conj(v)``."""
    g = T.g
    Rinv = np.linalg.inv(T.Pi.real_stack())
    Er = Rinv.T @ _float_matrix(T.P.E) @ Rinv
    return Er[g:, :g] + 1j * Er[:g, :g]


def lattice_map_matrix(T: PolarizedTorus, dual: PeriodMatrix | None = None) -> np.ndarray:
    """Real ``N`` with ``phi_H(Pi) = dual @ N``, ``phi_H(v) = H(v, .)``."""
    if dual is None:
        dual = dual_period_matrix(T)
    Phi = hermitian_form(T).T @ T.Pi.Pi
    lhs = dual.real_stack()
    rhs = np.vstack([Phi.real, Phi.imag])
    return np.linalg.solve(lhs, rhs)


def _convention_variants(E: IntMatrix) -> dict[str, np.ndarray]:
    F = _float_matrix(E)
    return {"E": F, "-E": -F, "E^T": F.T, "-E^T": -F.T}


def dual_chart_form(P: PolarizationForm) -> PolarizationForm:
    """The dual polarization written in the basis of :func:`dual_period_matrix`."""
    return PolarizationForm(dual_delta_form(P).E * DUAL_FORM_SIGN)


def dual_polarization_verify(T: PolarizedTorus, tol: float = DEFAULT_TOL) -> TorusReport:
    """Check that the dual polarization is a genuine polarization of the dual torus.

    Raises ``ConventionMismatch`` if the computed lattice map matches none of
    ``E, -E, E^T, -E^T``, or matches one other than the frozen chart.
    """
    report = TorusReport()
    base = riemann_verify(T, tol)
    report.values["base"] = base.values
    report.checks["base_riemann"] = base.passed
    if not base.passed:
        report.error = "input torus fails the Riemann relations"
        return report

    dual = dual_period_matrix(T)
    pair_res = float(np.abs(pairing_matrix(dual, T.Pi) - np.eye(2 * T.g)).max())
    report.values["pairing_residual"] = pair_res
    report.checks["dual_pairing"] = pair_res < PAIRING_TOL

    N = lattice_map_matrix(T, dual)
    N_int = np.rint(N)
    scale = max(1.0, np.abs(N).max())
    report.values["lattice_map_integrality"] = float(np.abs(N - N_int).max() / scale)
    matches = [k for k, F in _convention_variants(T.P.E).items()
               if np.abs(N - F).max() <= ROUND_TRIP_TOL * scale]
    if not matches:
        raise ConventionMismatch("lattice map matches no signed/transposed variant of E")
    # E is alternating, so variants coincide in pairs; the frozen one must be among them
    if LATTICE_MAP_CONVENTION not in matches:
        raise ConventionMismatch(
            f"lattice map matches {matches}, expected {LATTICE_MAP_CONVENTION}")
    report.values["lattice_map_convention"] = LATTICE_MAP_CONVENTION
    report.checks["lattice_map"] = report.values["lattice_map_integrality"] < ROUND_TRIP_TOL

    Ehat = dual_chart_form(T.P)
    dual_riemann = riemann_verify(PolarizedTorus(dual, Ehat), tol)
    report.values["dual"] = dual_riemann.values
    report.checks["dual_riemann"] = dual_riemann.passed

    t = type_of(T.P)
    report.values["type"] = [str(x) for x in t]
    report.values["dual_type"] = [str(x) for x in type_of(Ehat)]
    report.checks["dual_type"] = type_of(Ehat) == delta_type(t)

    dd = double_dual(T)
    rt = float(np.abs(dd.Pi - T.Pi.Pi).max() / max(1.0, np.abs(T.Pi.Pi).max()))
    report.values["double_dual_residual"] = rt
    report.checks["double_dual"] = rt < ROUND_TRIP_TOL
    return report
