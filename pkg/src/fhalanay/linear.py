"""Stability criterion for coupled linear fractional delay systems.

The system is

    D^alpha x(t) = A x(t) + B x(t - tau1) + E y(t - tau2),   t > 0
    y(t)         = C x(t) + D y(t - tau3),                   t >= 0

with histories ``phi`` for x and ``psi`` for y on ``[-tau, 0]``.  Lifting it
to its positive representation gives a positive system whose summed states
obey the coupled Halanay inequality with coefficients ``a0, ..., e0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import CompatibilityError, ConfigError, DomainError
from .halanay import DEFAULT_TOL, DecayEnvelope, HalanayParams, build_envelope, check_feasibility
from .history import HistoryFunction, LiftedHistory
from .mittag_leffler import fractional_order
from .posrep import delta, gamma_metzler, pi_mat

COMPAT_TOL = 1e-9


def _matrix(m, name: str) -> np.ndarray:
    a = np.array(m, dtype=float)
    if a.ndim != 2:
        raise ConfigError(f"{name} must be a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ConfigError(f"{name} has non-finite entries")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CoupledLinearSystem:
    """Matrices, delays, order and histories of the coupled system.

    ``lifted_from`` is ``(d, n)`` for a system produced by ``lift_system``.
    """

    A: np.ndarray
    B: np.ndarray
    E: np.ndarray
    C: np.ndarray
    D: np.ndarray
    tau1: float
    tau2: float
    tau3: float
    alpha: float
    phi: HistoryFunction
    psi: HistoryFunction
    lifted_from: tuple[int, int] | None = None

    def __post_init__(self):
        for name in "ABECD":
            object.__setattr__(self, name, _matrix(getattr(self, name), name))
        d, n = self.A.shape[0], self.D.shape[0]
        expected = {"A": (d, d), "B": (d, d), "E": (d, n), "C": (n, d), "D": (n, n)}
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise ConfigError(f"{name} has shape {getattr(self, name).shape}, expected {shape} (d={d}, n={n})")
        for name in ("tau1", "tau2", "tau3"):
            val = float(getattr(self, name))
            if not (val > 0.0 and math.isfinite(val)):
                raise DomainError(f"delay {name} must be positive, got {val!r}")
            object.__setattr__(self, name, val)
        object.__setattr__(self, "alpha", fractional_order(self.alpha))
        if self.phi.dim != d:
            raise ConfigError(f"phi has dimension {self.phi.dim}, expected {d}")
        if self.psi.dim != n:
            raise ConfigError(f"psi has dimension {self.psi.dim}, expected {n}")
        self.phi.check_domain(self.tau)
        self.psi.check_domain(self.tau)

    @property
    def d(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.D.shape[0]

    @property
    def tau(self) -> float:
        return max(self.tau1, self.tau2, self.tau3)

    @property
    def delays(self) -> tuple[float, float, float]:
        return (self.tau1, self.tau2, self.tau3)


def _compat_vector(s: CoupledLinearSystem) -> tuple[np.ndarray, np.ndarray]:
    """``(C phi(0) + D psi(-tau3), psi(0))``."""
    lhs = s.C @ s.phi(0.0) + s.D @ s.psi(-s.tau3)
    return lhs, s.psi(0.0)


def check_compatibility(s: CoupledLinearSystem) -> float:
    """Residual ``||C phi(0) + D psi(-tau3) - psi(0)||_inf``."""
    lhs, rhs = _compat_vector(s)
    return float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0


def is_compatible(s: CoupledLinearSystem, tol: float = COMPAT_TOL) -> bool:
    """Compatibility with tolerance ``tol * (1 + ||psi(0)||_inf)``.

    For a lifted system the test runs on the recovered original data
    ``delta @ (.)``; the lifted algebraic equation itself need not hold at 0.
    """
    lhs, rhs = _compat_vector(s)
    if s.lifted_from is not None:
        d, n = s.lifted_from
        lhs, rhs = delta(n) @ lhs, delta(n) @ rhs
    scale = 1.0 + (float(np.max(np.abs(rhs))) if rhs.size else 0.0)
    res = float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0
    return res <= tol * scale


def lift_system(s: CoupledLinearSystem) -> CoupledLinearSystem:
    """Positive representation with matrices Gamma(A), Pi(B), Pi(E), Pi(C), Pi(D).

    Raises:
        CompatibilityError: if the compatibility condition fails.
    """
    if s.lifted_from is not None:
        raise DomainError("system is already lifted")
    if not is_compatible(s):
        raise CompatibilityError(
            f"compatibility residual {check_compatibility(s):.3e} exceeds tolerance; "
            "psi(0) must equal C phi(0) + D psi(-tau3)"
        )
    return CoupledLinearSystem(
        A=gamma_metzler(s.A),
        B=pi_mat(s.B),
        E=pi_mat(s.E),
        C=pi_mat(s.C),
        D=pi_mat(s.D),
        tau1=s.tau1,
        tau2=s.tau2,
        tau3=s.tau3,
        alpha=s.alpha,
        phi=LiftedHistory(s.phi),
        psi=LiftedHistory(s.psi),
        lifted_from=(s.d, s.n),
    )


class Coefficients(NamedTuple):
    a0: float
    b0: float
    c0: float
    d0: float
    e0: float


def _exact_col_sums(m: np.ndarray) -> list[Fraction]:
    """Column sums in rational arithmetic on the decimal form of each entry."""
    return [sum((Fraction(repr(float(v))) for v in m[:, j]), Fraction(0)) for j in range(m.shape[1])]


def _max_col_sum(m: np.ndarray) -> Fraction:
    return max(_exact_col_sums(m)) if m.size else Fraction(0)


def extract_coeffs_exact(lifted: CoupledLinearSystem) -> tuple[Fraction, ...]:
    """``(a0, b0, c0, d0, e0)`` as exact fractions of the decimal data."""
    if lifted.lifted_from is None:
        raise DomainError("extract_coeffs expects a lifted system")
    a0 = -_max_col_sum(lifted.A)
    return (a0, _max_col_sum(lifted.B), _max_col_sum(lifted.C), _max_col_sum(lifted.D), _max_col_sum(lifted.E))


def extract_coeffs(lifted: CoupledLinearSystem) -> Coefficients:
    """Scalar coefficients of the lifted system.

    ``a0`` is minus the largest column sum of the lifted state matrix; the
    others are the largest column sums of the lifted coupling matrices.
    """
    return Coefficients(*(float(v) for v in extract_coeffs_exact(lifted)))


@dataclass(frozen=True)
class StabilityReport:
    coefficients: Coefficients
    margin: float
    margin_exact: Fraction | None
    feasible: bool
    lambda_star: float | None
    envelope: DecayEnvelope | None
    lifted_dims: tuple[int, int]
    compatibility_residual: float
    sup_u0: float
    sup_v0: float
    notes: tuple[str, ...] = field(default=())

    @property
    def verdict(self) -> str:
        return "globally attractive" if self.feasible else "inconclusive"

    def x_bound(self, t):
        """Bound on ``max_i |x_i(t)|`` (also on ``sum_i |x_i(t)|``)."""
        return self.envelope.u_bound(t)

    def y_bound(self, t):
        return self.envelope.v_bound(t)

    def to_dict(self) -> dict:
        c = self.coefficients
        return {
            "coefficients": {"a0": c.a0, "b0": c.b0, "c0": c.c0, "d0": c.d0, "e0": c.e0},
            "margin": self.margin,
            "margin_exact": str(self.margin_exact) if self.margin_exact is not None else None,
            "feasible": self.feasible,
            "verdict": self.verdict,
            "lambda_star": self.lambda_star,
            "envelope": self.envelope.to_dict() if self.envelope else None,
            "lifted_dims": list(self.lifted_dims),
            "compatibility_residual": self.compatibility_residual,
            "sup_u0": self.sup_u0,
            "sup_v0": self.sup_v0,
            "notes": list(self.notes),
        }


def halanay_params(s: CoupledLinearSystem, coeffs: Coefficients) -> HalanayParams:
    return HalanayParams(
        alpha=s.alpha,
        a=coeffs.a0,
        b=coeffs.b0,
        c=coeffs.c0,
        d=coeffs.d0,
        e=coeffs.e0,
        f=0.0,
        tau1=s.tau1,
        tau2=s.tau2,
        tau3=s.tau3,
    )


def analyze(s: CoupledLinearSystem, tol: float = DEFAULT_TOL) -> StabilityReport:
    """Lift, extract coefficients, test the criterion and build the envelope.

    An infeasible criterion gives ``feasible=False`` without raising: the
    criterion is sufficient only, so failure is inconclusive.
    """
    lifted = lift_system(s)
    coeffs = extract_coeffs(lifted)
    params = halanay_params(s, coeffs)
    feas = check_feasibility(params)
    notes = ["M bounds the summed lifted histories sup sum_i pi(phi)_i and sup sum_i pi(psi)_i"]
    sup_u0 = s.phi.sup_norm1(s.tau)
    sup_v0 = s.psi.sup_norm1(s.tau)
    envelope = None
    lam = None
    if feas.feasible:
        envelope = build_envelope(params, sup_u0, sup_v0, tol)
        lam = envelope.lambda_star
        notes.extend(envelope.notes)
    else:
        notes.append("criterion not satisfied: " + ", ".join(feas.violations))
    return StabilityReport(
        coefficients=coeffs,
        margin=feas.margin,
        margin_exact=feas.margin_exact,
        feasible=feas.feasible,
        lambda_star=lam,
        envelope=envelope,
        lifted_dims=(2 * s.d, 2 * s.n),
        compatibility_residual=check_compatibility(s),
        sup_u0=sup_u0,
        sup_v0=sup_v0,
        notes=tuple(notes),
    )


def compatible_linear_psi(s_C, s_D, tau: float, tau3: float, phi0, psi_far) -> HistoryFunction:
    """Linear ``psi`` on ``[-tau, 0]`` with ``psi(-tau) = psi_far`` satisfying compatibility.

    With ``psi(s) = psi0 + (psi0 - psi_far) s / tau`` and ``r = tau3 / tau``
    the condition reads ``(I - (1 - r) D) psi0 = C phi0 + r D psi_far``.
    """
    C = np.asarray(s_C, dtype=float)
    D = np.asarray(s_D, dtype=float)
    phi0 = np.asarray(phi0, dtype=float)
    far = np.asarray(psi_far, dtype=float)
    r = tau3 / tau
    psi0 = np.linalg.solve(np.eye(D.shape[0]) - (1.0 - r) * D, C @ phi0 + r * (D @ far))
    return HistoryFunction.polynomial(np.stack([psi0, (psi0 - far) / tau], axis=1))
