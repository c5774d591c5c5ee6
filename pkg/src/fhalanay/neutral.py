"""Contractivity and dissipativity of neutral fractional delay equations.

The equation is

    D^alpha [y(t) - N y(t - tau)] = f(t, y(t), y(t - tau), int_{t-tau}^t g(t, xi, y(xi)) dxi)

with ``2 ||N||^2 < 1``.  Under a one-sided Lipschitz condition on ``f``
(constants a1, b1, c1) and a Lipschitz kernel ``g`` (constant k1) two
solutions contract:

    ||y(t) - z(t)||^2 <= M1 E_alpha(-lambda* t^alpha)

Under the dissipative condition (constants gamma, a2, b2, c2, k2) every
solution enters the ball of squared radius ``R``.

Two decay rates are computed.  ``h_scalar`` is the scalar characteristic
equation ``lambda + a + K / E_alpha(-lambda tau^alpha) = 0`` with
``K = 2b - 2a ||N||^2 + 2c k^2 tau^2``.  The mapped rate is the root of the
characteristic function of the coupled Halanay inequality that the neutral
problem reduces to (``comparison_map``).  Envelopes use the smaller of the
available roots.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InfeasibleError
from .halanay import DEFAULT_TOL, HalanayParams, check_feasibility, gamma_constants, solve_lambda_star
from .history import HistoryFunction
from .mittag_leffler import fractional_order, ml_decay
from .roots import increasing_root

SUP_SAMPLES = 4096


def _finite(obj, names):
    for name in names:
        val = float(getattr(obj, name))
        if not math.isfinite(val):
            raise DomainError(f"{name} must be finite, got {val!r}")
        object.__setattr__(obj, name, val)


def _common_checks(obj):
    for name in ("k" + obj._suffix, "N_norm2"):
        if getattr(obj, name) < 0.0:
            raise DomainError(f"{name} must be nonnegative, got {getattr(obj, name)!r}")
    if not obj.tau > 0.0:
        raise DomainError(f"tau must be positive, got {obj.tau!r}")
    object.__setattr__(obj, "alpha", fractional_order(obj.alpha))


@dataclass(frozen=True)
class ContractivityParams:
    """One-sided Lipschitz constants ``a1, b1, c1``, kernel constant ``k1``.

    ``N_norm2`` is ``||N||^2`` for the operator 2-norm.
    """

    a1: float
    b1: float
    c1: float
    k1: float
    N_norm2: float
    tau: float = 1.0
    alpha: float = 1.0

    _suffix = "1"

    def __post_init__(self):
        _finite(self, ("a1", "b1", "c1", "k1", "N_norm2", "tau"))
        _common_checks(self)

    @property
    def a(self) -> float:
        return self.a1

    @property
    def K(self) -> float:
        """``2 b1 - 2 a1 ||N||^2 + 2 c1 k1^2 tau^2``."""
        return 2.0 * self.b1 - 2.0 * self.a1 * self.N_norm2 + 2.0 * self.c1 * self.k1**2 * self.tau**2

    @property
    def forcing(self) -> float:
        return 0.0

    def replace(self, **changes) -> "ContractivityParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class DissipativityParams:
    """Dissipative constants ``gamma, a2, b2, c2`` and kernel bound ``k2``."""

    gamma: float
    a2: float
    b2: float
    c2: float
    k2: float
    N_norm2: float
    tau: float = 1.0
    alpha: float = 1.0

    _suffix = "2"

    def __post_init__(self):
        _finite(self, ("gamma", "a2", "b2", "c2", "k2", "N_norm2", "tau"))
        _common_checks(self)

    @property
    def a(self) -> float:
        return self.a2

    @property
    def K(self) -> float:
        """``2 b2 - 2 a2 ||N||^2 + 2 c2 k2^2 tau^2``."""
        return 2.0 * self.b2 - 2.0 * self.a2 * self.N_norm2 + 2.0 * self.c2 * self.k2**2 * self.tau**2

    @property
    def forcing(self) -> float:
        return 2.0 * self.gamma

    def replace(self, **changes) -> "DissipativityParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def norm2_sq(N) -> float:
    """``||N||^2`` with the operator 2-norm (largest singular value)."""
    m = np.atleast_2d(np.asarray(N, dtype=float))
    return float(np.linalg.norm(m, 2)) ** 2 if m.size else 0.0


def history_bound(phi: HistoryFunction, tau: float, chi: HistoryFunction | None = None, samples: int = SUP_SAMPLES) -> float:
    """Sampled ``max_{[-tau, 0]} ||phi - chi||^2`` (``chi = 0`` if omitted)."""
    grid = np.linspace(-tau, 0.0, samples + 1)
    for h in (phi, chi):
        if h is not None and h.kind == "sampled":
            grid = np.union1d(grid, h.times[(h.times >= -tau) & (h.times <= 0.0)])
    diff = phi(grid) if chi is None else phi(grid) - chi(grid)
    return float(np.max(np.sum(diff * diff, axis=1)))


def violations(p: ContractivityParams | DissipativityParams) -> tuple[str, ...]:
    """Failed hypotheses; empty when all hold."""
    s = p._suffix
    out = []
    if isinstance(p, DissipativityParams) and p.gamma < 0.0:
        out.append("gamma < 0")
    if not p.a < 0.0:
        out.append(f"a{s} >= 0")
    K = p.K
    if K < 0.0:
        out.append(f"2b{s} - 2a{s}||N||^2 + 2c{s}k{s}^2 tau^2 < 0")
    if not K < -p.a:
        out.append(f"2b{s} - 2a{s}||N||^2 + 2c{s}k{s}^2 tau^2 >= -a{s}")
    if not 2.0 * p.N_norm2 < 1.0:
        out.append("2||N||^2 >= 1")
    return tuple(out)


def h_scalar(p: ContractivityParams | DissipativityParams, lam: float) -> float:
    """``lambda + a + K / E_alpha(-lambda tau^alpha)``."""
    lam = float(lam)
    if not lam >= 0.0:
        raise DomainError(f"lambda must be nonnegative, got {lam!r}")
    return lam + p.a + p.K / ml_decay(p.alpha, lam, p.tau)


def solve_scalar_root(p: ContractivityParams | DissipativityParams, tol: float = DEFAULT_TOL) -> float:
    """Root of ``h_scalar`` on ``(0, -a]``.

    ``h_scalar(0) = a + K < 0`` and ``h_scalar(-a) = K / E > 0`` (or ``= 0``
    when ``K = 0``, giving the root ``-a``).

    Raises:
        InfeasibleError: if the hypotheses fail.
    """
    bad = violations(p)
    if bad:
        raise InfeasibleError("neutral hypotheses fail: " + ", ".join(bad))
    return increasing_root(lambda lam: h_scalar(p, lam), 0.0, -p.a, tol)


def comparison_map(p: ContractivityParams | DissipativityParams) -> HalanayParams:
    """Halanay tuple of the comparison pair ``(u, w)``.

    ``u = ||e(t) - N e(t - tau)||^2`` and ``w = ||e(t)||^2`` satisfy the
    coupled inequality with ``a = -a_i, b = 0, e = K, c = 2, d = 2||N||^2``,
    ``f = 0`` (contractive) or ``2 gamma`` (dissipative) and all delays tau.

    Raises:
        InfeasibleError: if the mapped tuple violates the Halanay hypotheses.
    """
    q = _raw_map(p)
    feas = check_feasibility(q)
    if not feas.feasible:
        raise InfeasibleError(
            f"mapped Halanay tuple infeasible (margin {feas.margin!r}): " + ", ".join(feas.violations)
        )
    return q


@dataclass(frozen=True)
class MappedResult:
    """Outcome of the reduction to the coupled Halanay inequality."""

    params: HalanayParams
    feasible: bool
    margin: float
    lambda_star: float | None
    gamma2: float | None
    reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "feasible": self.feasible,
            "margin": self.margin,
            "lambda_star": self.lambda_star,
            "w_offset": self.gamma2,
            "reason": self.reason,
        }


def _raw_map(p) -> HalanayParams:
    return HalanayParams(
        alpha=p.alpha,
        a=-p.a,
        b=0.0,
        c=2.0,
        d=2.0 * p.N_norm2,
        e=p.K,
        f=p.forcing,
        tau1=p.tau,
        tau2=p.tau,
        tau3=p.tau,
    )


def _mapped(p, tol: float) -> MappedResult:
    try:
        q = comparison_map(p)
    except InfeasibleError as exc:
        q = _raw_map(p)
        return MappedResult(q, False, check_feasibility(q).margin, None, None, str(exc))
    return MappedResult(q, True, check_feasibility(q).margin, solve_lambda_star(q, tol), gamma_constants(q)[1])


@dataclass(frozen=True)
class NfdeReport:
    """Result of a contractivity or dissipativity analysis.

    ``envelope(t) = M E_alpha(-lambda* t^alpha) + R`` bounds ``||y - z||^2``
    (contractive, ``R = 0``) or ``||y||^2`` (dissipative).  ``M`` is the
    history bound M1 or M2; it is ``None`` when no history information was
    supplied, in which case only the rates and ``R`` are available.
    """

    kind: str
    params: ContractivityParams | DissipativityParams
    feasible: bool
    violations: tuple[str, ...]
    K: float
    lambda_scalar: float | None
    mapped: MappedResult
    lambda_star: float | None
    R: float
    M: float | None
    notes: tuple[str, ...] = field(default=())

    @property
    def radius(self) -> float:
        """Absorbing ball radius ``sqrt(R)``."""
        return math.sqrt(self.R)

    def envelope(self, t):
        if not self.feasible:
            raise InfeasibleError("no envelope: hypotheses fail")
        if self.M is None:
            raise DomainError("no envelope: history bound M was not supplied")
        return self.M * ml_decay(self.params.alpha, self.lambda_star, t) + self.R

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": self.params.to_dict(),
            "feasible": self.feasible,
            "violations": list(self.violations),
            "K": self.K,
            "lambda_scalar": self.lambda_scalar,
            "lambda_mapped": self.mapped.lambda_star,
            "mapped": self.mapped.to_dict(),
            "lambda_star": self.lambda_star,
            "R": self.R,
            "radius": self.radius,
            "M": self.M,
            "notes": list(self.notes),
        }


def _analyze(kind: str, p, tol: float, M: float | None) -> NfdeReport:
    if M is not None:
        M = float(M)
        if not (M >= 0.0 and math.isfinite(M)):
            raise DomainError(f"history bound M must be finite and nonnegative, got {M!r}")
    bad = violations(p)
    mapped = _mapped(p, tol)
    notes = []
    if bad:
        return NfdeReport(kind, p, False, bad, p.K, None, mapped, None, 0.0, M, ("hypotheses fail",))
    lam_s = solve_scalar_root(p, tol)
    lam = lam_s
    if mapped.feasible:
        if mapped.lambda_star < lam_s:
            notes.append("mapped root is smaller and sets the rate")
        lam = min(lam_s, mapped.lambda_star)
    else:
        notes.append("mapped Halanay tuple infeasible; rate from the scalar characteristic equation only")
    R = 0.0
    if kind == "dissipativity":
        R = -2.0 * p.gamma / (p.a + p.K)
    return NfdeReport(kind, p, True, (), p.K, lam_s, mapped, lam, R, M, tuple(notes))


def contractivity_analyze(p: ContractivityParams, tol: float = DEFAULT_TOL, M1: float | None = None) -> NfdeReport:
    """Check the contractivity hypotheses and compute both decay rates.

    Infeasible inputs give ``feasible=False`` without raising.
    """
    if not isinstance(p, ContractivityParams):
        raise DomainError("contractivity_analyze expects ContractivityParams")
    return _analyze("contractivity", p, tol, M1)


def dissipativity_analyze(p: DissipativityParams, tol: float = DEFAULT_TOL, M2: float | None = None) -> NfdeReport:
    """Check the dissipativity hypotheses, compute both rates and ``R``.

    ``R = -2 gamma / (a2 + K)`` is the squared absorbing radius.
    """
    if not isinstance(p, DissipativityParams):
        raise DomainError("dissipativity_analyze expects DissipativityParams")
    return _analyze("dissipativity", p, tol, M2)
