"""Coupled fractional Halanay inequality: feasibility, decay rate and envelopes.

The scalar system is

    D^alpha u(t) <= -a u(t) + b sup_{[t-tau1, t]} u + e sup_{[t-tau2, t]} v + f
    v(t)         <=  c u(t) + d sup_{[t-tau3, t]} v

with nonnegative coefficients, ``0 <= d < 1`` and ``a > b + e c / (1 - d)``.
Its solutions obey

    u(t) <= M E_alpha(-lambda* t^alpha) + gamma1
    v(t) <= c M / (E_alpha(-lambda* tau3^alpha) - d) E_alpha(-lambda* t^alpha) + gamma2

where ``lambda*`` is the unique positive root of the characteristic function
``char_fn`` below the singular point ``lambda0``.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConvergenceError, DomainError, InfeasibleError
from .mittag_leffler import fractional_order, ml, ml_decay
from .roots import increasing_root

DEFAULT_TOL = 1e-10

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HalanayParams:
    """Parameter tuple of the coupled Halanay inequality."""

    alpha: float
    a: float
    b: float
    c: float
    d: float
    e: float
    f: float = 0.0
    tau1: float = 1.0
    tau2: float = 1.0
    tau3: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", fractional_order(self.alpha))
        for name in ("a", "b", "c", "d", "e", "f", "tau1", "tau2", "tau3"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise DomainError(f"{name} must be finite, got {val!r}")
            object.__setattr__(self, name, val)
        for name in ("tau1", "tau2", "tau3"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"delay {name} must be positive, got {getattr(self, name)!r}")

    @property
    def tau(self) -> float:
        """History horizon ``max(tau1, tau2, tau3)``."""
        return max(self.tau1, self.tau2, self.tau3)

    def replace(self, **changes) -> "HalanayParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class Feasibility:
    """Outcome of the hypothesis check.

    ``margin`` is ``a - b - e c / (1 - d)``; ``margin_exact`` is the same
    quantity in rational arithmetic on the shortest decimal form of each
    input, so decimal data such as 1.4, 0.6 give an exact decimal margin.
    """

    feasible: bool
    margin: float
    margin_exact: Fraction | None
    violations: tuple[str, ...] = ()


def _dec(x: float) -> Fraction:
    return Fraction(repr(float(x)))


def check_feasibility(p: HalanayParams) -> Feasibility:
    """Check the sign constraints and ``a > b + e c/(1 - d)``."""
    violations = []
    for name in ("b", "c", "e", "f"):
        if getattr(p, name) < 0.0:
            violations.append(f"{name} < 0")
    if not (0.0 <= p.d < 1.0):
        violations.append("d outside [0, 1)")
    if p.d < 1.0:
        exact = _dec(p.a) - _dec(p.b) - _dec(p.e) * _dec(p.c) / (1 - _dec(p.d))
        margin = float(exact)
    else:
        exact = None
        margin = -math.inf
    if not margin > 0.0:
        violations.append("a <= b + e*c/(1-d)")
    return Feasibility(not violations, margin, exact, tuple(violations))


def _decays(p: HalanayParams, lam: float) -> tuple[float, float, float]:
    vals = ml(p.alpha, 1.0, -lam * np.array([p.tau1, p.tau2, p.tau3]) ** p.alpha)
    return float(vals[0]), float(vals[1]), float(vals[2])


def char_fn(p: HalanayParams, lam: float) -> float:
    """Characteristic function ``h(lambda)``.

    ``h(l) = l - a + b/E(-l tau1^a) + e c / ((E(-l tau3^a) - d) E(-l tau2^a))``

    Raises:
        DomainError: if ``lam < 0``, or if ``e c > 0`` and ``lam >= lambda0``
            (the denominator ``E(-lam tau3^alpha) - d`` is not positive).
    """
    lam = float(lam)
    if not lam >= 0.0:
        raise DomainError(f"lambda must be nonnegative, got {lam!r}")
    e1, e2, e3 = _decays(p, lam)
    base = lam - p.a + p.b / e1
    if p.e * p.c == 0.0:
        return base
    gap = e3 - p.d
    if not gap > 0.0:
        raise DomainError(f"lambda={lam!r} is at or beyond the singular point lambda0")
    return base + p.e * p.c / (gap * e2)


def _ml_level(alpha: float, level: float) -> float:
    """Unique ``x > 0`` with ``E_alpha(-x) = level`` for ``0 < level < 1``.

    Returns ``inf`` when the level lies below ``E_alpha(-1e300)``.
    """
    hi = 1.0
    while ml(alpha, 1.0, -hi) > level:
        hi *= 2.0
        if hi > 1e300:
            return math.inf
    return increasing_root(lambda x: level - ml(alpha, 1.0, -x), 0.0, hi, ftol=1e-13)


def lambda0(p: HalanayParams) -> float:
    """Singular point where ``E_alpha(-lambda0 tau3^alpha) = d``; ``inf`` if ``d = 0``."""
    if not (0.0 <= p.d < 1.0):
        raise DomainError(f"d must lie in [0, 1), got {p.d!r}")
    if p.d == 0.0:
        return math.inf
    return _ml_level(p.alpha, p.d) / p.tau3**p.alpha


def solve_lambda_star(p: HalanayParams, tol: float = DEFAULT_TOL) -> float:
    """Unique root of ``char_fn`` in ``(0, lambda0)``.

    Since ``h(l) >= l - a`` the root also lies in ``(0, a]``, so the bracket is
    ``[0, a]`` whenever ``a < lambda0``.  Otherwise the bracket ends at
    ``cap = lambda0 (1 - 1e-6)``; if ``h(cap) <= 0`` (``e c`` too small for the
    pole to show in double precision, or ``e c = 0``) ``cap`` itself is
    returned.  Any rate with ``h <= 0`` is a valid, more conservative one, and
    ``cap`` is the limit of the root as ``e c -> 0+``.  With ``c = 0`` the
    v-inequality imposes no limit and ``lambda0`` is ignored.  Near
    ``lambda0`` the residual target may lie below float spacing; the root is
    then returned to the last ulp (see ``increasing_root``).

    Raises:
        InfeasibleError: if the hypotheses fail.
    """
    if not tol > 0.0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    feas = check_feasibility(p)
    if not feas.feasible:
        raise InfeasibleError(f"Halanay hypotheses fail: {', '.join(feas.violations)}")
    lam0 = lambda0(p) if p.c > 0.0 else math.inf
    h = lambda lam: char_fn(p, lam)
    if p.a < lam0:
        try:
            h(p.a)
            return increasing_root(h, 0.0, p.a, tol)
        except DomainError:
            pass
    cap = lam0 * (1.0 - 1e-6)
    if h(cap) <= 0.0:
        log.debug("characteristic function nonpositive at lambda0 (1 - 1e-6); using the cap")
        return cap
    return increasing_root(h, 0.0, cap, tol)


def gamma_constants(p: HalanayParams) -> tuple[float, float]:
    """Offsets solving ``(a-b) g1 - e g2 = f`` and ``c g1 - (1-d) g2 = 0``."""
    den = (1.0 - p.d) * (p.a - p.b) - p.c * p.e
    if not den > 0.0:
        raise InfeasibleError(f"gamma system singular or negative: (1-d)(a-b) - ce = {den!r}")
    return (1.0 - p.d) * p.f / den, p.c * p.f / den


@dataclass(frozen=True)
class DecayEnvelope:
    """Mittag-Leffler bounds ``u <= M E + gamma1`` and ``v <= v_scale M E + gamma2``.

    ``params`` is the tuple the bounds were derived from.  It differs from the
    caller's tuple only under the ``c = 0`` extension (see ``build_envelope``).
    """

    M: float
    lambda_star: float
    gamma1: float
    gamma2: float
    v_scale: float
    alpha: float
    lambda0: float
    params: HalanayParams
    extension: str | None = None
    notes: tuple[str, ...] = field(default=())

    def decay(self, t):
        return ml_decay(self.alpha, self.lambda_star, t)

    def u_bound(self, t):
        return self.M * self.decay(t) + self.gamma1

    def v_bound(self, t):
        return self.v_scale * self.M * self.decay(t) + self.gamma2

    def to_dict(self) -> dict:
        return {
            "M": self.M,
            "lambda_star": self.lambda_star,
            "lambda0": self.lambda0 if math.isfinite(self.lambda0) else "inf",
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "v_scale": self.v_scale,
            "alpha": self.alpha,
            "extension": self.extension,
            "notes": list(self.notes),
        }


def build_envelope(p: HalanayParams, sup_u0: float, sup_v0: float, tol: float = DEFAULT_TOL) -> DecayEnvelope:
    """Decay envelope for histories bounded by ``sup_u0`` and ``sup_v0``.

    When ``c = 0`` but ``sup_v0 > 0`` the v-inequality still holds with any
    ``c' > 0`` because ``u >= 0``.  The envelope is then derived from the tuple
    with ``c'`` in place of ``c``: ``c'`` keeps ``M = sup_u0`` when ``e = 0``
    and halves the feasibility margin otherwise.  ``extension`` records this.
    """
    sup_u0, sup_v0 = float(sup_u0), float(sup_v0)
    if sup_u0 < 0.0 or sup_v0 < 0.0:
        raise DomainError("history suprema must be nonnegative")
    notes = []
    extension = None
    q = p
    if p.c == 0.0 and sup_v0 > 0.0:
        extension = "c_zero"
        if p.e == 0.0:
            lam = solve_lambda_star(p, tol)
            gap = ml_decay(p.alpha, lam, p.tau3) - p.d
            c_eff = sup_v0 * gap / sup_u0 if sup_u0 > 0.0 else 1.0
        else:
            margin = check_feasibility(p).margin
            c_eff = (1.0 - p.d) * margin / (2.0 * p.e)
        q = p.replace(c=c_eff)
        notes.append(f"c = 0 with nonzero v history: bounds derived with c' = {c_eff!r}")

    lam = solve_lambda_star(q, tol)
    gamma1, gamma2 = gamma_constants(q)
    gap = ml_decay(q.alpha, lam, q.tau3) - q.d
    v_scale = q.c / gap
    if q.c > 0.0:
        M = max(sup_u0, sup_v0 / v_scale)
    else:
        M = sup_u0
    return DecayEnvelope(
        M=M,
        lambda_star=lam,
        gamma1=gamma1,
        gamma2=gamma2,
        v_scale=v_scale,
        alpha=q.alpha,
        lambda0=lambda0(q),
        params=q,
        extension=extension,
        notes=tuple(notes),
    )
