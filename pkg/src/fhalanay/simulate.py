"""Caputo fractional delay equations on a commensurate uniform mesh.

All integrators share one fractional Adams-Bashforth-Moulton PECE core
(product-rectangle predictor, product-trapezoid corrector, one correction)
with full-history sums.  Delayed values always lie at least one step in the
past, so the delayed terms are explicit reads of stored samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import CompatibilityError, DivergenceError, DomainError, InfeasibleError, MeshError
from .halanay import HalanayParams, check_feasibility
from .history import HistoryFunction
from .linear import CoupledLinearSystem, check_compatibility, is_compatible
from .mittag_leffler import fractional_order

DIVERGENCE_LIMIT = 1e12
MAX_STEPS = 10**6
MESH_TOL = 1e-9


# ---------------------------------------------------------------- mesh


def _rational_gcd(values) -> Fraction:
    fr = [Fraction(repr(float(v))).limit_denominator(10**9) for v in values]
    den = math.lcm(*(f.denominator for f in fr))
    num = math.gcd(*(int(f * den) for f in fr))
    return Fraction(num, den)


def commensurate_dt(dt: float, delays) -> float:
    """Largest step ``<= dt`` that divides every delay."""
    delays = [float(t) for t in delays]
    if not delays:
        return float(dt)
    g = _rational_gcd(delays)
    k = math.ceil(g / Fraction(repr(float(dt))))
    return float(g / max(k, 1))


def _nearest_valid(dt: float, delays) -> float:
    g = _rational_gcd(delays)
    ratio = g / Fraction(repr(float(dt)))
    cands = {max(1, math.floor(ratio)), max(1, math.ceil(ratio))}
    return min((float(g / k) for k in cands), key=lambda c: abs(c - dt))


@dataclass(frozen=True)
class MeshConfig:
    """Uniform step ``dt`` up to ``T_end``; delays must be multiples of ``dt``."""

    dt: float
    T_end: float

    def __post_init__(self):
        dt, T = float(self.dt), float(self.T_end)
        if not (dt > 0.0 and math.isfinite(dt)):
            raise MeshError(f"dt must be positive, got {self.dt!r}")
        if not (T > dt and math.isfinite(T)):
            raise MeshError(f"T_end must exceed dt, got T_end={self.T_end!r}, dt={dt!r}")
        if T / dt > MAX_STEPS + MESH_TOL:
            raise MeshError(f"T_end/dt = {T / dt:.0f} exceeds the limit of {MAX_STEPS} steps")
        object.__setattr__(self, "dt", dt)
        object.__setattr__(self, "T_end", T)

    @classmethod
    def auto(cls, dt: float, T_end: float, delays) -> "MeshConfig":
        """Mesh with ``dt`` lowered to the largest value commensurate with ``delays``."""
        return cls(commensurate_dt(dt, delays), T_end)

    @property
    def steps(self) -> int:
        return math.ceil(self.T_end / self.dt - MESH_TOL)

    def delay_steps(self, *delays: float) -> tuple[int, ...]:
        """Integer step counts ``tau_i / dt``.

        Raises:
            MeshError: if some ``tau_i / dt`` is not within 1e-9 of a positive
                integer; the message names the nearest valid step.
        """
        out = []
        for tau in delays:
            q = tau / self.dt
            m = round(q)
            if m < 1 or abs(q - m) > MESH_TOL:
                nearest = _nearest_valid(self.dt, delays)
                raise MeshError(
                    f"delay {tau!r} is not a multiple of dt={self.dt!r}; nearest valid dt is {nearest!r}",
                    suggested_dt=nearest,
                )
            out.append(int(m))
        return tuple(out)


# ---------------------------------------------------------------- trajectory


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Samples on ``t0 + k dt`` with the history segment on ``[-m dt, 0]``.

    ``samples`` has shape (steps+1, k); ``history`` has shape (m+1, k) and
    ends with the value at ``t0``.
    """

    t0: float
    dt: float
    samples: np.ndarray
    history: np.ndarray
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        h = np.array(self.history, dtype=float)
        if s.ndim == 1:
            s = s[:, None]
        if h.ndim == 1:
            h = h[:, None]
        s.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "history", h)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"s_{i + 1}" for i in range(s.shape[1])))

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.samples.shape[0])

    @property
    def history_times(self) -> np.ndarray:
        m = self.history.shape[0] - 1
        return self.t0 + self.dt * np.arange(-m, 1)

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    def reduce(self, fn: Callable[[np.ndarray], np.ndarray], label: str) -> "Trajectory":
        """Apply a row-wise reduction (k,) -> scalar to samples and history."""
        return Trajectory(self.t0, self.dt, fn(self.samples), fn(self.history), (label,))

    def norm_inf(self) -> "Trajectory":
        return self.reduce(lambda a: np.max(np.abs(a), axis=1), "norm_inf")

    def norm1(self) -> "Trajectory":
        return self.reduce(lambda a: np.sum(np.abs(a), axis=1), "norm1")

    def norm2_sq(self) -> "Trajectory":
        return self.reduce(lambda a: np.sum(a * a, axis=1), "norm2_sq")

    def select(self, cols) -> "Trajectory":
        cols = list(cols)
        labels = tuple(self.labels[i] for i in cols)
        return Trajectory(self.t0, self.dt, self.samples[:, cols], self.history[:, cols], labels)

    @classmethod
    def join(cls, *trajs: "Trajectory") -> "Trajectory":
        """Side-by-side concatenation of trajectories on the same mesh."""
        first = trajs[0]
        for tr in trajs[1:]:
            if tr.dt != first.dt or tr.t0 != first.t0 or tr.samples.shape[0] != first.samples.shape[0]:
                raise DomainError("joined trajectories must share the mesh")
        return cls(
            first.t0,
            first.dt,
            np.hstack([tr.samples for tr in trajs]),
            np.hstack([tr.history for tr in trajs]),
            tuple(lab for tr in trajs for lab in tr.labels),
        )

    def __sub__(self, other: "Trajectory") -> "Trajectory":
        return Trajectory(self.t0, self.dt, self.samples - other.samples, self.history - other.history, self.labels)


# ---------------------------------------------------------------- PECE core


def _expm1_pow(x: np.ndarray, p: float) -> np.ndarray:
    """``(1 + x)**p - 1`` without cancellation."""
    return np.expm1(p * np.log1p(x))


@lru_cache(maxsize=32)
def _weights(alpha: float, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Predictor weights b_j, corrector weights c_j and start weights a0_j.

    b_j  = (j+1)^a - j^a,                       j = 0..n-1
    c_j  = (j+2)^(a+1) - 2 (j+1)^(a+1) + j^(a+1), j = 0..n-1
    a0_j = j^(a+1) - (j - a)(j+1)^a,             j = 0..n-1
    Differences are formed from expm1/log1p to avoid cancellation for large j.
    """
    j = np.arange(n, dtype=float)
    b = np.empty(n)
    c = np.empty(n)
    b[0] = 1.0
    c[0] = 2.0 ** (alpha + 1.0) - 2.0
    if n > 1:
        jj = j[1:]
        b[1:] = jj**alpha * _expm1_pow(1.0 / jj, alpha)
        g1 = _expm1_pow(1.0 / jj, alpha + 1.0)
        g2 = _expm1_pow(2.0 / jj, alpha + 1.0)
        c[1:] = jj ** (alpha + 1.0) * (g2 - 2.0 * g1)
    a0 = j ** (alpha + 1.0) - (j - alpha) * (j + 1.0) ** alpha
    for arr in (b, c, a0):
        arr.setflags(write=False)
    return b, c, a0


def fractional_pece(
    alpha: float,
    dt: float,
    steps: int,
    z0: np.ndarray,
    rhs: Callable[[int, np.ndarray], np.ndarray],
    accept: Callable[[int, np.ndarray], None] | None = None,
) -> np.ndarray:
    """Solve ``D^alpha z = F`` with ``z(0) = z0`` on ``t_k = k dt``.

    ``rhs(k, z)`` returns F at step k given a trial state z for that step;
    ``accept(k, z)`` is called once z_k is final, before ``rhs(k, z_k)``.
    Returns the (steps+1, dim) array of z.
    """
    z0 = np.asarray(z0, dtype=float)
    dim = z0.shape[0]
    b, c, a0 = _weights(alpha, max(steps, 1))
    cp = dt**alpha / math.gamma(alpha + 1.0)
    cc = dt**alpha / math.gamma(alpha + 2.0)
    Z = np.empty((steps + 1, dim))
    F = np.empty((steps + 1, dim))
    Z[0] = z0
    if accept is not None:
        accept(0, z0)
    F[0] = rhs(0, z0)
    for n in range(steps):
        # predictor: sum_j b_{n-j} F_j
        pred = z0 + cp * (b[n::-1] @ F[: n + 1])
        fp = rhs(n + 1, pred)
        # corrector: a0 F_0 + sum_{j=1..n} c_{n-j} F_j + F^P
        hist = a0[n] * F[0]
        if n > 0:
            hist = hist + c[n - 1 :: -1] @ F[1 : n + 1]
        z = z0 + cc * (hist + fp)
        if not np.all(np.abs(z) <= DIVERGENCE_LIMIT):
            raise DivergenceError(f"state norm exceeded {DIVERGENCE_LIMIT:g} at t={(n + 1) * dt:.6g}")
        Z[n + 1] = z
        if accept is not None:
            accept(n + 1, z)
        F[n + 1] = rhs(n + 1, z)
    return Z


def _history_grid(h, m: int, dt: float) -> np.ndarray:
    """History samples at ``-m dt, ..., 0`` as an (m+1, k) array."""
    return np.atleast_2d(h(dt * np.arange(-m, 1)))


# ---------------------------------------------------------------- coupled linear


def simulate_coupled(s: CoupledLinearSystem, mesh: MeshConfig) -> tuple[Trajectory, Trajectory]:
    """Integrate the coupled linear system; returns the x and y trajectories.

    ``y(0)`` is computed from the algebraic equation, which equals ``psi(0)``
    when the compatibility condition holds.  Lifted systems are accepted; their
    compatibility is checked on the recovered data.

    Raises:
        MeshError: delays not commensurate with ``mesh.dt``.
        CompatibilityError: compatibility condition violated.
        DivergenceError: state exceeded 1e12.
    """
    m1, m2, m3 = mesh.delay_steps(s.tau1, s.tau2, s.tau3)
    if not is_compatible(s):
        raise CompatibilityError(f"compatibility residual {check_compatibility(s):.3e} exceeds tolerance")
    M = max(m1, m2, m3)
    N = mesh.steps
    dt = mesh.dt
    X = np.empty((M + N + 1, s.d))
    Y = np.empty((M + N + 1, s.n))
    X[: M + 1] = _history_grid(s.phi, M, dt)
    Y[: M + 1] = _history_grid(s.psi, M, dt)
    A, B, E, C, D = s.A, s.B, s.E, s.C, s.D

    def accept(k, x):
        X[M + k] = x
        Y[M + k] = C @ x + D @ Y[M + k - m3]

    def rhs(k, x):
        return A @ x + B @ X[M + k - m1] + E @ Y[M + k - m2]

    fractional_pece(s.alpha, dt, N, X[M].copy(), rhs, accept)
    xl = tuple(f"x_{i + 1}" for i in range(s.d))
    yl = tuple(f"y_{i + 1}" for i in range(s.n))
    return (
        Trajectory(0.0, dt, X[M:], X[: M + 1], xl),
        Trajectory(0.0, dt, Y[M:], Y[: M + 1], yl),
    )


# ---------------------------------------------------------------- comparison system


def simulate_halanay_comparison(
    p: HalanayParams, phi: HistoryFunction, psi: HistoryFunction, mesh: MeshConfig
) -> tuple[Trajectory, Trajectory]:
    """Integrate the inequality system taken with equality (the worst case).

        D^alpha u = -a u + b max_{[t-tau1, t]} u + e max_{[t-tau2, t]} v + f
        v         =  c u + d max_{[t-tau3, t]} v

    Window maxima run over mesh points including both ends.  The implicit
    self-reference of v is resolved exactly: ``v = c u + d max(P, c u/(1-d))``
    with P the maximum over the past part of the window.
    """
    feas = check_feasibility(p)
    if not feas.feasible:
        raise InfeasibleError(f"Halanay hypotheses fail: {', '.join(feas.violations)}")
    if phi.dim != 1 or psi.dim != 1:
        raise DomainError("comparison histories must be scalar")
    m1, m2, m3 = mesh.delay_steps(p.tau1, p.tau2, p.tau3)
    M = max(m1, m2, m3)
    N = mesh.steps
    dt = mesh.dt
    U = np.empty(M + N + 1)
    V = np.empty(M + N + 1)
    U[: M + 1] = _history_grid(phi, M, dt)[:, 0]
    V[: M + 1] = _history_grid(psi, M, dt)[:, 0]
    if np.any(U[: M + 1] < 0) or np.any(V[: M + 1] < 0):
        raise DomainError("comparison histories must be nonnegative")
    a, b, c, d, e, f = p.a, p.b, p.c, p.d, p.e, p.f

    def v_of(k, u):
        past = float(np.max(V[M + k - m3 : M + k]))
        cu = c * u
        return cu + d * max(past, cu / (1.0 - d))

    def accept(k, z):
        u = float(z[0])
        U[M + k] = u
        V[M + k] = v_of(k, u)

    def rhs(k, z):
        u = float(z[0])
        v = v_of(k, u)
        umax = max(float(np.max(U[M + k - m1 : M + k])), u)
        vmax = max(float(np.max(V[M + k - m2 : M + k])), v)
        return np.array([-a * u + b * umax + e * vmax + f])

    fractional_pece(p.alpha, dt, N, np.array([U[M]]), rhs, accept)
    return (
        Trajectory(0.0, dt, U[M:], U[: M + 1], ("u",)),
        Trajectory(0.0, dt, V[M:], V[: M + 1], ("v",)),
    )


# ---------------------------------------------------------------- neutral


@dataclass(frozen=True, eq=False)
class NeutralSystem:
    """``D^alpha [y(t) - N y(t - tau)] = f(t, y(t), y(t - tau), int_{t-tau}^t g(t, xi, y(xi)) dxi)``.

    ``f(t, u, v, w)`` takes and returns length-n arrays.  ``g(t, xi, Y)`` is
    vectorized: ``xi`` has shape (m+1,), ``Y`` shape (m+1, n); it returns
    (m+1, n).  ``g=None`` means the integral term is zero.
    """

    N: np.ndarray
    tau: float
    alpha: float
    f: Callable
    phi: HistoryFunction
    g: Callable | None = None

    def __post_init__(self):
        Nm = np.array(self.N, dtype=float)
        if Nm.ndim == 0:
            Nm = Nm.reshape(1, 1)
        if Nm.ndim != 2 or Nm.shape[0] != Nm.shape[1]:
            raise DomainError(f"N must be square, got shape {Nm.shape}")
        Nm.setflags(write=False)
        object.__setattr__(self, "N", Nm)
        object.__setattr__(self, "alpha", fractional_order(self.alpha))
        tau = float(self.tau)
        if not tau > 0.0:
            raise DomainError(f"tau must be positive, got {self.tau!r}")
        object.__setattr__(self, "tau", tau)
        if 2.0 * self.norm_N2 >= 1.0:
            raise DomainError(f"need 2||N||^2 < 1, got 2||N||^2 = {2.0 * self.norm_N2!r}")
        if self.phi.dim != Nm.shape[0]:
            raise DomainError(f"phi has dimension {self.phi.dim}, expected {Nm.shape[0]}")

    @property
    def norm_N2(self) -> float:
        """Squared operator 2-norm of N."""
        return float(np.linalg.norm(self.N, 2)) ** 2 if self.N.size else 0.0

    @property
    def dim(self) -> int:
        return self.N.shape[0]


def simulate_neutral(nsys: NeutralSystem, mesh: MeshConfig) -> Trajectory:
    """Integrate the neutral equation through ``z = y - N y(t - tau)``.

    The integral term uses the composite trapezoid rule on mesh points, with
    the trial value of y at the current point.
    """
    (m,) = mesh.delay_steps(nsys.tau)
    N = mesh.steps
    dt = mesh.dt
    n = nsys.dim
    Y = np.empty((m + N + 1, n))
    Y[: m + 1] = _history_grid(nsys.phi, m, dt)
    Nm = nsys.N
    f, g = nsys.f, nsys.g
    trap = np.full(m + 1, dt)
    trap[0] = trap[-1] = 0.5 * dt

    def y_of(k, z):
        return z + Nm @ Y[k]

    def integral(k, y_now):
        if g is None:
            return np.zeros(n)
        t = k * dt
        xi = dt * np.arange(k - m, k + 1)
        window = Y[k : m + k + 1].copy()
        window[-1] = y_now
        return trap @ np.asarray(g(t, xi, window), dtype=float).reshape(m + 1, n)

    def accept(k, z):
        Y[m + k] = y_of(k, z)

    def rhs(k, z):
        y = y_of(k, z)
        return np.asarray(f(k * dt, y, Y[k], integral(k, y)), dtype=float).reshape(n)

    z0 = Y[m] - Nm @ Y[0]
    fractional_pece(nsys.alpha, dt, N, z0, rhs, accept)
    labels = tuple(f"y_{i + 1}" for i in range(n))
    return Trajectory(0.0, dt, Y[m:], Y[: m + 1], labels)


# ---------------------------------------------------------------- checks


@dataclass(frozen=True)
class EnvelopeReport:
    violations: tuple[tuple[float, int, float, float], ...]
    max_ratio: float

    @property
    def passed(self) -> bool:
        return not self.violations


def check_envelope(traj: Trajectory, bound, slack_rel: float = 0.05, slack_abs: float = 1e-8) -> EnvelopeReport:
    """Mesh points where a sample exceeds ``bound(t) (1 + slack_rel) + slack_abs``.

    ``bound`` maps the time array to bound values (broadcast over components).
    Each violation is ``(t, component, sample, bound)``.  ``max_ratio`` is the
    largest ``sample / bound`` over points with a positive bound.
    """
    t = traj.times
    bv = np.asarray(bound(t), dtype=float)
    if bv.ndim == 1:
        bv = bv[:, None]
    limit = bv * (1.0 + slack_rel) + slack_abs
    bad = np.argwhere(traj.samples > limit)
    viol = tuple((float(t[i]), int(j), float(traj.samples[i, j]), float(bv[i, min(j, bv.shape[1] - 1)])) for i, j in bad)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(bv > 0, traj.samples / bv, 0.0)
    return EnvelopeReport(viol, float(np.max(ratio)) if ratio.size else 0.0)


def decay_rate_fit(traj: Trajectory, window: tuple[float, float], component: int = 0) -> float:
    """Least-squares slope of ``log|sample|`` against ``log t`` on ``window``.

    Raises:
        DomainError: fewer than 10 points in the window, or nonpositive samples.
    """
    lo, hi = window
    t = traj.times
    sel = (t >= lo) & (t <= hi) & (t > 0)
    if np.count_nonzero(sel) < 10:
        raise DomainError(f"window [{lo}, {hi}] holds fewer than 10 mesh points")
    y = np.abs(traj.samples[sel, component])
    if np.any(y <= 0):
        raise DomainError("decay_rate_fit needs positive samples on the window")
    slope, _ = np.polyfit(np.log(t[sel]), np.log(y), 1)
    return float(slope)
