"""Real-argument Mittag-Leffler functions.

``ml(alpha, beta, x)`` evaluates

    E_{alpha,beta}(x) = sum_k x**k / Gamma(alpha*k + beta)

for real ``x``.  Evaluation is dispatched by regime:

* closed forms for ``(alpha, beta) = (1, 1)`` (exp) and ``(2, 1)`` (cos/cosh);
* compensated power series for ``|x| <= 1`` and for positive ``x``;
* the algebraic asymptotic expansion for large negative ``x`` whenever its
  terms drop below round-off before they start to diverge;
* otherwise, for ``0 < alpha < 1`` and negative ``x``, a bounded integral over
  ``theta`` obtained from the Laplace-inversion integral after the substitution
  ``w = r**alpha = -cos(alpha*pi) + sin(alpha*pi)*tan(theta)``, integrated by
  tanh-sinh quadrature.  The integrand is nonnegative for ``beta = 1`` and
  ``beta = alpha`` so relative accuracy holds down to tiny values.

Orders ``alpha > 1`` (other than the closed forms) fall back to an
extended-precision series; they are supported but not optimized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from scipy.special import rgamma

from .errors import DomainError

_EPS = np.finfo(float).eps
# asymptotic expansion is tried only from here on; below this the series or
# the integral are cheaper and at least as accurate
_ASYMPTOTIC_MIN = 8.0
_ASYMPTOTIC_TERMS = 80
_SERIES_RADIUS = 1.0


def fractional_order(alpha: float) -> float:
    """Validate a library-scope fractional order ``0 < alpha <= 1``."""
    a = float(alpha)
    if not (0.0 < a <= 1.0):
        raise DomainError(f"fractional order must satisfy 0 < alpha <= 1, got {alpha!r}")
    return a


def _check_params(alpha: float, beta: float) -> tuple[float, float]:
    a, b = float(alpha), float(beta)
    if not (a > 0.0 and math.isfinite(a)):
        raise DomainError(f"alpha must be positive, got {alpha!r}")
    if not (b > 0.0 and math.isfinite(b)):
        raise DomainError(f"beta must be positive, got {beta!r}")
    return a, b


def _neumaier(terms) -> np.ndarray:
    """Compensated column-wise sum over an iterable of equally shaped arrays."""
    s = c = None
    for t in terms:
        if s is None:
            s = np.array(t, dtype=float)
            c = np.zeros_like(s)
            continue
        u = s + t
        big = np.abs(s) >= np.abs(t)
        c += np.where(big, (s - u) + t, (t - u) + s)
        s = u
    return s + c


# ---------------------------------------------------------------- series


@lru_cache(maxsize=256)
def _series_coeffs(a: float, b: float) -> np.ndarray:
    """1/Gamma(a*k + b) until the coefficients drop below 1e-18."""
    out = []
    k = 0
    while True:
        c = float(rgamma(a * k + b))
        out.append(c)
        if a * k + b > 2.0 and abs(c) < 1e-18:
            break
        k += 1
    arr = np.array(out)
    arr.setflags(write=False)
    return arr


def _series_small(x: np.ndarray, a: float, b: float) -> np.ndarray:
    """Power series for |x| <= 1; terms bounded by 1/min Gamma ~ 1.13."""
    coeffs = _series_coeffs(a, b)
    if x.size <= 8:
        # scalar path: per-element exact-rounding sum avoids array overhead
        return np.array([math.fsum(c * xv**k for k, c in enumerate(coeffs)) for xv in x.tolist()])

    def terms():
        xk = np.ones_like(x)
        for c in coeffs:
            yield xk * c
            xk = xk * x

    return _neumaier(terms())


def _series_positive(x: np.ndarray, a: float, b: float) -> np.ndarray:
    """Positive-argument series with log-space terms (no cancellation)."""
    lx = np.log(x)
    # E ~ exp(x**(1/a))/a for large x
    peak = np.max(x) ** (1.0 / a)
    if peak - math.log(a) > 709.0 + 0.5 * math.log(max(peak, 1.0)):
        raise OverflowError("Mittag-Leffler value exceeds the double range")
    kmax = int(10 + 3 * peak / a + 40 / a)

    def terms():
        yield np.full_like(x, float(rgamma(b)))
        for k in range(1, kmax + 1):
            t = np.exp(k * lx - math.lgamma(a * k + b))
            yield t
            # past the peak and negligible everywhere
            if a * k + b > 2 and k > peak / a and np.all(t < 1e-18):
                return

    s = _neumaier(terms())
    if not np.all(np.isfinite(s)):
        raise OverflowError("Mittag-Leffler value exceeds the double range")
    return s


# ---------------------------------------------------------------- asymptotics


@lru_cache(maxsize=256)
def _asymptotic_coeffs(a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Signed coefficients and a smooth log-magnitude envelope.

    E(-x) ~ sum_k (-1)**(k+1) x**(-k) / Gamma(b - a*k).  Near a pole of Gamma
    the coefficient is tiny but not exactly zero, so smallness is judged on
    the envelope |1/Gamma(z)| <= Gamma(1 - z)/pi (reflection formula).
    """
    k = np.arange(1, _ASYMPTOTIC_TERMS + 1)
    z = b - a * k
    c = (-1.0) ** (k + 1) * rgamma(z)
    with np.errstate(divide="ignore"):
        logc = np.log(np.abs(c))
    refl = np.array([math.lgamma(1.0 - zi) - math.log(math.pi) if zi < 1.0 else -np.inf for zi in z])
    env = np.maximum(logc, refl)
    c.setflags(write=False)
    env.setflags(write=False)
    return c, env


def _asymptotic(x: np.ndarray, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Asymptotic sum for positive ``x`` (argument ``-x``).

    Returns ``(values, ok)``; ``ok`` marks elements whose term envelope fell
    below ``eps/10 * |partial sum|`` before the series began to diverge.
    """
    c, env = _asymptotic_coeffs(a, b)
    k = np.arange(1, c.size + 1)
    lx = np.log(x)[:, None]
    with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
        terms = c[None, :] * np.exp(-k[None, :] * lx)
        partial = np.cumsum(terms, axis=1)
        lenv = env[None, :] - k[None, :] * lx
        small = lenv <= math.log(0.1 * _EPS) + np.log(np.abs(partial))
        small[:, 0] = False
    ok = small.any(axis=1)
    first = np.argmax(small, axis=1)
    vals = partial[np.arange(x.size), first]
    ok &= np.isfinite(vals) & (vals != 0.0)
    return vals, ok


# ---------------------------------------------------------------- integral


@lru_cache(maxsize=64)
def _tanh_sinh(h: float, tmax: float = 4.5):
    """Nodes on (0, 1) as (distance to 0, distance to 1, weight)."""
    t = np.arange(-tmax, tmax + 0.5 * h, h)
    s = 0.5 * np.pi * np.sinh(t)
    e = np.exp(-2.0 * np.abs(s))
    near = e / (1.0 + e)
    left = np.where(s < 0, near, 1.0 - near)
    right = np.where(s < 0, 1.0 - near, near)
    w = h * 0.25 * np.pi * np.cosh(t) / np.cosh(s) ** 2
    for arr in (left, right, w):
        arr.setflags(write=False)
    return left, right, w


def _integral(x: np.ndarray, a: float, b: float) -> np.ndarray:
    """E_{a,b}(-x) for x > 0, 0 < a < 1, 0 < b <= 1.

    The representation holds up to b < 1 + a, but for b > 1 the factor
    q**(1 - b) is singular at the lower end, so larger b is reduced first.
    """
    span = a * math.pi
    h = min(1.0 / 64.0, a / 16.0)
    left, right, w = _tanh_sinh(h)
    # w(theta) = sin(left)/sin(right), theta measured from both ends
    wt = np.sin(left * span) / np.sin(right * span)
    lw = np.log(wt)
    out = np.empty_like(x)
    sin_b = math.sin(b * math.pi)
    sin_ab = math.sin((a - b) * math.pi)
    chunk = max(1, 2_000_000 // wt.size)
    for i in range(0, x.size, chunk):
        xs = x[i : i + chunk, None]
        lq = np.minimum((np.log(xs) + lw[None, :]) / a, 700.0)
        q = np.exp(lq)
        if b == 1.0:
            f = np.exp(-q)
            out[i : i + chunk] = (f @ w) * span / (a * math.pi)
        else:
            f = np.exp(-q + (1.0 - b) * lq) * (wt[None, :] * sin_b - sin_ab)
            out[i : i + chunk] = (f @ w) * span / (a * math.pi * math.sin(span))
    return out


def _negative_fractional(x: np.ndarray, a: float, b: float) -> np.ndarray:
    """E_{a,b}(-x) for x > 1 and 0 < a < 1."""
    out = np.empty_like(x)
    todo = np.ones(x.size, dtype=bool)
    big = x >= _ASYMPTOTIC_MIN
    if big.any():
        vals, ok = _asymptotic(x[big], a, b)
        idx = np.flatnonzero(big)[ok]
        out[idx] = vals[ok]
        todo[idx] = False
    if todo.any():
        xr = x[todo]
        if b <= 1.0:
            out[todo] = _integral(xr, a, b)
        else:
            # E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z, with z = -x
            lower = _negative_fractional(xr, a, b - a)
            out[todo] = (lower - float(rgamma(b - a))) / (-xr)
    return out


# ---------------------------------------------------------------- alpha > 1


def _mp_series(xv: float, a: float, b: float) -> float:
    mag = abs(xv) ** (1.0 / a)
    dps = int(mag / 2.3) + 30
    with mpmath.workdps(dps):
        z = mpmath.mpf(xv)
        am, bm = mpmath.mpf(a), mpmath.mpf(b)
        total = mpmath.mpf(0)
        k = 0
        tiny = mpmath.mpf(10) ** (-dps + 3)
        while True:
            term = z**k * mpmath.rgamma(am * k + bm)
            total += term
            if k > mag / a + 5 and abs(term) <= tiny * max(abs(total), mpmath.mpf(10) ** -300):
                break
            k += 1
        return float(total)


def _residues_large_order(x: float, a: float, b: float) -> float:
    """Pole contributions of the Laplace inversion for 1 < a < 2, argument -x."""
    r = x ** (1.0 / a)
    total = 0.0
    for th in (math.pi / a, -math.pi / a):
        s = r * complex(math.cos(th), math.sin(th))
        total += ((s ** (1.0 - b)) * np.exp(s)).real / a
    return total


def _negative_large_order(x: np.ndarray, a: float, b: float) -> np.ndarray:
    out = np.empty_like(x)
    for i, xv in enumerate(x):
        if a < 2.0 and xv ** (1.0 / a) > 600.0:
            vals, ok = _asymptotic(np.array([xv]), a, b)
            if ok[0]:
                res = 0.0 if a == 1.0 else _residues_large_order(xv, a, b)
                out[i] = vals[0] + res
                continue
        out[i] = _mp_series(-xv, a, b)
    return out


# ---------------------------------------------------------------- public


def _evaluate(x: np.ndarray, a: float, b: float) -> np.ndarray:
    if a == 1.0 and b == 1.0:
        with np.errstate(over="raise"):
            try:
                return np.exp(x)
            except FloatingPointError:
                raise OverflowError("Mittag-Leffler value exceeds the double range") from None
    if a == 2.0 and b == 1.0:
        r = np.sqrt(np.abs(x))
        with np.errstate(over="raise"):
            try:
                return np.where(x < 0, np.cos(r), np.cosh(r))
            except FloatingPointError:
                raise OverflowError("Mittag-Leffler value exceeds the double range") from None
    return _evaluate_general(x, a, b)


def _evaluate_general(x: np.ndarray, a: float, b: float) -> np.ndarray:
    """Series, asymptotic and integral regimes, without the closed-form shortcuts."""
    out = np.empty_like(x)
    zero = x == 0.0
    out[zero] = float(rgamma(b))
    small = (~zero) & (np.abs(x) <= _SERIES_RADIUS)
    if small.any():
        out[small] = _series_small(x[small], a, b)
    pos = x > _SERIES_RADIUS
    if pos.any():
        out[pos] = _series_positive(x[pos], a, b)
    neg = x < -_SERIES_RADIUS
    if neg.any():
        if a < 1.0:
            out[neg] = _negative_fractional(-x[neg], a, b)
        else:
            out[neg] = _negative_large_order(-x[neg], a, b)
    return out


def ml(alpha: float, beta: float, x):
    """Two-parameter Mittag-Leffler function ``E_{alpha,beta}(x)`` on the real line.

    ``x`` may be a scalar or an array; the result has the same shape.

    Raises:
        DomainError: if ``alpha <= 0``, ``beta <= 0`` or ``x`` is not finite.
        OverflowError: if the value exceeds the double range (large positive x).
    """
    a, b = _check_params(alpha, beta)
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise DomainError("Mittag-Leffler argument must be finite")
    flat = xa.reshape(-1)
    res = _evaluate(flat, a, b).reshape(xa.shape)
    if res.ndim == 0:
        return float(res)
    return res


@dataclass(frozen=True)
class MLQuery:
    """Validated argument triple for ``E_{alpha,beta}(x)``."""

    alpha: float
    beta: float
    x: float

    def __post_init__(self):
        a, b = _check_params(self.alpha, self.beta)
        x = float(self.x)
        if not math.isfinite(x):
            raise DomainError(f"Mittag-Leffler argument must be finite, got {x!r}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "x", x)

    def evaluate(self) -> float:
        return ml(self.alpha, self.beta, self.x)


def ml_decay(alpha: float, lam: float, t):
    """``E_alpha(-lam * t**alpha)``, the Mittag-Leffler decay profile.

    Equals 1 at ``lam * t == 0`` and decreases strictly in ``t`` for ``lam > 0``.
    """
    a = fractional_order(alpha)
    lam = float(lam)
    if not lam >= 0.0:
        raise DomainError(f"decay rate must be nonnegative, got {lam!r}")
    ta = np.asarray(t, dtype=float)
    if np.any(ta < 0):
        raise DomainError("time must be nonnegative")
    return ml(a, 1.0, -lam * ta**a)


def ml_deriv(alpha: float, x):
    """Derivative of ``E_alpha`` at ``x``: ``E_{alpha,alpha}(x) / alpha``."""
    a = fractional_order(alpha)
    v = ml(a, a, x)
    return v / a
