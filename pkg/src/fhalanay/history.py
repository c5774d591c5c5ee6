"""Initial functions on the history interval ``[-tau, 0]``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import ConfigError, DomainError
from .posrep import neg_part, pos_part

SUP_SAMPLES = 4096
KINDS = ("constant", "polynomial", "sampled")


@dataclass(frozen=True, eq=False)
class HistoryFunction:
    """Vector-valued history ``s -> R^k``.

    kinds:
        constant: ``data`` has shape (k,).
        polynomial: ``data`` has shape (k, deg+1); row i holds the ascending
            coefficients of component i in powers of s.
        sampled: ``times`` strictly increasing, ``data`` has shape (m, k);
            linear interpolation between samples.
    """

    kind: str
    data: np.ndarray
    times: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown history kind {self.kind!r}; expected one of {KINDS}")
        data = np.array(self.data, dtype=float)
        if not np.all(np.isfinite(data)):
            raise ConfigError("history values must be finite")
        if self.kind == "constant":
            data = np.atleast_1d(data)
            if data.ndim != 1:
                raise ConfigError("constant history must be a vector")
        elif self.kind == "polynomial":
            if data.ndim == 1:
                data = data[None, :]
            if data.ndim != 2:
                raise ConfigError("polynomial history needs one coefficient list per component")
        else:
            times = np.array(self.times, dtype=float)
            if data.ndim == 1:
                data = data[:, None]
            if times.ndim != 1 or times.size < 2 or times.size != data.shape[0]:
                raise ConfigError("sampled history needs matching 'times' and 'values' with at least two samples")
            if np.any(np.diff(times) <= 0):
                raise ConfigError("sampled history times must be strictly increasing")
            times.setflags(write=False)
            object.__setattr__(self, "times", times)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @classmethod
    def constant(cls, value) -> "HistoryFunction":
        return cls("constant", np.atleast_1d(np.asarray(value, dtype=float)))

    @classmethod
    def polynomial(cls, coeffs) -> "HistoryFunction":
        return cls("polynomial", coeffs)

    @classmethod
    def sampled(cls, times, values) -> "HistoryFunction":
        return cls("sampled", values, times)

    @property
    def dim(self) -> int:
        if self.kind == "constant":
            return self.data.shape[0]
        if self.kind == "polynomial":
            return self.data.shape[0]
        return self.data.shape[1]

    def __call__(self, s):
        """Evaluate at scalar ``s`` (returns (k,)) or at an array of times (returns (m, k))."""
        s_arr = np.asarray(s, dtype=float)
        flat = np.atleast_1d(s_arr)
        if self.kind == "constant":
            out = np.broadcast_to(self.data, (flat.size, self.dim)).copy()
        elif self.kind == "polynomial":
            out = np.stack([P.polyval(flat, row) for row in self.data], axis=1)
        else:
            out = np.stack([np.interp(flat, self.times, self.data[:, i]) for i in range(self.dim)], axis=1)
        return out[0] if s_arr.ndim == 0 else out

    def check_domain(self, tau: float) -> None:
        """Sampled histories must cover ``[-tau, 0]``."""
        if self.kind == "sampled":
            if self.times[0] > -tau + 1e-12 * max(1.0, tau) or self.times[-1] < -1e-12:
                raise DomainError(f"sampled history covers [{self.times[0]}, {self.times[-1]}], need [{-tau}, 0]")

    def sup_norm1(self, tau: float, samples: int = SUP_SAMPLES) -> float:
        """Sampled ``sup_{[-tau, 0]} sum_i |h_i(s)|``, endpoints included.

        This is the sup of the summed positive representation of the history;
        dense sampling gives a lower bound that is exact for constant and
        piecewise-linear data on the sample grid.
        """
        grid = np.linspace(-tau, 0.0, samples + 1)
        if self.kind == "sampled":
            inside = self.times[(self.times >= -tau) & (self.times <= 0.0)]
            grid = np.union1d(grid, inside)
        return float(np.max(np.sum(np.abs(self(grid)), axis=1)))

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "constant":
            out["value"] = self.data.tolist()
        elif self.kind == "polynomial":
            out["coeffs"] = self.data.tolist()
        else:
            out["times"] = self.times.tolist()
            out["values"] = self.data.tolist()
        return out

    @classmethod
    def from_dict(cls, spec, where: str = "history") -> "HistoryFunction":
        """Parse ``{"kind": ..., ...}``; a bare number or list means constant."""
        if isinstance(spec, (int, float, list)):
            return cls.constant(spec)
        if not isinstance(spec, dict) or "kind" not in spec:
            raise ConfigError(f"{where}: expected an object with a 'kind' field")
        kind = spec["kind"]
        try:
            if kind == "constant":
                return cls.constant(spec["value"])
            if kind == "polynomial":
                return cls.polynomial(spec["coeffs"])
            if kind == "sampled":
                return cls.sampled(spec["times"], spec["values"])
        except KeyError as exc:
            raise ConfigError(f"{where}: missing field {exc.args[0]!r} for kind {kind!r}") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}: {exc}") from None
        raise ConfigError(f"{where}.kind: unknown history kind {kind!r}; expected one of {KINDS}")


@dataclass(frozen=True, eq=False)
class LiftedHistory:
    """Positive representation ``s -> (h(s)+, h(s)-)`` of a history."""

    base: HistoryFunction

    kind = "lifted"

    @property
    def dim(self) -> int:
        return 2 * self.base.dim

    def __call__(self, s):
        v = self.base(s)
        return np.concatenate([pos_part(v), neg_part(v)], axis=-1)

    def check_domain(self, tau: float) -> None:
        self.base.check_domain(tau)

    def sup_norm1(self, tau: float, samples: int = SUP_SAMPLES) -> float:
        # sum of (h+, h-) equals sum |h|
        return self.base.sup_norm1(tau, samples)

    def to_dict(self) -> dict:
        return {"kind": "lifted", "base": self.base.to_dict()}
