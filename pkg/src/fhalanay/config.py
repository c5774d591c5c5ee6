"""JSON configuration files for the command-line tools.

Matrices are nested row lists or ``{"rows": r, "cols": c, "data": [...]}``
with row-major ``data``.  Histories are a number, a list (constant) or an
object with a ``kind`` field (see ``HistoryFunction.from_dict``).  A linear
system may give ``psi`` as ``{"kind": "compatible_linear", "far": [...]}``
to get the linear history that meets the compatibility condition.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, HalanayError
from .halanay import HalanayParams
from .history import HistoryFunction
from .linear import CoupledLinearSystem, compatible_linear_psi
from .neutral import ContractivityParams, DissipativityParams, history_bound, norm2_sq


def load_json(path) -> dict:
    """Read a JSON object; errors name the path."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"{p}: file not found") from None
    except OSError as exc:
        raise ConfigError(f"{p}: cannot read file ({exc.strerror})") from None
    if not text.strip():
        raise ConfigError(f"{p}: file is empty")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{p}: top level must be a JSON object")
    return data


class _Reader:
    """Field access with diagnostics of the form ``file: field: problem``."""

    def __init__(self, data: dict, source: str):
        self.data = data
        self.source = source

    def fail(self, field: str, msg: str):
        raise ConfigError(f"{self.source}: {field}: {msg}")

    def has(self, key: str) -> bool:
        return key in self.data

    def number(self, key: str, default=None) -> float:
        if key not in self.data:
            if default is None:
                self.fail(key, "missing required field")
            return float(default)
        val = self.data[key]
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            self.fail(key, f"expected a number, got {type(val).__name__}")
        if not math.isfinite(val):
            self.fail(key, "must be finite")
        return float(val)

    def matrix(self, key: str) -> np.ndarray:
        if key not in self.data:
            self.fail(key, "missing required field")
        spec = self.data[key]
        if isinstance(spec, dict):
            try:
                rows, cols, data = int(spec["rows"]), int(spec["cols"]), spec["data"]
            except KeyError as exc:
                self.fail(key, f"matrix object needs field {exc.args[0]!r}")
            except (TypeError, ValueError):
                self.fail(key, "rows and cols must be integers")
            try:
                arr = np.array(data, dtype=float)
            except (TypeError, ValueError):
                self.fail(key, "data must be a list of numbers")
            if arr.ndim != 1 or arr.size != rows * cols:
                self.fail(key, f"data must hold rows*cols = {rows * cols} numbers")
            return arr.reshape(rows, cols)
        try:
            arr = np.array(spec, dtype=float)
        except (TypeError, ValueError):
            self.fail(key, "matrix rows must be equal-length lists of numbers")
        if arr.ndim != 2:
            self.fail(key, "expected a list of rows")
        return arr

    def history(self, key: str, default=None) -> HistoryFunction:
        if key not in self.data:
            if default is None:
                self.fail(key, "missing required field")
            return default
        return HistoryFunction.from_dict(self.data[key], where=f"{self.source}: {key}")


def _wrap(source: str, fn):
    """Re-raise library validation errors with the file name attached."""
    try:
        return fn()
    except ConfigError as exc:
        msg = str(exc)
        raise ConfigError(msg if msg.startswith(source) else f"{source}: {msg}") from None
    except HalanayError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_system(path) -> CoupledLinearSystem:
    """Coupled linear system from JSON.

    Fields: ``alpha``, ``tau1``, ``tau2``, ``tau3``, matrices ``A, B, E, C, D``,
    histories ``phi`` and ``psi``.
    """
    src = str(path)
    r = _Reader(load_json(path), src)
    mats = {name: r.matrix(name) for name in "ABECD"}
    alpha = r.number("alpha")
    taus = [r.number(name) for name in ("tau1", "tau2", "tau3")]
    phi = r.history("phi")
    psi_spec = r.data.get("psi")
    if isinstance(psi_spec, dict) and psi_spec.get("kind") == "compatible_linear":
        if "far" not in psi_spec:
            r.fail("psi.far", "missing required field")

        def build_psi():
            return compatible_linear_psi(mats["C"], mats["D"], max(taus), taus[2], phi(0.0), psi_spec["far"])

        psi = _wrap(src, build_psi)
    else:
        psi = r.history("psi")
    return _wrap(
        src,
        lambda: CoupledLinearSystem(
            A=mats["A"], B=mats["B"], E=mats["E"], C=mats["C"], D=mats["D"],
            tau1=taus[0], tau2=taus[1], tau3=taus[2], alpha=alpha, phi=phi, psi=psi,
        ),
    )


@dataclass(frozen=True)
class HalanayInput:
    params: HalanayParams
    sup_u0: float
    sup_v0: float


def _halanay_params(r: _Reader) -> HalanayParams:
    names = ("alpha", "a", "b", "c", "d", "e")
    vals = {n: r.number(n) for n in names}
    vals["f"] = r.number("f", 0.0)
    for t in ("tau1", "tau2", "tau3"):
        vals[t] = r.number(t, r.number("tau", 1.0))
    return _wrap(r.source, lambda: HalanayParams(**vals))


def load_halanay(path) -> HalanayInput:
    """Halanay tuple plus history bounds ``sup_u0`` and ``sup_v0`` (default 1 and 0)."""
    r = _Reader(load_json(path), str(path))
    p = _halanay_params(r)
    sup_u0 = r.number("sup_u0", 1.0)
    sup_v0 = r.number("sup_v0", 0.0)
    if sup_u0 < 0:
        r.fail("sup_u0", "must be nonnegative")
    if sup_v0 < 0:
        r.fail("sup_v0", "must be nonnegative")
    return HalanayInput(p, sup_u0, sup_v0)


@dataclass(frozen=True)
class HalanaySimInput:
    params: HalanayParams
    phi: HistoryFunction
    psi: HistoryFunction


def load_halanay_sim(path) -> HalanaySimInput:
    """Comparison-system simulation input: Halanay tuple with scalar ``phi``, ``psi``."""
    r = _Reader(load_json(path), str(path))
    p = _halanay_params(r)
    return HalanaySimInput(p, r.history("phi"), r.history("psi"))


@dataclass(frozen=True)
class NeutralInput:
    params: ContractivityParams | DissipativityParams
    M: float | None


def load_neutral(path, kind: str) -> NeutralInput:
    """Neutral constants for ``kind`` in {"contract", "dissipate"}.

    ``||N||^2`` comes from ``N_norm2`` or from a matrix ``N``.  The history
    bound comes from ``M`` or from histories: ``phi`` and ``chi`` (their
    squared distance, contractive case) or ``phi`` alone (dissipative case).
    """
    src = str(path)
    r = _Reader(load_json(path), src)
    if r.has("N_norm2"):
        n2 = r.number("N_norm2")
    elif r.has("N"):
        n2 = r.number("N") ** 2 if isinstance(r.data["N"], (int, float)) else norm2_sq(r.matrix("N"))
    else:
        r.fail("N_norm2", "missing required field (or give the matrix N)")
    alpha = r.number("alpha")
    tau = r.number("tau")
    if kind == "contract":
        params = _wrap(src, lambda: ContractivityParams(
            a1=r.number("a1"), b1=r.number("b1"), c1=r.number("c1", 0.0), k1=r.number("k1", 0.0),
            N_norm2=n2, tau=tau, alpha=alpha,
        ))
    elif kind == "dissipate":
        params = _wrap(src, lambda: DissipativityParams(
            gamma=r.number("gamma"), a2=r.number("a2"), b2=r.number("b2"), c2=r.number("c2", 0.0),
            k2=r.number("k2", 0.0), N_norm2=n2, tau=tau, alpha=alpha,
        ))
    else:
        raise ConfigError(f"unknown neutral analysis kind {kind!r}")
    M = None
    if r.has("M"):
        M = r.number("M")
        if M < 0:
            r.fail("M", "must be nonnegative")
    elif r.has("phi"):
        phi = r.history("phi")
        chi = r.history("chi") if (kind == "contract" and r.has("chi")) else None
        if kind == "contract" and chi is None:
            r.fail("chi", "contractive bound needs a second history 'chi' (or give M)")
        if chi is not None and chi.dim != phi.dim:
            r.fail("chi", "phi and chi must have the same dimension")
        M = _wrap(src, lambda: history_bound(phi, tau, chi))
    return NeutralInput(params, M)


def load_any_system(path):
    """Simulation input: a linear system, or a Halanay tuple when ``"type": "halanay"``."""
    data = load_json(path)
    kind = data.get("type", "linear")
    if kind == "linear":
        return load_system(path)
    if kind == "halanay":
        return load_halanay_sim(path)
    raise ConfigError(f"{path}: type: expected 'linear' or 'halanay', got {kind!r}")
