"""Exponential Levy models: characteristic functions, cumulants, truncation intervals.

All models are parameterised under the risk-neutral measure.  The log-price
increment over a horizon ``t`` is ``L_t = (r - q + omega) t + X_t`` where ``X``
is the driftless Levy process and ``omega`` is the martingale correction that
makes the discounted stock price a martingale, i.e. ``E[exp(L_t)] = exp((r-q)t)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Mapping

import numpy as np
from scipy.special import gamma as _gamma


class ModelKind(str, Enum):
    BS = "BS"
    VG = "VG"
    CGMY = "CGMY"
    NIG = "NIG"


_REQUIRED_PARAMS = {
    ModelKind.BS: ("sigma",),
    ModelKind.VG: ("sigma", "theta", "nu"),
    ModelKind.CGMY: ("C", "G", "M", "Y"),
    ModelKind.NIG: ("alpha", "beta", "delta"),
}


@dataclass(frozen=True)
class ModelSpec:
    """A Levy model identifier plus parameters, risk-free rate and dividend yield.

    Parameter domains are enforced at construction; martingale-usability
    conditions (CGMY ``M > 1``, NIG ``|beta + 1| < alpha``, VG
    ``1 - theta*nu - sigma^2 nu/2 > 0``) are treated as part of the domain
    because the risk-neutral drift is undefined without them.
    """

    kind: ModelKind
    params: Mapping[str, float]
    r: float
    q: float = 0.0

    def __post_init__(self) -> None:
        kind = ModelKind(self.kind)
        object.__setattr__(self, "kind", kind)
        required = _REQUIRED_PARAMS[kind]
        missing = [name for name in required if name not in self.params]
        if missing:
            raise ValueError(f"{kind.value} model missing parameters: {missing}")
        p = MappingProxyType({name: float(self.params[name]) for name in required})
        object.__setattr__(self, "params", p)
        self._validate()

    def _validate(self) -> None:
        p = self.params
        if self.kind is ModelKind.BS:
            if p["sigma"] <= 0.0:
                raise ValueError("BS requires sigma > 0")
        elif self.kind is ModelKind.VG:
            if p["sigma"] <= 0.0 or p["nu"] <= 0.0:
                raise ValueError("VG requires sigma > 0 and nu > 0")
            if 1.0 - p["theta"] * p["nu"] - 0.5 * p["sigma"] ** 2 * p["nu"] <= 0.0:
                raise ValueError(
                    "VG drift correction undefined: need 1 - theta*nu - sigma^2*nu/2 > 0"
                )
        elif self.kind is ModelKind.CGMY:
            if p["C"] <= 0.0 or p["G"] <= 0.0:
                raise ValueError("CGMY requires C > 0 and G > 0")
            if p["M"] <= 1.0:
                raise ValueError("CGMY requires M > 1 so that phi(-i) is finite")
            if not (0.0 < p["Y"] < 2.0) or p["Y"] == 1.0:
                raise ValueError("CGMY requires Y in (0, 2) excluding 1")
        elif self.kind is ModelKind.NIG:
            if p["alpha"] <= 0.0 or p["delta"] <= 0.0:
                raise ValueError("NIG requires alpha > 0 and delta > 0")
            if abs(p["beta"]) >= p["alpha"]:
                raise ValueError("NIG requires |beta| < alpha")
            if abs(p["beta"] + 1.0) >= p["alpha"]:
                raise ValueError("NIG requires |beta + 1| < alpha for the martingale drift")

    # -- convenience constructors -------------------------------------------------

    @classmethod
    def bs(cls, sigma: float, r: float, q: float = 0.0) -> "ModelSpec":
        return cls(ModelKind.BS, {"sigma": sigma}, r, q)

    @classmethod
    def vg(cls, sigma: float, theta: float, nu: float, r: float, q: float = 0.0) -> "ModelSpec":
        return cls(ModelKind.VG, {"sigma": sigma, "theta": theta, "nu": nu}, r, q)

    @classmethod
    def cgmy(cls, c: float, g: float, m: float, y: float, r: float, q: float = 0.0) -> "ModelSpec":
        return cls(ModelKind.CGMY, {"C": c, "G": g, "M": m, "Y": y}, r, q)

    @classmethod
    def nig(cls, alpha: float, beta: float, delta: float, r: float, q: float = 0.0) -> "ModelSpec":
        return cls(ModelKind.NIG, {"alpha": alpha, "beta": beta, "delta": delta}, r, q)

    @property
    def omega(self) -> float:
        """Martingale drift correction so that E[exp(L_t)] = exp((r-q)t)."""
        p = self.params
        if self.kind is ModelKind.BS:
            return -0.5 * p["sigma"] ** 2
        if self.kind is ModelKind.VG:
            return np.log(1.0 - p["theta"] * p["nu"] - 0.5 * p["sigma"] ** 2 * p["nu"]) / p["nu"]
        if self.kind is ModelKind.CGMY:
            c, g, m, y = p["C"], p["G"], p["M"], p["Y"]
            return -c * _gamma(-y) * ((m - 1.0) ** y - m**y + (g + 1.0) ** y - g**y)
        a, b, d = p["alpha"], p["beta"], p["delta"]
        return -d * (np.sqrt(a * a - b * b) - np.sqrt(a * a - (b + 1.0) ** 2))


@dataclass(frozen=True)
class Cumulants:
    """First, second and fourth cumulants of the log-price increment."""

    c1: float
    c2: float
    c4: float

    def __post_init__(self) -> None:
        if self.c2 < 0.0 or self.c4 < 0.0:
            raise ValueError("cumulants c2 and c4 must be nonnegative")


@dataclass(frozen=True)
class TruncationInterval:
    """Symmetric truncation interval [c, d] with c = -d."""

    c: float
    d: float

    def __post_init__(self) -> None:
        if not (self.c < 0.0 < self.d):
            raise ValueError("truncation interval requires c < 0 < d")
        if not np.isclose(self.c, -self.d, rtol=0.0, atol=1e-12 * abs(self.d)):
            raise ValueError("truncation interval must be symmetric: c = -d")

    @property
    def width(self) -> float:
        return self.d - self.c

    def angular_freq(self, k):
        """Fourier frequency omega_k = 2 pi k / (d - c)."""
        return 2.0 * np.pi * np.asarray(k) / self.width


def _char_exponent(model: ModelSpec, u):
    """Characteristic exponent psi(u) of the driftless process, per unit time."""
    p = model.params
    u = np.asarray(u, dtype=complex)
    if model.kind is ModelKind.BS:
        return -0.5 * p["sigma"] ** 2 * u * u
    if model.kind is ModelKind.VG:
        s, th, nu = p["sigma"], p["theta"], p["nu"]
        return -np.log(1.0 - 1j * th * nu * u + 0.5 * s * s * nu * u * u) / nu
    if model.kind is ModelKind.CGMY:
        c, g, m, y = p["C"], p["G"], p["M"], p["Y"]
        return c * _gamma(-y) * ((m - 1j * u) ** y - m**y + (g + 1j * u) ** y - g**y)
    a, b, d = p["alpha"], p["beta"], p["delta"]
    return d * (np.sqrt(a * a - b * b) - np.sqrt(a * a - (b + 1j * u) ** 2))


def char_fn(model: ModelSpec, u, t: float):
    """Risk-neutral characteristic function phi(u) = E[exp(i u L_t)].

    Accepts real ``u`` (scalars or arrays); complex ``u`` is allowed as an
    analytic continuation, e.g. ``u = -1j`` recovers the martingale condition
    ``phi(-1j) = exp((r - q) t)``.
    """
    if t <= 0.0:
        raise ValueError("char_fn requires t > 0")
    u = np.asarray(u, dtype=complex)
    drift = model.r - model.q + model.omega
    out = np.exp(1j * u * drift * t + t * _char_exponent(model, u))
    return out if out.ndim else complex(out)


def cumulants(model: ModelSpec, t: float) -> Cumulants:
    """Closed-form cumulants c1, c2, c4 of L_t.

    These agree with derivatives of ``log char_fn`` at u = 0 (the CGMY c1
    includes the jump-mean term ``C Gamma(1-Y) (M^{Y-1} - G^{Y-1}) t`` which
    is required for that identity to hold when G != M).
    """
    if t <= 0.0:
        raise ValueError("cumulants requires t > 0")
    p = model.params
    drift = model.r - model.q + model.omega
    if model.kind is ModelKind.BS:
        return Cumulants(drift * t, p["sigma"] ** 2 * t, 0.0)
    if model.kind is ModelKind.VG:
        s, th, nu = p["sigma"], p["theta"], p["nu"]
        c1 = (drift + th) * t
        c2 = (s * s + nu * th * th) * t
        c4 = 3.0 * (s**4 * nu + 2.0 * th**4 * nu**3 + 4.0 * s * s * th * th * nu * nu) * t
        return Cumulants(c1, c2, c4)
    if model.kind is ModelKind.CGMY:
        c, g, m, y = p["C"], p["G"], p["M"], p["Y"]
        c1 = drift * t + c * t * _gamma(1.0 - y) * (m ** (y - 1.0) - g ** (y - 1.0))
        c2 = c * t * _gamma(2.0 - y) * (m ** (y - 2.0) + g ** (y - 2.0))
        c4 = c * t * _gamma(4.0 - y) * (m ** (y - 4.0) + g ** (y - 4.0))
        return Cumulants(c1, c2, c4)
    a, b, d = p["alpha"], p["beta"], p["delta"]
    g0sq = a * a - b * b
    c1 = drift * t + d * t * b / np.sqrt(g0sq)
    c2 = d * t * a * a * g0sq**-1.5
    c4 = 3.0 * d * t * a * a * (a * a + 4.0 * b * b) * g0sq**-3.5
    return Cumulants(c1, c2, c4)


def truncation_interval(model: ModelSpec, t: float, l_tilde: float = 8.0) -> TruncationInterval:
    """Cumulant-based symmetric interval d = |c1 + L~ sqrt(c2 + sqrt(c4))|, c = -d."""
    if not 8.0 <= l_tilde <= 12.0:
        raise ValueError("l_tilde must lie in [8, 12]")
    cum = cumulants(model, t)
    d = abs(cum.c1 + l_tilde * np.sqrt(cum.c2 + np.sqrt(cum.c4)))
    return TruncationInterval(-d, d)
