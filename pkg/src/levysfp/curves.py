"""Price and Greek curves: closed-form evaluable results of a pricing run."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .models import TruncationInterval
from .sfp import SFPApproximant


@dataclass(frozen=True)
class PriceCurve:
    """A function-like pricing result over the truncation interval.

    The curve is a closed form (an SFP approximant in log-moneyness
    x~ = log(S/K)), not an interpolant: evaluating it on different grids
    yields identical values at shared abscissae.

    ``curve_kind`` selects the scaling applied to the raw approximant value:
    ``price`` -> exp(-r dt) K, ``delta`` -> exp(-r dt - x~) (dimensionless),
    ``gamma`` -> exp(-r dt - 2 x~) / K.
    """

    approx: SFPApproximant
    interval: TruncationInterval
    rate: float
    delta_t: float
    strike: float
    spot: float | None = None
    curve_kind: str = "price"
    strike_locked: bool = False
    diagnostics: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.curve_kind not in ("price", "delta", "gamma"):
            raise ValueError(f"unknown curve kind {self.curve_kind!r}")
        if self.strike <= 0.0:
            raise ValueError("strike must be positive")

    @property
    def discount(self) -> float:
        return float(np.exp(-self.rate * self.delta_t))

    def unit_values(self, x_tilde) -> np.ndarray:
        """Discounted per-unit-strike values exp(-r dt) Re[SFP(z(x~))]."""
        return self.discount * self.approx(x_tilde)

    def values(self, x_tilde, strike: float | None = None) -> np.ndarray:
        k = self.strike if strike is None else float(strike)
        if self.strike_locked and k != self.strike:
            raise ValueError(
                "curve is specific to its contract strike (barrier level is "
                "defined relative to it); rerun the pricer for other strikes"
            )
        x_arr = np.asarray(x_tilde, dtype=float)
        raw = self.unit_values(x_arr)
        if self.curve_kind == "price":
            return raw * k
        if self.curve_kind == "delta":
            return raw * np.exp(-x_arr)
        return raw * np.exp(-2.0 * x_arr) / k

    def price_at_spot(self, spot, strike: float | None = None) -> np.ndarray:
        """Evaluate at spot levels (array ok) for a fixed strike."""
        k = self.strike if strike is None else float(strike)
        x_tilde = np.log(np.asarray(spot, dtype=float) / k)
        return self.values(x_tilde, strike=k)

    def price_at_strike(self, strike, spot: float | None = None) -> np.ndarray:
        """Evaluate at strike levels (array ok) for a fixed spot."""
        s = self.spot if spot is None else float(spot)
        if s is None:
            raise ValueError("curve has no spot attached; pass spot explicitly")
        strikes = np.atleast_1d(np.asarray(strike, dtype=float))
        out = np.array(
            [self.values(np.log(s / k), strike=k) for k in strikes], dtype=float
        )
        return out if np.ndim(strike) else float(out[0])
