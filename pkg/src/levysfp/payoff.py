"""CFS density coefficients, closed-form payoff Fourier integrals, European curves.

Everything is expressed in scaled log-moneyness y = log(S'/K): the strike sits
at y = 0, a call pays K max(e^y - 1, 0) and a put pays K max(1 - e^y, 0).  The
factor K is carried outside all coefficient arrays.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .curves import PriceCurve
from .errors import PoleProximityError
from .models import ModelSpec, TruncationInterval, char_fn, truncation_interval
from .sfp import DegreeSplit, SFPApproximant, sfp_fit

ENDPOINT_JUMP = -1.0 + 0.0j  # both interval endpoints map to z = -1


@dataclass(frozen=True)
class CFSCoefficientSet:
    """Complex Fourier coefficients on a truncation interval.

    ``bhat[k] = phi(2 pi k/(d-c)) / (d-c)`` are the density coefficients;
    ``ghat`` optionally holds payoff (or combined exercise-product)
    coefficients of the same length.
    """

    interval: TruncationInterval
    bhat: np.ndarray
    ghat: np.ndarray | None = None

    def __post_init__(self) -> None:
        bhat = np.asarray(self.bhat, dtype=complex)
        bhat.setflags(write=False)
        object.__setattr__(self, "bhat", bhat)
        if self.ghat is not None:
            ghat = np.asarray(self.ghat, dtype=complex)
            if len(ghat) != len(bhat):
                raise ValueError("ghat must match bhat in length")
            ghat.setflags(write=False)
            object.__setattr__(self, "ghat", ghat)

    @property
    def max_index(self) -> int:
        return len(self.bhat) - 1

    def series(self) -> np.ndarray:
        """One-sided real-form series a_0 = bhat_0 ghat_0, a_k = 2 bhat_k ghat_k."""
        if self.ghat is None:
            raise ValueError("no payoff coefficients attached")
        a = self.bhat * self.ghat
        a[1:] *= 2.0
        return a


def density_coeffs(
    model: ModelSpec, delta_t: float, interval: TruncationInterval, max_index: int
) -> CFSCoefficientSet:
    """bhat[k] = phi(2 pi k / (d - c), delta_t) / (d - c) for k = 0..max_index."""
    if max_index < 1:
        raise ValueError("max_index must be >= 1")
    omega = interval.angular_freq(np.arange(max_index + 1))
    bhat = char_fn(model, omega, delta_t) / interval.width
    return CFSCoefficientSet(interval, bhat)


def payoff_coeffs(kind: str, sub: tuple[float, float], interval: TruncationInterval, k):
    """Exact Fourier integral of the payoff integrand over [a, b] in [c, d].

    Computes int_a^b g(y) exp(-i omega_k y) dy with g(y) = e^y - 1 for a call
    and 1 - e^y for a put (the caller restricts [a, b] to the payoff support).
    The k = 0 coefficient uses the analytic antiderivative rather than the
    limit of the oscillatory formula.
    """
    a, b = float(sub[0]), float(sub[1])
    if not b > a:
        raise ValueError(f"payoff subinterval requires b > a, got [{a}, {b}]")
    if kind not in ("call", "put"):
        raise ValueError(f"kind must be 'call' or 'put', got {kind!r}")
    k_arr = np.atleast_1d(np.asarray(k))
    omega = interval.angular_freq(k_arr)
    out = np.empty(k_arr.shape, dtype=complex)
    nz = k_arr != 0
    w = omega[nz]
    out[nz] = (np.exp((1.0 - 1j * w) * b) - np.exp((1.0 - 1j * w) * a)) / (1.0 - 1j * w) + (
        np.exp(-1j * w * b) - np.exp(-1j * w * a)
    ) / (1j * w)
    out[~nz] = (np.exp(b) - np.exp(a)) - (b - a)
    if kind == "put":
        out = -out
    return out if np.ndim(k) else complex(out[0])


def payoff_coeffs_or_zero(
    kind: str, sub: tuple[float, float], interval: TruncationInterval, k
) -> np.ndarray:
    """Like payoff_coeffs but an empty/degenerate subinterval integrates to zero."""
    k_arr = np.atleast_1d(np.asarray(k))
    if sub[1] <= sub[0]:
        return np.zeros(k_arr.shape, dtype=complex)
    return payoff_coeffs(kind, sub, interval, k_arr)


def fit_price_approximant(
    coeffs: CFSCoefficientSet,
    degrees: DegreeSplit | None = None,
    jumps: tuple[complex, ...] = (ENDPOINT_JUMP,),
) -> SFPApproximant:
    """SFP fit of the one-sided series 2 sum bhat ghat z^k + bhat_0 ghat_0."""
    return sfp_fit(coeffs.series(), jumps, degrees, interval=coeffs.interval)


def european_coeffs(
    model: ModelSpec,
    kind: str,
    delta_t: float,
    max_index: int,
    l_tilde: float = 8.0,
    interval: TruncationInterval | None = None,
) -> CFSCoefficientSet:
    """Density and payoff coefficients of a European vanilla on [c, d]."""
    if interval is None:
        interval = truncation_interval(model, delta_t, l_tilde)
    dens = density_coeffs(model, delta_t, interval, max_index)
    k = np.arange(max_index + 1)
    sub = (0.0, interval.d) if kind == "call" else (interval.c, 0.0)
    ghat = payoff_coeffs(kind, sub, interval, k)
    return CFSCoefficientSet(interval, dens.bhat, ghat)


def european_price_curve(
    model: ModelSpec,
    kind: str,
    strike: float | None = None,
    spot: float | None = None,
    delta_t: float = 1.0,
    max_index: int = 128,
    l_tilde: float = 8.0,
    degrees: DegreeSplit | None = None,
) -> tuple[SFPApproximant, PriceCurve]:
    """European vanilla price curve V(x~) = exp(-r dt) K Re[SFP(z(x~))].

    Exactly one of ``strike`` (spot-curve form: prices over a range of S) or
    ``spot`` (strike-curve form: prices over a range of K, via
    K = S exp(-x~)) must be given.  The approximant is fitted with the
    endpoint jump z = -1 only.
    """
    if max_index < 8:
        raise ValueError("max_index must be >= 8")
    if (strike is None) == (spot is None):
        raise ValueError("give exactly one of strike= or spot=")
    t0 = time.perf_counter()
    coeffs = european_coeffs(model, kind, delta_t, max_index, l_tilde)
    approx = fit_price_approximant(coeffs, degrees)
    curve = PriceCurve(
        approx=approx,
        interval=coeffs.interval,
        rate=model.r,
        delta_t=delta_t,
        strike=strike if strike is not None else 1.0,
        spot=spot,
        diagnostics={
            "style": "european",
            "U": max_index,
            "L": 1,
            "l_tilde": l_tilde,
            "runtime": time.perf_counter() - t0,
        },
    )
    return approx, curve


def check_conditioning(curve: PriceCurve, x_tilde) -> None:
    """Probe the curve at the given points; degenerate Q raises with the x~."""
    x_arr = np.atleast_1d(np.asarray(x_tilde, dtype=float))
    for x in x_arr:
        try:
            curve.approx(float(x))
        except PoleProximityError as exc:
            raise PoleProximityError(f"denominator degenerate at x~={x}: {exc}") from exc
