"""Independent verification oracles: Black-Scholes closed forms, a cosine-series
European pricer, and a dense-grid quadrature backward-induction pricer.

The quadrature oracle deliberately shares nothing with the main pricing path
beyond the characteristic function and the cumulant-based interval: the
transition density is recovered by direct Fourier inversion on a dense grid
and the continuation expectation is computed by discrete convolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve
from scipy.stats import norm

from .engine import OptionContract
from .models import ModelSpec, char_fn, cumulants, truncation_interval


# -- Black-Scholes closed forms ---------------------------------------------------


def bs_price(spot, strike, rate, dividend, sigma, maturity, kind: str):
    """Black-Scholes European price (vectorised over spot or strike)."""
    s = np.asarray(spot, dtype=float)
    k = np.asarray(strike, dtype=float)
    vol = sigma * np.sqrt(maturity)
    d1 = (np.log(s / k) + (rate - dividend + 0.5 * sigma**2) * maturity) / vol
    d2 = d1 - vol
    df_r = np.exp(-rate * maturity)
    df_q = np.exp(-dividend * maturity)
    if kind == "call":
        return s * df_q * norm.cdf(d1) - k * df_r * norm.cdf(d2)
    return k * df_r * norm.cdf(-d2) - s * df_q * norm.cdf(-d1)


def bs_delta(spot, strike, rate, dividend, sigma, maturity, kind: str):
    s = np.asarray(spot, dtype=float)
    vol = sigma * np.sqrt(maturity)
    d1 = (np.log(s / strike) + (rate - dividend + 0.5 * sigma**2) * maturity) / vol
    df_q = np.exp(-dividend * maturity)
    if kind == "call":
        return df_q * norm.cdf(d1)
    return -df_q * norm.cdf(-d1)


def bs_gamma(spot, strike, rate, dividend, sigma, maturity):
    s = np.asarray(spot, dtype=float)
    vol = sigma * np.sqrt(maturity)
    d1 = (np.log(s / strike) + (rate - dividend + 0.5 * sigma**2) * maturity) / vol
    return np.exp(-dividend * maturity) * norm.pdf(d1) / (s * vol)


# -- Fourier-cosine series European pricer ----------------------------------------


def cos_european_price(
    model: ModelSpec,
    kind: str,
    strike: float,
    maturity: float,
    spots,
    n_terms: int = 256,
    l_tilde: float = 8.0,
):
    """European vanilla price by a cosine-series expansion on [c, d].

    Works in x~ = log(S/K) with the payoff cosine coefficients in closed form;
    used as an independent cross-check of the complex-exponential path.
    """
    interval = truncation_interval(model, maturity, l_tilde)
    a, b = interval.c, interval.d
    n = np.arange(n_terms)
    u = n * np.pi / (b - a)
    phi = char_fn(model, u, maturity)
    weights = np.ones(n_terms)
    weights[0] = 0.5

    lo, hi = (0.0, b) if kind == "call" else (a, 0.0)
    theta_lo = u * (lo - a)
    theta_hi = u * (hi - a)
    # chi = int e^y cos(u(y-a)) dy, psi = int cos(u(y-a)) dy over [lo, hi]
    chi = (
        np.exp(hi) * (np.cos(theta_hi) + u * np.sin(theta_hi))
        - np.exp(lo) * (np.cos(theta_lo) + u * np.sin(theta_lo))
    ) / (1.0 + u * u)
    psi = np.empty(n_terms)
    psi[0] = hi - lo
    psi[1:] = (np.sin(theta_hi[1:]) - np.sin(theta_lo[1:])) / u[1:]
    if kind == "call":
        vk = (2.0 / (b - a)) * (chi - psi)
    else:
        vk = (2.0 / (b - a)) * (psi - chi)

    x_tilde = np.log(np.asarray(spots, dtype=float) / strike)
    phase = np.exp(1j * np.outer(u, x_tilde - a))
    total = (weights * vk * np.real(phi[:, None] * phase).T).sum(axis=1)
    return strike * np.exp(-model.r * maturity) * total


# -- Dense-grid quadrature backward induction --------------------------------------


@dataclass(frozen=True)
class QuadOracleResult:
    """Reference values plus a grid-doubling error estimate."""

    spots: np.ndarray
    values: np.ndarray
    error_estimate: float
    converged: bool


def _one_step_density(model: ModelSpec, dt: float, offsets: np.ndarray) -> np.ndarray:
    """Transition density by trapezoid Fourier inversion, f(x) = (1/pi) int Re[phi e^{-iux}] du."""
    u_max = 64.0
    while abs(char_fn(model, u_max, dt)) > 1e-16:
        u_max *= 2.0
        if u_max > 1e8:
            raise ValueError(
                "characteristic function decays too slowly for direct density "
                "inversion at this step size"
            )
    span = max(np.abs(offsets).max(), 1e-6)
    du = np.pi / (2.0 * span)  # periodisation period 4*span keeps aliasing negligible
    n_u = int(np.ceil(u_max / du)) + 1
    u = np.linspace(0.0, u_max, n_u)
    phi = char_fn(model, u, dt)
    w = np.ones(n_u)
    w[0] = 0.5
    w[-1] = 0.5
    kernel = np.exp(-1j * np.outer(offsets, u))
    du_eff = u[1] - u[0]
    return (kernel @ (w * phi)).real * du_eff / np.pi


def quad_bermudan_price(
    model: ModelSpec,
    contract: OptionContract,
    spots,
    grid_size: int = 2**14,
    l_tilde: float = 8.0,
    check_doubling: bool = True,
) -> QuadOracleResult:
    """Brute-force Bermudan/barrier/European reference by trapezoidal convolution.

    Feasible for small date counts (<= 16).  The returned error estimate is
    the largest change when the spatial grid is doubled; if the doubling
    check is skipped the estimate is reported as NaN.
    """
    if contract.dates > 16:
        raise ValueError("quadrature oracle is restricted to dates <= 16")
    if grid_size < 2**12:
        raise ValueError("grid_size must be at least 2^12")
    spots = np.atleast_1d(np.asarray(spots, dtype=float))
    values = _quad_run(model, contract, spots, grid_size, l_tilde)
    if not check_doubling:
        return QuadOracleResult(spots, values, float("nan"), True)
    coarse = _quad_run(model, contract, spots, grid_size // 2, l_tilde)
    err = float(np.abs(values - coarse).max())
    return QuadOracleResult(spots, values, err, err <= 1e-5 * contract.strike)


def _quad_run(
    model: ModelSpec,
    contract: OptionContract,
    spots: np.ndarray,
    grid_size: int,
    l_tilde: float,
) -> np.ndarray:
    n_dates = contract.dates
    dt = contract.maturity / n_dates
    interval = truncation_interval(model, contract.maturity, l_tilde)
    cum = cumulants(model, dt)
    pad = abs(cum.c1) + 12.0 * np.sqrt(cum.c2 + np.sqrt(cum.c4))
    h = interval.width / grid_size
    n_pad = int(np.ceil(n_dates * pad / h))
    x = (np.arange(-n_pad, grid_size + n_pad + 1) * h) + interval.c
    n_off = int(np.ceil(pad / h))
    offsets = np.arange(-n_off, n_off + 1) * h
    dens = _one_step_density(model, dt, offsets)
    disc = float(np.exp(-model.r * dt))

    if contract.kind == "call":
        payoff = np.maximum(np.exp(x) - 1.0, 0.0) * contract.strike
    else:
        payoff = np.maximum(1.0 - np.exp(x), 0.0) * contract.strike

    def survives(grid: np.ndarray) -> np.ndarray:
        if contract.style == "barrier_DO":
            return grid > contract.scaled_log_barrier
        if contract.style == "barrier_UO":
            return grid < contract.scaled_log_barrier
        return np.ones_like(grid, dtype=bool)

    v = payoff * survives(x) if contract.style.startswith("barrier") else payoff.copy()
    cont = v
    for _ in range(n_dates):
        # C(x_i) = disc * sum_j f(off_j) V(x_i + off_j) h
        cont = disc * h * fftconvolve(v, dens[::-1], mode="same")
        # exercise/knock-out decisions apply at the monitoring dates t_1..t_{L-1};
        # after the final convolution `cont` is already the t_0 value
        if contract.style == "bermudan":
            v = np.maximum(cont, payoff)
        elif contract.style.startswith("barrier"):
            v = cont * survives(x)
        else:
            v = cont
    x_query = np.log(spots / contract.strike)
    return np.interp(x_query, x, cont)
