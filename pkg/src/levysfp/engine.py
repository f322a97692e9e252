"""Backward-induction pricing of Bermudan, American and knock-out barrier options.

One induction prices a whole curve: all quantities live in scaled
log-moneyness y = log(S'/K), the strike factors out, and the date-l
continuation is carried as combined Fourier coefficients ghat_k so that

    C(x~, t_l) = exp(-r dt) K Re[ 2 sum_k bhat_k ghat_k z^k + bhat_0 ghat_0 ].

At every date the previous step's curve is evaluated through its SFP
approximant (never the raw truncated series), Chebyshev-fitted on the
continuation subinterval, and integrated against the oscillatory Fourier
kernel with FCC weights.  Density and continuation series are never
multiplied term by term.
"""

from __future__ import annotations

import cmath
import time
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Mapping

import numpy as np
from numpy.polynomial import polynomial as npoly

from .chebyshev import cheb_fit_values, lobatto_nodes
from .curves import PriceCurve
from .errors import NumericalError
from .fcc import scaled_filon
from .models import ModelSpec, TruncationInterval, truncation_interval
from .payoff import (
    ENDPOINT_JUMP,
    CFSCoefficientSet,
    density_coeffs,
    fit_price_approximant,
    payoff_coeffs_or_zero,
)
from .sfp import SFPApproximant, sfp_fit

STYLES = ("european", "bermudan", "american", "barrier_DO", "barrier_UO")

NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 50
_DERIV_FLOOR = 1e-14

# Interior continuation sampling source.  False samples the raw truncated CFS
# (exact band-limited updates, stable); True samples the SFP-corrected curve,
# which feeds the rational approximation error back into the recursion and can
# pinch spurious poles onto the evaluation circle for near-delta densities.
SAMPLE_SFP_CURVE = False


@dataclass(frozen=True)
class OptionContract:
    """Vanilla or knock-out contract terms.

    ``dates`` is the number of exercise (Bermudan) or monitoring (barrier)
    dates; they are spaced uniformly with t_L = T.  Barrier styles require a
    level ``barrier`` whose scaled log position log(B/K) must fall strictly
    inside the truncation interval used for pricing.
    """

    kind: str
    style: str
    strike: float
    maturity: float
    dates: int = 1
    barrier: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("call", "put"):
            raise ValueError(f"kind must be 'call' or 'put', got {self.kind!r}")
        if self.style not in STYLES:
            raise ValueError(f"style must be one of {STYLES}, got {self.style!r}")
        if self.strike <= 0.0:
            raise ValueError("strike must be > 0")
        if self.maturity <= 0.0:
            raise ValueError("maturity must be > 0")
        if self.dates < 1:
            raise ValueError("dates must be >= 1")
        if self.style.startswith("barrier"):
            if self.barrier is None or self.barrier <= 0.0:
                raise ValueError("barrier styles require barrier > 0")

    @property
    def scaled_log_barrier(self) -> float:
        if self.barrier is None:
            raise ValueError("contract has no barrier")
        return float(np.log(self.barrier / self.strike))


@dataclass(frozen=True)
class ExercisePoint:
    """Early-exercise point with search diagnostics."""

    x: float
    clamped: bool
    converged: bool
    iterations: int


def _payoff_unit(kind: str, y: float) -> float:
    return max(np.exp(y) - 1.0, 0.0) if kind == "call" else max(1.0 - np.exp(y), 0.0)


def _payoff_unit_deriv(kind: str, y: float) -> float:
    # one-sided derivative of the active branch: the exercise region of a call
    # is y >= 0 and of a put y <= 0, so each kind owns its side of the kink
    if kind == "call":
        return float(np.exp(y)) if y >= 0.0 else 0.0
    return float(-np.exp(y)) if y <= 0.0 else 0.0


def _no_exercise_point(kind: str, lo: float, hi: float, iterations: int) -> ExercisePoint:
    # empty exercise region: the whole interval is continuation
    x = hi if kind == "call" else lo
    return ExercisePoint(x, clamped=True, converged=True, iterations=iterations)


def _validate_root(kind: str, g, x: float, lo: float, hi: float) -> bool:
    """A genuine root has a one-signed exercise region behind it.

    The truncated-series continuation carries periodisation noise near the
    interval seam; crossings induced by that noise oscillate in sign, whereas
    past a true early-exercise point the payoff dominates everywhere.
    """
    side = (x, hi) if kind == "call" else (lo, x)
    if side[1] - side[0] <= NEWTON_TOL:
        return False
    probes = np.linspace(side[0], side[1], 6)[1:-1]
    return all(g(float(y)) > 0.0 for y in probes)


def _newton_exercise(
    kind: str,
    cont: Callable[[float], float],
    cont_deriv: Callable[[float], float],
    x_init: float,
    lo: float,
    hi: float,
) -> ExercisePoint:
    """Newton iteration on U(y) - C(y) = 0 with boundary clamping.

    On a vanishing denominator the search falls back to bisection over a
    bracketing pair found by a coarse sign scan; without a bracket the point
    is clamped to the nearest boundary and flagged.  Interior roots that do
    not separate a one-signed exercise region are rejected as periodisation
    artifacts and treated as no-exercise.
    """

    def g(y: float) -> float:
        return _payoff_unit(kind, y) - cont(y)

    def gprime(y: float) -> float:
        return _payoff_unit_deriv(kind, y) - cont_deriv(y)

    def finish(point: ExercisePoint) -> ExercisePoint:
        interior = lo + NEWTON_TOL < point.x < hi - NEWTON_TOL
        if interior and not _validate_root(kind, g, point.x, lo, hi):
            return _no_exercise_point(kind, lo, hi, point.iterations)
        return point

    x = min(max(x_init, lo), hi)
    boundary_hits = 0
    for it in range(1, NEWTON_MAX_ITER + 1):
        d = gprime(x)
        if abs(d) < _DERIV_FLOOR:
            return finish(_bisect_exercise(g, x, lo, hi, it))
        x_new = x - g(x) / d
        outside = x_new < lo or x_new > hi
        x_new = min(max(x_new, lo), hi)
        if outside and x_new == x:
            # pinned at a boundary with the update pointing outward; a repeat
            # confirms there is no interior root on this side
            boundary_hits += 1
            if boundary_hits >= 2:
                return ExercisePoint(x_new, clamped=True, converged=True, iterations=it)
            continue
        boundary_hits = 0
        if abs(x_new - x) <= NEWTON_TOL:
            return finish(
                ExercisePoint(x_new, clamped=outside, converged=True, iterations=it)
            )
        x = x_new
    return finish(ExercisePoint(x, clamped=False, converged=False, iterations=NEWTON_MAX_ITER))


def _bisect_exercise(g, x_cur: float, lo: float, hi: float, used: int) -> ExercisePoint:
    grid = np.linspace(lo, hi, 65)
    vals = np.array([g(y) for y in grid])
    sign = np.sign(vals)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if len(flips) == 0:
        nearest = lo if abs(x_cur - lo) <= abs(x_cur - hi) else hi
        return ExercisePoint(nearest, clamped=True, converged=False, iterations=used)
    a, b = grid[flips[0]], grid[flips[0] + 1]
    for it in range(200):
        mid = 0.5 * (a + b)
        if g(a) * g(mid) <= 0.0:
            b = mid
        else:
            a = mid
        if b - a <= NEWTON_TOL:
            break
    return ExercisePoint(0.5 * (a + b), clamped=False, converged=True, iterations=used + it)


def _scalar_sfp_eval(approx: SFPApproximant, discount: float, width: float) -> Callable:
    """Fast scalar evaluator for the Newton loop (plain-Python Horner)."""
    p = [complex(v) for v in approx.p[::-1]]
    q = [complex(v) for v in approx.q[::-1]]
    logs = [(complex(eps), [complex(v) for v in c[::-1]]) for eps, c in approx.logs]
    two_pi = 2.0 * np.pi

    def horner(coeffs: list, z: complex) -> complex:
        acc = 0j
        for c in coeffs:
            acc = acc * z + c
        return acc

    def evaluate(y: float) -> float:
        z = cmath.exp(1j * two_pi * y / width)
        num = horner(p, z)
        for eps, lc in logs:
            w = 1.0 - z / eps
            if abs(w) < 1e-12:
                w = 1.0 - z * cmath.exp(1j * 1e-12) / eps
            num += horner(lc, z) * cmath.log(w)
        return discount * (num / horner(q, z)).real

    return evaluate


def _continuation_evals(
    coeffs: CFSCoefficientSet, discount: float
) -> tuple[SFPApproximant, SFPApproximant, Callable, Callable]:
    """SFP-corrected continuation value and derivative evaluators (unit strike)."""
    interval = coeffs.interval
    series = coeffs.series()
    omega = interval.angular_freq(np.arange(coeffs.max_index + 1))
    value_approx = sfp_fit(series, (ENDPOINT_JUMP,), interval=interval)
    deriv_series = 1j * omega * series
    deriv_approx = sfp_fit(deriv_series, (ENDPOINT_JUMP,), interval=interval)
    width = interval.width
    cont = _scalar_sfp_eval(value_approx, discount, width)
    cont_deriv = _scalar_sfp_eval(deriv_approx, discount, width)
    return value_approx, deriv_approx, cont, cont_deriv


def find_exercise_point(
    coeffs: CFSCoefficientSet, kind: str, x_init: float, *, discount: float
) -> ExercisePoint:
    """Locate x* where the payoff crosses the discounted continuation value.

    ``coeffs`` holds the next date's combined coefficients; the continuation
    and its derivative are evaluated through their SFP approximants.  Calls
    are searched on [0, d] and puts on [c, 0] (the exercise region cannot
    extend past the strike while the continuation value is nonnegative);
    roots leaving the interval are clamped to the nearest boundary.
    """
    _, _, cont, cont_deriv = _continuation_evals(coeffs, discount)
    interval = coeffs.interval
    if kind == "call":
        lo, hi = 0.0, interval.d
    else:
        lo, hi = interval.c, 0.0
    return _newton_exercise(kind, cont, cont_deriv, x_init, lo, hi)


@dataclass(frozen=True)
class InductionResult:
    coeffs: CFSCoefficientSet
    delta_t: float
    dates: int
    exercise_path: tuple[float, ...]
    runtime: float


def _terminal_support(contract: OptionContract, interval: TruncationInterval):
    """Payoff integration interval at maturity, after barrier survival."""
    c, d = interval.c, interval.d
    lo, hi = (0.0, d) if contract.kind == "call" else (c, 0.0)
    if contract.style == "barrier_DO":
        lo = max(lo, contract.scaled_log_barrier)
    elif contract.style == "barrier_UO":
        hi = min(hi, contract.scaled_log_barrier)
    return lo, hi


def run_backward_induction(
    model: ModelSpec,
    contract: OptionContract,
    max_index: int = 128,
    cheb_degree: int = 128,
    l_tilde: float = 8.0,
) -> InductionResult:
    """Carry the combined coefficients ghat_k from maturity back to t_0.

    The truncation interval is sized once from cumulants at the full horizon
    T and reused at every date; with uniform steps the density coefficients
    bhat_k are then identical at every date.
    """
    t0 = time.perf_counter()
    n_dates = contract.dates
    delta_t = contract.maturity / n_dates
    interval = truncation_interval(model, contract.maturity, l_tilde)
    if contract.style.startswith("barrier"):
        b_log = contract.scaled_log_barrier
        if not interval.c < b_log < interval.d:
            raise ValueError(
                f"scaled log barrier {b_log:.6f} outside truncation interval "
                f"({interval.c:.6f}, {interval.d:.6f})"
            )
    dens = density_coeffs(model, delta_t, interval, max_index)
    k_vec = np.arange(max_index + 1)
    discount = float(np.exp(-model.r * delta_t))

    ghat = payoff_coeffs_or_zero(
        contract.kind, _terminal_support(contract, interval), interval, k_vec
    )
    x_star = 0.0
    path: list[float] = []
    for step in range(n_dates - 1):
        coeffs = CFSCoefficientSet(interval, dens.bhat, ghat)
        try:
            ghat, x_star = _interior_step(
                contract, coeffs, discount, x_star, k_vec, cheb_degree
            )
        except NumericalError as exc:
            date_index = n_dates - 2 - step
            raise type(exc)(f"at date index {date_index}: {exc}") from exc
        if contract.style == "bermudan":
            path.append(x_star)
    coeffs = CFSCoefficientSet(interval, dens.bhat, ghat)
    return InductionResult(
        coeffs=coeffs,
        delta_t=delta_t,
        dates=n_dates,
        exercise_path=tuple(path),
        runtime=time.perf_counter() - t0,
    )


def _interior_step(
    contract: OptionContract,
    coeffs: CFSCoefficientSet,
    discount: float,
    x_star_prev: float,
    k_vec: np.ndarray,
    cheb_degree: int,
) -> tuple[np.ndarray, float]:
    """One backward date: split the continuation integral and rebuild ghat."""
    interval = coeffs.interval
    c, d = interval.c, interval.d
    if contract.style == "bermudan":
        value_approx, _, cont, cont_deriv = _continuation_evals(coeffs, discount)
        if contract.kind == "call":
            lo, hi = 0.0, d
        else:
            lo, hi = c, 0.0
        point = _newton_exercise(contract.kind, cont, cont_deriv, x_star_prev, lo, hi)
        x_star = point.x
        if contract.kind == "call":
            cont_sub = (c, x_star)
            pay_sub = (max(x_star, 0.0), d)
        else:
            cont_sub = (x_star, d)
            pay_sub = (c, min(x_star, 0.0))
        ghat_pay = payoff_coeffs_or_zero(contract.kind, pay_sub, interval, k_vec)
    else:  # barrier: continuation only, no rebate
        value_approx = fit_price_approximant(coeffs) if SAMPLE_SFP_CURVE else None
        b_log = contract.scaled_log_barrier
        cont_sub = (b_log, d) if contract.style == "barrier_DO" else (c, b_log)
        ghat_pay = np.zeros(len(k_vec), dtype=complex)
        x_star = x_star_prev
    a, b = cont_sub
    if b - a <= 1e-12 * interval.width:
        return ghat_pay, x_star
    nodes = lobatto_nodes(a, b, cheb_degree)
    z = np.exp(1j * 2.0 * np.pi * nodes / interval.width)
    if SAMPLE_SFP_CURVE:
        samples = discount * value_approx.eval_z(z)
    else:
        # the truncated CFS is a trigonometric polynomial: analytic, so the
        # Chebyshev fit reproduces it spectrally and the date-to-date update
        # stays an exact band-limited operation; the SFP correction is applied
        # to the root search and to the final output curve, where the Gibbs
        # error actually matters
        series_coeffs = coeffs.series()
        samples = discount * npoly.polyval(z, series_coeffs).real
    series = cheb_fit_values(samples, a, b)
    ghat_cont = scaled_filon(series, interval, k_vec)
    return ghat_pay + ghat_cont, x_star


def _curve_from_induction(
    model: ModelSpec,
    contract: OptionContract,
    result: InductionResult,
    diagnostics: Mapping[str, Any],
) -> PriceCurve:
    approx = fit_price_approximant(result.coeffs)
    return PriceCurve(
        approx=approx,
        interval=result.coeffs.interval,
        rate=model.r,
        delta_t=result.delta_t,
        strike=contract.strike,
        curve_kind="price",
        strike_locked=contract.style.startswith("barrier"),
        diagnostics=dict(diagnostics),
    )


def bermudan_price(
    model: ModelSpec,
    contract: OptionContract,
    max_index: int = 128,
    cheb_degree: int = 128,
    l_tilde: float = 8.0,
) -> PriceCurve:
    """Price curve of a Bermudan (or European, if dates == 1) option."""
    if contract.style not in ("bermudan", "european"):
        raise ValueError("bermudan_price requires a bermudan or european contract")
    result = run_backward_induction(model, contract, max_index, cheb_degree, l_tilde)
    return _curve_from_induction(
        model,
        contract,
        result,
        {
            "style": contract.style,
            "U": max_index,
            "N_tilde": cheb_degree,
            "L": contract.dates,
            "l_tilde": l_tilde,
            "runtime": result.runtime,
            "exercise_path": result.exercise_path,
        },
    )


def barrier_price(
    model: ModelSpec,
    contract: OptionContract,
    max_index: int = 128,
    cheb_degree: int = 128,
    l_tilde: float = 8.0,
) -> PriceCurve:
    """Price curve of a discretely monitored knock-out (DO/UO) option."""
    if not contract.style.startswith("barrier"):
        raise ValueError("barrier_price requires a barrier_DO or barrier_UO contract")
    result = run_backward_induction(model, contract, max_index, cheb_degree, l_tilde)
    return _curve_from_induction(
        model,
        contract,
        result,
        {
            "style": contract.style,
            "U": max_index,
            "N_tilde": cheb_degree,
            "L": contract.dates,
            "l_tilde": l_tilde,
            "barrier": contract.barrier,
            "runtime": result.runtime,
        },
    )


RICHARDSON_WEIGHTS = (-1.0, 14.0, -56.0, 64.0)  # /21, for L, L+1, L+2, L+3


@dataclass(frozen=True)
class AmericanCurve:
    """4-point Richardson extrapolation of Bermudan curves toward American."""

    component_curves: tuple[PriceCurve, ...]
    level: int
    diagnostics: Mapping[str, Any] = field(default_factory=dict)

    def price_at_spot(self, spot, strike: float | None = None) -> np.ndarray:
        vals = [c.price_at_spot(spot, strike) for c in self.component_curves]
        return sum(w * v for w, v in zip(RICHARDSON_WEIGHTS, vals)) / 21.0

    def values(self, x_tilde, strike: float | None = None) -> np.ndarray:
        vals = [c.values(x_tilde, strike) for c in self.component_curves]
        return sum(w * v for w, v in zip(RICHARDSON_WEIGHTS, vals)) / 21.0


def american_price(
    model: ModelSpec,
    contract: OptionContract,
    level: int = 0,
    max_index: int = 128,
    cheb_degree: int = 128,
    l_tilde: float = 8.0,
    mode: str = "richardson",
    limit_dates: int = 1024,
) -> AmericanCurve | PriceCurve:
    """American option via Richardson extrapolation of dyadic Bermudans.

    ``mode="richardson"`` combines Bermudan runs at 2^level .. 2^(level+3)
    exercise dates with weights (64, -56, 14, -1)/21 on the finest-to-coarsest
    ladder.  ``mode="limit"`` prices a single Bermudan with ``limit_dates``
    exercise dates as the large-L approximation.
    """
    if contract.style != "american":
        raise ValueError("american_price requires an american contract")
    if mode == "limit":
        berm = replace(contract, style="bermudan", dates=limit_dates)
        return bermudan_price(model, berm, max_index, cheb_degree, l_tilde)
    if mode != "richardson":
        raise ValueError("mode must be 'richardson' or 'limit'")
    if level < 0:
        raise ValueError("level must be >= 0")
    curves = []
    for j in range(4):
        berm = replace(contract, style="bermudan", dates=2 ** (level + j))
        curves.append(bermudan_price(model, berm, max_index, cheb_degree, l_tilde))
    runtime = sum(c.diagnostics["runtime"] for c in curves)
    return AmericanCurve(
        component_curves=tuple(curves),
        level=level,
        diagnostics={
            "style": "american",
            "U": max_index,
            "N_tilde": cheb_degree,
            "level": level,
            "runtime": runtime,
        },
    )


def greeks_curve(
    model: ModelSpec,
    contract: OptionContract,
    max_index: int = 128,
    cheb_degree: int = 128,
    l_tilde: float = 8.0,
) -> tuple[PriceCurve, PriceCurve]:
    """Delta and Gamma curves from the final combined coefficients.

    The Delta series is 2 sum (i omega_k) bhat_k ghat_k z^k and the Gamma
    series 2 sum (i omega_k)(i omega_k - 1) bhat_k ghat_k z^k; each is
    SFP-fitted separately and scaled by exp(-r dt - x~) and
    exp(-r dt - 2 x~)/K respectively.
    """
    if contract.style == "american":
        raise ValueError("greeks_curve supports european, bermudan and barrier styles")
    result = run_backward_induction(model, contract, max_index, cheb_degree, l_tilde)
    coeffs = result.coeffs
    interval = coeffs.interval
    series = coeffs.series()
    omega = interval.angular_freq(np.arange(coeffs.max_index + 1))
    base = {
        "style": contract.style,
        "U": max_index,
        "N_tilde": cheb_degree,
        "L": contract.dates,
        "runtime": result.runtime,
    }
    out = []
    for kind_name, factor in (
        ("delta", 1j * omega),
        ("gamma", 1j * omega * (1j * omega - 1.0)),
    ):
        greek_series = factor * series
        greek_series[0] = 0.0
        approx = sfp_fit(greek_series, (ENDPOINT_JUMP,), interval=interval)
        out.append(
            PriceCurve(
                approx=approx,
                interval=interval,
                rate=model.r,
                delta_t=result.delta_t,
                strike=contract.strike,
                curve_kind=kind_name,
                strike_locked=contract.style.startswith("barrier"),
                diagnostics=dict(base, greek=kind_name),
            )
        )
    return out[0], out[1]
