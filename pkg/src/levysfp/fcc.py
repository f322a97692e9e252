"""Filon-Clenshaw-Curtis weights w_n(k~) = int_{-1}^{1} T_n(s) exp(i k~ s) ds.

Three regimes keep the computation stable for every oscillation parameter:

* ``|k~| < SMALL_KT`` -- Taylor expansion of exp(i k~ s) against exact
  polynomial moments of T_n (the forward recurrence cancels catastrophically
  as k~ -> 0).
* ``n <= |k~|`` -- forward recurrence for rho_n(k~) = int U_{n-1}(s) e^{i k~ s} ds,
  which is stable in this range.
* ``|k~| < n`` -- the recurrence is solved as a boundary-value problem: a
  tridiagonal system (Oliver-style, one condition at each end) whose far
  boundary value rho_{2M} comes from an asymptotic expansion in 1/(2M).

Weight vectors are cached keyed by (k~, degree); entries are immutable, so
concurrent readers are safe and insertion is idempotent.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

from .chebyshev import ChebSeries
from .models import TruncationInterval

SMALL_KT = 0.02
_MOMENT_ORDER = 6  # Taylor terms below SMALL_KT; error < SMALL_KT^7/7! ~ 2.5e-16
_DAMPING_MARGIN = 48  # extra rows past the needed degree; damps boundary error ~2^-48
_ASYM_COARSE_TOL = 1e-5  # tail ratio before damping; combined error < 1e-5 * 2^-48

_cache: "OrderedDict[tuple[float, int], np.ndarray]" = OrderedDict()
_CACHE_MAX = 4096


@dataclass(frozen=True)
class FCCWeights:
    """Weights w_0..w_degree for a single oscillation parameter."""

    k_tilde: float
    degree: int
    w: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.w, dtype=complex)
        w.setflags(write=False)
        object.__setattr__(self, "w", w)


def _cheb_plain_integrals(m_max: int) -> np.ndarray:
    """I_m = int_{-1}^{1} T_m(s) ds = (1 + (-1)^m)/(1 - m^2), with I_1 = 0."""
    m = np.arange(m_max + 1)
    out = np.zeros(m_max + 1)
    even = m % 2 == 0
    out[even] = 2.0 / (1.0 - m[even].astype(float) ** 2)
    return out


def _moments_table(degree: int, j_max: int) -> np.ndarray:
    """m[n, j] = int_{-1}^{1} s^j T_n(s) ds via s^j T_n = 2^-j sum_i C(j,i) T_|n-j+2i|."""
    from math import comb

    base = _cheb_plain_integrals(degree + j_max)
    n = np.arange(degree + 1)
    m = np.zeros((degree + 1, j_max + 1))
    for j in range(j_max + 1):
        acc = np.zeros(degree + 1)
        for i in range(j + 1):
            acc += comb(j, i) * base[np.abs(n - j + 2 * i)]
        m[:, j] = acc / 2.0**j
    return m


def _weights_small_kt(kts: np.ndarray, degree: int) -> np.ndarray:
    """Moment/Taylor path for |k~| below SMALL_KT (includes k~ = 0 exactly)."""
    moments = _moments_table(degree, _MOMENT_ORDER)
    powers = np.ones((_MOMENT_ORDER + 1, len(kts)), dtype=complex)
    fact = 1.0
    for j in range(1, _MOMENT_ORDER + 1):
        fact *= j
        powers[j] = (1j * kts) ** j / fact
    return moments @ powers


def _gammas(n: np.ndarray, kt: float) -> np.ndarray:
    """gamma_n(k~): 2 sin(k~)/k~ for even n, 2 cos(k~)/(i k~) for odd n."""
    out = np.where(n % 2 == 0, 2.0 * np.sin(kt) / kt, 2.0 * np.cos(kt) / (1j * kt) + 0j)
    return out.astype(complex)


def _rho_far_boundary(two_m: int, kt: float) -> complex:
    """Asymptotic expansion of rho_{2M}(k~) for 2M >> k~ (four p_r(0) terms)."""
    p0 = 1.0 / two_m
    p1 = kt / two_m**3
    p2 = 3.0 * kt**2 / two_m**5
    p3 = (15.0 * kt**2 - two_m * two_m) * kt / two_m**7
    return 2j * ((p0 - p2) * np.sin(kt) + (p1 - p3) * np.cos(kt))


def _choose_m(n0: int, degree: int, kt: float) -> int:
    """System size for the boundary-value solve of rho_{n0}..rho_{2M-1}.

    The far boundary error |rho_2M - asymptotic| is damped through the
    back-substitution by roughly prod k~/(2n) <= 2^-(2M-1-degree) before it
    reaches the needed indices n <= degree, so a fixed margin of rows beyond
    max(n0, degree) already buries it below machine precision; M is then
    doubled only while the truncated-tail ratio is still material.
    """
    m = max((n0 + 2) // 2, (degree + _DAMPING_MARGIN + 2) // 2)
    while True:
        two_m = 2 * m
        last_rel = abs((15.0 * kt**2 - two_m * two_m) * kt / two_m**7) * two_m
        if last_rel < _ASYM_COARSE_TOL:
            return m
        m *= 2


def _oliver_block(kt: float, degree: int, rho_below: complex) -> tuple:
    """Tridiagonal pieces (sub, diag, sup, rhs, n0, two_m) for one k~."""
    n0 = int(np.ceil(kt))
    big_m = _choose_m(n0, degree, kt)
    two_m = 2 * big_m
    idx = np.arange(n0, two_m)
    diag = (2.0 * idx / (1j * kt)).astype(complex)
    rhs = 2.0 * _gammas(idx, kt)
    rhs[0] += rho_below
    rhs[-1] -= _rho_far_boundary(two_m, kt)
    sub = np.full(len(idx) - 1, -1.0, dtype=complex)
    sup = np.full(len(idx) - 1, 1.0, dtype=complex)
    return sub, diag, sup, rhs, n0


def _forward_rho(kt: float, degree: int, g: np.ndarray) -> np.ndarray:
    """rho_1..rho_n1 by forward recurrence (stable for n <= k~); rest zero."""
    rho = np.zeros(degree + 1, dtype=complex)
    n1 = min(degree, int(np.floor(kt)))
    if degree >= 1:
        rho[1] = g[0]
    if degree >= 2:
        rho[2] = 2.0 * g[1] - (2.0 / (1j * kt)) * g[0]
    for m in range(2, n1):
        rho[m + 1] = rho[m - 1] + 2.0 * g[m] - (2.0 * m / (1j * kt)) * rho[m]
    return rho


def _weights_oliver_batch(kts: np.ndarray, degree: int) -> np.ndarray:
    """Weights for k~ in [SMALL_KT, degree): mixed recurrence + boundary-value solve.

    The independent tridiagonal systems of all requested k~ are concatenated
    into one block-diagonal tridiagonal system and solved with a single
    LAPACK call.
    """
    cols = np.empty((degree + 1, len(kts)), dtype=complex)
    n = np.arange(degree + 1)
    rhos = []
    blocks = []
    for kt in kts:
        g = _gammas(n, kt)
        rho = _forward_rho(kt, degree, g)
        n0 = int(np.ceil(kt))
        rho_below = rho[n0 - 1] if n0 >= 2 else 0.0  # rho_0 = 0
        blocks.append(_oliver_block(kt, degree, rho_below))
        rhos.append(rho)
    sub = np.concatenate([np.concatenate([b[0], [0.0]]) for b in blocks])[:-1]
    diag = np.concatenate([b[1] for b in blocks])
    sup = np.concatenate([np.concatenate([b[2], [0.0]]) for b in blocks])[:-1]
    rhs = np.concatenate([b[3] for b in blocks])
    _, _, _, x, info = lapack.zgtsv(sub, diag, sup, rhs)
    if info != 0:
        raise np.linalg.LinAlgError(f"tridiagonal solve failed (info={info})")
    pos = 0
    for j, (kt, rho, block) in enumerate(zip(kts, rhos, blocks)):
        size = len(block[1])
        n0 = block[4]
        rho[n0:] = x[pos : pos + degree + 1 - n0]
        pos += size
        g = _gammas(n, kt)
        w = np.empty(degree + 1, dtype=complex)
        w[0] = g[0]
        if degree >= 1:
            w[1:] = g[1:] - (n[1:] / (1j * kt)) * rho[1:]
        cols[:, j] = w
    return cols


def _weights_recurrence_batch(kts: np.ndarray, degree: int) -> np.ndarray:
    """Vectorised forward recurrence for a batch of k~ >= degree (all stable)."""
    nk = len(kts)
    n = np.arange(degree + 1)
    even = (n % 2 == 0)[:, None]
    g = np.where(even, 2.0 * np.sin(kts) / kts, 2.0 * np.cos(kts) / (1j * kts) + 0j)
    rho = np.zeros((degree + 1, nk), dtype=complex)
    if degree >= 1:
        rho[1] = g[0]
    if degree >= 2:
        rho[2] = 2.0 * g[1] - (2.0 / (1j * kts)) * g[0]
    for m in range(2, degree):
        rho[m + 1] = rho[m - 1] + 2.0 * g[m] - (2.0 * m / (1j * kts)) * rho[m]
    w = g.copy()
    if degree >= 1:
        w[1:] -= (n[1:, None] / (1j * kts)) * rho[1:]
    return w


def weights_table(k_tildes, degree: int) -> np.ndarray:
    """Table of shape (degree + 1, len(k_tildes)) of w_n(k~) values.

    Handles mixed signs and regimes; negative k~ uses conjugate symmetry.
    Individual columns are served from / stored into the module cache.
    """
    kts = np.atleast_1d(np.asarray(k_tildes, dtype=float))
    out = np.empty((degree + 1, len(kts)), dtype=complex)
    todo: list[tuple[int, float]] = []
    for j, kt in enumerate(kts):
        cached = _cache.get((abs(kt), degree))
        if cached is not None:
            out[:, j] = np.conj(cached) if kt < 0 else cached
        else:
            todo.append((j, kt))
    if not todo:
        return out

    abs_kt = np.array([abs(kt) for _, kt in todo])
    small = abs_kt < SMALL_KT
    batch = ~small & (abs_kt >= degree)
    mixed = ~small & ~batch

    for mask, compute in (
        (small, _weights_small_kt),
        (batch, _weights_recurrence_batch),
        (mixed, _weights_oliver_batch),
    ):
        if not mask.any():
            continue
        cols = compute(abs_kt[mask], degree)
        for col, (j, kt) in zip(cols.T, [t for t, s in zip(todo, mask) if s]):
            _store(abs(kt), degree, col)
            out[:, j] = np.conj(col) if kt < 0 else col
    return out


def _store(kt_abs: float, degree: int, col: np.ndarray) -> None:
    col = np.asarray(col, dtype=complex)
    col.setflags(write=False)
    _cache[(kt_abs, degree)] = col
    while len(_cache) > _CACHE_MAX:
        _cache.popitem(last=False)


def clear_cache() -> None:
    _cache.clear()


def fcc_weights(k_tilde: float, degree: int) -> FCCWeights:
    """Weights w_0..w_degree for a single oscillation parameter k~."""
    if degree < 0:
        raise ValueError("degree must be >= 0")
    if not np.isfinite(k_tilde):
        raise ValueError("k_tilde must be finite")
    table = weights_table(np.array([float(k_tilde)]), degree)
    return FCCWeights(float(k_tilde), degree, table[:, 0])


def filon_cheb_integral(series: ChebSeries, k_tilde: float) -> complex:
    """int_{-1}^{1} (sum_n alpha_n T_n(s)) exp(i k~ s) ds = sum_n alpha_n w_n(k~)."""
    if not (series.a == -1.0 and series.b == 1.0):
        raise ValueError("filon_cheb_integral expects a series on [-1, 1]")
    w = fcc_weights(k_tilde, series.degree).w
    return complex(series.alpha @ w)


def scaled_filon(series: ChebSeries, interval: TruncationInterval, k) -> np.ndarray:
    """Oscillatory integral of a Chebyshev series over its subinterval [a, b].

    Returns int_a^b (sum_n alpha_n T_n(psi(y))) exp(-i 2 pi k y / (d - c)) dy
    for integer Fourier indices ``k``, via the substitution to [-1, 1]:
    prefactor ((b - a)/2) exp(-i pi k (a + b)/(d - c)) and oscillation
    parameter k~ = -pi k (b - a)/(d - c).
    """
    a, b = series.a, series.b
    if not (interval.c <= a < b <= interval.d):
        raise ValueError("series subinterval must lie inside the truncation interval")
    k_arr = np.atleast_1d(np.asarray(k))
    width = interval.width
    kts = -np.pi * k_arr * (b - a) / width
    table = weights_table(kts, series.degree)
    prefac = 0.5 * (b - a) * np.exp(-1j * np.pi * k_arr * (a + b) / width)
    vals = prefac * (series.alpha @ table)
    return vals if np.ndim(k) else complex(vals[0])
