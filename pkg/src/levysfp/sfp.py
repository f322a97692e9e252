"""Linear Pade and singular Fourier-Pade fitting, evaluation, and jump location.

A truncated series f1(z) = sum_{k=0}^{U} a_k z^k (z on the unit circle) is
approximated by

    (P_N(z) + sum_s L_{N_s}(z) log(1 - z / eps_s)) / Q_M(z),

where each |eps_s| = 1 marks a jump of the underlying periodic function.  The
degrees satisfy N + M + sum_s N_s + S = U, so all available series
coefficients are consumed by order conditions through z^U.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.linalg import toeplitz

from .errors import ExtrapolationWarning, FitQualityError, PoleProximityError
from .models import TruncationInterval

_JUMP_NUDGE = 1e-12  # radians; evaluation points landing on a jump are rotated by this
_POLE_TOL = 1e-13
_RESIDUAL_TOL = 1e-8


class DegreeSplit(NamedTuple):
    n: int
    m: int
    log_degrees: tuple[int, ...]

    @property
    def total(self) -> int:
        return self.n + self.m + sum(self.log_degrees) + len(self.log_degrees)


def allocate_degrees(u: int, s: int) -> DegreeSplit:
    """Split a coefficient budget U among numerator, denominator and log terms.

    N takes roughly 40% of the budget; the remainder goes to M and the log
    polynomial degrees, equal as far as possible with ties favouring M, so
    that N + M + sum N_s + S = U exactly.
    """
    if u < s + 3:
        raise ValueError(f"budget U={u} too small for S={s} jumps (need U >= S + 3)")
    n = round(0.4 * u)
    rem = u - n - s
    base = rem // (s + 1)
    log_degrees = tuple(base for _ in range(s))
    m = rem - s * base
    return DegreeSplit(n, m, log_degrees)


def _log_taylor(eps: complex, k_max: int) -> np.ndarray:
    """Taylor coefficients of log(1 - z/eps): lam_k = -eps^{-k}/k, lam_0 = 0."""
    lam = np.zeros(k_max + 1, dtype=complex)
    k = np.arange(1, k_max + 1)
    lam[1:] = -(eps ** (-k.astype(float))) / k
    return lam


@dataclass(frozen=True)
class SFPApproximant:
    """Rational-plus-logarithmic surrogate for a truncated unit-circle series."""

    p: np.ndarray
    q: np.ndarray
    logs: tuple[tuple[complex, np.ndarray], ...]
    interval: TruncationInterval | None = None

    def __post_init__(self) -> None:
        p = np.asarray(self.p, dtype=complex)
        q = np.asarray(self.q, dtype=complex)
        if not np.any(q):
            raise ValueError("denominator Q must not be identically zero")
        logs = []
        for eps, coeffs in self.logs:
            eps = complex(eps)
            if abs(abs(eps) - 1.0) > 1e-9:
                raise ValueError("jump points must lie on the unit circle")
            c = np.asarray(coeffs, dtype=complex)
            c.setflags(write=False)
            logs.append((eps, c))
        p.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "logs", tuple(logs))

    @property
    def degrees(self) -> DegreeSplit:
        return DegreeSplit(
            len(self.p) - 1, len(self.q) - 1, tuple(len(c) - 1 for _, c in self.logs)
        )

    def eval_z(self, z) -> np.ndarray:
        """Re[(P(z) + sum L_s(z) log(1 - z/eps_s)) / Q(z)] for z on the unit circle.

        Points coinciding with a jump are rotated by 1e-12 radians so the
        principal log branch stays finite; the surrogate has a genuine
        logarithmic singularity there.
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        for eps, _ in self.logs:
            hit = np.abs(z - eps) < _JUMP_NUDGE
            if hit.any():
                z = np.where(hit, z * np.exp(1j * _JUMP_NUDGE), z)
        qv = npoly.polyval(z, self.q)
        qmax = np.abs(self.q).max()
        bad = np.abs(qv) < _POLE_TOL * qmax
        if bad.any():
            zb = z[np.argmax(bad)]
            raise PoleProximityError(f"|Q(z)| below {_POLE_TOL:g}*max|q| at z={zb}")
        num = npoly.polyval(z, self.p)
        for eps, coeffs in self.logs:
            num = num + npoly.polyval(z, coeffs) * np.log(1.0 - z / eps)
        return (num / qv).real

    def __call__(self, x_tilde):
        return sfp_eval(self, x_tilde)


def sfp_eval(approx: SFPApproximant, x_tilde):
    """Evaluate at log-moneyness x~ through z = exp(i 2 pi x~ / (d - c))."""
    if approx.interval is None:
        raise ValueError("approximant has no interval; use eval_z directly")
    x_arr = np.atleast_1d(np.asarray(x_tilde, dtype=float))
    c, d = approx.interval.c, approx.interval.d
    if np.any(x_arr < c) or np.any(x_arr > d):
        warnings.warn(
            f"evaluating outside truncation interval [{c}, {d}]",
            ExtrapolationWarning,
            stacklevel=2,
        )
    z = np.exp(1j * 2.0 * np.pi * x_arr / approx.interval.width)
    out = approx.eval_z(z)
    return out if np.ndim(x_tilde) else float(out[0])


def pade_fit(series: Sequence[complex], n: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Linear Pade approximant of order (N, M): returns (P, Q) with q_0 = 1.

    Q solves the Toeplitz homogeneous block built from coefficients
    N+1 .. N+M; P is the lower-triangular convolution of the series with Q.
    """
    series = np.asarray(series, dtype=complex)
    if len(series) < n + m + 1:
        raise ValueError("series must provide at least N + M + 1 coefficients")
    approx = sfp_fit(series[: n + m + 1], (), DegreeSplit(n, m, ()))
    return np.asarray(approx.p), np.asarray(approx.q)


def _order_condition_matrix(
    c: np.ndarray, split: DegreeSplit, jumps: Sequence[complex], u: int
) -> np.ndarray:
    """Rows j = N+1..U of [C | -Lambda_1 | ... | -Lambda_S] acting on (q, l_1..l_S)."""
    n, m, log_degrees = split
    rows = np.arange(n + 1, u + 1)
    cpad = np.concatenate([np.zeros(max(0, m - n), dtype=complex), c])
    off = len(cpad) - len(c)
    first_col = cpad[rows[0] + off : rows[-1] + off + 1]
    first_row = cpad[rows[0] + off : rows[0] + off - m - 1 : -1] if m else cpad[[rows[0] + off]]
    blocks = [toeplitz(first_col, first_row)]
    for eps, nd in zip(jumps, log_degrees):
        lam = _log_taylor(eps, u)
        lpad = np.concatenate([np.zeros(max(0, nd - n), dtype=complex), lam])
        loff = len(lpad) - len(lam)
        col = lpad[rows[0] + loff : rows[-1] + loff + 1]
        row = lpad[rows[0] + loff : rows[0] + loff - nd - 1 : -1] if nd else lpad[[rows[0] + loff]]
        blocks.append(-toeplitz(col, row))
    return np.hstack(blocks)


def sfp_fit(
    series: Sequence[complex],
    jumps: Sequence[complex] = (),
    degrees: DegreeSplit | None = None,
    interval: TruncationInterval | None = None,
) -> SFPApproximant:
    """Fit a singular Fourier-Pade approximant to a truncated series.

    The high-order block (coefficients N+1..U of ``f1 Q - P - sum L_s log``)
    is solved first for (q, l): the normalisation q_0 = 1 gives a square
    system; if that is singular or leaves a large residual the homogeneous
    block is solved by the smallest singular vector instead.  P then follows
    by triangular multiplication.  With no jumps this reduces to ``pade_fit``.
    """
    c = np.asarray(series, dtype=complex)
    u = len(c) - 1
    jumps = tuple(complex(e) for e in jumps)
    for eps in jumps:
        if abs(abs(eps) - 1.0) > 1e-9:
            raise ValueError("jump points must have unit modulus")
    if degrees is None:
        degrees = allocate_degrees(u, len(jumps))
    n, m, log_degrees = degrees
    if len(log_degrees) != len(jumps):
        raise ValueError("one log degree required per jump")
    if n + m + sum(log_degrees) + len(jumps) != u:
        raise ValueError(
            f"degrees {degrees} do not consume the series budget U={u}"
        )

    a = _order_condition_matrix(c, degrees, jumps, u)
    nrows, ncols = a.shape  # ncols = nrows + 1 by construction
    vec = None
    if nrows:
        try:
            sol = np.linalg.solve(a[:, 1:], -a[:, 0])
            cand = np.concatenate([[1.0 + 0j], sol])
            resid = np.linalg.norm(a @ cand)
            scale = np.linalg.norm(a, ord="fro") * np.linalg.norm(cand)
            if np.isfinite(resid) and resid <= 1e-10 * max(scale, 1e-300):
                vec = cand
        except np.linalg.LinAlgError:
            vec = None
        if vec is None:
            _, _, vh = np.linalg.svd(a, full_matrices=True)
            vec = vh[-1].conj()
            # renormalising to q_0 = 1 would amplify the whole vector when the
            # q_0 component is small; evaluation is scale invariant, so only
            # rescale when it is safe
            if abs(vec[0]) > 1e-3:
                vec = vec / vec[0]
    else:
        vec = np.array([1.0 + 0j])

    q = vec[: m + 1]
    ls: list[np.ndarray] = []
    col = m + 1
    for nd in log_degrees:
        ls.append(vec[col : col + nd + 1])
        col += nd + 1

    p = np.convolve(c, q)[: n + 1]
    for eps, lvec in zip(jumps, ls):
        lam = _log_taylor(eps, u)
        p = p - np.convolve(lam, lvec)[: n + 1]

    approx = SFPApproximant(p, q, tuple(zip(jumps, ls)), interval)
    _check_order_conditions(c, approx, u)
    return approx


def _check_order_conditions(c: np.ndarray, approx: SFPApproximant, u: int) -> None:
    """Residual of coefficients 0..U of [f1 Q - P - sum L log]; error if large."""
    conv = np.convolve(c, approx.q)[: u + 1]
    conv[: len(approx.p)] -= approx.p
    scale = np.linalg.norm(c) * np.linalg.norm(approx.q) + np.linalg.norm(approx.p)
    for eps, lvec in approx.logs:
        lam = _log_taylor(eps, u)
        conv -= np.convolve(lam, lvec)[: u + 1]
        scale += np.linalg.norm(lam) * np.linalg.norm(lvec)
    resid = np.linalg.norm(conv)
    if not np.isfinite(resid) or resid > _RESIDUAL_TOL * max(scale, 1e-300):
        raise FitQualityError(
            f"order-condition residual {resid:.3e} exceeds {_RESIDUAL_TOL:g} * {scale:.3e}"
        )


def order_condition_residual(series: Sequence[complex], approx: SFPApproximant) -> float:
    """Norm of coefficients 0..U of [f1 Q - P - sum L_s log] (diagnostic)."""
    c = np.asarray(series, dtype=complex)
    u = len(c) - 1
    conv = np.convolve(c, approx.q)[: u + 1]
    conv[: len(approx.p)] -= approx.p
    for eps, lvec in approx.logs:
        lam = _log_taylor(eps, u)
        conv -= np.convolve(lam, lvec)[: u + 1]
    return float(np.linalg.norm(conv))


def locate_jumps(coeffs, tol: float = 1e-3) -> np.ndarray:
    """Estimate jump locations of a density from its CFS coefficients.

    Differentiates the series (which turns kinks into jumps and jumps into
    near-poles), fits a plain Pade approximant, and maps denominator roots
    close to the unit circle back to x = arg(z) (d - c) / (2 pi).
    """
    interval = coeffs.interval
    u = coeffs.max_index
    omega = interval.angular_freq(np.arange(u + 1))
    # conj(bhat_k) are the e^{+i omega_k x} coefficients of the density itself
    series = 1j * omega * np.conj(coeffs.bhat) * 2.0
    series[0] = 0.0
    split = allocate_degrees(u, 0)
    _, q = pade_fit(series, split.n, split.m)
    roots = npoly.polyroots(q)
    near = np.abs(1.0 - np.abs(roots)) <= tol
    xs = np.angle(roots[near]) * interval.width / (2.0 * np.pi)
    return np.sort(xs.real)
