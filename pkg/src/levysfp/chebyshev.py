"""Fixed-degree Chebyshev fitting and Clenshaw evaluation on subintervals."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.fft import dct

from .errors import ExtrapolationWarning


@dataclass(frozen=True)
class ChebSeries:
    """Chebyshev series sum_n alpha_n T_n(psi(y)) on [a, b].

    ``psi`` is the linear map from [a, b] to [-1, 1].  Coefficients are stored
    in increasing degree order; ``alpha`` has length degree + 1.
    """

    a: float
    b: float
    alpha: np.ndarray

    def __post_init__(self) -> None:
        if not self.b > self.a:
            raise ValueError("ChebSeries requires b > a")
        alpha = np.asarray(self.alpha, dtype=float)
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)

    @property
    def degree(self) -> int:
        return len(self.alpha) - 1

    def map_to_unit(self, y):
        """psi(y): [a, b] -> [-1, 1]."""
        return (2.0 * np.asarray(y, dtype=float) - (self.b + self.a)) / (self.b - self.a)


def lobatto_nodes(a: float, b: float, degree: int) -> np.ndarray:
    """Chebyshev-Lobatto points on [a, b], ordered from b down to a."""
    j = np.arange(degree + 1)
    return 0.5 * (a + b) + 0.5 * (b - a) * np.cos(np.pi * j / degree)


def cheb_fit(f: Callable[[np.ndarray], np.ndarray], a: float, b: float, degree: int) -> ChebSeries:
    """Fit a degree-``degree`` Chebyshev series to ``f`` on [a, b].

    Samples at the Lobatto (endpoint-including) grid and recovers coefficients
    with a type-I DCT, so the cost is O(degree log degree).  The fit is
    non-adaptive: the degree is used as given.
    """
    if degree < 2:
        raise ValueError("cheb_fit requires degree >= 2")
    nodes = lobatto_nodes(a, b, degree)
    samples = np.asarray(f(nodes), dtype=float)
    if samples.shape != nodes.shape:
        raise ValueError("f must return one value per node")
    bad = ~np.isfinite(samples)
    if bad.any():
        j = int(np.argmax(bad))
        raise ValueError(f"non-finite sample {samples[j]!r} at node y={nodes[j]!r}")
    alpha = dct(samples, type=1) / degree
    alpha[0] *= 0.5
    alpha[-1] *= 0.5
    return ChebSeries(a, b, alpha)


def cheb_fit_values(samples: np.ndarray, a: float, b: float) -> ChebSeries:
    """Build a ChebSeries from samples already taken at ``lobatto_nodes(a, b, n)``."""
    samples = np.asarray(samples, dtype=float)
    degree = len(samples) - 1
    if degree < 2:
        raise ValueError("need at least 3 samples")
    alpha = dct(samples, type=1) / degree
    alpha[0] *= 0.5
    alpha[-1] *= 0.5
    return ChebSeries(a, b, alpha)


def cheb_eval(series: ChebSeries, y):
    """Evaluate the series by the Clenshaw recurrence.

    Points outside [a, b] are evaluated as polynomial extrapolation and
    reported through an ``ExtrapolationWarning``.
    """
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr < series.a) or np.any(y_arr > series.b):
        warnings.warn(
            f"evaluating ChebSeries outside [{series.a}, {series.b}]",
            ExtrapolationWarning,
            stacklevel=2,
        )
    s = series.map_to_unit(y_arr)
    alpha = series.alpha
    b1 = np.zeros_like(s)
    b2 = np.zeros_like(s)
    for c in alpha[:0:-1]:
        b1, b2 = 2.0 * s * b1 - b2 + c, b1
    out = s * b1 - b2 + alpha[0]
    return out if out.ndim else float(out)
