"""Benchmark and reproduction harness over the four named test parameter sets.

Reference prices are internal self-converged runs (a higher-resolution run of
the same engine, or the independent quadrature oracle); error metrics are the
infinity norm R_inf = max |err| and the Euclidean norm R_2 over the stated
evaluation grid of each set.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, replace

import numpy as np

from .engine import OptionContract, american_price, barrier_price, bermudan_price
from .models import ModelSpec

PARAM_SETS: dict[str, dict] = {
    "VG1": {
        "model": ModelSpec.vg(sigma=0.12, theta=-0.14, nu=0.2, r=0.1, q=0.0),
        "contract": OptionContract("call", "bermudan", strike=90.0, maturity=0.1, dates=1000),
        "spots": np.linspace(80.0, 120.0, 401),
    },
    "CGMY1": {
        "model": ModelSpec.cgmy(c=1.0, g=5.0, m=5.0, y=0.5, r=0.1, q=0.0),
        "contract": OptionContract("put", "american", strike=1.0, maturity=1.0),
        "spots": np.linspace(0.5, 1.5, 14),
    },
    "CGMY2": {
        "model": ModelSpec.cgmy(c=4.0, g=50.0, m=60.0, y=0.7, r=0.05, q=0.02),
        "contract": OptionContract(
            "call", "barrier_UO", strike=100.0, maturity=1.0, dates=12, barrier=120.0
        ),
        "spots": np.linspace(80.0, 120.0, 41),
    },
    "NIG1": {
        "model": ModelSpec.nig(alpha=15.0, beta=-5.0, delta=0.5, r=0.05, q=0.02),
        "contract": OptionContract(
            "call", "barrier_DO", strike=100.0, maturity=1.0, dates=12, barrier=80.0
        ),
        "spot": 100.0,
        "strikes": np.linspace(80.0, 120.0, 80),
    },
}


@dataclass(frozen=True)
class BenchRow:
    param: str
    value: float
    ref: float
    abs_err: float
    r_inf: float
    r2: float
    seconds: float


@dataclass(frozen=True)
class BenchReport:
    method: str
    param_set: str
    style: str
    reference: str
    rows: tuple[BenchRow, ...]

    def __post_init__(self) -> None:
        for row in self.rows:
            if row.r2 < 0.0 or row.r_inf < 0.0:
                raise ValueError("error norms must be nonnegative")


def _norms(values: np.ndarray, ref: np.ndarray) -> tuple[float, float]:
    err = np.abs(np.asarray(values) - np.asarray(ref))
    return float(err.max()), float(np.linalg.norm(err))


def _row(param: str, values, ref, seconds: float) -> BenchRow:
    r_inf, r2 = _norms(values, ref)
    mid = len(values) // 2
    return BenchRow(
        param=param,
        value=float(values[mid]),
        ref=float(ref[mid]),
        abs_err=float(abs(values[mid] - ref[mid])),
        r_inf=r_inf,
        r2=r2,
        seconds=seconds,
    )


def _bench_vg1() -> BenchReport:
    cfg = PARAM_SETS["VG1"]
    model, contract, spots = cfg["model"], cfg["contract"], cfg["spots"]
    ref = bermudan_price(model, contract, max_index=64, cheb_degree=128).price_at_spot(spots)
    rows = []
    for u in (8, 16, 32):
        t0 = time.perf_counter()
        vals = bermudan_price(model, contract, max_index=u, cheb_degree=128).price_at_spot(spots)
        rows.append(_row(f"U={u}", vals, ref, time.perf_counter() - t0))
    return BenchReport("sfp-fcc", "VG1", "bermudan call", "self-converged U=64", tuple(rows))


def _bench_cgmy1() -> BenchReport:
    cfg = PARAM_SETS["CGMY1"]
    model, contract, spots = cfg["model"], cfg["contract"], cfg["spots"]
    berm = replace(contract, style="bermudan", dates=1024)
    ref = bermudan_price(model, berm, max_index=256, cheb_degree=128).price_at_spot(spots)
    rows = []
    for level in range(4):
        t0 = time.perf_counter()
        curve = american_price(model, contract, level=level, max_index=256, cheb_degree=128)
        vals = curve.price_at_spot(spots)
        rows.append(_row(f"L={level}", vals, ref, time.perf_counter() - t0))
    return BenchReport(
        "sfp-fcc", "CGMY1", "american put", "self-converged Bermudan L=2^10", tuple(rows)
    )


def _bench_cgmy2() -> BenchReport:
    cfg = PARAM_SETS["CGMY2"]
    model, contract, spots = cfg["model"], cfg["contract"], cfg["spots"]
    ref = barrier_price(model, contract, max_index=256, cheb_degree=128).price_at_spot(spots)
    rows = []
    for u in (8, 16, 32, 64, 128):
        t0 = time.perf_counter()
        vals = barrier_price(model, contract, max_index=u, cheb_degree=128).price_at_spot(spots)
        rows.append(_row(f"U={u}", vals, ref, time.perf_counter() - t0))
    return BenchReport("sfp-fcc", "CGMY2", "UO call", "self-converged U=256", tuple(rows))


def _nig1_strike_sweep(model, contract, strikes, spot, max_index: int) -> np.ndarray:
    """Barrier strike curve: the scaled barrier moves with K, so rerun per strike."""
    vals = np.empty(len(strikes))
    for i, k in enumerate(strikes):
        per_k = replace(contract, strike=float(k))
        curve = barrier_price(model, per_k, max_index=max_index, cheb_degree=256)
        vals[i] = curve.price_at_spot(spot)
    return vals


def _bench_nig1() -> BenchReport:
    cfg = PARAM_SETS["NIG1"]
    model, contract = cfg["model"], cfg["contract"]
    strikes, spot = cfg["strikes"], cfg["spot"]
    ref = _nig1_strike_sweep(model, contract, strikes, spot, 512)
    rows = []
    for u in (64, 128, 256):
        t0 = time.perf_counter()
        vals = _nig1_strike_sweep(model, contract, strikes, spot, u)
        rows.append(_row(f"U={u}", vals, ref, time.perf_counter() - t0))
    return BenchReport("sfp-fcc", "NIG1", "DO call", "self-converged U=512", tuple(rows))


_RUNNERS = {
    "VG1": _bench_vg1,
    "CGMY1": _bench_cgmy1,
    "CGMY2": _bench_cgmy2,
    "NIG1": _bench_nig1,
}


def run_benchmark(param_set: str, out_path: str | None = None) -> BenchReport:
    """Run the error-convergence sweep for one named parameter set."""
    if param_set not in _RUNNERS:
        raise ValueError(f"unknown parameter set {param_set!r}; choose from {sorted(_RUNNERS)}")
    report = _RUNNERS[param_set]()
    if out_path is not None:
        write_report_csv(report, out_path)
    return report


def format_value(x) -> str:
    """Fixed 15-significant-digit formatting shared by all CSV emitters."""
    return f"{float(x):.15g}"


def write_report_csv(report: BenchReport, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["set", "style", "param", "value", "ref", "abs_err", "Rinf", "R2", "seconds"])
        for row in report.rows:
            writer.writerow(
                [
                    report.param_set,
                    report.style,
                    row.param,
                    format_value(row.value),
                    format_value(row.ref),
                    format_value(row.abs_err),
                    format_value(row.r_inf),
                    format_value(row.r2),
                    format_value(row.seconds),
                ]
            )
