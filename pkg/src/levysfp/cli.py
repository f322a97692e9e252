"""Command-line front end: JSON config in, deterministic CSV out.

Exit codes: 0 on success, 1 on configuration errors (the message names the
offending key), 2 when a numerical procedure fails.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from typing import Any, Sequence

import numpy as np

from .bench import format_value, run_benchmark
from .engine import (
    OptionContract,
    american_price,
    barrier_price,
    bermudan_price,
    greeks_curve,
)
from .errors import NumericalError
from .fcc import fcc_weights
from .models import ModelKind, ModelSpec, truncation_interval
from .payoff import density_coeffs, european_price_curve
from .sfp import locate_jumps

DEFAULT_GRID = 401
DEFAULTS = {"U": 128, "Ntilde": 128, "Ltilde": 8.0}


class ConfigError(ValueError):
    """Configuration problem; the message names the offending key."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 by default, which this tool reserves for
    # numerical failures; usage problems are configuration errors.
    def error(self, message: str):
        self.exit(1, f"{self.prog}: config error: {message}\n")


def _require(block: dict, key: str, context: str) -> Any:
    if key not in block:
        raise ConfigError(f"missing key '{context}.{key}'")
    return block[key]


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}")


def _build_model(config: dict) -> ModelSpec:
    block = _require(config, "model", "config")
    kind = str(_require(block, "kind", "model")).upper()
    try:
        model_kind = ModelKind(kind)
    except ValueError:
        raise ConfigError(f"unknown 'model.kind' {kind!r}")
    params = _require(block, "params", "model")
    r = float(_require(block, "r", "model"))
    q = float(block.get("q", 0.0))
    try:
        return ModelSpec(model_kind, params, r, q)
    except ValueError as exc:
        raise ConfigError(f"invalid 'model.params': {exc}")


def _build_contract(config: dict) -> tuple[OptionContract, dict]:
    block = _require(config, "contract", "config")
    style = str(_require(block, "style", "contract"))
    kind = str(_require(block, "kind", "contract"))
    maturity = float(_require(block, "T", "contract"))
    dates = int(block.get("L", 1))
    barrier = block.get("B")

    has_s_range = "S_range" in block
    has_k_range = "K_range" in block
    if has_s_range == has_k_range:
        raise ConfigError("contract must set exactly one of 'contract.S_range' or 'contract.K_range'")
    rng = block["S_range"] if has_s_range else block["K_range"]
    if not (isinstance(rng, (list, tuple)) and len(rng) == 2 and rng[0] < rng[1]):
        key = "S_range" if has_s_range else "K_range"
        raise ConfigError(f"'contract.{key}' must be an increasing [low, high] pair")
    if has_s_range:
        strike = float(_require(block, "K", "contract"))
        spot = None
    else:
        spot = float(_require(block, "S", "contract"))
        # nominal strike for the run; strike-curve evaluation passes each K explicitly
        strike = float(block.get("K", 0.5 * (rng[0] + rng[1])))

    try:
        contract = OptionContract(
            kind=kind,
            style=style,
            strike=strike,
            maturity=maturity,
            dates=dates,
            barrier=float(barrier) if barrier is not None else None,
        )
    except ValueError as exc:
        raise ConfigError(f"invalid 'contract': {exc}")
    axis = {
        "mode": "spot" if has_s_range else "strike",
        "range": (float(rng[0]), float(rng[1])),
        "spot": spot,
    }
    return contract, axis


def _numerics(config: dict, args: argparse.Namespace) -> dict:
    block = dict(DEFAULTS)
    block.update(config.get("numerics", {}))
    # flags win over the config file
    if getattr(args, "max_index", None) is not None:
        block["U"] = args.max_index
    if getattr(args, "cheb_degree", None) is not None:
        block["Ntilde"] = args.cheb_degree
    if getattr(args, "l_tilde", None) is not None:
        block["Ltilde"] = args.l_tilde
    return {"U": int(block["U"]), "Ntilde": int(block["Ntilde"]), "Ltilde": float(block["Ltilde"])}


def _output_options(config: dict, args: argparse.Namespace, default_name: str) -> tuple[str, int]:
    block = config.get("output", {})
    out = args.out or block.get("csv") or default_name
    grid = int(args.grid or block.get("grid", DEFAULT_GRID))
    if grid < 2:
        raise ConfigError("'output.grid' must be at least 2")
    return out, grid


def _write_csv(path: str, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])


def _price_curve(model, contract, axis, num):
    if contract.style == "european":
        _, curve = european_price_curve(
            model,
            contract.kind,
            strike=contract.strike if axis["mode"] == "spot" else None,
            spot=axis["spot"] if axis["mode"] == "strike" else None,
            delta_t=contract.maturity,
            max_index=num["U"],
            l_tilde=num["Ltilde"],
        )
        if axis["mode"] == "strike":
            curve = replace(curve, strike=1.0)
        return curve
    if contract.style == "bermudan":
        return bermudan_price(model, contract, num["U"], num["Ntilde"], num["Ltilde"])
    if contract.style == "american":
        return american_price(
            model, contract, level=0, max_index=num["U"],
            cheb_degree=num["Ntilde"], l_tilde=num["Ltilde"],
        )
    return barrier_price(model, contract, num["U"], num["Ntilde"], num["Ltilde"])


def _apply_dates_flag(contract: OptionContract, args: argparse.Namespace) -> OptionContract:
    dates = getattr(args, "dates", None)
    if dates is None:
        return contract
    try:
        return replace(contract, dates=int(dates))
    except ValueError as exc:
        raise ConfigError(f"invalid '--L': {exc}")


def _cmd_price(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    model = _build_model(config)
    contract, axis = _build_contract(config)
    contract = _apply_dates_flag(contract, args)
    out, grid = _output_options(config, args, "prices.csv")
    num = _numerics(config, args)
    lo, hi = axis["range"]
    levels = np.linspace(lo, hi, grid)
    if axis["mode"] == "spot":
        curve = _price_curve(model, contract, axis, num)
        prices = curve.price_at_spot(levels)
        _write_csv(out, ["S", "price"], zip(levels, prices))
    elif contract.style.startswith("barrier"):
        # the scaled barrier log(B/K) moves with the strike: rerun per strike
        prices = []
        for k in levels:
            per_k = replace(contract, strike=float(k))
            curve = barrier_price(model, per_k, num["U"], num["Ntilde"], num["Ltilde"])
            prices.append(float(curve.price_at_spot(axis["spot"])))
        _write_csv(out, ["K", "price"], zip(levels, prices))
    else:
        curve = _price_curve(model, contract, axis, num)
        prices = curve.price_at_strike(levels, spot=axis["spot"])
        _write_csv(out, ["K", "price"], zip(levels, prices))
    return 0


def _cmd_greeks(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    model = _build_model(config)
    contract, axis = _build_contract(config)
    contract = _apply_dates_flag(contract, args)
    out, grid = _output_options(config, args, "greeks.csv")
    num = _numerics(config, args)
    if contract.style == "american":
        raise ConfigError("'contract.style' american is not supported by greeks")
    lo, hi = axis["range"]
    levels = np.linspace(lo, hi, grid)
    style_contract = contract if contract.style != "european" else replace(
        contract, style="bermudan", dates=1
    )
    if axis["mode"] == "spot":
        delta, gamma = greeks_curve(model, style_contract, num["U"], num["Ntilde"], num["Ltilde"])
        _write_csv(
            out,
            ["S", "delta", "gamma"],
            zip(levels, delta.price_at_spot(levels), gamma.price_at_spot(levels)),
        )
    elif contract.style.startswith("barrier"):
        rows = []
        for k in levels:
            per_k = replace(style_contract, strike=float(k))
            delta, gamma = greeks_curve(model, per_k, num["U"], num["Ntilde"], num["Ltilde"])
            rows.append(
                (k, float(delta.price_at_spot(axis["spot"])), float(gamma.price_at_spot(axis["spot"])))
            )
        _write_csv(out, ["K", "delta", "gamma"], rows)
    else:
        delta, gamma = greeks_curve(model, style_contract, num["U"], num["Ntilde"], num["Ltilde"])
        _write_csv(
            out,
            ["K", "delta", "gamma"],
            zip(
                levels,
                delta.price_at_strike(levels, spot=axis["spot"]),
                gamma.price_at_strike(levels, spot=axis["spot"]),
            ),
        )
    return 0


def _cmd_fcc_weights(args: argparse.Namespace) -> int:
    if args.n < 0:
        raise ConfigError("'--n' must be >= 0")
    weights = fcc_weights(args.k, args.n)
    out = args.out or "fcc_weights.csv"
    rows = [(n, w.real, w.imag) for n, w in enumerate(weights.w)]
    _write_csv(out, ["n", "re_w", "im_w"], rows)
    return 0


def _cmd_locate_jumps(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    model = _build_model(config)
    contract_block = config.get("contract", {})
    maturity = float(contract_block.get("T", config.get("t", 1.0)))
    dates = int(contract_block.get("L", 1))
    num = _numerics(config, args)
    interval = truncation_interval(model, maturity, num["Ltilde"])
    coeffs = density_coeffs(model, maturity / dates, interval, num["U"])
    xs = locate_jumps(coeffs, tol=args.tol)
    out = args.out or "jumps.csv"
    _write_csv(out, ["jump_x"], [(x,) for x in xs])
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    out = args.out or f"bench_{args.set.lower()}.csv"
    try:
        run_benchmark(args.set, out)
    except ValueError as exc:
        raise ConfigError(str(exc))
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="levysfp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: _Parser) -> None:
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--U", dest="max_index", type=int, help="Fourier series terms")
        p.add_argument("--Ntilde", dest="cheb_degree", type=int, help="Chebyshev degree")
        p.add_argument("--L", dest="dates", type=int, help="exercise/monitoring dates override")
        p.add_argument("--Ltilde", dest="l_tilde", type=float, help="interval width multiplier")
        p.add_argument("--out", help="output CSV path")
        p.add_argument("--grid", type=int, help="evaluation grid size")

    p_price = sub.add_parser("price", help="price curve to CSV")
    add_common(p_price)
    p_price.set_defaults(func=_cmd_price)

    p_greeks = sub.add_parser("greeks", help="Delta/Gamma curves to CSV")
    add_common(p_greeks)
    p_greeks.set_defaults(func=_cmd_greeks)

    p_w = sub.add_parser("fcc-weights", help="dump FCC weights w_n(k~) to CSV")
    p_w.add_argument("--k", type=float, required=True, help="oscillation parameter k~")
    p_w.add_argument("--n", type=int, required=True, help="maximum Chebyshev degree")
    p_w.add_argument("--out", help="output CSV path")
    p_w.set_defaults(func=_cmd_fcc_weights)

    p_j = sub.add_parser("locate-jumps", help="estimate density jump locations")
    p_j.add_argument("--config", required=True)
    p_j.add_argument("--U", dest="max_index", type=int)
    p_j.add_argument("--Ltilde", dest="l_tilde", type=float)
    p_j.add_argument("--Ntilde", dest="cheb_degree", type=int, help=argparse.SUPPRESS)
    p_j.add_argument("--tol", type=float, default=1e-3, help="unit-circle distance tolerance")
    p_j.add_argument("--out", help="output CSV path")
    p_j.set_defaults(func=_cmd_locate_jumps)

    p_b = sub.add_parser("bench", help="run a named benchmark sweep")
    p_b.add_argument("--set", required=True, help="VG1, CGMY1, CGMY2 or NIG1")
    p_b.add_argument("--out", help="output CSV path")
    p_b.set_defaults(func=_cmd_bench)
    return parser


def run_cli(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))
