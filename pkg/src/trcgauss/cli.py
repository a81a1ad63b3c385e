"""Command-line front end.

Every subcommand reads one JSON configuration, writes its results into an
output directory and exits nonzero on invalid input (2) or on a flagged
numerical failure (3, unless ``--allow-flags``).

Configuration::

    {
      "channel": {"power": 2.0,
                  "noise": {"type": "white", "level": 1.0},
                  "mismatch": "matched" | <spectrum>,
                  "input": "flat" | <spectrum>},
      "beta": 1.0 | "inf",
      "rates": {"min": 0.0, "max": 0.3, "step": 0.01} | {"values": [...]},
      "sim": {"n": 2, "ell": 8, "rate": 0.1, "trials_codes": 20,
              "trials_noise": 200, "seed": 1},
      "evd": {"n": [32, 64, 128, 256], "functions": ["x", "x2", "log"]}
    }
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from . import __version__
from ._optimize import ConvergenceError
from .awgn import AwgnSpec, r0_awgn, r_star_awgn, trc_exact_awgn, trc_lower_awgn
from .colored import (ChannelSpec, flat_channel, r0_random_coding, r_star_colored,
                      trc_lower_colored, zero_rate_exponent)
from .core import GldParams
from .simulation import SimConfig, estimate_exponents
from .spectral import (DEFAULT_GRID, EigenConvergenceError, Spectrum, autocorr_from_spectrum,
                       evd_check, spectrum_from_config, white_spectrum)
from .tightness import r_tightness, tightness_report
from .waterpour import InfeasibleAllocationError, optimize_input_spectrum

EXIT_INVALID = 2
EXIT_FLAGGED = 3

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_SPECTRUM = {
    "oneOf": [
        {"type": "object", "additionalProperties": False, "required": ["type"],
         "properties": {"type": {"const": "white"}, "level": _POS}},
        {"type": "object", "additionalProperties": False, "required": ["type", "a"],
         "properties": {"type": {"const": "ar1"}, "a": {"type": "number", "exclusiveMinimum": -1,
                                                        "exclusiveMaximum": 1},
                        "sw2": _POS}},
        {"type": "object", "additionalProperties": False, "required": ["type", "low", "high"],
         "properties": {"type": {"const": "two_level"}, "low": {"type": "number", "minimum": 0},
                        "high": {"type": "number", "minimum": 0},
                        "fraction": {"type": "number", "exclusiveMinimum": 0,
                                     "exclusiveMaximum": 1}}},
        {"type": "object", "additionalProperties": False, "required": ["type", "values"],
         "properties": {"type": {"const": "tabulated"},
                        "values": {"type": "array", "items": {"type": "number", "minimum": 0},
                                   "minItems": 8}}},
    ]
}
_FUNCTIONS = {"x": lambda v: v, "x2": np.square, "log": np.log}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["channel"],
    "properties": {
        "channel": {
            "type": "object", "additionalProperties": False, "required": ["power", "noise"],
            "properties": {
                "power": _POS,
                "noise": _SPECTRUM,
                "mismatch": {"oneOf": [{"const": "matched"}, _SPECTRUM]},
                "input": {"oneOf": [{"const": "flat"}, _SPECTRUM]},
            },
        },
        "beta": {"oneOf": [{"type": "number", "minimum": 0}, {"const": "inf"}]},
        "rates": {
            "oneOf": [
                {"type": "object", "additionalProperties": False, "required": ["max", "step"],
                 "properties": {"min": {"type": "number", "minimum": 0},
                                "max": {"type": "number", "minimum": 0}, "step": _POS}},
                {"type": "object", "additionalProperties": False, "required": ["values"],
                 "properties": {"values": {"type": "array", "minItems": 1,
                                           "items": {"type": "number", "minimum": 0}}}},
            ]
        },
        "sim": {
            "type": "object", "additionalProperties": False,
            "required": ["n", "ell", "rate", "trials_codes", "trials_noise", "seed"],
            "properties": {
                "n": {"type": "integer", "minimum": 1},
                "ell": {"type": "integer", "minimum": 2},
                "rate": {"type": "number", "minimum": 0},
                "trials_codes": {"type": "integer", "minimum": 2},
                "trials_noise": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
            },
        },
        "evd": {
            "type": "object", "additionalProperties": False, "required": ["n"],
            "properties": {
                "n": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1}},
                "functions": {"type": "array", "minItems": 1,
                              "items": {"enum": sorted(_FUNCTIONS)}},
            },
        },
    },
}

_FLOAT_OR_INF = {"oneOf": [_NUM, {"enum": ["inf", "nan"]}]}
OUTPUT_SCHEMAS = {
    "rates": {
        "type": "object", "additionalProperties": False,
        "required": ["r_star", "r0", "r_t", "zero_rate_exponent", "lambda_star"],
        "properties": {k: _NUM for k in ("r_star", "r0", "r_t", "zero_rate_exponent",
                                         "lambda_star")},
    },
    "awgn_summary": {
        "type": "object", "additionalProperties": False,
        "required": ["snr", "r_star", "r0", "r_t"],
        "properties": {"snr": _NUM, "r_star": _NUM, "r0": _NUM, "r_t": _NUM},
    },
    "tightness": {
        "type": "object", "additionalProperties": False,
        "required": ["r_t", "epsilon_at_zero", "trc_at_zero", "theta_opt", "flags"],
        "properties": {"r_t": _NUM, "epsilon_at_zero": _NUM, "trc_at_zero": _NUM,
                       "theta_opt": _FLOAT_OR_INF,
                       "flags": {"type": "array", "items": {"type": "string"}}},
    },
    "waterpour": {
        "type": "object", "additionalProperties": False, "required": ["solutions"],
        "properties": {"solutions": {"type": "array", "items": {
            "type": "object", "additionalProperties": False,
            "required": ["water_level", "lambda", "theta", "exponent", "achieved_power", "rate"],
            "properties": {k: _NUM for k in ("water_level", "lambda", "theta", "exponent",
                                             "achieved_power", "rate")}}}},
    },
    "simulate": {
        "type": "object", "additionalProperties": False,
        "required": ["trc_estimate", "rc_estimate", "ci_radius", "trc_ci", "rc_ci",
                     "error_rate", "error_rate_ci", "censored_codes", "num_messages",
                     "block_length"],
        "properties": {
            **{k: _NUM for k in ("trc_estimate", "rc_estimate", "ci_radius", "trc_ci", "rc_ci",
                                 "error_rate", "error_rate_ci")},
            **{k: {"type": "integer", "minimum": 0}
               for k in ("censored_codes", "num_messages", "block_length")},
        },
    },
}


class ConfigError(ValueError):
    """The configuration is malformed or inconsistent."""


@dataclass(frozen=True)
class RunConfig:
    """Parsed configuration with defaults filled in."""

    channel: dict
    beta: float
    rates: dict = field(default_factory=lambda: {"min": 0.0, "max": 0.3, "step": 0.01})
    sim: dict | None = None
    evd: dict | None = None

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        try:
            jsonschema.validate(raw, CONFIG_SCHEMA)
        except jsonschema.ValidationError as exc:
            path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"invalid config at {path}: {exc.message}") from None
        ch = dict(raw["channel"])
        ch.setdefault("mismatch", "matched")
        ch.setdefault("input", "flat")
        beta = raw.get("beta", 1.0)
        beta = math.inf if beta == "inf" else float(beta)
        rates = dict(raw.get("rates", {"min": 0.0, "max": 0.3, "step": 0.01}))
        if "values" not in rates:
            rates.setdefault("min", 0.0)
            if rates["max"] < rates["min"]:
                raise ConfigError("rates: max must not be below min")
        evd = raw.get("evd")
        if evd is not None:
            evd = {"n": list(evd["n"]), "functions": list(evd.get("functions", sorted(_FUNCTIONS)))}
        return cls(ch, beta, rates, raw.get("sim"), evd)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "channel": self.channel,
            "beta": "inf" if math.isinf(self.beta) else self.beta,
            "rates": self.rates,
        }
        if self.sim is not None:
            out["sim"] = self.sim
        if self.evd is not None:
            out["evd"] = self.evd
        return out

    @property
    def gld(self) -> GldParams:
        return GldParams(self.beta)

    def rate_grid(self) -> np.ndarray:
        if "values" in self.rates:
            return np.array(sorted(self.rates["values"]), dtype=float)
        lo, hi, step = self.rates["min"], self.rates["max"], self.rates["step"]
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return np.round(lo + step * np.arange(count), 12)

    def spectra(self, grid_size: int) -> tuple[Spectrum, Spectrum, Spectrum | None]:
        ch = self.channel
        try:
            sz = spectrum_from_config(ch["noise"], grid_size)
            szt = None if ch["mismatch"] == "matched" else spectrum_from_config(ch["mismatch"], grid_size)
            sx = (white_spectrum(ch["power"], grid_size) if ch["input"] == "flat"
                  else spectrum_from_config(ch["input"], grid_size))
        except (ValueError, KeyError) as exc:
            raise ConfigError(str(exc)) from None
        return sx, sz, szt

    def channel_spec(self, grid_size: int) -> ChannelSpec:
        sx, sz, szt = self.spectra(grid_size)
        try:
            return ChannelSpec(sx, sz, szt, float(self.channel["power"]), self.gld)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


def load_config(path: str | Path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return RunConfig.from_dict(raw)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else "inf"
    return obj


def write_json(path: Path, obj: dict, schema_name: str) -> None:
    obj = _json_safe(obj)
    jsonschema.validate(obj, OUTPUT_SCHEMAS[schema_name])
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


class Flags:
    """Collects numerical failures (which fail the run) and notes (which do not)."""

    def __init__(self):
        self.failures: list[str] = []
        self.notes: list[str] = []

    def fail(self, msg: str):
        self.failures.append(msg)

    def note(self, msg: str):
        self.notes.append(msg)


def _awgn_spec(cfg: RunConfig) -> AwgnSpec:
    ch = cfg.channel
    if ch["noise"]["type"] != "white" or ch["input"] != "flat":
        raise ConfigError("awgn-curve needs white noise and a flat input")
    sigma2 = float(ch["noise"].get("level", 1.0))
    beta = cfg.beta
    if ch["mismatch"] != "matched":
        if ch["mismatch"]["type"] != "white":
            raise ConfigError("awgn-curve accepts only a white mismatch spectrum")
        # a white decoder noise level only rescales the temperature
        beta = beta * sigma2 / float(ch["mismatch"].get("level", 1.0))
    return AwgnSpec(float(ch["power"]), sigma2, GldParams(beta))


def cmd_awgn_curve(cfg: RunConfig, out: Path, args, flags: Flags) -> None:
    spec = _awgn_spec(cfg)
    rs = r_star_awgn(spec)
    rows, marked = [], False
    for R in cfg.rate_grid():
        lower = float(trc_lower_awgn(R, spec))
        if spec.gld.deterministic:
            exact = math.nan
        else:
            try:
                exact = trc_exact_awgn(float(R), spec)
            except ConvergenceError as exc:
                flags.fail(f"exact exponent at R={R:g}: {exc}")
                exact = math.nan
            if math.isfinite(exact) and exact < lower - args.tol:
                flags.fail(f"exact exponent below the lower bound at R={R:g}")
        marker = ""
        if not marked and R >= rs:
            marker, marked = "r_star", True
        rows.append((R, lower, exact, marker))
    if spec.gld.deterministic:
        flags.note("exact column not computed for deterministic decoding")
    r_t = r_tightness(flat_channel(spec.snr, gld=GldParams(math.inf), grid_size=8))
    if not spec.gld.deterministic and any(R > r_t for R, *_ in rows):
        flags.note(f"exact values above the tightness rate {r_t:.6g} are not guaranteed "
                   "to be the exponent; they are the numerical value of the bound")
    write_csv(out / "awgn_curve.csv", ["rate", "exponent_lower", "exponent_exact", "marker"], rows)
    write_json(out / "awgn_summary.json",
               {"snr": spec.snr, "r_star": rs, "r0": r0_awgn(spec), "r_t": r_t}, "awgn_summary")


def cmd_colored_curve(cfg: RunConfig, out: Path, args, flags: Flags) -> None:
    ch = cfg.channel_spec(args.grid)
    rows = []
    for R in cfg.rate_grid():
        try:
            p = trc_lower_colored(float(R), ch, full=True)
        except ConvergenceError as exc:
            flags.fail(f"colored exponent at R={R:g}: {exc}")
            continue
        rows.append((p.rate, p.exponent, p.theta_opt, p.lambda_opt))
    write_csv(out / "colored_curve.csv", ["rate", "exponent", "theta_opt", "lambda_opt"], rows)


def cmd_waterpour(cfg: RunConfig, out: Path, args, flags: Flags) -> None:
    _, sz, szt = cfg.spectra(args.grid)
    mu = sz.values / (sz.values if szt is None else szt.values)
    P = float(cfg.channel["power"])
    sols, rows = [], []
    for R in cfg.rate_grid():
        try:
            sol = optimize_input_spectrum(float(R), P, sz, mu, cfg.gld)
        except InfeasibleAllocationError as exc:
            raise ConfigError(str(exc)) from None
        for f in sol.flags:
            flags.note(f"R={R:g}: {f}")
        if abs(sol.achieved_power - P) > 1e-8 * max(1.0, P):
            flags.fail(f"R={R:g}: power constraint missed ({sol.achieved_power!r})")
        sols.append(sol.to_dict())
        rows.extend((R, w, x) for w, x in zip(sol.sx.omega, sol.sx.values))
    write_json(out / "waterpour.json", {"solutions": sols}, "waterpour")
    write_csv(out / "waterpour_sx.csv", ["rate", "omega", "sx"], rows)


def cmd_rates(cfg: RunConfig, out: Path, args, flags: Flags) -> None:
    ch = cfg.channel_spec(args.grid)
    e0, lam = zero_rate_exponent(ch)
    rep = tightness_report(ch)
    for f in rep.flags:
        flags.note(f)
    write_json(out / "rates.json", {
        "r_star": r_star_colored(ch), "r0": r0_random_coding(ch), "r_t": rep.r_t,
        "zero_rate_exponent": e0, "lambda_star": lam,
    }, "rates")
    write_json(out / "tightness.json", rep.to_dict(), "tightness")
    write_csv(out / "zeta_profile.csv", ["zeta", "delta"], rep.zeta_profile)


def cmd_evd_check(cfg: RunConfig, out: Path, args, flags: Flags) -> None:
    _, sz, _ = cfg.spectra(args.grid)
    evd = cfg.evd or {"n": [32, 64, 128, 256], "functions": sorted(_FUNCTIONS)}
    r = autocorr_from_spectrum(sz)
    try:
        reports = evd_check(r, evd["n"], {k: _FUNCTIONS[k] for k in evd["functions"]}, args.grid)
    except EigenConvergenceError as exc:
        flags.fail(str(exc))
        return
    write_csv(out / "evd_check.csv", ["n", "function", "lhs", "rhs", "gap"],
              [(rep.n, rep.label, rep.lhs, rep.rhs, rep.gap) for rep in reports])


def cmd_simulate(cfg: RunConfig, out: Path, args, flags: Flags) -> None:
    if cfg.sim is None:
        raise ConfigError("simulate needs a 'sim' section")
    s = cfg.sim
    ch = cfg.channel_spec(int(s["n"]))
    try:
        sim = SimConfig.from_channel(ch, s["n"], s["ell"], s["rate"], s["trials_codes"],
                                     s["trials_noise"], s["seed"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    est = estimate_exponents(sim)
    if est.censored:
        flags.note(f"{est.censored_codes} codes had no errors; surrogate probability used")
    write_json(out / "sim_estimate.json", est.to_dict(), "simulate")
    write_csv(out / "sim_per_code.csv", ["code", "pe", "censored"],
              [(i, p, int(p == 0)) for i, p in enumerate(est.per_code_pe)])


COMMANDS = {
    "awgn-curve": cmd_awgn_curve,
    "colored-curve": cmd_colored_curve,
    "waterpour": cmd_waterpour,
    "rates": cmd_rates,
    "evd-check": cmd_evd_check,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trcgauss", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON configuration file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--grid", type=int, default=DEFAULT_GRID, help="frequency grid size")
        p.add_argument("--tol", type=float, default=1e-6, help="consistency-check tolerance")
        p.add_argument("--allow-flags", action="store_true",
                       help="exit 0 even if a numerical check was flagged")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.grid < 8:
        print("error: --grid must be at least 8", file=sys.stderr)
        return EXIT_INVALID
    out = Path(args.out)
    flags = Flags()
    try:
        cfg = load_config(args.config)
        out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](cfg, out, args, flags)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    for msg in flags.notes:
        print(f"note: {msg}", file=sys.stderr)
    for msg in flags.failures:
        print(f"flagged: {msg}", file=sys.stderr)
    if flags.failures and not args.allow_flags:
        return EXIT_FLAGGED
    return 0


if __name__ == "__main__":
    sys.exit(main())
