"""Run configuration files.

INI-style layout, one section per concern:

    [grid]       n
    [population] reds, blues
    [network]    k, repermute_per_value
    [utility]    x, alpha, beta, gamma, c_bar, color_variant
    [process]    max_iter, H, base_seed
    [sweep]      axis, values
    [output]     directory, formats

Parsing is strict: unknown sections or keys fail fast naming the offender,
while missing keys fall back to defaults with a logged notice.  `values`
accepts numbers separated by commas or whitespace, plus `a:b` shorthand for
an inclusive integer range.  `max_iter = auto` means 10 * n * n.
"""

from __future__ import annotations

import configparser
import logging
import os
from dataclasses import dataclass

from .harness import DEFAULT_BASE_SEED, SWEEP_AXES, ExperimentSpec
from .utility import ColorVariant, UtilityParams

log = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "SCHELLNET_OUTPUT_DIR"


class ConfigError(ValueError):
    """A configuration file problem, with the offending key in the message."""


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_values(text: str):
    values = []
    for token in text.replace(",", " ").split():
        if ":" in token:
            lo, hi = token.split(":", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError(f"empty range {token!r}")
            values.extend(float(v) for v in range(lo, hi + 1))
        else:
            values.append(float(token))
    if not values:
        raise ValueError("no values given")
    return tuple(values)


def _parse_max_iter(text: str):
    if text.strip().lower() == "auto":
        return None
    v = int(text)
    if v < 0:
        raise ValueError("max_iter must be non-negative or 'auto'")
    return v


def _parse_formats(text: str):
    formats = tuple(t.strip().lower() for t in text.replace(",", " ").split())
    for f in formats:
        if f not in ("csv", "svg", "png"):
            raise ValueError(f"unsupported output format {f!r}")
    return formats or ("csv",)


# section -> key -> (converter, default); None default means "no entry at all"
_SCHEMA = {
    "grid": {"n": (int, 10)},
    "population": {"reds": (int, 37), "blues": (int, 37)},
    "network": {"k": (int, 0), "repermute_per_value": (_parse_bool, False)},
    "utility": {
        "x": (float, 0.5),
        "alpha": (float, 1.0),
        "beta": (float, 1.0),
        "gamma": (int, 1),
        "c_bar": (float, 0.5),
        "color_variant": (ColorVariant.parse, ColorVariant.THRESHOLD_SATURATING),
    },
    "process": {
        "max_iter": (_parse_max_iter, None),
        "H": (int, 100),
        "base_seed": (int, DEFAULT_BASE_SEED),
    },
    "sweep": {"axis": (str.strip, None), "values": (_parse_values, None)},
    "output": {"directory": (str.strip, None), "formats": (_parse_formats, ("csv", "svg"))},
}


@dataclass(frozen=True)
class RunConfig:
    """A fully resolved configuration file."""

    n: int
    reds: int
    blues: int
    k: int
    repermute_per_value: bool
    params: UtilityParams
    max_iter: int | None
    h_runs: int
    base_seed: int
    sweep_axis: str | None
    sweep_values: tuple
    out_dir: str
    formats: tuple

    def to_spec(self, require_sweep: bool = False) -> ExperimentSpec:
        if require_sweep and self.sweep_axis is None:
            raise ConfigError("this command needs a [sweep] section with axis and values")
        sweeping = self.sweep_axis is not None
        return ExperimentSpec(
            n=self.n,
            reds=self.reds,
            blues=self.blues,
            k=self.k,
            params=self.params,
            sweep_axis=self.sweep_axis if sweeping else None,
            sweep_values=self.sweep_values if sweeping else (),
            h_runs=self.h_runs,
            base_seed=self.base_seed,
            max_iter=self.max_iter,
            repermute_per_value=self.repermute_per_value,
        )


def load_config(path) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep key case, the schema says 'H'
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read configuration file {path}")

    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}] in {path}")
        for key in parser[section]:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}] of {path}")

    resolved: dict[str, dict] = {}
    for section, keys in _SCHEMA.items():
        resolved[section] = {}
        for key, (conv, default) in keys.items():
            if parser.has_option(section, key):
                raw = parser.get(section, key)
                try:
                    resolved[section][key] = conv(raw)
                except (ValueError, TypeError) as exc:
                    raise ConfigError(f"bad value for [{section}] {key} = {raw!r}: {exc}") from exc
            else:
                if section != "sweep" and default is not None:
                    log.info("config %s: using default [%s] %s = %s", path, section, key, default)
                resolved[section][key] = default

    sweep_axis = resolved["sweep"]["axis"]
    sweep_values = resolved["sweep"]["values"]
    if (sweep_axis is None) != (sweep_values is None):
        raise ConfigError("[sweep] needs both axis and values (or neither)")
    if sweep_axis is not None and sweep_axis not in SWEEP_AXES:
        raise ConfigError(f"[sweep] axis must be one of {SWEEP_AXES}, got {sweep_axis!r}")
    if sweep_axis == "k" and sweep_values is not None:
        sweep_values = tuple(int(v) for v in sweep_values)

    try:
        params = UtilityParams(
            x=resolved["utility"]["x"],
            alpha=resolved["utility"]["alpha"],
            beta=resolved["utility"]["beta"],
            gamma=resolved["utility"]["gamma"],
            c_bar=resolved["utility"]["c_bar"],
            color_variant=resolved["utility"]["color_variant"],
        )
    except ValueError as exc:
        raise ConfigError(f"bad [utility] parameters: {exc}") from exc

    out_dir = resolved["output"]["directory"]
    if out_dir is None:
        out_dir = os.environ.get(OUTPUT_DIR_ENV, ".")

    return RunConfig(
        n=resolved["grid"]["n"],
        reds=resolved["population"]["reds"],
        blues=resolved["population"]["blues"],
        k=resolved["network"]["k"],
        repermute_per_value=resolved["network"]["repermute_per_value"],
        params=params,
        max_iter=resolved["process"]["max_iter"],
        h_runs=resolved["process"]["H"],
        base_seed=resolved["process"]["base_seed"],
        sweep_axis=sweep_axis,
        sweep_values=sweep_values or (),
        out_dir=out_dir,
        formats=resolved["output"]["formats"],
    )
