"""JSON run configurations.

A configuration is one JSON object; scalars are strings so rationals survive
the round trip::

    {"alpha": "11", "masses": [{"c": "-2", "order": 1, "lambda": "1"}],
     "mode": "rational", "precision_bits": 256, "n": 12}

A mass may give a ``lambdas`` map ``{"0": "1", "2": "1/2"}`` instead of a
single ``order``/``lambda`` pair.  The environment variable
``LSOB_PRECISION_BITS`` overrides ``precision_bits``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema

from .errors import ConfigError
from .sobolev import SobolevConfig

__all__ = ["SCHEMA", "RunConfig", "load_config", "parse_config", "fixture_names", "PRECISION_ENV"]

PRECISION_ENV = "LSOB_PRECISION_BITS"

_NONNEG = r"^\+?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?(/\d+)?$"
_NEG = r"^-(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?(/\d+)?$"
_REAL = r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?(/\d+)?$"

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["alpha", "masses"],
    "properties": {
        "name": {"type": "string"},
        "alpha": {"type": "string", "pattern": _REAL},
        "masses": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["c"],
                "properties": {
                    "c": {"type": "string", "pattern": _NEG},
                    "order": {"type": "integer", "minimum": 0},
                    "lambda": {"type": "string", "pattern": _NONNEG},
                    "lambdas": {
                        "type": "object",
                        "minProperties": 1,
                        "propertyNames": {"pattern": r"^\d+$"},
                        "additionalProperties": {"type": "string", "pattern": _NONNEG},
                    },
                },
                "oneOf": [
                    {"required": ["order", "lambda"], "not": {"required": ["lambdas"]}},
                    {"required": ["lambdas"], "not": {"anyOf": [{"required": ["order"]}, {"required": ["lambda"]}]}},
                ],
            },
        },
        "mode": {"enum": ["rational", "float"]},
        "precision_bits": {"type": "integer", "minimum": 32},
        "n": {"type": "integer", "minimum": 0},
        "n_range": {
            "type": "array",
            "items": {"type": "integer", "minimum": 0},
            "minItems": 2,
            "maxItems": 2,
        },
    },
}


@dataclass(frozen=True)
class RunConfig:
    sobolev: SobolevConfig
    n: int | None = None
    n_range: tuple | None = None
    name: str | None = None
    source: str | None = None

    def degrees(self) -> list:
        if self.n_range is not None:
            return list(range(self.n_range[0], self.n_range[1] + 1))
        return [] if self.n is None else [self.n]


def _rational(text: str) -> Fraction:
    # Fraction accepts decimals and exponents, which keeps "0.5" exact
    return Fraction(text)


def parse_config(raw: dict, source: str | None = None, env=None) -> RunConfig:
    """Validate a decoded JSON document and build the run configuration."""
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from None
    env = os.environ if env is None else env
    bits = raw.get("precision_bits", 256)
    if env.get(PRECISION_ENV):
        try:
            bits = int(env[PRECISION_ENV])
        except ValueError:
            raise ConfigError(f"{PRECISION_ENV} must be an integer") from None
        if bits < 32:
            raise ConfigError(f"{PRECISION_ENV} must be at least 32")
    mode = raw.get("mode", "rational")
    alpha = _rational(raw["alpha"])
    if mode == "rational" and alpha.denominator != 1:
        raise ConfigError("rational mode needs an integer alpha (Gamma(alpha+1) must be rational); use float mode")
    masses = []
    for m in raw["masses"]:
        if "lambdas" in m:
            lams = {int(k): _rational(v) for k, v in m["lambdas"].items()}
        else:
            lams = {m["order"]: _rational(m["lambda"])}
        masses.append({"c": _rational(m["c"]), "lambdas": lams})
    sob = SobolevConfig(alpha, tuple(masses), mode, bits)
    n_range = tuple(raw["n_range"]) if "n_range" in raw else None
    if n_range is not None and n_range[0] > n_range[1]:
        raise ConfigError("n_range must be increasing")
    return RunConfig(sob, raw.get("n"), n_range, raw.get("name"), source)


def fixture_names() -> list:
    root = resources.files("lsob.fixtures")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_config(path_or_name: str, env=None) -> RunConfig:
    """Load a config file, or a shipped fixture by name (``example1`` ... ``example5``, ``intro``, ``classicalA``)."""
    path = Path(path_or_name)
    if path.is_file():
        text, source = path.read_text(), str(path)
    elif path_or_name in fixture_names():
        text = resources.files("lsob.fixtures").joinpath(f"{path_or_name}.json").read_text()
        source = f"fixture:{path_or_name}"
    else:
        raise ConfigError(f"no such config file or fixture: {path_or_name}")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: not valid JSON ({exc})") from None
    return parse_config(raw, source, env)
