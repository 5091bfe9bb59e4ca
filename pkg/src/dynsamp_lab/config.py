"""Declarative experiment configuration.

Configs are versioned JSON documents; complex scalars serialize as
two-element ``[re, im]`` arrays (plain numbers are accepted on input).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from .dynsamp import WeightSpec, nilpotent_shift
from .errors import InvalidInput

SCHEMA_VERSION = 1

_COMPLEX = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"},
         "minItems": 2, "maxItems": 2},
    ]
}

_OPERATOR_SPEC = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["diagonal", "nilpotent_shift", "circulant",
                          "dense", "block_diag"]},
        "dimension": {"type": "integer", "minimum": 1},
        "values": {"type": "array", "items": _COMPLEX},
        "first_row": {"type": "array", "items": _COMPLEX},
        "entries": {"type": "array", "items": _COMPLEX},
        "blocks": {"type": "array"},
    },
    "required": ["kind"],
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "schema_version": {"type": "integer"},
        "dimension": {"type": "integer", "minimum": 1},
        "operator": _OPERATOR_SPEC,
        "generators": {
            "type": "array",
            "items": {"type": "array", "items": _COMPLEX},
            "minItems": 1,
        },
        "weights": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["constant", "geometric", "explicit"]},
                "value": _COMPLEX,
                "values": {"type": "array", "items": _COMPLEX},
            },
            "required": ["kind"],
        },
        "horizon": {"type": "integer", "minimum": 1},
        "checks": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "tolerances": {"type": "object"},
        "seed": {"type": "integer"},
        "params": {"type": "object"},
    },
    "required": ["dimension", "operator", "generators", "horizon", "checks"],
}


class ConfigError(InvalidInput):
    """Configuration failed to parse or validate (CLI exit code 1)."""


def parse_complex(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigError(f"cannot parse complex scalar from {value!r}")


def encode_complex(value: complex) -> list[float]:
    z = complex(value)
    return [float(z.real), float(z.imag)]


@dataclass(frozen=True)
class OperatorSpec:
    kind: str
    dimension: int | None = None
    values: tuple[complex, ...] | None = None
    first_row: tuple[complex, ...] | None = None
    entries: tuple[complex, ...] | None = None
    blocks: tuple["OperatorSpec", ...] | None = None


def parse_operator_spec(raw: dict) -> OperatorSpec:
    kind = raw.get("kind")
    if kind == "block_diag":
        blocks = tuple(parse_operator_spec(b) for b in raw.get("blocks", ()))
        if not blocks:
            raise ConfigError("block_diag operator needs at least one block")
        return OperatorSpec(kind=kind, blocks=blocks,
                            dimension=raw.get("dimension"))
    spec = OperatorSpec(
        kind=kind,
        dimension=raw.get("dimension"),
        values=tuple(parse_complex(v) for v in raw["values"])
        if "values" in raw else None,
        first_row=tuple(parse_complex(v) for v in raw["first_row"])
        if "first_row" in raw else None,
        entries=tuple(parse_complex(v) for v in raw["entries"])
        if "entries" in raw else None,
    )
    return spec


def operator_dimension(spec: OperatorSpec) -> int:
    if spec.kind == "diagonal":
        if not spec.values:
            raise ConfigError("diagonal operator needs 'values'")
        return len(spec.values)
    if spec.kind == "nilpotent_shift":
        if not spec.dimension:
            raise ConfigError("nilpotent_shift operator needs 'dimension'")
        return spec.dimension
    if spec.kind == "circulant":
        if not spec.first_row:
            raise ConfigError("circulant operator needs 'first_row'")
        return len(spec.first_row)
    if spec.kind == "dense":
        if not spec.entries:
            raise ConfigError("dense operator needs row-major 'entries'")
        n = len(spec.entries)
        d = int(round(n**0.5))
        if d * d != n:
            raise ConfigError(f"dense entries length {n} is not a perfect square")
        return d
    if spec.kind == "block_diag":
        return sum(operator_dimension(b) for b in spec.blocks)
    raise ConfigError(f"unknown operator kind {spec.kind!r}")


def build_operator(spec: OperatorSpec) -> np.ndarray:
    d = operator_dimension(spec)
    if spec.kind == "diagonal":
        return np.diag(np.array(spec.values, dtype=complex))
    if spec.kind == "nilpotent_shift":
        return nilpotent_shift(d)
    if spec.kind == "circulant":
        row = np.array(spec.first_row, dtype=complex)
        return np.stack([np.roll(row, k) for k in range(d)], axis=0)
    if spec.kind == "dense":
        return np.array(spec.entries, dtype=complex).reshape(d, d)
    if spec.kind == "block_diag":
        out = np.zeros((d, d), dtype=complex)
        at = 0
        for block in spec.blocks:
            bd = operator_dimension(block)
            out[at:at + bd, at:at + bd] = build_operator(block)
            at += bd
        return out
    raise ConfigError(f"unknown operator kind {spec.kind!r}")


def operator_spec_to_dict(spec: OperatorSpec) -> dict:
    out: dict = {"kind": spec.kind}
    if spec.kind == "block_diag":
        out["blocks"] = [operator_spec_to_dict(b) for b in spec.blocks]
        return out
    if spec.dimension is not None:
        out["dimension"] = spec.dimension
    if spec.values is not None:
        out["values"] = [encode_complex(v) for v in spec.values]
    if spec.first_row is not None:
        out["first_row"] = [encode_complex(v) for v in spec.first_row]
    if spec.entries is not None:
        out["entries"] = [encode_complex(v) for v in spec.entries]
    return out


def parse_weight_spec(raw: dict | None) -> WeightSpec | None:
    if raw is None:
        return None
    kind = raw.get("kind")
    try:
        if kind == "constant":
            return WeightSpec.constant(parse_complex(raw.get("value", 1.0)))
        if kind == "geometric":
            if "value" not in raw:
                raise ConfigError("geometric weights need 'value'")
            return WeightSpec.geometric(parse_complex(raw["value"]))
        if kind == "explicit":
            values = [parse_complex(v) for v in raw.get("values", ())]
            if not values:
                raise ConfigError("explicit weights need 'values'")
            if any(abs(v) == 0.0 for v in values):
                raise ConfigError("weights must be nonzero scalars")
            return WeightSpec.explicit(values)
    except InvalidInput as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown weight kind {kind!r}")


def weight_spec_to_dict(spec: WeightSpec | None) -> dict | None:
    if spec is None:
        return None
    out: dict = {"kind": spec.kind}
    if spec.value is not None:
        out["value"] = encode_complex(spec.value)
    if spec.values is not None:
        out["values"] = [encode_complex(v) for v in spec.values]
    return out


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    dimension: int
    operator: OperatorSpec
    generators: tuple[tuple[complex, ...], ...]
    horizon: int
    checks: tuple[str, ...]
    weights: WeightSpec | None = None
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    params: dict = field(default_factory=dict)

    def generator_arrays(self) -> tuple[np.ndarray, ...]:
        return tuple(np.array(g, dtype=complex) for g in self.generators)

    def operator_array(self) -> np.ndarray:
        return build_operator(self.operator)


def parse_config(raw: dict, known_checks=None) -> ExperimentConfig:
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config does not match schema: {exc.message}") from exc
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version}")

    operator = parse_operator_spec(raw["operator"])
    dim = raw["dimension"]
    op_dim = operator_dimension(operator)
    if op_dim != dim:
        raise ConfigError(
            f"operator dimension {op_dim} does not match configured {dim}"
        )
    generators = tuple(
        tuple(parse_complex(v) for v in g) for g in raw["generators"]
    )
    for g in generators:
        if len(g) != dim:
            raise ConfigError(f"generator length {len(g)} != dimension {dim}")
    weights = parse_weight_spec(raw.get("weights"))
    checks = tuple(raw["checks"])
    if known_checks is not None:
        for name in checks:
            base = name.split(":", 1)[0]
            if base not in known_checks:
                raise ConfigError(f"unknown check {name!r}")
    return ExperimentConfig(
        dimension=dim,
        operator=operator,
        generators=generators,
        horizon=raw["horizon"],
        checks=checks,
        weights=weights,
        tolerances=dict(raw.get("tolerances", {})),
        seed=int(raw.get("seed", 0)),
        params=dict(raw.get("params", {})),
    )


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Canonical dict echo; re-parsing yields an equivalent config."""
    out = {
        "schema_version": SCHEMA_VERSION,
        "dimension": cfg.dimension,
        "operator": operator_spec_to_dict(cfg.operator),
        "generators": [[encode_complex(v) for v in g] for g in cfg.generators],
        "horizon": cfg.horizon,
        "checks": list(cfg.checks),
        "tolerances": dict(cfg.tolerances),
        "seed": cfg.seed,
        "params": cfg.params,
    }
    w = weight_spec_to_dict(cfg.weights)
    if w is not None:
        out["weights"] = w
    return out


def canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def config_hash(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(
        canonical_json(config_to_dict(cfg)).encode()
    ).hexdigest()


def load_config(path) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(raw)
