"""Experiment configuration: JSON schema, defaults and conversion."""

from __future__ import annotations

import copy
import json
import math

import jsonschema

from .deepc import DeePCWeights
from .recognition import RecognitionConfig
from .sarx import CASE_STUDY_MODES, CASE_STUDY_NOISE_SIGMA, ModeSchedule, SARXSystem

_number = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_posint = {"type": "integer", "minimum": 1}
_coefs = {"type": "array", "items": _number}

CONFIG_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "lgap closed-loop experiment",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "T_ini": _posint,
        "T_f": _posint,
        "n": {"type": "integer", "minimum": 0},
        "epsilon": {"description": "swap threshold; null disables recognition",
                    "oneOf": [_pos, {"type": "null"}]},
        "M": _posint,
        "horizon": _posint,
        "seed": {"type": "integer", "minimum": 0},
        "dither": {"type": "number", "minimum": 0},
        "prefill_window": {"type": "boolean"},
        "weights": {
            "type": "object", "additionalProperties": False,
            "properties": {"output_weight": _pos, "input_weight": _pos, "g_regularization": _pos},
        },
        "reference": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "amplitude": _number,
                "period": {"type": "integer", "minimum": 2},
                "values": {"oneOf": [{"type": "array", "items": _number, "minItems": 1},
                                     {"type": "null"}]},
            },
        },
        "initial_data": {
            "type": "object", "additionalProperties": False,
            "properties": {"mode": {"type": "integer", "minimum": 0}, "length": _posint},
        },
        "system": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "modes": {
                    "type": "array", "minItems": 1,
                    "items": {"type": "object", "additionalProperties": False,
                              "required": ["a", "b"],
                              "properties": {"a": _coefs, "b": _coefs}},
                },
                "noise_sigma": {"type": "number", "minimum": 0},
                "truncation": _pos,
            },
        },
        "schedule": {
            "type": "array", "minItems": 1,
            "items": {"type": "array", "minItems": 2, "maxItems": 2,
                      "items": {"type": "integer", "minimum": 0}},
        },
        "output": {
            "type": "object", "additionalProperties": False,
            "properties": {"out_dir": {"type": "string"}},
        },
    },
}

DEFAULT_CONFIG = {
    "T_ini": 2,
    "T_f": 5,
    "n": 2,
    "epsilon": 0.3,
    "M": 20,
    "horizon": 70,
    "seed": 0,
    "dither": 0.0,
    "prefill_window": True,
    "weights": {"output_weight": 2000.0, "input_weight": 1.0, "g_regularization": 20.0},
    "reference": {"amplitude": 1.0, "period": 20, "values": None},
    "initial_data": {"mode": 0, "length": 60},
    "system": {
        "modes": [{"a": list(m["a"]), "b": list(m["b"])} for m in CASE_STUDY_MODES],
        "noise_sigma": CASE_STUDY_NOISE_SIGMA,
        "truncation": 3.0,
    },
    "schedule": [[0, 1], [40, 0]],
    "output": {"out_dir": "lgap-run"},
}


class ConfigError(ValueError):
    """Configuration violates the schema; ``errors`` lists every violation."""

    def __init__(self, errors: list[str]):
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {e}" for e in errors))
        self.errors = errors


def validate(doc: dict) -> None:
    validator = jsonschema.Draft7Validator(CONFIG_SCHEMA)
    errors = []
    for err in sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path)):
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        errors.append(f"{where}: {err.message}")
    if errors:
        raise ConfigError(errors)


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def resolve(doc: dict | None = None) -> dict:
    """Validate a user document and fill in every default."""
    doc = doc or {}
    validate(doc)
    full = _merge(DEFAULT_CONFIG, doc)
    validate(full)
    return full


def load(path) -> dict:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"line {exc.lineno}: {exc.msg}"]) from None
    if not isinstance(doc, dict):
        raise ConfigError(["<root>: configuration must be a JSON object"])
    return resolve(doc)


def build(full: dict) -> tuple[RecognitionConfig, SARXSystem, ModeSchedule]:
    """Turn a resolved config document into runtime objects."""
    eps = full["epsilon"]
    ref = full["reference"]
    try:
        rc = RecognitionConfig(
            T_ini=full["T_ini"], T_f=full["T_f"], n=full["n"],
            epsilon=math.inf if eps is None else float(eps),
            M=full["M"], horizon=full["horizon"],
            weights=DeePCWeights(**full["weights"]),
            reference_amplitude=ref["amplitude"], reference_period=ref["period"],
            reference=None if ref["values"] is None else tuple(ref["values"]),
            dither=full["dither"],
            initial_data_mode=full["initial_data"]["mode"],
            initial_data_length=full["initial_data"]["length"],
            prefill_window=full["prefill_window"], seed=full["seed"],
        )
        system = SARXSystem(tuple(full["system"]["modes"]), full["system"]["noise_sigma"],
                            full["system"]["truncation"])
        schedule = ModeSchedule(tuple(tuple(e) for e in full["schedule"]))
        n_modes = len(system.modes)
        bad = [k for _, k in schedule.entries if k >= n_modes]
        if bad or rc.initial_data_mode >= n_modes:
            raise ValueError(f"mode index out of range for {n_modes} modes")
    except (ValueError, TypeError) as exc:
        raise ConfigError([str(exc)]) from None
    return rc, system, schedule
