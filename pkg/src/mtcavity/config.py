"""Strict JSON run configuration.

A config is one JSON object::

    {"command": "spectrum", "output_dir": "out", "seed": 0, "dump_stride": 0,
     "spectrum": {"omega0": 100, "lam": 1, "n_emitters": 4}}

Each command reads a block of the same name (``sweep`` additionally reads the
block of its target command). Unknown keys are rejected with a spelling hint,
missing keys take the defaults below, and every value is type-checked.
"""
from __future__ import annotations

import copy
import difflib
import json
import math
from dataclasses import dataclass, field
from typing import Any

from .errors import ParseError, ValidationError

COMMANDS = ("simulate", "travelwave", "correct", "spectrum", "estimate", "sweep")
POTENTIAL_PRESETS = ("phi4", "nagumo")

REQUIRED = object()

# key -> (kind, default); kinds: float, float+ (positive), float0 (>= 0), int+, int0,
# bool, str:<a|b>, potential, interval, float?, floatinf, list, dict
_MODEL = {
    "potential": ("potential", "phi4"),
    "potential_scale": ("float+", 1.0),
    "gamma": ("float0", 0.0),
    "force": ("float", 0.0),
}

SCHEMAS = {
    "simulate": {
        **_MODEL,
        "dx": ("float+", 0.01),
        "dt": ("float+", 0.005),
        "boundary": ("str:fixed|zero-gradient", "fixed"),
        "half_width": ("float+", 20.0),
        "t_final": ("float+", 20.0),
        "stride": ("int+", 10),
        "level": ("float?", None),
        "initial": ("str:tanh|logistic|matched|constant", "tanh"),
        "params": ("list", [1.0, 1.0 / math.sqrt(2.0), 0.0]),
        "velocity": ("float", 0.0),
        "center": ("float", 0.0),
        "constant": ("float", 0.0),
        "speed_skip": ("float0", 0.0),
    },
    "travelwave": {
        **_MODEL,
        "velocity": ("float", 0.0),
        "interval": ("interval", [-10.0, 10.0]),
        "descending": ("bool", False),
        "method": ("str:auto|match|shoot", "auto"),
        "speed_selection": ("bool", False),
        "tol": ("float+", 1e-8),
        "n_samples": ("int+", 2001),
    },
    "correct": {
        **_MODEL,
        "velocity": ("float", 0.0),
        "interval": ("interval", [-10.0, 10.0]),
        "descending": ("bool", False),
        "kernel": ("str:uniform|sech2", "uniform"),
        "sigma2": ("float0", 0.1),
        "amplitude": ("float0", 0.1),
        "width": ("float+", 1.0),
        "base": ("float0", 0.0),
        "max_iter": ("int+", 30),
        "tol": ("float+", 1e-8),
        "n_samples": ("int+", 2001),
    },
    "spectrum": {
        "omega0": ("float+", 100.0),
        "omega_c": ("float?", None),
        "detuning": ("float", 0.0),
        "lam": ("float0", 1.0),
        "n_emitters": ("int+", 1),
        "quality": ("floatinf", math.inf),
        "sign_convention": ("str:paper|standard", "paper"),
        "n_points": ("int+", 4001),
        "span": ("float+", 3.0),
    },
    "estimate": {
        "mobile_charges": ("float0", 36.0),
        "dipole_length": ("float+", 4e-9),
        "eps_rel": ("float+", 80.0),
        "omega0": ("float+", 1e12),
        "omega_c": ("float+", 6e12),
        "cavity_volume": ("float?", None),
        "n_coherent": ("float?", None),
        "mt_length": ("float0", 1e-6),
        "kink_speed": ("float+", 2.0),
        "lifetime_Tr": ("float+", 1e-4),
        "collapse_range": ("interval", [1e-7, 1e-6]),
        "field_convention": ("str:si|paper-gaussian", "si"),
        "calibrated": ("bool", False),
    },
    "sweep": {
        "target": ("str:simulate|travelwave|correct|spectrum|estimate", REQUIRED),
        "axis": ("str", REQUIRED),
        "values": ("list", REQUIRED),
        "workers": ("int+", 1),
    },
}

TOP_LEVEL = {
    "command": ("str:" + "|".join(COMMANDS), REQUIRED),
    "output_dir": ("str", "out"),
    "seed": ("int0", 0),
    "dump_stride": ("int0", 0),
}


@dataclass
class RunConfig:
    command: str
    blocks: dict = field(default_factory=dict)
    output_dir: str = "out"
    seed: int = 0
    dump_stride: int = 0

    def block(self, name: str) -> dict:
        return self.blocks[name]

    def to_dict(self) -> dict:
        out = {"command": self.command, "output_dir": self.output_dir, "seed": self.seed, "dump_stride": self.dump_stride}
        for name, blk in self.blocks.items():
            out[name] = {k: _render_value(v) for k, v in blk.items()}
        return out


def _render_value(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if isinstance(v, list):
        return [_render_value(x) for x in v]
    return v


def _hint(key: str, allowed) -> str:
    close = difflib.get_close_matches(key, list(allowed), n=1, cutoff=0.6)
    return f"; did you mean {close[0]!r}?" if close else ""


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _coerce(path: str, kind: str, v: Any):
    def bad(what):
        raise ValidationError(f"{path}: expected {what}, got {v!r}", path)

    if kind.startswith("str"):
        if not isinstance(v, str):
            bad("a string")
        if ":" in kind:
            choices = kind.split(":", 1)[1].split("|")
            if v not in choices:
                raise ValidationError(f"{path}: must be one of {choices}, got {v!r}{_hint(v, choices)}", path)
        return v
    if kind == "bool":
        if not isinstance(v, bool):
            bad("true or false")
        return v
    if kind in ("int+", "int0"):
        if isinstance(v, float) and v.is_integer():
            v = int(v)
        if not isinstance(v, int) or isinstance(v, bool):
            bad("an integer")
        if v < (1 if kind == "int+" else 0):
            bad("a positive integer" if kind == "int+" else "a non-negative integer")
        return v
    if kind == "floatinf":
        if v is None or v == "inf":
            return math.inf
        if not _is_number(v) or not v > 0:
            bad("a positive number, null or \"inf\"")
        return float(v)
    if kind == "float?":
        if v is None:
            return None
        kind = "float"
    if kind.startswith("float"):
        if not _is_number(v) or not math.isfinite(v):
            bad("a finite number")
        v = float(v)
        if kind == "float+" and not v > 0:
            bad("a positive number")
        if kind == "float0" and not v >= 0:
            bad("a non-negative number")
        return v
    if kind == "interval":
        if not (isinstance(v, list) and len(v) == 2 and all(_is_number(x) for x in v)) or not v[0] < v[1]:
            bad("an increasing pair [lo, hi]")
        return [float(v[0]), float(v[1])]
    if kind == "potential":
        if isinstance(v, str):
            if v not in POTENTIAL_PRESETS:
                raise ValidationError(f"{path}: unknown preset {v!r}{_hint(v, POTENTIAL_PRESETS)}", path)
            return v
        if isinstance(v, list) and 1 <= len(v) <= 7 and all(_is_number(x) and math.isfinite(x) for x in v):
            return [float(x) for x in v]
        bad(f"a preset {POTENTIAL_PRESETS} or up to 7 ascending coefficients")
    if kind == "list":
        if not isinstance(v, list):
            bad("a list")
        return list(v)
    raise AssertionError(kind)


def _validate_block(name: str, raw, schema: dict) -> dict:
    if not isinstance(raw, dict):
        raise ValidationError(f"{name}: expected an object", name)
    for key in raw:
        if key not in schema:
            raise ValidationError(f"{name}: unknown key {key!r}{_hint(key, schema)}", f"{name}.{key}")
    out = {}
    for key, (kind, default) in schema.items():
        path = f"{name}.{key}"
        if key in raw:
            out[key] = _coerce(path, kind, raw[key])
        elif default is REQUIRED:
            raise ValidationError(f"{path}: required key missing", path)
        else:
            out[key] = copy.deepcopy(default)
    return out


def _check_block(name: str, blk: dict):
    if name == "simulate":
        from .chain import ChainParams

        try:
            ChainParams(_dummy_poly(), blk["gamma"], blk["force"], blk["dx"], blk["dt"], blk["boundary"])
        except ValidationError as exc:
            raise ValidationError(f"simulate.{exc.key}: {exc}", f"simulate.{exc.key}") from None
        if blk["initial"] in ("tanh", "logistic") and len(blk["params"]) != 3:
            raise ValidationError("simulate.params: need three kink constants", "simulate.params")
        if abs(blk["velocity"]) >= 1.0:
            raise ValidationError("simulate.velocity: must be subsonic (|v| < 1)", "simulate.velocity")
    if name in ("travelwave", "correct") and abs(blk["velocity"]) >= 1.0:
        raise ValidationError(f"{name}.velocity: must be subsonic (|v| < 1)", f"{name}.velocity")
    if name == "estimate":
        lo, hi = blk["collapse_range"]
        if not lo > 0:
            raise ValidationError("estimate.collapse_range: times must be positive", "estimate.collapse_range")
    if name == "sweep":
        if not blk["values"]:
            raise ValidationError("sweep.values: must be non-empty", "sweep.values")
        if not all(_is_number(v) for v in blk["values"]):
            raise ValidationError("sweep.values: entries must be numbers", "sweep.values")


def _dummy_poly():
    from .core import Polynomial

    return Polynomial([0.0])


def resolve_axis(config: RunConfig, axis: str) -> tuple:
    """Split 'block.key' and check it names a numeric leaf of the target block."""
    target = config.blocks["sweep"]["target"]
    parts = axis.split(".")
    if len(parts) == 1:
        parts = [target] + parts
    if len(parts) != 2 or parts[0] != target:
        raise ValidationError(f"sweep.axis: expected '{target}.<key>', got {axis!r}", "sweep.axis")
    key = parts[1]
    schema = SCHEMAS[target]
    if key not in schema:
        raise ValidationError(f"sweep.axis: unknown key {key!r}{_hint(key, schema)}", "sweep.axis")
    kind = schema[key][0]
    if not (kind.startswith("float") or kind.startswith("int")):
        raise ValidationError(f"sweep.axis: {axis!r} is not a numeric parameter", "sweep.axis")
    return target, key


def from_dict(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ValidationError("config must be a JSON object")
    for key in doc:
        if key not in TOP_LEVEL and key not in SCHEMAS:
            raise ValidationError(f"unknown key {key!r}{_hint(key, list(TOP_LEVEL) + list(SCHEMAS))}", key)
    top = _validate_block("config", {k: v for k, v in doc.items() if k in TOP_LEVEL}, TOP_LEVEL)
    command = top["command"]
    needed = [command]
    if command == "sweep":
        target = doc.get("sweep", {}).get("target") if isinstance(doc.get("sweep"), dict) else None
        if isinstance(target, str) and target in SCHEMAS:
            needed.append(target)
    blocks = {}
    for name in SCHEMAS:
        if name in doc:
            blocks[name] = _validate_block(name, doc[name], SCHEMAS[name])
            _check_block(name, blocks[name])
        elif name in needed:
            raise ValidationError(f"block {name!r} required by command {command!r} is missing", name)
    cfg = RunConfig(command, blocks, top["output_dir"], top["seed"], top["dump_stride"])
    if command == "sweep":
        resolve_axis(cfg, blocks["sweep"]["axis"])
    return cfg


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON config document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return from_dict(doc)


def render(config: RunConfig) -> str:
    return json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n"
