"""JSON experiment configuration: parsing, validation, default resolution, echo."""

from __future__ import annotations

import json
import math
import os
import re
from dataclasses import dataclass, field
from typing import Any

from .errors import ValidationError
from .model import OPEN, PERIODIC, UINT64_MAX, ChainSpec, DisorderSpec

PROTOCOLS = ("quench", "pump", "winding", "chern", "bands", "sweep")
SEED_ENV = "TOPOCHAIN_SEED"
SUBLATTICE_NAMES = "abcdefghijklmnopqrstuvwxyz"
_PI_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*\*?\s*pi\s*$")


class ConfigError(ValidationError):
    """Invalid configuration; ``path`` names the offending field, e.g. ``protocol.t_max``."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class ExperimentConfig:
    model: ChainSpec
    protocol: str
    params: dict = field(default_factory=dict)
    disorder: DisorderSpec = field(default_factory=DisorderSpec)
    output_dir: str = "topochain-out"

    def to_dict(self) -> dict:
        m = self.model
        return {
            "model": {
                "p": m.p,
                "N": m.N,
                "g0": m.g0,
                "g1": m.g1,
                "theta": m.theta,
                "boundary": m.boundary,
            },
            "protocol": {"kind": self.protocol, **self.params},
            "disorder": {
                "W": self.disorder.W,
                "seed": self.disorder.seed,
                "samples": self.disorder.samples,
            },
            "output": {"dir": self.output_dir},
        }

    def echo(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"


def parse_angle(value: Any, path: str) -> float:
    """Radians from a number or a string such as ``"0.1pi"`` / ``"pi"``."""
    if isinstance(value, bool):
        raise ConfigError(path, "expected an angle")
    if isinstance(value, (int, float)):
        out = float(value)
    elif isinstance(value, str):
        m = _PI_RE.match(value)
        if not m:
            raise ConfigError(path, f"cannot read angle {value!r} (use radians or e.g. '0.1pi')")
        out = float(m.group(1) or 1.0) * math.pi
    else:
        raise ConfigError(path, f"expected an angle, got {type(value).__name__}")
    if not math.isfinite(out):
        raise ConfigError(path, "angle must be finite")
    return out


def _number(block: dict, key: str, path: str, default=None, *, integer=False, lo=None, hi=None,
            lo_open=False, required=False):
    if key not in block:
        if required:
            raise ConfigError(f"{path}.{key}", "missing required field")
        return default
    v = block[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}.{key}", f"expected a number, got {v!r}")
    if integer:
        if isinstance(v, float) and not v.is_integer():
            raise ConfigError(f"{path}.{key}", f"expected an integer, got {v!r}")
        v = int(v)
    else:
        v = float(v)
        if not math.isfinite(v):
            raise ConfigError(f"{path}.{key}", "must be finite")
    if lo is not None and (v < lo or (lo_open and v == lo)):
        raise ConfigError(f"{path}.{key}", f"must be {'>' if lo_open else '>='} {lo}, got {v}")
    if hi is not None and v > hi:
        raise ConfigError(f"{path}.{key}", f"must be <= {hi}, got {v}")
    return v


def _reject_unknown(block: dict, allowed, path: str):
    for key in block:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}", "unknown key")


def _block(data: dict, key: str) -> dict:
    block = data.get(key, {})
    if not isinstance(block, dict):
        raise ConfigError(key, "expected an object")
    return block


def _parse_sublattice(value, p: int, path: str) -> str:
    if isinstance(value, str) and len(value) == 1 and value in SUBLATTICE_NAMES[:p]:
        return value
    if isinstance(value, int) and not isinstance(value, bool) and 1 <= value <= p:
        return SUBLATTICE_NAMES[value - 1]
    raise ConfigError(path, f"sublattice must be one of {list(SUBLATTICE_NAMES[:p])} or 1..{p}")


def _parse_bands(block, p, path):
    bands = block.get("bands", list(range(1, p + 1)))
    if not isinstance(bands, list) or not bands:
        raise ConfigError(f"{path}.bands", "expected a nonempty list of band indices")
    for b in bands:
        if isinstance(b, bool) or not isinstance(b, int) or not 1 <= b <= p:
            raise ConfigError(f"{path}.bands", f"band indices must be in 1..{p}, got {b!r}")
    return list(bands)


def _pump_params(block, model, path):
    phi0 = parse_angle(block.get("phi0", math.pi), f"{path}.phi0")
    if abs(math.remainder(phi0 - math.pi, 2 * math.pi)) > 1e-9:
        raise ConfigError(
            f"{path}.phi0",
            "must equal pi: the chi_n states are eigenstates only at the isolated-cell point",
        )
    steps = _number(block, "steps_per_cycle", path, 4096, integer=True, lo=1)
    samples = _number(block, "samples_per_cycle", path, 128, integer=True, lo=1)
    if steps % samples:
        raise ConfigError(f"{path}.steps_per_cycle", "must be a multiple of samples_per_cycle")
    return {
        "omega": _number(block, "omega", path, 0.39, lo=0, lo_open=True),
        "phi0": phi0,
        "cycles": _number(block, "cycles", path, 1, integer=True, lo=1),
        "steps_per_cycle": steps,
        "samples_per_cycle": samples,
        "cell": _number(block, "cell", path, (model.N + 1) // 2, integer=True, lo=1, hi=model.N),
        "bands": _parse_bands(block, model.p, path),
    }


def _protocol_params(kind: str, block: dict, model: ChainSpec) -> dict:
    path = "protocol"
    if kind == "quench":
        _reject_unknown(block, {"kind", "t_max", "dt", "cell", "sublattice", "s_max"}, path)
        if model.p != 2:
            raise ConfigError("model.p", "quench protocol needs p = 2")
        if model.boundary != OPEN:
            raise ConfigError("model.boundary", "quench protocol needs an open chain")
        return {
            "t_max": _number(block, "t_max", path, 50.0, lo=0, lo_open=True),
            "dt": _number(block, "dt", path, 0.02, lo=0, lo_open=True),
            "cell": _number(block, "cell", path, model.N // 2 + 1, integer=True, lo=1, hi=model.N),
            "sublattice": _parse_sublattice(block.get("sublattice", "a"), 2, f"{path}.sublattice"),
            "s_max": _number(block, "s_max", path, 2, integer=True, lo=0),
        }
    if kind == "pump":
        _reject_unknown(
            block,
            {"kind", "omega", "phi0", "cycles", "steps_per_cycle", "samples_per_cycle", "cell",
             "bands"},
            path,
        )
        if model.boundary != OPEN:
            raise ConfigError("model.boundary", "pump protocol needs an open chain")
        return _pump_params(block, model, path)
    if kind == "winding":
        _reject_unknown(block, {"kind", "nk"}, path)
        if model.p != 2:
            raise ConfigError("model.p", "winding protocol needs p = 2")
        return {"nk": _number(block, "nk", path, 256, integer=True, lo=16)}
    if kind == "chern":
        _reject_unknown(block, {"kind", "nq", "ntheta"}, path)
        return {
            "nq": _number(block, "nq", path, 24, integer=True, lo=12),
            "ntheta": _number(block, "ntheta", path, 24, integer=True, lo=12),
        }
    if kind == "bands":
        _reject_unknown(block, {"kind", "nq", "ntheta"}, path)
        nt = block.get("ntheta")
        return {
            "nq": _number(block, "nq", path, 64, integer=True, lo=2),
            "ntheta": None if nt is None else _number(block, "ntheta", path, integer=True, lo=2),
        }
    if kind == "sweep":
        over = block.get("over")
        if over not in ("W", "g0"):
            raise ConfigError(f"{path}.over", "must be 'W' (pump plateau) or 'g0' (Chern scan)")
        values = block.get("values")
        if not isinstance(values, list) or not values:
            raise ConfigError(f"{path}.values", "missing required nonempty list")
        for v in values:
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"{path}.values", f"expected numbers, got {v!r}")
            if over == "W" and v < 0:
                raise ConfigError(f"{path}.values", "disorder strengths must be >= 0")
        values = [float(v) for v in values]
        if over == "g0":
            _reject_unknown(block, {"kind", "over", "values", "nq", "ntheta"}, path)
            return {
                "over": over,
                "values": values,
                "nq": _number(block, "nq", path, 24, integer=True, lo=12),
                "ntheta": _number(block, "ntheta", path, 24, integer=True, lo=12),
            }
        inner = {k: v for k, v in block.items() if k not in ("kind", "over", "values")}
        _reject_unknown(
            inner,
            {"omega", "phi0", "cycles", "steps_per_cycle", "samples_per_cycle", "cell", "bands"},
            path,
        )
        return {"over": over, "values": values, **_pump_params(inner, model, path)}
    raise ConfigError("protocol.kind", f"unknown protocol {kind!r}; expected one of {PROTOCOLS}")


def resolve_seed(value, env=None) -> int:
    """Config seed if given, else ``$TOPOCHAIN_SEED``, else 0."""
    if value is not None:
        return value
    env = os.environ if env is None else env
    raw = env.get(SEED_ENV)
    if raw is None or raw == "":
        return 0
    try:
        seed = int(raw)
    except ValueError:
        raise ConfigError(SEED_ENV, f"not an integer: {raw!r}") from None
    if not 0 <= seed <= UINT64_MAX:
        raise ConfigError(SEED_ENV, "must be an unsigned 64-bit integer")
    return seed


def parse_config(text: str, default_protocol: str | None = None, env=None) -> ExperimentConfig:
    """Parse and validate a JSON experiment config, filling every default.

    Raises ConfigError naming the offending field path.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<root>", f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("<root>", "expected a JSON object")
    _reject_unknown(data, {"model", "protocol", "disorder", "output"}, "<root>")

    m = _block(data, "model")
    _reject_unknown(m, {"p", "N", "g0", "g1", "theta", "boundary"}, "model")
    boundary = m.get("boundary", OPEN)
    if boundary not in (OPEN, PERIODIC):
        raise ConfigError("model.boundary", "must be 'open' or 'periodic'")
    model = ChainSpec(
        p=_number(m, "p", "model", integer=True, lo=2, required=True),
        N=_number(m, "N", "model", integer=True, lo=1, required=True),
        g0=_number(m, "g0", "model", 1.0),
        g1=_number(m, "g1", "model", 1.0),
        theta=parse_angle(m.get("theta", 0.0), "model.theta"),
        boundary=boundary,
    )

    proto = _block(data, "protocol")
    kind = proto.get("kind", default_protocol)
    if kind is None:
        raise ConfigError("protocol.kind", "missing required field")
    if kind not in PROTOCOLS:
        raise ConfigError("protocol.kind", f"unknown protocol {kind!r}; expected one of {PROTOCOLS}")
    params = _protocol_params(kind, proto, model)

    d = _block(data, "disorder")
    _reject_unknown(d, {"W", "seed", "samples"}, "disorder")
    seed = _number(d, "seed", "disorder", None, integer=True, lo=0, hi=UINT64_MAX)
    disorder = DisorderSpec(
        W=_number(d, "W", "disorder", 0.0, lo=0),
        seed=resolve_seed(seed, env),
        samples=_number(d, "samples", "disorder", 1, integer=True, lo=1),
    )

    o = _block(data, "output")
    _reject_unknown(o, {"dir"}, "output")
    out_dir = o.get("dir", "topochain-out")
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError("output.dir", "expected a nonempty path string")

    return ExperimentConfig(model, kind, params, disorder, out_dir)
