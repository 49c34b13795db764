"""Run configuration: JSON files, flag overrides, and unit handling.

Interface units: frequencies in Omega_0, pulse times (t0, window, step) in
tau, decay rates in units of g by default ("0.005" or "0.005g") or in
Omega_0 with an explicit suffix ("0.025omega0"). Internally everything is
stored in Omega_0 units. Serialized configs always write rates with the
omega0 suffix so a round trip is exact regardless of g.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .errors import ConfigError
from .hamiltonian import SystemParams
from .pulses import PulseSchedule, PulseShape, preset_fstirap, preset_stirap

SCENARIOS = ("stirap", "fstirap", "custom")

_PARAM_KEYS = (
    "omega0", "g", "tau", "t0", "kappa", "gamma", "width_divisor",
    "n_max", "t_start", "t_end", "step", "record_every",
)
_RATE_KEYS = ("kappa", "gamma")
_FLAG_KEYS = ("normalize_pe", "restrict_to_s")


def parse_rate(value, g: float, key: str) -> float:
    """Decay rate in Omega_0 units; bare numbers are read in units of g."""
    if isinstance(value, bool):
        raise ConfigError(f"{key} must be a number or rate string, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value) * g
    if isinstance(value, str):
        text = value.strip().lower()
        try:
            if text.endswith("omega0"):
                return float(text[: -len("omega0")])
            if text.endswith("g"):
                return float(text[:-1]) * g
            return float(text) * g
        except ValueError:
            pass
    raise ConfigError(
        f"{key} must be a number (units of g) or a string like '0.005g' or "
        f"'0.025omega0', got {value!r}"
    )


def format_rate(value_omega0: float) -> str:
    return repr(float(value_omega0)) + "omega0"


@dataclass
class RunConfig:
    scenario: str = "stirap"
    params: SystemParams = field(default_factory=SystemParams)
    schedule: PulseSchedule | None = None  # custom scenario only
    csv_path: str | None = None
    meta_path: str | None = None
    normalize_pe: bool = False
    restrict_to_s: bool = False

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(
                f"scenario must be one of {SCENARIOS}, got {self.scenario!r}"
            )
        if self.scenario == "custom" and self.schedule is None:
            raise ConfigError("scenario 'custom' requires a schedule section")

    def resolved_schedule(self) -> PulseSchedule:
        if self.scenario == "stirap":
            return preset_stirap(self.params)
        if self.scenario == "fstirap":
            return preset_fstirap(self.params)
        return replace(self.schedule, tau=self.params.tau)


def _shape_from_dict(data, where: str) -> PulseShape:
    if not isinstance(data, dict):
        raise ConfigError(f"{where} must be an object, got {type(data).__name__}")
    kind = data.get("kind")
    if kind == "constant":
        _require_keys(data, {"kind", "amplitude"}, where)
        return PulseShape(kind="constant", amplitude=_number(data, "amplitude", where))
    if kind == "gaussian":
        _require_keys(data, {"kind", "amplitude", "center", "width_divisor"}, where)
        return PulseShape(
            kind="gaussian",
            amplitude=_number(data, "amplitude", where),
            center=_number(data, "center", where, default=0.0),
            width_divisor=_number(data, "width_divisor", where, default=2.0),
        )
    if kind == "sum":
        terms = data.get("terms")
        if not isinstance(terms, list) or not terms:
            raise ConfigError(f"{where}.terms must be a non-empty list")
        return PulseShape(
            kind="sum",
            terms=tuple(
                _shape_from_dict(t, f"{where}.terms[{i}]") for i, t in enumerate(terms)
            ),
        )
    raise ConfigError(
        f"{where}.kind must be 'constant', 'gaussian' or 'sum', got {kind!r}"
    )


def _shape_to_dict(shape: PulseShape) -> dict:
    if shape.kind == "sum":
        return {"kind": "sum", "terms": [_shape_to_dict(t) for t in shape.terms]}
    if shape.kind == "constant":
        return {"kind": "constant", "amplitude": shape.amplitude}
    return {
        "kind": "gaussian",
        "amplitude": shape.amplitude,
        "center": shape.center,
        "width_divisor": shape.width_divisor,
    }


def _number(data: dict, key: str, where: str, default=None):
    value = data.get(key, default)
    if value is None and default is None:
        raise ConfigError(f"{where}.{key} is required")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number, got {value!r}")
    return float(value)


def _require_keys(data: dict, allowed: set, where: str):
    extra = set(data) - allowed
    if extra:
        raise ConfigError(f"unknown keys in {where}: {sorted(extra)}")


def _schedule_from_dict(data, tau: float) -> PulseSchedule:
    if not isinstance(data, dict):
        raise ConfigError("schedule must be an object")
    _require_keys(data, {"omega_a", "omega_b", "g_a", "g_b"}, "schedule")
    shapes = {}
    for name in ("omega_a", "omega_b", "g_a", "g_b"):
        if name not in data:
            raise ConfigError(f"schedule.{name} is required")
        shapes[name] = _shape_from_dict(data[name], f"schedule.{name}")
    return PulseSchedule(tau=tau, **shapes)


def params_from_dict(raw_params: dict) -> SystemParams:
    """SystemParams from config keys, converting rates to Omega_0 units."""
    if not isinstance(raw_params, dict):
        raise ConfigError("params must be an object")
    _require_keys(raw_params, set(_PARAM_KEYS), "params")

    g = raw_params.get("g", SystemParams.g)
    if isinstance(g, bool) or not isinstance(g, (int, float)):
        raise ConfigError(f"params.g must be a number, got {g!r}")
    kwargs = {}
    for key in _PARAM_KEYS:
        if key not in raw_params:
            continue
        value = raw_params[key]
        if key in _RATE_KEYS:
            kwargs[key] = parse_rate(value, float(g), f"params.{key}")
        elif key == "record_every":
            if value is not None and (isinstance(value, bool) or not isinstance(value, int)):
                raise ConfigError(f"params.record_every must be an integer, got {value!r}")
            kwargs[key] = value
        elif key == "n_max":
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"params.n_max must be an integer, got {value!r}")
            kwargs[key] = value
        elif value is None and key in ("t_start", "t_end"):
            kwargs[key] = None
        else:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"params.{key} must be a number, got {value!r}")
            kwargs[key] = float(value)
    return SystemParams(**kwargs)


def build_config(data: dict) -> RunConfig:
    """RunConfig from a plain config dict; meta files ({'config': ...}) work too."""
    if not isinstance(data, dict):
        raise ConfigError(f"config must be an object, got {type(data).__name__}")
    if isinstance(data.get("config"), dict):
        data = data["config"]
    allowed = {"scenario", "params", "schedule", "output", "flags"}
    _require_keys(data, allowed, "config")

    scenario = data.get("scenario", "stirap")
    params = params_from_dict(data.get("params", {}))

    schedule = None
    if data.get("schedule") is not None:
        schedule = _schedule_from_dict(data["schedule"], params.tau)

    output = data.get("output", {})
    if not isinstance(output, dict):
        raise ConfigError("output must be an object")
    _require_keys(output, {"csv", "meta"}, "output")

    flags = data.get("flags", {})
    if not isinstance(flags, dict):
        raise ConfigError("flags must be an object")
    _require_keys(flags, set(_FLAG_KEYS), "flags")
    for key, value in flags.items():
        if not isinstance(value, bool):
            raise ConfigError(f"flags.{key} must be true or false, got {value!r}")

    return RunConfig(
        scenario=scenario,
        params=params,
        schedule=schedule,
        csv_path=output.get("csv"),
        meta_path=output.get("meta"),
        normalize_pe=flags.get("normalize_pe", False),
        restrict_to_s=flags.get("restrict_to_s", False),
    )


def load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None


def config_from_sources(file_data: dict | None, overrides: dict | None) -> RunConfig:
    """Merge a config file with flag overrides (flags win key by key).

    Overrides use flat keys: scenario, any SystemParams field, csv, meta,
    normalize_pe, restrict_to_s. None values mean "not given".
    """
    data = dict(file_data) if file_data else {}
    if "config" in data and isinstance(data.get("config"), dict):
        data = dict(data["config"])
    data.setdefault("params", {})
    data["params"] = dict(data["params"]) if isinstance(data["params"], dict) else data["params"]
    data.setdefault("output", {})
    data["output"] = dict(data["output"]) if isinstance(data["output"], dict) else data["output"]
    data.setdefault("flags", {})
    data["flags"] = dict(data["flags"]) if isinstance(data["flags"], dict) else data["flags"]

    overrides = overrides or {}
    for key, value in overrides.items():
        if value is None:
            continue
        if key == "scenario":
            data["scenario"] = value
        elif key in _PARAM_KEYS:
            if isinstance(data["params"], dict):
                data["params"][key] = value
        elif key == "csv":
            data["output"]["csv"] = value
        elif key == "meta":
            data["output"]["meta"] = value
        elif key in _FLAG_KEYS:
            data["flags"][key] = value
        else:
            raise ConfigError(f"unknown configuration key {key!r}")
    return build_config(data)


def config_to_dict(config: RunConfig, resolved_record_every: int | None = None) -> dict:
    """Fully resolved config dict; feeding it back reproduces the same run."""
    p = config.params
    lo, hi = p.resolved_window()
    params = {
        "omega0": p.omega0,
        "g": p.g,
        "tau": p.tau,
        "t0": p.t0,
        "kappa": format_rate(p.kappa),
        "gamma": format_rate(p.gamma),
        "width_divisor": p.width_divisor,
        "n_max": p.n_max,
        "t_start": lo,
        "t_end": hi,
        "step": p.step,
        "record_every": resolved_record_every
        if resolved_record_every is not None
        else p.record_every,
    }
    out: dict = {"scenario": config.scenario, "params": params}
    if config.schedule is not None:
        out["schedule"] = {
            name: _shape_to_dict(getattr(config.schedule, name))
            for name in ("omega_a", "omega_b", "g_a", "g_b")
        }
    out["output"] = {"csv": config.csv_path, "meta": config.meta_path}
    out["flags"] = {
        "normalize_pe": config.normalize_pe,
        "restrict_to_s": config.restrict_to_s,
    }
    return out


def scan_spec_from_dict(data: dict):
    """(ScanSpec, objective or None) from a scan spec dict.

    Shape: {"base": params object, "scenario": ..., "axes": [[name, [values]],
    ...], "outputs": [...], "workers": n, "point_cap": n, "objective": expr}.
    """
    from .scan import ScanSpec  # deferred: scan pulls in the propagator stack

    if not isinstance(data, dict):
        raise ConfigError(f"scan spec must be an object, got {type(data).__name__}")
    _require_keys(
        data,
        {"base", "scenario", "axes", "outputs", "workers", "point_cap", "objective"},
        "scan spec",
    )
    base = params_from_dict(data.get("base", {}))

    raw_axes = data.get("axes")
    if not isinstance(raw_axes, list) or not raw_axes:
        raise ConfigError("axes must be a non-empty list of [name, values] pairs")
    axes = []
    for i, entry in enumerate(raw_axes):
        if not (isinstance(entry, (list, tuple)) and len(entry) == 2):
            raise ConfigError(f"axes[{i}] must be a [name, values] pair")
        name, values = entry
        if not isinstance(values, (list, tuple)):
            raise ConfigError(f"axes[{i}] values must be a list")
        converted = []
        for v in values:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"axes[{i}] value {v!r} is not a number")
            converted.append(float(v))
        axes.append((name, tuple(converted)))

    kwargs = {"base": base, "axes": tuple(axes)}
    if data.get("scenario") is not None:
        kwargs["scenario"] = data["scenario"]
    if data.get("outputs") is not None:
        outs = data["outputs"]
        if not isinstance(outs, list):
            raise ConfigError("outputs must be a list of metric names")
        kwargs["outputs"] = tuple(outs)
    for key in ("workers", "point_cap"):
        if data.get(key) is not None:
            value = data[key]
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{key} must be an integer, got {value!r}")
            kwargs[key] = value

    objective = data.get("objective")
    if objective is not None and not isinstance(objective, str):
        raise ConfigError(f"objective must be a string, got {objective!r}")
    return ScanSpec(**kwargs), objective
