"""Command-line interface.

Runs in-process by default; `--server URL` sends the same resolved
configuration to a running service instead and writes the returned files,
producing byte-identical output either way.

Exit codes: 0 success, 1 internal or partial failure, 2 configuration
error, 3 numerical refusal, 4 output I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .basis import build_basis
from .config import (
    RunConfig,
    build_config,
    config_from_sources,
    config_to_dict,
    load_config_file,
    scan_spec_from_dict,
)
from .errors import ConfigError, SimulatorError
from .hamiltonian import assemble_Hnh
from .runner import dump_json, run_darkcheck, run_scan_spec, run_simulate, write_text


def _add_param_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", metavar="FILE", help="JSON config file (flags override it)")
    p.add_argument("--scenario", choices=("stirap", "fstirap", "custom"))
    p.add_argument("--omega0", type=float, help="reference Rabi frequency (frequency unit)")
    p.add_argument("--g", type=float, help="atom-cavity coupling, units of omega0")
    p.add_argument("--tau", type=float, help="pulse time scale, units of 1/omega0")
    p.add_argument("--t0", type=float, help="drive delay, units of tau")
    p.add_argument("--kappa", help="cavity decay: number (units of g), '0.005g' or '0.025omega0'")
    p.add_argument("--gamma", help="atomic decay: same units as --kappa")
    p.add_argument("--width-divisor", type=float, dest="width_divisor",
                   help="Gaussian width divisor d in exp(-(t-c)^2/(d tau^2))")
    p.add_argument("--n-max", type=int, dest="n_max", help="photon number cutoff per mode")
    p.add_argument("--t-start", type=float, dest="t_start", help="window start, units of tau")
    p.add_argument("--t-end", type=float, dest="t_end", help="window end, units of tau")
    p.add_argument("--step", type=float, help="integrator step, units of tau")
    p.add_argument("--record-every", type=int, dest="record_every",
                   help="record every Nth step (default: about 1000 output rows)")


def _overrides_from(args) -> dict:
    keys = (
        "scenario", "omega0", "g", "tau", "t0", "kappa", "gamma",
        "width_divisor", "n_max", "t_start", "t_end", "step", "record_every",
    )
    overrides = {k: getattr(args, k, None) for k in keys}
    for key in ("kappa", "gamma"):
        if overrides[key] is not None:
            overrides[key] = _parse_rate_flag(overrides[key], key)
    return overrides


def _parse_rate_flag(text: str, key: str):
    """Rate flags stay strings so the config layer owns unit handling."""
    text = text.strip()
    try:
        float(text)
        return text  # bare number, read in units of g downstream
    except ValueError:
        pass
    lowered = text.lower()
    if lowered.endswith("omega0") or lowered.endswith("g"):
        return lowered
    raise ConfigError(f"--{key} must be a number or end in 'g'/'omega0', got {text!r}")


def _load_merged_config(args, extra_overrides=None) -> RunConfig:
    file_data = load_config_file(args.config) if args.config else None
    overrides = _overrides_from(args)
    overrides.update(extra_overrides or {})
    return config_from_sources(file_data, overrides)


def _default_paths(config: RunConfig, args) -> RunConfig:
    csv_path = args.csv or config.csv_path or f"{config.scenario}_metrics.csv"
    meta_path = args.meta or config.meta_path
    if meta_path is None:
        stem = csv_path[:-4] if csv_path.endswith(".csv") else csv_path
        meta_path = stem + ".meta.json"
    config.csv_path = csv_path
    config.meta_path = meta_path
    return config


def _post(server: str, route: str, payload: dict) -> dict:
    import httpx

    try:
        resp = httpx.post(server.rstrip("/") + route, json=payload, timeout=600.0)
    except httpx.HTTPError as exc:
        raise SimulatorError(f"cannot reach server {server}: {exc}") from None
    if resp.status_code >= 400:
        try:
            body = resp.json()
            kind, message = body.get("kind", "internal"), body.get("message", resp.text)
        except ValueError:
            kind, message = "internal", resp.text
        exc_type = {"config": ConfigError, "numerical": _numerical_type()}.get(kind, SimulatorError)
        raise exc_type(f"server: {message}")
    return resp.json()


def _numerical_type():
    from .errors import NumericalRefusal

    return NumericalRefusal


def _request_body(config: RunConfig) -> dict:
    data = config_to_dict(config)
    return {
        "scenario": data["scenario"],
        "params": data["params"],
        "flags": data["flags"],
        **({"schedule": data["schedule"]} if "schedule" in data else {}),
    }


def _cmd_simulate(args) -> int:
    flag_extras = {
        "normalize_pe": True if args.normalize_pe else None,
        "restrict_to_s": True if args.restrict_to_s else None,
    }
    config = _load_merged_config(args, flag_extras)

    if args.print_config:
        sys.stdout.write(dump_json(config_to_dict(config)))
        return 0
    if args.dump_basis:
        sys.stdout.write(dump_json(build_basis(config.params.n_max).describe()))
        return 0
    if args.dump_hamiltonian is not None:
        t = args.dump_hamiltonian
        idx = build_basis(config.params.n_max)
        h = assemble_Hnh(t, config.resolved_schedule(), config.params, idx)
        matrix = [[[float(z.real), float(z.imag)] for z in row] for row in h]
        sys.stdout.write(dump_json({"t": t, "dim": idx.dim, "matrix": matrix}))
        return 0

    config = _default_paths(config, args)
    if args.server:
        body = _post(args.server, "/simulate", _request_body(config))
        csv_text, meta = body["csv"], body["meta"]
        meta["config"]["output"] = {"csv": config.csv_path, "meta": config.meta_path}
    else:
        result = run_simulate(config)
        csv_text, meta = result.csv_text, result.meta
    write_text(config.csv_path, csv_text)
    write_text(config.meta_path, dump_json(meta))
    final = meta["metrics"]["final"]
    print(f"wrote {config.csv_path} and {config.meta_path}")
    print(
        "final: "
        + " ".join(f"{k}={final[k]:.6g}" for k in ("t", "P1", "P5", "P8", "norm"))
    )
    return 0


def _cmd_darkcheck(args) -> int:
    config = _load_merged_config(args)
    csv_path = args.csv or "darkcheck.csv"
    if args.server:
        body = _post(
            args.server,
            "/darkcheck",
            {**_request_body(config), "n_times": args.times, "seed": args.seed},
        )
        csv_text, meta = body["csv"], body["meta"]
    else:
        result = run_darkcheck(config, n_times=args.times, seed=args.seed)
        csv_text, meta = result.csv_text, result.meta
    write_text(csv_path, csv_text)
    max_resid = meta["max_residual"]
    print(f"wrote {csv_path}")
    print(
        f"defined points: {meta['n_defined']}/{meta['n_times']}, "
        f"max residual: {'n/a' if max_resid is None else format(max_resid, '.3e')}"
    )
    return 0


def _cmd_scan(args) -> int:
    data = load_config_file(args.spec)
    if args.workers is not None:
        data["workers"] = args.workers
    if args.objective is not None:
        data["objective"] = args.objective
    csv_path = args.csv or "scan.csv"

    if args.server:
        spec_dict = dict(data)
        objective = spec_dict.pop("objective", None)
        scan_spec_from_dict({**spec_dict, "objective": objective})  # fail fast locally
        body = _post(args.server, "/scan", {**spec_dict, "objective": objective})
        csv_text, best = body["csv"], body.get("best")
        n_points = body["n_points"]
        n_failed = body["n_failed"]
    else:
        spec, objective = scan_spec_from_dict(data)
        result = run_scan_spec(spec, objective=objective)
        csv_text, best = result.csv_text, result.best
        n_points = len(result.table)
        n_failed = sum(1 for row in result.table if row.get("error"))
    write_text(csv_path, csv_text)
    print(f"wrote {csv_path} ({n_points} points)")
    if best is not None:
        print("best point: " + json.dumps(best))
    if n_failed:
        print(f"{n_failed} of {n_points} points failed", file=sys.stderr)
        return 1
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("stirapsim.service:app", host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stirapsim",
        description="Two-atom cavity transfer simulator: propagation, dark-state "
        "checks, and parameter scans.",
    )
    parser.add_argument("--version", action="version", version=f"stirapsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="propagate a scenario and write metrics CSV + meta JSON")
    _add_param_flags(sim)
    sim.add_argument("--normalize-pe", action="store_true", dest="normalize_pe",
                     help="project the state back to unit norm before the overlap error")
    sim.add_argument("--restrict-to-s", action="store_true", dest="restrict_to_s",
                     help="integrate on the 8-state invariant subspace only")
    sim.add_argument("--csv", help="metrics CSV path (default <scenario>_metrics.csv)")
    sim.add_argument("--meta", help="meta JSON path (default CSV path with .meta.json)")
    group = sim.add_mutually_exclusive_group()
    group.add_argument("--print-config", action="store_true", dest="print_config",
                       help="print the fully resolved config as JSON and exit")
    group.add_argument("--dump-basis", action="store_true", dest="dump_basis",
                       help="print basis order and invariant-subspace map as JSON and exit")
    group.add_argument("--dump-hamiltonian", type=float, metavar="T", dest="dump_hamiltonian",
                       help="print the non-Hermitian matrix at absolute time T as JSON and exit")
    sim.add_argument("--server", help="POST to a running service instead of running in-process")
    sim.set_defaults(func=_cmd_simulate)

    dark = sub.add_parser("darkcheck", help="nullity residuals and kernel dimensions over a grid")
    _add_param_flags(dark)
    dark.add_argument("--times", type=int, default=101, help="number of grid times (default 101)")
    dark.add_argument("--seed", type=int, help="use a seeded random schedule instead of the preset")
    dark.add_argument("--csv", help="output CSV path (default darkcheck.csv)")
    dark.add_argument("--server", help="POST to a running service instead of running in-process")
    dark.set_defaults(func=_cmd_darkcheck)

    scan = sub.add_parser("scan", help="grid sweep from a JSON spec")
    scan.add_argument("spec", help="scan spec JSON file")
    scan.add_argument("--csv", help="output CSV path (default scan.csv)")
    scan.add_argument("--workers", type=int, help="parallel worker processes")
    scan.add_argument("--objective", help="metric expression to minimize for the best point")
    scan.add_argument("--server", help="POST to a running service instead of running in-process")
    scan.set_defaults(func=_cmd_scan)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SimulatorError as exc:
        print(f"error ({exc.kind}): {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error (internal): {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
