"""Command-line entry point: ``topochain <subcommand> [--config FILE] [--out DIR]``.

Every run writes ``trace.csv`` and/or ``table.csv``, a ``summary.json`` with the
seed manifest, and the normalized ``config.echo.json``.

Exit codes: 0 success, 2 configuration error, 3 numerical-contract violation
(gap closure, critical point, lost adiabaticity), 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import PROTOCOLS, ConfigError, ExperimentConfig, parse_config, resolve_seed
from .dynamics import (
    EvolutionTrace,
    critical_times,
    run_quench,
    time_averaged_ced,
    winding_from_critical_time,
)
from .ensemble import unwrap
from .errors import AdiabaticityError, ContractError, EnsembleError, GapClosedError, ValidationError
from .model import ChainSpec, DisorderSpec, UINT64_MAX
from .pump import PumpSchedule, disorder_plateau_sweep, run_pump
from .topo import (
    band_spectrum,
    chern_numbers,
    ssh_couplings,
    winding_number_analytic,
    winding_number_integral,
)

log = logging.getLogger("topochain")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONTRACT = 3
EXIT_IO = 4

DEFAULT_MODELS = {
    "quench": {"p": 2, "N": 8, "theta": "0.1pi"},
    "winding": {"p": 2, "N": 8, "theta": "0.1pi"},
    "pump": {"p": 3, "N": 6, "theta": "pi"},
    "chern": {"p": 3, "N": 6, "theta": "pi"},
    "bands": {"p": 3, "N": 6, "theta": "pi"},
    "sweep": {"p": 3, "N": 6, "theta": "pi"},
}
DEFAULT_SWEEP = {"over": "W", "values": [0.0, 0.05, 0.1], "bands": [1, 2]}


def fmt(value) -> str:
    """CSV cell: integers and strings verbatim, floats with 17 significant digits."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_json(path: Path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, allow_nan=True)
        fh.write("\n")


def _disorder_or_none(d: DisorderSpec) -> DisorderSpec | None:
    return d if d.W > 0 else None


class RunOutcome:
    """Collects summary entries and a contract-failure flag while a protocol runs."""

    def __init__(self):
        self.results: dict = {}
        self.diagnostics: dict = {}
        self.contract_failures: list[str] = []


def _run_quench(cfg, out: Path, res: RunOutcome):
    p = cfg.params
    spec = cfg.model
    sub = "ab".index(p["sublattice"]) + 1
    disorder = _disorder_or_none(cfg.disorder)
    trace = run_quench(spec, p["cell"], sub, p["t_max"], dt=p["dt"], disorder=disorder)
    rows = zip(trace.times, trace.values, trace.relative)
    header = ["t", "ced", "ced_relative"]
    if trace.stderr is not None:
        rows = zip(trace.times, trace.values, trace.relative, trace.stderr)
        header.append("stderr")
    write_csv(out / "trace.csv", header, rows)

    J1, J2 = ssh_couplings(spec.g0, spec.g1, spec.theta)
    tcs = critical_times(J1, J2, p["s_max"])
    readouts = [winding_from_critical_time(spec, tc, p["cell"], disorder) for tc in tcs]
    write_csv(out / "table.csv", ["s", "t_c", "two_ced_at_t_c"], zip(range(len(tcs)), tcs, readouts))

    avg = time_averaged_ced(trace)
    half = trace.times <= trace.times[-1] / 2
    avg_half = time_averaged_ced(
        EvolutionTrace(trace.times[half], trace.values[half], trace.relative[half])
    ) if half.sum() > 1 else avg
    res.results.update(
        {
            "couplings": [J1, J2],
            "time_averaged_ced": avg,
            "winding_from_average": 2 * avg,
            "winding_from_critical_times": readouts,
            "critical_times": list(tcs),
            "start": {"cell": p["cell"], "sublattice": p["sublattice"]},
        }
    )
    if p["sublattice"] != "a":
        res.diagnostics["note"] = "b-site start: winding readouts assume an a-site start"
    res.diagnostics.update(
        {
            "average_half_window": avg_half,
            "average_window_change": abs(avg - avg_half),
            "edge_reached": trace.edge_reached,
        }
    )
    try:
        res.results["winding_analytic"] = winding_number_analytic(spec.g0, spec.g1, spec.theta)
    except ContractError as exc:
        res.results["winding_analytic"] = None
        res.diagnostics["winding_analytic_error"] = str(exc)


def _schedule(p) -> PumpSchedule:
    return PumpSchedule(
        p["omega"], p["phi0"], p["cycles"], p["steps_per_cycle"], p["samples_per_cycle"]
    )


def _chern_reference(spec: ChainSpec):
    try:
        return chern_numbers(spec).values
    except GapClosedError:
        return None


def _run_pump(cfg, out: Path, res: RunOutcome):
    p = cfg.params
    spec = cfg.model
    schedule = _schedule(p)
    chern = _chern_reference(spec)
    disorder = _disorder_or_none(cfg.disorder)
    columns, shifts, half_shifts = {}, {}, {}
    trace = None
    for n in p["bands"]:
        ref = None if chern is None else chern[n - 1]
        result = run_pump(spec, schedule, p["cell"], n, disorder, ref)
        trace = result.trace
        columns[n] = result.trace.values
        shifts[n] = {
            "shift": result.shift,
            "stderr": result.shift_stderr,
            "chern": ref,
            "min_band_overlap": result.min_band_overlap,
            "adiabatic": result.adiabatic,
        }
        if not result.adiabatic:
            res.contract_failures.append(
                f"band {n}: adiabaticity lost (min overlap {result.min_band_overlap:.3f})"
            )
        if disorder is None and p["steps_per_cycle"] % (2 * p["samples_per_cycle"]) == 0:
            coarse = replace(schedule, steps_per_cycle=schedule.steps_per_cycle // 2)
            half_shifts[n] = run_pump(spec, coarse, p["cell"], n, None, ref, monitor=False).shift
    header = ["t"] + [f"ce_n{n}" for n in p["bands"]]
    write_csv(out / "trace.csv", header, zip(trace.times, *columns.values()))
    res.results.update({"chern_numbers": chern, "bands": {str(n): v for n, v in shifts.items()}})
    res.diagnostics["half_step_shift_change"] = {
        str(n): abs(shifts[n]["shift"] - half_shifts[n]) for n in half_shifts
    }


def _run_winding(cfg, out: Path, res: RunOutcome):
    spec = cfg.model
    J1, J2 = ssh_couplings(spec.g0, spec.g1, spec.theta)
    nk = cfg.params["nk"]
    q = 2 * np.pi * np.arange(nk) / nk
    dx, dy = J1 + J2 * np.cos(q), J2 * np.sin(q)
    write_csv(out / "table.csv", ["q", "d_x", "d_y"], zip(q, dx, dy))
    res.results.update(
        {
            "couplings": [J1, J2],
            "winding_analytic": winding_number_analytic(spec.g0, spec.g1, spec.theta),
            "winding_integral": winding_number_integral(J1, J2, nk),
        }
    )


def _run_chern(cfg, out: Path, res: RunOutcome):
    p = cfg.params
    cs = chern_numbers(cfg.model, p["nq"], p["ntheta"])
    fine = chern_numbers(cfg.model, 2 * p["nq"], 2 * p["ntheta"])
    write_csv(
        out / "table.csv",
        ["band", "chern", "chern_raw"],
        ((n + 1, c, r) for n, (c, r) in enumerate(zip(cs.values, cs.raw))),
    )
    res.results.update({"chern_numbers": list(cs.values), "min_gap": cs.min_gap})
    res.diagnostics["doubled_grid_agrees"] = cs.values == fine.values
    if cs.values != fine.values:
        res.contract_failures.append("Chern numbers change when the grid is doubled")


def _run_bands(cfg, out: Path, res: RunOutcome):
    p = cfg.params
    bands = band_spectrum(cfg.model, p["nq"], p["ntheta"])
    rows = []
    for i, q in enumerate(bands.qs):
        for j, th in enumerate(bands.thetas):
            rows.append([q, th, *bands.energies[i, j]])
    header = ["q", "theta"] + [f"E{n + 1}" for n in range(cfg.model.p)]
    write_csv(out / "table.csv", header, rows)
    res.results.update({"min_gap": bands.min_gap()})


def chern_scan_rows(base: ChainSpec, g0_values, nq=24, ntheta=24):
    rows = []
    for g0 in g0_values:
        spec = replace(base, g0=float(g0))
        try:
            cs = chern_numbers(spec, nq, ntheta)
            rows.append([g0, *cs.values, cs.min_gap, "gapped"])
        except GapClosedError as exc:
            rows.append([g0, *([None] * spec.p), exc.gap, "gap_closed"])
    return rows


def _run_sweep(cfg, out: Path, res: RunOutcome):
    p = cfg.params
    spec = cfg.model
    if p["over"] == "g0":
        rows = chern_scan_rows(spec, p["values"], p["nq"], p["ntheta"])
        header = ["g0"] + [f"C{n + 1}" for n in range(spec.p)] + ["min_gap", "status"]
        write_csv(out / "table.csv", header, rows)
        res.results["chern_scan"] = [dict(zip(header, r)) for r in rows]
        return
    schedule = _schedule(p)
    chern = _chern_reference(spec)
    table = {}
    for n in p["bands"]:
        ref = None if chern is None else chern[n - 1]
        table[n] = disorder_plateau_sweep(
            spec, schedule, n, p["values"], cfg.disorder, p["cell"], ref
        )
    header = ["W"]
    for n in p["bands"]:
        header += [f"shift_n{n}", f"stderr_n{n}"]
    rows = []
    for k, W in enumerate(p["values"]):
        row = [W]
        for n in p["bands"]:
            row += [table[n][k].shift, table[n][k].stderr]
        rows.append(row)
    write_csv(out / "table.csv", header, rows)
    res.results.update(
        {
            "chern_numbers": chern,
            "plateau": {
                str(n): [
                    {"W": pt.W, "shift": pt.shift, "stderr": pt.stderr, "on_plateau": pt.on_plateau}
                    for pt in table[n]
                ]
                for n in p["bands"]
            },
        }
    )


RUNNERS = {
    "quench": _run_quench,
    "pump": _run_pump,
    "winding": _run_winding,
    "chern": _run_chern,
    "bands": _run_bands,
    "sweep": _run_sweep,
}


def _summary(command: str, manifest: dict, res: RunOutcome, status: str) -> dict:
    return {
        "tool": "topochain",
        "version": __version__,
        "command": command,
        "status": status,
        "seed_manifest": manifest,
        "results": res.results,
        "diagnostics": res.diagnostics,
        "contract_failures": res.contract_failures,
    }


def run(cfg: ExperimentConfig, out_dir: str | Path | None = None) -> int:
    """Execute a validated config and write its artifacts. Returns the exit status."""
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.echo.json").write_text(cfg.echo())
    res = RunOutcome()
    status = EXIT_OK
    try:
        RUNNERS[cfg.protocol](cfg, out, res)
    except (ContractError, EnsembleError) as exc:
        inner = unwrap(exc)
        if not isinstance(inner, ContractError):
            raise
        res.contract_failures.append(str(inner))
    if res.contract_failures:
        status = EXIT_CONTRACT
    write_json(
        out / "summary.json",
        _summary(cfg.protocol, cfg.disorder.manifest(), res, "ok" if status == 0 else "contract_violation"),
    )
    return status


# ---------------------------------------------------------------- presets


def _preset_fig2(theta: float, W: float):
    def runner(out: Path, seed: int, steps: int | None):
        lengths = (4, 8, 16)
        disorder = DisorderSpec(W, seed, 30) if W > 0 else None
        columns, table, tc = [], [], None
        times = None
        for L in lengths:
            spec = ChainSpec(2, L // 2, 1.0, 1.0, theta)
            trace = run_quench(spec, disorder=disorder)
            times = trace.times
            columns.append(trace.relative)
            J1, J2 = ssh_couplings(1.0, 1.0, theta)
            tc = critical_times(J1, J2, 0)[0]
            table.append(
                [L, time_averaged_ced(trace), winding_from_critical_time(spec, tc, disorder=disorder)]
            )
        write_csv(out / "trace.csv", ["t"] + [f"ced_L{L}" for L in lengths], zip(times, *columns))
        write_csv(out / "table.csv", ["L", "time_averaged_ced", "two_ced_at_t_c"], table)
        manifest = (disorder or DisorderSpec(0.0, seed, 1)).manifest()
        results = {
            "theta": theta,
            "t_c": tc,
            "winding_analytic": winding_number_analytic(1.0, 1.0, theta),
            "rows": [dict(zip(["L", "time_averaged_ced", "two_ced_at_t_c"], r)) for r in table],
        }
        echo = {"preset": None, "theta": theta, "W": W, "lengths": list(lengths), "t_max": 50.0,
                "dt": 0.02, "samples": 30 if W > 0 else 1, "seed": seed}
        return results, manifest, echo, []

    return runner


def _preset_fig3_pump(out: Path, seed: int, steps: int | None):
    spec = ChainSpec(3, 6, 1.0, 1.0, math.pi)
    schedule = PumpSchedule(steps_per_cycle=steps or 4096)
    chern = chern_numbers(spec).values
    cols, shifts, failures = [], {}, []
    times = None
    for n in (1, 2, 3):
        r = run_pump(spec, schedule, 3, n, chern_reference=chern[n - 1])
        times = r.trace.times
        cols.append(r.trace.values)
        shifts[str(n)] = {"shift": r.shift, "chern": chern[n - 1],
                          "min_band_overlap": r.min_band_overlap}
        if not r.adiabatic:
            failures.append(f"band {n}: adiabaticity lost")
    write_csv(out / "trace.csv", ["t", "ce_n1", "ce_n2", "ce_n3"], zip(times, *cols))
    echo = {"preset": None, "p": 3, "N": 6, "g0": 1.0, "g1": 1.0, "omega": schedule.omega,
            "phi0": schedule.phi0, "cell": 3, "steps_per_cycle": schedule.steps_per_cycle}
    return {"chern_numbers": list(chern), "bands": shifts}, DisorderSpec(0.0, seed, 1).manifest(), echo, failures


def _preset_fig3_plateau(out: Path, seed: int, steps: int | None):
    spec = ChainSpec(3, 6, 1.0, 1.0, math.pi)
    schedule = PumpSchedule(steps_per_cycle=steps or 4096)
    W_list = [0.0, 0.05, 0.1, 0.15, 0.2]
    disorder = DisorderSpec(0.0, seed, 50)
    chern = chern_numbers(spec).values
    table = {n: disorder_plateau_sweep(spec, schedule, n, W_list, disorder, 3, chern[n - 1])
             for n in (1, 2)}
    rows = [[W, table[1][k].shift, table[1][k].stderr, table[2][k].shift, table[2][k].stderr]
            for k, W in enumerate(W_list)]
    write_csv(out / "table.csv", ["W", "shift_n1", "stderr_n1", "shift_n2", "stderr_n2"], rows)
    echo = {"preset": None, "W": W_list, "samples": 50, "seed": seed, "omega": schedule.omega,
            "steps_per_cycle": schedule.steps_per_cycle}
    results = {"chern_numbers": list(chern),
               "plateau": {str(n): [{"W": pt.W, "shift": pt.shift, "stderr": pt.stderr,
                                     "on_plateau": pt.on_plateau} for pt in table[n]]
                           for n in (1, 2)}}
    return results, disorder.manifest(), echo, []


def _preset_chern_scan(out: Path, seed: int, steps: int | None):
    values = [round(0.05 * i, 10) for i in range(11)]
    rows = chern_scan_rows(ChainSpec(3, 1, 0.0, 1.0, 0.0), values)
    header = ["g0", "C1", "C2", "C3", "min_gap", "status"]
    write_csv(out / "table.csv", header, rows)
    echo = {"preset": None, "p": 3, "g1": 1.0, "g0": values, "nq": 24, "ntheta": 24}
    return {"chern_scan": [dict(zip(header, r)) for r in rows]}, DisorderSpec(0.0, seed, 1).manifest(), echo, []


PRESETS = {
    "fig2-nontrivial": _preset_fig2(0.1 * math.pi, 0.0),
    "fig2-trivial": _preset_fig2(0.9 * math.pi, 0.0),
    "fig2-nontrivial-disorder": _preset_fig2(0.1 * math.pi, 0.2),
    "fig2-trivial-disorder": _preset_fig2(0.9 * math.pi, 0.2),
    "fig3-pump": _preset_fig3_pump,
    "fig3-plateau": _preset_fig3_plateau,
    "chern-scan": _preset_chern_scan,
}


def run_preset(name: str, out_dir: str | Path, seed: int = 0, steps: int | None = None) -> int:
    if name not in PRESETS:
        raise ConfigError("preset", f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    res = RunOutcome()
    try:
        results, manifest, echo, failures = PRESETS[name](out, seed, steps)
    except ContractError as exc:
        results, manifest, echo, failures = {}, DisorderSpec(0.0, seed, 1).manifest(), {}, [str(exc)]
    echo["preset"] = name
    write_json(out / "config.echo.json", echo)
    res.results, res.contract_failures = results, failures
    status = EXIT_CONTRACT if failures else EXIT_OK
    write_json(out / "summary.json", _summary(f"preset {name}", manifest, res,
                                              "ok" if status == 0 else "contract_violation"))
    return status


# ---------------------------------------------------------------- argument parsing


def _seed_arg(text: str) -> int:
    seed = int(text)
    if not 0 <= seed <= UINT64_MAX:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return seed


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topochain",
        description="Topological invariants and their dynamical readout in SSH-type qubit chains.",
    )
    parser.add_argument("--version", action="version", version=f"topochain {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config")
    common.add_argument("--out", help="output directory (overrides output.dir)")
    common.add_argument("--seed", type=_seed_arg, help="disorder seed (overrides the config)")
    common.add_argument("--steps", type=int, help="integrator steps per pump cycle")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in PROTOCOLS:
        sub.add_parser(name, parents=[common], help=f"run the {name} protocol")
    pre = sub.add_parser("preset", parents=[common], help="reproduce a figure-style experiment")
    pre.add_argument("name", choices=sorted(PRESETS))
    return parser


def load_config(args) -> ExperimentConfig:
    if args.config:
        text = Path(args.config).read_text()
    else:
        text = json.dumps({"model": DEFAULT_MODELS[args.command],
                           "protocol": DEFAULT_SWEEP if args.command == "sweep" else {}})
    cfg = parse_config(text, default_protocol=args.command)
    if cfg.protocol != args.command:
        raise ConfigError("protocol.kind", f"config is for {cfg.protocol!r}, subcommand is {args.command!r}")
    if args.seed is not None:
        cfg = replace(cfg, disorder=replace(cfg.disorder, seed=args.seed))
    if args.steps is not None:
        if "steps_per_cycle" not in cfg.params:
            raise ConfigError("--steps", f"the {cfg.protocol} protocol has no integrator steps")
        params = dict(cfg.params, steps_per_cycle=args.steps)
        if args.steps < 1 or args.steps % params["samples_per_cycle"]:
            raise ConfigError("--steps", "must be a positive multiple of samples_per_cycle")
        cfg = replace(cfg, params=params)
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "preset":
            seed = args.seed if args.seed is not None else resolve_seed(None)
            return run_preset(args.name, args.out or f"topochain-{args.name}", seed, args.steps)
        cfg = load_config(args)
        return run(cfg, args.out)
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO
    except ValidationError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except (ContractError, AdiabaticityError) as exc:
        log.error("numerical contract violated: %s", exc)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
